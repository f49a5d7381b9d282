import json

import pytest

from sexitlab import profiles as P

PAPER_FIXTURES = ["code_a_orig", "code_a_mod", "code_b_orig", "code_b_mod",
                  "code_c_orig", "code_c_mod1", "code_c_mod2"]

# rates computed by hand from the table coefficients (R = 1 - (sum rho/d)/(sum lam/d))
EXACT_RATES = {
    "code_a_orig": 0.500042191,
    "code_a_mod": 0.500485248,
    "code_b_orig": 0.501992032,
    "code_b_mod": 0.497319035,
    "code_c_orig": 0.501992032,
    "code_c_mod1": 0.508540474,
    "code_c_mod2": 0.498697917,
    "reg_3_6": 0.5,
    "reg_3_5": 0.4,
}


def test_all_fixtures_validate():
    for name in P.fixture_names():
        assert P.validate(P.fixture_profile(name)) == []


@pytest.mark.parametrize("name,expected", sorted(EXACT_RATES.items()))
def test_fixture_design_rates(name, expected):
    assert P.design_rate(P.fixture_profile(name)) == pytest.approx(expected, abs=1e-6)


def test_code_a_mod_rho_sums_to_one():
    rho = dict(P.fixture_profile("code_a_mod").rho)
    assert sorted(rho.values()) == [0.01, 0.02, 0.1, 0.435, 0.435]
    assert sum(rho.values()) == pytest.approx(1.0, abs=1e-12)


def test_validate_reports_bad_weight_sum():
    prof = P.make_profile([(2, 0.5), (3, 0.4)], [(6, 1.0)])
    violations = P.validate(prof)
    assert any("sum" in v for v in violations)


def test_validate_reports_negative_weight():
    prof = P.make_profile([(2, 1.1), (3, -0.1)], [(6, 1.0)])
    assert any("negative" in v for v in P.validate(prof))


def test_validate_rejects_edge_degree_one():
    prof = P.make_profile([(1, 0.5), (3, 0.5)], [(6, 1.0)])
    assert any("degree 1" in v for v in P.validate(prof))


def test_regular_rate_is_exact():
    assert P.design_rate(P.regular_profile(3, 6)) == pytest.approx(0.5, abs=1e-15)


def test_design_rate_requires_edge_perspective():
    node = P.edge_to_node(P.regular_profile(3, 6))
    with pytest.raises(P.ProfileError):
        P.design_rate(node)


def test_edge_to_node_regular_identity():
    prof = P.regular_profile(3, 6)
    node = P.edge_to_node(prof)
    assert dict(node.lam) == {3: 1.0}
    assert dict(node.rho) == {6: 1.0}


def test_edge_to_node_two_term_example():
    prof = P.make_profile([(2, 0.5), (4, 0.5)], [(6, 1.0)])
    node = P.edge_to_node(prof)
    assert dict(node.lam)[2] == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert dict(node.lam)[4] == pytest.approx(1.0 / 3.0, abs=1e-15)


@pytest.mark.parametrize("name", PAPER_FIXTURES)
def test_perspective_round_trip(name):
    prof = P.fixture_profile(name)
    back = P.node_to_edge(P.edge_to_node(prof))
    for (d1, w1), (d2, w2) in zip(prof.lam, back.lam):
        assert d1 == d2 and abs(w1 - w2) < 1e-12
    for (d1, w1), (d2, w2) in zip(prof.rho, back.rho):
        assert d1 == d2 and abs(w1 - w2) < 1e-12
    assert P.design_rate(back) == pytest.approx(P.design_rate(prof), abs=1e-12)


def test_quantize_regular_36():
    spec = P.quantize(P.fixture_profile("reg_3_6"), 180)
    assert spec.vn_counts == ((3, 180),)
    assert spec.cn_counts == ((6, 90),)
    assert spec.e == 540
    assert spec.realized_rate == pytest.approx(0.5)


def test_quantize_regular_35_fig5_parameters():
    spec = P.quantize(P.fixture_profile("reg_3_5"), 155)
    assert spec.vn_counts == ((3, 155),)
    assert spec.cn_counts == ((5, 93),)
    assert spec.e == 465
    assert spec.realized_rate == pytest.approx(0.4)


def test_quantize_code_b_at_128():
    spec = P.quantize(P.fixture_profile("code_b_orig"), 128)
    assert sum(c for _, c in spec.vn_counts) == 128
    assert spec.e % 8 == 0
    assert dict(spec.cn_counts).keys() == {8}
    assert abs(spec.realized_rate - 0.5) < 0.02
    assert spec.e == sum(d * c for d, c in spec.cn_counts)


@pytest.mark.parametrize("name", PAPER_FIXTURES)
def test_quantize_consistency_all_fixtures(name):
    prof = P.fixture_profile(name)
    spec = P.quantize(prof, 180)
    assert sum(c for _, c in spec.vn_counts) == 180
    assert sum(d * c for d, c in spec.vn_counts) == spec.e
    assert sum(d * c for d, c in spec.cn_counts) == spec.e
    d_max = max(max(d for d, _ in prof.lam), max(d for d, _ in prof.rho))
    assert abs(spec.realized_rate - spec.design_rate) <= 2 * d_max / 180


@pytest.mark.parametrize("name", PAPER_FIXTURES)
def test_quantize_error_shrinks_with_n(name):
    # rounding luck can break step-by-step monotonicity (code B hits 4e-5 at
    # N=512), so convergence is checked against the 2*d_max/N envelope plus a
    # strict shrink across the full 32x size range
    prof = P.fixture_profile(name)
    design = P.design_rate(prof)
    d_max = max(max(d for d, _ in prof.lam), max(d for d, _ in prof.rho))
    errors = {n: abs(P.quantize(prof, n).realized_rate - design)
              for n in (128, 512, 4096)}
    for n, err in errors.items():
        assert err <= 2 * d_max / n
    assert errors[4096] <= errors[128]
    assert errors[4096] < 0.004


def test_quantize_rejects_tiny_n():
    with pytest.raises(P.ProfileError):
        P.quantize(P.fixture_profile("reg_3_6"), 4)


def test_quantize_infeasible_regular_parity():
    # (3,6)-regular with odd N: E = 3N is not divisible by 6 and the single
    # VN degree leaves no way to adjust the edge total
    with pytest.raises(P.QuantizeError):
        P.quantize(P.regular_profile(3, 6), 181)


def test_spec_from_counts_checks_edge_totals():
    with pytest.raises(P.ProfileError):
        P.spec_from_counts({3: 10}, {7: 5})


def test_profile_json_round_trip(tmp_path):
    prof = P.fixture_profile("code_a_orig")
    path = tmp_path / "prof.json"
    P.save_profile(prof, path)
    again = P.load_profile(path)
    assert again == prof


def test_profile_json_rejects_invalid(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "perspective": "edge",
        "lambda": [{"degree": 2, "weight": 0.5}, {"degree": 3, "weight": 0.4}],
        "rho": [{"degree": 6, "weight": 1.0}],
    }))
    with pytest.raises(P.ProfileError):
        P.load_profile(path)


def test_unknown_fixture_name():
    with pytest.raises(P.ProfileError):
        P.fixture_profile("missing_profile")
