import numpy as np
import pytest

from sexitlab import analytic as A
from sexitlab import channels as C
from sexitlab import profiles as P

import oracles

REG36 = P.regular_profile(3, 6)
BEC025 = C.bec(0.25)


def test_j_endpoints():
    assert A.j_function(0.0) == 0.0
    assert A.j_function(100.0) > 1.0 - 1e-9


def test_j_matches_quadrature_oracle():
    for sigma in (0.3, 0.7, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0):
        assert A.j_function(sigma) == pytest.approx(oracles.j_quadrature(sigma), abs=1e-6)


def test_j_monotone():
    grid = np.linspace(0.0, 12.0, 500)
    vals = A.j_function(grid)
    assert np.all(np.diff(vals) >= 0.0)


def test_j_inverse_of_half():
    # value frozen from the quadrature+bisection oracle; it also matches the
    # BiAWGN capacity anchor: sigma_ch at the rate-1/2 Shannon limit
    # (Eb/N0 = 0.187 dB) is sqrt(4 * 10^0.0187) = 2.0435 where capacity = 0.5
    assert A.j_inverse(0.5) == pytest.approx(2.043539, abs=2e-3)


def test_j_round_trip():
    for i in (0.05, 0.3, 0.5, 0.9, 0.99):
        assert A.j_function(A.j_inverse(i)) == pytest.approx(i, abs=1e-9)


def test_j_inverse_rejects_one():
    with pytest.raises(ValueError, match="unbounded"):
        A.j_inverse(1.0)
    with pytest.raises(ValueError):
        A.j_inverse(-0.1)


def test_vnd_curve_bec_values():
    assert A.vnd_curve(REG36, 1.0, BEC025) == pytest.approx(1.0, abs=1e-12)
    assert A.vnd_curve(REG36, 0.5, BEC025) == pytest.approx(0.9375, abs=1e-12)
    for name in ("code_a_orig", "code_b_mod"):
        prof = P.fixture_profile(name)
        assert A.vnd_curve(prof, 0.0, BEC025) == pytest.approx(0.75, abs=1e-12)


def test_cnd_curve_bec_values():
    assert A.cnd_curve(REG36, 1.0, BEC025) == pytest.approx(1.0, abs=1e-12)
    assert A.cnd_curve(REG36, 0.5, BEC025) == pytest.approx(0.03125, abs=1e-12)
    assert A.cnd_curve(P.fixture_profile("code_a_orig"), 0.0, BEC025) == 0.0


def test_curves_monotone_all_fixtures():
    grid = np.linspace(0.0, 1.0, 257)
    channels = [BEC025, C.biawgn(2.0, 0.5)]
    for name in P.fixture_names():
        prof = P.fixture_profile(name)
        for ch in channels:
            v = A.vnd_curve(prof, grid, ch)
            c = A.cnd_curve(prof, grid, ch)
            assert np.all(np.diff(v) >= -1e-12), (name, ch.kind)
            assert np.all(np.diff(c) >= -1e-12), (name, ch.kind)
            assert np.all((v >= 0) & (v <= 1))
            assert np.all((c >= 0) & (c <= 1))


def test_vnd_biawgn_at_zero_apriori_is_channel_j():
    ch = C.biawgn(2.0, 0.5)
    jc = A.j_function(C.channel_llr_sigma(ch))
    for name in ("reg_3_6", "code_b_orig"):
        prof = P.fixture_profile(name)
        assert A.vnd_curve(prof, 0.0, ch) == pytest.approx(jc, abs=1e-12)
    assert A.vnd_curve(REG36, 1.0, ch) == pytest.approx(1.0, abs=1e-12)
    assert A.cnd_curve(REG36, 1.0, ch) == pytest.approx(1.0, abs=1e-9)


def test_tunnel_reg36():
    assert A.tunnel_open(REG36, C.bec(0.40)).open
    assert not A.tunnel_open(REG36, C.bec(0.45)).open
    report = A.tunnel_open(REG36, C.bec(0.0))
    assert report.open and report.min_gap > 0


def test_tunnel_open_on_perfect_channel_for_all_fixtures():
    for name in P.fixture_names():
        assert A.tunnel_open(P.fixture_profile(name), C.bec(0.0)).open


def test_threshold_reg36_matches_density_evolution():
    thr = A.threshold_search(REG36, C.BEC)
    de = oracles.de_threshold_bec(REG36.lam, REG36.rho)
    assert thr == pytest.approx(0.4294, abs=1e-3)
    assert thr == pytest.approx(de, abs=1e-3)


def test_threshold_reg35():
    thr = A.threshold_search(P.regular_profile(3, 5), C.BEC)
    assert thr == pytest.approx(0.5176, abs=2e-3)


def test_threshold_random_profiles_match_density_evolution():
    rng = np.random.default_rng(1234)
    for _ in range(10):
        lam_degs = sorted(rng.choice(np.arange(2, 16), size=3, replace=False))
        w = rng.dirichlet(np.ones(3))
        lam = [(int(d), float(x)) for d, x in zip(lam_degs, w)]
        rho_deg = int(rng.integers(5, 10))
        prof = P.make_profile(lam, [(rho_deg, 1.0)])
        if P.validate(prof):
            continue
        thr = A.threshold_search(prof, C.BEC)
        de = oracles.de_threshold_bec(prof.lam, prof.rho)
        assert thr == pytest.approx(de, abs=1e-3), prof


def test_threshold_awgn_regular_is_sane():
    # (3,6) BP threshold over BiAWGN is near 1.1 dB; duality approximation
    # plus the J table keeps the tunnel estimate within a couple tenths
    thr = A.threshold_search(REG36, C.BIAWGN, rate=0.5)
    assert 0.8 < thr < 1.4


def test_area_rate_reg36_exact():
    report = A.area_rate_check(REG36, 0.25)
    assert report.cnd_area == pytest.approx(1.0 / 6.0, abs=1e-12)
    assert report.vnd_area == pytest.approx(1.0 - 0.25 / 3.0, abs=1e-12)
    assert report.implied_rate == pytest.approx(0.5, abs=1e-12)


def test_area_rate_code_a_edit_preserves_rate():
    orig = A.area_rate_check(P.fixture_profile("code_a_orig"), 0.25)
    mod = A.area_rate_check(P.fixture_profile("code_a_mod"), 0.25)
    assert abs(orig.implied_rate - mod.implied_rate) < 0.005


def test_cnd_area_is_polynomial_integral():
    # closed form: integral of I^(j-1) over [0,1] is 1/j
    prof = P.fixture_profile("code_a_orig")
    grid = np.linspace(0.0, 1.0, 20001)
    numeric = np.trapezoid(A.cnd_curve(prof, grid, BEC025), grid)
    assert A.area_rate_check(prof, 0.25).cnd_area == pytest.approx(numeric, abs=1e-6)


def test_curves_csv_shape():
    text = A.curves_csv(REG36, BEC025, n_points=11)
    lines = text.strip().splitlines()
    assert lines[0] == "I_A,I_E_vnd,I_E_cnd"
    assert len(lines) == 12
    last = lines[-1].split(",")
    assert float(last[0]) == 1.0 and float(last[1]) == 1.0 and float(last[2]) == 1.0
