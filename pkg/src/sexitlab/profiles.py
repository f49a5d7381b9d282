"""Degree distributions: validation, rate math, perspective changes, finite-N quantization.

A profile stores the variable-node polynomial ``lam`` and the check-node
polynomial ``rho`` as (degree, weight) pairs.  In edge perspective the weight
of degree d is the fraction of edges attached to degree-d nodes; in node
perspective it is the fraction of nodes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

EDGE = "edge"
NODE = "node"

WEIGHT_SUM_TOL = 1e-9


class ProfileError(ValueError):
    """An operation was handed a profile that violates its contract."""


class QuantizeError(ProfileError):
    """No integer node/degree assignment can realize the profile at this N."""


@dataclass(frozen=True)
class DegreeProfile:
    lam: tuple[tuple[int, float], ...]
    rho: tuple[tuple[int, float], ...]
    perspective: str = EDGE


@dataclass(frozen=True)
class NodeDegreeSpec:
    """Integer realization of a profile: degree -> node count on each side."""

    vn_counts: tuple[tuple[int, int], ...]
    cn_counts: tuple[tuple[int, int], ...]
    n: int
    e: int
    design_rate: float
    realized_rate: float

    @property
    def m_cn(self) -> int:
        return sum(c for _, c in self.cn_counts)

    def vn_degrees(self) -> np.ndarray:
        """Per-node degree vector, nodes ordered by ascending degree."""
        return np.repeat([d for d, _ in self.vn_counts], [c for _, c in self.vn_counts])

    def cn_degrees(self) -> np.ndarray:
        return np.repeat([d for d, _ in self.cn_counts], [c for _, c in self.cn_counts])


def make_profile(lam, rho, perspective: str = EDGE) -> DegreeProfile:
    """Build a profile from (degree, weight) iterables, sorted by degree."""
    def canon(terms):
        return tuple(sorted((int(d), float(w)) for d, w in terms))

    return DegreeProfile(lam=canon(lam), rho=canon(rho), perspective=perspective)


def regular_profile(dv: int, dc: int) -> DegreeProfile:
    return make_profile([(dv, 1.0)], [(dc, 1.0)], EDGE)


def validate(profile: DegreeProfile) -> list[str]:
    """Return all invariant violations; an empty list means the profile is valid."""
    violations: list[str] = []
    if profile.perspective not in (EDGE, NODE):
        violations.append(f"perspective: unknown value {profile.perspective!r}")

    for name, terms in (("lambda", profile.lam), ("rho", profile.rho)):
        if not terms:
            violations.append(f"{name}: no terms")
            continue
        degrees = [d for d, _ in terms]
        if len(set(degrees)) != len(degrees):
            violations.append(f"{name}: duplicate degrees")
        for d, w in terms:
            if d < 1:
                violations.append(f"{name}: degree {d} < 1")
            if w < 0:
                violations.append(f"{name}: negative weight {w} at degree {d}")
        if name == "lambda" and profile.perspective == EDGE:
            for d, w in terms:
                if d < 2 and w > 0:
                    violations.append(f"lambda: degree {d} < 2 not allowed in edge perspective")
        total = sum(w for _, w in terms)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            violations.append(f"{name}: weights sum to {total:.10g}")

    if not violations:
        edge = profile if profile.perspective == EDGE else node_to_edge(profile)
        rate = _rate_unchecked(edge)
        if not (0.0 < rate < 1.0):
            violations.append(f"design rate {rate:.6g} outside (0, 1)")
    return violations


def _require_valid(profile: DegreeProfile, perspective: str | None = None) -> None:
    if perspective is not None and profile.perspective != perspective:
        raise ProfileError(f"expected a {perspective}-perspective profile, got {profile.perspective}")
    violations = validate(profile)
    if violations:
        raise ProfileError("invalid profile: " + "; ".join(violations))


def _rate_unchecked(profile: DegreeProfile) -> float:
    lam_int = sum(w / d for d, w in profile.lam)
    rho_int = sum(w / d for d, w in profile.rho)
    return 1.0 - rho_int / lam_int


def design_rate(profile: DegreeProfile) -> float:
    """R = 1 - (sum rho_j/j)/(sum lambda_i/i) for a valid edge-perspective profile."""
    _require_valid(profile, EDGE)
    return _rate_unchecked(profile)


def _flip(terms, to_node: bool):
    if to_node:
        raw = [(d, w / d) for d, w in terms]
    else:
        raw = [(d, w * d) for d, w in terms]
    total = sum(w for _, w in raw)
    return tuple((d, w / total) for d, w in raw)


def edge_to_node(profile: DegreeProfile) -> DegreeProfile:
    _require_valid(profile, EDGE)
    return replace(profile, lam=_flip(profile.lam, True), rho=_flip(profile.rho, True),
                   perspective=NODE)


def node_to_edge(profile: DegreeProfile) -> DegreeProfile:
    if profile.perspective != NODE:
        raise ProfileError(f"expected a node-perspective profile, got {profile.perspective}")
    return replace(profile, lam=_flip(profile.lam, False), rho=_flip(profile.rho, False),
                   perspective=EDGE)


# -- finite-N quantization ---------------------------------------------------

def _apportion(fracs: list[tuple[int, float]], total: int) -> dict[int, int]:
    """Largest-remainder rounding of fracs*total to integers summing to total."""
    counts = {d: int(math.floor(f * total)) for d, f in fracs}
    leftover = total - sum(counts.values())
    by_residual = sorted(fracs, key=lambda df: (-(df[1] * total - math.floor(df[1] * total)), df[0]))
    for d, _ in by_residual[:leftover]:
        counts[d] += 1
    return counts


def _representable_upto(limit: int, degrees: list[int]) -> np.ndarray:
    """dp[a] == True iff a == sum(d_j * k_j) for non-negative integers k_j."""
    dp = np.zeros(limit + 1, dtype=bool)
    dp[0] = True
    for d in degrees:
        for r in range(min(d, limit + 1)):
            cls = dp[r::d]
            np.logical_or.accumulate(cls, out=cls)
    return dp


def _vn_edge_moves(degrees: list[int]) -> list[tuple[int, int, int]]:
    """All (step, from_degree, to_degree) for moving one node between degrees."""
    return [(b - a, a, b) for a in degrees for b in degrees if a != b]


def _plan_vn_moves(counts: dict[int, int], degrees: list[int], delta: int,
                   max_depth: int = 8) -> list[tuple[int, int]] | None:
    """Shortest sequence of (from, to) single-node degree moves changing E by delta."""
    if delta == 0:
        return []
    moves = _vn_edge_moves(degrees)
    seen = {0: []}
    frontier = [0]
    for _ in range(max_depth):
        nxt = []
        for cur in frontier:
            for step, a, b in moves:
                val = cur + step
                if val in seen or abs(val) > abs(delta) + max(degrees):
                    continue
                seen[val] = seen[cur] + [(a, b)]
                if val == delta:
                    plan = seen[val]
                    # availability along the path
                    trial = dict(counts)
                    for fa, fb in plan:
                        if trial.get(fa, 0) <= 0:
                            break
                        trial[fa] -= 1
                        trial[fb] = trial.get(fb, 0) + 1
                    else:
                        return plan
                nxt.append(val)
        frontier = nxt
        if not frontier:
            break
    return None


def _distortion(counts: dict[int, int], targets: dict[int, float], total: int) -> float:
    return sum(abs(counts.get(d, 0) / total - f) for d, f in targets.items())


def _apply_best_moves(counts: dict[int, int], plan: list[tuple[int, int]],
                      targets: dict[int, float], total: int,
                      degrees: list[int]) -> dict[int, int]:
    """Apply the planned steps, re-picking each (from, to) pair of the same step
    size to minimize deviation from the target node fractions."""
    out = dict(counts)
    for a, b in plan:
        step = b - a
        best = None
        for sa in degrees:
            for sb in degrees:
                if sb - sa != step or out.get(sa, 0) <= 0:
                    continue
                trial = dict(out)
                trial[sa] -= 1
                trial[sb] = trial.get(sb, 0) + 1
                cost = _distortion(trial, targets, total)
                if best is None or cost < best[0]:
                    best = (cost, sa, sb)
        if best is None:
            raise QuantizeError("variable-node repair ran out of movable nodes")
        _, sa, sb = best
        out[sa] -= 1
        out[sb] = out.get(sb, 0) + 1
    return out


def _assemble_cn_counts(rho: tuple[tuple[int, float], ...], e: int) -> dict[int, int]:
    """Integer CN counts with edge sum exactly e, close to the rho edge fractions."""
    degrees = [d for d, _ in rho]
    counts = {d: int(math.floor(w * e / d)) for d, w in rho}
    deficit = e - sum(d * c for d, c in counts.items())
    if deficit == 0:
        return counts
    # breadth-first search over add/remove-one-node ops until the edge deficit is zero
    start = (deficit, ())
    seen = {start[0]: ()}
    frontier = [start]
    for _ in range(8):
        nxt = []
        for cur, path in frontier:
            for d in degrees:
                for op in (-d, d):  # -d: add a node of degree d; +d: remove one
                    val = cur + op
                    if val in seen or abs(val) > abs(deficit) + 2 * max(degrees):
                        continue
                    seen[val] = path + ((d, -1 if op > 0 else 1),)
                    if val == 0:
                        trial = dict(counts)
                        ok = True
                        for dd, sign in seen[val]:
                            trial[dd] = trial.get(dd, 0) + sign
                            if trial[dd] < 0:
                                ok = False
                                break
                        if ok:
                            return trial
                    nxt.append((val, seen[val]))
        frontier = nxt
        if not frontier:
            break
    raise QuantizeError(f"no check-node count assignment matches E = {e} for degrees {degrees}")


def quantize(profile: DegreeProfile, n: int) -> NodeDegreeSpec:
    """Round a fractional edge-perspective profile onto N variable nodes.

    VN counts come from largest-remainder rounding of the node fractions; the
    edge total is then nudged (single-node degree moves) to the nearest value
    the CN degrees can realize exactly, and CN counts are assembled to match.
    """
    _require_valid(profile, EDGE)
    if n < 8:
        raise ProfileError(f"N = {n} too small (need N >= 8)")

    rate = _rate_unchecked(profile)
    node = edge_to_node(profile)
    lam_node = dict(node.lam)
    vn_degrees = sorted(lam_node)
    counts = _apportion(sorted(lam_node.items()), n)
    e0 = sum(d * c for d, c in counts.items())

    cn_degrees = [d for d, _ in profile.rho]
    g_vn = 0
    for a in vn_degrees:
        for b in vn_degrees:
            g_vn = math.gcd(g_vn, abs(a - b))

    d_max = max(max(vn_degrees), max(cn_degrees))
    window = 4 * d_max
    dp = _representable_upto(e0 + window, cn_degrees)
    candidates = []
    for delta in range(0, window + 1):
        for e in (e0 + delta, e0 - delta):
            if e <= 0 or e > e0 + window or not dp[e]:
                continue
            if g_vn == 0 and e != e0:
                continue
            if g_vn > 0 and (e - e0) % g_vn != 0:
                continue
            candidates.append(e)
    if not candidates:
        raise QuantizeError("no edge total realizable by both node sides "
                            f"near E = {e0} (CN degrees {cn_degrees})")

    spec = None
    for e_target in candidates:
        plan = _plan_vn_moves(counts, vn_degrees, e_target - e0)
        if plan is None:
            continue
        vn_final = _apply_best_moves(counts, plan, lam_node, n, vn_degrees)
        try:
            cn_final = _assemble_cn_counts(profile.rho, e_target)
        except QuantizeError:
            continue
        spec = (vn_final, cn_final, e_target)
        break
    if spec is None:
        raise QuantizeError("could not repair node counts to a feasible edge total")

    vn_final, cn_final, e = spec
    m = sum(cn_final.values())
    realized = 1.0 - m / n
    if abs(realized - rate) > 2.0 * d_max / n:
        raise QuantizeError(
            f"realized rate {realized:.4f} strays from design rate {rate:.4f} "
            f"beyond 2*d_max/N = {2.0 * d_max / n:.4f}")
    return NodeDegreeSpec(
        vn_counts=tuple(sorted((d, c) for d, c in vn_final.items() if c > 0)),
        cn_counts=tuple(sorted((d, c) for d, c in cn_final.items() if c > 0)),
        n=n, e=e, design_rate=rate, realized_rate=realized,
    )


def spec_from_counts(vn_counts, cn_counts) -> NodeDegreeSpec:
    """NodeDegreeSpec from explicit degree->count maps (consistency checked)."""
    vn = tuple(sorted((int(d), int(c)) for d, c in dict(vn_counts).items() if c > 0))
    cn = tuple(sorted((int(d), int(c)) for d, c in dict(cn_counts).items() if c > 0))
    n = sum(c for _, c in vn)
    e = sum(d * c for d, c in vn)
    e_cn = sum(d * c for d, c in cn)
    if e != e_cn:
        raise ProfileError(f"edge totals disagree: VN side {e}, CN side {e_cn}")
    m = sum(c for _, c in cn)
    rate = 1.0 - m / n
    return NodeDegreeSpec(vn_counts=vn, cn_counts=cn, n=n, e=e,
                          design_rate=rate, realized_rate=rate)


# -- JSON format and shipped fixtures ----------------------------------------

def profile_to_dict(profile: DegreeProfile) -> dict:
    return {
        "perspective": profile.perspective,
        "lambda": [{"degree": d, "weight": w} for d, w in profile.lam],
        "rho": [{"degree": d, "weight": w} for d, w in profile.rho],
    }


def profile_from_dict(data: dict) -> DegreeProfile:
    try:
        profile = make_profile(
            [(t["degree"], t["weight"]) for t in data["lambda"]],
            [(t["degree"], t["weight"]) for t in data["rho"]],
            data.get("perspective", EDGE),
        )
    except (KeyError, TypeError) as exc:
        raise ProfileError(f"malformed profile object: {exc}") from exc
    violations = validate(profile)
    if violations:
        raise ProfileError("invalid profile: " + "; ".join(violations))
    return profile


def load_profile(path) -> DegreeProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))


def save_profile(profile: DegreeProfile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile_to_dict(profile), fh, indent=2, sort_keys=True)
        fh.write("\n")


def fixture_names() -> list[str]:
    root = resources.files("sexitlab") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def fixture_profile(name: str) -> DegreeProfile:
    ref = resources.files("sexitlab") / "fixtures" / f"{name}.json"
    if not ref.is_file():
        raise ProfileError(f"unknown fixture profile {name!r}; have {fixture_names()}")
    return profile_from_dict(json.loads(ref.read_text(encoding="utf-8")))
