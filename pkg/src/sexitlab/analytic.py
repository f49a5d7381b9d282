"""Closed-form EXIT curves, the J-function, tunnel checks, and threshold search.

J(sigma) is the mutual information carried by a consistent Gaussian LLR
L ~ N(sigma^2/2, sigma^2).  It is evaluated by Gauss-Hermite quadrature on a
dense sigma grid once, then served from a monotone (PCHIP) interpolation
table; inverses are bisections on the monotone curves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .channels import BEC, BIAWGN, ChannelSpec, channel_llr_sigma
from .profiles import DegreeProfile, _require_valid

VND = "vnd"
CND = "cnd"

_LN2 = math.log(2.0)
_SIGMA_MAX = 16.0          # 1 - J(16) < 1e-12; beyond this J is treated as 1
_TABLE_POINTS = 3201
_GH_ORDER = 128
_BISECT_ITERS = 60

_table = None


def _j_gauss_hermite(sigmas: np.ndarray) -> np.ndarray:
    """1 - E[log2(1 + e^-L)] under L ~ N(s^2/2, s^2), via Gauss-Hermite nodes."""
    nodes, weights = np.polynomial.hermite.hermgauss(_GH_ORDER)
    out = np.empty_like(sigmas)
    for i, s in enumerate(sigmas):
        if s == 0.0:
            out[i] = 0.0
            continue
        llr = 0.5 * s * s + math.sqrt(2.0) * s * nodes
        f = np.logaddexp(0.0, -llr) / _LN2
        out[i] = 1.0 - float(weights @ f) / math.sqrt(math.pi)
    return np.clip(out, 0.0, 1.0)


def _get_table() -> tuple[PchipInterpolator, float]:
    global _table
    if _table is None:
        grid = np.linspace(0.0, _SIGMA_MAX, _TABLE_POINTS)
        values = _j_gauss_hermite(grid)
        _table = (PchipInterpolator(grid, values, extrapolate=False), float(values[-1]))
    return _table


def j_function(sigma):
    """Mutual information of a consistent Gaussian LLR with std deviation sigma."""
    interp, _top = _get_table()
    s = np.asarray(sigma, dtype=np.float64)
    if np.any(s < 0):
        raise ValueError("sigma must be >= 0")
    out = np.clip(np.where(s >= _SIGMA_MAX, 1.0, interp(np.minimum(s, _SIGMA_MAX))), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def _j_inverse_array(values: np.ndarray) -> np.ndarray:
    """Vectorized bisection of j_function; callers pre-clip to [0, 1)."""
    interp, top = _get_table()
    lo = np.zeros_like(values)
    hi = np.full_like(values, _SIGMA_MAX)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        below = interp(mid) < values
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out[values <= 0.0] = 0.0
    out[values >= top] = _SIGMA_MAX
    return out


def j_inverse(i) -> float:
    """Sigma with J(sigma) = i; saturates at the table edge, rejects I = 1."""
    x = float(i)
    if not (0.0 <= x < 1.0):
        raise ValueError(f"j_inverse needs I in [0, 1); got {x} (unbounded at 1)")
    return float(_j_inverse_array(np.array([x]))[0])


# -- component EXIT curves ----------------------------------------------------

def _check_ia(ia: np.ndarray) -> None:
    if np.any((ia < 0) | (ia > 1)):
        raise ValueError("I_A must lie in [0, 1]")


def vnd_curve(profile: DegreeProfile, i_a, channel: ChannelSpec):
    """Extrinsic MI out of the variable-node decoder at a-priori MI i_a."""
    _require_valid(profile, "edge")
    ia = np.atleast_1d(np.asarray(i_a, dtype=np.float64))
    _check_ia(ia)
    out = np.zeros_like(ia)
    if channel.kind == BEC:
        eps = channel.param
        for d, w in profile.lam:
            out += w * (1.0 - eps * (1.0 - ia) ** (d - 1))
    else:
        sigma_ch = channel_llr_sigma(channel)
        saturated = ia >= 1.0
        sig_a = _j_inverse_array(np.where(saturated, 0.0, ia))
        for d, w in profile.lam:
            arg = np.sqrt((d - 1) * sig_a**2 + sigma_ch**2)
            out += w * np.where(saturated, 1.0, j_function(arg))
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if np.isscalar(i_a) or np.asarray(i_a).ndim == 0 else out


def cnd_curve(profile: DegreeProfile, i_a, channel: ChannelSpec):
    """Extrinsic MI out of the check-node decoder at a-priori MI i_a.

    Exact on the BEC; on BiAWGN this is the usual duality approximation."""
    _require_valid(profile, "edge")
    ia = np.atleast_1d(np.asarray(i_a, dtype=np.float64))
    _check_ia(ia)
    out = np.zeros_like(ia)
    if channel.kind == BEC:
        for d, w in profile.rho:
            out += w * ia ** (d - 1)
    else:
        sig = _j_inverse_array(np.clip(1.0 - ia, 0.0, 1.0 - 1e-15))
        for d, w in profile.rho:
            out += w * (1.0 - j_function(math.sqrt(d - 1) * sig))
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if np.isscalar(i_a) or np.asarray(i_a).ndim == 0 else out


def _cnd_inverse_array(profile: DegreeProfile, i_e: np.ndarray,
                       channel: ChannelSpec) -> np.ndarray:
    """I_A with cnd_curve(I_A) = i_e, vectorized bisection (curve is monotone)."""
    lo = np.zeros_like(i_e)
    hi = np.ones_like(i_e)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        below = cnd_curve(profile, mid, channel) < i_e
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out[i_e <= cnd_curve(profile, 0.0, channel)] = 0.0
    out[i_e >= 1.0] = 1.0
    return out


def cnd_inverse(profile: DegreeProfile, i_e: float, channel: ChannelSpec) -> float:
    return float(_cnd_inverse_array(profile, np.array([float(i_e)]), channel)[0])


@dataclass(frozen=True)
class ExitCurve:
    component: str
    i_a: np.ndarray
    i_e: np.ndarray


def sample_curves(profile: DegreeProfile, channel: ChannelSpec,
                  n_points: int = 201) -> tuple[ExitCurve, ExitCurve]:
    ia = np.linspace(0.0, 1.0, n_points)
    return (ExitCurve(VND, ia, vnd_curve(profile, ia, channel)),
            ExitCurve(CND, ia, cnd_curve(profile, ia, channel)))


def curves_csv(profile: DegreeProfile, channel: ChannelSpec, n_points: int = 201) -> str:
    vnd, cnd = sample_curves(profile, channel, n_points)
    lines = ["I_A,I_E_vnd,I_E_cnd"]
    for a, v, c in zip(vnd.i_a, vnd.i_e, cnd.i_e):
        lines.append(f"{a:.17g},{v:.17g},{c:.17g}")
    return "\n".join(lines) + "\n"


# -- tunnel / threshold / area -----------------------------------------------

@dataclass(frozen=True)
class TunnelReport:
    open: bool
    min_gap: float
    pinch_i_a: float


def tunnel_open(profile: DegreeProfile, channel: ChannelSpec,
                grid_size: int = 1024, end_guard: float = 1e-3) -> TunnelReport:
    """Check vnd(I) > cnd^-1(I) on a uniform grid over [0, 1 - end_guard].

    The curves meet at (1,1) by construction, hence the end guard."""
    grid = np.linspace(0.0, 1.0 - end_guard, grid_size)
    gaps = vnd_curve(profile, grid, channel) - _cnd_inverse_array(profile, grid, channel)
    k = int(np.argmin(gaps))
    return TunnelReport(open=bool(np.all(gaps > 0.0)),
                        min_gap=float(gaps[k]), pinch_i_a=float(grid[k]))


def threshold_search(profile: DegreeProfile, kind: str, rate: float | None = None,
                     grid_size: int = 1024, tol: float | None = None) -> float:
    """Worst channel parameter with an open tunnel (largest eps / smallest dB)."""
    _require_valid(profile, "edge")
    if kind == BEC:
        tol = 1e-4 if tol is None else tol
        lo, hi = 0.0, 1.0  # open at 0, closed at 1
        if not tunnel_open(profile, ChannelSpec(BEC, lo), grid_size).open:
            raise ValueError("tunnel closed even on a perfect channel")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if tunnel_open(profile, ChannelSpec(BEC, mid), grid_size).open:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    if kind == BIAWGN:
        tol = 0.01 if tol is None else tol
        if rate is None:
            from .profiles import design_rate
            rate = design_rate(profile)
        lo, hi = -10.0, 20.0  # dB; tunnel closed at lo, open at hi
        if not tunnel_open(profile, ChannelSpec(BIAWGN, hi, rate), grid_size).open:
            raise ValueError(f"bracket failure: tunnel closed even at {hi} dB")
        if tunnel_open(profile, ChannelSpec(BIAWGN, lo, rate), grid_size).open:
            raise ValueError(f"bracket failure: tunnel already open at {lo} dB")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if tunnel_open(profile, ChannelSpec(BIAWGN, mid, rate), grid_size).open:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)
    raise ValueError(f"unknown channel kind {kind!r}")


@dataclass(frozen=True)
class AreaReport:
    vnd_area: float
    cnd_area: float
    implied_rate: float


def area_rate_check(profile: DegreeProfile, epsilon: float) -> AreaReport:
    """Closed-form BEC curve areas and the rate they imply.

    vnd_area = 1 - eps * sum(lam_i / i), cnd_area = sum(rho_j / j); the implied
    rate 1 - cnd_area * eps / (1 - vnd_area) is what a profile edit must hold
    constant to preserve R."""
    _require_valid(profile, "edge")
    if not (0.0 < epsilon <= 1.0):
        raise ValueError("epsilon must be in (0, 1] for the area identity")
    lam_int = sum(w / d for d, w in profile.lam)
    rho_int = sum(w / d for d, w in profile.rho)
    vnd_area = 1.0 - epsilon * lam_int
    cnd_area = rho_int
    implied = 1.0 - cnd_area * epsilon / (1.0 - vnd_area)
    return AreaReport(vnd_area=vnd_area, cnd_area=cnd_area, implied_rate=implied)
