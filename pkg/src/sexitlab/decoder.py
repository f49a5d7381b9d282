"""Flooding sum-product decoding with per-half-iteration extrinsic-MI probes.

Messages live on edges, one LLR per direction, clipped to +/-LLR_MAX.  The
check update runs in sign/log-magnitude form so BEC-style inputs (0 and
+/-LLR_MAX) reproduce erasure semantics exactly: any erased input zeroes the
extrinsic output, otherwise the sign product saturates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import LLR_MAX
from .graphs import TannerGraph

_LN2 = math.log(2.0)

DELTA_CONV = 1e-4


@dataclass
class DecoderState:
    graph: TannerGraph
    channel_llrs: np.ndarray
    vn_to_cn: np.ndarray
    cn_to_vn: np.ndarray
    iteration: int = 0

    def posterior(self) -> np.ndarray:
        tot = np.bincount(self.graph.vn_idx, weights=self.cn_to_vn, minlength=self.graph.n)
        return self.channel_llrs + tot

    def hard_decision(self) -> np.ndarray:
        return (self.posterior() < 0).astype(np.uint8)


def init_state(graph: TannerGraph, channel_llrs: np.ndarray) -> DecoderState:
    llrs = np.asarray(channel_llrs, dtype=np.float64)
    if llrs.size != graph.n:
        raise ValueError(f"LLR vector length {llrs.size} != graph size {graph.n}")
    e = graph.e
    return DecoderState(graph=graph, channel_llrs=llrs,
                        vn_to_cn=np.zeros(e), cn_to_vn=np.zeros(e))


def vnd_half_iteration(state: DecoderState) -> DecoderState:
    """Variable-node update: channel LLR plus all incoming checks but the edge's own."""
    g = state.graph
    tot = np.bincount(g.vn_idx, weights=state.cn_to_vn, minlength=g.n)
    msg = state.channel_llrs[g.vn_idx] + tot[g.vn_idx] - state.cn_to_vn
    state.vn_to_cn = np.clip(msg, -LLR_MAX, LLR_MAX)
    return state


def cnd_half_iteration(state: DecoderState) -> DecoderState:
    """Check-node update: 2 atanh of the product of tanh(msg/2) over other edges."""
    g = state.graph
    t = np.tanh(0.5 * state.vn_to_cn)
    zero = t == 0.0
    n_zero = np.bincount(g.cn_idx, weights=zero.astype(np.float64), minlength=g.m_cn)
    log_mag = np.where(zero, 0.0, np.log(np.abs(np.where(zero, 1.0, t))))
    sum_log = np.bincount(g.cn_idx, weights=log_mag, minlength=g.m_cn)
    neg = t < 0.0
    n_neg = np.bincount(g.cn_idx, weights=neg.astype(np.float64), minlength=g.m_cn)

    others_zero = (n_zero[g.cn_idx] - zero) > 0.5
    mag = np.minimum(np.exp(sum_log[g.cn_idx] - log_mag), 1.0)
    sign = 1.0 - 2.0 * ((n_neg[g.cn_idx] - neg) % 2.0)
    with np.errstate(divide="ignore"):
        msg = 2.0 * np.arctanh(sign * mag)
    msg = np.where(others_zero, 0.0, np.clip(msg, -LLR_MAX, LLR_MAX))
    state.cn_to_vn = msg
    state.iteration += 1
    return state


def measure_mi(messages: np.ndarray, ref_symbols: np.ndarray) -> float:
    """Sample mutual information 1 - mean(log2(1 + e^(-x*L))), clamped to [0, 1]."""
    msgs = np.asarray(messages, dtype=np.float64)
    if msgs.size == 0:
        raise ValueError("no messages")
    ref = np.asarray(ref_symbols, dtype=np.float64)
    if ref.size != msgs.size:
        raise ValueError(f"got {msgs.size} messages but {ref.size} reference symbols")
    val = 1.0 - float(np.mean(np.logaddexp(0.0, -ref * msgs))) / _LN2
    return min(max(val, 0.0), 1.0)


def syndrome_ok(state: DecoderState) -> bool:
    """All parity checks satisfied by fully decided (nonzero-LLR) posteriors."""
    post = state.posterior()
    if np.any(post == 0.0):
        return False
    g = state.graph
    bits = (post < 0).astype(np.int64)
    parity = np.bincount(g.cn_idx, weights=bits[g.vn_idx].astype(np.float64),
                         minlength=g.m_cn)
    return bool(np.all(parity.astype(np.int64) % 2 == 0))


@dataclass
class DecodeResult:
    converged: bool
    iterations: int
    bits: np.ndarray
    erased: np.ndarray
    posterior: np.ndarray
    vnd_vertices: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    cnd_vertices: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    final_vnd_mi: float = 0.0


def decode(graph: TannerGraph, channel_llrs: np.ndarray,
           ref_symbols: np.ndarray | None = None, max_iter: int = 50,
           probe: bool = True, probe_posterior: bool = False,
           early_stop: bool = True, delta_conv: float = DELTA_CONV) -> DecodeResult:
    """Alternate VND/CND half-iterations, recording one chart vertex per half.

    Chart coordinates: x is the I_A,VND / I_E,CND axis, y the I_E,VND /
    I_A,CND axis.  A VND vertex is (previous CND extrinsic MI, fresh VND MI);
    a CND vertex is (fresh CND MI, the VND MI it consumed).  Stops early on a
    zero syndrome with every bit decided, or when the VND MI reaches
    1 - delta_conv.  probe_posterior measures a-posteriori LLRs instead of
    edge messages (debugging aid, not the chart definition).
    """
    state = init_state(graph, channel_llrs)
    if ref_symbols is None:
        ref = np.ones(graph.n)
    else:
        ref = np.asarray(ref_symbols, dtype=np.float64)
    edge_ref = ref[graph.vn_idx]

    vnd_pts: list[tuple[float, float]] = []
    cnd_pts: list[tuple[float, float]] = []
    prev_cnd_mi = 0.0
    vnd_mi = 0.0
    converged = False
    iterations = 0

    for it in range(1, max_iter + 1):
        iterations = it
        vnd_half_iteration(state)
        if probe:
            if probe_posterior:
                vnd_mi = measure_mi(state.posterior(), ref)
            else:
                vnd_mi = measure_mi(state.vn_to_cn, edge_ref)
            vnd_pts.append((prev_cnd_mi, vnd_mi))
            if early_stop and vnd_mi >= 1.0 - delta_conv:
                converged = True
                break
        cnd_half_iteration(state)
        if probe:
            cnd_mi = measure_mi(state.cn_to_vn, edge_ref)
            cnd_pts.append((cnd_mi, vnd_mi))
            prev_cnd_mi = cnd_mi
        if early_stop and syndrome_ok(state):
            converged = True
            break

    post = state.posterior()
    return DecodeResult(
        converged=converged,
        iterations=iterations,
        bits=(post < 0).astype(np.uint8),
        erased=post == 0.0,
        posterior=post,
        vnd_vertices=np.array(vnd_pts, dtype=np.float64).reshape(-1, 2),
        cnd_vertices=np.array(cnd_pts, dtype=np.float64).reshape(-1, 2),
        final_vnd_mi=vnd_mi,
    )
