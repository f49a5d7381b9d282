"""Scattered EXIT charts: trajectory clouds, two-layer 2D histograms, statistics.

All vertices live in chart-plane coordinates: x is the I_A,VND / I_E,CND
axis, y the I_E,VND / I_A,CND axis.  The VND layer collects variable-node
decoder outputs, the CND layer check-node outputs (already transposed by
construction, i.e. the CND layer's y coordinate is the CND input MI).
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import decoder
from .analytic import j_inverse
from .channels import BEC, LLR_MAX, ChannelSpec, transmit
from .graphs import sample_graph_best_effort
from .parallel import parallel_map
from .profiles import DegreeProfile, NodeDegreeSpec, profile_to_dict, quantize
from .seeds import make_rng, seed_sequence

RESAMPLE = "resample_per_trajectory"
FIXED = "fixed_graph"

STUCK_DELTA = 1e-3


def child_seed(*parts: int) -> int:
    return int(seed_sequence(*parts).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SExitConfig:
    channel: ChannelSpec
    n: int
    profile: DegreeProfile | None = None
    spec: NodeDegreeSpec | None = None
    m: int = 1000
    max_iter: int = 50
    n_grid: int = 200
    h_mode: str = RESAMPLE
    seed: int = 0
    workers: int = 1
    girth_swap_budget: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one trajectory (M >= 1)")
        if self.n_grid < 2:
            raise ValueError("N_grid must be >= 2")
        if self.h_mode not in (RESAMPLE, FIXED):
            raise ValueError(f"unknown h_mode {self.h_mode!r}")
        if self.profile is None and self.spec is None:
            raise ValueError("need a profile or an explicit NodeDegreeSpec")


def resolve_spec(config: SExitConfig) -> NodeDegreeSpec:
    if config.spec is not None:
        return config.spec
    return quantize(config.profile, config.n)


@dataclass
class Trajectory:
    vnd_xy: np.ndarray
    cnd_xy: np.ndarray
    converged: bool
    iterations: int
    final_vnd_mi: float
    max_vnd_mi: float


def _run_one_trajectory(args) -> Trajectory:
    spec, channel, master, k, max_iter, graph, girth_budget = args
    if graph is None:
        graph, _residual = sample_graph_best_effort(
            spec, child_seed(master, k, 1), swap_budget=girth_budget)
    symbols = np.ones(graph.n)
    llrs = transmit(symbols, channel, child_seed(master, k, 2))
    res = decoder.decode(graph, llrs, ref_symbols=symbols, max_iter=max_iter, probe=True)
    max_mi = float(res.vnd_vertices[:, 1].max()) if res.vnd_vertices.size else 0.0
    return Trajectory(vnd_xy=res.vnd_vertices, cnd_xy=res.cnd_vertices,
                      converged=res.converged, iterations=res.iterations,
                      final_vnd_mi=res.final_vnd_mi, max_vnd_mi=max_mi)


def run_trajectories(config: SExitConfig, progress=None) -> list[Trajectory]:
    """Simulate M free-running decodes; trajectory k is seeded by (seed, k),
    so the result is one fixed list no matter how the work is scheduled."""
    spec = resolve_spec(config)
    fixed = None
    if config.h_mode == FIXED:
        fixed, _residual = sample_graph_best_effort(
            spec, child_seed(config.seed, 0, 3), swap_budget=config.girth_swap_budget)
    items = [(spec, config.channel, config.seed, k, config.max_iter, fixed,
              config.girth_swap_budget)
             for k in range(config.m)]
    return parallel_map(_run_one_trajectory, items, workers=config.workers,
                        progress=progress)


# -- histogram ----------------------------------------------------------------

@dataclass
class SExitHistogram:
    n_grid: int
    vnd_counts: np.ndarray
    cnd_counts: np.ndarray

    @property
    def vnd_total(self) -> int:
        return int(self.vnd_counts.sum())

    @property
    def cnd_total(self) -> int:
        return int(self.cnd_counts.sum())


def bin_index(values: np.ndarray, n_grid: int) -> np.ndarray:
    return np.minimum((np.asarray(values) * n_grid).astype(np.int64), n_grid - 1)


def accumulate_histogram(trajectories, n_grid: int) -> SExitHistogram:
    """Vertex (x, y) goes to bin (min(floor(x*N), N-1), same for y) of its layer."""
    vnd = np.zeros((n_grid, n_grid), dtype=np.int64)
    cnd = np.zeros((n_grid, n_grid), dtype=np.int64)
    for traj in trajectories:
        for xy, layer in ((traj.vnd_xy, vnd), (traj.cnd_xy, cnd)):
            if xy.size == 0:
                continue
            np.add.at(layer, (bin_index(xy[:, 0], n_grid), bin_index(xy[:, 1], n_grid)), 1)
    return SExitHistogram(n_grid=n_grid, vnd_counts=vnd, cnd_counts=cnd)


@dataclass
class SExitResult:
    kind: str
    config: dict
    hist: SExitHistogram
    vnd_xy: np.ndarray
    cnd_xy: np.ndarray
    trajectories: list[Trajectory] | None = None


def _concat(trajectories, attr) -> np.ndarray:
    parts = [getattr(t, attr) for t in trajectories if getattr(t, attr).size]
    if not parts:
        return np.zeros((0, 2))
    return np.concatenate(parts, axis=0)


def _config_echo(config: SExitConfig, spec: NodeDegreeSpec) -> dict:
    return {
        "channel": {"kind": config.channel.kind, "param": config.channel.param,
                    "rate": config.channel.rate},
        "n": config.n,
        "m": config.m,
        "max_iter": config.max_iter,
        "n_grid": config.n_grid,
        "h_mode": config.h_mode,
        "seed": config.seed,
        "profile": profile_to_dict(config.profile) if config.profile else None,
        "vn_counts": list(map(list, spec.vn_counts)),
        "cn_counts": list(map(list, spec.cn_counts)),
        "realized_rate": spec.realized_rate,
    }


def run_sexit(config: SExitConfig, progress=None) -> SExitResult:
    spec = resolve_spec(config)
    trajectories = run_trajectories(config, progress=progress)
    hist = accumulate_histogram(trajectories, config.n_grid)
    return SExitResult(kind="sexit", config=_config_echo(config, spec), hist=hist,
                       vnd_xy=_concat(trajectories, "vnd_xy"),
                       cnd_xy=_concat(trajectories, "cnd_xy"),
                       trajectories=trajectories)


# -- independently driven component decoders (no iteration feedback) ----------

def _apriori_llrs(n_msgs: int, i_a: float, channel_kind: str,
                  rng: np.random.Generator) -> np.ndarray:
    """Synthetic a-priori edge messages for the all-plus-one word at MI i_a."""
    if channel_kind == BEC:
        known = rng.random(n_msgs) < i_a
        return np.where(known, LLR_MAX, 0.0)
    sigma = j_inverse(min(i_a, 1.0 - 1e-12)) if i_a < 1.0 else None
    if sigma is None:
        return np.full(n_msgs, LLR_MAX)
    return np.clip(rng.normal(0.5 * sigma * sigma, sigma, n_msgs), -LLR_MAX, LLR_MAX)


def _run_one_indep(args):
    spec, channel, master, point_idx, sample_idx, i_a, girth_budget = args
    graph, _residual = sample_graph_best_effort(
        spec, child_seed(master, point_idx, sample_idx, 5), swap_budget=girth_budget)
    symbols = np.ones(graph.n)
    rng = make_rng(seed_sequence(master, point_idx, sample_idx, 6))
    edge_ref = symbols[graph.vn_idx]

    # VND fed channel + a-priori
    llrs = transmit(symbols, channel, child_seed(master, point_idx, sample_idx, 7))
    state = decoder.init_state(graph, llrs)
    state.cn_to_vn = _apriori_llrs(graph.e, i_a, channel.kind, rng)
    decoder.vnd_half_iteration(state)
    vnd_pt = (i_a, decoder.measure_mi(state.vn_to_cn, edge_ref))

    # CND fed a-priori only
    state2 = decoder.init_state(graph, np.zeros(graph.n))
    state2.vn_to_cn = _apriori_llrs(graph.e, i_a, channel.kind, rng)
    decoder.cnd_half_iteration(state2)
    cnd_pt = (decoder.measure_mi(state2.cn_to_vn, edge_ref), i_a)
    return vnd_pt, cnd_pt


def run_independent(config: SExitConfig, ia_grid=None, samples_per_point: int = 20,
                    progress=None) -> SExitResult:
    """One isolated half-iteration per component per (I_A, sample) pair.

    Breaks the iteration feedback loop: each simulation point gets fresh
    a-priori messages at exactly I_A, a fresh channel draw, and (in resample
    mode) a fresh graph."""
    spec = resolve_spec(config)
    if ia_grid is None:
        ia_grid = np.linspace(0.0, 1.0, 21)
    ia_grid = np.asarray(ia_grid, dtype=np.float64)
    items = [(spec, config.channel, config.seed, pi, si, float(ia),
              config.girth_swap_budget)
             for pi, ia in enumerate(ia_grid) for si in range(samples_per_point)]
    pts = parallel_map(_run_one_indep, items, workers=config.workers, progress=progress)
    vnd_xy = np.array([p[0] for p in pts]).reshape(-1, 2)
    cnd_xy = np.array([p[1] for p in pts]).reshape(-1, 2)
    fake = [Trajectory(vnd_xy=vnd_xy, cnd_xy=cnd_xy, converged=True, iterations=0,
                       final_vnd_mi=0.0, max_vnd_mi=0.0)]
    hist = accumulate_histogram(fake, config.n_grid)
    echo = _config_echo(config, spec)
    echo["ia_grid"] = [float(v) for v in ia_grid]
    echo["samples_per_point"] = samples_per_point
    return SExitResult(kind="sexit_independent", config=echo, hist=hist,
                       vnd_xy=vnd_xy, cnd_xy=cnd_xy, trajectories=None)


# -- statistics ---------------------------------------------------------------

def column_stats(result: SExitResult, layer: str, n_cols: int | None = None) -> list:
    """Input-conditioned per-column stats from raw vertices.

    Columns run over the component's own input MI: x for the VND layer,
    y (the transposed axis) for the CND layer; statistics describe its output.
    Empty columns are reported as None."""
    n_cols = n_cols or result.hist.n_grid
    xy = result.vnd_xy if layer == "vnd" else result.cnd_xy
    if layer == "vnd":
        cols, vals = xy[:, 0], xy[:, 1]
    else:
        cols, vals = xy[:, 1], xy[:, 0]
    return _column_stats_arrays(cols, vals, n_cols)


def _column_stats_arrays(cols: np.ndarray, vals: np.ndarray, n_cols: int) -> list:
    out: list = [None] * n_cols
    if cols.size == 0:
        return out
    idx = bin_index(cols, n_cols)
    order = np.argsort(idx, kind="stable")
    idx_sorted = idx[order]
    vals_sorted = vals[order]
    boundaries = np.searchsorted(idx_sorted, np.arange(n_cols + 1))
    for b in range(n_cols):
        lo, hi = boundaries[b], boundaries[b + 1]
        if lo == hi:
            continue
        v = vals_sorted[lo:hi]
        q10, q50, q90 = np.quantile(v, [0.1, 0.5, 0.9])
        out[b] = {"count": int(hi - lo), "mean": float(v.mean()),
                  "std": float(v.std()), "q10": float(q10), "q50": float(q50),
                  "q90": float(q90)}
    return out


def column_stats_from_hist(hist: SExitHistogram, layer: str) -> list:
    """Same statistics from binned counts only (quantization <= 1/(2 N_grid))."""
    counts = hist.vnd_counts if layer == "vnd" else hist.cnd_counts
    n = hist.n_grid
    vals_axis = (np.arange(n) + 0.5) / n
    out: list = [None] * n
    for b in range(n):
        # vnd: fixed x bin, distribution over y; cnd: fixed y bin, over x
        col = counts[b, :] if layer == "vnd" else counts[:, b]
        total = int(col.sum())
        if total == 0:
            continue
        w = col / total
        mean = float(np.dot(w, vals_axis))
        var = float(np.dot(w, (vals_axis - mean) ** 2))
        cdf = np.cumsum(w)
        qs = [float(vals_axis[np.searchsorted(cdf, q)]) for q in (0.1, 0.5, 0.9)]
        out[b] = {"count": total, "mean": mean, "std": math.sqrt(var),
                  "q10": qs[0], "q50": qs[1], "q90": qs[2]}
    return out


@dataclass(frozen=True)
class OptimizationMetrics:
    stuck_fraction: float
    min_gap_band: float | None
    min_gap_column: float | None
    overlap_mass: float


def optimization_metrics(result: SExitResult, delta: float = STUCK_DELTA,
                         n_cols: int | None = None) -> OptimizationMetrics:
    """One concrete reading of the gap-vs-overlap design criterion.

    stuck_fraction: trajectories that neither satisfied the syndrome nor
    drove the VND MI to 1 - delta within max_iter (a zero-syndrome decode is
    never stuck, even though BEC edge messages stop short of MI 1).
    min_gap_band: min over plane columns of q10(VND y) - q90(CND y), the
    empirical tunnel width between the two vertex clouds.
    overlap_mass: fraction of all vertices sitting in columns whose band <= 0.
    """
    if result.trajectories is None:
        raise ValueError("optimization metrics need per-trajectory results")
    n_cols = n_cols or result.hist.n_grid
    stuck = sum(1 for t in result.trajectories
                if not t.converged and t.max_vnd_mi < 1.0 - delta)
    stuck_fraction = stuck / len(result.trajectories)

    vnd, cnd = result.vnd_xy, result.cnd_xy
    min_band = None
    min_col = None
    overlap = 0
    total = vnd.shape[0] + cnd.shape[0]
    if vnd.size and cnd.size:
        vcols = bin_index(vnd[:, 0], n_cols)
        ccols = bin_index(cnd[:, 0], n_cols)
        for b in np.intersect1d(np.unique(vcols), np.unique(ccols)):
            vy = vnd[vcols == b, 1]
            cy = cnd[ccols == b, 1]
            band = float(np.quantile(vy, 0.1) - np.quantile(cy, 0.9))
            if min_band is None or band < min_band:
                min_band, min_col = band, (b + 0.5) / n_cols
            if band <= 0.0:
                overlap += vy.size + cy.size
    return OptimizationMetrics(stuck_fraction=stuck_fraction, min_gap_band=min_band,
                               min_gap_column=min_col,
                               overlap_mass=overlap / total if total else 0.0)


# -- exports ------------------------------------------------------------------

def bundle_dict(result: SExitResult, include_trajectories: bool = True) -> dict:
    data = {
        "format": "sexit-bundle-v1",
        "kind": result.kind,
        "config": result.config,
        "n_grid": result.hist.n_grid,
        "layers": {
            "vnd": {"counts": result.hist.vnd_counts.tolist(),
                    "total": result.hist.vnd_total},
            "cnd": {"counts": result.hist.cnd_counts.tolist(),
                    "total": result.hist.cnd_total},
        },
        "column_stats": {"vnd": column_stats(result, "vnd"),
                         "cnd": column_stats(result, "cnd")},
    }
    if result.trajectories is not None:
        metrics = optimization_metrics(result)
        data["metrics"] = {
            "stuck_fraction": metrics.stuck_fraction,
            "min_gap_band": metrics.min_gap_band,
            "min_gap_column": metrics.min_gap_column,
            "overlap_mass": metrics.overlap_mass,
        }
        if include_trajectories:
            data["trajectories"] = [
                {"vnd": t.vnd_xy.tolist(), "cnd": t.cnd_xy.tolist(),
                 "converged": t.converged, "iterations": t.iterations}
                for t in result.trajectories
            ]
    return data


def bundle_json(result: SExitResult, include_trajectories: bool = True) -> str:
    return json.dumps(bundle_dict(result, include_trajectories), sort_keys=True,
                      separators=(",", ":")) + "\n"


def pgm_bytes(counts: np.ndarray) -> bytes:
    """8-bit grayscale, log-scaled counts; y axis points up (row 0 = y max)."""
    cmax = counts.max()
    if cmax > 0:
        img = np.round(255.0 * np.log1p(counts) / math.log1p(cmax)).astype(np.uint8)
    else:
        img = np.zeros_like(counts, dtype=np.uint8)
    img = img.T[::-1, :]   # (x, y) counts -> image rows top to bottom
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    return header + img.tobytes()


def bins_csv(hist: SExitHistogram) -> str:
    lines = ["layer,ix,iy,count"]
    for name, counts in (("vnd", hist.vnd_counts), ("cnd", hist.cnd_counts)):
        xs, ys = np.nonzero(counts)
        for x, y in zip(xs, ys):
            lines.append(f"{name},{x},{y},{counts[x, y]}")
    return "\n".join(lines) + "\n"


def write_result(result: SExitResult, outdir: str,
                 include_trajectories: bool = True) -> dict:
    """Write bundle.json, per-layer PGMs, and the nonzero-bin CSV; returns paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = {}
    paths["bundle"] = os.path.join(outdir, "bundle.json")
    with open(paths["bundle"], "w", encoding="utf-8") as fh:
        fh.write(bundle_json(result, include_trajectories))
    for name, counts in (("vnd", result.hist.vnd_counts), ("cnd", result.hist.cnd_counts)):
        paths[name + "_pgm"] = os.path.join(outdir, f"{name}.pgm")
        with open(paths[name + "_pgm"], "wb") as fh:
            fh.write(pgm_bytes(counts))
    paths["bins"] = os.path.join(outdir, "bins.csv")
    with open(paths["bins"], "w", encoding="utf-8") as fh:
        fh.write(bins_csv(result.hist))
    return paths


def load_bundle(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("format") != "sexit-bundle-v1":
        raise ValueError(f"{path} is not a scattered-chart bundle")
    return data
