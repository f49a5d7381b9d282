"""Ensemble-averaged Monte-Carlo BER/FER with deterministic parallel stopping.

Frames are independent, each seeded by (master seed, point index, frame
index); the stop rule scans per-frame results in frame order, so worker
count never changes a table.  On the BEC an unresolved erasure counts as
half a bit error (tracked internally in integer half-bit units).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import decoder
from .channels import BEC, BIAWGN, ChannelSpec, transmit
from .graphs import random_codeword, sample_graph_best_effort
from .parallel import Cancelled, parallel_map
from .profiles import DegreeProfile, NodeDegreeSpec, profile_to_dict, quantize
from .seeds import make_rng, seed_sequence
from .sexit import child_seed


@dataclass(frozen=True)
class BerRow:
    channel_param: float
    frames: int
    bit_errors: float
    frame_errors: int
    ber: float
    fer: float
    ci_low: float
    ci_high: float
    undersampled: bool


@dataclass(frozen=True)
class BerTable:
    kind: str                    # channel kind shared by all rows
    rows: tuple[BerRow, ...]
    config: dict


def wilson_interval(successes: float, trials: float, z: float = 1.959964) -> tuple[float, float]:
    if trials <= 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _sim_frame_range(args):
    """Per-frame (half-bit-error, frame-error) pairs for frames [first, last)."""
    (spec, channel, master, point_idx, first, last, h_refresh, max_iter,
     random_cw, girth_budget) = args
    half_errs = np.zeros(last - first, dtype=np.int64)
    frame_errs = np.zeros(last - first, dtype=np.int64)
    graph = None
    graph_tag = None
    for f in range(first, last):
        tag = f // h_refresh
        if graph is None or tag != graph_tag:
            graph, _residual = sample_graph_best_effort(
                spec, child_seed(master, point_idx, tag, 11), swap_budget=girth_budget)
            graph_tag = tag
        if random_cw:
            rng = make_rng(seed_sequence(master, point_idx, f, 13))
            word = random_codeword(graph, rng)
            symbols = 1.0 - 2.0 * word.astype(np.float64)
        else:
            word = np.zeros(graph.n, dtype=np.uint8)
            symbols = np.ones(graph.n)
        llrs = transmit(symbols, channel, child_seed(master, point_idx, f, 12))
        res = decoder.decode(graph, llrs, ref_symbols=symbols, max_iter=max_iter,
                             probe=False)
        wrong = int(np.count_nonzero((res.bits != word) & ~res.erased))
        erased = int(np.count_nonzero(res.erased))
        half = 2 * wrong + erased
        half_errs[f - first] = half
        frame_errs[f - first] = 1 if half > 0 else 0
    return half_errs, frame_errs


def run_ber(profile: DegreeProfile | None, n: int, kind: str, points,
            min_bit_errors: int = 200, max_frames: int = 2_000_000,
            h_refresh: int = 1, max_iter: int = 50, seed: int = 0,
            workers: int = 1, rate: float | None = None,
            spec: NodeDegreeSpec | None = None, random_codewords: bool = False,
            batch: int = 256, girth_swap_budget: int | None = None,
            progress=None) -> BerTable:
    """Sweep channel points until min_bit_errors bit errors or max_frames each.

    h_refresh = k draws a fresh H-matrix every k frames (1 = new graph per
    frame, the ensemble-averaging default)."""
    if spec is None:
        spec = quantize(profile, n)
    if kind == BIAWGN and rate is None:
        rate = spec.realized_rate if profile is None else spec.design_rate
    points = [float(p) for p in points]
    if not points:
        raise ValueError("no channel points given")

    rows = []
    for pi, param in enumerate(sorted(points)):
        channel = ChannelSpec(kind, param) if kind == BEC else ChannelSpec(kind, param, rate)
        half_total = 0
        frame_err_total = 0
        frames_done = 0
        while frames_done < max_frames and half_total < 2 * min_bit_errors:
            batch_end = min(frames_done + batch, max_frames)
            n_workers = max(1, workers)
            step = max(1, (batch_end - frames_done + n_workers - 1) // n_workers)
            ranges = [(spec, channel, seed, pi, a, min(a + step, batch_end),
                       h_refresh, max_iter, random_codewords, girth_swap_budget)
                      for a in range(frames_done, batch_end, step)]
            results = parallel_map(_sim_frame_range, ranges, workers=workers)
            halves = np.concatenate([r[0] for r in results])
            ferrs = np.concatenate([r[1] for r in results])
            # honor the stop rule in frame order so worker count cannot matter
            cum = np.cumsum(halves) + half_total
            hit = np.nonzero(cum >= 2 * min_bit_errors)[0]
            take = int(hit[0]) + 1 if hit.size else halves.size
            half_total += int(halves[:take].sum())
            frame_err_total += int(ferrs[:take].sum())
            frames_done += take
            if progress is not None:
                est = max(frames_done / max_frames,
                          half_total / (2 * min_bit_errors) if min_bit_errors else 1.0)
                if progress(pi + min(1.0, est), len(points)) is False:
                    raise Cancelled("cancelled between frames")
        bit_errors = half_total / 2.0
        ber = bit_errors / (frames_done * spec.n)
        fer = frame_err_total / frames_done
        lo, hi = wilson_interval(bit_errors, frames_done * spec.n)
        rows.append(BerRow(channel_param=param, frames=frames_done,
                           bit_errors=bit_errors, frame_errors=frame_err_total,
                           ber=ber, fer=fer, ci_low=lo, ci_high=hi,
                           undersampled=bit_errors < min_bit_errors))
    config = {
        "kind": kind, "n": n, "rate": rate, "min_bit_errors": min_bit_errors,
        "max_frames": max_frames, "h_refresh": h_refresh, "max_iter": max_iter,
        "seed": seed, "random_codewords": random_codewords,
        "profile": profile_to_dict(profile) if profile else None,
        "vn_counts": list(map(list, spec.vn_counts)),
        "cn_counts": list(map(list, spec.cn_counts)),
    }
    return BerTable(kind=kind, rows=tuple(rows), config=config)


# -- serialization -------------------------------------------------------------

CSV_HEADER = "channel_param,frames,bit_errors,frame_errors,ber,fer,ci_low,ci_high"


def to_csv(table: BerTable) -> str:
    lines = [CSV_HEADER]
    for r in table.rows:
        lines.append(f"{r.channel_param:.17g},{r.frames},{r.bit_errors:.17g},"
                     f"{r.frame_errors},{r.ber:.17g},{r.fer:.17g},"
                     f"{r.ci_low:.17g},{r.ci_high:.17g}")
    return "\n".join(lines) + "\n"


def from_csv(text: str, kind: str) -> BerTable:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("not a BER table CSV (header mismatch)")
    rows = []
    for ln in lines[1:]:
        p, fr, be, fe, ber_, fer_, lo, hi = ln.split(",")
        rows.append(BerRow(channel_param=float(p), frames=int(fr),
                           bit_errors=float(be), frame_errors=int(fe),
                           ber=float(ber_), fer=float(fer_), ci_low=float(lo),
                           ci_high=float(hi), undersampled=False))
    rows.sort(key=lambda r: r.channel_param)
    return BerTable(kind=kind, rows=tuple(rows), config={"kind": kind})


def table_json(table: BerTable) -> str:
    data = {
        "format": "ber-table-v1",
        "config": table.config,
        "rows": [{"channel_param": r.channel_param, "frames": r.frames,
                  "bit_errors": r.bit_errors, "frame_errors": r.frame_errors,
                  "ber": r.ber, "fer": r.fer, "ci_low": r.ci_low,
                  "ci_high": r.ci_high, "undersampled": r.undersampled}
                 for r in table.rows],
    }
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


# -- curve comparison ----------------------------------------------------------

def _param_at_ber(table: BerTable, target: float) -> float:
    """Channel parameter where the curve crosses target, log-linear in BER.

    BER improves toward larger dB on BiAWGN and smaller epsilon on the BEC;
    rows are scanned in the improving direction.  Zero-error rows stand in
    with half an error for interpolation."""
    rows = sorted(table.rows, key=lambda r: r.channel_param,
                  reverse=(table.kind == BEC))

    def eff_ber(r: BerRow) -> float:
        return r.ber if r.ber > 0 else 0.5 / (r.frames * max(1, _n_of(table)))

    for a, b in zip(rows, rows[1:]):
        ba, bb = eff_ber(a), eff_ber(b)
        if (ba - target) == 0.0:
            return a.channel_param
        if (ba - target) * (bb - target) <= 0.0:
            la, lb, lt = math.log(ba), math.log(bb), math.log(target)
            frac = 0.0 if lb == la else (lt - la) / (lb - la)
            return a.channel_param + frac * (b.channel_param - a.channel_param)
    attain = (min(r.ber for r in rows), max(r.ber for r in rows))
    raise ValueError(f"target BER {target:g} not bracketed; table covers "
                     f"[{attain[0]:g}, {attain[1]:g}]")


def _n_of(table: BerTable) -> int:
    return int(table.config.get("n", 1) or 1)


def gain_at_ber(table_a: BerTable, table_b: BerTable, target: float) -> float:
    """Signed channel-parameter gain of B over A at the target BER.

    Positive means B is better: it reaches the target at lower Eb/N0
    (BiAWGN, gain in dB) or at higher erasure probability (BEC, gain in
    epsilon)."""
    if table_a.kind != table_b.kind:
        raise ValueError("tables were simulated on different channel kinds")
    pa = _param_at_ber(table_a, target)
    pb = _param_at_ber(table_b, target)
    return pa - pb if table_a.kind == BIAWGN else pb - pa
