"""Random Tanner-graph realizations of a NodeDegreeSpec, free of 4-cycles.

Construction is the configuration model: pair a seeded permutation of the
check-node sockets with the variable-node sockets, repair parallel edges by
randomized swaps, then swap edges until no two variable nodes share two
checks.  Swaps preserve the degree sequence exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profiles import NodeDegreeSpec
from .seeds import make_rng, seed_sequence


class GraphError(RuntimeError):
    pass


@dataclass(frozen=True)
class TannerGraph:
    n: int
    m_cn: int
    vn_idx: np.ndarray     # edge -> variable node, edges sorted by (vn, cn)
    cn_idx: np.ndarray     # edge -> check node
    seed: int

    @property
    def e(self) -> int:
        return int(self.vn_idx.size)

    def vn_adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for v, c in zip(self.vn_idx, self.cn_idx):
            adj[v].append(int(c))
        return adj

    def cn_adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.m_cn)]
        for v, c in zip(self.vn_idx, self.cn_idx):
            adj[c].append(int(v))
        return adj


def _shared_pair_keys(vn_idx: np.ndarray, cn_idx: np.ndarray, n: int, m: int
                      ) -> tuple[np.ndarray, np.ndarray]:
    """Unique encoded VN pairs sharing a CN, with their shared-CN counts.

    Pairs are enumerated per check node (degree-grouped, vectorized); the key
    of pair (a < b) is a * n + b."""
    if vn_idx.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    order = np.argsort(cn_idx, kind="stable")
    vns = vn_idx[order]
    deg = np.bincount(cn_idx, minlength=m)
    offsets = np.concatenate(([0], np.cumsum(deg)))
    parts = []
    for d in np.unique(deg):
        if d < 2:
            continue
        cn_ids = np.nonzero(deg == d)[0]
        idx = offsets[cn_ids][:, None] + np.arange(d)[None, :]
        members = vns[idx]
        iu, ju = np.triu_indices(int(d), k=1)
        a = members[:, iu].ravel()
        b = members[:, ju].ravel()
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        parts.append(lo.astype(np.int64) * n + hi)
    if not parts:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.unique(np.concatenate(parts), return_counts=True)


def count_4cycles(graph: TannerGraph) -> int:
    """Sum over VN pairs of (shared check nodes - 1); zero iff girth > 4."""
    _keys, counts = _shared_pair_keys(graph.vn_idx, graph.cn_idx, graph.n, graph.m_cn)
    if counts.size == 0:
        return 0
    return int(np.sum(counts[counts >= 2] - 1))


class _SwapState:
    """Mutable adjacency with the 4-cycle total maintained incrementally.

    Degree-preserving swaps keep the total number of pair meetings
    sum_c C(deg_c, 2) constant, so the 4-cycle count moves exactly opposite
    to the number of distinct VN pairs sharing at least one CN; swap deltas
    only need the shared counts of pairs touching the two swapped edges."""

    def __init__(self, n: int, m: int, vn_of_edge: np.ndarray, cn_of_edge: np.ndarray):
        self.n = n
        self.m = m
        self.vn_of_edge = vn_of_edge
        self.cn_of_edge = cn_of_edge
        self.vn_sets: list[set[int]] = [set() for _ in range(n)]
        self.cn_sets: list[set[int]] = [set() for _ in range(m)]
        for v, c in zip(vn_of_edge.tolist(), cn_of_edge.tolist()):
            self.vn_sets[v].add(c)
            self.cn_sets[c].add(v)
        keys, counts = _shared_pair_keys(vn_of_edge, cn_of_edge, n, m)
        bad = counts >= 2
        self.total4 = int(np.sum(counts[bad] - 1)) if counts.size else 0
        self.offenders: set[tuple[int, int]] = {
            (int(k // n), int(k % n)) for k in keys[bad]}
        self._off_cache: tuple | None = None

    def shared(self, a: int, b: int) -> int:
        return len(self.vn_sets[a] & self.vn_sets[b])

    def eval_swap(self, e1: int, e2: int):
        """Delta of the 4-cycle count for the swap (v1,c1),(v2,c2) ->
        (v1,c2),(v2,c1), or None if it would create a parallel edge.

        Returns (delta, events) where events lists (pair, +/-1, old_shared)."""
        v1, c1 = int(self.vn_of_edge[e1]), int(self.cn_of_edge[e1])
        v2, c2 = int(self.vn_of_edge[e2]), int(self.cn_of_edge[e2])
        if c1 == c2 or v1 == v2:
            return None
        if c2 in self.vn_sets[v1] or c1 in self.vn_sets[v2]:
            return None
        deltas: dict[tuple[int, int], int] = {}

        def bump(a: int, b: int, d: int) -> None:
            key = (a, b) if a < b else (b, a)
            deltas[key] = deltas.get(key, 0) + d

        for x in self.cn_sets[c1]:
            if x != v1:
                bump(v1, x, -1)
                bump(v2, x, +1)
        for x in self.cn_sets[c2]:
            if x != v2:
                bump(v1, x, +1)
                bump(v2, x, -1)
        events = []
        distinct_delta = 0
        for key, d in deltas.items():
            if d == 0:
                continue
            s = self.shared(*key)
            events.append((key, d, s))
            if d > 0 and s == 0:
                distinct_delta += 1
            elif d < 0 and s == 1:
                distinct_delta -= 1
        return -distinct_delta, events

    def commit_swap(self, e1: int, e2: int, delta: int, events) -> None:
        v1, c1 = int(self.vn_of_edge[e1]), int(self.cn_of_edge[e1])
        v2, c2 = int(self.vn_of_edge[e2]), int(self.cn_of_edge[e2])
        self.cn_sets[c1].discard(v1)
        self.cn_sets[c1].add(v2)
        self.cn_sets[c2].discard(v2)
        self.cn_sets[c2].add(v1)
        self.vn_sets[v1].discard(c1)
        self.vn_sets[v1].add(c2)
        self.vn_sets[v2].discard(c2)
        self.vn_sets[v2].add(c1)
        self.cn_of_edge[e1], self.cn_of_edge[e2] = c2, c1
        self.total4 += delta
        for key, d, s in events:
            if s + d >= 2:
                self.offenders.add(key)
            else:
                self.offenders.discard(key)
        self._off_cache = None

    def try_swap(self, e1: int, e2: int) -> bool:
        """Apply the swap iff it creates no parallel edge and does not
        increase the 4-cycle count."""
        ev = self.eval_swap(e1, e2)
        if ev is None or ev[0] > 0:
            return False
        self.commit_swap(e1, e2, ev[0], ev[1])
        return True

    def offender_tuple(self) -> tuple:
        if self._off_cache is None:
            self._off_cache = tuple(sorted(self.offenders))
        return self._off_cache

    def find_edge(self, v: int, c: int) -> int:
        hits = np.nonzero((self.vn_of_edge == v) & (self.cn_of_edge == c))[0]
        return int(hits[0])


def _swap_descent(state: _SwapState, rng: np.random.Generator, budget: int,
                  patience: int, n_candidates: int = 8,
                  walk_prob: float = 0.05) -> int:
    """Reduce the 4-cycle count by steepest-of-k randomized swaps.

    Each step picks an offending VN pair, one of its shared CNs, and the
    better of up to n_candidates random partner edges; non-increasing swaps
    are always taken, and with walk_prob the least-bad uphill swap is taken
    to escape plateaus.  Stops at zero, after `budget` candidate evaluations,
    or once `patience` evaluations pass without improving the best count."""
    e = int(state.vn_of_edge.size)
    spent = 0
    best = state.total4
    since_best = 0
    while state.total4 > 0 and spent < budget and since_best < patience:
        offenders = state.offender_tuple()
        pair = offenders[int(rng.integers(len(offenders)))]
        v = pair[int(rng.integers(2))]
        shared = sorted(state.vn_sets[pair[0]] & state.vn_sets[pair[1]])
        c = shared[int(rng.integers(len(shared)))]
        e1 = state.find_edge(v, c)
        best_cand = None
        for _ in range(n_candidates):
            e2 = int(rng.integers(e))
            spent += 1
            ev = state.eval_swap(e1, e2)
            if ev is None:
                continue
            if best_cand is None or ev[0] < best_cand[1][0]:
                best_cand = (e2, ev)
            if ev[0] < 0:
                break
        if best_cand is None:
            since_best += n_candidates
            continue
        e2, (delta, events) = best_cand
        if delta <= 0 or rng.random() < walk_prob:
            state.commit_swap(e1, e2, delta, events)
        if state.total4 < best:
            best = state.total4
            since_best = 0
        else:
            since_best += n_candidates
    return state.total4


def _freeze(state: _SwapState, n: int, m: int, seed: int) -> TannerGraph:
    order = np.lexsort((state.cn_of_edge, state.vn_of_edge))
    return TannerGraph(n=n, m_cn=m,
                       vn_idx=state.vn_of_edge[order].astype(np.int64),
                       cn_idx=state.cn_of_edge[order].astype(np.int64),
                       seed=int(seed))


def _config_model(spec: NodeDegreeSpec, rng: np.random.Generator,
                  max_attempts: int) -> tuple[np.ndarray, np.ndarray]:
    """Socket pairing with randomized swap repair of parallel edges."""
    vn_sockets = np.repeat(np.arange(spec.n), spec.vn_degrees()).astype(np.int64)
    cn_sockets = np.repeat(np.arange(spec.m_cn), spec.cn_degrees()).astype(np.int64)
    cn_sockets = cn_sockets[rng.permutation(cn_sockets.size)]
    e = int(vn_sockets.size)

    keys = vn_sockets * spec.m_cn + cn_sockets
    if np.unique(keys).size == e:
        return vn_sockets, cn_sockets

    seen: dict[tuple[int, int], int] = {}
    dup: list[int] = []
    for i in range(e):
        key = (int(vn_sockets[i]), int(cn_sockets[i]))
        if key in seen:
            dup.append(i)
        else:
            seen[key] = i
    attempts = 0
    while dup:
        i = dup.pop()
        key = (int(vn_sockets[i]), int(cn_sockets[i]))
        if seen.get(key) == i:
            continue
        while True:
            attempts += 1
            if attempts > max_attempts:
                raise GraphError("could not realize simple graph / girth > 4 "
                                 f"(parallel-edge repair exceeded {max_attempts} swaps)")
            j = int(rng.integers(e))
            kj = (int(vn_sockets[j]), int(cn_sockets[j]))
            if j == i or seen.get(kj) != j:
                continue
            new_i = (key[0], kj[1])
            new_j = (kj[0], key[1])
            if new_i == new_j or new_i in seen or new_j in seen:
                continue
            del seen[kj]
            cn_sockets[i], cn_sockets[j] = cn_sockets[j], cn_sockets[i]
            seen[new_i] = i
            seen[new_j] = j
            break
    return vn_sockets, cn_sockets


def sample_graph(spec: NodeDegreeSpec, seed: int, swap_budget: int | None = None,
                 restarts: int = 4) -> TannerGraph:
    """Seeded configuration-model draw, cleaned to girth > 4; deterministic.

    Raises GraphError when the swap budget (default 100 E, split over a few
    fresh restarts) cannot reach zero 4-cycles.  Some dense degree spectra
    make girth > 4 impossible outright (many max-degree VNs force repeated
    pair meetings); use sample_graph_best_effort for those."""
    rng = make_rng(seed_sequence(seed, 0x67726170))
    budget = 100 * max(spec.e, 1) if swap_budget is None else swap_budget
    per_round = max(1, budget // max(restarts, 1))
    state = None
    for _ in range(max(restarts, 1)):
        vn_sockets, cn_sockets = _config_model(spec, rng, budget)
        state = _SwapState(spec.n, spec.m_cn, vn_sockets, cn_sockets)
        residual = _swap_descent(state, rng, per_round, patience=per_round)
        if residual == 0:
            return _freeze(state, spec.n, spec.m_cn, int(seed))
    raise GraphError("could not realize simple graph / girth > 4 "
                     f"({state.total4} residual 4-cycles after {budget} swaps)")


def sample_graph_best_effort(spec: NodeDegreeSpec, seed: int,
                             swap_budget: int | None = None,
                             patience: int | None = None
                             ) -> tuple[TannerGraph, int]:
    """Configuration-model draw with 4-cycles reduced as far as the budget
    allows; returns (graph, residual count).  This is the simulation-engine
    path: short dense profiles often cannot reach girth > 4 at all."""
    rng = make_rng(seed_sequence(seed, 0x67726170))
    budget = 8 * max(spec.e, 1) if swap_budget is None else swap_budget
    patience = 2 * max(spec.e, 1) if patience is None else patience
    vn_sockets, cn_sockets = _config_model(spec, rng, 100 * max(spec.e, 1))
    state = _SwapState(spec.n, spec.m_cn, vn_sockets, cn_sockets)
    residual = _swap_descent(state, rng, budget, patience=patience)
    return _freeze(state, spec.n, spec.m_cn, int(seed)), residual


def remove_girth4(graph: TannerGraph, seed: int, budget: int | None = None
                  ) -> tuple[TannerGraph, int]:
    """Randomized degree-preserving edge swaps until no 4-cycles remain.

    Returns (graph, residual count); a nonzero residual means the budget ran
    out and the caller decides what to do with the best-effort graph."""
    if budget is None:
        budget = 100 * max(graph.e, 1)
    rng = make_rng(seed_sequence(seed, 0x73776170))
    state = _SwapState(graph.n, graph.m_cn, graph.vn_idx.copy(), graph.cn_idx.copy())
    residual = _swap_descent(state, rng, budget, patience=budget)
    return _freeze(state, graph.n, graph.m_cn, graph.seed), residual


def graph_degrees(graph: TannerGraph) -> tuple[np.ndarray, np.ndarray]:
    vn_deg = np.bincount(graph.vn_idx, minlength=graph.n)
    cn_deg = np.bincount(graph.cn_idx, minlength=graph.m_cn)
    return vn_deg, cn_deg


def to_alist(graph: TannerGraph) -> str:
    """H in alist format (1-based indices), columns = variable nodes."""
    vn_adj = [sorted(a) for a in graph.vn_adjacency()]
    cn_adj = [sorted(a) for a in graph.cn_adjacency()]
    vn_deg = [len(a) for a in vn_adj]
    cn_deg = [len(a) for a in cn_adj]
    lines = [f"{graph.n} {graph.m_cn}",
             f"{max(vn_deg, default=0)} {max(cn_deg, default=0)}",
             " ".join(map(str, vn_deg)),
             " ".join(map(str, cn_deg))]
    for adj in vn_adj:
        lines.append(" ".join(str(c + 1) for c in adj))
    for adj in cn_adj:
        lines.append(" ".join(str(v + 1) for v in adj))
    return "\n".join(lines) + "\n"


# -- GF(2) helpers for the audit encoder --------------------------------------

def h_matrix(graph: TannerGraph) -> np.ndarray:
    h = np.zeros((graph.m_cn, graph.n), dtype=np.uint8)
    h[graph.cn_idx, graph.vn_idx] = 1
    return h


def random_codeword(graph: TannerGraph, rng: np.random.Generator) -> np.ndarray:
    """Uniform random codeword of H via GF(2) elimination (audit runs only)."""
    h = h_matrix(graph)
    m, n = h.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        hit = np.nonzero(h[row:, col])[0]
        if hit.size == 0:
            continue
        r = row + int(hit[0])
        h[[row, r]] = h[[r, row]]
        mask = h[:, col].astype(bool)
        mask[row] = False
        h[mask] ^= h[row]
        pivots.append(col)
        row += 1
        if row == m:
            break
    free = sorted(set(range(n)) - set(pivots))
    word = np.zeros(n, dtype=np.uint8)
    word[free] = rng.integers(0, 2, size=len(free), dtype=np.uint8)
    for r in range(len(pivots) - 1, -1, -1):
        col = pivots[r]
        word[col] = 0
        word[col] = int(h[r] @ word % 2)
    return word
