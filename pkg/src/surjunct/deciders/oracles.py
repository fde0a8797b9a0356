"""Exact injectivity/surjectivity for one-dimensional automata via de Bruijn graphs.

For a local map f on a window of w consecutive sites, the de Bruijn graph has
the words of length w-1 as nodes and one edge per word of length w, labelled
by f.  Configurations are bi-infinite paths.

* Plain rules use the pair graph (two paths with equal labels).  The CA is
  not injective iff some off-diagonal pair lies on a bi-infinite path, and
  not surjective (equivalently, not pre-injective) iff some off-diagonal pair
  lies on a path from the diagonal back to the diagonal.
* Group and linear rules use the kernel graph (edges labelled e only) with the
  all-neutral word as the distinguished node; the same two tests apply, since
  tau(x) = tau(y) iff x y^-1 lies in the kernel.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..alphabets import TABLE_CAP
from ..ca import CellularAutomaton, algebraic_rule
from ..errors import CapExceeded, UnsupportedUniverse
from ..groups import FreeAbelianGroup

PAIR_GRAPH_CAP = 4_000_000


@dataclass(frozen=True)
class Exact1D:
    injective: bool
    surjective: bool
    method: str
    span: int

    def to_json(self) -> dict:
        return {"injective": self.injective, "surjective": self.surjective, "method": self.method, "span": self.span}


def _relevant_span(ca: CellularAutomaton, cap: int) -> tuple[np.ndarray, int]:
    """Local table on the smallest interval of offsets it depends on."""
    A = ca.alphabet
    k = A.size
    offsets = [g[0] for g in ca.memory]
    m = len(offsets)
    T = np.asarray(ca.rule.table(cap), dtype=np.int64).reshape((k,) * m)
    relevant = []
    for j in range(m):
        first = np.take(T, 0, axis=j)
        if any(not np.array_equal(first, np.take(T, a, axis=j)) for a in range(1, k)):
            relevant.append(j)
    if not relevant:
        return T.reshape(-1)[:1], 0
    lo, hi = offsets[relevant[0]], offsets[relevant[-1]]
    keep = [j for j, off in enumerate(offsets) if lo <= off <= hi]
    index = tuple(slice(None) if j in keep else 0 for j in range(m))
    f = T[index]
    # spread over every site of [lo, hi]; gaps in the memory are ignored
    w = hi - lo + 1
    words = np.arange(k**w, dtype=np.int64)
    digits = [(words // k ** (w - 1 - i)) % k for i in range(w)]
    return f[tuple(digits[offsets[j] - lo] for j in keep)], w


def _core(n: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Nodes lying on a bi-infinite path: prune sources and sinks repeatedly."""
    alive = np.ones(n, dtype=bool)
    indeg = np.bincount(dst, minlength=n)
    outdeg = np.bincount(src, minlength=n)
    out_adj = _adjacency(n, src, dst)
    in_adj = _adjacency(n, dst, src)
    queue = deque(int(v) for v in np.flatnonzero((indeg == 0) | (outdeg == 0)))
    alive[list(queue)] = False
    while queue:
        v = queue.popleft()
        for u in out_adj[v]:
            indeg[u] -= 1
            if alive[u] and indeg[u] == 0:
                alive[u] = False
                queue.append(u)
        for u in in_adj[v]:
            outdeg[u] -= 1
            if alive[u] and outdeg[u] == 0:
                alive[u] = False
                queue.append(u)
    return alive


def _adjacency(n: int, src: np.ndarray, dst: np.ndarray) -> list[np.ndarray]:
    order = np.argsort(src, kind="stable")
    bounds = np.searchsorted(src[order], np.arange(n + 1))
    targets = dst[order]
    return [targets[bounds[v] : bounds[v + 1]] for v in range(n)]


def _reach(n: int, adj: list[np.ndarray], start: np.ndarray) -> np.ndarray:
    """Nodes reachable by paths of length at least one from ``start``."""
    seen = np.zeros(n, dtype=bool)
    queue = deque()
    for v in np.flatnonzero(start):
        for u in adj[v]:
            if not seen[u]:
                seen[u] = True
                queue.append(int(u))
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if not seen[u]:
                seen[u] = True
                queue.append(int(u))
    return seen


def _analyse(n: int, src: np.ndarray, dst: np.ndarray, base: np.ndarray) -> tuple[bool, bool]:
    """(injective, surjective) given the graph and its trivial node set ``base``."""
    core = _core(n, src, dst)
    injective = not (core & ~base).any()
    fwd = _reach(n, _adjacency(n, src, dst), base)
    bwd = _reach(n, _adjacency(n, dst, src), base)
    surjective = not (fwd & bwd & ~base).any()
    return injective, surjective


def exact_1d(ca: CellularAutomaton, cap: int = TABLE_CAP, pair_cap: int = PAIR_GRAPH_CAP) -> Exact1D:
    G = ca.universe
    if not (isinstance(G, FreeAbelianGroup) and G.rank == 1):
        raise UnsupportedUniverse("the de Bruijn oracle needs the universe Z")
    A = ca.alphabet
    k = A.size
    f, w = _relevant_span(ca, cap)
    if w <= 1:
        # depends on at most one site: a letterwise map
        bij = len(np.unique(f)) == k
        return Exact1D(bij, bij, "letterwise", w)
    nodes = k ** (w - 1)
    words = np.arange(k**w, dtype=np.int64)
    pre, suf = words // k, words % nodes
    if algebraic_rule(ca.rule) is not None:
        e = A.identity
        sel = f == e
        base = np.zeros(nodes, dtype=bool)
        base[sum(e * k**i for i in range(w - 1))] = True
        inj, surj = _analyse(nodes, pre[sel], suf[sel], base)
        return Exact1D(inj, surj, "kernel graph", w)
    # pair graph: edges (u, v) -> (u', v') for words with equal labels
    order = np.argsort(f, kind="stable")
    _, starts = np.unique(f[order], return_index=True)
    groups = np.split(order, starts[1:])
    total = sum(len(g) ** 2 for g in groups)
    if total > pair_cap or nodes * nodes > pair_cap:
        raise CapExceeded(f"pair graph with {total} edges exceeds cap {pair_cap}")
    src_parts, dst_parts = [], []
    for g in groups:
        a, b = np.meshgrid(g, g, indexing="ij")
        a, b = a.reshape(-1), b.reshape(-1)
        src_parts.append(pre[a] * nodes + pre[b])
        dst_parts.append(suf[a] * nodes + suf[b])
    src, dst = np.concatenate(src_parts), np.concatenate(dst_parts)
    base = np.zeros(nodes * nodes, dtype=bool)
    base[np.arange(nodes) * (nodes + 1)] = True
    inj, surj = _analyse(nodes * nodes, src, dst, base)
    return Exact1D(inj, surj, "pair graph", w)
