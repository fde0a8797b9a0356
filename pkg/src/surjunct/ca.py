"""Cellular automata, finite window maps, composition, periodic quotients and
restriction to the subgroup generated by the memory set.

Semantics are always ``tau(c)(g) = mu(h -> c(g h))`` for ``h`` in the memory
set; configurations on infinite universes are only ever handled through
finite windows or through periodic quotients.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import ff
from .alphabets import (
    TABLE_CAP,
    Alphabet,
    LocalRule,
    all_patterns,
    canonical_memory,
    hom_rejection,
    identity_rule,
    linear_rule,
    pattern_index,
)
from .errors import (
    CapExceeded,
    IncompatibleAutomata,
    UnsupportedUniverse,
    WindowTooLarge,
)
from .groups import (
    FiniteGroup,
    FiniteSubset,
    FreeAbelianGroup,
    GroupUniverse,
    LatticeQuotient,
    SubgroupEmbedding,
    ball,
    lattice_quotient,
    minimal_radius,
    product_set,
    subgroup_generated,
)


@dataclass(frozen=True)
class CellularAutomaton:
    universe: GroupUniverse
    rule: LocalRule

    def __post_init__(self):
        if self.rule.universe != self.universe:
            raise IncompatibleAutomata("rule memory lives in a different universe")

    @property
    def alphabet(self) -> Alphabet:
        return self.rule.alphabet

    @property
    def memory(self) -> FiniteSubset:
        return self.rule.memory

    def __repr__(self):
        return f"CA({self.universe!r}, {self.rule!r})"

    @cached_property
    def memory_radius(self) -> int:
        return minimal_radius(self.universe, self.memory)

    def window(self, n: int) -> FiniteSubset:
        """E_n = ball(n0 + n) with n0 the least radius whose ball holds M."""
        return ball(self.universe, self.memory_radius + n)

    def apply_finite(self, X: np.ndarray) -> np.ndarray:
        """Global map on a finite universe, vectorized over rows of ``X``
        (shape (N, |G|), column g holds c(g))."""
        G = self.universe
        if not G.is_finite:
            raise UnsupportedUniverse("global evaluation needs a finite universe")
        X = np.asarray(X, dtype=np.int64)
        cols = [[G.mul(g, h) for h in self.memory] for g in range(G.order)]
        return np.stack([self.rule.eval_array(X[:, c]) for c in cols], axis=1)


@dataclass(frozen=True)
class Pattern:
    window: FiniteSubset
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.window):
            raise ValueError("pattern needs one letter per window element")

    def __getitem__(self, g):
        return self.values[self.window.index(g)]

    def restrict(self, E: Iterable) -> Pattern:
        E = self.window.universe.subset(E)
        return Pattern(E, tuple(self[g] for g in E))

    def to_json(self) -> dict:
        return {"window": self.window.to_json(), "values": [int(v) for v in self.values]}

    @classmethod
    def from_json(cls, G: GroupUniverse, data) -> Pattern:
        E = G.subset(G.element_from_json(g) for g in data["window"])
        raw = [G.element_from_json(g) for g in data["window"]]
        vals = dict(zip(raw, data["values"]))
        return cls(E, tuple(int(vals[g]) for g in E))


@dataclass(frozen=True, eq=False)
class WindowMap:
    """``tau_E^+ : A^source -> A^target`` with ``source`` containing ``E M``."""

    ca: CellularAutomaton
    target: FiniteSubset
    source: FiniteSubset

    @cached_property
    def gather(self) -> np.ndarray:
        """gather[i, j] = position in ``source`` of target[i] * memory[j]."""
        G = self.ca.universe
        return np.array(
            [[self.source.index(G.mul(g, h)) for h in self.ca.memory] for g in self.target],
            dtype=np.int64,
        ).reshape(len(self.target), len(self.ca.memory))

    @cached_property
    def matrix(self) -> np.ndarray:
        """Block matrix over F_p, shape (n|E|, n|source|); linear rules only.

        Row block g carries block M_h at column block gh.
        """
        rule = self.ca.rule
        if rule.body != "linear":
            raise TypeError("only linear window maps have a block matrix")
        n = rule.alphabet.n
        W = np.zeros((n * len(self.target), n * len(self.source)), dtype=np.int64)
        mats = rule.matrices
        for i in range(len(self.target)):
            for j, col in enumerate(self.gather[i]):
                W[i * n : (i + 1) * n, col * n : (col + 1) * n] += mats[j]
        return W % rule.alphabet.p

    def apply(self, values: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(v) for v in self.apply_array(np.asarray(values, dtype=np.int64)[None, :])[0])

    def apply_array(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        rule = self.ca.rule
        if rule.body == "linear":
            A = rule.alphabet
            V = A.decode(X).reshape(X.shape[0], -1)
            out = (V @ self.matrix.T) % A.p
            return A.encode(out.reshape(X.shape[0], len(self.target), A.n))
        return np.stack([rule.eval_array(X[:, self.gather[i]]) for i in range(len(self.target))], axis=1)

    def apply_pattern(self, pattern: Pattern) -> Pattern:
        if not self.source.issubset(pattern.window):
            raise ValueError("pattern does not cover the source window")
        vals = [pattern[g] for g in self.source]
        return Pattern(self.target, self.apply(vals))

    def dense(self, cap: int = TABLE_CAP) -> np.ndarray:
        """Image letters of every source pattern, rows in pattern-index order."""
        A = self.ca.alphabet
        if A.size ** len(self.source) > cap:
            raise WindowTooLarge(f"{A.size}^{len(self.source)} source patterns exceed cap {cap}")
        return self.apply_array(all_patterns(A.size, len(self.source)))

    def image_indices(self, cap: int = TABLE_CAP) -> np.ndarray:
        """Sorted distinct pattern indices of the image."""
        Y = self.dense(cap)
        size = self.ca.alphabet.size
        idx = np.zeros(Y.shape[0], dtype=np.int64)
        for j in range(Y.shape[1]):
            idx = idx * size + Y[:, j]
        return np.unique(idx)


def window_map(ca: CellularAutomaton, E: Iterable, source: Iterable | None = None) -> WindowMap:
    G = ca.universe
    E = E if isinstance(E, FiniteSubset) else G.subset(E)
    if len(E) == 0:
        raise ValueError("window must be nonempty")
    EM = product_set(G, E, ca.memory)
    if source is None:
        src = EM
    else:
        src = source if isinstance(source, FiniteSubset) else G.subset(source)
        if not EM.issubset(src):
            raise ValueError("source window must contain E M")
    return WindowMap(ca, E, src)


# algebraic views ---------------------------------------------------------------


def classify(ca: CellularAutomaton) -> str:
    """'linear', 'group' or 'plain': the strongest class the rule belongs to."""
    rule = ca.rule
    if rule.body == "linear":
        return "linear"
    if rule.body == "hom":
        return "group"
    return "plain" if algebraic_rule(rule) is None else ("linear" if rule.alphabet.kind == "vector" else "group")


def algebraic_rule(rule: LocalRule) -> LocalRule | None:
    """Hom/linear body equivalent to ``rule``, or None if it is not a homomorphism.

    A map out of A^M is a homomorphism exactly when it factors as a product of
    per-site endomorphisms with pairwise commuting images; the per-site maps
    are read off single-site patterns and the factorization is then checked
    on every pattern.
    """
    if rule.body != "table":
        return rule
    A = rule.alphabet
    if not A.is_group:
        return None
    M = rule.memory
    m = len(M)
    e = A.identity
    table = rule.data
    if table[pattern_index([e] * m, A.size)] != e:
        return None
    if A.kind == "vector":
        n, p = A.n, A.p
        mats = {}
        for j, g in enumerate(M):
            cols = []
            for k in range(n):
                unit = np.zeros(n, dtype=np.int64)
                unit[k] = 1
                letters = [e] * m
                letters[j] = A.letter(unit)
                cols.append(A.decode(table[pattern_index(letters, A.size)]))
            mats[g] = np.array(cols, dtype=np.int64).T % p
        candidate = linear_rule(rule.universe, A, mats)
    else:
        phis = []
        for j in range(m):
            phi = []
            for a in range(A.size):
                letters = [e] * m
                letters[j] = a
                phi.append(table[pattern_index(letters, A.size)])
            phis.append(tuple(phi))
        if hom_rejection(A, phis, list(M)) is not None:
            return None
        candidate = LocalRule(rule.universe, A, M, "hom", tuple(phis))
    candidate = candidate.extend(M) if candidate.memory != M else candidate
    if tuple(int(v) for v in candidate.eval_array(all_patterns(A.size, m))) != table:
        return None
    return candidate


def as_algebraic(ca: CellularAutomaton) -> CellularAutomaton | None:
    rule = algebraic_rule(ca.rule)
    return None if rule is None else CellularAutomaton(ca.universe, rule)


# composition -------------------------------------------------------------------


def compose(sigma: CellularAutomaton, tau: CellularAutomaton, cap: int = TABLE_CAP) -> CellularAutomaton:
    """``sigma o tau`` (apply tau first) with memory M_sigma M_tau."""
    if sigma.universe != tau.universe or sigma.alphabet != tau.alphabet:
        raise IncompatibleAutomata("automata must share universe and alphabet")
    G, A = sigma.universe, sigma.alphabet
    S, T = sigma.rule, tau.rule
    if S.body == T.body == "linear":
        p = A.p
        acc: dict = {}
        for h, Sh in zip(S.memory, S.data):
            for k, Tk in zip(T.memory, T.data):
                m = G.mul(h, k)
                prod = (np.asarray(Sh) @ np.asarray(Tk)) % p
                acc[m] = (acc[m] + prod) % p if m in acc else prod
        return CellularAutomaton(G, linear_rule(G, A, acc))
    if S.body == T.body == "hom":
        mul = A.group.table
        acc = {}
        pairs = [(sh, tk, G.mul(h, k)) for h, sh in zip(S.memory, S.data) for k, tk in zip(T.memory, T.data)]
        for sh, tk, m in pairs:
            f = tuple(sh[tk[a]] for a in range(A.size))
            if m in acc:
                old = acc[m]
                acc[m] = tuple(mul[old[a]][f[a]] for a in range(A.size))
            else:
                acc[m] = f
        Mc = canonical_memory(G, acc)
        trivial = (A.identity,) * A.size
        data = tuple(acc.get(g, trivial) for g in Mc)
        if hom_rejection(A, data, list(Mc)) is None:
            return CellularAutomaton(G, LocalRule(G, A, Mc, "hom", data))
        # not representable as a product of commuting endomorphisms: fall back to a table
    MM = product_set(G, S.memory, T.memory)
    Mc = canonical_memory(G, MM)
    if A.size ** len(Mc) > cap:
        raise WindowTooLarge(f"composed table {A.size}^{len(Mc)} exceeds cap {cap}")
    X = all_patterns(A.size, len(Mc))
    inner = np.stack(
        [T.eval_array(X[:, [Mc.index(G.mul(h, k)) for k in T.memory]]) for h in S.memory], axis=1
    )
    table = tuple(int(v) for v in S.eval_array(inner))
    return CellularAutomaton(G, LocalRule(G, A, Mc, "table", table))


def identity_ca(G: GroupUniverse, A: Alphabet) -> CellularAutomaton:
    return CellularAutomaton(G, identity_rule(G, A))


# transport along group homomorphisms ---------------------------------------------


def transport_rule(rule: LocalRule, target: GroupUniverse, f: Callable) -> LocalRule:
    """Rule on ``target`` with ``mu'(y) = mu(h -> y(f(h)))``.

    When ``f`` identifies several memory elements their contributions are
    summed (linear), multiplied (hom) or pulled back (table).
    """
    A = rule.alphabet
    images = [f(h) for h in rule.memory]
    if rule.body == "linear":
        p = A.p
        acc: dict = {}
        for q, mat in zip(images, rule.data):
            M = np.asarray(mat, dtype=np.int64)
            acc[q] = (acc[q] + M) % p if q in acc else M
        return linear_rule(target, A, acc)
    if rule.body == "hom":
        mul = A.group.table
        acc = {}
        for q, phi in zip(images, rule.data):
            if q in acc:
                old = acc[q]
                acc[q] = tuple(mul[old[a]][phi[a]] for a in range(A.size))
            else:
                acc[q] = tuple(phi)
        Mc = canonical_memory(target, acc)
        trivial = (A.identity,) * A.size
        return LocalRule(target, A, Mc, "hom", tuple(acc.get(g, trivial) for g in Mc))
    Mc = canonical_memory(target, images)
    if A.size ** len(Mc) > TABLE_CAP:
        raise WindowTooLarge("transported table exceeds the cap")
    X = all_patterns(A.size, len(Mc))
    pulled = X[:, [Mc.index(q) for q in images]]
    table = tuple(int(v) for v in rule.eval_array(pulled))
    return LocalRule(target, A, Mc, "table", table)


@dataclass(frozen=True)
class PeriodicAction:
    """Action of a CA on Z^d restricted to L-periodic configurations,
    realized as a CA on the finite quotient Z^d / L."""

    base: CellularAutomaton
    quotient: LatticeQuotient
    ca: CellularAutomaton

    @property
    def lattice(self) -> tuple:
        return self.quotient.basis

    def lift(self, values: Sequence[int], window: Iterable) -> Pattern:
        """Restriction to ``window`` of the periodic configuration whose
        value at representative i is ``values[i]``."""
        G = self.base.universe
        W = G.subset(window)
        return Pattern(W, tuple(int(values[self.quotient.project(g)]) for g in W))


def periodic_action(ca: CellularAutomaton, lattice: Sequence[Sequence[int]]) -> PeriodicAction:
    if not isinstance(ca.universe, FreeAbelianGroup):
        raise UnsupportedUniverse("periodic actions need a Z^d universe")
    Q = lattice_quotient(ca.universe, lattice)
    rule = transport_rule(ca.rule, Q.group, Q.project)
    return PeriodicAction(ca, Q, CellularAutomaton(Q.group, rule))


def restrict_to_subgroup(ca: CellularAutomaton) -> tuple[CellularAutomaton, SubgroupEmbedding]:
    """tau_H on H = <M>, same local map, memory read through the embedding."""
    emb = subgroup_generated(ca.universe, ca.memory)
    rule = transport_rule(ca.rule, emb.sub, emb.from_parent)
    return CellularAutomaton(emb.sub, rule), emb


# finite-universe helpers ----------------------------------------------------------


def all_configurations(G: FiniteGroup, A: Alphabet, cap: int = TABLE_CAP) -> np.ndarray:
    if A.size**G.order > cap:
        raise CapExceeded(f"{A.size}^{G.order} configurations exceed cap {cap}")
    return all_patterns(A.size, G.order)


def config_indices(Y: np.ndarray, size: int) -> np.ndarray:
    idx = np.zeros(Y.shape[0], dtype=np.int64)
    for j in range(Y.shape[1]):
        idx = idx * size + Y[:, j]
    return idx


def full_matrix(ca: CellularAutomaton) -> np.ndarray:
    """Matrix of a linear CA on a finite universe acting on (F_p^n)^G."""
    G = ca.universe
    if not G.is_finite:
        raise UnsupportedUniverse("full matrix needs a finite universe")
    all_g = G.subset(range(G.order))
    return window_map(ca, all_g, all_g).matrix


def linear_rank(ca: CellularAutomaton) -> int:
    return ff.rank(full_matrix(ca), ca.alphabet.p)
