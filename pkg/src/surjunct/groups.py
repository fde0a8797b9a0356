"""Group universes: finite groups given by Cayley tables, free abelian groups
Z^d and free groups F_k, with balls, product sets and subgroup closure.

Element representations are canonical, so equality of elements is plain
equality of Python values:

* finite groups: ``int`` index into the multiplication table;
* Z^d: ``tuple[int, ...]`` of length d;
* F_k: reduced ``tuple`` of nonzero ints, ``i`` for the i-th generator and
  ``-i`` for its inverse.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable

from .errors import InfiniteUniverse, NotAGroup, RankDeficientLattice, UnsupportedUniverse

Element = Hashable

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class GroupUniverse:
    """Common interface of the three group backends."""

    kind: str

    @property
    def identity(self) -> Element:
        raise NotImplementedError

    def mul(self, g: Element, h: Element) -> Element:
        raise NotImplementedError

    def inv(self, g: Element) -> Element:
        raise NotImplementedError

    @property
    def generators(self) -> tuple:
        raise NotImplementedError

    def sort_key(self, g: Element) -> Any:
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return False

    def descriptor(self) -> dict:
        raise NotImplementedError

    def element_to_json(self, g: Element) -> Any:
        raise NotImplementedError

    def element_from_json(self, data: Any) -> Element:
        raise NotImplementedError

    # derived helpers

    def subset(self, elements: Iterable[Element]) -> FiniteSubset:
        return FiniteSubset(self, tuple(sorted(set(elements), key=self.sort_key)))

    def mul_many(self, *elements: Element) -> Element:
        out = self.identity
        for g in elements:
            out = self.mul(out, g)
        return out

    def word_length(self, g: Element) -> int:
        """Distance from the identity in the Cayley graph of ``generators``."""
        r = 0
        while g not in ball(self, r):
            r += 1
        return r


@dataclass(frozen=True, eq=False)
class FiniteGroup(GroupUniverse):
    """Finite group on indices ``0..order-1`` given by a multiplication table.

    ``labels`` optionally names the elements (used for quotients of Z^d, whose
    elements are coset representatives).
    """

    table: tuple[tuple[int, ...], ...]
    identity_index: int = 0
    name: str = "table"
    labels: tuple | None = None
    preset: dict | None = None
    check: bool = True
    kind: str = field(default="finite", init=False)

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if self.check:
            _check_group_table(table, self.identity_index)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroup)
            and self.table == other.table
            and self.identity_index == other.identity_index
        )

    def __hash__(self):
        return hash((self.table, self.identity_index))

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return self.identity_index

    @property
    def is_finite(self) -> bool:
        return True

    @cached_property
    def inverse_table(self) -> tuple[int, ...]:
        e = self.identity_index
        return tuple(row.index(e) for row in self.table)

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inv(self, g: int) -> int:
        return self.inverse_table[g]

    @cached_property
    def generators(self) -> tuple[int, ...]:
        return tuple(g for g in range(self.order) if g != self.identity_index)

    def sort_key(self, g: int) -> int:
        return g

    @cached_property
    def is_abelian(self) -> bool:
        t = self.table
        n = self.order
        return all(t[a][b] == t[b][a] for a in range(n) for b in range(a + 1, n))

    def descriptor(self) -> dict:
        if self.preset is not None:
            return dict(self.preset)
        return {"kind": "table", "table": [list(row) for row in self.table], "identity": self.identity_index}

    def element_to_json(self, g: int) -> int:
        return int(g)

    def element_from_json(self, data: Any) -> int:
        if isinstance(data, bool) or not isinstance(data, int) or not 0 <= data < self.order:
            raise ValueError(f"{data!r} is not an element index of {self.name}")
        return data

    def element_label(self, g: int) -> Any:
        return self.labels[g] if self.labels is not None else g


def _check_group_table(table: tuple[tuple[int, ...], ...], e: int) -> None:
    n = len(table)
    if n == 0:
        raise NotAGroup("empty table")
    if any(len(row) != n for row in table):
        raise NotAGroup("table is not square")
    if not 0 <= e < n:
        raise NotAGroup(f"identity index {e} out of range")
    for a, row in enumerate(table):
        if any(not 0 <= v < n for v in row):
            raise NotAGroup(f"row {a} has entries out of range")
        if row[e] != a or table[e][a] != a:
            raise NotAGroup(f"identity law fails at {a}")
        if e not in row:
            raise NotAGroup(f"{a} has no right inverse")
    for a in range(n):
        ta = table[a]
        for b in range(n):
            tab = table[ta[b]]
            tb = table[b]
            for c in range(n):
                if tab[c] != ta[tb[c]]:
                    raise NotAGroup(f"associativity fails at ({a}, {b}, {c})")


@dataclass(frozen=True)
class FreeAbelianGroup(GroupUniverse):
    """Z^d with elements as integer tuples and standard generators +-e_i."""

    rank: int
    kind: str = field(default="free_abelian", init=False)

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")

    def __repr__(self):
        return f"FreeAbelianGroup({self.rank})"

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    @cached_property
    def generators(self):
        gens = []
        for i in range(self.rank):
            for s in (1, -1):
                v = [0] * self.rank
                v[i] = s
                gens.append(tuple(v))
        return tuple(gens)

    def sort_key(self, g):
        return g

    def descriptor(self) -> dict:
        return {"kind": "free_abelian", "rank": self.rank}

    def element_to_json(self, g):
        return list(g)

    def element_from_json(self, data):
        if isinstance(data, int) and not isinstance(data, bool) and self.rank == 1:
            return (data,)
        if not isinstance(data, (list, tuple)) or len(data) != self.rank:
            raise ValueError(f"{data!r} is not an element of Z^{self.rank}")
        if any(isinstance(a, bool) or not isinstance(a, int) for a in data):
            raise ValueError(f"{data!r} has non-integer coordinates")
        return tuple(data)

    def word_length(self, g) -> int:
        return sum(abs(a) for a in g)


@dataclass(frozen=True)
class FreeGroup(GroupUniverse):
    """Free group on ``rank`` generators; elements are reduced words."""

    rank: int
    kind: str = field(default="free", init=False)

    def __post_init__(self):
        if not 0 <= self.rank <= len(_LETTERS):
            raise ValueError(f"rank must be in 0..{len(_LETTERS)}")

    def __repr__(self):
        return f"FreeGroup({self.rank})"

    @property
    def identity(self) -> tuple:
        return ()

    def mul(self, g, h):
        # cancel at the junction only: both inputs are reduced
        i = 0
        n = min(len(g), len(h))
        while i < n and g[len(g) - 1 - i] == -h[i]:
            i += 1
        return g[: len(g) - i] + h[i:]

    def inv(self, g):
        return tuple(-s for s in reversed(g))

    @cached_property
    def generators(self):
        return tuple(w for i in range(1, self.rank + 1) for w in ((i,), (-i,)))

    @staticmethod
    def _symbol_rank(s: int) -> int:
        return 2 * (s - 1) if s > 0 else 2 * (-s - 1) + 1

    def sort_key(self, g):
        return (len(g), tuple(self._symbol_rank(s) for s in g))

    def descriptor(self) -> dict:
        return {"kind": "free", "rank": self.rank}

    def element_to_json(self, g) -> str:
        return "".join(_LETTERS[s - 1] if s > 0 else _LETTERS[-s - 1].upper() for s in g)

    def element_from_json(self, data):
        if not isinstance(data, str):
            raise ValueError(f"free group elements are words, got {data!r}")
        word: tuple = ()
        for ch in data.strip():
            if ch in "1 ":
                continue
            i = _LETTERS.find(ch.lower()) + 1
            if not 1 <= i <= self.rank:
                raise ValueError(f"letter {ch!r} is not a generator of F_{self.rank}")
            word = self.mul(word, (i if ch.islower() else -i,))
        return word

    def word_length(self, g) -> int:
        return len(g)


@dataclass(frozen=True)
class FiniteSubset:
    """Duplicate-free, canonically ordered finite subset of a universe.

    Build instances through :meth:`GroupUniverse.subset`; the constructor does
    not sort.
    """

    universe: GroupUniverse = field(repr=False)
    elements: tuple

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.positions

    def __getitem__(self, i):
        return self.elements[i]

    @cached_property
    def positions(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    def index(self, g) -> int:
        return self.positions[g]

    def issubset(self, other: FiniteSubset) -> bool:
        return all(g in other for g in self.elements)

    def union(self, other: Iterable) -> FiniteSubset:
        return self.universe.subset(itertools.chain(self.elements, other))

    def inverse(self) -> FiniteSubset:
        return self.universe.subset(self.universe.inv(g) for g in self.elements)

    def translate(self, g) -> FiniteSubset:
        """Left translate ``g * self``."""
        return self.universe.subset(self.universe.mul(g, h) for h in self.elements)

    def to_json(self) -> list:
        return [self.universe.element_to_json(g) for g in self.elements]


def ball(G: GroupUniverse, r: int) -> FiniteSubset:
    """All products of at most ``r`` generators."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    return _ball(G, r)


_BALL_CACHE: dict = {}


def _ball(G: GroupUniverse, r: int) -> FiniteSubset:
    key = (G, r)
    hit = _BALL_CACHE.get(key)
    if hit is not None:
        return hit
    if r == 0:
        out = G.subset([G.identity])
    else:
        prev = _ball(G, r - 1)
        seen = set(prev.elements)
        if not (G.is_finite and len(seen) == G.order):
            for g in prev.elements:
                for s in G.generators:
                    seen.add(G.mul(g, s))
        out = G.subset(seen)
    if len(_BALL_CACHE) > 4096:
        _BALL_CACHE.clear()
    _BALL_CACHE[key] = out
    return out


def product_set(G: GroupUniverse, E: Iterable, F: Iterable) -> FiniteSubset:
    """``{ef : e in E, f in F}`` in canonical order."""
    F = list(F)
    return G.subset(G.mul(e, f) for e in E for f in F)


def enumerate_group(G: GroupUniverse) -> list:
    if not G.is_finite:
        raise InfiniteUniverse(f"{G!r} is infinite")
    return list(range(G.order))


def minimal_radius(G: GroupUniverse, S: Iterable) -> int:
    """Least r with S contained in ball(r)."""
    return max((G.word_length(g) for g in S), default=0)


# presets ---------------------------------------------------------------------


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return FiniteGroup(table, 0, name=f"Z/{n}", preset={"kind": "cyclic", "n": n}, check=False)


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; index k + n*f stands for r^k s^f."""
    if n < 1:
        raise ValueError("dihedral parameter must be positive")

    def mul(a, b):
        k1, f1 = a % n, a // n
        k2, f2 = b % n, b // n
        # r^k1 s^f1 r^k2 s^f2 = r^(k1 +- k2) s^(f1 + f2)
        k = (k1 + (k2 if f1 == 0 else -k2)) % n
        return k + n * ((f1 + f2) % 2)

    table = tuple(tuple(mul(a, b) for b in range(2 * n)) for a in range(2 * n))
    return FiniteGroup(table, 0, name=f"D{n}", preset={"kind": "dihedral", "n": n}, check=False)


def symmetric(n: int) -> FiniteGroup:
    """S_n with permutations in lexicographic order; (st)(i) = s(t(i))."""
    if n < 1:
        raise ValueError("symmetric group degree must be positive")
    perms = list(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    table = tuple(tuple(pos[tuple(s[t[i]] for i in range(n))] for t in perms) for s in perms)
    return FiniteGroup(
        table, 0, name=f"S{n}", labels=tuple(perms), preset={"kind": "symmetric", "n": n}, check=False
    )


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """G x H with index ``g * |H| + h``."""
    m = H.order

    def mul(a, b):
        return G.mul(a // m, b // m) * m + H.mul(a % m, b % m)

    order = G.order * m
    table = tuple(tuple(mul(a, b) for b in range(order)) for a in range(order))
    preset = None
    if G.preset is not None and H.preset is not None:
        preset = {"kind": "product", "factors": [G.descriptor(), H.descriptor()]}
    return FiniteGroup(
        table, G.identity * m + H.identity, name=f"{G.name}x{H.name}", preset=preset, check=False
    )


# lattices ----------------------------------------------------------------------


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns a basis in echelon form: pivots strictly increase left to right,
    pivot entries are positive, entries above a pivot lie in ``[0, pivot)``,
    and zero rows are dropped.
    """
    A = [list(map(int, r)) for r in rows]
    if not A:
        return []
    ncols = len(A[0])
    out: list[list[int]] = []
    pivots: list[int] = []
    work = [r for r in A if any(r)]
    col = 0
    while work and col < ncols:
        nz = [r for r in work if r[col] != 0]
        if not nz:
            col += 1
            continue
        # Euclid on column ``col`` until a single row survives there
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for j in range(col, ncols):
                    r[j] -= q * piv[j]
            nz = [r for r in nz if r[col] != 0]
        piv = nz[0]
        if piv[col] < 0:
            piv[:] = [-v for v in piv]
        work = [r for r in work if r is not piv and any(r)]
        out.append(piv)
        pivots.append(col)
        col += 1
    # reduce entries above each pivot
    for i in range(len(out)):
        c, p = pivots[i], out[i][pivots[i]]
        for k in range(i):
            q = out[k][c] // p
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], out[i])]
    return [tuple(r) for r in out]


def hnf_pivots(basis: Sequence[Sequence[int]]) -> list[int]:
    return [next(j for j, v in enumerate(row) if v != 0) for row in basis]


def lattice_coordinates(basis: Sequence[Sequence[int]], v: Sequence[int]) -> tuple[int, ...] | None:
    """Integer coefficients ``c`` with ``sum c_i basis_i == v``, or None."""
    v = list(v)
    coeffs = []
    for row, c in zip(basis, hnf_pivots(basis)):
        q, r = divmod(v[c], row[c])
        if r:
            return None
        coeffs.append(q)
        v = [a - q * b for a, b in zip(v, row)]
    return tuple(coeffs) if not any(v) else None


@dataclass(frozen=True)
class SubgroupEmbedding:
    """A subgroup H presented as its own universe, with maps into the parent.

    For finite parents ``images[i]`` is the parent index of sub-element i.
    For Z^d parents ``basis`` holds the HNF rows; sub-element ``c`` maps to
    ``sum c_i basis_i``.
    """

    parent: GroupUniverse
    sub: GroupUniverse
    images: tuple | None = None
    basis: tuple | None = None

    def to_parent(self, h):
        if self.images is not None:
            return self.images[h]
        d = self.parent.rank
        return tuple(sum(c * row[j] for c, row in zip(h, self.basis)) for j in range(d))

    def from_parent(self, g):
        if self.images is not None:
            try:
                return self.images.index(g)
            except ValueError:
                raise ValueError(f"{g!r} is not in the subgroup") from None
        c = lattice_coordinates(self.basis, g)
        if c is None:
            raise ValueError(f"{g!r} is not in the lattice")
        return c

    @property
    def index(self) -> int | None:
        """[G:H] when finite."""
        if self.images is not None:
            return self.parent.order // self.sub.order
        if len(self.basis) < self.parent.rank:
            return None
        return math.prod(row[c] for row, c in zip(self.basis, hnf_pivots(self.basis)))


def subgroup_generated(G: GroupUniverse, S: Iterable) -> SubgroupEmbedding:
    S = list(S)
    if isinstance(G, FiniteGroup):
        gens = {G.identity}
        for s in S:
            gens.add(s)
            gens.add(G.inv(s))
        closed = set(gens)
        frontier = list(closed)
        while frontier:
            nxt = []
            for a in frontier:
                for s in gens:
                    b = G.mul(a, s)
                    if b not in closed:
                        closed.add(b)
                        nxt.append(b)
            frontier = nxt
        images = tuple(sorted(closed))
        pos = {g: i for i, g in enumerate(images)}
        table = tuple(tuple(pos[G.mul(a, b)] for b in images) for a in images)
        labels = tuple(G.element_label(g) for g in images)
        sub = FiniteGroup(table, pos[G.identity], name=f"<{len(images)}>≤{G.name}", labels=labels, check=False)
        return SubgroupEmbedding(G, sub, images=images)
    if isinstance(G, FreeAbelianGroup):
        basis = tuple(hermite_normal_form(S)) if S else ()
        return SubgroupEmbedding(G, FreeAbelianGroup(len(basis)), basis=basis)
    raise UnsupportedUniverse("subgroup machinery is only available for finite and free abelian universes")


@dataclass(frozen=True, eq=False)
class LatticeQuotient:
    """Z^d / L as a finite group whose elements are the reduced representatives."""

    base: FreeAbelianGroup
    basis: tuple
    group: FiniteGroup
    representatives: tuple

    def reduce(self, v) -> tuple[int, ...]:
        v = list(v)
        for row, c in zip(self.basis, hnf_pivots(self.basis)):
            q = v[c] // row[c]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def project(self, v) -> int:
        return self._index[self.reduce(v)]

    @cached_property
    def _index(self) -> dict:
        return {r: i for i, r in enumerate(self.representatives)}


def lattice_quotient(G: FreeAbelianGroup, lattice_rows: Sequence[Sequence[int]]) -> LatticeQuotient:
    if not isinstance(G, FreeAbelianGroup):
        raise UnsupportedUniverse("periodic quotients need a Z^d universe")
    basis = tuple(hermite_normal_form(lattice_rows))
    if len(basis) != G.rank or hnf_pivots(basis) != list(range(G.rank)):
        raise RankDeficientLattice(f"lattice {list(lattice_rows)} does not have full rank {G.rank}")
    diag = [basis[i][i] for i in range(G.rank)]
    reps = tuple(itertools.product(*(range(m) for m in diag)))
    q = LatticeQuotient(G, basis, None, reps)  # type: ignore[arg-type]
    idx = q._index
    table = tuple(tuple(idx[q.reduce(G.mul(a, b))] for b in reps) for a in reps)
    group = FiniteGroup(table, idx[G.identity], name=f"Z^{G.rank}/L", labels=reps, check=False)
    object.__setattr__(q, "group", group)
    return q


def hnf_lattices(d: int, max_index: int):
    """All full-rank sublattices of Z^d with index <= max_index, as HNF bases."""

    def diagonals(i, prefix, budget):
        if i == d:
            yield prefix
            return
        for piv in range(1, budget + 1):
            yield from diagonals(i + 1, prefix + [piv], budget // piv)

    for diag in diagonals(0, [], max_index):
        # off-diagonal entry (i, j), j > i, ranges over [0, diag[j])
        slots = [(i, j) for i in range(d) for j in range(i + 1, d)]
        for vals in itertools.product(*(range(diag[j]) for _, j in slots)):
            rows = [[0] * d for _ in range(d)]
            for i in range(d):
                rows[i][i] = diag[i]
            for (i, j), v in zip(slots, vals):
                rows[i][j] = v
            yield tuple(tuple(r) for r in rows)


def universe_from_descriptor(desc: dict) -> GroupUniverse:
    kind = desc.get("kind")
    if kind == "cyclic":
        return cyclic(int(desc["n"]))
    if kind == "dihedral":
        return dihedral(int(desc["n"]))
    if kind == "symmetric":
        return symmetric(int(desc["n"]))
    if kind == "product":
        factors = [universe_from_descriptor(f) for f in desc["factors"]]
        out = factors[0]
        for f in factors[1:]:
            if not (isinstance(out, FiniteGroup) and isinstance(f, FiniteGroup)):
                raise ValueError("products are only supported for finite groups")
            out = direct_product(out, f)
        return out
    if kind == "table":
        return FiniteGroup(tuple(map(tuple, desc["table"])), int(desc.get("identity", 0)))
    if kind == "free_abelian":
        return FreeAbelianGroup(int(desc["rank"]))
    if kind == "free":
        return FreeGroup(int(desc["rank"]))
    raise ValueError(f"unknown universe kind {kind!r}")
