"""Alphabets and local rules.

Letters are always plain ``int`` indices ``0..|A|-1``.  For vector-space
alphabets F_p^n the index is the mixed-radix encoding of the coefficient
vector, most significant coordinate first, so that index order is the
lexicographic order of coefficient vectors.

A local rule ``mu: A^M -> A`` has one of three bodies:

``table``
    dense list of output letters indexed by pattern index (mixed radix over
    the canonical memory order, most significant coordinate first);
``hom``
    one endomorphism table per memory element, ``mu(x) = prod_g phi_g(x(g))``
    taken in canonical memory order;
``linear``
    one n x n matrix per memory element, ``mu(x) = sum_g M_g x(g)`` over F_p.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from . import ff
from .errors import (
    BudgetExceeded,
    DomainMismatch,
    InvalidRule,
    NotAGroupAlphabet,
    WindowTooLarge,
)
from .groups import FiniteGroup, FiniteSubset, GroupUniverse, universe_from_descriptor

TABLE_CAP = 1 << 24


@dataclass(frozen=True, eq=False)
class Alphabet:
    kind: str  # "set" | "group" | "vector"
    size: int
    group: FiniteGroup | None = None
    p: int | None = None
    n: int | None = None

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @cached_property
    def _key(self):
        return (self.kind, self.size, self.group, self.p, self.n)

    def __repr__(self):
        if self.kind == "vector":
            return f"Alphabet(F_{self.p}^{self.n})"
        if self.kind == "group":
            return f"Alphabet({self.group.name})"
        return f"Alphabet(set of {self.size})"

    # constructors

    @classmethod
    def plain(cls, size: int) -> Alphabet:
        if size < 1:
            raise ValueError("alphabet must be nonempty")
        return cls("set", size)

    @classmethod
    def from_group(cls, group: FiniteGroup) -> Alphabet:
        return cls("group", group.order, group=group)

    @classmethod
    def vector_space(cls, p: int, n: int = 1) -> Alphabet:
        ff.require_prime(p)
        if n < 1:
            raise ValueError("dimension must be at least 1")
        return cls("vector", p**n, p=p, n=n)

    # group structure

    @property
    def is_group(self) -> bool:
        return self.kind in ("group", "vector")

    @property
    def identity(self) -> int:
        if self.kind == "group":
            return self.group.identity
        if self.kind == "vector":
            return 0
        raise NotAGroupAlphabet(f"{self!r} carries no group law")

    @cached_property
    def mul_table(self) -> np.ndarray:
        """``mul_table[a, b] = a * b`` (addition for vector alphabets)."""
        if self.kind == "group":
            return np.array(self.group.table, dtype=np.int64)
        if self.kind == "vector":
            V = self.vectors
            S = (V[:, None, :] + V[None, :, :]) % self.p
            return self.encode(S)
        raise NotAGroupAlphabet(f"{self!r} carries no group law")

    @cached_property
    def inv_table(self) -> np.ndarray:
        return np.argmax(self.mul_table == self.identity, axis=1).astype(np.int64)

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inv_table[a])

    # vector encoding

    @cached_property
    def _radix(self) -> np.ndarray:
        return self.p ** np.arange(self.n - 1, -1, -1, dtype=np.int64)

    @cached_property
    def vectors(self) -> np.ndarray:
        """Row i is the coefficient vector of letter i."""
        self._require_vector()
        return self.decode(np.arange(self.size, dtype=np.int64))

    def decode(self, letters) -> np.ndarray:
        """Letters (any shape) to coefficient vectors (shape + (n,))."""
        self._require_vector()
        L = np.asarray(letters, dtype=np.int64)
        return (L[..., None] // self._radix) % self.p

    def encode(self, vecs) -> np.ndarray:
        self._require_vector()
        V = np.asarray(vecs, dtype=np.int64) % self.p
        return (V * self._radix).sum(axis=-1)

    def vector(self, letter: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.decode(letter))

    def letter(self, vec: Sequence[int]) -> int:
        return int(self.encode(np.asarray(vec)))

    def _require_vector(self):
        if self.kind != "vector":
            raise NotAGroupAlphabet(f"{self!r} is not a vector space")

    def descriptor(self) -> dict:
        if self.kind == "set":
            return {"kind": "set", "size": self.size}
        if self.kind == "group":
            return {"kind": "group", "group": self.group.descriptor()}
        return {"kind": "vector", "p": self.p, "n": self.n}

    @classmethod
    def from_descriptor(cls, desc: Mapping) -> Alphabet:
        kind = desc.get("kind")
        if kind == "set":
            return cls.plain(int(desc["size"]))
        if kind == "group":
            G = universe_from_descriptor(desc["group"])
            if not isinstance(G, FiniteGroup):
                raise ValueError("group alphabets must be finite")
            return cls.from_group(G)
        if kind == "vector":
            return cls.vector_space(int(desc["p"]), int(desc.get("n", 1)))
        raise ValueError(f"unknown alphabet kind {kind!r}")


def pattern_index(letters: Sequence[int], size: int) -> int:
    idx = 0
    for a in letters:
        idx = idx * size + int(a)
    return idx


def pattern_letters(index: int, size: int, length: int) -> tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        index, out[i] = divmod(index, size)
    return tuple(out)


def all_patterns(size: int, length: int) -> np.ndarray:
    """All words of ``length`` letters in index order, shape (size**length, length)."""
    if size**length > TABLE_CAP:
        raise WindowTooLarge(f"{size}^{length} patterns exceed the cap")
    idx = np.arange(size**length, dtype=np.int64)
    radix = size ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // radix) % size


@dataclass(frozen=True, eq=False)
class LocalRule:
    """Local defining map ``mu: A^M -> A`` over a canonical memory set."""

    universe: GroupUniverse
    alphabet: Alphabet
    memory: FiniteSubset
    body: str  # "table" | "hom" | "linear"
    data: tuple

    def __eq__(self, other):
        return isinstance(other, LocalRule) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @cached_property
    def _key(self):
        return (self.universe, self.alphabet, self.memory.elements, self.body, self.data)

    def __repr__(self):
        return f"LocalRule({self.body}, |M|={len(self.memory)}, {self.alphabet!r})"

    def coefficient(self, g):
        """Endomorphism table or matrix attached to ``g`` (zero map if absent)."""
        if self.body == "table":
            raise TypeError("table rules have no per-site coefficients")
        if g in self.memory:
            return self.data[self.memory.index(g)]
        return _zero_coefficient(self.alphabet, self.body)

    def eval(self, pattern: Mapping | Sequence[int]) -> int:
        return eval_rule(self, pattern)

    def eval_array(self, X: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; column j of ``X`` holds letters at memory[j]."""
        X = np.asarray(X, dtype=np.int64)
        A = self.alphabet
        if self.body == "table":
            size = A.size
            idx = np.zeros(X.shape[0], dtype=np.int64)
            for j in range(X.shape[1]):
                idx = idx * size + X[:, j]
            return np.asarray(self.data, dtype=np.int64)[idx]
        if self.body == "hom":
            mul = A.mul_table
            out = np.full(X.shape[0], A.identity, dtype=np.int64)
            for j, phi in enumerate(self.data):
                out = mul[out, np.asarray(phi, dtype=np.int64)[X[:, j]]]
            return out
        V = A.decode(X)  # (N, m, n)
        mats = self.matrices
        acc = np.einsum("mij,Nmj->Ni", mats, V) % A.p
        return A.encode(acc)

    @cached_property
    def matrices(self) -> np.ndarray:
        """Stacked memory matrices, shape (|M|, n, n); linear bodies only."""
        if self.body != "linear":
            raise TypeError("only linear rules have matrices")
        n = self.alphabet.n
        return np.array(self.data, dtype=np.int64).reshape(len(self.memory), n, n)

    def table(self, cap: int = TABLE_CAP) -> tuple[int, ...]:
        if self.body == "table":
            return self.data
        m = len(self.memory)
        if self.alphabet.size**m > cap:
            raise WindowTooLarge(f"table of size {self.alphabet.size}^{m} exceeds cap {cap}")
        return tuple(int(v) for v in self.eval_array(all_patterns(self.alphabet.size, m)))

    def to_table_rule(self, cap: int = TABLE_CAP) -> LocalRule:
        return LocalRule(self.universe, self.alphabet, self.memory, "table", self.table(cap))

    def is_identity(self) -> bool:
        return self.equivalent(identity_rule(self.universe, self.alphabet))

    def equivalent(self, other: LocalRule, cap: int = TABLE_CAP) -> bool:
        """Same local map after extending both to the union of memories."""
        return self.difference_witness(other, cap) is None

    def difference_witness(self, other: LocalRule, cap: int = TABLE_CAP):
        """Lexicographically least pattern on the joint memory where the rules
        differ, as ``(memory, letters)``; None when they agree."""
        M = self.memory.union(other.memory)
        a, b = self.extend(M), other.extend(M)
        if a.body == b.body == "linear":
            D = (a.matrices - b.matrices) % a.alphabet.p
            if not D.any():
                return None
            # columns of the flattened map x -> D x; least pattern outside the kernel
            n = a.alphabet.n
            big = np.concatenate(list(D), axis=1)
            kern = ff.nullspace(big, a.alphabet.p)
            vec = ff.lexmin_outside(kern, big.shape[1], a.alphabet.p)
            letters = tuple(int(v) for v in a.alphabet.encode(vec.reshape(len(M), n)))
            return M, letters
        if a.body == b.body == "hom" and a.data == b.data:
            return None
        ta, tb = a.table(cap), b.table(cap)
        for i, (x, y) in enumerate(zip(ta, tb)):
            if x != y:
                return M, pattern_letters(i, a.alphabet.size, len(M))
        return None

    def extend(self, M: FiniteSubset) -> LocalRule:
        """Same local map viewed on a larger memory set ``M``."""
        if M.elements == self.memory.elements:
            return self
        if not self.memory.issubset(M):
            raise DomainMismatch("extension target must contain the memory set")
        if self.body == "table":
            A = self.alphabet
            if A.size ** len(M) > TABLE_CAP:
                raise WindowTooLarge("extended table exceeds the cap")
            pos = [M.index(g) for g in self.memory]
            X = all_patterns(A.size, len(M))[:, pos]
            data = tuple(int(v) for v in self.eval_array(X))
        else:
            data = tuple(self.coefficient(g) for g in M)
        return LocalRule(self.universe, self.alphabet, M, self.body, data)

    def support(self) -> list:
        """Memory elements whose coefficient is not the zero map."""
        if self.body == "table":
            raise TypeError("table rules have no per-site coefficients")
        zero = _zero_coefficient(self.alphabet, self.body)
        return [g for g, c in zip(self.memory, self.data) if c != zero]

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "alphabet": self.alphabet.descriptor(),
            "memory": self.memory.to_json(),
        }
        if self.body == "table":
            out["table"] = list(self.data)
        elif self.body == "hom":
            out["hom"] = [list(phi) for phi in self.data]
        else:
            out["linear"] = [[v for row in mat for v in row] for mat in self.data]
        return out


def _zero_coefficient(A: Alphabet, body: str):
    if body == "hom":
        return (A.identity,) * A.size
    n = A.n
    return tuple((0,) * n for _ in range(n))


def canonical_memory(G: GroupUniverse, memory: Iterable) -> FiniteSubset:
    memory = list(memory)
    return G.subset(memory + [G.inv(g) for g in memory] + [G.identity])


def eval_rule(rule: LocalRule, pattern: Mapping | Sequence[int]) -> int:
    if isinstance(pattern, Mapping):
        if set(pattern) != set(rule.memory.elements):
            raise DomainMismatch("pattern window differs from the memory set")
        letters = [pattern[g] for g in rule.memory]
    else:
        letters = list(pattern)
        if len(letters) != len(rule.memory):
            raise DomainMismatch("pattern length differs from the memory size")
    A = rule.alphabet
    if any(not 0 <= int(a) < A.size for a in letters):
        raise DomainMismatch("letter out of range")
    if rule.body == "table":
        return rule.data[pattern_index(letters, A.size)]
    if rule.body == "hom":
        out = A.identity
        for phi, a in zip(rule.data, letters):
            out = A.mul(out, phi[a])
        return out
    p = A.p
    acc = np.zeros(A.n, dtype=np.int64)
    for mat, a in zip(rule.matrices, letters):
        acc = (acc + mat @ A.decode(a)) % p
    return int(A.encode(acc))


# constructors ---------------------------------------------------------------


def table_rule(G: GroupUniverse, A: Alphabet, memory: Iterable, table: Sequence[int]) -> LocalRule:
    """Rule given by a dense table over the canonical order of ``memory``."""
    M0 = G.subset(memory)
    if A.size ** len(M0) > TABLE_CAP:
        raise WindowTooLarge(f"{A.size}^{len(M0)} table entries exceed the cap")
    table = tuple(int(v) for v in table)
    if len(table) != A.size ** len(M0):
        raise InvalidRule(f"table must have {A.size ** len(M0)} entries, got {len(table)}")
    if any(not 0 <= v < A.size for v in table):
        raise InvalidRule("table entry out of the alphabet range")
    raw = LocalRule(G, A, M0, "table", table)
    return raw.extend(canonical_memory(G, M0))


def linear_rule(G: GroupUniverse, A: Alphabet, matrices: Mapping | Iterable) -> LocalRule:
    """Rule ``sum_g M_g x(g)``; ``matrices`` maps memory elements to n x n arrays."""
    if A.kind != "vector":
        raise InvalidRule("linear rules need a vector-space alphabet")
    items = list(matrices.items() if isinstance(matrices, Mapping) else matrices)
    n, p = A.n, A.p
    acc: dict = {}
    for g, mat in items:
        M = ff.as_matrix(mat, p)
        if M.shape != (n, n):
            raise InvalidRule(f"matrix at {g!r} must be {n}x{n}")
        acc[g] = (acc[g] + M) % p if g in acc else M
    Mc = canonical_memory(G, acc)
    zero = np.zeros((n, n), dtype=np.int64)
    data = tuple(_mat_tuple(acc.get(g, zero)) for g in Mc)
    return LocalRule(G, A, Mc, "linear", data)


def _mat_tuple(M) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in np.asarray(M))


def hom_rule(G: GroupUniverse, A: Alphabet, maps: Mapping | Iterable) -> LocalRule:
    """Rule ``prod_g phi_g(x(g))``; raises InvalidRule with a witness report."""
    return validate_hom_rule(G, A, maps)


def validate_hom_rule(G: GroupUniverse, A: Alphabet, maps: Mapping | Iterable) -> LocalRule:
    if A.kind != "group":
        raise NotAGroupAlphabet(f"{A!r} is not a finite group alphabet")
    items = [(g, tuple(int(v) for v in phi)) for g, phi in (maps.items() if isinstance(maps, Mapping) else maps)]
    seen = set()
    for g, phi in items:
        if g in seen:
            raise InvalidRule(f"memory element {g!r} listed twice", {"violation": "duplicate", "element": g})
        seen.add(g)
        if len(phi) != A.size or any(not 0 <= v < A.size for v in phi):
            raise InvalidRule(f"endomorphism table at {g!r} is malformed", {"violation": "shape", "element": g})
    report = hom_rejection(A, [phi for _, phi in items], [g for g, _ in items])
    if report is not None:
        raise InvalidRule(report["message"], report)
    Mc = canonical_memory(G, [g for g, _ in items])
    given = dict(items)
    trivial = (A.identity,) * A.size
    data = tuple(given.get(g, trivial) for g in Mc)
    return LocalRule(G, A, Mc, "hom", data)


def hom_rejection(A: Alphabet, tables: Sequence[Sequence[int]], labels: Sequence | None = None) -> dict | None:
    """None when every table is an endomorphism and images commute pairwise;
    otherwise a report naming the violated identity with witnesses."""
    labels = list(labels) if labels is not None else list(range(len(tables)))
    mul = A.group.table
    n = A.size
    for g, phi in zip(labels, tables):
        for a in range(n):
            for b in range(n):
                if phi[mul[a][b]] != mul[phi[a]][phi[b]]:
                    return {
                        "message": f"phi at {g!r} is not an endomorphism",
                        "violation": "phi(ab) = phi(a)phi(b)",
                        "element": g,
                        "witness": [a, b],
                    }
    images = [sorted(set(phi)) for phi in tables]
    for i in range(len(tables)):
        for j in range(i + 1, len(tables)):
            for x in images[i]:
                for y in images[j]:
                    if mul[x][y] != mul[y][x]:
                        return {
                            "message": f"images at {labels[i]!r} and {labels[j]!r} do not commute",
                            "violation": "phi_g(a) phi_h(b) = phi_h(b) phi_g(a)",
                            "elements": [labels[i], labels[j]],
                            "witness": [x, y],
                        }
    return None


def identity_rule(G: GroupUniverse, A: Alphabet) -> LocalRule:
    return shift_rule(G, A, G.identity)


def shift_rule(G: GroupUniverse, A: Alphabet, g) -> LocalRule:
    """``tau(c)(x) = c(x g)``; in the body kind natural to the alphabet."""
    if A.kind == "vector":
        return linear_rule(G, A, {g: np.eye(A.n, dtype=np.int64)})
    if A.kind == "group":
        return validate_hom_rule(G, A, {g: tuple(range(A.size))})
    return table_rule(G, A, [g], list(range(A.size)))


# enumeration -----------------------------------------------------------------


def endomorphisms(A: Alphabet) -> list[tuple[int, ...]]:
    """All endomorphisms of a finite group alphabet, sorted as tables."""
    if A.kind != "group":
        raise NotAGroupAlphabet(f"{A!r} is not a finite group alphabet")
    return list(_endomorphisms(A.group))


_ENDO_CACHE: dict = {}


def _endomorphisms(H: FiniteGroup) -> tuple[tuple[int, ...], ...]:
    if H in _ENDO_CACHE:
        return _ENDO_CACHE[H]
    n, e, t = H.order, H.identity, H.table
    # greedy generating set
    gens: list[int] = []
    span = {e}
    for g in range(n):
        if g not in span:
            gens.append(g)
            span = _closure(H, gens)
    found = []
    for imgs in itertools.product(range(n), repeat=len(gens)):
        phi = [-1] * n
        phi[e] = e
        ok = True
        frontier = [e]
        while frontier and ok:
            nxt = []
            for a in frontier:
                for s, fs in zip(gens, imgs):
                    b = t[a][s]
                    v = t[phi[a]][fs]
                    if phi[b] == -1:
                        phi[b] = v
                        nxt.append(b)
                    elif phi[b] != v:
                        ok = False
                        break
                if not ok:
                    break
            frontier = nxt
        if ok and all(phi[t[a][b]] == t[phi[a]][phi[b]] for a in range(n) for b in range(n)):
            found.append(tuple(phi))
    out = tuple(sorted(set(found)))
    _ENDO_CACHE[H] = out
    return out


def _closure(H: FiniteGroup, gens: list[int]) -> set[int]:
    out = {H.identity}
    frontier = [H.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = H.mul(a, s)
                if b not in out:
                    out.add(b)
                    nxt.append(b)
        frontier = nxt
    return out


def enumerate_hom_rules(
    G: GroupUniverse, A: Alphabet, memory: Iterable, budget: int = 1_000_000
) -> Iterator[LocalRule]:
    """Every valid hom rule on ``memory`` (before canonicalization), in
    lexicographic order of the endomorphism tuple.

    ``budget`` bounds the number of candidate endomorphism tuples examined.
    """
    M = G.subset(memory)
    ends = endomorphisms(A)
    mul = A.group.table
    images = [sorted(set(phi)) for phi in ends]
    k = len(ends)
    commute = [
        [all(mul[x][y] == mul[y][x] for x in images[i] for y in images[j]) for j in range(k)]
        for i in range(k)
    ]
    Mc = canonical_memory(G, M)
    trivial = (A.identity,) * A.size
    examined = produced = 0
    for combo in itertools.product(range(k), repeat=len(M)):
        examined += 1
        if examined > budget:
            raise BudgetExceeded(f"enumeration budget {budget} exhausted", partial=produced)
        if all(commute[combo[i]][combo[j]] for i in range(len(combo)) for j in range(i + 1, len(combo))):
            given = {g: ends[c] for g, c in zip(M, combo)}
            data = tuple(given.get(g, trivial) for g in Mc)
            produced += 1
            yield LocalRule(G, A, Mc, "hom", data)


def random_linear_rule(G: GroupUniverse, p: int, n: int, memory: Iterable, seed: int) -> LocalRule:
    ff.require_prime(p)
    rng = random.Random(seed)
    A = Alphabet.vector_space(p, n)
    M = G.subset(memory)
    mats = {g: [[rng.randrange(p) for _ in range(n)] for _ in range(n)] for g in M}
    return linear_rule(G, A, mats)


def rule_from_json(G: GroupUniverse, data: Mapping, alphabet: Alphabet | None = None) -> LocalRule:
    A = alphabet if alphabet is not None else Alphabet.from_descriptor(data["alphabet"])
    memory = [G.element_from_json(g) for g in data["memory"]]
    bodies = [k for k in ("table", "hom", "linear") if k in data]
    if len(bodies) != 1:
        raise InvalidRule("rule needs exactly one of table / hom / linear")
    body = bodies[0]
    if body == "table":
        return table_rule(G, A, memory, data["table"])
    if len(data[body]) != len(memory):
        raise InvalidRule("one coefficient per memory element is required")
    if body == "hom":
        return validate_hom_rule(G, A, list(zip(memory, data["hom"])))
    n = A.n
    mats = []
    for g, flat in zip(memory, data["linear"]):
        if len(flat) != n * n:
            raise InvalidRule(f"matrix at {g!r} needs {n * n} entries")
        mats.append((g, np.array(flat, dtype=np.int64).reshape(n, n)))
    return linear_rule(G, A, mats)
