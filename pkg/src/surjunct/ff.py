"""Dense linear algebra over prime fields F_p on numpy int64 arrays.

Every routine uses a fixed pivoting rule (first nonzero entry scanning down
the column), so results are reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

from .errors import NotPrime


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def require_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    return pow(int(a), p - 2, p)


def as_matrix(A, p: int, ncols: int | None = None) -> np.ndarray:
    M = np.asarray(A, dtype=np.int64)
    if M.size == 0:
        return M.reshape(0, ncols if ncols is not None else 0)
    return M % p


def rref(A, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    R = as_matrix(A, p).copy()
    if R.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * inv_mod(int(R[r, c]), p)) % p
        col = R[:, c].copy()
        col[r] = 0
        if col.any():
            R -= np.outer(col, R[r])
            R %= p
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(A, p: int) -> int:
    M = as_matrix(A, p)
    if M.size == 0:
        return 0
    return len(rref(M, p)[1])


def nullspace(A, p: int) -> np.ndarray:
    """Basis (as rows, in RREF) of ``{x : A x = 0}``."""
    A = as_matrix(A, p)
    ncols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    R, piv = rref(A, p)
    free = [j for j in range(ncols) if j not in set(piv)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, c in enumerate(piv):
            basis[i, c] = (-R[r, f]) % p
    if basis.shape[0]:
        basis, _ = rref(basis, p)
    return basis


def solve_lexmin(A, b, p: int) -> np.ndarray | None:
    """Lexicographically least ``x`` in F_p^n with ``A x = b``, or None.

    Eliminating on reversed columns expresses every pivot variable through
    free variables of smaller index, so zeroing the free variables yields the
    lexicographic minimum.
    """
    A = as_matrix(A, p)
    b = as_matrix(b, p).reshape(-1)
    m, n = A.shape
    if m == 0:
        return np.zeros(n, dtype=np.int64)
    aug = np.concatenate([A[:, ::-1], b[:, None]], axis=1)
    R, piv = rref(aug, p)
    if n in piv:
        return None
    y = np.zeros(n, dtype=np.int64)
    for r, c in enumerate(piv):
        y[c] = R[r, n]
    return y[::-1].copy()


def solve_matrix_lexmin(A, B, p: int) -> np.ndarray | None:
    """Lexicographically least X (row-major) with ``X A = B``, or None."""
    A = as_matrix(A, p)
    B = as_matrix(B, p)
    # X A = B  <=>  A^T x_i = b_i for each row i; rows are independent unknown blocks
    out = []
    for row in B:
        x = solve_lexmin(A.T, row, p)
        if x is None:
            return None
        out.append(x)
    return np.array(out, dtype=np.int64).reshape(B.shape[0], A.shape[0])


def in_rowspace(v, basis, p: int) -> bool:
    basis = as_matrix(basis, p)
    if basis.size == 0:
        return not np.any(as_matrix(v, p))
    return rank(np.vstack([basis, as_matrix(v, p)[None, :]]), p) == rank(basis, p)


def lexmin_outside(basis, n: int, p: int) -> np.ndarray | None:
    """Lexicographically least vector of F_p^n not in the row space of ``basis``.

    Ordering F_p^n lexicographically, every vector supported after position k
    precedes those with a nonzero entry at k; so the answer is the unit vector
    at the largest k whose unit vector lies outside the subspace.
    """
    basis = as_matrix(basis, p, n).reshape(-1, n)
    r0 = rank(basis, p) if basis.size else 0
    if r0 == n:
        return None
    for k in range(n - 1, -1, -1):
        e = np.zeros(n, dtype=np.int64)
        e[k] = 1
        if basis.size == 0 or rank(np.vstack([basis, e[None, :]]), p) > r0:
            return e
    return None  # pragma: no cover


def lexmin_nonzero_on(basis, coords, p: int) -> np.ndarray | None:
    """Lexicographically least x in span(basis) with x[coords] != 0."""
    basis = as_matrix(basis, p)
    if basis.size == 0:
        return None
    B, _ = rref(basis, p)
    coords = list(coords)
    proj = B[:, coords]
    if not proj.any():
        return None
    # in RREF the coefficient of row j is the entry at its pivot, and the
    # lexicographic order of x matches the lexicographic order of coefficients
    x = np.zeros(B.shape[1], dtype=np.int64)
    k = B.shape[0]
    for j in range(k):
        later_nonzero = proj[j + 1 :].any()
        for c in range(p):
            cand = (x + c * B[j]) % p
            if later_nonzero or cand[coords].any():
                x = cand
                break
    return x


def mat_inverse(A, p: int) -> np.ndarray | None:
    A = as_matrix(A, p)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    R, piv = rref(np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        return None
    return R[:, n:].copy()
