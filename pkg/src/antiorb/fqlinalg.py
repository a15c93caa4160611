"""Polynomials and matrices over F_q, with entries stored as field indices.

Small matrices (a handful of rows) are handled in pure Python for clarity;
batched products over many points use the numpy lookup tables of the field.
Polynomials are tuples of indices, lowest degree first, with no trailing
zeros (the zero polynomial is the empty tuple).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .finitefield import FqField

Poly = tuple[int, ...]
Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# polynomials


def poly_trim(f) -> Poly:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return tuple(int(c) for c in f)


def poly_add(F: FqField, f: Poly, g: Poly) -> Poly:
    n = max(len(f), len(g))
    f = list(f) + [0] * (n - len(f))
    g = list(g) + [0] * (n - len(g))
    return poly_trim(int(F.add[a, b]) for a, b in zip(f, g))


def poly_mul(F: FqField, f: Poly, g: Poly) -> Poly:
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = int(F.add[out[i + j], F.mul[a, b]])
    return poly_trim(out)


def poly_pow(F: FqField, f: Poly, n: int) -> Poly:
    out: Poly = (1,)
    for _ in range(n):
        out = poly_mul(F, out, f)
    return out


def poly_divmod(F: FqField, f: Poly, g: Poly) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    lead_inv = int(F.inv[g[-1]])
    quo = [0] * max(len(f) - dg, 0)
    while len(r) - 1 >= dg and r:
        c = int(F.mul[r[-1], lead_inv])
        shift = len(r) - 1 - dg
        quo[shift] = c
        for j, gj in enumerate(g):
            r[shift + j] = int(F.sub[r[shift + j], F.mul[c, gj]])
        r = list(poly_trim(r))
    return poly_trim(quo), poly_trim(r)


def poly_monic(F: FqField, f: Poly) -> Poly:
    inv = int(F.inv[f[-1]])
    return tuple(int(F.mul[c, inv]) for c in f)


def poly_str(F: FqField, f: Poly) -> str:
    """Human-readable form; coefficients print as field indices."""
    if not f:
        return "0"
    terms = []
    for d in range(len(f) - 1, -1, -1):
        c = f[d]
        if c == 0:
            continue
        mon = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
        if not mon:
            terms.append(str(c))
        else:
            terms.append(mon if c == 1 else f"{c}*{mon}")
    return " + ".join(terms)


@lru_cache(maxsize=None)
def monic_irreducibles(F: FqField, degree: int) -> tuple[Poly, ...]:
    """All monic irreducible polynomials of the given degree, sieved by trial division."""
    if degree < 1:
        return ()
    smaller = [g for d in range(1, degree // 2 + 1) for g in monic_irreducibles(F, d)]
    out = []
    for low in product(range(F.q), repeat=degree):
        f = tuple(low) + (1,)
        if all(poly_divmod(F, f, g)[1] for g in smaller):
            out.append(f)
    return tuple(out)


def factor(F: FqField, f: Poly) -> list[tuple[Poly, int]]:
    """Factor a monic polynomial into (monic irreducible, multiplicity) pairs, sorted."""
    f = poly_trim(f)
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    if f[-1] != 1:
        f = poly_monic(F, f)
    out: list[tuple[Poly, int]] = []
    d = 1
    while len(f) - 1 >= 2 * d:
        for g in monic_irreducibles(F, d):
            e = 0
            while True:
                quo, rem = poly_divmod(F, f, g)
                if rem:
                    break
                f, e = quo, e + 1
            if e:
                out.append((g, e))
        d += 1
    if len(f) > 1:
        # what remains has no factor of degree <= deg/2, hence is irreducible
        out.append((f, 1))
    return sorted(out)


# ---------------------------------------------------------------------------
# small matrices


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(F: FqField, A: Matrix, B: Matrix) -> Matrix:
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = zeros(len(A), cols)
    for i, row in enumerate(A):
        for k in range(inner):
            a = row[k]
            if a:
                bk = B[k]
                for j in range(cols):
                    if bk[j]:
                        out[i][j] = int(F.add[out[i][j], F.mul[a, bk[j]]])
    return out


def mat_add(F: FqField, A: Matrix, B: Matrix) -> Matrix:
    return [[int(F.add[a, b]) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(F: FqField, c: int, A: Matrix) -> Matrix:
    return [[int(F.mul[c, a]) for a in row] for row in A]


def rref(F: FqField, A: Matrix) -> tuple[Matrix, list[int]]:
    mat = [list(r) for r in A]
    ncols = len(mat[0]) if mat else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = int(F.inv[mat[r][c]])
        mat[r] = [int(F.mul[inv, v]) for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [int(F.sub[a, F.mul[f, b]]) for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def rank(F: FqField, A: Matrix) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(F, A)[1])


def kernel(F: FqField, A: Matrix, ncols: int | None = None) -> list[list[int]]:
    """Basis vectors of {v : A v = 0}."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    red, pivots = rref(F, A)
    basis = []
    for f in (c for c in range(n) if c not in pivots):
        v = [0] * n
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = int(F.neg[row[f]])
        basis.append(v)
    return basis


def inverse(F: FqField, A: Matrix) -> Matrix:
    n = len(A)
    aug = [list(row) + idrow for row, idrow in zip(A, identity(n))]
    red, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red[:n]]


def charpoly(F: FqField, A: Matrix) -> Poly:
    """Characteristic polynomial det(xI - A) by the division-free Berkowitz scheme."""
    n = len(A)
    if n == 0:
        return (1,)
    # coefficients stored highest degree first during the recursion
    C = [1, int(F.neg[A[0][0]])]
    for r in range(1, n):
        S = [[A[i][r]] for i in range(r)]
        R = [A[r][:r]]
        Ar = [row[:r] for row in A[:r]]
        T = [1, int(F.neg[A[r][r]])]
        v = S
        for _ in range(r):
            T.append(int(F.neg[mat_mul(F, R, v)[0][0]]))
            v = mat_mul(F, Ar, v)
        new = []
        for i in range(r + 2):
            acc = 0
            for j in range(min(i, r) + 1):
                if i - j < len(T):
                    acc = int(F.add[acc, F.mul[T[i - j], C[j]]])
            new.append(acc)
        C = new
    return poly_trim(reversed(C))


def poly_eval_matrix(F: FqField, f: Poly, A: Matrix) -> Matrix:
    n = len(A)
    out = zeros(n, n)
    for c in reversed(f):
        out = mat_add(F, mat_mul(F, out, A), mat_scale(F, c, identity(n)))
    return out


def companion(F: FqField, f: Poly) -> Matrix:
    """Companion matrix of a monic polynomial; its characteristic polynomial is f."""
    n = len(f) - 1
    C = zeros(n, n)
    for i in range(1, n):
        C[i][i - 1] = 1
    for i in range(n):
        C[i][n - 1] = int(F.neg[f[i]])
    return C


def is_zero(A: Matrix) -> bool:
    return not any(any(row) for row in A)


# ---------------------------------------------------------------------------
# batched numpy kernels


def batch_matmul(F: FqField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix product over F_q broadcasting over leading axes."""
    r, s = A.shape[-2:]
    s2, t = B.shape[-2:]
    if s != s2:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    lead = np.broadcast_shapes(A.shape[:-2], B.shape[:-2])
    out = np.zeros(lead + (r, t), dtype=np.int64)
    for k in range(s):
        out = F.add[out, F.mul[A[..., :, k : k + 1], B[..., k : k + 1, :]]]
    return out


def batch_is_zero(A: np.ndarray) -> np.ndarray:
    return ~A.reshape(A.shape[:-2] + (-1,)).any(axis=-1)


def batch_power(F: FqField, A: np.ndarray, n: int) -> np.ndarray:
    d = A.shape[-1]
    result = np.broadcast_to(np.eye(d, dtype=np.int64), A.shape).copy()
    for _ in range(n):
        result = batch_matmul(F, result, A)
    return result
