"""Exact arithmetic in Z[zeta_p] and Q(zeta_p) for an odd prime p.

A value is stored by its coefficients on 1, zeta, ..., zeta^(p-2); the
coefficient of zeta^(p-1) is always eliminated through
zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)).

Besides the scalar type :class:`CycNum` this module carries the vectorised
helpers used by function tables: an integer array whose last axis has length
``p`` is a batch of elements of Z[zeta_p] in *full* (non-canonical) form, where
multiplication by zeta^t is a cyclic roll.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

Rational = int | Fraction


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % d for d in range(3, int(p**0.5) + 1, 2))


def _reduce_full(p: int, full: Sequence[Rational]) -> tuple[Fraction, ...]:
    top = full[p - 1]
    return tuple(Fraction(full[j]) - top for j in range(p - 1))


class CycNum:
    """Element of the cyclotomic field Q(zeta_p) in canonical form."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[Rational] = ()):
        if not _is_odd_prime(p):
            raise ValueError(f"cyclotomic order must be an odd prime, got {p}")
        c = list(coeffs)
        if len(c) > p:
            # fold higher powers, zeta^p = 1
            folded = [Fraction(0)] * p
            for j, v in enumerate(c):
                folded[j % p] += v
            c = folded
        if len(c) == p:
            self.coeffs = _reduce_full(p, c)
        else:
            c = c + [0] * (p - 1 - len(c))
            self.coeffs = tuple(Fraction(v) for v in c)
        self.p = p

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> CycNum:
        return cls(p)

    @classmethod
    def one(cls, p: int) -> CycNum:
        return cls(p, [1])

    @classmethod
    def from_int(cls, p: int, n: Rational) -> CycNum:
        return cls(p, [n])

    @classmethod
    def zeta(cls, p: int, j: int = 1) -> CycNum:
        full = [0] * p
        full[j % p] = 1
        return cls(p, full)

    # -- basic protocol -----------------------------------------------

    def full(self) -> list[Fraction]:
        """Coefficients on zeta^0..zeta^(p-1), last one zero."""
        return list(self.coeffs) + [Fraction(0)]

    def _coerce(self, other: object) -> CycNum:
        if isinstance(other, CycNum):
            if other.p != self.p:
                raise ValueError(f"mismatched cyclotomic orders {self.p} and {other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum(self.p, [other])
        raise TypeError(f"cannot combine CycNum with {type(other).__name__}")

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNum(self.p, [other])
        if not isinstance(other, CycNum):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __repr__(self) -> str:
        return f"CycNum({self.p}, {[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if j == 0:
                terms.append(str(c))
            else:
                mon = "z" if j == 1 else f"z^{j}"
                terms.append(mon if c == 1 else f"-{mon}" if c == -1 else f"{c}*{mon}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: object) -> CycNum:
        o = self._coerce(other)
        return CycNum(self.p, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum(self.p, [-a for a in self.coeffs])

    def __sub__(self, other: object) -> CycNum:
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> CycNum:
        return self._coerce(other) - self

    def __mul__(self, other: object) -> CycNum:
        if isinstance(other, (int, Fraction)):
            return CycNum(self.p, [a * other for a in self.coeffs])
        o = self._coerce(other)
        p = self.p
        acc = [Fraction(0)] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        acc[(i + j) % p] += a * b
        return CycNum(p, acc)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> CycNum:
        o = self._coerce(other)
        if not o:
            raise ZeroDivisionError("division by zero in Q(zeta_p)")
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> CycNum:
        return self._coerce(other) / self

    def __pow__(self, n: int) -> CycNum:
        if n < 0:
            return self.inverse() ** (-n)
        result = CycNum.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- Galois structure ---------------------------------------------

    def galois(self, k: int) -> CycNum:
        """Apply the automorphism zeta -> zeta^k, k prime to p."""
        if k % self.p == 0:
            raise ValueError("Galois exponent must be prime to p")
        acc = [Fraction(0)] * self.p
        for j, c in enumerate(self.coeffs):
            acc[(j * k) % self.p] += c
        return CycNum(self.p, acc)

    def conj(self) -> CycNum:
        return self.galois(-1)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def norm(self) -> Fraction:
        return reduce(lambda a, b: a * b, (self.galois(k) for k in range(1, self.p))).rational()

    def inverse(self) -> CycNum:
        if not self:
            raise ZeroDivisionError("zero has no inverse in Q(zeta_p)")
        others = CycNum.one(self.p)
        for k in range(2, self.p):
            others = others * self.galois(k)
        n = (self * others).rational()
        return others * (1 / n)

    def embed_complex(self, root_index: int = 1) -> complex:
        """Numerical value under zeta -> exp(2 pi i root_index / p).

        Only for inequalities; equality is decided on coefficients.
        """
        if not 1 <= root_index <= self.p - 1:
            raise ValueError(f"root_index must lie in [1, {self.p - 1}], got {root_index}")
        w = cmath.exp(2j * cmath.pi * root_index / self.p)
        return sum((float(c) * w**j for j, c in enumerate(self.coeffs)), 0j)

    # -- serialisation ------------------------------------------------

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_json(cls, p: int, data: Sequence[str]) -> CycNum:
        if len(data) != p - 1:
            raise ValueError(f"expected {p - 1} coefficients, got {len(data)}")
        return cls(p, [Fraction(s) for s in data])


def cyc_arith(a: CycNum, b: CycNum, op: str) -> CycNum:
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    if a.p != b.p:
        raise ValueError(f"mismatched cyclotomic orders {a.p} and {b.p}")
    return ops[op]()


def embed_complex(a: CycNum, root_index: int) -> complex:
    return a.embed_complex(root_index)


# ---------------------------------------------------------------------------
# batched integer elements of Z[zeta_p]


def lift(canon: np.ndarray) -> np.ndarray:
    """Canonical (..., p-1) array to full (..., p) form."""
    pad = np.zeros(canon.shape[:-1] + (1,), dtype=canon.dtype)
    return np.concatenate([canon, pad], axis=-1)


def canon(full: np.ndarray) -> np.ndarray:
    """Full (..., p) array to canonical (..., p-1) form."""
    return full[..., :-1] - full[..., -1:]


def full_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of full-form arrays (broadcasting over leading axes)."""
    p = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    for t in range(p):
        bt = b[..., t : t + 1]
        if np.any(bt):
            out += np.roll(a, t, axis=-1) * bt
    return out


def array_to_cyc(p: int, row: np.ndarray) -> CycNum:
    return CycNum(p, [int(v) for v in row])


def cyc_to_array(x: CycNum) -> np.ndarray:
    """Canonical integer row of an element of Z[zeta_p]."""
    if any(c.denominator != 1 for c in x.coeffs):
        raise ValueError(f"{x} is not integral")
    return np.array([int(c) for c in x.coeffs], dtype=np.int64)


def cyc_to_fraction_poly(x: CycNum) -> tuple[np.ndarray, int]:
    """Write x = num / den with num an integer canonical row."""
    den = 1
    for c in x.coeffs:
        den = den * c.denominator // np.gcd(den, c.denominator)
    num = np.array([int(c * den) for c in x.coeffs], dtype=object)
    return num, int(den)


# ---------------------------------------------------------------------------
# linear algebra over Q(zeta_p)


def rref(rows: Sequence[Sequence[CycNum]], ncols: int) -> tuple[list[list[CycNum]], list[int]]:
    """Reduced row echelon form by exact Gaussian elimination."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][c].inverse()
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def nullspace(rows: Sequence[Sequence[CycNum]], ncols: int, p: int) -> list[list[CycNum]]:
    """Basis of {a : rows . a = 0} over Q(zeta_p)."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [CycNum.zero(p) for _ in range(ncols)]
        vec[f] = CycNum.one(p)
        for row, pc in zip(red, pivots):
            vec[pc] = -row[f]
        basis.append(vec)
    return basis
