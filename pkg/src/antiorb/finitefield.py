"""Finite fields F_q, q = p^k with p odd, backed by lookup tables.

Elements are identified with their enumeration index ``sum c_j p^j`` where
``c_0 + c_1 t + ... + c_{k-1} t^{k-1}`` is the reduced polynomial
representative.  Index 0 is zero, index 1 is one, and the prime subfield
occupies indices ``0..p-1``.  All bulk work in the package goes through the
numpy tables held by :class:`FqField`; :class:`FqElem` is the convenient
scalar wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .cyclotomic import CycNum

# Explicit moduli for the quadratic fields that the command line exposes, so
# that enumeration order does not depend on a search.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (3, 2): (1, 0, 1),  # t^2 + 1
    (5, 2): (2, 0, 1),  # t^2 + 2
}


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def _pmod_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmod_rem(f: list[int], g: list[int], p: int) -> list[int]:
    """Remainder of f by monic g over F_p (coefficients low to high)."""
    f = _pmod_trim([c % p for c in f])
    dg = len(g) - 1
    while len(f) - 1 >= dg:
        c = f[-1]
        shift = len(f) - 1 - dg
        for j, gj in enumerate(g):
            f[shift + j] = (f[shift + j] - c * gj) % p
        f = _pmod_trim(f)
    return f


def is_irreducible_mod_p(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    k = len(poly) - 1
    if k < 1 or poly[-1] % p != 1:
        return False
    for d in range(1, k // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _pmod_rem(list(poly), list(low) + [1], p):
                return False
    return True


def find_modulus(p: int, k: int) -> tuple[int, ...]:
    if (p, k) in DEFAULT_MODULI:
        return DEFAULT_MODULI[(p, k)]
    if k == 1:
        return (0, 1)
    for low in product(range(p), repeat=k):
        cand = tuple(reversed(low)) + (1,)
        if cand[0] != 0 and is_irreducible_mod_p(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {k} over F_{p}")  # pragma: no cover


class FqField:
    """The field F_{p^k} with a fixed modulus and enumeration order."""

    def __init__(self, p: int, k: int = 1, modulus: tuple[int, ...] | list[int] | None = None):
        if not _is_prime(p) or p == 2:
            raise ValueError(f"characteristic must be an odd prime, got {p}")
        if k < 1:
            raise ValueError(f"extension degree must be positive, got {k}")
        mod = tuple(int(c) % p for c in modulus) if modulus is not None else find_modulus(p, k)
        if len(mod) != k + 1 or not is_irreducible_mod_p(mod, p):
            raise ValueError(f"modulus {list(mod)} is not monic irreducible of degree {k} over F_{p}")
        self.p = p
        self.k = k
        self.modulus = mod
        self.q = p**k
        self._build_tables()

    # -- construction -------------------------------------------------

    def coeffs(self, index: int) -> list[int]:
        return [(index // self.p**j) % self.p for j in range(self.k)]

    def from_coeffs(self, coeffs: list[int]) -> int:
        return sum((int(c) % self.p) * self.p**j for j, c in enumerate(coeffs))

    def _build_tables(self) -> None:
        p, k, q = self.p, self.k, self.q
        digits = np.array([self.coeffs(i) for i in range(q)], dtype=np.int64)
        weights = p ** np.arange(k, dtype=np.int64)
        add = (digits[:, None, :] + digits[None, :, :]) % p
        self.add = (add @ weights).astype(np.int64)
        self.neg = ((-digits) % p) @ weights
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                prod = [0] * (2 * k - 1)
                for i, ca in enumerate(digits[a]):
                    if ca:
                        for j, cb in enumerate(digits[b]):
                            prod[i + j] += int(ca) * int(cb)
                red = _pmod_rem(prod, list(self.modulus), p)
                mul[a, b] = mul[b, a] = self.from_coeffs(red)
        self.mul = mul
        self.sub = self.add[:, self.neg]
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv = inv
        # absolute trace: x + x^p + ... + x^(p^(k-1)), lands in indices 0..p-1
        trace = np.zeros(q, dtype=np.int64)
        for x in range(q):
            acc, y = 0, x
            for _ in range(k):
                acc = self.add[acc, y]
                y = self.pow(y, p)
            trace[x] = acc
        if trace.max() >= p:  # pragma: no cover - algebraic impossibility
            raise AssertionError("trace left the prime field")
        self.trace = trace
        for arr in (self.add, self.neg, self.mul, self.sub, self.inv, self.trace):
            arr.setflags(write=False)

    # -- scalar helpers on indices -------------------------------------

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            if a == 0:
                raise ZeroDivisionError("0 has no inverse in F_q")
            a, n = int(self.inv[a]), -n
        result, base = 1, a
        while n:
            if n & 1:
                result = int(self.mul[result, base])
            base = int(self.mul[base, base])
            n >>= 1
        return result

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("0 has no multiplicative order")
        n, x = 1, a
        while x != 1:
            x = int(self.mul[x, a])
            n += 1
        return n

    @cached_property
    def primitive_root(self) -> int:
        """Smallest index generating F_q^*."""
        return next(a for a in range(1, self.q) if self.mult_order(a) == self.q - 1)

    @cached_property
    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=np.int64)

    def elem(self, index: int) -> FqElem:
        if not 0 <= index < self.q:
            raise ValueError(f"index {index} outside F_{self.q}")
        return FqElem(self, int(index))

    def elements(self) -> list[FqElem]:
        return [FqElem(self, i) for i in range(self.q)]

    def from_int(self, n: int) -> int:
        """Index of the image of an integer in the prime subfield."""
        return n % self.p

    def psi(self, index: int) -> CycNum:
        return CycNum.zeta(self.p, int(self.trace[index]))

    # -- identity -----------------------------------------------------

    def key(self) -> tuple[int, int, tuple[int, ...]]:
        return (self.p, self.k, self.modulus)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FqField) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"FqField(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> FqField:
        return get_field(int(data["p"]), int(data["k"]), tuple(data["modulus"]))


_FIELD_CACHE: dict[tuple, FqField] = {}


def get_field(p: int, k: int = 1, modulus: tuple[int, ...] | None = None) -> FqField:
    """Cached field constructor; tables are built once per modulus."""
    key = (p, k, tuple(modulus) if modulus is not None else None)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FqField(p, k, modulus)
    return _FIELD_CACHE[key]


def field_of_order(q: int) -> FqField:
    """Field with q elements using the default modulus."""
    for p in range(3, q + 1, 2):
        if _is_prime(p):
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r == 1 and k >= 1:
                return get_field(p, k)
            if k:
                break
    raise ValueError(f"{q} is not a power of an odd prime")


@dataclass(frozen=True)
class FqElem:
    """Element of F_q stored by its enumeration index."""

    field: FqField
    index: int

    def _check(self, other: FqElem) -> None:
        if not isinstance(other, FqElem):
            raise TypeError(f"expected FqElem, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError("elements belong to different fields")

    def __add__(self, other: FqElem) -> FqElem:
        self._check(other)
        return FqElem(self.field, int(self.field.add[self.index, other.index]))

    def __sub__(self, other: FqElem) -> FqElem:
        self._check(other)
        return FqElem(self.field, int(self.field.sub[self.index, other.index]))

    def __neg__(self) -> FqElem:
        return FqElem(self.field, int(self.field.neg[self.index]))

    def __mul__(self, other: FqElem) -> FqElem:
        self._check(other)
        return FqElem(self.field, int(self.field.mul[self.index, other.index]))

    def inv(self) -> FqElem:
        if self.index == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        return FqElem(self.field, int(self.field.inv[self.index]))

    def __truediv__(self, other: FqElem) -> FqElem:
        return self * other.inv()

    def __pow__(self, n: int) -> FqElem:
        return FqElem(self.field, self.field.pow(self.index, n))

    def trace(self) -> int:
        return int(self.field.trace[self.index])

    def coeffs(self) -> list[int]:
        return self.field.coeffs(self.index)

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"FqElem({self.index} in F_{self.field.q})"


def fq_arith(a: FqElem, b: FqElem | int | None, op: str) -> FqElem:
    """Dispatch helper mirroring the command-line vocabulary."""
    if op == "inv":
        return a.inv()
    if op == "pow":
        if not isinstance(b, int):
            raise TypeError("pow expects an integer exponent")
        return a**b
    if not isinstance(b, FqElem):
        raise TypeError(f"{op} expects two field elements")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def additive_character(x: FqElem) -> CycNum:
    """psi(x) = zeta_p ** Tr(x)."""
    return x.field.psi(x.index)
