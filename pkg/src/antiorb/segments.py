"""Combinatorics of segments on a cyclic quiver with m vertices.

A segment class is determined by a start vertex ``a`` in ``[0, m-1]`` and a
length ``len >= 1``; it covers the vertices ``a, a+1, ..., a+len-1`` taken mod
m.  A multisegment is a finitely supported multiplicity function on segment
classes, and a :class:`PartitionMult` records a partition by the number of
parts of each size.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True, order=True)
class SegmentClass:
    m: int
    a: int
    len: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.len < 1:
            raise ValueError(f"invalid segment (m={self.m}, len={self.len})")
        if not 0 <= self.a < self.m:
            object.__setattr__(self, "a", self.a % self.m)

    def dims(self) -> tuple[int, ...]:
        out = [0] * self.m
        for j in range(self.len):
            out[(self.a + j) % self.m] += 1
        return tuple(out)

    @property
    def end(self) -> int:
        """Last vertex as an integer, so the class is the orbit of (a, end)."""
        return self.a + self.len - 1

    def to_json(self) -> list[int]:
        return [self.a, self.len]

    def __str__(self) -> str:
        return f"[{self.a},{self.end}]"


@dataclass(frozen=True)
class Multisegment:
    """Sorted association list ((segment, multiplicity), ...) with positive multiplicities."""

    m: int
    items: tuple[tuple[SegmentClass, int], ...] = ()

    @classmethod
    def from_counts(cls, m: int, counts: dict[SegmentClass, int] | Iterable[tuple[SegmentClass, int]]) -> Multisegment:
        acc: Counter[SegmentClass] = Counter()
        pairs = counts.items() if isinstance(counts, dict) else counts
        for seg, mult in pairs:
            if seg.m != m:
                raise ValueError(f"segment {seg} lives on a different quiver")
            if mult < 0:
                raise ValueError("multiplicities must be non-negative")
            acc[seg] += mult
        return cls(m, tuple(sorted((s, c) for s, c in acc.items() if c)))

    @classmethod
    def from_list(cls, m: int, triples: Iterable[Sequence[int]]) -> Multisegment:
        return cls.from_counts(m, [(SegmentClass(m, a, ln), mult) for a, ln, mult in triples])

    def mult(self, seg: SegmentClass) -> int:
        return dict(self.items).get(seg, 0)

    def dims(self) -> tuple[int, ...]:
        out = [0] * self.m
        for seg, c in self.items:
            for i, d in enumerate(seg.dims()):
                out[i] += c * d
        return tuple(out)

    def __add__(self, other: Multisegment) -> Multisegment:
        return Multisegment.from_counts(self.m, list(self.items) + list(other.items))

    def is_zero(self) -> bool:
        return not self.items

    def to_json(self) -> list[list[int]]:
        return [[s.a, s.len, c] for s, c in self.items]

    @classmethod
    def from_json(cls, m: int, data: Sequence[Sequence[int]]) -> Multisegment:
        return cls.from_list(m, data)

    def __str__(self) -> str:
        if not self.items:
            return "0"
        return " + ".join(str(s) if c == 1 else f"{c}*{s}" for s, c in self.items)


@dataclass(frozen=True)
class PartitionMult:
    """Partition stored as sorted (part size, number of parts) pairs."""

    items: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: dict[int, int]) -> PartitionMult:
        for n, c in counts.items():
            if n < 1 or c < 0:
                raise ValueError(f"invalid partition entry {n}:{c}")
        return cls(tuple(sorted((int(n), int(c)) for n, c in counts.items() if c)))

    @classmethod
    def from_parts(cls, parts: Iterable[int]) -> PartitionMult:
        return cls.from_counts(dict(Counter(parts)))

    def size(self) -> int:
        """The weight sum of n * rho(n)."""
        return sum(n * c for n, c in self.items)

    def parts(self) -> list[int]:
        """Parts in weakly decreasing order."""
        return [n for n, c in sorted(self.items, reverse=True) for _ in range(c)]

    def get(self, n: int) -> int:
        return dict(self.items).get(n, 0)

    def to_json(self) -> dict[str, int]:
        return {str(n): c for n, c in self.items}

    @classmethod
    def from_json(cls, data: dict) -> PartitionMult:
        return cls.from_counts({int(n): int(c) for n, c in data.items()})


@dataclass(frozen=True)
class HatPair:
    sigma: Multisegment
    rho: PartitionMult

    def dims(self) -> tuple[int, ...]:
        t = self.rho.size()
        return tuple(d + t for d in self.sigma.dims())


def segments_of_length(m: int, length: int) -> list[SegmentClass]:
    return [SegmentClass(m, a, length) for a in range(m)]


def is_aperiodic(sigma: Multisegment) -> bool:
    """For every length, some rotation class of that length is missing."""
    lengths = {s.len for s, _ in sigma.items}
    return all(any(sigma.mult(s) == 0 for s in segments_of_length(sigma.m, ln)) for ln in lengths)


def hat_bijection(tilde: Multisegment) -> HatPair:
    """Split off full rotation families; their common count goes to rho at that length."""
    m = tilde.m
    rho: dict[int, int] = {}
    counts = dict(tilde.items)
    for ln in sorted({s.len for s in counts}):
        family = segments_of_length(m, ln)
        r = min(counts.get(s, 0) for s in family)
        if r:
            rho[ln] = r
            for s in family:
                counts[s] -= r
    return HatPair(Multisegment.from_counts(m, counts), PartitionMult.from_counts(rho))


def hat_unbijection(pair: HatPair) -> Multisegment:
    m = pair.sigma.m
    extra = [(s, c) for ln, c in pair.rho.items for s in segments_of_length(m, ln)]
    return Multisegment.from_counts(m, list(pair.sigma.items) + extra)


def _all_segments(m: int, nu: Sequence[int]) -> list[SegmentClass]:
    """Segment classes that fit inside the dimension vector nu."""
    out = []
    for a in range(m):
        ln = 1
        while True:
            seg = SegmentClass(m, a, ln)
            if any(d > n for d, n in zip(seg.dims(), nu)):
                break
            out.append(seg)
            ln += 1
    return sorted(out)


def enumerate_multisegments(m: int, nu: Sequence[int]) -> list[Multisegment]:
    """All multisegments with dimension vector nu, without repetition."""
    nu = tuple(nu)
    if len(nu) != m:
        raise ValueError(f"dimension vector {nu} has length {len(nu)}, expected {m}")
    segs = _all_segments(m, nu)

    def rec(i: int, remaining: tuple[int, ...]) -> Iterator[list[tuple[SegmentClass, int]]]:
        if not any(remaining):
            yield []
            return
        if i == len(segs):
            return
        seg = segs[i]
        d = seg.dims()
        c = 0
        rem = remaining
        while all(r >= 0 for r in rem):
            for tail in rec(i + 1, rem):
                yield ([(seg, c)] if c else []) + tail
            c += 1
            rem = tuple(r - x for r, x in zip(rem, d))

    return sorted(
        (Multisegment.from_counts(m, items) for items in rec(0, nu)),
        key=lambda s: s.to_json(),
    )


def count_P(m: int, nu: Sequence[int]) -> int:
    return len(enumerate_multisegments(m, nu))


def count_Pap(m: int, nu: Sequence[int]) -> int:
    return sum(is_aperiodic(s) for s in enumerate_multisegments(m, nu))


@lru_cache(maxsize=None)
def partitions(n: int, max_part: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Partitions of n as weakly decreasing tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partition_mults(n: int) -> list[PartitionMult]:
    return [PartitionMult.from_parts(p) for p in partitions(n)]


def hook_dim(rho: PartitionMult) -> int:
    """Dimension of the irreducible symmetric-group representation, by the hook length formula."""
    shape = rho.parts()
    n = sum(shape)
    if n == 0:
        return 1
    conj = [sum(1 for r in shape if r > j) for j in range(shape[0])]
    hooks = prod(shape[i] - j + conj[j] - i - 1 for i in range(len(shape)) for j in range(shape[i]))
    return factorial(n) // hooks


def rank_formula(nonzero_parts: Sequence[PartitionMult], zero_part: PartitionMult, m: int) -> int:
    """z! / prod(|pi|!) * m^(z - |pi_0|) * prod N_pi over all parts, zero part included.

    Here z is the total size of every part, the zero part counted too, which makes
    the exponent of m the total size of the nonzero parts.
    """
    allparts = list(nonzero_parts) + [zero_part]
    z = sum(pi.size() for pi in allparts)
    denom = prod(factorial(pi.size()) for pi in allparts)
    num = factorial(z) * m ** (z - zero_part.size()) * prod(hook_dim(pi) for pi in allparts)
    if num % denom:
        raise ArithmeticError("rank formula produced a non-integer")  # pragma: no cover
    return num // denom
