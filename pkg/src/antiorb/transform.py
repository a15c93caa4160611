"""Dense function tables and the finite Fourier transform.

A :class:`FuncTable` stores one value of Z[zeta_p] per point of a
coordinatised space F_q^N, as an integer array of shape ``(q^N, p-1)`` in
canonical form.  The transform is unnormalised,

    fhat(y) = sum_x psi(kappa(x, y)) f(x),   kappa(x, y) = sum_j c_j x_j y_{pi(j)},

and the omitted factor q^{-N/2} is recorded in ``norm_exponent`` (in units of
q^{-1/2}).  The kernel makes one pass per coordinate, each pass replacing the
q values along a line by their one-variable character sums.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .actions import check_budget, coords_to_index, point_coords
from .cyclotomic import CycNum, array_to_cyc, canon, cyc_to_array, full_mul, lift
from .finitefield import FqElem, FqField
from .quiver import GradedDims

MAGIC = b"AORB1"
_SAFE = 2**62


def _tag(t) -> tuple | str | int:
    return tuple(_tag(x) for x in t) if isinstance(t, (list, tuple)) else t


@dataclass(frozen=True, eq=False)
class SpaceDescriptor:
    """Coordinates of a space, of its dual, and the bilinear pairing between them."""

    field: FqField
    coords: tuple
    dual_coords: tuple
    pairing_perm: tuple[int, ...]
    pairing_coeffs: tuple[int, ...]
    meta: dict = field(default_factory=dict)
    dual_meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.coords)
        if len(self.dual_coords) != n or sorted(self.pairing_perm) != list(range(n)):
            raise ValueError("pairing must match coordinates one to one")
        if len(self.pairing_coeffs) != n or any(not 0 < c < self.field.q for c in self.pairing_coeffs):
            raise ValueError("pairing coefficients must be nonzero field elements")

    @property
    def N(self) -> int:
        return len(self.coords)

    @property
    def size(self) -> int:
        return self.field.q**self.N

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpaceDescriptor):
            return NotImplemented
        return self.to_json() == other.to_json()

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "coords": [list(c) if isinstance(c, tuple) else c for c in self.coords],
            "dual_coords": [list(c) if isinstance(c, tuple) else c for c in self.dual_coords],
            "pairing_perm": list(self.pairing_perm),
            "pairing_coeffs": list(self.pairing_coeffs),
            "meta": self.meta,
            "dual_meta": self.dual_meta,
        }

    @classmethod
    def from_json(cls, data: dict) -> SpaceDescriptor:
        return cls(
            FqField.from_json(data["field"]),
            tuple(_tag(c) for c in data["coords"]),
            tuple(_tag(c) for c in data["dual_coords"]),
            tuple(data["pairing_perm"]),
            tuple(data["pairing_coeffs"]),
            dict(data.get("meta", {})),
            dict(data.get("dual_meta", {})),
        )


def quiver_space(F: FqField, dims: GradedDims, eps: int) -> SpaceDescriptor:
    """E^eps_V paired with E^{-eps}_V by the trace form tr(T T')."""
    coords = dims.coords(eps)
    dual = dims.coords(-eps)
    pos = {t: j for j, t in enumerate(dual)}
    perm = tuple(pos[((i + eps) % dims.m, c, r)] for i, r, c in coords)
    meta = {"kind": "quiver", "m": dims.m, "dims": list(dims.dims), "eps": eps}
    dual_meta = dict(meta, eps=-eps)
    return SpaceDescriptor(F, tuple(coords), tuple(dual), perm, (1,) * len(coords), meta, dual_meta)


def product_space(spaces: Sequence[SpaceDescriptor]) -> SpaceDescriptor:
    """Cartesian product; the first factor supplies the lowest coordinates."""
    F = spaces[0].field
    coords, dual, perm, coeffs = [], [], [], []
    off = 0
    for k, s in enumerate(spaces):
        if s.field != F:
            raise ValueError("all factors must share the field")
        coords += [(k, t) for t in s.coords]
        dual += [(k, t) for t in s.dual_coords]
        perm += [off + p for p in s.pairing_perm]
        coeffs += list(s.pairing_coeffs)
        off += s.N
    meta = {"kind": "product", "factors": [s.meta for s in spaces]}
    dual_meta = {"kind": "product", "factors": [s.dual_meta for s in spaces]}
    return SpaceDescriptor(F, tuple(coords), tuple(dual), tuple(perm), tuple(coeffs), meta, dual_meta)


def pairing_dual(space: SpaceDescriptor) -> SpaceDescriptor:
    inv = [0] * space.N
    for j, p in enumerate(space.pairing_perm):
        inv[p] = j
    coeffs = tuple(space.pairing_coeffs[inv[i]] for i in range(space.N))
    return SpaceDescriptor(space.field, space.dual_coords, space.coords, tuple(inv), coeffs, space.dual_meta, space.meta)


def pairing(space: SpaceDescriptor, x: Sequence[int], y: Sequence[int]) -> int:
    """kappa(x, y) for x in the space and y in its dual, as a field index."""
    F = space.field
    acc = 0
    for j, (c, p) in enumerate(zip(space.pairing_coeffs, space.pairing_perm)):
        acc = int(F.add[acc, F.mul[c, F.mul[x[j], y[p]]]])
    return acc


def pairing_batch(space: SpaceDescriptor, x: np.ndarray, y: Sequence[int]) -> np.ndarray:
    """kappa(x, y) for many rows x and one fixed y."""
    F = space.field
    acc = np.zeros(x.shape[0], dtype=np.int64)
    for j, (c, p) in enumerate(zip(space.pairing_coeffs, space.pairing_perm)):
        w = int(F.mul[c, y[p]])
        if w:
            acc = F.add[acc, F.mul[x[:, j], w]]
    return acc


# ---------------------------------------------------------------------------
# function tables


class FuncTable:
    """A Z[zeta_p]-valued function on every point of a coordinatised space."""

    __slots__ = ("space", "values", "norm_exponent")

    def __init__(self, space: SpaceDescriptor, values: np.ndarray, norm_exponent: int = 0):
        p = space.field.p
        if values.shape != (space.size, p - 1):
            raise ValueError(f"expected values of shape {(space.size, p - 1)}, got {values.shape}")
        self.space = space
        self.values = values
        self.norm_exponent = norm_exponent

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, space: SpaceDescriptor) -> FuncTable:
        check_budget(space.field.q, space.N)
        return cls(space, np.zeros((space.size, space.field.p - 1), dtype=np.int64))

    @classmethod
    def from_integers(cls, space: SpaceDescriptor, ints: np.ndarray) -> FuncTable:
        vals = np.zeros((space.size, space.field.p - 1), dtype=np.int64 if ints.dtype != object else object)
        vals[:, 0] = ints
        return cls(space, vals)

    @classmethod
    def indicator(cls, space: SpaceDescriptor, points: np.ndarray) -> FuncTable:
        """0/1 table from a boolean mask or an array of point indices."""
        points = np.asarray(points)
        ints = np.zeros(space.size, dtype=np.int64)
        if points.dtype == bool:
            ints[points] = 1
        else:
            ints[points.astype(np.int64)] = 1
        return cls.from_integers(space, ints)

    @classmethod
    def delta0(cls, space: SpaceDescriptor) -> FuncTable:
        return cls.indicator(space, np.array([0]))

    @classmethod
    def constant(cls, space: SpaceDescriptor, c: int = 1) -> FuncTable:
        return cls.from_integers(space, np.full(space.size, c, dtype=np.int64))

    @classmethod
    def from_cycs(cls, space: SpaceDescriptor, vals: Sequence[CycNum]) -> FuncTable:
        return cls(space, np.array([cyc_to_array(v) for v in vals], dtype=np.int64).reshape(space.size, -1))

    # -- access -------------------------------------------------------

    @property
    def p(self) -> int:
        return self.space.field.p

    def value(self, index: int) -> CycNum:
        return array_to_cyc(self.p, self.values[index])

    def support(self) -> np.ndarray:
        return self.values.any(axis=1)

    def is_zero(self) -> bool:
        return not self.values.any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FuncTable):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.values, other.values)

    def _like(self, values: np.ndarray) -> FuncTable:
        return FuncTable(self.space, values, self.norm_exponent)

    def __add__(self, other: FuncTable) -> FuncTable:
        return self._like(self.values + other.values)

    def __sub__(self, other: FuncTable) -> FuncTable:
        return self._like(self.values - other.values)

    def __neg__(self) -> FuncTable:
        return self._like(-self.values)

    def scale(self, c: int | CycNum) -> FuncTable:
        if isinstance(c, int):
            return self._like(self.values * c)
        return self._like(canon(full_mul(lift(self.values), lift(cyc_to_array(c))[None, :])))

    def multiply(self, other: FuncTable) -> FuncTable:
        return self._like(canon(full_mul(lift(self.values), lift(other.values))))

    def conj(self) -> FuncTable:
        full = lift(self.values)
        p = self.p
        idx = (-np.arange(p)) % p
        return self._like(canon(full[:, idx]))

    def pullback(self, perm: np.ndarray) -> FuncTable:
        """x -> f(perm[x])."""
        return self._like(self.values[perm])

    def negate_argument(self) -> FuncTable:
        F = self.space.field
        coords = point_coords(F.q, self.space.N)
        return self.pullback(coords_to_index(F.q, F.neg[coords]))

    def total(self) -> CycNum:
        return array_to_cyc(self.p, self.values.sum(axis=0))

    def colinear_with(self, other: FuncTable) -> tuple[bool, CycNum | None]:
        """Whether self = c * other for a single c in Q(zeta_p); returns c when other != 0."""
        if self.space != other.space:
            raise ValueError("tables live on different spaces")
        p = self.p
        nz = np.nonzero(other.support())[0]
        if len(nz) == 0:
            return (self.is_zero(), None)
        i = int(nz[0])
        a_i, b_i = lift(self.values[i : i + 1]), lift(other.values[i : i + 1])
        left = canon(full_mul(lift(self.values), b_i))
        right = canon(full_mul(lift(other.values), a_i))
        ok = bool(np.array_equal(left, right))
        return ok, array_to_cyc(p, self.values[i]) / array_to_cyc(p, other.values[i])

    # -- serialisation ------------------------------------------------

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "norm_exponent": self.norm_exponent,
            "values": [[f"{int(v)}/1" for v in row] for row in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> FuncTable:
        space = SpaceDescriptor.from_json(data["space"])
        p = space.field.p
        vals = []
        for row in data["values"]:
            c = CycNum.from_json(p, row)
            vals.append(cyc_to_array(c))
        return cls(space, np.array(vals, dtype=np.int64).reshape(space.size, p - 1), int(data.get("norm_exponent", 0)))

    def to_bytes(self) -> bytes:
        header = json.dumps({"space": self.space.to_json(), "norm_exponent": self.norm_exponent}, sort_keys=True).encode()
        F = self.space.field
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<IIII", F.p, F.k, self.space.N, len(header)))
        buf.write(header)
        buf.write(np.ascontiguousarray(self.values.astype("<i8")).tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, blob: bytes) -> FuncTable:
        if blob[:5] != MAGIC:
            raise ValueError("not a function table file")
        p, k, n, hlen = struct.unpack("<IIII", blob[5:21])
        header = json.loads(blob[21 : 21 + hlen])
        space = SpaceDescriptor.from_json(header["space"])
        if (space.field.p, space.field.k, space.N) != (p, k, n):
            raise ValueError("header mismatch in function table file")
        vals = np.frombuffer(blob[21 + hlen :], dtype="<i8").astype(np.int64).reshape(space.size, p - 1)
        return cls(space, vals, int(header["norm_exponent"]))


# ---------------------------------------------------------------------------
# the transform


def _safe_dtype(values: np.ndarray, growth: int):
    if values.dtype == object:
        return object
    peak = int(np.abs(values).max()) if values.size else 0
    return np.int64 if peak * growth * 2 < _SAFE else object


def fourier(f: FuncTable) -> FuncTable:
    """Unnormalised transform, landing on the dual space."""
    space = f.space
    F = space.field
    q, p, N = F.q, F.p, space.N
    dtype = _safe_dtype(f.values, q**N)
    arr = lift(f.values.astype(dtype)).reshape((q,) * N + (p,))
    # coordinate j lives on axis N-1-j
    for j in range(N):
        axis = N - 1 - j
        c = space.pairing_coeffs[j]
        moved = np.moveaxis(arr, axis, 0)
        rolled = [np.stack([np.roll(moved[x], t, axis=-1) for t in range(p)]) for x in range(q)]
        out = np.zeros_like(moved)
        for y in range(q):
            for x in range(q):
                t = int(F.trace[F.mul[c, F.mul[x, y]]])
                out[y] += rolled[x][t]
        arr = np.moveaxis(out, 0, axis)
    # the value found at y (indexed in the source coordinates) belongs to the dual point
    # whose coordinate pi(j) is y_j
    inv = [0] * N
    for j, pj in enumerate(space.pairing_perm):
        inv[pj] = j
    order = [N - 1 - inv[N - 1 - a] for a in range(N)] + [N]
    arr = np.transpose(arr, order).reshape(q**N, p)
    return FuncTable(pairing_dual(space), canon(arr), f.norm_exponent + N)


def fourier_at(f: FuncTable, y: Sequence[int]) -> CycNum:
    """One value of the transform by direct summation; y is a point of the dual space."""
    space = f.space
    F = space.field
    p = F.p
    coords = point_coords(F.q, space.N)
    t = F.trace[pairing_batch(space, coords, y)]
    full = lift(f.values.astype(object))
    acc = np.zeros(p, dtype=object)
    for s in range(p):
        sel = full[t == s]
        if len(sel):
            acc += np.roll(sel.sum(axis=0), s)
    return CycNum(p, [int(v) for v in acc])


def kloosterman(m: int, F: FqField, lam: FqElem | int) -> CycNum:
    """Sum of psi(x_1 + ... + x_m) over nonzero x_j with product lam."""
    lam_idx = lam.index if isinstance(lam, FqElem) else int(lam)
    if m < 1:
        raise ValueError("m must be at least 1")
    if lam_idx == 0:
        raise ValueError("lambda must be nonzero")
    q, p = F.q, F.p
    counts = np.zeros((q, q), dtype=object)  # (product, sum) of the first j variables
    counts[1, 0] = 1
    nz = F.nonzero
    for _ in range(m - 1):
        new = np.zeros((q, q), dtype=object)
        for prod_, sum_ in zip(*np.nonzero(counts)):
            np.add.at(new, (F.mul[prod_, nz], F.add[sum_, nz]), counts[prod_, sum_])
        counts = new
    exps = np.zeros(p, dtype=object)
    for prod_, sum_ in zip(*np.nonzero(counts)):
        last = F.mul[lam_idx, F.inv[prod_]]
        exps[F.trace[F.add[sum_, last]]] += counts[prod_, sum_]
    return CycNum(p, [int(v) for v in exps])


def kloosterman_bound_ok(m: int, F: FqField, value: CycNum, tol: float = 1e-6) -> bool:
    bound = m * F.q ** ((m - 1) / 2)
    return all(abs(value.embed_complex(r)) <= bound + tol for r in range(1, F.p))
