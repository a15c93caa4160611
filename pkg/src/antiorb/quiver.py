"""Representations of the cyclic quiver with m vertices over F_q.

A point T of E^eps_V is a family of blocks ``T_i : V_i -> V_{i+eps}``, block
``i`` being a ``dims[i+eps] x dims[i]`` matrix.  Coordinates run over blocks in
increasing ``i`` and each block row-major, which fixes the point index used by
every function table.

The classification works with primary decomposition over F_q.  Let ``a*`` be
a vertex of minimal dimension and ``C`` the cycle composite ``T^m`` restricted
to ``V_{a*}``.  The nonzero eigenvalues of ``T^m`` on any vertex agree with
those of ``C``, so the invertible part of T is read off from the factorisation
of the characteristic polynomial of ``C``, and the nilpotent part from rank
data of composites of T.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fqlinalg as la
from .actions import check_budget, coords_to_index, linear_perm, orbit_partition, point_coords
from .finitefield import FqField
from .fqlinalg import Matrix, Poly
from .segments import Multisegment, PartitionMult, SegmentClass


@dataclass(frozen=True)
class GradedDims:
    m: int
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if self.m < 1 or len(self.dims) != self.m or min(self.dims, default=0) < 0:
            raise ValueError(f"invalid graded dimensions m={self.m}, dims={self.dims}")

    def __getitem__(self, i: int) -> int:
        return self.dims[i % self.m]

    @property
    def total(self) -> int:
        return sum(self.dims)

    def block_shapes(self, eps: int) -> list[tuple[int, int]]:
        return [(self[i + eps], self[i]) for i in range(self.m)]

    def space_dim(self, eps: int) -> int:
        return sum(r * c for r, c in self.block_shapes(eps))

    def coords(self, eps: int) -> list[tuple[int, int, int]]:
        return [(i, r, c) for i, (nr, nc) in enumerate(self.block_shapes(eps)) for r in range(nr) for c in range(nc)]

    def offsets(self, eps: int) -> list[int]:
        out, acc = [], 0
        for r, c in self.block_shapes(eps):
            out.append(acc)
            acc += r * c
        return out

    def __add__(self, other: GradedDims) -> GradedDims:
        return GradedDims(self.m, tuple(a + b for a, b in zip(self.dims, other.dims)))


def _check_eps(eps: int) -> int:
    if eps not in (1, -1):
        raise ValueError(f"eps must be +1 or -1, got {eps}")
    return eps


@dataclass(frozen=True)
class QuiverRep:
    field: FqField
    dims: GradedDims
    eps: int
    blocks: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self) -> None:
        _check_eps(self.eps)
        blocks = tuple(tuple(tuple(int(x) for x in row) for row in b) for b in self.blocks)
        if len(blocks) != self.dims.m:
            raise ValueError(f"expected {self.dims.m} blocks, got {len(blocks)}")
        for i, ((nr, nc), b) in enumerate(zip(self.dims.block_shapes(self.eps), blocks)):
            if len(b) != nr or any(len(row) != nc for row in b):
                raise ValueError(f"block {i} must be {nr}x{nc}")
            if any(not 0 <= x < self.field.q for row in b for x in row):
                raise ValueError(f"block {i} has entries outside F_{self.field.q}")
        object.__setattr__(self, "blocks", blocks)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_blocks(cls, field: FqField, dims: Sequence[int] | GradedDims, eps: int, blocks) -> QuiverRep:
        gd = dims if isinstance(dims, GradedDims) else GradedDims(len(dims), tuple(dims))
        return cls(field, gd, eps, tuple(tuple(tuple(r) for r in np.asarray(b).reshape(s).tolist()) for b, s in zip(blocks, gd.block_shapes(eps))))

    @classmethod
    def zero(cls, field: FqField, dims: GradedDims, eps: int) -> QuiverRep:
        return cls(field, dims, eps, tuple(tuple((0,) * c for _ in range(r)) for r, c in dims.block_shapes(eps)))

    @classmethod
    def from_coords(cls, field: FqField, dims: GradedDims, eps: int, coords: Sequence[int]) -> QuiverRep:
        blocks, pos = [], 0
        for r, c in dims.block_shapes(eps):
            blocks.append(tuple(tuple(int(coords[pos + i * c + j]) for j in range(c)) for i in range(r)))
            pos += r * c
        if pos != len(coords):
            raise ValueError(f"expected {pos} coordinates, got {len(coords)}")
        return cls(field, dims, eps, tuple(blocks))

    @classmethod
    def from_index(cls, field: FqField, dims: GradedDims, eps: int, index: int) -> QuiverRep:
        n = dims.space_dim(eps)
        return cls.from_coords(field, dims, eps, point_coords(field.q, n, np.array([index]))[0].tolist())

    def coords(self) -> list[int]:
        return [x for b in self.blocks for row in b for x in row]

    def index(self) -> int:
        return int(coords_to_index(self.field.q, np.array(self.coords(), dtype=np.int64)))

    # -- linear algebra -----------------------------------------------

    @property
    def m(self) -> int:
        return self.dims.m

    def block(self, i: int) -> Matrix:
        return [list(r) for r in self.blocks[i % self.m]]

    def composite(self, a: int, j: int) -> Matrix:
        """Matrix of T^j restricted to V_a, landing in V_{a+j*eps}."""
        da = self.dims[a]
        M = la.identity(da)
        v = a
        for _ in range(j):
            tgt = self.dims[v + self.eps]
            if da == 0 or tgt == 0 or self.dims[v] == 0:
                M = la.zeros(tgt, da)
            else:
                M = la.mat_mul(self.field, self.block(v), M)
            v += self.eps
        return M

    def cycle(self, a: int) -> Matrix:
        return self.composite(a, self.m)

    def endomorphism(self) -> Matrix:
        """T as a total x total matrix on the direct sum of the V_i."""
        offs = np.cumsum((0,) + self.dims.dims)
        M = la.zeros(self.dims.total, self.dims.total)
        for i in range(self.m):
            tgt = (i + self.eps) % self.m
            for r, row in enumerate(self.blocks[i]):
                for c, x in enumerate(row):
                    M[offs[tgt] + r][offs[i] + c] = x
        return M

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "eps": self.eps,
            "dims": list(self.dims.dims),
            "blocks": [[x for row in b for x in row] for b in self.blocks],
        }

    @classmethod
    def from_json(cls, field: FqField, data: dict) -> QuiverRep:
        gd = GradedDims(int(data["m"]), tuple(data["dims"]))
        eps = _check_eps(int(data["eps"]))
        blocks = []
        for (r, c), flat in zip(gd.block_shapes(eps), data["blocks"]):
            if len(flat) != r * c:
                raise ValueError(f"block needs {r * c} entries, got {len(flat)}")
            blocks.append(tuple(tuple(flat[i * c : (i + 1) * c]) for i in range(r)))
        return cls(field, gd, eps, tuple(blocks))


@dataclass(frozen=True)
class OrbitLabel:
    """Isomorphism type: nilpotent segments plus a partition per irreducible eigenvalue class."""

    m: int
    dims: tuple[int, ...]
    nilpotent_part: Multisegment
    eigen_parts: tuple[tuple[Poly, PartitionMult], ...] = ()

    def degree_identity_holds(self) -> bool:
        extra = sum((len(g) - 1) * rho.size() for g, rho in self.eigen_parts)
        return tuple(d + extra for d in self.nilpotent_part.dims()) == self.dims

    def is_nilpotent(self) -> bool:
        return not self.eigen_parts

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "dims": list(self.dims),
            "nilpotent_part": self.nilpotent_part.to_json(),
            "eigen_parts": [{"g": list(g), "rho": rho.to_json()} for g, rho in self.eigen_parts],
        }

    @classmethod
    def from_json(cls, data: dict) -> OrbitLabel:
        m = int(data["m"])
        return cls(
            m,
            tuple(data["dims"]),
            Multisegment.from_json(m, data["nilpotent_part"]),
            tuple((tuple(e["g"]), PartitionMult.from_json(e["rho"])) for e in data["eigen_parts"]),
        )


@dataclass(frozen=True)
class StratumLabel:
    z: int
    sigma: Multisegment
    valid: bool

    def to_json(self) -> dict:
        return {"z": self.z, "sigma": self.sigma.to_json(), "valid": self.valid}


# ---------------------------------------------------------------------------
# classification of a single point


def _min_vertex(dims: GradedDims) -> int:
    return min(range(dims.m), key=lambda i: (dims[i], i))


def _primary_factors(T: QuiverRep) -> tuple[Matrix, list[tuple[Poly, int]]]:
    a = _min_vertex(T.dims)
    C = T.cycle(a)
    if not C:
        return C, []
    return C, la.factor(T.field, la.charpoly(T.field, C))


def _nil_ranks(T: QuiverRep) -> dict[tuple[int, int], int]:
    """Ranks of powers of T on each vertex with the invertible contribution removed."""
    L = T.dims.total
    out: dict[tuple[int, int], int] = {}
    for a in range(T.m):
        stable = la.rank(T.field, T.composite(a, L))
        for j in range(L + 2):
            out[(a, j)] = la.rank(T.field, T.composite(a, j)) - stable if j <= L else 0
    return out


def _segments_from_ranks(T: QuiverRep) -> Multisegment:
    m, eps, L = T.m, T.eps, T.dims.total
    r = _nil_ranks(T)

    def rk(a: int, j: int) -> int:
        return r[(a % m, j)] if j <= L + 1 else 0

    counts = {}
    for a in range(m):
        for ln in range(1, L + 1):
            mult = (rk(a, ln - 1) - rk(a - eps, ln)) - (rk(a, ln) - rk(a - eps, ln + 1))
            if mult < 0:  # pragma: no cover - would indicate an arithmetic bug
                raise AssertionError("negative segment multiplicity")
            if mult:
                # a is the head of the chain; for eps = -1 the chain runs downward
                start = a if eps == 1 else a - ln + 1
                counts[SegmentClass(m, start % m, ln)] = mult
    return Multisegment.from_counts(m, counts)


def _partition_of_factor(F: FqField, C: Matrix, g: Poly, e: int) -> PartitionMult:
    d = len(g) - 1
    gC = la.poly_eval_matrix(F, g, C)
    power = la.identity(len(C))
    kdims = [0]
    for _ in range(e):
        power = la.mat_mul(F, power, gC)
        kdims.append(len(C) - la.rank(F, power))
    at_least = [(kdims[j] - kdims[j - 1]) // d for j in range(1, e + 1)] + [0]
    return PartitionMult.from_counts({j: at_least[j - 1] - at_least[j] for j in range(1, e + 1)})


def decompose(T: QuiverRep) -> OrbitLabel:
    C, factors = _primary_factors(T)
    eigen = []
    for g, e in factors:
        if g == (0, 1):
            continue
        eigen.append((g, _partition_of_factor(T.field, C, g, e)))
    label = OrbitLabel(T.m, T.dims.dims, _segments_from_ranks(T), tuple(sorted(eigen)))
    if not label.degree_identity_holds():  # pragma: no cover
        raise AssertionError(f"degree identity failed for {T}")
    return label


def is_nilpotent(T: QuiverRep) -> bool:
    L = T.dims.total
    return all(la.is_zero(T.composite(a, L)) for a in range(T.m))


def segment_multiplicities(T: QuiverRep) -> Multisegment:
    if not is_nilpotent(T):
        raise ValueError("segment multiplicities need a nilpotent representation")
    return _segments_from_ranks(T)


def stratum_label(T: QuiverRep) -> StratumLabel:
    _, factors = _primary_factors(T)
    nonzero = [(g, e) for g, e in factors if g != (0, 1)]
    z = sum(len(g) - 1 for g, _ in nonzero)
    valid = all(e == 1 for _, e in nonzero)
    return StratumLabel(z, _segments_from_ranks(T), valid)


# ---------------------------------------------------------------------------
# models


def _direct_sum(field: FqField, m: int, eps: int, pieces: list[tuple[tuple[int, ...], list[Matrix]]]) -> QuiverRep:
    dims = [0] * m
    for d, _ in pieces:
        for i in range(m):
            dims[i] += d[i]
    gd = GradedDims(m, tuple(dims))
    blocks = [la.zeros(r, c) for r, c in gd.block_shapes(eps)]
    off = [0] * m
    for d, bl in pieces:
        for i in range(m):
            tgt = (i + eps) % m
            for r, row in enumerate(bl[i]):
                for c, x in enumerate(row):
                    blocks[i][off[tgt] + r][off[i] + c] = x
        for i in range(m):
            off[i] += d[i]
    return QuiverRep(field, gd, eps, tuple(tuple(tuple(r) for r in b) for b in blocks))


def segment_model(m: int, eps: int, seg: SegmentClass) -> tuple[tuple[int, ...], list[Matrix]]:
    """Basis e_a..e_{a+len-1}, with T moving along the chain in the direction of eps."""
    d = seg.dims()
    slots: list[tuple[int, int]] = []  # (vertex, local index) of each basis vector
    seen = [0] * m
    for j in range(seg.len):
        v = (seg.a + j) % m
        slots.append((v, seen[v]))
        seen[v] += 1
    blocks = [la.zeros(d[(i + eps) % m], d[i]) for i in range(m)]
    for j in range(seg.len):
        nxt = j + eps
        if 0 <= nxt < seg.len:
            (v, lv), (w, lw) = slots[j], slots[nxt]
            blocks[v][lw][lv] = 1
    return d, blocks


def eigen_model(field: FqField, m: int, eps: int, g: Poly, n: int) -> tuple[tuple[int, ...], list[Matrix]]:
    """Identity blocks except the one leaving vertex 0, which is the companion of g^n."""
    gn = la.poly_pow(field, g, n)
    size = len(gn) - 1
    blocks = [la.identity(size) for _ in range(m)]
    blocks[0] = la.companion(field, gn)
    return (size,) * m, blocks


def representative_from_label(field: FqField, label: OrbitLabel, eps: int) -> QuiverRep:
    pieces = []
    for seg, c in label.nilpotent_part.items:
        pieces += [segment_model(label.m, eps, seg)] * c
    for g, rho in label.eigen_parts:
        for n in rho.parts():
            pieces.append(eigen_model(field, label.m, eps, g, n))
    if not pieces:
        return QuiverRep.zero(field, GradedDims(label.m, label.dims), eps)
    rep = _direct_sum(field, label.m, eps, pieces)
    if rep.dims.dims != tuple(label.dims):
        raise ValueError("label does not match its dimension vector")
    return rep


# ---------------------------------------------------------------------------
# batched helpers over all points of E^eps_V


def blocks_batch(dims: GradedDims, eps: int, coords: np.ndarray) -> list[np.ndarray]:
    out = []
    for (r, c), off in zip(dims.block_shapes(eps), dims.offsets(eps)):
        out.append(coords[:, off : off + r * c].reshape(coords.shape[0], r, c))
    return out


def cycle_batch(field: FqField, dims: GradedDims, eps: int, coords: np.ndarray, a: int | None = None) -> np.ndarray:
    """The composite T^m on V_a for every row of coordinates."""
    if a is None:
        a = _min_vertex(dims)
    blocks = blocks_batch(dims, eps, coords)
    d = dims[a]
    C = np.broadcast_to(np.eye(d, dtype=np.int64), (coords.shape[0], d, d)).copy()
    v = a
    for _ in range(dims.m):
        C = la.batch_matmul(field, blocks[v % dims.m], C)
        v += eps
    return C


def nilpotent_mask(field: FqField, dims: GradedDims, eps: int, coords: np.ndarray | None = None) -> np.ndarray:
    if coords is None:
        coords = point_coords(field.q, dims.space_dim(eps))
    a = _min_vertex(dims)
    d = dims[a]
    if d == 0:
        return np.ones(coords.shape[0], dtype=bool)
    C = cycle_batch(field, dims, eps, coords, a)
    return la.batch_is_zero(la.batch_power(field, C, d))


def scalar_cycle(field: FqField, dims: GradedDims, eps: int, coords: np.ndarray | None = None) -> np.ndarray:
    """For graded dims all one: the eigenvalue of T^m, i.e. the product of the m scalars."""
    if any(d != 1 for d in dims.dims):
        raise ValueError("scalar cycle values need every vertex of dimension one")
    if coords is None:
        coords = point_coords(field.q, dims.space_dim(eps))
    out = np.ones(coords.shape[0], dtype=np.int64)
    for j in range(dims.m):
        out = field.mul[out, coords[:, j]]
    return out


# ---------------------------------------------------------------------------
# group action and rational orbits


def gl_generators(field: FqField, d: int) -> list[Matrix]:
    """Elementary matrices I + c E_rs for every c != 0, and diag(gamma, 1, ..., 1)."""
    gens = []
    for r in range(d):
        for s in range(d):
            if r != s:
                for c in range(1, field.q):
                    g = la.identity(d)
                    g[r][s] = c
                    gens.append(g)
    if d:
        g = la.identity(d)
        g[0][0] = field.primitive_root
        gens.append(g)
    return gens


def ad_matrix(field: FqField, dims: GradedDims, eps: int, gs: Sequence[Matrix]) -> Matrix:
    """Coordinate matrix (acting on row vectors) of T_i -> g_{i+eps} T_i g_i^{-1}."""
    ginv = [la.inverse(field, g) if len(g) else [] for g in gs]
    n = dims.space_dim(eps)
    rows = []
    for j in range(n):
        e = [0] * n
        e[j] = 1
        T = QuiverRep.from_coords(field, dims, eps, e)
        new = []
        for i in range(dims.m):
            r, c = dims[i + eps], dims[i]
            if r and c:
                blk = la.mat_mul(field, la.mat_mul(field, gs[(i + eps) % dims.m], T.block(i)), ginv[i])
            else:
                blk = la.zeros(r, c)
            new.append(blk)
        rows.append([x for b in new for row in b for x in row])
    return rows


def gv_generators(field: FqField, dims: GradedDims, eps: int) -> list[Matrix]:
    """Coordinate matrices for generators of the product of GL(V_i), one factor at a time."""
    out = []
    for i in range(dims.m):
        for g in gl_generators(field, dims[i]):
            gs = [la.identity(dims[j]) for j in range(dims.m)]
            gs[i] = g
            out.append(ad_matrix(field, dims, eps, gs))
    return out


@dataclass(frozen=True)
class RationalOrbit:
    index: int
    points: np.ndarray = field(compare=False)
    representative: QuiverRep
    label: OrbitLabel

    @property
    def size(self) -> int:
        return int(len(self.points))

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "size": self.size,
            "representative": self.representative.to_json(),
            "label": self.label.to_json(),
        }


def enumerate_rational_orbits(
    field: FqField,
    dims: GradedDims,
    eps: int,
    restrict_to_nilpotent: bool = False,
    budget: int | None = None,
) -> list[RationalOrbit]:
    """Partition E^eps_V(F_q) (or its nilpotent points) into orbits of the product of GL(V_i)."""
    _check_eps(eps)
    n = dims.space_dim(eps)
    size = check_budget(field.q, n, budget)
    coords = point_coords(field.q, n)
    perms = [linear_perm(field, n, M, coords) for M in gv_generators(field, dims, eps)]
    _, orbits = orbit_partition(size, perms)
    if restrict_to_nilpotent:
        mask = nilpotent_mask(field, dims, eps, coords)
        orbits = [o for o in orbits if mask[o[0]]]
    out = []
    for k, pts in enumerate(orbits):
        rep = QuiverRep.from_coords(field, dims, eps, coords[pts[0]].tolist())
        out.append(RationalOrbit(k, pts, rep, decompose(rep)))
    return out


# ---------------------------------------------------------------------------
# point counts on the locus where T^m - lambda is nilpotent


def eigen_locus_counts(field: FqField, m: int, s: int, lam: int) -> tuple[int, int]:
    """Exact sizes of {T : T^m - lam nilpotent} and {S : S^m = lam} for graded dims s at each vertex.

    The cycle composite at vertex 0 is A * P where P is the product of the
    first m-1 blocks.  The distribution of P is accumulated block by block,
    then the last block A is counted against each P.  Every point of the
    space is accounted for exactly once.
    """
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    n = s * s
    check_budget(field.q, 2 * n)
    mats = point_coords(field.q, n).reshape(-1, s, s)
    nm = len(mats)
    prod_idx = coords_to_index(
        field.q, la.batch_matmul(field, mats[:, None], mats[None, :]).reshape(nm, nm, n)
    )  # prod_idx[B, P] = index of B @ P
    identity_idx = int(coords_to_index(field.q, np.eye(s, dtype=np.int64).reshape(1, n))[0])
    dist = np.zeros(nm, dtype=object)
    dist[identity_idx] = 1
    for _ in range(m - 1):
        new = np.zeros(nm, dtype=object)
        for p in np.nonzero(dist)[0]:
            np.add.at(new, prod_idx[:, p], dist[p])
        dist = new
    lam_eye = np.zeros((s, s), dtype=np.int64)
    np.fill_diagonal(lam_eye, lam)
    shifted = field.sub[mats, lam_eye[None]]
    unipotent_like = la.batch_is_zero(la.batch_power(field, shifted, s))
    scalar = la.batch_is_zero(shifted)
    count_e = count_d = 0
    for p in np.nonzero(dist)[0]:
        prods = prod_idx[:, p]
        count_e += dist[p] * int(unipotent_like[prods].sum())
        count_d += dist[p] * int(scalar[prods].sum())
    return int(count_e), int(count_d)


def gl_order(q: int, s: int) -> int:
    out = 1
    for j in range(s):
        out *= q**s - q**j
    return out
