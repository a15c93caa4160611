"""Invariant functions on quiver spaces: orbit indicators, biorbital functions,
parabolic induction and restriction, and their compatibility with the transform.

Everything here is at the level of functions on F_q-points.  Induction sums
over graded T-stable flags with prescribed subquotient dimensions (the first
piece is the smallest subspace), restriction sums over the fibre of the
projection from the block upper triangular matrices onto the diagonal blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import lcm
from typing import Sequence

import numpy as np

from . import fqlinalg as la
from .actions import check_budget, coords_to_index, linear_perm, point_coords
from .cyclotomic import CycNum, array_to_cyc, canon, cyc_to_array, full_mul, lift
from .finitefield import FqField
from .quiver import (
    GradedDims,
    ad_matrix,
    blocks_batch,
    enumerate_rational_orbits,
    gv_generators,
    nilpotent_mask,
    scalar_cycle,
)
from .segments import count_Pap
from .transform import FuncTable, SpaceDescriptor, fourier, kloosterman, product_space, quiver_space


def orbit_indicator(space: SpaceDescriptor, points: np.ndarray) -> FuncTable:
    return FuncTable.indicator(space, points)


def quiver_meta(space: SpaceDescriptor) -> tuple[GradedDims, int]:
    meta = space.meta
    if meta.get("kind") != "quiver":
        raise ValueError("expected a function on a quiver space")
    return GradedDims(int(meta["m"]), tuple(meta["dims"])), int(meta["eps"])


def is_invariant(f: FuncTable) -> bool:
    """Exact check under every generator of the product of the GL(V_i)."""
    dims, eps = quiver_meta(f.space)
    F = f.space.field
    coords = point_coords(F.q, f.space.N)
    for M in gv_generators(F, dims, eps):
        perm = linear_perm(F, f.space.N, M, coords)
        if not np.array_equal(f.values[perm], f.values):
            return False
    return True


# ---------------------------------------------------------------------------
# biorbital functions


@dataclass
class InvariantBasis:
    space: SpaceDescriptor
    orbits: list[np.ndarray]
    labels: list = field(default_factory=list)

    @property
    def indicators(self) -> list[FuncTable]:
        return [orbit_indicator(self.space, o) for o in self.orbits]


@dataclass
class BiorbitalSpace:
    dimension: int
    basis: list[list[CycNum]]
    orbit_basis: InvariantBasis
    verified: bool

    def functions(self) -> list[FuncTable]:
        return [combine(self.orbit_basis.indicators, vec) for vec in self.basis]

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "basis": [[c.to_json() for c in vec] for vec in self.basis],
            "verified": self.verified,
        }


def integral_coefficients(vec: Sequence[CycNum]) -> list[CycNum]:
    """Rescale by a positive integer so every coefficient lies in Z[zeta_p]."""
    den = 1
    for c in vec:
        for x in c.coeffs:
            den = lcm(den, x.denominator)
    return [c * den for c in vec]


def combine(tables: Sequence[FuncTable], coeffs: Sequence[CycNum]) -> FuncTable:
    coeffs = integral_coefficients(coeffs)
    out = FuncTable.zeros(tables[0].space)
    for t, c in zip(tables, coeffs):
        if c:
            out = out + t.scale(c)
    out.norm_exponent = tables[0].norm_exponent
    return out


def _reduce(row: list[CycNum], basis: list[tuple[int, list[CycNum]]]) -> list[CycNum]:
    for piv, brow in basis:
        if row[piv]:
            f = row[piv]
            row = [a - f * b for a, b in zip(row, brow)]
    return row


def exact_nullspace(rows: np.ndarray, p: int) -> list[list[CycNum]]:
    """Nullspace over Q(zeta_p) of an integer system given as (n_rows, n_cols, p-1)."""
    n_cols = rows.shape[1]
    flat = rows.reshape(rows.shape[0], n_cols * (p - 1))
    uniq = np.unique(flat, axis=0) if len(flat) else flat
    basis: list[tuple[int, list[CycNum]]] = []  # fully reduced echelon rows
    for raw in uniq:
        if len(basis) == n_cols:
            break
        row = [array_to_cyc(p, raw[j * (p - 1) : (j + 1) * (p - 1)]) for j in range(n_cols)]
        row = _reduce(row, basis)
        piv = next((j for j, v in enumerate(row) if v), None)
        if piv is None:
            continue
        inv = row[piv].inverse()
        row = [v * inv for v in row]
        basis = [(bp, [a - brow[piv] * b for a, b in zip(brow, row)]) for bp, brow in basis]
        basis.append((piv, row))
    pivots = {bp: brow for bp, brow in basis}
    out = []
    for free in range(n_cols):
        if free in pivots:
            continue
        vec = [CycNum.zero(p) for _ in range(n_cols)]
        vec[free] = CycNum.one(p)
        for bp, brow in pivots.items():
            vec[bp] = -brow[free]
        out.append(vec)
    return out


def solve_biorbital(basis: InvariantBasis, dual_allowed: np.ndarray) -> BiorbitalSpace:
    """Combinations of the indicators whose transform vanishes wherever dual_allowed is False."""
    p = basis.space.field.p
    hats = [fourier(t) for t in basis.indicators]
    bad = ~dual_allowed
    if hats:
        system = np.stack([h.values[bad] for h in hats], axis=1)
    else:
        system = np.zeros((0, 0, p - 1), dtype=np.int64)
    vecs = exact_nullspace(system, p) if hats else []
    verified = True
    for vec in vecs:
        combo = combine(hats, vec)
        verified &= not combo.values[bad].any()
    return BiorbitalSpace(len(vecs), vecs, basis, verified)


def nilpotent_orbit_basis(F: FqField, dims: GradedDims, eps: int, budget: int | None = None) -> InvariantBasis:
    orbits = enumerate_rational_orbits(F, dims, eps, restrict_to_nilpotent=True, budget=budget)
    return InvariantBasis(quiver_space(F, dims, eps), [o.points for o in orbits], [o.label for o in orbits])


def biorbital_space(F: FqField, dims: GradedDims, eps: int, budget: int | None = None) -> BiorbitalSpace:
    basis = nilpotent_orbit_basis(F, dims, eps, budget)
    return solve_biorbital(basis, nilpotent_mask(F, dims, -eps))


def biorbital_report(F: FqField, dims: GradedDims, eps: int, budget: int | None = None) -> dict:
    space = biorbital_space(F, dims, eps, budget)
    ap = count_Pap(dims.m, dims.dims)
    return {
        "dimension": space.dimension,
        "aperiodic_count": ap,
        "nilpotent_orbits": len(space.orbit_basis.orbits),
        "match": space.dimension == ap and space.verified,
        "verified": space.verified,
        "basis": [[c.to_json() for c in vec] for vec in space.basis],
    }


# ---------------------------------------------------------------------------
# induction


def subspaces(F: FqField, n: int, k: int) -> list[la.Matrix]:
    """Every k-dimensional subspace of F_q^n as a k x n reduced echelon matrix."""
    out = []
    for pivots in combinations(range(n), k):
        free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, n) if j not in pivots]
        for vals in product(range(F.q), repeat=len(free)):
            M = la.zeros(k, n)
            for i, pc in enumerate(pivots):
                M[i][pc] = 1
            for (i, j), v in zip(free, vals):
                M[i][j] = v
            out.append(M)
    return out


def adapted_basis(F: FqField, W: la.Matrix, n: int) -> la.Matrix:
    """Invertible n x n matrix whose first columns span W, completed by unit vectors."""
    _, pivots = la.rref(F, W) if W else ([], [])
    cols = [list(row) for row in W] + [[1 if j == c else 0 for j in range(n)] for c in range(n) if c not in pivots]
    return [[cols[c][r] for c in range(n)] for r in range(n)]


def _split_blocks(F, dims, eps, coords, gs, ginvs, sub: GradedDims):
    """Conjugate every point by the adapted bases; return stable mask and the two subquotient indices."""
    m = dims.m
    stable = np.ones(coords.shape[0], dtype=bool)
    sub_parts, quo_parts = [], []
    for i, blk in enumerate(blocks_batch(dims, eps, coords)):
        j = (i + eps) % m
        conj = la.batch_matmul(F, la.batch_matmul(F, np.asarray(ginvs[j])[None], blk), np.asarray(gs[i])[None]) if blk.size else blk
        r1, c1 = sub[j], sub[i]
        lower_left = conj[:, r1:, :c1]
        if lower_left.size:
            stable &= la.batch_is_zero(lower_left)
        r2, c2 = dims[j] - r1, dims[i] - c1
        sub_parts.append(conj[:, :r1, :c1].reshape(coords.shape[0], r1 * c1))
        quo_parts.append(conj[:, r1:, c1:].reshape(coords.shape[0], r2 * c2))
    q = F.q
    idx_sub = coords_to_index(q, np.concatenate(sub_parts, axis=1))
    idx_quo = coords_to_index(q, np.concatenate(quo_parts, axis=1))
    return stable, idx_sub, idx_quo


def induce2(f1: FuncTable, f2: FuncTable) -> FuncTable:
    """Sum over graded T-stable W with |W| = dims of f1, of f1(T|W) f2(T on V/W)."""
    d1, eps = quiver_meta(f1.space)
    d2, eps2 = quiver_meta(f2.space)
    if eps != eps2 or d1.m != d2.m:
        raise ValueError("induction pieces must share m and eps")
    F = f1.space.field
    dims = d1 + d2
    space = quiver_space(F, dims, eps)
    check_budget(F.q, space.N)
    coords = point_coords(F.q, space.N)
    full1, full2 = lift(f1.values), lift(f2.values)
    out = np.zeros((space.size, F.p), dtype=np.result_type(f1.values, f2.values))
    per_vertex = [subspaces(F, dims[i], d1[i]) for i in range(dims.m)]
    for choice in product(*per_vertex):
        gs = [adapted_basis(F, W, dims[i]) for i, W in enumerate(choice)]
        ginvs = [la.inverse(F, g) if g else [] for g in gs]
        stable, i1, i2 = _split_blocks(F, dims, eps, coords, gs, ginvs, d1)
        if stable.any():
            out[stable] += full_mul(full1[i1[stable]], full2[i2[stable]])
    return FuncTable(space, canon(out))


def induce(parts: Sequence[FuncTable], check: bool = True) -> FuncTable:
    """Iterated induction; parts[0] is the bottom of the flag."""
    if not parts:
        raise ValueError("need at least one piece")
    if check:
        for f in parts:
            if not is_invariant(f):
                raise ValueError("induction expects invariant functions")
    if len(parts) == 1:
        return parts[0]
    return induce2(parts[0], induce(parts[1:], check=False))


# ---------------------------------------------------------------------------
# restriction


def restrict(f: FuncTable, split: tuple[Sequence[int], Sequence[int]], conj: Sequence[la.Matrix] | None = None) -> FuncTable:
    """Sum of f over the block upper triangular completions of (T1, T2).

    The subspace is spanned by the first dims1[i] basis vectors at each vertex
    (T1 acts there) and T2 is the induced map on the quotient.  Passing
    ``conj`` uses the subspace g.W instead, for g the given family of
    invertible matrices.
    """
    dims, eps = quiver_meta(f.space)
    F = f.space.field
    m = dims.m
    d1, d2 = GradedDims(m, tuple(split[0])), GradedDims(m, tuple(split[1]))
    if d1 + d2 != dims:
        raise ValueError(f"split {d1.dims} + {d2.dims} does not add up to {dims.dims}")
    if conj is not None:
        f = f.pullback(linear_perm(F, f.space.N, ad_matrix(F, dims, eps, conj)))
    s1, s2 = quiver_space(F, d1, eps), quiver_space(F, d2, eps)
    out_space = product_space([s1, s2])
    check_budget(F.q, f.space.N)
    q = F.q
    weights = q ** np.arange(f.space.N, dtype=np.int64)
    # where each coordinate of the big space comes from
    pair_w = np.zeros(out_space.N, dtype=np.int64)
    y_pos = []
    pos1 = {t: j for j, t in enumerate(s1.coords)}
    pos2 = {t: j for j, t in enumerate(s2.coords)}
    for j, (i, r, c) in enumerate(dims.coords(eps)):
        r1, c1 = d1[i + eps], d1[i]
        if r < r1 and c < c1:
            pair_w[pos1[(i, r, c)]] = weights[j]
        elif r >= r1 and c >= c1:
            pair_w[s1.N + pos2[(i, r - r1, c - c1)]] = weights[j]
        elif r < r1:
            y_pos.append(weights[j])
    base = point_coords(q, out_space.N) @ pair_w
    ys = point_coords(q, len(y_pos)) @ np.array(y_pos, dtype=np.int64) if y_pos else np.zeros(1, dtype=np.int64)
    acc = np.zeros((out_space.size, F.p - 1), dtype=f.values.dtype)
    for y in ys:
        acc += f.values[base + y]
    return FuncTable(out_space, acc)


# ---------------------------------------------------------------------------
# compatibility with the transform


def _scalar_report(lhs: FuncTable, rhs: FuncTable) -> dict:
    q = lhs.space.field.q
    if lhs.is_zero() and rhs.is_zero():
        return {"colinear": True, "degenerate": True, "scalar": None, "q_exponent": None}
    ok, scalar = lhs.colinear_with(rhs)
    report = {"colinear": ok, "degenerate": False, "scalar": None, "q_exponent": None}
    if scalar is not None:
        report["scalar"] = str(scalar)
        report["q_exponent"] = q_power_exponent(scalar, q)
    return report


def q_power_exponent(c: CycNum, q: int) -> int | None:
    """e with c = q^e exactly, or None."""
    if not c.is_rational():
        return None
    r = c.rational()
    if r <= 0:
        return None
    e = 0
    while r.denominator == 1 and r.numerator % q == 0:
        r /= q
        e += 1
    while r.numerator == 1 and r.denominator % q == 0:
        r *= q
        e -= 1
    return e if r == 1 else None


def check_fourier_induction_commutes(parts: Sequence[FuncTable]) -> dict:
    if any(f.is_zero() for f in parts):
        return {"colinear": True, "degenerate": True, "scalar": None, "q_exponent": None}
    lhs = fourier(induce(parts))
    rhs = induce([fourier(f) for f in parts])
    return _scalar_report(lhs, rhs)


def check_fourier_restriction_commutes(f: FuncTable, split: tuple[Sequence[int], Sequence[int]]) -> dict:
    if f.is_zero():
        return {"colinear": True, "degenerate": True, "scalar": None, "q_exponent": None}
    lhs = fourier(restrict(f, split))
    rhs = restrict(fourier(f), split)
    if lhs.space != rhs.space:  # pragma: no cover - structural invariant
        raise AssertionError("restriction of the transform landed on a different space")
    return _scalar_report(lhs, rhs)


def flag_count_function(F: FqField, dims: GradedDims, eps: int, flag_type: Sequence[int]) -> FuncTable:
    """Number of complete graded T-stable flags whose j-th step adds vertex flag_type[j]."""
    counts = [0] * dims.m
    for v in flag_type:
        counts[v % dims.m] += 1
    if tuple(counts) != dims.dims:
        raise ValueError(f"flag type {list(flag_type)} does not match dims {dims.dims}")
    pieces = []
    for v in flag_type:
        unit = GradedDims(dims.m, tuple(1 if i == v % dims.m else 0 for i in range(dims.m)))
        pieces.append(FuncTable.delta0(quiver_space(F, unit, eps)))
    return induce(pieces, check=False)


def flag_types(dims: GradedDims) -> list[tuple[int, ...]]:
    """Distinct orderings of the one-dimensional graded pieces."""
    base = [i for i in range(dims.m) for _ in range(dims[i])]
    return sorted(set(permutations(base)))


def check_eigen_stratum_transform(F: FqField, m: int, eps: int, lam: int) -> dict:
    """Transform of the indicator of {T^m = lam} versus K^m(lam * lam') on the dual, dims all one."""
    dims = GradedDims(m, (1,) * m)
    space = quiver_space(F, dims, eps)
    f = FuncTable.indicator(space, scalar_cycle(F, dims, eps) == lam)
    fh = fourier(f)
    dual_lam = scalar_cycle(F, dims, -eps)
    klo = {mu: cyc_to_array(kloosterman(m, F, int(F.mul[lam, mu]))) for mu in range(1, F.q)}
    mismatches = 0
    checked = 0
    for mu in range(1, F.q):
        sel = dual_lam == mu
        checked += int(sel.sum())
        mismatches += int((fh.values[sel] != klo[mu][None, :]).any(axis=1).sum())
    return {"points_checked": checked, "mismatches": mismatches, "ok": mismatches == 0 and checked == (F.q - 1) ** m}


def random_invariant_function(
    F: FqField, dims: GradedDims, eps: int, rng: np.random.Generator, bound: int = 2
) -> FuncTable:
    """Integer values drawn per rational orbit from [-bound, bound], redrawn until nonzero."""
    orbits = enumerate_rational_orbits(F, dims, eps)
    space = quiver_space(F, dims, eps)
    while True:
        vals = np.zeros((space.size, F.p - 1), dtype=np.int64)
        for o in orbits:
            vals[o.points] = rng.integers(-bound, bound + 1, size=F.p - 1)
        if vals.any():
            return FuncTable(space, vals)
