"""Worked examples outside the quiver family.

* the split quadric, with the self-dual function f0 and the transforms of the
  level sets {(x, x)/2 = lam};
* the graded symplectic pair: T in sp(V), V = V0 + V1 with dim V0 = 2, T
  swapping V0 and V1, under Sp(V0) x Sp(V1);
* self-adjoint operators for a symplectic form, under Sp(V);
* strictly lower triangular 4 x 4 matrices under the upper unitriangular group,
  paired with strictly upper triangular matrices.

Each matrix space is cut out of M_d(F_q) by linear conditions and coordinatised
by the pivot entries of a reduced echelon basis, so that reading those entries
off a matrix in the space returns its coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np

from . import fqlinalg as la
from .actions import check_budget, coords_to_index, linear_perm, orbit_partition, point_coords
from .cyclotomic import CycNum, array_to_cyc, canon, cyc_to_array, full_mul, lift
from .finitefield import FqField
from .invariants import InvariantBasis, q_power_exponent, solve_biorbital, subspaces
from .transform import FuncTable, SpaceDescriptor, fourier, fourier_at, kloosterman, pairing_dual

Matrix = la.Matrix


# ---------------------------------------------------------------------------
# linear spaces of matrices


@dataclass(frozen=True)
class MatrixSpace:
    """A subspace of M_d(F_q) with a reduced echelon basis.

    ``pivots[j]`` is the entry (row, col) where basis matrix j has a 1 and every
    other basis matrix has a 0.
    """

    field: FqField
    d: int
    basis: tuple
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def assemble(self, coords: np.ndarray) -> np.ndarray:
        """Matrices sum_j x_j B_j for a batch of coordinate rows, shape (n, d, d)."""
        F = self.field
        out = np.zeros((coords.shape[0], self.d, self.d), dtype=np.int64)
        for j, B in enumerate(self.basis):
            Bj = np.asarray(B, dtype=np.int64)
            out = F.add[out, F.mul[coords[:, j, None, None], Bj[None]]]
        return out

    def matrix(self, x: Sequence[int]) -> Matrix:
        return self.assemble(np.asarray([x], dtype=np.int64))[0].tolist()

    def coords_of(self, X: Matrix) -> list[int]:
        return [int(X[r][c]) for r, c in self.pivots]

    def contains(self, X: Matrix) -> bool:
        return la.is_zero(la.mat_add(self.field, X, la.mat_scale(self.field, self.field.neg[1], self.matrix(self.coords_of(X)))))

    def conjugation_matrix(self, g: Matrix, ginv: Matrix) -> Matrix:
        """Row i holds the coordinates of g B_i g^{-1} (read at the pivots)."""
        F = self.field
        return [self.coords_of(la.mat_mul(F, la.mat_mul(F, g, B), ginv)) for B in self.basis]

    def tags(self, name: str) -> tuple:
        return tuple((name, r + 1, c + 1) for r, c in self.pivots)


def matrix_subspace(F: FqField, d: int, conditions: Callable[[Matrix], list[int]]) -> MatrixSpace:
    """The kernel of a linear map M_d -> F_q^k, given as a function on matrices."""
    units = []
    for r in range(d):
        for c in range(d):
            E = la.zeros(d, d)
            E[r][c] = 1
            units.append(conditions(E))
    k = len(units[0])
    A = [[units[v][i] for v in range(d * d)] for i in range(k)]
    ker = la.kernel(F, A, d * d)
    red, piv = la.rref(F, ker) if ker else ([], [])
    basis = tuple(tuple(tuple(row[r * d : (r + 1) * d]) for r in range(d)) for row in red[: len(piv)])
    pivots = tuple(divmod(c, d) for c in piv)
    return MatrixSpace(F, d, tuple([list(map(list, B)) for B in basis]), pivots)


def trace_pairing(X: MatrixSpace, Y: MatrixSpace) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """tr(B_i B'_j) as a monomial pairing: the matching index and coefficient per coordinate."""
    F = X.field
    perm, coeffs = [], []
    for B in X.basis:
        row = []
        for Bp in Y.basis:
            P = la.mat_mul(F, B, Bp)
            t = 0
            for i in range(X.d):
                t = int(F.add[t, P[i][i]])
            row.append(t)
        nz = [j for j, v in enumerate(row) if v]
        if len(nz) != 1:
            raise ValueError("trace form is not monomial in these coordinates")
        perm.append(nz[0])
        coeffs.append(row[nz[0]])
    if sorted(perm) != list(range(Y.dim)):
        raise ValueError("trace form is degenerate in these coordinates")
    return tuple(perm), tuple(coeffs)


def _transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)]


def _flat(F: FqField, *mats: Matrix) -> list[int]:
    return [int(v) for M in mats for row in M for v in row]


def symplectic_gram(n: int) -> Matrix:
    """Block diagonal with n blocks [[0,1],[-1,0]] (basis e_1, f_1, e_2, f_2, ...)."""
    J = la.zeros(2 * n, 2 * n)
    for i in range(n):
        J[2 * i][2 * i + 1] = 1
        J[2 * i + 1][2 * i] = -1
    return J


def _reduce_matrix(F: FqField, A: Matrix) -> Matrix:
    """Replace the integer -1 by its field index."""
    return [[int(F.neg[1]) if v == -1 else int(v) for v in row] for row in A]


def projective_points(F: FqField, n: int) -> list[list[int]]:
    """Nonzero vectors of F_q^n whose first nonzero coordinate is 1."""
    out = []
    for v in product(range(F.q), repeat=n):
        nz = next((x for x in v if x), None)
        if nz == 1:
            out.append(list(v))
    return out


def transvections(F: FqField, J: Matrix) -> list[Matrix]:
    """x -> x + c <v, x> v for every line v and every c != 0; they generate Sp(J)."""
    d = len(J)
    out = []
    for v in projective_points(F, d):
        vJ = la.mat_mul(F, [v], J)[0]
        for c in range(1, F.q):
            M = la.identity(d)
            for i in range(d):
                for j in range(d):
                    M[i][j] = int(F.add[M[i][j], F.mul[c, F.mul[v[i], vJ[j]]]])
            out.append(M)
    return out


def _block_diag(*blocks: Matrix) -> Matrix:
    d = sum(len(b) for b in blocks)
    out = la.zeros(d, d)
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return out


def _orbits(space: MatrixSpace, gens: list[Matrix], budget: int | None) -> tuple[np.ndarray, list[np.ndarray], np.ndarray]:
    F = space.field
    size = check_budget(F.q, space.dim, budget)
    coords = point_coords(F.q, space.dim)
    perms = [linear_perm(F, space.dim, space.conjugation_matrix(g, la.inverse(F, g)), coords) for g in gens]
    labels, orbits = orbit_partition(size, perms)
    return labels, orbits, coords


def _self_dual_descriptor(space: MatrixSpace, name: str, meta: dict) -> SpaceDescriptor:
    perm, coeffs = trace_pairing(space, space)
    tags = space.tags(name)
    return SpaceDescriptor(space.field, tags, tags, perm, coeffs, meta, meta)


def _nilpotent(F: FqField, mats: np.ndarray) -> np.ndarray:
    return la.batch_is_zero(la.batch_power(F, mats, mats.shape[-1]))



# ---------------------------------------------------------------------------
# the split quadric


@dataclass(frozen=True)
class QuadraticSpace:
    """F_q^N, N = 2n >= 4, with the split form sum_i x_{2i} y_{2i+1} + x_{2i+1} y_{2i}."""

    field: FqField
    N: int

    def __post_init__(self) -> None:
        if self.field.p == 2:
            raise ValueError("the quadric needs q odd")
        if self.N < 4 or self.N % 2:
            raise ValueError("N must be even and at least 4")

    def gram(self) -> Matrix:
        G = la.zeros(self.N, self.N)
        for i in range(0, self.N, 2):
            G[i][i + 1] = G[i + 1][i] = 1
        return G

    def descriptor(self) -> SpaceDescriptor:
        """U identified with its dual through the form itself."""
        tags = tuple(("x", j) for j in range(self.N))
        perm = tuple(j ^ 1 for j in range(self.N))
        meta = {"kind": "quadric", "N": self.N}
        return SpaceDescriptor(self.field, tags, tags, perm, (1,) * self.N, meta, meta)

    def half_norm(self, coords: np.ndarray | None = None) -> np.ndarray:
        """(x, x)/2 = sum_i x_{2i} x_{2i+1} at every point."""
        F = self.field
        if coords is None:
            coords = point_coords(F.q, self.N)
        acc = np.zeros(coords.shape[0], dtype=np.int64)
        for i in range(0, self.N, 2):
            acc = F.add[acc, F.mul[coords[:, i], coords[:, i + 1]]]
        return acc


def quadric_f0(Q: QuadraticSpace) -> FuncTable:
    """1 on the nonzero isotropic vectors, 1 + q^{(N-2)/2} at 0, 0 elsewhere."""
    q = Q.field.q
    vals = (Q.half_norm() == 0).astype(np.int64)
    vals[0] = 1 + q ** ((Q.N - 2) // 2)
    return FuncTable.from_integers(Q.descriptor(), vals)


def quadric_check(N: int, field: FqField, lam: int | None = None, budget: int | None = None) -> dict:
    """Self-duality of f0, the level-set transforms, and the constrained solution space."""
    Q = QuadraticSpace(field, N)
    F = field
    q, p = F.q, F.p
    check_budget(q, N, budget)
    space = Q.descriptor()
    if pairing_dual(space) != space:  # pragma: no cover - structural invariant
        raise AssertionError("quadric space is not self-dual")
    coords = point_coords(q, N)
    hn = Q.half_norm(coords)

    # point count of the cone
    n_iso = int((hn == 0).sum())
    expected_iso = q ** (N - 1) + q ** (N // 2) - q ** (N // 2 - 1)

    # f0 is self-dual up to the omitted normalisation q^{N/2}
    f0 = quadric_f0(Q)
    f0_hat = fourier(f0)
    self_dual = bool(np.array_equal(f0_hat.values, f0.values * q ** (N // 2)))

    # level sets Q_lam against K^2(lam lam') on the non-isotropic points
    lams = [lam] if lam is not None else list(range(1, q))
    klo = {c: cyc_to_array(kloosterman(2, F, c)) for c in range(1, q)}
    expected_exp = (N - 2) // 2
    level_reports = []
    lhs_all, rhs_all = [], []
    for lm in lams:
        if not 0 < lm < q:
            raise ValueError("lambda must be a nonzero field element")
        fh = fourier(FuncTable.indicator(space, hn == lm))
        sel = hn != 0
        rhs = np.stack([klo[int(F.mul[lm, mu])] for mu in hn[sel]])
        lhs = fh.values[sel]
        lhs_all.append(lhs)
        rhs_all.append(rhs)
        level_reports.append(
            {
                "lambda": int(lm),
                "points_checked": int(sel.sum()),
                "mismatches": int((lhs != rhs * q**expected_exp).any(axis=1).sum()),
            }
        )
    lhs_cat = np.concatenate(lhs_all)
    rhs_cat = np.concatenate(rhs_all)
    colinear, scalar = _colinear_rows(p, lhs_cat, rhs_cat)
    q_exp = q_power_exponent(scalar, q) if scalar is not None else None
    kloosterman_ok = colinear and all(r["mismatches"] == 0 for r in level_reports)

    # functions of the orbit type supported on the cone whose transform is too
    orbits = [np.array([0]), np.nonzero((hn == 0) & (np.arange(len(hn)) > 0))[0]]
    solved = solve_biorbital(InvariantBasis(space, orbits, ["zero", "cone"]), hn == 0)
    spanned_by_f0 = False
    if solved.dimension == 1:
        a, b = solved.basis[0]
        spanned_by_f0 = bool(b) and a / b == CycNum.from_int(p, 1 + q ** ((N - 2) // 2))

    # spot checks against direct summation
    spot = [0, 1, q**N - 1, (q**N) // 2]
    spot_ok = all(fourier_at(f0, coords[i].tolist()) == f0_hat.value(i) for i in spot)

    report = {
        "case": "quadric",
        "q": q,
        "N": N,
        "isotropic_points": n_iso,
        "isotropic_points_expected": expected_iso,
        "point_count_ok": n_iso == expected_iso,
        "f0_at_zero": int(f0.values[0, 0]),
        "f0_self_dual": self_dual,
        "f0_scalar_exponent": N // 2,
        "levels": level_reports,
        "kloosterman_colinear": colinear,
        "kloosterman_scalar": str(scalar) if scalar is not None else None,
        "kloosterman_q_exponent": q_exp,
        "kloosterman_expected_q_exponent": expected_exp,
        "kloosterman_ok": bool(kloosterman_ok and q_exp == expected_exp),
        "solution_dimension": solved.dimension,
        "solution_spanned_by_f0": spanned_by_f0,
        "spot_checks_ok": spot_ok,
    }
    report["ok"] = bool(
        report["point_count_ok"]
        and self_dual
        and report["kloosterman_ok"]
        and solved.dimension == 1
        and spanned_by_f0
        and spot_ok
        and solved.verified
    )
    return report


def _colinear_rows(p: int, lhs: np.ndarray, rhs: np.ndarray) -> tuple[bool, CycNum | None]:
    """Whether lhs = c * rhs row by row for a single c in Q(zeta_p)."""
    nz = np.nonzero(rhs.any(axis=1))[0]
    if len(nz) == 0:
        return (not lhs.any(), None)
    i = int(nz[0])
    left = canon(full_mul(lift(lhs), lift(rhs[i : i + 1])))
    right = canon(full_mul(lift(rhs), lift(lhs[i : i + 1])))
    return bool(np.array_equal(left, right)), array_to_cyc(p, lhs[i]) / array_to_cyc(p, rhs[i])


# ---------------------------------------------------------------------------
# graded symplectic pair


def symplectic_pair_space(F: FqField, n: int = 2) -> tuple[MatrixSpace, Matrix]:
    """E = {T in sp(V) : T V0 in V1, T V1 in V0}, dim V0 = 2, dim V1 = 2n."""
    d = 2 + 2 * n
    J = _reduce_matrix(F, symplectic_gram(n + 1))

    def conditions(T: Matrix) -> list[int]:
        sym = la.mat_add(F, la.mat_mul(F, _transpose(T), J), la.mat_mul(F, J, T))
        diag0 = [T[i][j] for i in range(2) for j in range(2)]
        diag1 = [T[i][j] for i in range(2, d) for j in range(2, d)]
        return _flat(F, sym) + diag0 + diag1

    return matrix_subspace(F, d, conditions), J


def _lagrangians(F: FqField, J1: Matrix) -> list[Matrix]:
    d = len(J1)
    return [W for W in subspaces(F, d, d // 2) if la.is_zero(la.mat_mul(F, la.mat_mul(F, W, J1), _transpose(W)))]


def _annihilator(F: FqField, W: Matrix, n: int) -> np.ndarray:
    """Rows spanning {k : k . w = 0 for w in W}."""
    return np.asarray(la.kernel(F, W, n), dtype=np.int64).reshape(-1, n)


def symplectic_fibre_functions(F: FqField, space: MatrixSpace, n: int, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Point counts of the two resolutions over each T.

    rho(T): Lagrangian W in V1 with T V0 in W in ker T.
    rho'(T): lines W' in V0 with T V1 in W' in ker T.
    """
    T = space.assemble(coords)
    A = T[:, 2:, :2]  # V0 -> V1
    B = T[:, :2, 2:]  # V1 -> V0
    J1 = _reduce_matrix(F, symplectic_gram(n))
    rho = np.zeros(len(coords), dtype=np.int64)
    for W in _lagrangians(F, J1):
        Wt = np.asarray(_transpose(W), dtype=np.int64)
        K = _annihilator(F, W, 2 * n)
        inside_ker = la.batch_is_zero(la.batch_matmul(F, B, Wt[None]))
        contains_image = la.batch_is_zero(la.batch_matmul(F, K[None], A))
        rho += inside_ker & contains_image
    rho_p = np.zeros(len(coords), dtype=np.int64)
    for w in projective_points(F, 2):
        wc = np.asarray(w, dtype=np.int64).reshape(2, 1)
        K = _annihilator(F, [w], 2)
        inside_ker = la.batch_is_zero(la.batch_matmul(F, A, wc[None]))
        contains_image = la.batch_is_zero(la.batch_matmul(F, K[None], B))
        rho_p += inside_ker & contains_image
    return rho, rho_p


def symplectic_check(n: int, field: FqField, budget: int | None = None) -> dict:
    """Nilpotent orbits and biorbital functions of Sp(V0) x Sp(V1) on the odd part of sp(V)."""
    if n < 2:
        raise ValueError("need dim V1 = 2n >= 4")
    F = field
    space, J = symplectic_pair_space(F, n)
    d = space.d
    J0 = [row[:2] for row in J[:2]]
    J1 = [row[2:] for row in J[2:]]
    gens = [_block_diag(g, la.identity(2 * n)) for g in transvections(F, J0)]
    gens += [_block_diag(la.identity(2), g) for g in transvections(F, J1)]
    labels, orbits, coords = _orbits(space, gens, budget)
    mats = space.assemble(coords)
    nil = _nilpotent(F, mats)
    sq_zero = la.batch_is_zero(la.batch_matmul(F, mats, mats))
    kinds = np.where(~nil, "non-nilpotent", np.where(coords.any(axis=1), np.where(sq_zero, "O'", "O"), "0"))

    meta = {"kind": "symplectic_pair", "n": n}
    desc = _self_dual_descriptor(space, "T", meta)
    nil_orbits = [o for o in orbits if nil[o[0]]]
    orbit_kinds = [str(kinds[o[0]]) for o in nil_orbits]
    kinds_constant = all(len(set(kinds[o].tolist())) == 1 for o in orbits)
    ranks = {k: _rank_sequence(F, mats[o[0]].tolist()) for k, o in zip(orbit_kinds, nil_orbits)}
    group_order = _sp_order(F.q, 1) * _sp_order(F.q, n)
    sizes_divide = all(group_order % len(o) == 0 for o in orbits)

    solved = solve_biorbital(InvariantBasis(desc, nil_orbits, orbit_kinds), nil)
    basis = np.array([[c for c in vec] for vec in solved.basis], dtype=object).reshape(solved.dimension, len(nil_orbits))
    # functions of the space supported on the closure of O' = O' + {0}
    o_cols = [j for j, k in enumerate(orbit_kinds) if k == "O"]
    closure_small = solved.dimension - _cyc_rank(F.p, basis[:, o_cols]) if o_cols else solved.dimension

    rho, rho_p = symplectic_fibre_functions(F, space, n, coords)
    fibre = {}
    for name, vals in (("rho", rho), ("rho_prime", rho_p)):
        f = FuncTable.from_integers(desc, vals)
        fh = fourier(f)
        ok, scalar = fh.colinear_with(f)
        fibre[name] = {
            "values": {k: int(vals[o[0]]) for k, o in zip(orbit_kinds, nil_orbits)},
            "supported_on_nilpotents": bool(not vals[~nil].any()),
            "self_dual": ok,
            "scalar": str(scalar) if scalar is not None else None,
            "q_exponent": q_power_exponent(scalar, F.q) if scalar is not None else None,
        }

    report = {
        "case": "symplectic",
        "q": F.q,
        "n": n,
        "coordinates": space.dim,
        "orbits": len(orbits),
        "orbit_sizes_divide_group_order": sizes_divide,
        "labels_constant_on_orbits": kinds_constant,
        "nilpotent_orbits": len(nil_orbits),
        "nilpotent_orbit_kinds": orbit_kinds,
        "nilpotent_orbit_sizes": [len(o) for o in nil_orbits],
        "rank_sequences": ranks,
        "biorbital_dimension": solved.dimension,
        "biorbital_verified": solved.verified,
        "biorbital_basis": [[c.to_json() for c in vec] for vec in solved.basis],
        "closure_O_dimension": solved.dimension,
        "closure_O_prime_dimension": closure_small,
        "fibre_functions": fibre,
    }
    report["ok"] = bool(
        len(nil_orbits) == 3
        and sorted(orbit_kinds) == ["0", "O", "O'"]
        and solved.dimension == 2
        and solved.verified
        and closure_small == 1
        and kinds_constant
        and sizes_divide
    )
    return report


def _rank_sequence(F: FqField, M: Matrix) -> list[int]:
    out = []
    P = M
    while True:
        r = la.rank(F, P)
        out.append(r)
        if r == 0:
            return out
        P = la.mat_mul(F, P, M)


def _sp_order(q: int, n: int) -> int:
    out = q ** (n * n)
    for i in range(1, n + 1):
        out *= q ** (2 * i) - 1
    return out


def _cyc_rank(p: int, cols: np.ndarray) -> int:
    """Rank over Q(zeta_p) of a matrix of CycNum entries."""
    rows = [list(r) for r in cols]
    rank = 0
    ncols = cols.shape[1] if cols.ndim == 2 else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][c].inverse()
        rows[rank] = [v * inv for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# self-adjoint operators for a symplectic form


def symmetric_case_space(F: FqField, n: int, variant: str = "self_adjoint") -> tuple[MatrixSpace, Matrix]:
    """{T : <Tx, y> = <x, Ty>} (``self_adjoint``) or {T : <Tx, y> = -<x, Ty>} (``skew``)."""
    if variant not in ("self_adjoint", "skew"):
        raise ValueError(f"unknown variant {variant!r}")
    J = _reduce_matrix(F, symplectic_gram(n))
    sign = F.neg[1] if variant == "self_adjoint" else 1

    def conditions(T: Matrix) -> list[int]:
        return _flat(F, la.mat_add(F, la.mat_mul(F, _transpose(T), J), la.mat_scale(F, sign, la.mat_mul(F, J, T))))

    return matrix_subspace(F, 2 * n, conditions), J


def symmetric_case_check(field: FqField, n: int = 1, variant: str = "self_adjoint", budget: int | None = None) -> dict:
    """Sp(V)-biorbital functions on self-adjoint operators (exploratory: zero expected)."""
    F = field
    space, J = symmetric_case_space(F, n, variant)
    labels, orbits, coords = _orbits(space, transvections(F, J), budget)
    mats = space.assemble(coords)
    nil = _nilpotent(F, mats)
    desc = _self_dual_descriptor(space, "T", {"kind": "symmetric_case", "n": n, "variant": variant})
    nil_orbits = [o for o in orbits if nil[o[0]]]
    solved = solve_biorbital(InvariantBasis(desc, nil_orbits), nil)
    return {
        "case": "symmetric",
        "variant": variant,
        "q": F.q,
        "n": n,
        "coordinates": space.dim,
        "orbits": len(orbits),
        "nilpotent_points": int(nil.sum()),
        "nilpotent_orbits": len(nil_orbits),
        "biorbital_dimension": solved.dimension,
        "biorbital_verified": solved.verified,
        "expected_dimension": 0,
        "exploratory": True,
        "ok": solved.verified,
    }


# ---------------------------------------------------------------------------
# 4 x 4 unitriangular example


@dataclass(frozen=True)
class UnipotentContext:
    """h = strictly lower 4 x 4 (the functions live here), g = strictly upper (the dual)."""

    field: FqField
    d: int = 4

    @property
    def lower_entries(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.d) for j in range(self.d) if i > j]

    def descriptor(self) -> SpaceDescriptor:
        low = self.lower_entries
        tags = tuple(("b", i + 1, j + 1) for i, j in low)
        dual = tuple(("a", j + 1, i + 1) for i, j in low)
        meta = {"kind": "unipotent", "side": "lower", "d": self.d}
        dual_meta = {"kind": "unipotent", "side": "upper", "d": self.d}
        return SpaceDescriptor(self.field, tags, dual, tuple(range(len(low))), (1,) * len(low), meta, dual_meta)

    def lower_space(self) -> MatrixSpace:
        basis, pivots = [], []
        for i, j in self.lower_entries:
            E = la.zeros(self.d, self.d)
            E[i][j] = 1
            basis.append(E)
            pivots.append((i, j))
        return MatrixSpace(self.field, self.d, tuple(basis), tuple(pivots))

    def generators(self) -> list[Matrix]:
        out = []
        for i in range(self.d):
            for j in range(i + 1, self.d):
                for c in range(1, self.field.q):
                    g = la.identity(self.d)
                    g[i][j] = c
                    out.append(g)
        return out

    def coord(self, i: int, j: int) -> int:
        """Position of b_ij (1-based labels, i > j) in the coordinate list."""
        return self.lower_entries.index((i - 1, j - 1))


def unipotent_strata(ctx: UnipotentContext, coords: np.ndarray) -> np.ndarray:
    """Stratum number 1..5 of every point of h."""
    b31, b41, b42 = (coords[:, ctx.coord(*e)] for e in ((3, 1), (4, 1), (4, 2)))
    s = np.zeros(coords.shape[0], dtype=np.int64)
    s[(b31 == 0) & (b41 == 0) & (b42 == 0)] = 1
    s[(b31 == 0) & (b41 == 0) & (b42 != 0)] = 2
    s[(b41 == 0) & (b42 == 0) & (b31 != 0)] = 3
    s[b41 != 0] = 4
    s[(b41 == 0) & (b31 != 0) & (b42 != 0)] = 5
    return s


# coordinates of g (1-based entry labels) entering each case's linear forms
_FORM_ENTRIES = {1: ((1, 2), (2, 3), (3, 4)), 2: ((1, 2), (2, 4)), 3: ((1, 3), (3, 4)), 5: ((1, 3), (2, 4), (3, 4))}
# which coefficients of the form range over F_q^* rather than F_q
_FORM_NONZERO = {1: (), 2: (1,), 3: (0,), 5: (0, 1)}


def _upper_col(ctx: UnipotentContext, i: int, j: int) -> int:
    return ctx.coord(j, i)


def _support_locus(ctx: UnipotentContext, case: int, a: np.ndarray) -> tuple[bool, list[int] | None]:
    """Whether the rows a (upper coordinates) lie in the locus attached to the case."""
    F = ctx.field
    col = lambda i, j: a[:, _upper_col(ctx, i, j)]  # noqa: E731
    if case == 1:
        return True, None
    if case == 2:
        return bool(((col(2, 3) == 0) & (col(3, 4) == 0)).all()), None
    if case == 3:
        return bool(((col(1, 2) == 0) & (col(2, 3) == 0)).all()), None
    if case == 4:
        return bool(((col(1, 2) == 0) & (col(3, 4) == 0)).all()), None
    if not (col(2, 3) == 0).all():
        return False, None
    for x in range(1, F.q):
        for y in range(1, F.q):
            if (F.sub[F.mul[x, col(1, 2)], F.mul[y, col(3, 4)]] == 0).all():
                return True, [x, y]
    return False, None


def _character_form(ctx: UnipotentContext, case: int, a: np.ndarray, vals: np.ndarray) -> list[int] | None:
    """Coefficients c with vals = const * psi(sum c_k a_k) on the rows, or None."""
    F = ctx.field
    p = F.p
    entries = _FORM_ENTRIES[case]
    cols = [a[:, _upper_col(ctx, i, j)] for i, j in entries]
    full = lift(vals)
    shift = np.arange(p)[None, :]
    for c in product(range(F.q), repeat=len(entries)):
        if any(c[k] == 0 for k in _FORM_NONZERO[case]):
            continue
        form = np.zeros(a.shape[0], dtype=np.int64)
        for ck, colk in zip(c, cols):
            form = F.add[form, F.mul[ck, colk]]
        t = F.trace[form]
        untwisted = canon(np.take_along_axis(full, (shift + t[:, None]) % p, axis=1))
        if (untwisted == untwisted[0]).all():
            return list(c)
    return None


def unipotent_check(field: FqField, budget: int | None = None) -> dict:
    """Orbits of the unitriangular group on h and the transforms of their indicators."""
    F = field
    q = F.q
    ctx = UnipotentContext(F)
    space = ctx.lower_space()
    desc = ctx.descriptor()
    check_budget(q, space.dim, budget)
    coords = point_coords(q, space.dim)
    perms = []
    for g in ctx.generators():
        # b -> strictly lower part of g b g^{-1}; reading the pivots does the projection
        perms.append(linear_perm(F, space.dim, space.conjugation_matrix(g, la.inverse(F, g)), coords))
    labels, orbits = orbit_partition(len(coords), perms)
    strata = unipotent_strata(ctx, coords)
    expected_size = {1: 1, 2: q**2, 3: q**2, 4: q**4, 5: q**2}
    group_order = q**6

    dual_coords = coords  # upper coordinates share the ordering of the pairing
    per_stratum = {s: {"orbits": 0, "points": 0, "sizes_ok": True, "support_ok": True, "character_ok": True} for s in range(1, 6)}
    strata_constant = True
    sizes_divide = True
    examples = {}
    for o in orbits:
        s_vals = set(strata[o].tolist())
        if len(s_vals) != 1:
            strata_constant = False
        s = int(strata[o[0]])
        rec = per_stratum[s]
        rec["orbits"] += 1
        rec["points"] += len(o)
        rec["sizes_ok"] &= len(o) == expected_size[s]
        sizes_divide &= group_order % len(o) == 0
        fh = fourier(FuncTable.indicator(desc, o))
        supp = fh.support()
        a = dual_coords[supp]
        ok_support, locus = _support_locus(ctx, s, a)
        rec["support_ok"] &= ok_support
        if s != 4:
            form = _character_form(ctx, s, a, fh.values[supp])
            rec["character_ok"] &= form is not None
        else:
            form = None
        if s not in examples:
            examples[s] = {
                "orbit_min_point": coords[o[0]].tolist(),
                "size": len(o),
                "support_size": int(supp.sum()),
                "form": form,
                "locus_params": locus,
            }
    partition_ok = bool((strata > 0).all()) and sum(r["points"] for r in per_stratum.values()) == q**6
    # b with only b21, b32, b43 nonzero is fixed, and its transform is a pure character
    fixed = np.zeros(space.dim, dtype=np.int64)
    fixed[[ctx.coord(2, 1), ctx.coord(3, 2), ctx.coord(4, 3)]] = [1, min(2, q - 1), 1]
    idx = int(coords_to_index(q, fixed[None])[0])
    fh_fixed = fourier(FuncTable.indicator(desc, np.array([idx])))
    pts = point_coords(q, space.dim)
    spot = all(fourier_at(FuncTable.indicator(desc, np.array([idx])), pts[i].tolist()) == fh_fixed.value(i) for i in (0, 1, q**6 - 1))
    for rec in per_stratum.values():
        rec["sizes_ok"] = bool(rec["sizes_ok"])
        rec["support_ok"] = bool(rec["support_ok"])
        rec["character_ok"] = bool(rec["character_ok"])
    report = {
        "case": "unipotent",
        "q": q,
        "orbits": len(orbits),
        "strata_partition_ok": partition_ok,
        "strata_constant_on_orbits": strata_constant,
        "orbit_sizes_divide_group_order": bool(sizes_divide),
        "expected_orbit_sizes": {str(k): v for k, v in expected_size.items()},
        "strata": {str(k): v for k, v in per_stratum.items()},
        "examples": {str(k): v for k, v in examples.items()},
        "spot_checks_ok": spot,
    }
    report["ok"] = bool(
        partition_ok
        and strata_constant
        and sizes_divide
        and spot
        and all(r["sizes_ok"] and r["support_ok"] and r["character_ok"] for r in per_stratum.values())
    )
    return report
