from __future__ import annotations

import numpy as np
import pytest

from antiorb import casestudies as cs
from antiorb import fqlinalg as la
from antiorb.actions import coords_to_index, linear_perm, orbit_partition, point_coords
from antiorb.cyclotomic import CycNum
from antiorb.finitefield import get_field
from antiorb.transform import FuncTable, fourier, kloosterman

F3 = get_field(3)
F5 = get_field(5)


def naive_transform(space, f_vals, y):
    """sum_x psi(kappa(x, y)) f(x) by a plain loop over CycNum values."""
    F = space.field
    coords = point_coords(F.q, space.N)
    acc = CycNum.zero(F.p)
    for i, x in enumerate(coords):
        if f_vals[i]:
            k = 0
            for j, (c, pj) in enumerate(zip(space.pairing_coeffs, space.pairing_perm)):
                k = int(F.add[k, F.mul[c, F.mul[x[j], y[pj]]]])
            acc = acc + F.psi(k) * int(f_vals[i])
    return acc


# ---------------------------------------------------------------------------
# matrix spaces


def test_matrix_subspace_trace_zero():
    space = cs.matrix_subspace(F3, 2, lambda T: [int(F3.add[T[0][0], T[1][1]])])
    assert space.dim == 3
    for x in ([1, 0, 0], [0, 2, 1], [2, 2, 2]):
        M = space.matrix(x)
        assert space.coords_of(M) == x
        assert space.contains(M)
        assert F3.add[M[0][0], M[1][1]] == 0


def test_transvections_act_transitively_on_nonzero_vectors():
    J = cs._reduce_matrix(F3, cs.symplectic_gram(2))
    gens = cs.transvections(F3, J)
    for g in gens:
        assert la.mat_mul(F3, la.mat_mul(F3, cs._transpose(g), J), g) == J
    coords = point_coords(3, 4)
    # g acts on column vectors, so rows transform by g^T
    perms = [linear_perm(F3, 4, cs._transpose(g), coords) for g in gens]
    _, orbits = orbit_partition(81, perms)
    assert sorted(len(o) for o in orbits) == [1, 80]


# ---------------------------------------------------------------------------
# quadric


def test_quadratic_space_validation():
    with pytest.raises(ValueError):
        cs.QuadraticSpace(get_field(2, 2), 4)
    with pytest.raises(ValueError):
        cs.QuadraticSpace(F3, 2)
    with pytest.raises(ValueError):
        cs.QuadraticSpace(F3, 5)


@pytest.mark.parametrize("q", [3, 5])
def test_isotropic_point_count(q):
    Q = cs.QuadraticSpace(get_field(q), 4)
    assert int((Q.half_norm() == 0).sum()) == q**3 + q**2 - q


def test_quadric_f0_values_and_self_duality():
    Q = cs.QuadraticSpace(F3, 4)
    f0 = cs.quadric_f0(Q)
    assert int(f0.values[0, 0]) == 4
    assert fourier(f0) == f0.scale(9)


def test_quadric_level_set_example():
    # lambda = 1 and a point with (x,x)/2 = 1: the transform is 3 K^2(1) = -3
    Q = cs.QuadraticSpace(F3, 4)
    space = Q.descriptor()
    hn = Q.half_norm()
    f_vals = (hn == 1).astype(np.int64)
    x = [1, 1, 0, 0]
    assert kloosterman(2, F3, 1) == CycNum.from_int(3, -1)
    direct = naive_transform(space, f_vals, x)
    assert direct == CycNum.from_int(3, -3)
    fh = fourier(FuncTable.from_integers(space, f_vals))
    assert fh.value(int(coords_to_index(3, np.array(x)))) == direct


@pytest.mark.parametrize("q, N", [(3, 4), (5, 4), (3, 6)])
def test_quadric_check_reports(q, N):
    rep = cs.quadric_check(N, get_field(q))
    assert rep["ok"]
    assert rep["f0_at_zero"] == 1 + q ** ((N - 2) // 2)
    assert rep["solution_dimension"] == 1
    assert rep["kloosterman_q_exponent"] == (N - 2) // 2
    assert all(lv["mismatches"] == 0 for lv in rep["levels"])


def test_quadric_single_lambda_and_errors():
    rep = cs.quadric_check(4, F5, lam=2)
    assert [lv["lambda"] for lv in rep["levels"]] == [2]
    with pytest.raises(ValueError):
        cs.quadric_check(4, F3, lam=0)


# ---------------------------------------------------------------------------
# graded symplectic pair


def test_symplectic_pair_space_structure():
    space, J = cs.symplectic_pair_space(F3, 2)
    assert space.dim == 8
    for B in space.basis:
        lhs = la.mat_add(F3, la.mat_mul(F3, cs._transpose(B), J), la.mat_mul(F3, J, B))
        assert la.is_zero(lhs)
        assert all(B[i][j] == 0 for i in range(2) for j in range(2))
        assert all(B[i][j] == 0 for i in range(2, 6) for j in range(2, 6))
    perm, coeffs = cs.trace_pairing(space, space)
    assert sorted(perm) == list(range(8))
    assert all(c for c in coeffs)


def test_symplectic_check():
    rep = cs.symplectic_check(2, F3)
    assert rep["ok"]
    assert rep["nilpotent_orbits"] == 3
    assert rep["nilpotent_orbit_kinds"][0] == "0"  # T = 0 is point 0, the first orbit
    assert rep["rank_sequences"]["O"] == [4, 2, 0]
    assert rep["rank_sequences"]["O'"] == [2, 0]
    assert rep["biorbital_dimension"] == 2
    assert rep["closure_O_prime_dimension"] == 1
    rho = rep["fibre_functions"]["rho"]
    rho_p = rep["fibre_functions"]["rho_prime"]
    # Lagrangian planes in a 4-dimensional symplectic space: (q+1)(q^2+1)
    assert rho["values"] == {"0": 40, "O'": 4, "O": 1}
    assert rho_p["values"] == {"0": 4, "O'": 1, "O": 0}
    assert rho["self_dual"] and rho_p["self_dual"]


def test_symplectic_needs_n_at_least_two():
    with pytest.raises(ValueError):
        cs.symplectic_check(1, F3)


# ---------------------------------------------------------------------------
# self-adjoint operators


@pytest.mark.parametrize("F", [F3, F5])
def test_symmetric_case_is_scalars_for_n_one(F):
    space, _ = cs.symmetric_case_space(F, 1)
    assert space.dim == 1
    rep = cs.symmetric_case_check(F, 1)
    assert rep["biorbital_dimension"] == 0
    assert rep["exploratory"] and rep["ok"]


def test_symmetric_case_n_two():
    rep = cs.symmetric_case_check(F3, 2)
    assert rep["coordinates"] == 6
    assert rep["biorbital_dimension"] == 0


def test_skew_variant_is_sl2():
    space, _ = cs.symmetric_case_space(F3, 1, "skew")
    assert space.dim == 3
    rep = cs.symmetric_case_check(F3, 1, "skew")
    assert rep["nilpotent_points"] == 9
    assert rep["biorbital_dimension"] == 1


def test_symmetric_case_rejects_unknown_variant():
    with pytest.raises(ValueError):
        cs.symmetric_case_space(F3, 1, "hermitian")


# ---------------------------------------------------------------------------
# unitriangular example


def test_unipotent_strata_partition():
    ctx = cs.UnipotentContext(F3)
    coords = point_coords(3, 6)
    strata = cs.unipotent_strata(ctx, coords)
    assert set(strata.tolist()) == {1, 2, 3, 4, 5}
    counts = np.bincount(strata, minlength=6)[1:].tolist()
    assert counts == [27, 54, 54, 486, 108]
    assert sum(counts) == 729


def test_unipotent_fixed_point_transform_is_a_character():
    ctx = cs.UnipotentContext(F3)
    desc = ctx.descriptor()
    x, y, z = 1, 2, 1
    b = np.zeros(6, dtype=np.int64)
    b[[ctx.coord(2, 1), ctx.coord(3, 2), ctx.coord(4, 3)]] = [x, y, z]
    fh = fourier(FuncTable.indicator(desc, coords_to_index(3, b[None])))
    a = point_coords(3, 6)
    col = lambda i, j: a[:, ctx.coord(j, i)]  # noqa: E731
    form = F3.add[F3.add[F3.mul[x, col(1, 2)], F3.mul[y, col(2, 3)]], F3.mul[z, col(3, 4)]]
    for i in range(0, 729, 37):
        assert fh.value(i) == F3.psi(int(form[i]))


def test_unipotent_zero_orbit_transform_is_constant():
    desc = cs.UnipotentContext(F3).descriptor()
    assert fourier(FuncTable.delta0(desc)) == FuncTable.constant(cs.pairing_dual(desc))


def test_unipotent_check_q3():
    rep = cs.unipotent_check(F3)
    assert rep["ok"]
    assert rep["strata"]["4"]["points"] // rep["strata"]["4"]["orbits"] == 81
    assert rep["examples"]["1"]["support_size"] == 729
    assert rep["orbits"] == 57
