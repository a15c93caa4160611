from __future__ import annotations

import numpy as np
import pytest

from antiorb import fqlinalg as la
from antiorb.actions import coords_to_index, linear_perm, point_coords
from antiorb.cyclotomic import CycNum
from antiorb.finitefield import get_field
from antiorb.invariants import (
    InvariantBasis,
    biorbital_report,
    biorbital_space,
    check_fourier_induction_commutes,
    check_fourier_restriction_commutes,
    exact_nullspace,
    flag_count_function,
    flag_types,
    induce,
    induce2,
    is_invariant,
    orbit_indicator,
    q_power_exponent,
    random_invariant_function,
    restrict,
    solve_biorbital,
    subspaces,
)
from antiorb.quiver import (
    GradedDims,
    QuiverRep,
    cycle_batch,
    enumerate_rational_orbits,
    gv_generators,
    nilpotent_mask,
    scalar_cycle,
    stratum_label,
)
from antiorb.segments import count_Pap
from antiorb.transform import FuncTable, fourier, product_space, quiver_space

F3 = get_field(3)
D11 = GradedDims(2, (1, 1))


def unit_dims(m, v):
    return GradedDims(m, tuple(1 if i == v else 0 for i in range(m)))


# ---------------------------------------------------------------------------
# oracles


def _rref_key(F, rows):
    if not rows:
        return ()
    red, piv = la.rref(F, rows)
    return tuple(tuple(r) for r in red[: len(piv)])


def brute_flag_count(rep: QuiverRep, flag_type) -> int:
    """Complete graded T-stable flags of the given type, by extending one vector at a time."""
    F = rep.field
    dims = rep.dims
    offs = np.cumsum((0,) + dims.dims)
    n = dims.total
    E = rep.endomorphism()
    vertex_vectors = {}
    for v in range(dims.m):
        vecs = []
        for vals in np.ndindex(*(F.q,) * dims[v]):
            if any(vals):
                x = [0] * n
                x[offs[v] : offs[v] + dims[v]] = list(vals)
                vecs.append(x)
        vertex_vectors[v] = vecs

    def stable(rows):
        images = [[row[0] for row in la.mat_mul(F, E, [[x] for x in w])] for w in rows]
        return la.rank(F, rows + images) == la.rank(F, rows)

    level = {(): 1}
    for v in flag_type:
        nxt: dict = {}
        for key, count in level.items():
            rows = [list(r) for r in key]
            seen = set()
            for x in vertex_vectors[v]:
                new = rows + [x]
                if la.rank(F, new) != len(new):
                    continue
                k = _rref_key(F, new)
                if k in seen:
                    continue
                seen.add(k)
                if stable([list(r) for r in k]):
                    nxt[k] = nxt.get(k, 0) + count
        level = nxt
    return sum(level.values())


def brute_restrict(f: FuncTable, split) -> np.ndarray:
    """Restriction by looping over every point of the big space."""
    dims = GradedDims(f.space.meta["m"], tuple(f.space.meta["dims"]))
    eps = f.space.meta["eps"]
    F = f.space.field
    d1, d2 = GradedDims(dims.m, tuple(split[0])), GradedDims(dims.m, tuple(split[1]))
    s1, s2 = quiver_space(F, d1, eps), quiver_space(F, d2, eps)
    out = np.zeros((s1.size * s2.size, F.p - 1), dtype=np.int64)
    for idx in range(f.space.size):
        T = QuiverRep.from_index(F, dims, eps, idx)
        sub, quo, ok = [], [], True
        for i in range(dims.m):
            B = T.block(i)
            r1, c1 = d1[i + eps], d1[i]
            for r, row in enumerate(B):
                for c, x in enumerate(row):
                    if r >= r1 and c < c1 and x:
                        ok = False
            sub.append([row[:c1] for row in B[:r1]])
            quo.append([row[c1:] for row in B[r1:]])
        if not ok:
            continue
        i1 = QuiverRep.from_blocks(F, d1, eps, sub).index()
        i2 = QuiverRep.from_blocks(F, d2, eps, quo).index()
        out[i1 + s1.size * i2] += f.values[idx]
    return out


# ---------------------------------------------------------------------------
# orbit indicators and biorbital functions


def test_orbit_indicator_examples():
    space = quiver_space(F3, D11, 1)
    assert orbit_indicator(space, np.array([0])) == FuncTable.delta0(space)
    assert orbit_indicator(space, np.arange(space.size)) == FuncTable.constant(space)
    orbits = enumerate_rational_orbits(F3, D11, 1)
    target = int(coords_to_index(3, np.array([1, 0])))
    orbit = next(o for o in orbits if target in o.points)
    table = orbit_indicator(space, orbit.points)
    assert int(table.values[:, 0].sum()) == 2 == orbit.size


@pytest.mark.parametrize(
    "m, nu, expected",
    [(1, (1,), 0), (1, (2,), 0), (2, (1, 1), 2), (2, (0, 0), 1), (2, (2, 1), 3), (3, (1, 1, 1), 6)],
)
def test_biorbital_dimension_examples(m, nu, expected):
    dims = GradedDims(m, nu)
    for eps in (1, -1):
        space = biorbital_space(F3, dims, eps)
        assert space.dimension == expected
        assert space.verified


def test_biorbital_matches_aperiodic_count_independently():
    rep = biorbital_report(F3, GradedDims(2, (2, 1)), 1)
    assert rep["aperiodic_count"] == count_Pap(2, (2, 1)) == 3
    assert rep["match"]


@pytest.mark.parametrize("nu", [(1, 1), (2, 1)])
def test_biorbital_functions_vanish_off_nilpotents(nu):
    dims = GradedDims(2, nu)
    space = biorbital_space(F3, dims, 1)
    nil = nilpotent_mask(F3, dims, 1)
    dual_nil = nilpotent_mask(F3, dims, -1)
    for f in space.functions():
        assert not f.values[~nil].any()
        assert not fourier(f).values[~dual_nil].any()
        assert not f.is_zero()


def test_exact_nullspace_small_system():
    # x + y = 0 over Q(zeta_3), two unknowns
    rows = np.array([[[1, 0], [1, 0]]])
    vecs = exact_nullspace(rows, 3)
    assert len(vecs) == 1
    a, b = vecs[0]
    assert a + b == CycNum.zero(3)


def test_solve_biorbital_on_hand_built_basis():
    # on the quiver with one vertex and one-dimensional V, delta_0 transforms to a constant
    dims = GradedDims(1, (1,))
    space = quiver_space(F3, dims, 1)
    solved = solve_biorbital(InvariantBasis(space, [np.array([0])]), nilpotent_mask(F3, dims, -1))
    assert solved.dimension == 0


def test_fourier_preserves_invariance():
    for dims in (D11, GradedDims(2, (2, 1))):
        for eps in (1, -1):
            space = quiver_space(F3, dims, eps)
            for orb in enumerate_rational_orbits(F3, dims, eps):
                assert is_invariant(fourier(orbit_indicator(space, orb.points)))


def test_random_invariant_functions_are_invariant_and_nonzero():
    rng = np.random.default_rng(0)
    for dims in (GradedDims(2, (1, 0)), D11, GradedDims(2, (2, 1))):
        f = random_invariant_function(F3, dims, 1, rng)
        assert is_invariant(f)
        assert not f.is_zero()


def test_transform_support_is_frobenius_stable():
    F9 = get_field(3, 2)
    dims = D11
    for eps in (1, -1):
        space = quiver_space(F9, dims, eps)
        dual_n = dims.space_dim(-eps)
        coords = point_coords(9, dual_n)
        frob = coords_to_index(9, np.vectorize(lambda x: F9.pow(int(x), 3))(coords))
        for orb in enumerate_rational_orbits(F9, dims, eps, restrict_to_nilpotent=True):
            fh = fourier(orbit_indicator(space, orb.points))
            assert np.array_equal(fh.values[frob], fh.values)
            zs = {stratum_label(QuiverRep.from_coords(F9, dims, -eps, coords[i].tolist())).z for i in np.nonzero(fh.support())[0]}
            assert max(zs) == max({stratum_label(QuiverRep.from_coords(F9, dims, -eps, coords[frob[i]].tolist())).z for i in np.nonzero(fh.support())[0]})


# ---------------------------------------------------------------------------
# induction


def test_subspace_counts_are_gaussian_binomials():
    assert len(subspaces(F3, 2, 1)) == 4
    assert len(subspaces(F3, 3, 1)) == 13
    assert len(subspaces(F3, 4, 2)) == 130
    assert len(subspaces(F3, 3, 0)) == 1


def test_induce_with_zero_space_is_identity():
    f1 = random_invariant_function(F3, D11, 1, np.random.default_rng(3))
    zero = FuncTable.delta0(quiver_space(F3, GradedDims(2, (0, 0)), 1))
    assert induce2(f1, zero) == f1
    assert induce2(zero, f1) == f1


@pytest.mark.parametrize("nu, eps", [((1, 1), 1), ((1, 1), -1), ((2, 1), 1), ((2, 1), -1)])
def test_flag_count_matches_direct_enumeration(nu, eps):
    dims = GradedDims(2, nu)
    for ft in flag_types(dims):
        f = flag_count_function(F3, dims, eps, ft)
        for idx in range(f.space.size):
            rep = QuiverRep.from_index(F3, dims, eps, idx)
            assert int(f.values[idx, 0]) == brute_flag_count(rep, ft)
            assert not f.values[idx, 1:].any()


def test_flag_count_examples():
    for ft in flag_types(D11):
        f = flag_count_function(F3, D11, 1, ft)
        assert int(f.values[0, 0]) == 1
        assert not f.values[~nilpotent_mask(F3, D11, 1)].any()
    # T = 0 on (2,1): flags of V_0 (q+1 lines) in either position
    f = flag_count_function(F3, GradedDims(2, (2, 1)), 1, (0, 0, 1))
    assert int(f.values[0, 0]) == 4


def test_flag_count_rejects_wrong_type():
    with pytest.raises(ValueError):
        flag_count_function(F3, D11, 1, (0, 0))


def test_induction_of_distinct_eigenvalue_pieces():
    # pieces with T^2 = 1 and T^2 = 2 on (1,1); the induced function is 1 exactly where
    # T^2 on V_0 has eigenvalues {1, 2}
    f1 = FuncTable.indicator(quiver_space(F3, D11, 1), scalar_cycle(F3, D11, 1) == 1)
    f2 = FuncTable.indicator(quiver_space(F3, D11, 1), scalar_cycle(F3, D11, 1) == 2)
    ind = induce([f1, f2])
    dims = GradedDims(2, (2, 2))
    C = cycle_batch(F3, dims, 1, point_coords(3, dims.space_dim(1)), 0)
    expected = np.array([la.charpoly(F3, c.tolist()) == (2, 0, 1) for c in C])  # (x-1)(x-2) = x^2 + 2
    assert np.array_equal(ind.values[:, 0], expected.astype(np.int64))
    assert not ind.values[:, 1:].any()


def test_induction_is_associative():
    pieces = [FuncTable.delta0(quiver_space(F3, unit_dims(2, v), 1)) for v in (0, 1, 0)]
    pieces[1] = random_invariant_function(F3, unit_dims(2, 1), 1, np.random.default_rng(5))
    left = induce2(induce2(pieces[0], pieces[1]), pieces[2])
    right = induce2(pieces[0], induce2(pieces[1], pieces[2]))
    assert left == right == induce(pieces)


def test_induce_rejects_non_invariant_input():
    space = quiver_space(F3, D11, 1)
    f = FuncTable.indicator(space, np.array([1]))
    with pytest.raises(ValueError):
        induce([f, f])


# ---------------------------------------------------------------------------
# restriction


def test_restrict_delta_and_constant():
    dims = GradedDims(2, (2, 2))
    space = quiver_space(F3, dims, 1)
    split = ((1, 1), (1, 1))
    res = restrict(FuncTable.delta0(space), split)
    assert res == FuncTable.delta0(res.space)
    # each of the two 2x2 blocks has one entry in the upper-right corner
    res1 = restrict(FuncTable.constant(space), split)
    assert res1 == FuncTable.constant(res1.space, 9)


@pytest.mark.parametrize("split", [((1, 1), (1, 1)), ((1, 0), (1, 2)), ((2, 1), (0, 1))])
def test_restrict_matches_brute_force(split):
    dims = GradedDims(2, (2, 2))
    f = random_invariant_function(F3, dims, 1, np.random.default_rng(11))
    assert np.array_equal(restrict(f, split).values, brute_restrict(f, split))


def test_restriction_of_induction_matches_brute_force():
    rng = np.random.default_rng(2)
    f = induce([random_invariant_function(F3, D11, -1, rng), random_invariant_function(F3, D11, -1, rng)])
    split = ((1, 1), (1, 1))
    assert np.array_equal(restrict(f, split).values, brute_restrict(f, split))


def test_restriction_ignores_choice_of_subspace():
    dims = GradedDims(2, (2, 2))
    f = random_invariant_function(F3, dims, 1, np.random.default_rng(4))
    gs = [[[1, 2], [1, 0]], [[0, 1], [1, 1]]]
    assert restrict(f, ((1, 1), (1, 1)), conj=gs) == restrict(f, ((1, 1), (1, 1)))


def test_restriction_is_levi_invariant():
    dims = GradedDims(2, (2, 2))
    f = random_invariant_function(F3, dims, 1, np.random.default_rng(8))
    res = restrict(f, ((1, 1), (1, 1)))
    s1 = quiver_space(F3, D11, 1)
    for M in gv_generators(F3, D11, 1):
        perm1 = linear_perm(F3, s1.N, M)
        full = (perm1[:, None] + s1.size * np.arange(s1.size)[None, :]).T.reshape(-1)
        assert np.array_equal(res.values[full], res.values)


def test_restrict_rejects_bad_split():
    space = quiver_space(F3, D11, 1)
    with pytest.raises(ValueError):
        restrict(FuncTable.delta0(space), ((1, 0), (1, 0)))


# ---------------------------------------------------------------------------
# compatibility with the transform


def test_induction_commutation_with_deltas():
    pieces = [FuncTable.delta0(quiver_space(F3, unit_dims(2, v), 1)) for v in (0, 1)]
    rep = check_fourier_induction_commutes(pieces)
    assert rep["colinear"] and not rep["degenerate"]
    assert rep["q_exponent"] is not None


@pytest.mark.parametrize("seed", [0, 1])
def test_induction_commutation_random(seed):
    rng = np.random.default_rng(seed)
    parts = [random_invariant_function(F3, D11, 1, rng) for _ in range(2)]
    rep = check_fourier_induction_commutes(parts)
    assert rep["colinear"] and rep["q_exponent"] == 2


def test_commutation_with_zero_input_is_degenerate():
    space = quiver_space(F3, D11, 1)
    zero = FuncTable.zeros(space)
    rep = check_fourier_induction_commutes([zero, FuncTable.delta0(space)])
    assert rep == {"colinear": True, "degenerate": True, "scalar": None, "q_exponent": None}
    assert check_fourier_restriction_commutes(zero, ((1, 0), (0, 1)))["degenerate"]


def test_restriction_commutation_examples():
    space = quiver_space(F3, D11, 1)
    rep = check_fourier_restriction_commutes(FuncTable.delta0(space), ((1, 0), (0, 1)))
    assert rep["colinear"]
    invertible = FuncTable.indicator(space, scalar_cycle(F3, D11, 1) != 0)
    rep = check_fourier_restriction_commutes(invertible, ((1, 0), (0, 1)))
    assert rep["colinear"]
    f = random_invariant_function(F3, GradedDims(2, (2, 1)), -1, np.random.default_rng(6))
    rep = check_fourier_restriction_commutes(f, ((1, 0), (1, 1)))
    assert rep["colinear"] and rep["q_exponent"] is not None


@pytest.mark.parametrize("nu", [(1, 1), (2, 1)])
def test_flag_counts_are_self_dual(nu):
    dims = GradedDims(2, nu)
    for ft in flag_types(dims):
        for eps in (1, -1):
            ok, scalar = fourier(flag_count_function(F3, dims, eps, ft)).colinear_with(flag_count_function(F3, dims, -eps, ft))
            assert ok
            assert q_power_exponent(scalar, 3) is not None


def test_q_power_exponent():
    assert q_power_exponent(CycNum.from_int(3, 27), 3) == 3
    assert q_power_exponent(CycNum.from_int(3, 1) / CycNum.from_int(3, 9), 3) == -2
    assert q_power_exponent(CycNum.from_int(3, 6), 3) is None
    assert q_power_exponent(CycNum.zeta(3), 3) is None


def test_product_space_layout_for_restriction():
    s = product_space([quiver_space(F3, D11, 1), quiver_space(F3, D11, 1)])
    assert s.N == 4 and s.size == 81
