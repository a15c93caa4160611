"""The acceptance suite: thirteen exact checks shared by the CLI and the tests.

Every ``criterion_*`` function returns a :class:`CriterionResult` whose
``details`` are plain JSON data.  Randomised inputs come from seeded numpy
generators so repeated runs give identical reports.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .actions import coords_to_index, linear_perm, point_coords
from .casestudies import quadric_check, symplectic_check, unipotent_check
from .finitefield import field_of_order
from .invariants import (
    biorbital_report,
    check_eigen_stratum_transform,
    check_fourier_induction_commutes,
    check_fourier_restriction_commutes,
    flag_count_function,
    flag_types,
    random_invariant_function,
)
from .quiver import GradedDims, decompose, eigen_locus_counts, enumerate_rational_orbits, gl_order, gv_generators, nilpotent_mask
from .quiver import QuiverRep
from .segments import enumerate_multisegments, hat_bijection, hat_unbijection, is_aperiodic
from .transform import FuncTable, fourier, kloosterman, kloosterman_bound_ok, quiver_space

SEEDS = (0, 1, 2, 3, 4)
INDUCTION_SPLITS = (((1, 1), (1, 1)), ((1, 0), (0, 1), (1, 1)))
# two-step splits of (2,2) covering both induction configurations: the coarse
# (1,1) | (1,1) and the first step (1,0) | (1,2) of the finer flag
RESTRICTION_SPLITS = (((1, 1), (1, 1)), ((1, 0), (1, 2)))


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.name}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed, "details": self.details}


def _timed(number: int, name: str, body: Callable[[], tuple[bool, dict]]) -> CriterionResult:
    start = time.perf_counter()
    passed, details = body()
    return CriterionResult(number, name, bool(passed), details, time.perf_counter() - start)


# ---------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    def body():
        rows = []
        for q in (3, 5):
            r = quadric_check(4, field_of_order(q))
            rows.append({"q": q, "f0_at_zero": r["f0_at_zero"], "self_dual_times_q2": r["f0_self_dual"], "solution_dimension": r["solution_dimension"], "spanned_by_f0": r["solution_spanned_by_f0"]})
        ok = all(r["self_dual_times_q2"] and r["solution_dimension"] == 1 and r["spanned_by_f0"] for r in rows)
        return ok, {"runs": rows}

    return _timed(1, "quadric function is self-dual and spans the constrained space", body)


def criterion_2() -> CriterionResult:
    def body():
        rows = []
        for q in (3, 5):
            r = quadric_check(4, field_of_order(q))
            rows.append(
                {
                    "q": q,
                    "points_checked": sum(lv["points_checked"] for lv in r["levels"]),
                    "mismatches": sum(lv["mismatches"] for lv in r["levels"]),
                    "colinear": r["kloosterman_colinear"],
                    "scalar": r["kloosterman_scalar"],
                    "q_exponent": r["kloosterman_q_exponent"],
                }
            )
        ok = all(r["colinear"] and r["mismatches"] == 0 and r["q_exponent"] == 1 for r in rows)
        return ok, {"runs": rows, "note": "transform of 1_{Q_lam} equals q^{(N-2)/2} K^2(lam lam') at every non-isotropic point"}

    return _timed(2, "level-set transforms of the quadric are Kloosterman sums", body)


def criterion_3() -> CriterionResult:
    def body():
        worst = 0.0
        failures = []
        checked = 0
        for q in (3, 5, 7, 9):
            F = field_of_order(q)
            for m in (1, 2, 3, 4):
                bound = m * q ** ((m - 1) / 2)
                for lam in range(1, q):
                    val = kloosterman(m, F, lam)
                    checked += 1
                    worst = max(worst, max(abs(val.embed_complex(r)) / bound for r in range(1, F.p)))
                    if not kloosterman_bound_ok(m, F, val):
                        failures.append({"q": q, "m": m, "lambda": lam})
        return not failures, {"sums_checked": checked, "max_ratio_to_bound": round(worst, 9), "failures": failures}

    return _timed(3, "Kloosterman sums satisfy |K^m| <= m q^{(m-1)/2}", body)


def criterion_4() -> CriterionResult:
    def body():
        rows = []
        for q in (3, 5):
            F = field_of_order(q)
            for m in (2, 3):
                for eps in (1, -1):
                    for lam in range(1, q):
                        r = check_eigen_stratum_transform(F, m, eps, lam)
                        rows.append({"q": q, "m": m, "eps": eps, "lambda": lam, **r})
        return all(r["ok"] for r in rows), {"cases": len(rows), "points_checked": sum(r["points_checked"] for r in rows), "failures": [r for r in rows if not r["ok"]]}

    return _timed(4, "transform of an eigenvalue stratum is alpha_lam^* K^m", body)


def _biorbital_rows(configs) -> list[dict]:
    F = field_of_order(3)
    rows = []
    for m, nu in configs:
        for eps in (1, -1):
            r = biorbital_report(F, GradedDims(m, nu), eps)
            rows.append({"m": m, "dims": list(nu), "eps": eps, "dimension": r["dimension"], "aperiodic_count": r["aperiodic_count"], "verified": r["verified"], "match": r["match"]})
    return rows


def criterion_5() -> CriterionResult:
    def body():
        rows = _biorbital_rows([(2, (1, 1)), (2, (2, 1)), (2, (2, 2)), (3, (1, 1, 1))])
        return all(r["match"] for r in rows), {"runs": rows}

    return _timed(5, "biorbital dimension equals the aperiodic multisegment count", body)


def criterion_6() -> CriterionResult:
    def body():
        rows = _biorbital_rows([(1, (1,)), (1, (2,))])
        return all(r["dimension"] == 0 and r["aperiodic_count"] == 0 and r["verified"] for r in rows), {"runs": rows}

    return _timed(6, "no biorbital functions for the one-vertex quiver", body)


def criterion_7() -> CriterionResult:
    def body():
        F = field_of_order(3)
        rows = []
        for split in INDUCTION_SPLITS:
            for eps in (1, -1):
                for seed in SEEDS:
                    rng = np.random.default_rng(seed)
                    parts = [random_invariant_function(F, GradedDims(2, d), eps, rng) for d in split]
                    r = check_fourier_induction_commutes(parts)
                    rows.append({"split": [list(d) for d in split], "eps": eps, "seed": seed, **r})
        ok = all(r["colinear"] and not r["degenerate"] and r["q_exponent"] is not None for r in rows)
        return ok, {"runs": rows}

    return _timed(7, "induction commutes with the transform", body)


def criterion_8() -> CriterionResult:
    def body():
        F = field_of_order(3)
        dims = GradedDims(2, (2, 2))
        rows = []
        for split in RESTRICTION_SPLITS:
            for eps in (1, -1):
                for seed in SEEDS:
                    f = random_invariant_function(F, dims, eps, np.random.default_rng(seed))
                    r = check_fourier_restriction_commutes(f, split)
                    rows.append({"split": [list(d) for d in split], "eps": eps, "seed": seed, **r})
        ok = all(r["colinear"] and not r["degenerate"] and r["q_exponent"] is not None for r in rows)
        return ok, {"runs": rows}

    return _timed(8, "restriction commutes with the transform", body)


def criterion_9() -> CriterionResult:
    def body():
        F = field_of_order(3)
        rows = []
        for nu in ((1, 1), (2, 1)):
            dims = GradedDims(2, nu)
            for eps in (1, -1):
                for ft in flag_types(dims):
                    f = flag_count_function(F, dims, eps, ft)
                    g = flag_count_function(F, dims, -eps, ft)
                    ok, scalar = fourier(f).colinear_with(g)
                    nil_f = nilpotent_mask(F, dims, eps)
                    nil_g = nilpotent_mask(F, dims, -eps)
                    rows.append(
                        {
                            "dims": list(nu),
                            "eps": eps,
                            "flag_type": list(ft),
                            "colinear": ok,
                            "scalar": str(scalar) if scalar is not None else None,
                            "value_at_zero": int(f.values[0, 0]),
                            "vanishes_off_nilpotents": bool(not f.values[~nil_f].any() and not g.values[~nil_g].any()),
                        }
                    )
        ok = all(r["colinear"] and r["scalar"] is not None and r["vanishes_off_nilpotents"] for r in rows)
        return ok, {"runs": rows}

    return _timed(9, "flag-count functions are self-dual", body)


def criterion_10() -> CriterionResult:
    def body():
        rows = []
        for q in (3, 5):
            F = field_of_order(q)
            for m in (2, 3):
                for s in (1, 2):
                    for lam in range(1, q):
                        count_e, count_d = eigen_locus_counts(F, m, s, lam)
                        rows.append(
                            {
                                "q": q,
                                "m": m,
                                "s": s,
                                "lambda": lam,
                                "count_E": count_e,
                                "count_D": count_d,
                                "D_is_GL_power": count_d == gl_order(q, s) ** (m - 1),
                                "ok": count_e == count_d * q ** (s * s - s),
                            }
                        )
        return all(r["ok"] for r in rows), {"runs": rows}

    return _timed(10, "#E^{eps,lam} = #D q^{s^2-s}", body)


def criterion_11() -> CriterionResult:
    def body():
        rows = []
        for q in (3, 5):
            r = unipotent_check(field_of_order(q))
            rows.append({"q": q, "orbits": r["orbits"], "strata": r["strata"], "partition_ok": r["strata_partition_ok"], "ok": r["ok"]})
        return all(r["ok"] for r in rows), {"runs": rows}

    return _timed(11, "unitriangular 4x4 example: strata, orbit sizes, supports, characters", body)


def criterion_12() -> CriterionResult:
    def body():
        r = symplectic_check(2, field_of_order(3))
        keep = ("nilpotent_orbits", "nilpotent_orbit_kinds", "nilpotent_orbit_sizes", "rank_sequences", "biorbital_dimension", "closure_O_prime_dimension", "fibre_functions")
        return r["ok"], {k: r[k] for k in keep}

    return _timed(12, "graded symplectic example: three nilpotent orbits, two biorbital functions", body)


# ---------------------------------------------------------------------------
# criterion 13: property suite


def _prop_double_transform() -> dict:
    rows = []
    for q, m, nu in ((3, 2, (1, 1)), (5, 2, (1, 1)), (3, 2, (2, 1)), (3, 3, (1, 1, 1))):
        F = field_of_order(q)
        for eps in (1, -1):
            space = quiver_space(F, GradedDims(m, nu), eps)
            rng = np.random.default_rng(q * 100 + len(nu))
            f = FuncTable(space, rng.integers(-3, 4, size=(space.size, F.p - 1)))
            ff = fourier(fourier(f))
            rows.append(bool(np.array_equal(ff.values, f.negate_argument().values * q**space.N) and ff.space == space))
    return {"cases": len(rows), "ok": all(rows)}


def _prop_plancherel() -> dict:
    rows = []
    for q, m, nu in ((3, 2, (1, 1)), (5, 2, (1, 1)), (3, 2, (2, 1))):
        F = field_of_order(q)
        space = quiver_space(F, GradedDims(m, nu), 1)
        rng = np.random.default_rng(7 + q)
        f = FuncTable(space, rng.integers(-3, 4, size=(space.size, F.p - 1)))
        g = FuncTable(space, rng.integers(-3, 4, size=(space.size, F.p - 1)))
        lhs = fourier(f).multiply(fourier(g).conj()).total()
        rhs = f.multiply(g.conj()).total() * q**space.N
        rows.append(lhs == rhs)
    return {"cases": len(rows), "ok": all(rows)}


def _prop_invariance() -> dict:
    checked = 0
    ok = True
    for q, m, nu in ((3, 2, (1, 1)), (3, 2, (2, 1)), (3, 3, (1, 1, 1)), (5, 2, (1, 1))):
        F = field_of_order(q)
        dims = GradedDims(m, nu)
        for eps in (1, -1):
            space = quiver_space(F, dims, eps)
            dual_n = dims.space_dim(-eps)
            dual_coords = point_coords(q, dual_n)
            perms = [linear_perm(F, dual_n, M, dual_coords) for M in gv_generators(F, dims, -eps)]
            for orb in enumerate_rational_orbits(F, dims, eps):
                fh = fourier(FuncTable.indicator(space, orb.points))
                ok &= all(np.array_equal(fh.values[p], fh.values) for p in perms)
                checked += 1
    return {"orbits_checked": checked, "ok": bool(ok)}


def _dim_vectors(m: int, total: int):
    if m == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _dim_vectors(m - 1, total - first):
            yield (first,) + rest


def _prop_hat_round_trips() -> dict:
    checked = 0
    ok = True
    for m in (1, 2, 3):
        for total in range(0, 7):
            for nu in _dim_vectors(m, total):
                for tilde in enumerate_multisegments(m, nu):
                    pair = hat_bijection(tilde)
                    ok &= hat_unbijection(pair) == tilde and is_aperiodic(pair.sigma) and pair.dims() == tuple(nu)
                    checked += 1
    return {"multisegments_checked": checked, "ok": bool(ok)}


def _prop_label_constancy() -> dict:
    checked = 0
    ok = True
    for q, m, nu in ((3, 1, (2,)), (3, 2, (1, 1)), (3, 2, (2, 1)), (3, 2, (2, 2)), (3, 3, (1, 1, 1)), (5, 2, (1, 1))):
        F = field_of_order(q)
        dims = GradedDims(m, nu)
        for eps in (1, -1):
            n = dims.space_dim(eps)
            coords = point_coords(q, n)
            seen = set()
            for orb in enumerate_rational_orbits(F, dims, eps):
                labels = {decompose(QuiverRep.from_coords(F, dims, eps, coords[i].tolist())) for i in orb.points}
                ok &= labels == {orb.label}
                key = orb.label
                ok &= key not in seen
                seen.add(key)
                checked += len(orb.points)
    return {"points_checked": checked, "ok": bool(ok)}


def criterion_13() -> CriterionResult:
    def body():
        props = {
            "double_transform": _prop_double_transform(),
            "plancherel": _prop_plancherel(),
            "invariance_preserved": _prop_invariance(),
            "hat_round_trips": _prop_hat_round_trips(),
            "label_constancy": _prop_label_constancy(),
        }
        return all(p["ok"] for p in props.values()), props

    return _timed(13, "property suite", body)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
    13: criterion_13,
}


def run_all(numbers=None, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for k in numbers or sorted(CRITERIA):
        res = CRITERIA[k]()
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
