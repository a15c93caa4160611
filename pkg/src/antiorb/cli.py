"""Command line driver.

Every subcommand prints one JSON report (sorted keys, so identical inputs give
byte-identical output) that embeds the configuration and the library version.
Exit codes: 0 all asserted checks passed, 1 a check failed, 2 usage error,
3 the point budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .actions import BudgetExceeded, point_budget
from .finitefield import FqField, field_of_order

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
Q_CHOICES = (3, 5, 7, 9, 25)


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: int | None = None
    k: int | None = None
    m: int | None = None
    dims: list[int] | None = None
    eps: int | None = None
    budget: int = field(default_factory=point_budget)
    seed: int = 0
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.budget <= 0:
            raise UsageError("budget must be positive")
        if self.dims is not None and self.m is not None and len(self.dims) != self.m:
            raise UsageError(f"dims {self.dims} must have length m = {self.m}")
        if self.eps not in (None, 1, -1):
            raise UsageError("eps must be +1 or -1")

    def to_json(self) -> dict:
        data = {k: v for k, v in asdict(self).items() if k not in ("extra", "out") and v is not None}
        data.update(self.extra)
        return data


# ---------------------------------------------------------------------------
# argument helpers


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from exc


def _parts(text: str) -> list[list[int]]:
    return [_int_list(chunk) for chunk in text.split(";") if chunk.strip()]


def _eps(text: str) -> int:
    if text in ("+1", "1", "+"):
        return 1
    if text in ("-1", "-"):
        return -1
    raise argparse.ArgumentTypeError("eps must be +1 or -1")


def _field(q: int) -> FqField:
    return field_of_order(q)


def _config(args: argparse.Namespace, **extra) -> RunConfig:
    F = _field(args.q) if getattr(args, "q", None) else None
    dims = getattr(args, "dims", None)
    m = getattr(args, "m", None)
    if dims is not None and m is None:
        m = len(dims)
    return RunConfig(
        command=args.command,
        p=F.p if F else None,
        k=F.k if F else None,
        m=m,
        dims=dims,
        eps=getattr(args, "eps", None),
        budget=args.budget if args.budget is not None else point_budget(),
        seed=getattr(args, "seed", 0) or 0,
        out=getattr(args, "out", None),
        extra={k: v for k, v in extra.items() if v is not None},
    )


def _common(p: argparse.ArgumentParser, q: bool = True, quiver: bool = False) -> None:
    if q:
        p.add_argument("--q", type=int, choices=Q_CHOICES, required=True, help="field order")
    if quiver:
        p.add_argument("--m", type=int, required=True, help="number of vertices")
        p.add_argument("--dims", type=_int_list, required=True, help="graded dimensions, e.g. 1,1")
        p.add_argument("--eps", type=_eps, default=1, help="orientation +1 or -1")
    p.add_argument("--budget", type=int, default=None, help="maximum number of points in a dense table")
    p.add_argument("--json", action="store_true", help="emit JSON (always on; kept for scripts)")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antiorb", description="Exact invariant-function computations on cyclic quivers and related examples.")
    parser.add_argument("--version", action="version", version=f"antiorb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="classify one representation")
    _common(p, quiver=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--coords", type=_int_list, help="block entries, blocks in vertex order, each row-major")
    grp.add_argument("--index", type=int, help="point index")

    p = sub.add_parser("orbits", help="enumerate rational orbits")
    _common(p, quiver=True)
    p.add_argument("--nilpotent", action="store_true", help="keep only nilpotent orbits")

    p = sub.add_parser("fourier", help="transform a stored function table")
    p.add_argument("--in", dest="inp", required=True, help="input table (.json or binary)")
    p.add_argument("--out", required=True, help="output table (.json or binary)")
    p.add_argument("--report", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("kloosterman", help="one Kloosterman sum")
    _common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True, help="field index of lambda (nonzero)")

    p = sub.add_parser("biorbital", help="dimension of the biorbital function space")
    _common(p, quiver=True)
    p.add_argument("--with-basis", action="store_true", help="include the basis vectors")

    p = sub.add_parser("induce", help="induce delta functions (flag counts) or stored tables")
    _common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps", type=_eps, default=1)
    p.add_argument("--parts", type=_parts, required=True, help="graded dims of the pieces, e.g. '1,0;0,1'")
    p.add_argument("--inputs", nargs="*", default=None, help="tables for the pieces (default: delta at 0)")
    p.add_argument("--table-out", default=None, help="write the induced table here")

    p = sub.add_parser("verify-commutation", help="transform versus induction or restriction")
    _common(p)
    p.add_argument("--kind", choices=("induction", "restriction"), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps", type=_eps, default=1)
    p.add_argument("--parts", type=_parts, required=True, help="pieces (induction) or the two halves of the split (restriction)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("case", help="worked examples")
    p.add_argument("name", choices=("quadric", "symplectic", "symmetric", "unipotent"))
    _common(p)
    p.add_argument("--n", type=int, default=None, help="N for the quadric, n for the symplectic and symmetric cases")
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    p.add_argument("--variant", choices=("self_adjoint", "skew"), default="self_adjoint")

    p = sub.add_parser("accept-all", help="run the acceptance suite")
    p.add_argument("--profile", choices=("desk",), default="desk")
    p.add_argument("--only", type=_int_list, default=None, help="subset of criterion numbers")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    return parser


# ---------------------------------------------------------------------------
# subcommands; each returns (passed, result dict, config)


def _cmd_decompose(args):
    from .quiver import GradedDims, QuiverRep, decompose, is_nilpotent, stratum_label

    F = _field(args.q)
    dims = GradedDims(args.m, tuple(args.dims))
    if args.coords is not None:
        rep = QuiverRep.from_coords(F, dims, args.eps, args.coords)
    else:
        if not 0 <= args.index < F.q ** dims.space_dim(args.eps):
            raise UsageError("index out of range")
        rep = QuiverRep.from_index(F, dims, args.eps, args.index)
    label = decompose(rep)
    result = {
        "representation": rep.to_json(),
        "index": rep.index(),
        "label": label.to_json(),
        "nilpotent": is_nilpotent(rep),
        "stratum": stratum_label(rep).to_json(),
        "degree_identity_holds": label.degree_identity_holds(),
    }
    return label.degree_identity_holds(), result, _config(args, coords=args.coords, index=args.index)


def _cmd_orbits(args):
    from .quiver import GradedDims, enumerate_rational_orbits

    F = _field(args.q)
    dims = GradedDims(args.m, tuple(args.dims))
    orbits = enumerate_rational_orbits(F, dims, args.eps, restrict_to_nilpotent=args.nilpotent, budget=args.budget)
    result = {"count": len(orbits), "total_points": sum(o.size for o in orbits), "orbits": [o.to_json() for o in orbits]}
    return True, result, _config(args, nilpotent=args.nilpotent)


def _load_table(path: str):
    from .transform import FuncTable

    blob = Path(path).read_bytes()
    if blob[:5] == b"AORB1":
        return FuncTable.from_bytes(blob)
    return FuncTable.from_json(json.loads(blob))


def _save_table(table, path: str) -> None:
    if path.endswith(".json"):
        Path(path).write_text(json.dumps(table.to_json(), sort_keys=True))
    else:
        Path(path).write_bytes(table.to_bytes())


def _cmd_fourier(args):
    from .actions import check_budget
    from .transform import fourier

    f = _load_table(args.inp)
    check_budget(f.space.field.q, f.space.N, args.budget)
    fh = fourier(f)
    _save_table(fh, args.out)
    result = {"input": args.inp, "output": args.out, "N": f.space.N, "norm_exponent": fh.norm_exponent, "support_size": int(fh.support().sum())}
    cfg = RunConfig(command="fourier", p=f.space.field.p, k=f.space.field.k, budget=args.budget or point_budget(), extra={"in": args.inp, "out": args.out})
    return True, result, cfg


def _cmd_kloosterman(args):
    from .transform import kloosterman, kloosterman_bound_ok

    F = _field(args.q)
    if args.m < 1:
        raise UsageError("m must be at least 1")
    if not 0 < args.lam < F.q:
        raise UsageError("lambda must be a nonzero field element index")
    val = kloosterman(args.m, F, args.lam)
    ok = kloosterman_bound_ok(args.m, F, val)
    result = {"value": str(val), "coeffs": val.to_json(), "bound": f"{args.m}*q^{(args.m - 1) / 2}", "bound_ok": ok}
    return ok, result, _config(args, m=args.m, **{"lambda": args.lam})


def _cmd_biorbital(args):
    from .invariants import biorbital_report
    from .quiver import GradedDims

    F = _field(args.q)
    rep = biorbital_report(F, GradedDims(args.m, tuple(args.dims)), args.eps, args.budget)
    result = {
        "dimension": rep["dimension"],
        "aperiodic_count": rep["aperiodic_count"],
        "aperiodic": rep["aperiodic_count"],
        "nilpotent_orbits": rep["nilpotent_orbits"],
        "match": rep["match"],
        "verified": rep["verified"],
        "basis": rep["basis"] if args.with_basis else [],
    }
    return rep["match"], result, _config(args)


def _check_parts(m: int, parts: list[list[int]]) -> None:
    for d in parts:
        if len(d) != m:
            raise UsageError(f"piece {d} must have {m} entries")
        if any(x < 0 for x in d):
            raise UsageError("dimensions must be non-negative")


def _cmd_induce(args):
    from .invariants import induce
    from .quiver import GradedDims
    from .transform import FuncTable, quiver_space

    F = _field(args.q)
    _check_parts(args.m, args.parts)
    if args.inputs:
        if len(args.inputs) != len(args.parts):
            raise UsageError("give one input table per piece")
        pieces = [_load_table(p) for p in args.inputs]
    else:
        pieces = [FuncTable.delta0(quiver_space(F, GradedDims(args.m, tuple(d)), args.eps)) for d in args.parts]
    out = induce(pieces)
    if args.table_out:
        _save_table(out, args.table_out)
    vals = [str(out.value(i)) for i in range(min(out.space.size, 1))]
    result = {
        "dims": list(np.sum(np.array(args.parts), axis=0).tolist()),
        "points": out.space.size,
        "support_size": int(out.support().sum()),
        "value_at_zero": vals[0],
        "total": str(out.total()),
    }
    return True, result, _config(args, m=args.m, eps=args.eps, parts=args.parts)


def _cmd_verify(args):
    from .invariants import check_fourier_induction_commutes, check_fourier_restriction_commutes, random_invariant_function
    from .quiver import GradedDims

    F = _field(args.q)
    _check_parts(args.m, args.parts)
    rng = np.random.default_rng(args.seed)
    if args.kind == "induction":
        parts = [random_invariant_function(F, GradedDims(args.m, tuple(d)), args.eps, rng) for d in args.parts]
        rep = check_fourier_induction_commutes(parts)
    else:
        if len(args.parts) != 2:
            raise UsageError("restriction needs exactly two halves")
        total = tuple(int(a + b) for a, b in zip(*args.parts))
        f = random_invariant_function(F, GradedDims(args.m, total), args.eps, rng)
        rep = check_fourier_restriction_commutes(f, (args.parts[0], args.parts[1]))
    return rep["colinear"], rep, _config(args, m=args.m, eps=args.eps, kind=args.kind, parts=args.parts)


def _cmd_case(args):
    from . import casestudies as cs

    F = _field(args.q)
    name = args.name
    if name == "quadric":
        N = args.n or 4
        if F.p == 2:
            raise UsageError("the quadric needs q odd")
        if N < 4 or N % 2:
            raise UsageError("N must be even and at least 4")
        rep = cs.quadric_check(N, F, args.lam, args.budget)
    elif name == "symplectic":
        rep = cs.symplectic_check(args.n or 2, F, args.budget)
    elif name == "symmetric":
        rep = cs.symmetric_case_check(F, args.n or 1, args.variant, args.budget)
    else:
        rep = cs.unipotent_check(F, args.budget)
    return rep["ok"], rep, _config(args, case=name, n=args.n, variant=args.variant if name == "symmetric" else None, **{"lambda": args.lam})


def _cmd_accept_all(args):
    from .acceptance import CRITERIA, run_all

    numbers = args.only or sorted(CRITERIA)
    bad = [n for n in numbers if n not in CRITERIA]
    if bad:
        raise UsageError(f"unknown criteria {bad}")
    results = run_all(numbers, echo=lambda line: print(line, file=sys.stderr))
    result = {
        "criteria": [r.to_json() for r in results],
        "passed": sum(r.passed for r in results),
        "failed": [r.number for r in results if not r.passed],
    }
    cfg = RunConfig(command="accept-all", budget=args.budget or point_budget(), extra={"profile": args.profile, "only": numbers})
    return not result["failed"], result, cfg


COMMANDS = {
    "decompose": _cmd_decompose,
    "orbits": _cmd_orbits,
    "fourier": _cmd_fourier,
    "kloosterman": _cmd_kloosterman,
    "biorbital": _cmd_biorbital,
    "induce": _cmd_induce,
    "verify-commutation": _cmd_verify,
    "case": _cmd_case,
    "accept-all": _cmd_accept_all,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    out_path = args.report if args.command == "fourier" else getattr(args, "out", None)
    if args.budget is not None and args.budget <= 0:
        parser.print_usage(sys.stderr)
        print("antiorb: error: budget must be positive", file=sys.stderr)
        return EXIT_USAGE
    saved = os.environ.get("ANTIORB_BUDGET")
    try:
        if args.budget is not None:
            os.environ["ANTIORB_BUDGET"] = str(args.budget)
        passed, result, cfg = COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        _emit({"tool": "antiorb", "version": __version__, "command": args.command, "status": "budget_exceeded", "error": {"what": exc.what, "needed": exc.needed, "budget": exc.budget}}, out_path)
        print(f"antiorb: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"antiorb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if saved is None:
            os.environ.pop("ANTIORB_BUDGET", None)
        else:
            os.environ["ANTIORB_BUDGET"] = saved
    status = "pass" if passed else "fail"
    if isinstance(result, dict) and result.get("exploratory"):
        status = "exploratory"
    if isinstance(result, dict) and result.get("degenerate"):
        status = "degenerate"
    _emit({"tool": "antiorb", "version": __version__, "command": args.command, "config": cfg.to_json(), "status": status, "result": result}, out_path)
    return EXIT_PASS if passed else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
