"""Command-line front end.

Exit codes: 0 success, 1 bad input or parameters, 2 zero pivot or singular
matrix, 3 failed verification (mismatch, degeneracy or a failing catalog case).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import corpus, fileio, oracle
from .core import (
    AveError,
    AveInstance,
    BadParameter,
    DimensionTooLarge,
    SingularMatrix,
    StructureClass,
    TriDiagMatrix,
    ZeroPivot,
    classify,
    inf_norm,
    is_tridiagonal,
    signature_string,
)
from .sge_dense import sge_solve
from .sge_tridiag import as_tridiag, tridiag_sge_solve

EXIT_OK, EXIT_INPUT, EXIT_PIVOT, EXIT_VERIFY = 0, 1, 2, 3
VERIFY_RTOL = 1e-10

KIND_ALIASES = {
    "1": StructureClass.NormBelowHalf,
    "2": StructureClass.IrreducibleNormAtMostHalf,
    "3": StructureClass.DiagDominantNormAtMostTwoThirds,
    "4": StructureClass.TridiagonalNormBelowOne,
}
KIND_ALIASES.update({k.name: k for k in KIND_ALIASES.values()})
DEFAULT_NORM = {
    StructureClass.NormBelowHalf: 0.45,
    StructureClass.IrreducibleNormAtMostHalf: 0.5,
    StructureClass.DiagDominantNormAtMostTwoThirds: 2.0 / 3.0,
    StructureClass.TridiagonalNormBelowOne: 0.95,
}
BENCH_FIELDS = ["n", "method", "wall_time", "arith_ops", "aux_ops", "residual"]


def _sizes(text: str) -> list[int]:
    try:
        out = [int(float(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return out


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _kind(text: str) -> StructureClass:
    try:
        return KIND_ALIASES[text]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown class {text!r}; use 1-4 or a class name"
        ) from None


def _emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        json.dump(report, out, indent=2)
        out.write("\n")
        return
    width = max(len(k) for k in report)
    for k, v in report.items():
        if isinstance(v, float):
            v = fileio.fmt(v)
        elif isinstance(v, list):
            v = " ".join(fileio.fmt(x) if isinstance(x, float) else str(x) for x in v)
        out.write(f"{k.ljust(width)}  {v}\n")


def _floats_out(a) -> list[float]:
    return [float(x) for x in np.asarray(a)]


# -- subcommands -----------------------------------------------------------------


def pick_method(inst: AveInstance, method: str) -> str:
    if method != "auto":
        return method
    if isinstance(inst.matrix, TriDiagMatrix) or is_tridiagonal(inst.matrix):
        return "tridiag"
    return "dense"


def solve_instance(inst: AveInstance, method: str = "auto"):
    method = pick_method(inst, method)
    if method == "tridiag":
        return tridiag_sge_solve(as_tridiag(inst))
    return sge_solve(inst)


def verify(inst: AveInstance, z, max_n: int) -> tuple[str, int]:
    """Compare ``z`` with the enumeration oracle; returns (verdict, exit code)."""
    if inst.n > max_n:
        return f"skipped (n > {max_n})", EXIT_OK
    en = oracle.enumerate_solutions(inst, limit=max(max_n, 1))
    if en.degenerate:
        return f"degenerate ({len(en.singular_signatures)} singular signatures)", EXIT_VERIFY
    if en.count != 1:
        return f"not uniquely solvable ({en.count} solutions)", EXIT_VERIFY
    ref = en.solutions[0]
    err = float(np.abs(z - ref).max() / max(1.0, np.abs(ref).max()))
    if err > VERIFY_RTOL:
        return f"mismatch (relative error {err:.3e})", EXIT_VERIFY
    return f"ok (relative error {err:.3e})", EXIT_OK


def cmd_solve(args) -> int:
    inst = fileio.read_instance(args.file)
    sol = solve_instance(inst, args.method)
    report = {
        "method": sol.method,
        "n": sol.n,
        "structure": sol.structure.name,
        "inf_norm": inf_norm(inst.matrix),
        "norm_warning": sol.norm_warning,
        "residual_inf": sol.residual_inf,
        "arith_ops": sol.flops,
        "comparisons": sol.comparisons,
        "queue_ops": sol.queue_ops,
        "signature": signature_string(sol.signature),
        "permutation": [int(i) for i in sol.permutation],
        "z": _floats_out(sol.z),
    }
    code = EXIT_OK
    if args.verify_oracle:
        report["oracle"], code = verify(inst, sol.z, args.max_oracle_n)
    if sol.norm_warning:
        print("warning: ||S||_inf >= 1, result is not guaranteed", file=sys.stderr)
    _emit(report, args.json)
    return code


def cmd_classify(args) -> int:
    m = fileio.read_matrix(args.file)
    kind = classify(m)
    if args.json:
        _emit({"structure": kind.name, "inf_norm": inf_norm(m)}, True)
    else:
        print(kind.name)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = fileio.read_instance(args.file)
    en = oracle.enumerate_solutions(inst, limit=args.max_oracle_n)
    report = {
        "n": inst.n,
        "solution_count": en.count,
        "degenerate": en.degenerate,
        "singular_signatures": [signature_string(s) for s in en.singular_signatures],
    }
    for i, (z, sigs) in enumerate(zip(en.solutions, en.signatures)):
        report[f"solution_{i}"] = _floats_out(z)
        report[f"signatures_{i}"] = [signature_string(s) for s in sigs]
    _emit(report, args.json)
    return EXIT_VERIFY if en.degenerate else EXIT_OK


def cmd_rho_s(args) -> int:
    m = fileio.read_matrix(args.file)
    rho = oracle.sign_real_spectral_radius(m, limit=args.max_oracle_n)
    if args.report:
        rep = oracle.check_unique_solvability(m, limit=args.max_oracle_n, seed=args.seed)
        _emit(rep.as_dict(), args.json)
    elif args.json:
        _emit({"rho_s": rho}, True)
    else:
        print(fileio.fmt(rho))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.catalog:
        inst = corpus.catalog(args.catalog, n=args.n, eps=args.eps).instance
    elif args.archive:
        inst = corpus.archived(args.archive).instance
    else:
        norm = args.norm if args.norm is not None else DEFAULT_NORM[args.kind]
        inst, _ = corpus.gen_random(args.kind, args.n, norm, args.seed,
                                    zero_prob=args.zero_prob, symmetric=args.symmetric)
    text = fileio.format_instance(inst)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def run_catalog(sizes, epsilons):
    """Yield ``(id, n, eps, status)``; status is "pass", "fail" or "invalid"."""
    for cid in corpus.CATALOG:
        for n in sizes:
            for eps in epsilons:
                try:
                    case = corpus.catalog(cid, n=n, eps=eps, check=False)
                except BadParameter:
                    yield cid, n, eps, "invalid"
                    continue
                yield cid, n, eps, "pass" if case.check() else "fail"


def cmd_counterexamples(args) -> int:
    rows = list(run_catalog(args.sizes, args.eps))
    for aid in corpus.ARCHIVE:
        case = corpus.archived(aid)
        rows.append((aid, case.n, 0.0, "pass" if case.check() else "fail"))
    if args.json:
        json.dump([dict(id=r[0], n=r[1], eps=r[2], status=r[3]) for r in rows],
                  sys.stdout, indent=2)
        print()
    else:
        print(f"{'id':<20} {'n':>3} {'eps':>8}  status")
        for cid, n, eps, status in rows:
            print(f"{cid:<20} {n:>3} {eps:>8g}  {status}")
    return EXIT_VERIFY if any(r[3] == "fail" for r in rows) else EXIT_OK


def bench_instance(method: str, n: int, seed: int) -> AveInstance:
    if method == "tridiag":
        kind = StructureClass.TridiagonalNormBelowOne
    else:
        kind = StructureClass.NormBelowHalf
    return corpus.gen_random(kind, n, DEFAULT_NORM[kind], seed)[0]


def bench_record(method: str, n: int, seed: int) -> dict:
    inst = bench_instance(method, n, seed)
    t0 = time.perf_counter()
    sol = tridiag_sge_solve(inst) if method == "tridiag" else sge_solve(inst)
    wall = time.perf_counter() - t0
    aux = sol.queue_ops if method == "tridiag" else sol.comparisons
    return dict(n=n, method=method, wall_time=wall, arith_ops=sol.flops,
                aux_ops=aux, residual=sol.residual_inf)


def cmd_bench(args) -> int:
    methods = ["dense", "tridiag"] if args.method == "auto" else [args.method]
    if "tridiag" in methods:
        bench_record("tridiag", 4, args.seed)  # compile outside the timed runs
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(BENCH_FIELDS)
        for method in methods:
            for n in args.sizes:
                rec = bench_record(method, n, args.seed)
                w.writerow([rec["n"], rec["method"], repr(rec["wall_time"]),
                            rec["arith_ops"], rec["aux_ops"], repr(rec["residual"])])
                out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_convert_equilibrium(args) -> int:
    # Input uses the instance format: matrix A, then b on the ``c:`` line.
    src = fileio.read_instance(args.file)
    inst = oracle.equilibrium_to_ave(src.dense(), src.rhs)
    text = fileio.format_instance(inst)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="avesolve", description="Solve z - S|z| = c.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, oracle_n=12):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--max-oracle-n", type=int, default=oracle_n,
                        help="largest n handed to the enumeration oracle")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("solve", help="signed Gaussian elimination")
    sp.add_argument("file")
    sp.add_argument("--method", choices=["auto", "dense", "tridiag"], default="auto")
    sp.add_argument("--verify-oracle", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("classify", help="structure class of a matrix or instance file")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("oracle", help="all solutions by signature enumeration")
    sp.add_argument("file")
    common(sp, oracle_n=oracle.ENUM_LIMIT)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("rho-s", help="sign-real spectral radius")
    sp.add_argument("file")
    sp.add_argument("--report", action="store_true",
                    help="full unique-solvability report")
    common(sp, oracle_n=oracle.RHO_LIMIT)
    sp.set_defaults(func=cmd_rho_s)

    sp = sub.add_parser("gen", help="write a random, catalog or archived instance")
    sp.add_argument("--kind", type=_kind, default=StructureClass.NormBelowHalf)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--norm", type=float, default=None)
    sp.add_argument("--zero-prob", type=float, default=0.0)
    sp.add_argument("--symmetric", action="store_true")
    sp.add_argument("--catalog", choices=list(corpus.CATALOG))
    sp.add_argument("--archive", choices=list(corpus.ARCHIVE))
    sp.add_argument("--eps", type=float, default=1e-3)
    sp.add_argument("-o", "--output")
    common(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("counterexamples", help="run the counterexample catalog")
    sp.add_argument("--sizes", type=_sizes, default=[2, 3, 5, 10])
    sp.add_argument("--eps", type=_floats, default=[1e-3, 1e-1])
    common(sp)
    sp.set_defaults(func=cmd_counterexamples)

    sp = sub.add_parser("bench", help="timing and operation counts as CSV")
    sp.add_argument("--method", choices=["auto", "dense", "tridiag"], default="auto")
    sp.add_argument("--sizes", type=_sizes, default=[100, 200, 400])
    sp.add_argument("-o", "--output")
    common(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("convert-equilibrium",
                        help="turn Ax + max(0, x) = b into an AVE instance")
    sp.add_argument("file")
    sp.add_argument("-o", "--output")
    common(sp)
    sp.set_defaults(func=cmd_convert_equilibrium)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ZeroPivot, SingularMatrix) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIVOT
    except (fileio.ParseError, BadParameter, DimensionTooLarge, corpus.UnknownId) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
