"""Command-line entry point: ``ncl <subcommand> ...``.

Exit codes: 0 pass, 1 verification failure, 2 usage or input error,
3 counting budget exceeded. Output is deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

from . import SCHEMA_VERSION
from . import poly as P
from .artin_char0 import CyclotomicField, cyclotomic_splitting, dedekind_local_factor
from .config import RunConfig
from .counting import BudgetExceeded
from .elliptic_ff import EllipticFamily, NoStabilization, elliptic_rh_verdict, l_polynomial
from .field_arith import enumerate_places, field_of_order
from .lfunctions import EVEN, ODD, LSeriesHandle, closed_form, euler_product_eval
from .motives import evaluate_expression
from .ntheory import is_prime
from .riemann_check import zeros_from_rational
from .varieties import VarietySpec, zeta_pipeline
from .verify import SUITES, run_suite
from .zeta_recover import AmbiguousWeight, ReconstructionError, local_rh_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

CSV_COLUMNS = ("s_re", "s_im", "B", "value_re", "value_im", "tail_bound")


class UsageError(ValueError):
    pass


def _emit(payload: dict, out) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    out.write(json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")


def _fraction_list(coeffs: Sequence) -> list[str]:
    return [str(c) for c in coeffs]


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot read {text!r} as a complex number") from exc


def _parse_q(text: str | None) -> int | None:
    if text is None or text.upper() == "Q":
        return None
    try:
        q = int(text)
        field_of_order(q)
    except ValueError as exc:
        raise UsageError(f"--q must be a prime power or 'Q', got {text!r}") from exc
    return q


def _config(args) -> RunConfig:
    return RunConfig.from_env(
        cache_dir=args.cache_dir, B=getattr(args, "B", None) or 6, identity_tol=args.identity_tol,
        cluster_tol=args.cluster_tol, budget=args.budget, fmt=args.format, threads=args.threads)


# --- subcommands ---------------------------------------------------------------------------

def cmd_places(args, cfg: RunConfig, out) -> int:
    F = field_of_order(args.q)
    places = enumerate_places(F, args.max_degree)
    if cfg.fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("degree", "norm", "place"))
        for pl in places:
            w.writerow((pl.degree, pl.norm, pl.to_text()))
    else:
        _emit({"q": args.q, "max_degree": args.max_degree, "count": len(places),
               "places": [pl.to_text() for pl in places]}, out)
    return EXIT_OK


def cmd_count(args, cfg: RunConfig, out) -> int:
    spec = VarietySpec.load(args.spec)
    vec = spec.counts(cfg.B, cfg.budget, cfg.cache(), cfg.threads)
    if cfg.fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("m", "N_m"))
        for m, n in enumerate(vec.counts, start=1):
            w.writerow((m, n))
    else:
        _emit({"q": vec.q, "B": vec.B, "counts": list(vec.counts), "variety": spec.canonical()}, out)
    return EXIT_OK


def cmd_zeta(args, cfg: RunConfig, out) -> int:
    spec = VarietySpec.load(args.spec)
    report = zeta_pipeline(spec, args.B, cfg.budget, cfg.cache(), cfg.cluster_tol, cfg.threads)
    rh = local_rh_check(report.blocks, spec.q, cfg.cluster_tol)
    _emit({
        "q": spec.q,
        "variety": spec.canonical(),
        "betti": list(report.betti) if report.betti else None,
        "counts": list(report.counts.counts),
        "zeta": {"num": _fraction_list(report.zeta.num), "den": _fraction_list(report.zeta.den),
                 "text": f"({P.format_poly(report.zeta.num, 'T')}) / ({P.format_poly(report.zeta.den, 'T')})"},
        "blocks": [b.to_json() for b in report.blocks],
        "rh": rh.to_json(),
    }, out)
    return EXIT_OK if rh.passed else EXIT_FAIL


def _s_values(args) -> list[complex]:
    values = [_parse_complex(s) for s in args.s or []]
    if args.grid:
        lo, hi, n = args.grid
        n = int(n)
        if n < 1:
            raise UsageError("grid needs at least one point")
        step = (hi - lo) / (n - 1) if n > 1 else 0.0
        values.extend(complex(lo + i * step, args.t) for i in range(n))
    if not values:
        raise UsageError("give at least one --s value or a --grid")
    return values


def cmd_lfun(args, cfg: RunConfig, out) -> int:
    q = _parse_q(args.q)
    motive = evaluate_expression(args.expr, q, args.base_dir)
    datum = motive.datum(args.parity)
    handle = LSeriesHandle(datum, cfg.B, closed_form(datum))
    rows = [euler_product_eval(handle, s, cfg.threads) for s in _s_values(args)]
    if cfg.fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow((repr(r.s.real), repr(r.s.imag), r.B, repr(r.value.real), repr(r.value.imag),
                        repr(r.tail_bound)))
    else:
        exact = None
        if handle.closed_form is not None:
            exact = {"num": _fraction_list(handle.closed_form.num), "den": _fraction_list(handle.closed_form.den)}
        table = []
        for r in rows:
            row = r.to_json()
            if handle.closed_form is not None:
                v = handle.closed_form.evaluate(complex(datum.q) ** (-r.s))
                row["closed_form_value"] = [v.real, v.imag]
            table.append(row)
        _emit({"expr": args.expr, "base": motive.base_name, "parity": args.parity, "B": cfg.B,
               "closed_form": exact, "rows": table}, out)
    return EXIT_OK


def cmd_elliptic(args, cfg: RunConfig, out) -> int:
    try:
        raw = json.loads(Path(args.spec).read_text())
        E = EllipticFamily.from_json(raw)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed curve spec: {exc}") from exc
    try:
        L = l_polynomial(E, args.cutoff, args.route)
    except NoStabilization as exc:
        _emit({"error": str(exc), "series": list(exc.series), "cutoff": args.cutoff}, out)
        return EXIT_FAIL
    verdict = elliptic_rh_verdict(L, E.field.q, cfg.identity_tol)
    _emit({"q": E.field.q, "curve": E.to_json(), **L.to_json(),
           "functional_equation_sign": L.functional_equation_sign(E.field.q),
           "symmetry_residual": L.symmetry_residual(E.field.q),
           "reductions": [r.to_json() for r in L.reductions],
           "verdict": verdict.to_json()}, out)
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_dedekind(args, cfg: RunConfig, out) -> int:
    if not is_prime(args.p):
        raise UsageError(f"--p must be prime, got {args.p}")
    K = CyclotomicField(args.d)
    factor = dedekind_local_factor(K, args.p)
    _emit({"d": args.d, "degree": K.degree, "p": args.p,
           "residue_degrees": list(cyclotomic_splitting(args.d, args.p)),
           "local_factor": list(factor), "text": P.format_poly(factor, "T")}, out)
    return EXIT_OK


def cmd_check_rh(args, cfg: RunConfig, out) -> int:
    q = _parse_q(args.q)
    if q is None:
        raise UsageError("check-rh needs a finite base field --q")
    motive = evaluate_expression(args.expr, q, args.base_dir)
    L = closed_form(motive.datum(args.parity))
    if L is None:
        raise UsageError("no exact rational form for this expression; RH verdicts need constant-family data")
    verdict = zeros_from_rational(L, q, args.parity, cfg.identity_tol)
    _emit({"expr": args.expr, "q": q, "L": {"num": _fraction_list(L.num), "den": _fraction_list(L.den)},
           **verdict.to_json()}, out)
    return EXIT_OK if verdict.passed else EXIT_FAIL


def _run_suites(names: Sequence[str], out, **params) -> int:
    results = [run_suite(n, **params) for n in names]
    _emit({"suites": [r.to_json() for r in results],
           "verdict": "pass" if all(r.passed for r in results) else "fail"}, out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_verify(args, cfg: RunConfig, out) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    return _run_suites(names, out)


def cmd_verify_finite1(args, cfg: RunConfig, out) -> int:
    return _run_suites(["finite1"], out, n_max=args.n, prime_bound=args.prime_bound)


# --- parser --------------------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--cache-dir", default=None, help="count cache directory (default: $NCL_CACHE_DIR)")
    common.add_argument("--budget", type=_positive, default=RunConfig.budget, help="max points enumerated per count")
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("--identity-tol", type=float, default=RunConfig.identity_tol)
    common.add_argument("--cluster-tol", type=float, default=RunConfig.cluster_tol)

    parser = argparse.ArgumentParser(prog="ncl", description="Noncommutative L-function toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("places", parents=[common], help="list places of F_q(t) up to a degree")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--max-degree", type=_positive, required=True)
    p.set_defaults(func=cmd_places)

    p = sub.add_parser("count", parents=[common], help="point counts N_1..N_B of a variety")
    p.add_argument("--spec", required=True)
    p.add_argument("--B", type=_positive, default=6)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("zeta", parents=[common], help="zeta function, weight blocks and local RH verdict")
    p.add_argument("--spec", required=True)
    p.add_argument("--B", type=_positive, default=None, help="number of counts (default: as many as needed)")
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("lfun", parents=[common], help="evaluate a truncated Euler product")
    p.add_argument("--expr", required=True, help='motive expression, e.g. "(sum (zeta k) (path 2))"')
    p.add_argument("--q", default=None, help="base field order, or Q (default)")
    p.add_argument("--parity", choices=(EVEN, ODD), default=EVEN)
    p.add_argument("--s", action="append", help="evaluation point, repeatable (e.g. 2 or 1.5+0.3j)")
    p.add_argument("--grid", nargs=3, type=float, metavar=("RE_LO", "RE_HI", "N"),
                   help="N real parts evenly spaced in [RE_LO, RE_HI]")
    p.add_argument("--t", type=float, default=0.0, help="imaginary part used with --grid")
    p.add_argument("--B", type=_positive, default=6, help="cutoff: place degree over F_q(t), prime bound over Q")
    p.add_argument("--base-dir", default=".", help="directory for (load ...) paths")
    p.set_defaults(func=cmd_lfun)

    p = sub.add_parser("elliptic", parents=[common], help="L-polynomial of y^2 = x^3 + A(t)x + B(t)")
    p.add_argument("--spec", required=True)
    p.add_argument("--cutoff", type=_positive, required=True)
    p.add_argument("--route", choices=("traces", "places"), default="traces")
    p.set_defaults(func=cmd_elliptic)

    p = sub.add_parser("dedekind", parents=[common], help="local factor of zeta_Q(zeta_d) at p")
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_dedekind)

    p = sub.add_parser("check-rh", parents=[common], help="RH verdict for a constant-family expression")
    p.add_argument("--expr", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--parity", choices=(EVEN, ODD), default=EVEN)
    p.add_argument("--base-dir", default=".")
    p.set_defaults(func=cmd_check_rh)

    p = sub.add_parser("verify", parents=[common], help="run an identity suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-finite1", parents=[common], help="group-algebra zeta products over Q")
    p.add_argument("--n", type=_positive, default=12)
    p.add_argument("--prime-bound", type=_positive, default=100)
    p.set_defaults(func=cmd_verify_finite1)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        return args.func(args, cfg, out)
    except BudgetExceeded as exc:
        print(f"ncl: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (AmbiguousWeight, ReconstructionError) as exc:
        print(f"ncl: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, KeyError, LookupError, OSError) as exc:
        print(f"ncl: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
