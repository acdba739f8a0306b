"""Command-line front end.

Subcommands: ``barycenter``, ``sym``, ``dhs``, ``ergodic``, ``audit``.
Exit codes: 0 success, 2 malformed input, 3 numerical failure or failed
audit.  Floats are printed with 17 significant digits; infinity is
printed as ``inf`` (the string ``"inf"`` in JSON).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import Regime, barycenter, barycenter_oldstyle, classify
from .dhs import dhs_barycenter
from .errors import InputError, NumericalError, OutOfRange
from .ergodic import (
    DoublingSource,
    IIDSource,
    Observable,
    RotationSource,
    critical_probe,
    geometric_schedule,
    rows_to_csv,
    run_convergence,
)
from .measures import as_fraction, bernoulli, load_measure, quadrature_uniform
from .symmetric import maclaurin_chain, repetition_limit, sandwich_bounds, sym_mean
from . import audit as audit_mod


def fmt(v) -> str:
    """17-significant-digit text for a float; ``inf``/``nan`` literals."""
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _jsonable(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return fmt(obj)
        text = fmt(obj)
        return _Raw(text if any(ch in text for ch in ".en") else text + ".0")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


class _Raw(str):
    """Marker for preformatted numbers."""


def dumps(obj) -> str:
    """JSON text with every float written with 17 significant digits."""

    def enc(o):
        if isinstance(o, _Raw):
            return str(o)
        if isinstance(o, dict):
            return "{" + ", ".join(f"{json.dumps(k)}: {enc(v)}" for k, v in o.items()) + "}"
        if isinstance(o, list):
            return "[" + ", ".join(enc(v) for v in o) + "]"
        return json.dumps(o)

    return enc(_jsonable(obj))


# argument types


def _float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _positive_int(text: str) -> int:
    v = _int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return v


def _float_list(text: str) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty list")
    return [_float(p.strip()) for p in parts]


def _int_list(text: str) -> list[int]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty list")
    return [_positive_int(p.strip()) for p in parts]


def _uniform(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected a,b,n")
    return _float(parts[0]), _float(parts[1]), _int(parts[2])


# shared pieces


def _add_measure_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--measure", type=Path, help="JSON or CSV measure file")
    g.add_argument("--bernoulli", type=_float, metavar="P", help="(1-P) delta_0 + P delta_1")
    g.add_argument("--uniform", type=_uniform, metavar="A,B,N", help="N-node quadrature of uniform[A,B]")
    p.add_argument("--c", type=_float, required=True, help="parameter in [0, 1]")
    p.add_argument("--json", action="store_true", help="emit one JSON object")


def _measure(args):
    if args.measure is not None:
        return load_measure(args.measure)
    if args.bernoulli is not None:
        return bernoulli(args.bernoulli)
    a, b, n = args.uniform
    return quadrature_uniform(a, b, n)


def _param(c: float) -> float:
    if not 0.0 <= c <= 1.0:
        raise OutOfRange(f"--c must lie in [0, 1], got {c!r}")
    return c


def _print(text: str, out) -> None:
    out.write(text if text.endswith("\n") else text + "\n")


# subcommands


def cmd_barycenter(args, out, err) -> int:
    mu = _measure(args)
    c = _param(args.c)
    if args.method == "oldstyle":
        rep = barycenter_oldstyle(mu, c)
    else:
        rep = barycenter(mu, c)
    warning = None
    if args.near_critical_warn is not None and 0.0 < c < 1.0:
        gap = abs(float(mu.zero_mass - (1 - as_fraction(c))))
        if rep.regime is not Regime.CRITICAL and gap < args.near_critical_warn:
            warning = f"mass at 0 is within {gap:.3g} of 1 - c; the barycenter jumps at the critical line"
            err.write(f"warning: {warning}\n")
    if args.json:
        payload = {"value": rep.value, "regime": rep.regime.value}
        if rep.eta is not None:
            payload["eta"] = rep.eta
        if rep.rho is not None:
            payload["rho"] = rep.rho
        payload["iterations"] = rep.iterations
        payload["overflow"] = rep.overflow
        if warning:
            payload["warning"] = warning
        _print(dumps(payload), out)
    else:
        lines = [f"value {fmt(rep.value)}", f"regime {rep.regime.value}"]
        if rep.eta is not None:
            lines.append(f"eta {fmt(rep.eta)}")
        if rep.rho is not None:
            lines.append(f"rho {fmt(rep.rho)}")
        _print("\n".join(lines), out)
    return 0


def cmd_sym(args, out, err) -> int:
    x = args.values
    if args.maclaurin:
        chain = maclaurin_chain(x)
        if args.json:
            _print(dumps({"maclaurin": chain}), out)
        else:
            _print("k,sym\n" + "\n".join(f"{k},{fmt(v)}" for k, v in enumerate(chain, start=1)), out)
        return 0
    if args.k is None:
        raise OutOfRange("--k is required unless --maclaurin is given")
    if args.repeat is not None:
        rows = repetition_limit(x, args.k, args.repeat)
        if args.json:
            _print(dumps({"rows": [{"m": m, "sym": v} for m, v in rows]}), out)
        else:
            _print("m,sym\n" + "\n".join(f"{m},{fmt(v)}" for m, v in rows), out)
        return 0
    if args.sandwich:
        s = sandwich_bounds(x, args.k)
        if args.json:
            _print(dumps(s._asdict()), out)
        else:
            _print(",".join(fmt(v) for v in s), out)
        return 0
    v = sym_mean(x, args.k)
    _print(dumps({"value": v}) if args.json else fmt(v), out)
    return 0


def cmd_dhs(args, out, err) -> int:
    mu = _measure(args)
    c = _param(args.c)
    d = dhs_barycenter(mu, c)
    if args.gap:
        hs = barycenter(mu, c).value
        _print(dumps({"hs": hs, "dhs": d.value}) if args.json else f"{fmt(hs)},{fmt(d.value)}", out)
    elif args.json:
        _print(dumps({"value": d.value, "iterations": d.iterations, "residual": d.residual}), out)
    else:
        _print(fmt(d.value), out)
    return 0


def _source(args):
    obs = Observable(args.observable, q=args.q, a=args.a)
    if args.system == "rotation":
        return RotationSource(obs, alpha=args.alpha, omega0=args.omega0)
    if args.seed is None:
        raise OutOfRange(f"--seed is required for --system {args.system}")
    if args.system == "doubling":
        return DoublingSource(obs, args.seed)
    if args.measure is not None:
        mu = load_measure(args.measure)
    elif args.p is not None:
        mu = bernoulli(args.p)
    else:
        raise OutOfRange("--system iid needs --p or --measure")
    return IIDSource(mu, args.seed)


def cmd_ergodic(args, out, err) -> int:
    c = _param(args.c)
    src = _source(args)
    if args.schedule is not None:
        schedule = args.schedule
    else:
        schedule = geometric_schedule(args.n_max if args.n_max is not None else 10_000)
    kwargs = dict(max_cells=args.max_cells, over_limit=args.over_limit)
    law = src.law()
    if 0.0 < c < 1.0 and classify(law, c) is Regime.CRITICAL:
        rep = critical_probe(src, c, schedule, **kwargs)
        rows = rep.rows
        err.write(
            "critical parameter: no limit is asserted; tail-half ranges "
            f"sym [{fmt(rep.tail_sym_min)}, {fmt(rep.tail_sym_max)}], "
            f"hsm [{fmt(rep.tail_hsm_min)}, {fmt(rep.tail_hsm_max)}]\n"
        )
    else:
        rows = run_convergence(src, c, schedule, **kwargs)
    out.write(rows_to_csv(rows))
    return 0


def cmd_audit(args, out, err) -> int:
    if args.show_nonqa:
        demo = audit_mod.nonquasiaffine_demo()
        _print(f"# endpoints both have value {fmt(demo.endpoint_value)}; interior values exceed it", out)
        _print("t,value\n" + "\n".join(f"{fmt(t)},{fmt(v)}" for t, v in demo.rows), out)
        if args.trials == 0:
            return 0
    if args.seed is None:
        raise OutOfRange("--seed is required for the randomized audit")
    result = audit_mod.run_audit(args.trials, args.seed)
    lines = ["check,passed,failed"] + [f"{name},{p},{f}" for name, (p, f) in result.counts.items()]
    _print("\n".join(lines), out)
    if args.report is not None:
        try:
            args.report.write_text(dumps(result.as_dict()) + "\n")
        except OSError as exc:
            raise InputError(f"cannot write report: {exc}") from None
    if result.first_failure is not None:
        err.write("audit failed; first counterexample:\n" + dumps(result.first_failure) + "\n")
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hsbary", description="HS barycenters, symmetric means and DHS barycenters.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("barycenter", help="HS barycenter of a measure")
    _add_measure_flags(p)
    p.add_argument("--method", choices=("kernel", "oldstyle"), default="kernel")
    p.add_argument("--near-critical-warn", type=_float, metavar="EPS", help="warn when |mu(0) - (1 - c)| < EPS")
    p.set_defaults(func=cmd_barycenter)

    p = sub.add_parser("sym", help="symmetric mean of a tuple")
    p.add_argument("--values", type=_float_list, required=True, metavar="X1,X2,...")
    p.add_argument("--k", type=_int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--sandwich", action="store_true", help="print hsm_{k/n}, sym_k, upper bound")
    g.add_argument("--maclaurin", action="store_true", help="print sym_1 .. sym_n")
    g.add_argument("--repeat", type=_positive_int, metavar="M_MAX", help="sym_{km} of m-fold repetitions")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sym)

    p = sub.add_parser("dhs", help="DHS barycenter of a measure")
    _add_measure_flags(p)
    p.add_argument("--gap", action="store_true", help="print both the HS and DHS barycenters")
    p.set_defaults(func=cmd_dhs)

    p = sub.add_parser("ergodic", help="symmetric and HS means along an orbit (CSV)")
    p.add_argument("--system", choices=("iid", "rotation", "doubling"), required=True)
    p.add_argument("--c", type=_float, required=True)
    p.add_argument("--seed", type=_int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--schedule", type=_int_list, metavar="N1,N2,...")
    g.add_argument("--n-max", type=_positive_int, help="1-2-5 schedule up to N_MAX (default 10000)")
    p.add_argument("--p", type=_float, help="iid: Bernoulli parameter")
    p.add_argument("--measure", type=Path, help="iid: law as a measure file")
    p.add_argument("--observable", choices=("affine", "indicator"), default="affine")
    p.add_argument("--q", type=_float, default=0.5, help="indicator threshold")
    p.add_argument("--a", type=_float, default=1.0, help="indicator height")
    p.add_argument("--alpha", type=_float, default=(math.sqrt(5.0) - 1.0) / 2.0, help="rotation angle")
    p.add_argument("--omega0", type=_float, default=0.0, help="rotation start point")
    p.add_argument("--max-cells", type=_positive_int, default=10**8)
    p.add_argument("--over-limit", choices=("error", "skip"), default="error")
    p.set_defaults(func=cmd_ergodic)

    p = sub.add_parser("audit", help="randomized verification sweep")
    p.add_argument("--trials", type=_int, default=100)
    p.add_argument("--seed", type=_int)
    p.add_argument("--report", type=Path, help="write a JSON summary here")
    p.add_argument("--show-nonqa", action="store_true", help="print a segment showing non-quasi-affinity")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with np.errstate(all="ignore"):
            return args.func(args, out, err)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except (NumericalError, ArithmeticError) as exc:
        err.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return 3


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
