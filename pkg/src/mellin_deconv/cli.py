"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 violated assumption (inadmissible
``c``, unbounded weighted sup-norm of ``g``, ...), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

from .adaptive import GridMode, SelectionConfig, select_k
from .errors import DegenerateExperimentError, DomainError, QuadratureError, UnsupportedError
from .estimator import Sample, delta_curve, theta_hat
from .functionals import parse_functional, psi_decay, regime_classify
from .mellin import parse_model
from .scenario import load_scenario
from .simulation import rate_experiment, risk_at_n

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ASSUMPTION = 3
EXIT_NUMERIC = 4

_C_HELP = ("development point c of the Mellin transform; cdf and laplace need c < 1, "
           "survival needs c > 1, density needs M_c[f] integrable; c must also lie in the "
           "Mellin domain of the error law (beta: c > 0, loggamma: c < lam + 1, "
           "gamma: c > 1 - d, weibull: c > 1 - m, lognormal: any c)")
_ERROR_HELP = ("error law of U as name:param[:param...]: beta:b (integer b, polynomial "
               "Mellin decay of order b), loggamma:mu:a:lam (polynomial, order a), "
               "gamma:d, weibull:m, lognormal:mu:lam (exponential decay); "
               "aliases uniform, exp, pareto:mu:lam")


# ---------------------------------------------------------------------------
# output helpers


def _clean(obj):
    # JSON has no NaN/inf; they become null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON; floats use the shortest round-trip representation."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _atomic_write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def read_sample(path: str) -> Sample:
    """One positive number per line; blank lines are skipped."""
    fh = sys.stdin if path == "-" else open(path, encoding="utf-8")
    values = []
    with fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise ValueError(f"line {lineno}: {text!r} is not a number") from None
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"line {lineno}: {text!r} is not a positive finite number")
            values.append(v)
    if not values:
        raise ValueError(f"{path}: no observations")
    return Sample(values)


# ---------------------------------------------------------------------------
# subcommands


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--functional", required=True, choices=["density", "cdf", "survival", "laplace"],
                   help="target functional at x0: density f(x0), cdf F(x0), survival 1 - F(x0), "
                        "laplace E exp(-x0 X)")
    p.add_argument("--x0", type=float, required=True, help="evaluation point, x0 > 0")
    p.add_argument("--c", type=float, required=True, help=_C_HELP)
    p.add_argument("--error", required=True, help=_ERROR_HELP)


def _selection_args(p: argparse.ArgumentParser, adaptive_flag: bool) -> None:
    if adaptive_flag:
        mode = p.add_mutually_exclusive_group(required=True)
        mode.add_argument("--k", type=float, help="fixed spectral cut-off, k > 0")
        mode.add_argument("--adaptive", action="store_true",
                          help="choose k by the Goldenshluger-Lepski rule")
    p.add_argument("--chi", type=float, default=None,
                   help="penalty constant; the theoretical grid needs chi >= 72 "
                        "(default 72), smaller values are allowed only on the practical grid")
    p.add_argument("--grid", choices=[m.value for m in GridMode], default="theoretical",
                   help="theoretical: k <= sqrt(n)/log(n)^2 and ||g|| Delta(k) <= n; "
                        "practical: k <= sqrt(n) instead of the first cap (not certified)")
    p.add_argument("--max-k", type=int, default=None, help="additional cap on the cut-off grid")


def _config(args) -> SelectionConfig:
    chi = 72.0 if args.chi is None else args.chi
    return SelectionConfig(chi, args.grid, args.max_k)


def _common(args):
    spec = parse_functional(args.functional, args.x0)
    model = parse_model(args.error)
    return spec, model


def cmd_estimate(args) -> int:
    if args.k is not None and not (math.isfinite(args.k) and args.k > 0):
        raise ValueError(f"--k must be positive, got {args.k!r}")
    spec, model = _common(args)
    sample = read_sample(args.input)
    if getattr(args, "adaptive", False) or args.k is None:
        report = select_k(sample, spec, model, args.c, _config(args)).to_dict()
        report["kind"] = "selection"
    else:
        report = theta_hat(sample, spec, model, args.c, args.k).to_dict()
        report["diagnostics"].pop("seconds", None)
        report["kind"] = "estimate"
    report.update(functional=args.functional, x0=args.x0, error=str(model))
    _atomic_write(args.output, dumps(report))
    return EXIT_OK


def cmd_delta(args) -> int:
    spec, model = _common(args)
    ks = sorted(args.k)
    if ks[0] < 0:
        raise ValueError("--k values must be nonnegative")
    values = delta_curve(spec, model, args.c, ks)
    out = {"functional": args.functional, "x0": args.x0, "c": args.c, "error": str(model),
           "delta": [{"k": k, "delta": float(d)} for k, d in zip(ks, values)]}
    _atomic_write(args.output, dumps(out))
    return EXIT_OK


def cmd_regime(args) -> int:
    spec, model = _common(args)
    spec.c_interval().check(args.c, f"{spec.kind} functional")
    psi = psi_decay(spec, args.c)
    g = model.decay(args.c)
    out = {"functional": args.functional, "x0": args.x0, "c": args.c, "error": str(model),
           "regime": regime_classify(psi, g).value,
           "psi_decay": {"class": type(psi).__name__, **psi.__dict__},
           "error_decay": {"class": type(g).__name__,
                           **{k: v for k, v in g.__dict__.items() if k not in ("c_low", "c_up")}}}
    _atomic_write(args.output, dumps(out))
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario, n_list, doc = load_scenario(args.scenario)
    results, rows = [], []
    for n in n_list or [scenario.n]:
        sc = scenario.with_n(n)
        mse, se, k, rec = risk_at_n(sc, args.workers)
        results.append({"n": n, "mse": mse, "stderr": se, "k": k,
                        "k_mean": math.fsum(rec.ks) / len(rec.ks)})
        rows.extend(rec.rows(n))
    report = {"scenario": doc, "theta_true": scenario.theta_true, "results": results,
              "assumption_notes": scenario.assumption_notes()}
    _atomic_write(args.output, dumps(report))
    if args.csv:
        _atomic_write(args.csv, _csv_text(
            ["n", "replication", "k", "theta_hat", "theta_true", "squared_error"], rows))
    return EXIT_OK


def cmd_rates(args) -> int:
    scenario, n_list, doc = load_scenario(args.scenario)
    if n_list is None:
        raise ValueError("/n_list: the rates subcommand needs an n_list")
    rep = rate_experiment(scenario, n_list, s=args.smoothness, workers=args.workers)
    report = {"scenario": doc, "theta_true": scenario.theta_true, **rep.to_dict(),
              "assumption_notes": scenario.assumption_notes()}
    _atomic_write(args.output, dumps(report))
    if args.csv:
        _atomic_write(args.csv, _csv_text(["log_n", "log_mse", "stderr"], rep.csv_rows()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mellin-deconv",
        description="Estimate linear functionals of the density of X from samples of Y = X U "
                    "with a known error law U.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="spectral cut-off estimate at fixed or adaptive k")
    p.add_argument("input", help="sample file, one positive Y per line ('-' for stdin)")
    _model_args(p)
    _selection_args(p, adaptive_flag=True)
    p.add_argument("-o", "--output", help="report path (default stdout)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("select", help="Goldenshluger-Lepski cut-off selection with per-k table")
    p.add_argument("input", help="sample file, one positive Y per line ('-' for stdin)")
    _model_args(p)
    _selection_args(p, adaptive_flag=False)
    p.add_argument("-o", "--output", help="report path (default stdout)")
    p.set_defaults(func=cmd_estimate, k=None, adaptive=True)

    p = sub.add_parser("delta", help="variance proxy Delta(k) of a functional and error law")
    _model_args(p)
    p.add_argument("--k", type=float, nargs="+", required=True, help="cut-offs k >= 0")
    p.add_argument("-o", "--output", help="report path (default stdout)")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("regime", help="parametric or nonparametric regime of the pair")
    _model_args(p)
    p.add_argument("-o", "--output", help="report path (default stdout)")
    p.set_defaults(func=cmd_regime)

    for name, func, what in (("simulate", cmd_simulate, "Monte Carlo risk of a scenario"),
                             ("rates", cmd_rates, "risk slope in n for a scenario with n_list")):
        p = sub.add_parser(name, help=what)
        p.add_argument("scenario", help="scenario JSON file")
        p.add_argument("-o", "--output", help="report JSON path (default stdout)")
        p.add_argument("--csv", help=("per-replication CSV path" if name == "simulate"
                                      else "plot-ready CSV path (log_n,log_mse,stderr)"))
        p.add_argument("--workers", type=int, default=1,
                       help="threads for replications; results do not depend on it")
        if name == "rates":
            p.add_argument("--smoothness", type=float, default=None,
                           help="smoothness s of the target for the predicted slope "
                                "(overrides the scenario)")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (QuadratureError, DegenerateExperimentError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, UnsupportedError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
