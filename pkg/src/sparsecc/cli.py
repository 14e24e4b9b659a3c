"""Command-line interface: ``sparsecc {cdf,complexity,hcurve,simulate,validate}``.

Every subcommand writes CSV (header row, LF endings, shortest round-trip
floats) or, with ``--json``, an array of objects with the same field names.
Exit status: 0 success, 1 failed validation, 2 bad arguments, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import IO, Any, Iterable, Sequence

from . import analysis, experiments, ratio_cdf
from .rng import derive_stream
from .validate import SUITES, run_suite

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

CDF_COLUMNS = ("t", "F_quadrature", "F_closed", "F_mc", "mc_stderr")
COMPLEXITY_COLUMNS = ("regime", "K", "gamma", "coefficient_exact", "coefficient_approx", "M")
HCURVE_COLUMNS = ("alpha", "epsilon", "lambda", "h", "K_over_h")
SIMULATE_COLUMNS = ("alpha", "inv_gamma", "nu", "M", "median_error", "failure_rate", "mean_uncovered", "trials", "seed")


class UsageError(ValueError):
    pass


# -- record formatting ----------------------------------------------------

def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_value(token: str) -> Any:
    if token == "":
        return None
    if token in ("true", "false"):
        return token == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def write_csv(records: Iterable[dict], columns: Sequence[str], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([format_value(rec.get(c)) for c in columns])


def read_csv(fh: IO[str]) -> tuple[list[str], list[dict]]:
    rows = list(csv.reader(fh))
    if not rows:
        raise ValueError("empty CSV")
    header = rows[0]
    return header, [dict(zip(header, (parse_value(t) for t in row))) for row in rows[1:]]


def write_json(records: Iterable[dict], columns: Sequence[str], fh: IO[str]) -> None:
    json.dump([{c: rec.get(c) for c in columns} for rec in records], fh, indent=1)
    fh.write("\n")


def emit(records: list[dict], columns: Sequence[str], args) -> None:
    writer = write_json if args.json else write_csv
    if args.out in (None, "-"):
        writer(records, columns, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            writer(records, columns, fh)


def cell_records(cells: Iterable[experiments.CellResult]) -> list[dict]:
    return [
        {
            "alpha": c.alpha, "inv_gamma": c.inv_gamma, "nu": c.nu, "M": c.m,
            "median_error": c.median_error, "failure_rate": c.failure_rate,
            "mean_uncovered": c.mean_uncovered, "trials": c.trials, "seed": c.seed,
        }
        for c in cells
    ]


def cells_to_csv(cells: Iterable[experiments.CellResult]) -> str:
    buf = io.StringIO()
    write_csv(cell_records(cells), SIMULATE_COLUMNS, buf)
    return buf.getvalue()


# -- experiment config files ------------------------------------------------

_LIST_FIELDS = {"nu_list": float, "alpha_list": float, "inv_gamma_list": float}
_SCALAR_FIELDS = {
    "n": int, "k": int, "signal_kind": str, "delta": float,
    "trials": int, "epsilon": float, "master_seed": int,
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Flat ``key = value`` document; lists comma-separated; ``#`` starts a comment."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in _LIST_FIELDS:
                conv = _LIST_FIELDS[key]
                out[key] = tuple(conv(v.strip()) for v in value.split(",") if v.strip())
            elif key in _SCALAR_FIELDS:
                out[key] = _SCALAR_FIELDS[key](value)
            else:
                raise UsageError(f"{source}:{lineno}: unknown field {key!r}")
        except ValueError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"{source}:{lineno}: field {key!r}: cannot parse {value!r}") from exc
    return out


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


# -- subcommands -------------------------------------------------------------

def cmd_cdf(args) -> list[dict]:
    quad = ratio_cdf.QuadratureSpec(args.nodes)
    ts = [t for group in args.t for t in group]
    if any(t < 0 for t in ts):
        raise UsageError("t must be nonnegative")
    if args.mc is not None and args.seed is None:
        raise UsageError("--mc requires an explicit --seed")
    quad_vals = ratio_cdf.cdf_ratio_many(args.alpha, ts, quad)
    closed = None
    if args.alpha == 0.5:
        closed = [ratio_cdf.cdf_ratio_half(t) for t in ts]
    elif args.limit0:
        closed = [ratio_cdf.cdf_ratio_limit0(t) for t in ts]
    mc = se = None
    if args.mc is not None:
        stream = derive_stream(args.seed, ("cli", "cdf", repr(float(args.alpha))))
        mc, se = ratio_cdf.cdf_ratio_mc_many(args.alpha, ts, args.mc, stream)
    recs = []
    for i, t in enumerate(ts):
        recs.append({
            "t": t,
            "F_quadrature": float(quad_vals[i]),
            "F_closed": None if closed is None else float(closed[i]),
            "F_mc": None if mc is None else float(mc[i]),
            "mc_stderr": None if se is None else float(se[i]),
        })
    return recs


def cmd_complexity(args) -> list[dict]:
    recs = []
    for regime in args.regime:
        if regime == "alpha0":
            if not args.gamma:
                raise UsageError("--regime alpha0 needs at least one --gamma")
            for g in (g for group in args.gamma for g in group):
                res = analysis.measurements_alpha0(analysis.ComplexityQuery(args.k, args.n, args.delta, gamma=g))
                recs.append(_complexity_record(regime, args.k, g, res))
        else:
            fn = analysis.measurements_worst if regime == "worst" else analysis.measurements_alpha1
            res = fn(args.k, args.n, args.delta)
            recs.append(_complexity_record(regime, args.k, 1.0 / (args.k + 1), res))
    return recs


def _complexity_record(regime: str, k: int, gamma: float, res: analysis.ComplexityResult) -> dict:
    return {
        "regime": regime, "K": k, "gamma": gamma,
        "coefficient_exact": res.coefficient, "coefficient_approx": res.coefficient_approx, "M": res.m_exact,
    }


def cmd_hcurve(args) -> list[dict]:
    quad = ratio_cdf.QuadratureSpec(args.nodes)
    alphas = [a for group in args.alpha for a in group]
    epsilons = [e for group in args.epsilon for e in group]
    lambdas = [x for group in (args.lam or []) for x in group]
    if not args.optimize and not lambdas:
        raise UsageError("give --lambda values or --optimize")
    recs = []
    for a in alphas:
        for eps in epsilons:
            if args.optimize:
                points = [analysis.optimize_lambda(eps, a, quad)]
            else:
                points = [(lam, analysis.h_poisson(lam, eps, a, quad)) for lam in lambdas]
            for lam, h in points:
                recs.append({"alpha": a, "epsilon": eps, "lambda": lam, "h": h, "K_over_h": args.k / h})
    return recs


def build_config(args) -> experiments.ExperimentConfig:
    fields: dict[str, Any] = {}
    if args.config:
        with open(args.config) as fh:
            fields.update(parse_config_text(fh.read(), args.config))
    inline = {
        "n": args.n, "k": args.k, "signal_kind": args.signal, "nu_list": args.nu,
        "delta": args.delta, "alpha_list": args.alpha, "inv_gamma_list": args.inv_gamma,
        "trials": args.trials, "epsilon": args.epsilon, "master_seed": args.seed,
    }
    fields.update({k: (tuple(v) if isinstance(v, list) else v) for k, v in inline.items() if v is not None})
    if "master_seed" not in fields:
        raise UsageError("simulate requires an explicit seed (--seed or master_seed in the config)")
    missing = [f for f in ("n", "k") if f not in fields]
    if missing:
        raise UsageError(f"missing required field(s): {', '.join(missing)}")
    return experiments.ExperimentConfig(**fields)


def cmd_simulate(args) -> list[dict]:
    config = build_config(args)
    return cell_records(experiments.run_experiment(config, workers=args.workers))


# -- parser ------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="emit a JSON array instead of CSV")
    p.add_argument("--out", default=None, help="output path (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsecc", description="Stable-projection sparse recovery: CDFs, complexities, sweeps and self-checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cdf", help="stable-ratio CDF by quadrature, closed form and Monte Carlo")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", type=_floats, action="append", required=True, help="comma-separated t values")
    p.add_argument("--nodes", type=int, default=128)
    p.add_argument("--mc", type=int, default=None, help="Monte Carlo sample count")
    p.add_argument("--limit0", action="store_true", help="fill F_closed with the alpha -> 0+ limit")
    p.add_argument("--seed", type=int, default=None)
    _common(p)

    p = sub.add_parser("complexity", help="required-measurement coefficients")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--gamma", type=_floats, action="append")
    p.add_argument("--regime", action="append", choices=("alpha0", "worst", "alpha1"))
    _common(p)

    p = sub.add_parser("hcurve", help="Poisson h(lambda; eps, alpha) curves or their maxima")
    p.add_argument("--alpha", type=_floats, action="append", required=True)
    p.add_argument("--epsilon", type=_floats, action="append", required=True)
    p.add_argument("--lambda", dest="lam", type=_floats, action="append")
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--k", type=int, default=1, help="K in the K_over_h column (default 1)")
    p.add_argument("--nodes", type=int, default=128)
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo recovery sweep")
    p.add_argument("--config", default=None, help="key = value experiment file")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--signal", choices=("binary", "folded_gaussian"))
    p.add_argument("--nu", type=_floats)
    p.add_argument("--delta", type=float)
    p.add_argument("--alpha", type=_floats)
    p.add_argument("--inv-gamma", type=_floats)
    p.add_argument("--trials", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    _common(p)

    p = sub.add_parser("validate", help="run a named self-check suite")
    p.add_argument("--suite", choices=(*SUITES, "all"), required=True)
    p.add_argument("--seed", type=int, default=2013)
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "complexity" and not args.regime:
        args.regime = ["alpha0"]
    try:
        if args.command == "validate":
            suites = SUITES if args.suite == "all" else (args.suite,)
            ok = True
            for name in suites:
                ok &= run_suite(name, sys.stdout, seed=args.seed, workers=args.workers)
            return EXIT_OK if ok else EXIT_VALIDATION
        handler = {"cdf": cmd_cdf, "complexity": cmd_complexity, "hcurve": cmd_hcurve, "simulate": cmd_simulate}
        columns = {"cdf": CDF_COLUMNS, "complexity": COMPLEXITY_COLUMNS, "hcurve": HCURVE_COLUMNS,
                   "simulate": SIMULATE_COLUMNS}[args.command]
        emit(handler[args.command](args), columns, args)
        return EXIT_OK
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"sparsecc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, TypeError, OSError) as exc:
        print(f"sparsecc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
