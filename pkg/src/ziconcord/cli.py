"""Command-line interface: estimate, bounds, truth, simulate, validate."""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .closedforms import bounds, frechet_truth
from .concordance import brute_force_Q_se
from .errors import (CSVParseError, DegenerateMarginError, ExperimentError,
                     InvalidInputError, TieError)
from .estimators import estimate_measures, estimate_q_jm, estimate_q_jw, estimate_rho
from .margins import PairedSample, cell_masses
from .samplers import CouplingSpec, sample, sample_partner
from .simulation import (BOUNDS_GRID, MEASURES, SIMULATION_GRID, ExperimentSpec,
                         render_rows, run_experiment, summarize_bounds, summarize_to_table)

DATA_ERRORS = (InvalidInputError, CSVParseError, TieError, DegenerateMarginError,
               ExperimentError, FileNotFoundError, IsADirectoryError, PermissionError)


# ---------------------------------------------------------------------------
# CSV ingestion

def _parse_row(fields):
    return [float(f) for f in fields]


def _break_ties(col, rng):
    """Spread each group of tied positives over the gap to the next value, in random order."""
    col = col.copy()
    pos_vals = np.unique(col[col > 0])
    n_tied = 0
    for k, v in enumerate(pos_vals):
        idx = np.flatnonzero(col == v)
        if idx.size < 2:
            continue
        n_tied += idx.size
        upper = pos_vals[k + 1] if k + 1 < pos_vals.size else 2.0 * v
        step = (upper - v) / idx.size
        order = rng.permutation(idx.size)
        col[idx[order]] = v + step * np.arange(idx.size)
    pos = np.sort(col[col > 0])
    if np.any(np.diff(pos) <= 0):
        # gaps too small for float spacing; fall back to strict ranks
        keys = rng.random(col.size)
        o = np.lexsort((keys, col))
        ranks = np.empty(col.size)
        ranks[o] = np.arange(1, col.size + 1)
        col = np.where(col > 0, ranks, 0.0)
    return col, n_tied


def count_tied(col):
    pos = col[col > 0]
    _, counts = np.unique(pos, return_counts=True)
    return int(counts[counts > 1].sum())


def ingest_csv(path, tie_policy="random", seed=0) -> PairedSample:
    """Read a two-column CSV of nonnegative numbers.

    A first line with any non-numeric field is treated as a header.  Under
    ``tie_policy="random"`` tied positive values in a column get a seeded
    random strict order, leaving every other comparison untouched; under
    ``"error"`` any tie raises TieError.
    """
    if tie_policy not in ("random", "error"):
        raise InvalidInputError(f"unknown tie policy {tie_policy!r}")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, fields in enumerate(csv.reader(fh), start=1):
            if not fields or all(not f.strip() for f in fields):
                continue
            if len(fields) != 2:
                raise CSVParseError(f"expected 2 columns, found {len(fields)}", lineno)
            try:
                rows.append(_parse_row(fields))
            except ValueError:
                if lineno == 1:
                    continue
                raise CSVParseError(f"non-numeric value in {fields!r}", lineno) from None
            if not all(np.isfinite(rows[-1])):
                raise CSVParseError(f"non-finite value in {fields!r}", lineno)
            if min(rows[-1]) < 0:
                raise InvalidInputError(f"row {lineno}: negative value in {fields!r}")
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    data = np.asarray(rows)
    x, y = data[:, 0], data[:, 1]
    ties = (count_tied(x), count_tied(y))
    if tie_policy == "error":
        if any(ties):
            raise TieError(f"tied positive values: {ties[0]} in x, {ties[1]} in y")
        return PairedSample(x, y, None, ties)
    x, _ = _break_ties(x, np.random.default_rng(np.random.SeedSequence([seed, 0])))
    y, _ = _break_ties(y, np.random.default_rng(np.random.SeedSequence([seed, 1])))
    return PairedSample(x, y, seed, ties)


# ---------------------------------------------------------------------------
# report rendering

def _fmt(v):
    return "" if v is None else (f"{v:.4f}" if isinstance(v, float) else str(v))


def _provenance_lines(prov):
    return "".join(f"- {k}: {_fmt(v)}\n" for k, v in prov.items())


def render_report(report, fmt, ties=(0, 0)):
    prov = {"p1_hat": report.p1_hat, "p2_hat": report.p2_hat, "n": report.n, "seed": report.seed,
            "ties_x": ties[0], "ties_y": ties[1]}
    order = ("rho", "gamma", "phi")
    est = {m: getattr(report, f"{m}_hat") for m in order}
    if fmt == "json":
        d = report.as_dict()
        d["ties"] = list(ties)
        return json.dumps(d, indent=2) + "\n"
    if fmt == "csv":
        rows = [dict(measure=m, estimate=est[m], lower=report.bounds.interval(m)[0],
                     upper=report.bounds.interval(m)[1], **prov) for m in order]
        cols = ("measure", "estimate", "lower", "upper") + tuple(prov)
        return render_rows(rows, cols, "csv")
    lines = ["|  | " + " | ".join(order) + " |", "|---|---|---|---|"]
    lines.append("| Estimate | " + " | ".join(f"{est[m]:.3f}" for m in order) + " |")
    lines.append("| Lower bound | " + " | ".join(f"{report.bounds.interval(m)[0]:.3f}" for m in order) + " |")
    lines.append("| Upper bound | " + " | ".join(f"{report.bounds.interval(m)[1]:.3f}" for m in order) + " |")
    out = "\n".join(lines) + "\n\n" + _provenance_lines(prov)
    out += "".join(f"- flag: {f}\n" for f in report.flags)
    return out


def render_bounds(b, prov, fmt):
    rows = [dict(measure=m, lower=b.interval(m)[0], upper=b.interval(m)[1], **prov)
            for m in ("rho", "gamma", "phi")]
    if fmt == "json":
        return json.dumps({"bounds": b.as_dict(), **prov}, indent=2) + "\n"
    if fmt == "csv":
        return render_rows(rows, ("measure", "lower", "upper") + tuple(prov), "csv")
    return render_rows(rows, ("measure", "lower", "upper"), "markdown") + "\n" + _provenance_lines(prov)


def render_truth(t, prov, fmt):
    rows = [dict(measure=m, truth=getattr(t, m), **prov) for m in MEASURES]
    if fmt == "json":
        return json.dumps({m: getattr(t, m) for m in MEASURES} | prov, indent=2) + "\n"
    if fmt == "csv":
        return render_rows(rows, ("measure", "truth") + tuple(prov), "csv")
    return render_rows(rows, ("measure", "truth"), "markdown") + "\n" + _provenance_lines(prov)


# ---------------------------------------------------------------------------
# config file for simulate

def read_config(path):
    """Flat ``key = value`` file; '#' starts a comment."""
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CSVParseError("expected key = value", lineno)
            k, v = (t.strip() for t in line.split("=", 1))
            cfg[k] = v
    return cfg


def spec_from_config(cfg, workers=None):
    known = {"preset", "grid", "n", "repetitions", "seed", "estimators", "workers"}
    unknown = set(cfg) - known
    if unknown:
        raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
    preset = cfg.get("preset", "simulation")
    if preset not in ("simulation", "bounds"):
        raise InvalidInputError(f"unknown preset {preset!r}")
    grid = SIMULATION_GRID if preset == "simulation" else BOUNDS_GRID
    try:
        if "grid" in cfg:
            grid = tuple(tuple(float(t) for t in cell.split()) for cell in cfg["grid"].split(";") if cell.strip())
        kw = dict(
            grid=grid,
            n_per_run=int(cfg.get("n", 150)),
            repetitions=int(cfg.get("repetitions", 1000)),
            master_seed=int(cfg.get("seed", 0)),
            estimators=tuple(e.strip() for e in cfg.get("estimators", ",".join(MEASURES)).split(",") if e.strip()),
            workers=int(workers if workers is not None else cfg.get("workers", 1)),
        )
    except ValueError as exc:
        raise InvalidInputError(f"bad config value: {exc}") from None
    return ExperimentSpec(**kw), preset


# ---------------------------------------------------------------------------
# commands

def cmd_estimate(args):
    s = ingest_csv(args.input, args.ties, args.seed)
    return 0, render_report(estimate_measures(s), args.output, s.tie_counts)


def cmd_bounds(args):
    if args.input:
        s = ingest_csv(args.input, args.ties, args.seed)
        cm = cell_masses(s)
        p1, p2 = cm.p1, cm.p2
        prov = {"p1_hat": p1, "p2_hat": p2, "n": s.n, "seed": s.tie_seed}
    elif args.p1 is not None and args.p2 is not None:
        p1, p2 = args.p1, args.p2
        prov = {"p1": p1, "p2": p2, "n": None, "seed": None}
    else:
        raise UsageError("bounds needs --input or both --p1 and --p2")
    return 0, render_bounds(bounds(p1, p2), prov, args.output)


def cmd_truth(args):
    t = frechet_truth(args.alpha, args.p1, args.p2)
    prov = {"alpha": args.alpha, "p1": args.p1, "p2": args.p2}
    return 0, render_truth(t, prov, args.output)


def cmd_simulate(args):
    spec, preset = spec_from_config(read_config(args.config), args.workers)
    summary = run_experiment(spec)
    fmt = "markdown" if args.output == "md" else args.output
    if preset == "bounds":
        text = summarize_bounds(summary, fmt)
    else:
        text = summarize_to_table(summary, fmt)
    return 0, text


def cmd_validate(args):
    if args.input:
        s = ingest_csv(args.input, args.ties, args.seed)
        source = args.input
    elif args.p1 is not None and args.p2 is not None:
        spec = CouplingSpec(args.kind, CouplingSpec.uniform("UpperFH", args.p1, args.p2).margin_x,
                            CouplingSpec.uniform("UpperFH", args.p1, args.p2).margin_y,
                            (args.seed, 1), args.alpha if args.kind == "Frechet" else 0.0)
        s = sample(spec, args.n)
        source = f"{args.kind} p1={args.p1} p2={args.p2} n={args.n}"
    else:
        raise UsageError("validate needs --input or both --p1 and --p2")
    checks = [
        ("q_jm", estimate_q_jm(s), "UpperFH", 1.0),
        ("q_jw", estimate_q_jw(s), "LowerFH", 1.0),
        ("rho", estimate_rho(s), "Independence", 3.0),
    ]
    rows, ok = [], True
    for k, (name, est, kind, scale) in enumerate(checks):
        partner = sample_partner(s, kind, args.partners, seed=(args.seed, 2, k))
        q, se = brute_force_Q_se(s, partner)
        q, se = scale * q, scale * se
        z = (est - q) / se if se > 0 else (0.0 if est == q else float("inf"))
        passed = abs(z) <= args.sigmas
        ok &= passed
        rows.append({"check": name, "estimate": est, "oracle": q, "se": se, "z": z,
                     "status": "pass" if passed else "FAIL"})
    cols = ("check", "estimate", "oracle", "se", "z", "status")
    fmt = "markdown" if args.output == "md" else args.output
    cm = cell_masses(s)
    prov = {"source": source, "p1_hat": cm.p1, "p2_hat": cm.p2, "n": s.n, "seed": args.seed}
    text = render_rows(rows, cols, fmt)
    if fmt == "markdown":
        text += "\n" + _provenance_lines(prov)
    return (0 if ok else 1), text


class UsageError(Exception):
    pass


def _prob(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{v} is not in [0, 1]")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ziconcord",
        description="Rank dependence measures for zero-inflated continuous pairs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        p.add_argument("--output", choices=("csv", "md", "json"), default="md")
        p.add_argument("--seed", type=_seed, default=0, help="seed for tie breaking / sampling")
        if data:
            p.add_argument("--ties", choices=("random", "error"), default="random")

    p = sub.add_parser("estimate", help="estimate gamma, footrule and rho from a CSV file")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bounds", help="attainable bounds for given zero masses or a dataset")
    p.add_argument("--input")
    p.add_argument("--p1", type=_prob)
    p.add_argument("--p2", type=_prob)
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("truth", help="true measures under the Frechet copula")
    p.add_argument("--alpha", type=_prob, required=True)
    p.add_argument("--p1", type=_prob, required=True)
    p.add_argument("--p2", type=_prob, required=True)
    common(p, data=False)
    p.set_defaults(func=cmd_truth)

    p = sub.add_parser("simulate", help="run a Monte Carlo experiment from a key=value config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int)
    common(p, data=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="compare estimators with brute-force partner oracles")
    p.add_argument("--input")
    p.add_argument("--p1", type=_prob)
    p.add_argument("--p2", type=_prob)
    p.add_argument("--alpha", type=_prob, default=0.5)
    p.add_argument("--kind", choices=("Independence", "UpperFH", "LowerFH", "Frechet"), default="Frechet")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--partners", type=int, default=100_000)
    p.add_argument("--sigmas", type=float, default=3.0)
    common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status, text = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
