"""Batch front end: parse a run config, dispatch a suite, emit tables and plots.

Usage: ``opcalc <experiment-id> [--config file.json] [flags...]``; flags
mirror config keys and override the file.  Outputs ``<out>.csv``,
``<out>.json`` and, for experiments with designated plot columns,
``<out>.svg``.  The exit status is nonzero iff any certified-bound or
identity assertion failed during the run.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .bandlimited import TrigSlice, random_trig_polynomial
from .ideals import IdealSpec, averaging_constant_check, boyd_index_estimate
from .perturbation import (
    ExperimentReport,
    experiment_doi_identity,
    experiment_fuglede_ratio,
    experiment_holder_sweep,
    experiment_lipschitz,
    experiment_quasicommutator,
    experiment_schatten_decay,
)
from .sinc import row_energy, sinc_basis

EXPERIMENTS = (
    "doi-verify",
    "sinc-check",
    "lip-bound",
    "holder-sweep",
    "schatten-decay",
    "ideals-boyd",
    "qc-verify",
    "fuglede-ratio",
)

MAX_DIM = 64
MAX_TRIALS = 10**6


@dataclass
class RunConfig:
    experiment: str
    seed: int = 0
    dims: list[int] = field(default_factory=lambda: [4])
    sigma: float = 2.0
    trials: int = 20
    alpha: float = 0.5
    p: list[float] = field(default_factory=lambda: [2.0])
    delta_grid: list[float] = field(default_factory=lambda: [2.0**-k for k in range(11)])
    out: str | None = None
    tol: float = 1e-9

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment id {self.experiment!r}")
        if not self.dims or any(d < 1 or d > MAX_DIM for d in self.dims):
            raise ValueError(f"dims must lie in [1, {MAX_DIM}]")
        if not 0 <= self.trials <= MAX_TRIALS:
            raise ValueError(f"trials must lie in [0, {MAX_TRIALS}]")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


def _experiment_sinc_check(trials: int, seed: int, n_terms: int = 1000) -> ExperimentReport:
    """Basis-mass and row-energy checks for the sampling expansion."""
    rep = ExperimentReport(
        "sinc-check",
        seed,
        ["trial", "sigma", "point", "basis_mass", "energy_ratio"],
        meta={"violations": 0},
    )
    ns = np.arange(-n_terms, n_terms + 1)
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        sigma = float(rng.uniform(0.5, 4.0))
        y = float(rng.uniform(-6.0, 6.0))
        mass = float(np.sum(sinc_basis(sigma, ns, y) ** 2))
        coeffs = {
            int(m): complex(rng.standard_normal(), rng.standard_normal())
            for m in rng.choice(np.arange(-3, 4), size=4, replace=False)
        }
        fslice = TrigSlice(sigma / 3.0, coeffs)
        x = float(rng.uniform(-3.0, 3.0))
        energy = row_energy(fslice, sigma, x, 2 * n_terms)
        cap = 3.0 * fslice.sup_bracket()[1] ** 2
        ratio = energy / cap if cap > 0 else 0.0
        if abs(mass - 1.0) > 1e-3 or ratio > 1.0 + 1e-6:
            rep.meta["violations"] += 1
        rep.add(trial, sigma, y, mass, ratio)
    # closed-form row energy of a unimodular exponential
    unit = TrigSlice(1.0, {1: 1.0})
    ecase = row_energy(unit, 1.0, 0.37, 2000)
    rep.meta["unimodular_energy"] = ecase
    # piecewise envelope (1/pi) * integral of min(4, u^2)/u^2 du = 8/pi
    core, _ = quad(lambda u: 1.0 if abs(u) <= 2.0 else 4.0 / (u * u), -2.0, 2.0, epsabs=1e-10)
    wing, _ = quad(lambda u: 4.0 / (u * u), 2.0, 200.0, epsabs=1e-10)
    envelope = (core + 2.0 * (wing + 4.0 / 200.0)) / math.pi
    rep.meta["envelope_const"] = envelope
    if abs(ecase - 2.0) > 1e-3 or abs(envelope - 8.0 / math.pi) > 1e-6:
        rep.meta["violations"] += 1
    return rep


def _experiment_ideals_boyd(p_list: list[float], trials: int, seed: int) -> ExperimentReport:
    """Boyd index and averaging constants for the Schatten scale."""
    rep = ExperimentReport(
        "ideals-boyd",
        seed,
        ["p", "boyd_estimate", "boyd_analytic", "avg_empirical", "avg_bound"],
        meta={"violations": 0},
    )
    for p in p_list:
        spec = IdealSpec.schatten(p)
        est, analytic = boyd_index_estimate(spec, 64)
        emp, bound = averaging_constant_check(spec, trials, seed)
        if abs(est - analytic) > 1e-6:
            rep.meta["violations"] += 1
        if bound is not None and emp > bound * (1.0 + 1e-9):
            rep.meta["violations"] += 1
        rep.add(p, est, analytic, emp, math.nan if bound is None else bound)
    return rep


def run(config: RunConfig) -> ExperimentReport:
    """Dispatch a validated config to its suite; deterministic given config."""
    config.validate()
    eid = config.experiment
    if eid == "doi-verify":
        return experiment_doi_identity(
            config.sigma, config.dims, config.trials, config.seed, config.tol
        )
    if eid == "sinc-check":
        return _experiment_sinc_check(config.trials, config.seed)
    if eid == "lip-bound":
        f = random_trig_polynomial(config.sigma, 12, config.seed)
        return experiment_lipschitz(f, config.dims, config.trials, config.seed)
    if eid == "holder-sweep":
        f = random_trig_polynomial(config.sigma, 12, config.seed, decay=1.0)
        return experiment_holder_sweep(
            f, config.alpha, config.dims, config.delta_grid, config.trials, config.seed
        )
    if eid == "schatten-decay":
        f = random_trig_polynomial(config.sigma, 12, config.seed, decay=1.0)
        return experiment_schatten_decay(
            f, config.alpha, config.p[0], config.dims, config.trials, config.seed
        )
    if eid == "ideals-boyd":
        return _experiment_ideals_boyd(config.p, config.trials, config.seed)
    if eid == "qc-verify":
        f = random_trig_polynomial(config.sigma, 12, config.seed)
        return experiment_quasicommutator(f, config.dims, config.trials, config.seed)
    if eid == "fuglede-ratio":
        return experiment_fuglede_ratio(config.dims, config.p, config.trials, config.seed)
    raise ValueError(f"unknown experiment id {eid!r}")


def _sanitize(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) or math.isinf(obj) else obj
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def report_to_json(report: ExperimentReport) -> str:
    meta = {"experiment": report.experiment, "seed": report.seed,
            "columns": list(report.columns)}
    meta.update(_sanitize(report.meta))
    rows = [[None if math.isnan(v) else v for v in row] for row in report.rows]
    return json.dumps({"meta": meta, "rows": rows}, indent=1) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    data = json.loads(text)
    meta = dict(data["meta"])
    experiment = meta.pop("experiment")
    seed = meta.pop("seed")
    columns = meta.pop("columns")
    rep = ExperimentReport(experiment, seed, columns, meta=meta)
    for row in data["rows"]:
        rep.rows.append(tuple(math.nan if v is None else float(v) for v in row))
    return rep


def report_to_csv(report: ExperimentReport) -> str:
    lines = [",".join(report.columns)]
    for row in report.rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _log_ticks(lo: float, hi: float) -> list[float]:
    first = math.ceil(math.log10(lo))
    last = math.floor(math.log10(hi))
    return [10.0**e for e in range(first, last + 1)]


def report_to_svg(report: ExperimentReport) -> str:
    """Log-log scatter of the designated plot columns with a slope guide line."""
    plot = report.meta.get("plot")
    if not plot:
        raise ValueError("report has no designated plot columns")
    xi = report.columns.index(plot["x"])
    yi = report.columns.index(plot["y"])
    pts = [(r[xi], r[yi]) for r in report.rows if r[xi] > 0 and r[yi] > 0]
    if not pts:
        raise ValueError("no positive data to plot")
    slope = plot.get("slope")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs) / 1.5, max(xs) * 1.5
    y0, y1 = min(ys) / 1.5, max(ys) * 1.5
    left, right, top, bottom = 70.0, 780.0, 30.0, 550.0

    def sx(x):
        return left + (math.log10(x) - math.log10(x0)) / (math.log10(x1) - math.log10(x0)) * (right - left)

    def sy(y):
        return bottom - (math.log10(y) - math.log10(y0)) / (math.log10(y1) - math.log10(y0)) * (bottom - top)

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600">',
        '<rect width="800" height="600" fill="white"/>',
        f'<text x="400" y="20" text-anchor="middle" font-size="14">{report.experiment}'
        f" ({plot['x']} vs {plot['y']}, log-log)</text>",
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
    ]
    for t in _log_ticks(x0, x1):
        parts.append(
            f'<line x1="{sx(t):.2f}" y1="{bottom}" x2="{sx(t):.2f}" y2="{bottom + 5}" stroke="black"/>'
            f'<text x="{sx(t):.2f}" y="{bottom + 18}" text-anchor="middle" font-size="10">{t:g}</text>'
        )
    for t in _log_ticks(y0, y1):
        parts.append(
            f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>'
            f'<text x="{left - 8}" y="{sy(t):.2f}" text-anchor="end" font-size="10">{t:g}</text>'
        )
    if slope is not None:
        xa, ya = max(pts, key=lambda p: p[0])
        parts.append(
            f'<line x1="{sx(x0):.2f}" y1="{sy(ya * (x0 / xa) ** slope):.2f}" '
            f'x2="{sx(x1):.2f}" y2="{sy(ya * (x1 / xa) ** slope):.2f}" '
            'stroke="gray" stroke-dasharray="6,3"/>'
            f'<text x="{right - 5}" y="{top + 15}" text-anchor="end" font-size="11" fill="gray">'
            f"slope {slope:g}</text>"
        )
    for x, y in pts:
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="steelblue"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(report: ExperimentReport, fmt: str, path: str) -> None:
    """Write the report to disk in csv, json, or svg form."""
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report)
    elif fmt == "svg":
        text = report_to_svg(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def build_config(argv: list[str]) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="opcalc",
        description="run a verification experiment and emit csv/json/svg tables",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON file with config keys")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--dims", help="comma-separated matrix dimensions")
    parser.add_argument("--sigma", type=float)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--p", help="comma-separated exponents (inf allowed)")
    parser.add_argument("--delta-grid", help="comma-separated perturbation sizes")
    parser.add_argument("--out", help="output path prefix")
    parser.add_argument("--tol", type=float)
    args = parser.parse_args(argv)
    values: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            values.update(json.load(fh))
    values["experiment"] = args.experiment
    if args.seed is not None:
        values["seed"] = args.seed
    if args.dims is not None:
        values["dims"] = [int(t) for t in args.dims.split(",") if t.strip()]
    if args.sigma is not None:
        values["sigma"] = args.sigma
    if args.trials is not None:
        values["trials"] = args.trials
    if args.alpha is not None:
        values["alpha"] = args.alpha
    if args.p is not None:
        values["p"] = _parse_floats(args.p)
    if args.delta_grid is not None:
        values["delta_grid"] = _parse_floats(args.delta_grid)
    if args.out is not None:
        values["out"] = args.out
    if args.tol is not None:
        values["tol"] = args.tol
    return RunConfig(**values)


def main(argv: list[str] | None = None) -> int:
    try:
        config = build_config(sys.argv[1:] if argv is None else argv)
        report = run(config)
    except (ValueError, OSError) as exc:
        print(f"opcalc: error: {exc}", file=sys.stderr)
        return 2
    prefix = config.out or config.experiment
    render(report, "csv", prefix + ".csv")
    render(report, "json", prefix + ".json")
    if report.meta.get("plot"):
        render(report, "svg", prefix + ".svg")
    status = 0 if report.violations == 0 else 1
    print(
        f"{config.experiment}: {len(report.rows)} rows, "
        f"{report.violations} violations -> {prefix}.csv"
    )
    return status


if __name__ == "__main__":
    sys.exit(main())
