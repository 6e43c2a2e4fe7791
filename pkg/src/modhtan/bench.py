"""Benchmark orchestration: timed repeated training runs per activation,
CSV/markdown report tables, activation-curve dumps, and a micro-benchmark of
the rational exp approximation against numpy's exp.

Everything except wall-clock fields is deterministic given base_seed.  The
run-time ordering across activations is reported as an observation only; it
depends on hardware and is never asserted anywhere.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .activations import ActivationKind, activate
from .datasets import SplitSpec, gen_quadratic, load_heart, split
from .network import StallError, forward, nguyen_widrow_init
from .rnf import DEFAULT_RNF_PARAMS, RnfParams, rnf_exp
from .training import (
    GdmConfig,
    LmConfig,
    classification_accuracy,
    mse,
    train_gdm,
    train_lm,
)

# (lo, hi, step) sweeps used for the two standard figure regimes.
CURVE_PRESETS = {
    "within": (-10.0, 10.0, 0.01),
    "exploding": (-1000.0, 1000.0, 1.0),
}

AVERAGE_LABEL = "average"


@dataclass(frozen=True)
class ExperimentSpec:
    dataset: str  # "synthetic" | "heart"
    activations: tuple[ActivationKind, ...]
    runs: int = 10
    base_seed: int = 0
    trainer: str = "lm"  # "lm" | "gdm"
    gdm: GdmConfig = GdmConfig()
    lm: LmConfig = LmConfig()
    n_hidden: int = 2
    n_points: int = 5000  # synthetic sample count
    random_x: bool = False  # synthetic: sample x uniformly instead of linspace
    heart_path: str | None = None
    test_fraction: float = 0.2

    def __post_init__(self):
        if self.dataset not in ("synthetic", "heart"):
            raise ValueError(f"dataset must be 'synthetic' or 'heart', got {self.dataset!r}")
        if self.trainer not in ("lm", "gdm"):
            raise ValueError(f"trainer must be 'lm' or 'gdm', got {self.trainer!r}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if not self.activations:
            raise ValueError("activation list must be non-empty")
        if self.dataset == "heart" and self.heart_path is None:
            raise ValueError("heart dataset needs heart_path")
        if self.n_hidden < 1:
            raise ValueError(f"n_hidden must be >= 1, got {self.n_hidden}")


@dataclass(frozen=True)
class BenchRow:
    run: int | str  # run index, or "average" for aggregate rows
    activation: str
    runtime_s: float
    metric_name: str  # "mse" | "accuracy_pct"
    metric_value: float
    error: str | None = None  # stall reason for failed runs


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    averages: list[BenchRow] = field(default_factory=list)


def _fit(spec: ExperimentSpec, model, X, T):
    if spec.trainer == "gdm":
        return train_gdm(model, X, T, spec.gdm)
    return train_lm(model, X, T, spec.lm)


def run_experiment(spec: ExperimentSpec) -> BenchReport:
    """Train runs x activations models and collect timed metric rows.

    Per run index r: seed = base_seed + r drives both the weight init and
    (for heart) a fresh train/test split, so run r sees identical conditions
    under every activation.  Timing brackets the training call only.  Stalled
    runs become rows with an error reason and a NaN metric instead of
    aborting the experiment; averages are taken over the clean rows.
    """
    if spec.dataset == "synthetic":
        data = gen_quadratic(spec.n_points, random_x=spec.random_x, seed=spec.base_seed)
        metric_name = "mse"
        n_in = data.X.shape[1]
        n_out = data.T.shape[1]
    else:
        full = load_heart(spec.heart_path)
        metric_name = "accuracy_pct"
        n_in = full.X.shape[1]
        n_out = full.T.shape[1]

    report = BenchReport()
    for kind in spec.activations:
        block: list[BenchRow] = []
        for run in range(spec.runs):
            seed = spec.base_seed + run
            if spec.dataset == "synthetic":
                train_ds = eval_ds = data
            else:
                train_ds, eval_ds = split(full, SplitSpec(spec.test_fraction, seed=seed))
            model = nguyen_widrow_init(n_in, spec.n_hidden, n_out, kind, seed=seed)
            t0 = time.perf_counter()
            model, history = _fit(spec, model, train_ds.X, train_ds.T)
            runtime = time.perf_counter() - t0
            error = None
            value = math.nan
            if history.termination == "stall":
                error = history.stall_events[-1][1] if history.stall_events else "stall"
            else:
                try:
                    y, _ = forward(model, eval_ds.X)
                    if metric_name == "mse":
                        value = mse(y, eval_ds.T)
                    else:
                        value = classification_accuracy(y, eval_ds.T)
                except StallError as exc:
                    error = str(exc)
            block.append(BenchRow(run, kind.name, runtime, metric_name, value, error))
        report.rows.extend(block)
        ok = [r for r in block if r.error is None]
        if ok:
            avg_runtime = float(np.mean([r.runtime_s for r in ok]))
            avg_value = float(np.mean([r.metric_value for r in ok]))
        else:
            avg_runtime = float(np.mean([r.runtime_s for r in block]))
            avg_value = math.nan
        report.averages.append(
            BenchRow(AVERAGE_LABEL, kind.name, avg_runtime, metric_name, avg_value)
        )
    return report


def runtime_ordering(report: BenchReport) -> str:
    """Human-readable fastest-first ordering of average runtimes.

    Purely observational; the ordering is hardware-dependent.
    """
    ranked = sorted(report.averages, key=lambda r: r.runtime_s)
    return " < ".join(f"{r.activation} ({r.runtime_s:.3f} s)" for r in ranked)


def _csv_lines(report: BenchReport) -> list[str]:
    lines = ["run,activation,runtime_s,metric_name,metric_value"]
    for row in (*report.rows, *report.averages):
        lines.append(
            f"{row.run},{row.activation},{row.runtime_s!r},{row.metric_name},{row.metric_value!r}"
        )
    return lines


def _markdown_lines(report: BenchReport) -> list[str]:
    activations = [r.activation for r in report.averages]
    runs = sorted({r.run for r in report.rows})
    by_key = {(r.activation, r.run): r for r in report.rows}
    avg_by_act = {r.activation: r for r in report.averages}
    metric_name = report.averages[0].metric_name if report.averages else "metric"

    def cell(row: BenchRow | None, attr: str) -> str:
        if row is None:
            return ""
        if attr == "metric_value" and row.error is not None:
            return "stall"
        return f"{getattr(row, attr):.6g}"

    lines = ["# benchmark report", ""]
    for title, attr in ((f"{metric_name}", "metric_value"), ("runtime_s", "runtime_s")):
        lines.append(f"## {title}")
        lines.append("")
        lines.append("| run | " + " | ".join(activations) + " |")
        lines.append("| --- |" + " --- |" * len(activations))
        for run in runs:
            cells = [cell(by_key.get((a, run)), attr) for a in activations]
            lines.append(f"| {run} | " + " | ".join(cells) + " |")
        avg_cells = [cell(avg_by_act.get(a), attr) for a in activations]
        lines.append("| AVERAGE | " + " | ".join(avg_cells) + " |")
        lines.append("")
    failures = [r for r in report.rows if r.error is not None]
    if failures:
        lines.append("## failed runs")
        lines.append("")
        for r in failures:
            lines.append(f"- run {r.run}, {r.activation}: {r.error}")
        lines.append("")
    if report.averages:
        lines.append(f"Runtime ordering (average, fastest first): {runtime_ordering(report)}")
        lines.append("")
    return lines


def emit_report(report: BenchReport, format: str, path) -> None:
    """Write the report as CSV (exact 5-column layout) or markdown tables."""
    if format == "csv":
        lines = _csv_lines(report)
    elif format == "markdown":
        lines = _markdown_lines(report)
    else:
        raise ValueError(f"format must be 'csv' or 'markdown', got {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def curve_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive sweep from lo to hi in (approximately) `step` increments."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo} hi={hi}")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    count = max(int(round((hi - lo) / step)) + 1, 2)
    return np.linspace(lo, hi, count)


def dump_curves(kind: ActivationKind, lo: float, hi: float, step: float, path) -> None:
    """Sample value and gradient of an activation over [lo, hi] into a CSV.

    Columns are `x,value,gradient` with full-precision (repr) floats so the
    files are byte-stable across runs.
    """
    xs = curve_grid(lo, hi, step)
    result = activate(kind, xs)
    lines = ["x,value,gradient"]
    for x, v, g in zip(xs, result.values, result.grads):
        lines.append(f"{float(x)!r},{float(v)!r},{float(g)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


class ApproxBenchResult(NamedTuple):
    ns_per_op_rnf: float
    ns_per_op_ref: float
    max_rel_err: float


def approx_bench(
    m: int, lo: float, hi: float, params: RnfParams = DEFAULT_RNF_PARAMS
) -> ApproxBenchResult:
    """Time m evaluations of rnf_exp vs numpy exp over a linear sweep.

    Returns nanoseconds per evaluation for each and the maximum relative
    error of the approximation across the sweep.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    xs = np.linspace(lo, hi, m)
    rnf_exp(xs[: min(m, 64)], params)  # warm up caches before timing
    np.exp(xs[: min(m, 64)])
    t0 = time.perf_counter_ns()
    approx = rnf_exp(xs, params)
    t1 = time.perf_counter_ns()
    reference = np.exp(xs)
    t2 = time.perf_counter_ns()
    rel = np.abs(np.asarray(approx) - reference) / np.abs(reference)
    return ApproxBenchResult(
        ns_per_op_rnf=(t1 - t0) / m,
        ns_per_op_ref=(t2 - t1) / m,
        max_rel_err=float(rel.max()),
    )
