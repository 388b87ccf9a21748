"""Sweep engine: evaluates requested methods over a parameter grid,
emits deterministic CSV plus a companion plot script, cross-validates
analytic values against Monte Carlo, and grid-searches the power split.

CSV layout: '#'-prefixed metadata comment lines (config echo, seed,
version), then ``axis,method,value,std_err`` rows with 12 significant
digits.  Wall time is kept out of the file on purpose: re-running a preset
with the same seed must reproduce the CSV byte for byte.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analytic import (
    capacity_bounds,
    capacity_quadrature,
    capacity_series,
    dmt,
    outage_bounds,
    outage_exact,
    outage_high_snr,
)
from .config import (
    ExperimentConfig,
    canonical_items,
    with_overrides,
)
from .errors import ConfigError, DomainError, NumericalError
from .mc import estimate_capacity, estimate_diversity_fd, estimate_outage
from .model import SystemParams, TargetRates, build_params, non_coop_baseline

#: Methods whose values claim to match simulation (validated at 3*std_err);
#: bounds are validated by bracketing instead, reference curves are skipped.
EXACT_METHODS = frozenset(
    {"exact_taylor", "exact_quadrature", "capacity_quadrature", "capacity_series", "dmt"}
)
LOWER_BOUND_METHODS = frozenset({"lower_bound", "capacity_bounds:lower"})
UPPER_BOUND_METHODS = frozenset(
    {"upper_bound", "capacity_bounds:tight_upper", "capacity_bounds:loose_upper"}
)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    method: str
    value: float
    std_err: float | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow]
    metadata: dict[str, str]
    wall_time_s: float = 0.0

    def methods(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.method not in seen:
                seen.append(row.method)
        return seen

    def series(self, method: str) -> list[tuple[float, float]]:
        return [(r.axis_value, r.value) for r in self.rows if r.method == method]


def axis_grid(config: ExperimentConfig) -> list[float]:
    return [float(v) for v in np.linspace(config.start, config.stop, config.steps)]


@dataclass(frozen=True)
class SweepPoint:
    params: SystemParams
    targets: TargetRates
    r: float
    gamma: float


def resolve_point(config: ExperimentConfig, value: float) -> SweepPoint:
    """Bind one axis value to concrete system parameters and targets."""
    p1, p2 = config.base_powers()
    lam, d1, r = config.lam, config.d1, config.r
    if config.sweep == "snr_db":
        p1 = p2 = config.sigma2 * 10.0 ** (value / 10.0)
    elif config.sweep == "lambda":
        lam = value
    elif config.sweep == "d1":
        d1 = value
    elif config.sweep == "r":
        r = value
    params = build_params(
        p1, p2, config.sigma2, config.eta, lam, config.epsilon, d1,
        config.path_loss_exp,
    )
    gamma = p1 / config.sigma2
    if config.metric_family == "dmt":
        targets = TargetRates.from_multiplexing_gain(r, gamma)
    else:
        targets = TargetRates.from_rates(config.t1, config.t2)
    return SweepPoint(params=params, targets=targets, r=r, gamma=gamma)


def _evaluate_method(
    config: ExperimentConfig, method: str, point: SweepPoint
) -> list[tuple[str, float, float | None]]:
    family = config.metric_family
    params, targets = point.params, point.targets
    if method == "mc":
        if family == "outage":
            est = estimate_outage(
                params, targets, config.mc_n, config.seed, workers=config.workers
            )
        elif family == "capacity":
            est = estimate_capacity(
                params, config.mc_n, config.seed, workers=config.workers
            )
        else:
            est = estimate_diversity_fd(
                params,
                point.r,
                10.0 * math.log10(point.gamma),
                n=config.mc_n,
                seed=config.seed,
                workers=config.workers,
            )
        return [("mc", est.mean, est.std_err)]
    if method == "non_coop":
        baseline = non_coop_baseline(params)
        if family == "outage":
            return [("non_coop", baseline.outage(targets), None)]
        return [("non_coop", baseline.capacity(), None)]
    if method == "exact_taylor":
        return [(method, outage_exact(params, targets, "taylor"), None)]
    if method == "exact_quadrature":
        return [(method, outage_exact(params, targets, "quadrature"), None)]
    if method == "lower_bound":
        return [(method, outage_bounds(params, targets)[0], None)]
    if method == "upper_bound":
        return [(method, outage_bounds(params, targets)[1], None)]
    if method == "high_snr":
        return [(method, outage_high_snr(params, targets), None)]
    if method == "capacity_quadrature":
        return [(method, capacity_quadrature(params), None)]
    if method == "capacity_series":
        return [(method, capacity_series(params).value, None)]
    if method == "capacity_bounds":
        bounds = capacity_bounds(params)
        return [
            ("capacity_bounds:lower", bounds.lower, None),
            ("capacity_bounds:tight_upper", bounds.tight_upper, None),
            ("capacity_bounds:loose_upper", bounds.loose_upper, None),
        ]
    if method == "dmt":
        return [(method, dmt(point.r, point.gamma, params), None)]
    raise ConfigError(f"unknown method {method!r}")


def run_sweep(config: ExperimentConfig, write: bool = True) -> SweepResult:
    """Evaluate every requested method at every axis point.

    Deterministic given the seed; writes the CSV and a matplotlib script
    referencing it (unless ``write=False``).
    """
    config.validate()
    started = time.perf_counter()
    rows: list[SweepRow] = []
    for value in axis_grid(config):
        point = resolve_point(config, value)
        for method in config.methods:
            try:
                outputs = _evaluate_method(config, method, point)
            except (NumericalError, DomainError) as exc:
                raise type(exc)(
                    f"{config.sweep}={value:.6g}, method={method}: {exc}"
                ) from exc
            for name, val, err in outputs:
                rows.append(SweepRow(value, name, val, err))
    metadata = {f"config.{k}": v for k, v in canonical_items(config)}
    metadata["version"] = __version__
    result = SweepResult(
        rows=rows, metadata=metadata, wall_time_s=time.perf_counter() - started
    )
    if write:
        write_csv(result, config.output_path)
        write_plot_script(config)
    return result


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def write_csv(result: SweepResult, path: str) -> None:
    lines = [f"# {k} = {v}" for k, v in sorted(result.metadata.items())]
    lines.append("axis,method,value,std_err")
    for row in result.rows:
        err = _fmt(row.std_err) if row.std_err is not None else ""
        lines.append(f"{_fmt(row.axis_value)},{row.method},{_fmt(row.value)},{err}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> SweepResult:
    """Parse a sweep CSV back into rows + metadata (round-trips exactly)."""
    rows: list[SweepRow] = []
    metadata: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# "):
                key, _, value = line[2:].partition(" = ")
                metadata[key] = value
                continue
            if line == "axis,method,value,std_err":
                continue
            axis_s, method, value_s, err_s = line.split(",")
            rows.append(
                SweepRow(
                    float(axis_s),
                    method,
                    float(value_s),
                    float(err_s) if err_s else None,
                )
            )
    return SweepResult(rows=rows, metadata=metadata)


_PLOT_TEMPLATE = '''"""Plot {csv_name} (auto-generated; not needed by any test)."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

series = defaultdict(list)
with open("{csv_name}", "r", encoding="utf-8") as fh:
    for line in fh:
        if line.startswith("#") or line.startswith("axis,"):
            continue
        axis, method, value, _err = line.rstrip("\\n").split(",")
        series[method].append((float(axis), float(value)))

fig, ax = plt.subplots(figsize=(6.4, 4.8))
for method, points in series.items():
    xs, ys = zip(*sorted(points))
    ax.plot(xs, ys, marker="o", markersize=3, label=method)
ax.set_xlabel("{xlabel}")
ax.set_ylabel("{ylabel}")
{yscale}ax.grid(True, which="both", alpha=0.4)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("{stem}.png", dpi=150)
print("wrote {stem}.png")
'''


def plot_script_path(config: ExperimentConfig) -> str:
    stem = config.output_path
    if stem.endswith(".csv"):
        stem = stem[:-4]
    return stem + "_plot.py"


def write_plot_script(config: ExperimentConfig) -> str:
    import os

    family = config.metric_family
    ylabel = {
        "outage": "outage probability",
        "capacity": "ergodic capacity (bit/s/Hz)",
        "dmt": "diversity gain",
    }[family]
    xlabel = {
        "snr_db": "SNR (dB)",
        "lambda": "power splitting ratio",
        "r": "multiplexing gain",
        "d1": "relay position",
    }[config.sweep]
    stem = config.output_path[:-4] if config.output_path.endswith(".csv") else config.output_path
    script = _PLOT_TEMPLATE.format(
        csv_name=os.path.basename(config.output_path),
        xlabel=xlabel,
        ylabel=ylabel,
        yscale='ax.set_yscale("log")\n' if family == "outage" else "",
        stem=os.path.basename(stem),
    )
    path = plot_script_path(config)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(script)
    return path


@dataclass
class ValidationReport:
    passed: bool
    lines: list[str] = field(default_factory=list)
    report_path: str = ""

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def validate_sweep(config: ExperimentConfig) -> ValidationReport:
    """Compare analytic methods against the Monte Carlo reference per point.

    Exact methods must sit within 3 standard errors of the MC mean; bound
    methods must bracket it (with the same 3*std_err slack); reference
    curves (high_snr, non_coop) are reported but not judged.
    """
    if "mc" not in config.methods:
        raise ConfigError("validate needs the mc method in the sweep")
    if not set(config.methods) - {"mc"}:
        raise ConfigError("validate needs at least one analytic method")
    result = run_sweep(config)
    by_axis: dict[float, dict[str, SweepRow]] = {}
    for row in result.rows:
        by_axis.setdefault(row.axis_value, {})[row.method] = row
    lines = [f"validation of {config.output_path} ({config.metric_family} sweep)"]
    all_passed = True
    for value in sorted(by_axis):
        point = by_axis[value]
        mc_row = point["mc"]
        slack = 3.0 * (mc_row.std_err or 0.0)
        for method, row in point.items():
            if method == "mc":
                continue
            if method in EXACT_METHODS:
                gap = abs(row.value - mc_row.value)
                ok = gap <= slack
                verdict = "PASS" if ok else "FAIL"
                lines.append(
                    f"{config.sweep}={value:.6g} {method}: |analytic-mc|="
                    f"{gap:.6g} vs 3*std_err={slack:.6g} -> {verdict}"
                )
            elif method in LOWER_BOUND_METHODS:
                ok = row.value <= mc_row.value + slack
                verdict = "PASS" if ok else "FAIL"
                lines.append(
                    f"{config.sweep}={value:.6g} {method}: {row.value:.6g} <= "
                    f"mc+3se={mc_row.value + slack:.6g} -> {verdict}"
                )
            elif method in UPPER_BOUND_METHODS:
                ok = row.value >= mc_row.value - slack
                verdict = "PASS" if ok else "FAIL"
                lines.append(
                    f"{config.sweep}={value:.6g} {method}: {row.value:.6g} >= "
                    f"mc-3se={mc_row.value - slack:.6g} -> {verdict}"
                )
            else:
                lines.append(
                    f"{config.sweep}={value:.6g} {method}: reference curve (not judged)"
                )
                continue
            all_passed = all_passed and ok
    lines.append(f"overall: {'PASS' if all_passed else 'FAIL'}")
    report_path = config.output_path + ".validation.txt"
    report = ValidationReport(passed=all_passed, lines=lines, report_path=report_path)
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.text())
    return report


@dataclass(frozen=True)
class LambdaStar:
    lambda_star: float
    value: float
    bracket: tuple[float, float]
    flat: bool


def find_lambda_star(config: ExperimentConfig) -> LambdaStar:
    """Grid argmax of a single analytic metric over a lambda sweep.

    Reports the neighboring grid bracket; no interpolation is attempted.
    A constant metric returns the first grid point, flagged as flat.
    """
    if config.sweep != "lambda":
        raise ConfigError(f"lambda-star needs a lambda sweep; got {config.sweep!r}")
    if len(config.methods) != 1 or config.methods[0] in ("mc", "non_coop", "capacity_bounds"):
        raise ConfigError(
            "lambda-star needs exactly one single-valued analytic method; "
            f"got {config.methods}"
        )
    result = run_sweep(config)
    series = result.series(config.methods[0])
    values = [v for _, v in series]
    grid = [x for x, _ in series]
    flat = max(values) == min(values)
    best = 0 if flat else int(np.argmax(values))
    bracket = (grid[max(0, best - 1)], grid[min(len(grid) - 1, best + 1)])
    return LambdaStar(
        lambda_star=grid[best], value=values[best], bracket=bracket, flat=flat
    )


def figure_preset(
    figure: int,
    n: int | None = None,
    seed: int | None = None,
    out_dir: str = ".",
    **overrides,
) -> ExperimentConfig:
    """Frozen experiment presets reproducing the four reference figures.

    fig1: outage vs SNR (0-30 dB, lambda = 3/4) with bounds and baseline.
    fig2: ergodic capacity vs lambda at 20 dB with bounds and baseline.
    fig3: diversity gain vs SNR at r = 0.5, lambda = 3/4.
    fig4: diversity gain vs lambda at r = 0.5, 20 dB.
    """
    import os

    presets = {
        1: dict(
            sweep="snr_db", start=0.0, stop=30.0, steps=7,
            lam=0.75,
            methods=("mc", "exact_quadrature", "lower_bound", "upper_bound", "non_coop"),
            seed=1001,
        ),
        2: dict(
            sweep="lambda", start=0.05, stop=0.95, steps=19,
            snr_db=20.0,
            methods=("mc", "capacity_quadrature", "capacity_series",
                     "capacity_bounds", "non_coop"),
            seed=1002,
        ),
        3: dict(
            sweep="snr_db", start=5.0, stop=20.0, steps=4,
            lam=0.75, r=0.5,
            methods=("dmt",),
            seed=1003,
        ),
        4: dict(
            sweep="lambda", start=0.05, stop=0.95, steps=19,
            snr_db=20.0, r=0.5,
            methods=("dmt",),
            seed=1004,
        ),
    }
    if figure not in presets:
        raise ConfigError(f"figure must be 1..4; got {figure}")
    fields_ = dict(presets[figure])
    fields_["output_path"] = os.path.join(out_dir, f"fig{figure}.csv")
    if n is not None:
        fields_["mc_n"] = int(n)
    if seed is not None:
        fields_["seed"] = int(seed)
    config = ExperimentConfig(**fields_)
    if overrides:
        config = with_overrides(config, **overrides)
    config.validate()
    return config
