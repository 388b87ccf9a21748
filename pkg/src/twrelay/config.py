"""Experiment configuration: a flat key = value text format.

Unknown keys are errors.  The ``lambda`` key maps onto the ``lam``
attribute (a Python keyword cannot be a field name).  The base operating
point is given either as explicit powers (``p1``/``p2``) or as a symmetric
``snr_db`` = 10*log10(P/sigma2); supplying both is rejected.  dB-to-linear
conversion happens here, at the boundary; everything below works in linear
scale.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .errors import ConfigError, ParameterError
from .model import SystemParams, build_params

SWEEP_AXES = ("snr_db", "lambda", "r", "d1")

OUTAGE_ANALYTIC = frozenset(
    {"exact_taylor", "exact_quadrature", "lower_bound", "upper_bound", "high_snr"}
)
CAPACITY_ANALYTIC = frozenset(
    {"capacity_series", "capacity_quadrature", "capacity_bounds"}
)
DMT_ANALYTIC = frozenset({"dmt"})
SHARED_METHODS = frozenset({"mc", "non_coop"})
ALL_METHODS = OUTAGE_ANALYTIC | CAPACITY_ANALYTIC | DMT_ANALYTIC | SHARED_METHODS


@dataclass(frozen=True)
class ExperimentConfig:
    # Base operating point (§ defaults: midpoint relay, unit rates, eta=1).
    p1: float | None = None
    p2: float | None = None
    snr_db: float = 20.0
    sigma2: float = 1.0
    eta: float = 1.0
    lam: float = 0.75
    epsilon: float = 0.5
    d1: float = 0.5
    path_loss_exp: float = 3.0
    t1: float = 1.0
    t2: float = 1.0
    r: float = 0.5
    # Sweep definition.
    sweep: str = "snr_db"
    start: float = 0.0
    stop: float = 30.0
    steps: int = 7
    methods: tuple[str, ...] = ("mc", "exact_quadrature")
    mc_n: int = 1_000_000
    seed: int = 12345
    workers: int = 1
    output_path: str = "sweep.csv"

    @property
    def metric_family(self) -> str:
        """outage / capacity / dmt, inferred from the analytic methods."""
        families = set()
        method_set = set(self.methods)
        if method_set & OUTAGE_ANALYTIC:
            families.add("outage")
        if method_set & CAPACITY_ANALYTIC:
            families.add("capacity")
        if method_set & DMT_ANALYTIC:
            families.add("dmt")
        if len(families) > 1:
            raise ConfigError(
                f"methods mix metric families {sorted(families)}; "
                "one sweep evaluates one metric"
            )
        return families.pop() if families else "outage"

    def base_powers(self) -> tuple[float, float]:
        if self.p1 is not None:
            return float(self.p1), float(self.p2)
        p = self.sigma2 * 10.0 ** (self.snr_db / 10.0)
        return p, p

    def base_params(self) -> SystemParams:
        p1, p2 = self.base_powers()
        return build_params(
            p1, p2, self.sigma2, self.eta, self.lam, self.epsilon,
            self.d1, self.path_loss_exp,
        )

    def validate(self) -> None:
        if self.sweep not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}; got {self.sweep!r}")
        if self.steps < 2:
            raise ConfigError(f"steps must be >= 2; got {self.steps}")
        if not self.start < self.stop:
            raise ConfigError(
                f"sweep range must be increasing; got start={self.start}, stop={self.stop}"
            )
        if not self.methods:
            raise ConfigError("methods must be nonempty")
        unknown = sorted(set(self.methods) - ALL_METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; valid: {sorted(ALL_METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods contains duplicates")
        family = self.metric_family
        if family == "dmt" and "non_coop" in self.methods:
            raise ConfigError("non_coop has no diversity-gain interpretation")
        if self.sweep == "lambda" and not (0.0 < self.start and self.stop < 1.0):
            raise ConfigError(
                f"lambda sweep must stay strictly inside (0, 1); got "
                f"[{self.start}, {self.stop}]"
            )
        if self.sweep == "d1" and not (0.0 < self.start and self.stop < 1.0):
            raise ConfigError(
                f"d1 sweep must stay strictly inside (0, 1); got [{self.start}, {self.stop}]"
            )
        if self.sweep == "r":
            if family != "dmt":
                raise ConfigError("an r sweep only applies to the dmt metric")
            if not (0.0 < self.start and self.stop <= 2.0):
                raise ConfigError(
                    f"r sweep must stay inside (0, 2]; got [{self.start}, {self.stop}]"
                )
        if not 0.0 < self.r <= 2.0:
            raise ConfigError(f"r must lie in (0, 2]; got {self.r}")
        if self.t1 < 0 or self.t2 < 0:
            raise ConfigError(f"target rates must be >= 0; got ({self.t1}, {self.t2})")
        if self.mc_n < 1:
            raise ConfigError(f"mc_n must be >= 1; got {self.mc_n}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1; got {self.workers}")
        if (self.p1 is None) != (self.p2 is None):
            raise ConfigError("p1 and p2 must be given together")
        if family == "dmt":
            p1, p2 = self.base_powers()
            if p1 != p2:
                raise ConfigError(
                    f"the dmt metric assumes symmetric powers; got ({p1}, {p2})"
                )
        if not self.output_path:
            raise ConfigError("output_path must be set")
        try:
            self.base_params()
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc


_KEY_TO_FIELD = {
    "lambda": "lam",
    **{f.name: f.name for f in fields(ExperimentConfig) if f.name != "lam"},
}

_FLOAT_KEYS = {
    "p1", "p2", "snr_db", "sigma2", "eta", "lambda", "epsilon", "d1",
    "path_loss_exp", "t1", "t2", "r", "start", "stop",
}
_INT_KEYS = {"steps", "mc_n", "seed", "workers"}


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the flat key = value format; '#' starts a comment."""
    values: dict[str, object] = {}
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'; got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_TO_FIELD:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        field = _KEY_TO_FIELD[key]
        try:
            if key in _FLOAT_KEYS:
                values[field] = float(value)
            elif key in _INT_KEYS:
                values[field] = int(value)
            elif key == "methods":
                methods = tuple(m.strip() for m in value.split(",") if m.strip())
                values[field] = methods
            else:
                values[field] = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: cannot parse {key} = {value!r}") from exc
    if "snr_db" in seen and ("p1" in seen or "p2" in seen):
        raise ConfigError("give either snr_db or explicit p1/p2, not both")
    config = ExperimentConfig(**values)
    config.validate()
    return config


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text)


def canonical_items(config: ExperimentConfig) -> list[tuple[str, str]]:
    """Deterministic (key, value) echo of a config, for CSV metadata.

    Execution-only knobs that must not influence results (worker count,
    output directory) are excluded so identical experiments emit identical
    bytes regardless of where and how parallel they ran.
    """
    import os

    out = []
    for f in fields(ExperimentConfig):
        if f.name == "workers":
            continue
        key = "lambda" if f.name == "lam" else f.name
        value = getattr(config, f.name)
        if value is None:
            continue
        if f.name == "output_path":
            rendered = os.path.basename(str(value))
        elif isinstance(value, tuple):
            rendered = ",".join(value)
        elif isinstance(value, float):
            rendered = f"{value:.12g}"
        else:
            rendered = str(value)
        out.append((key, rendered))
    return sorted(out)


def with_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Functional update accepting config-file key names (e.g. 'lambda')."""
    mapped = {}
    for key, value in overrides.items():
        field = _KEY_TO_FIELD.get(key, key)
        mapped[field] = value
    updated = replace(config, **mapped)
    updated.validate()
    return updated
