"""Seeded Monte Carlo experiments probing which transforms preserve which statistics.

Strictly increasing transforms preserve ranks, so the empirical copula and the
rank coefficients must be preserved *exactly* (zero delta, not merely small);
positive-slope affine maps preserve the Pearson coefficient up to float noise,
a negative slope flips its sign, and squaring correlated normals moves it from
rho to rho^2. Experiments are reproducible from their seed alone: repetition r
of an experiment with seed s draws from PCG64 seeded with SeedSequence((s, r)).
"""

from __future__ import annotations

import json
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigError, InputError
from .stats import (
    Sample,
    empirical_copula,
    empirical_copula_distance,
    kendall_tau,
    pearson_rho,
    spearman_rho,
)
from .transforms import Monotonicity, TransformSpec, apply_transform, detect_monotone, uniform_probes

GENERATOR_NAME = "pcg64"
SCHEMA_VERSION = 1
THREADS_ENV_VAR = "COPULA_LAB_THREADS"

EXPERIMENT_KINDS = ("copula_invariance", "pearson_invariance", "pearson_breakage")
DISTRIBUTION_KINDS = ("bivariate_normal", "uniform_square", "fgm")

# summary buckets: a statistic is preserved exactly at delta == 0, approximately
# within float noise of an algebraic identity, and broken beyond that
APPROX_DELTA = 1e-9


def rng_for(seed: int, repetition: int) -> np.random.Generator:
    """The named deterministic stream for one repetition of one experiment."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, repetition))))


@dataclass(frozen=True)
class DistributionSpec:
    """A bivariate sampling law: correlated normals, independent uniforms, or FGM."""

    kind: str
    rho: float | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ConfigError(
                f"distribution.kind must be one of {DISTRIBUTION_KINDS}, got {self.kind!r}"
            )
        if self.kind == "bivariate_normal":
            if self.rho is None:
                raise ConfigError("distribution.rho is required for bivariate_normal")
            if not abs(self.rho) < 1.0:
                raise ConfigError(f"distribution.rho must satisfy |rho| < 1, got {self.rho}")
        if self.kind == "fgm":
            if self.theta is None:
                raise ConfigError("distribution.theta is required for fgm")
            if not abs(self.theta) <= 1.0:
                raise ConfigError(f"distribution.theta must satisfy |theta| <= 1, got {self.theta}")

    @staticmethod
    def bivariate_normal(rho: float) -> "DistributionSpec":
        return DistributionSpec(kind="bivariate_normal", rho=float(rho))

    @staticmethod
    def uniform_square() -> "DistributionSpec":
        return DistributionSpec(kind="uniform_square")

    @staticmethod
    def fgm(theta: float) -> "DistributionSpec":
        return DistributionSpec(kind="fgm", theta=float(theta))

    def describe(self) -> str:
        if self.kind == "bivariate_normal":
            return f"bivariate_normal(rho={self.rho:g})"
        if self.kind == "fgm":
            return f"fgm(theta={self.theta:g})"
        return self.kind

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.rho is not None:
            out["rho"] = self.rho
        if self.theta is not None:
            out["theta"] = self.theta
        return out

    @staticmethod
    def from_json_dict(data: dict) -> "DistributionSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise ConfigError("distribution must be an object with a 'kind' field")
        return DistributionSpec(
            kind=data["kind"],
            rho=None if data.get("rho") is None else float(data["rho"]),
            theta=None if data.get("theta") is None else float(data["theta"]),
        )


def draw_sample(dist: DistributionSpec, n: int, rng: np.random.Generator) -> Sample:
    """Draw n pairs from the distribution using exactly invertible pipelines."""
    if dist.kind == "bivariate_normal":
        z1 = rng.standard_normal(n)
        z2 = rng.standard_normal(n)
        rho = dist.rho
        return Sample(z1, rho * z1 + math.sqrt(1.0 - rho * rho) * z2)
    if dist.kind == "uniform_square":
        return Sample(rng.random(n), rng.random(n))
    # FGM via the conditional inverse: given U=u, solve F(v|u) = t for v with
    # F(v|u) = (1+A)v - A v^2, A = theta (1 - 2u); the stable root avoids
    # cancellation as A -> 0.
    u = rng.random(n)
    t = rng.random(n)
    a = dist.theta * (1.0 - 2.0 * u)
    v = 2.0 * t / ((1.0 + a) + np.sqrt((1.0 + a) ** 2 - 4.0 * a * t))
    return Sample(u, v)


@dataclass(frozen=True)
class ExperimentConfig:
    """One reproducible experiment: a law, a transform pair, and repetition count."""

    experiment: str
    seed: int
    n_samples: int
    distribution: DistributionSpec
    transforms: tuple[TransformSpec, TransformSpec]
    repetitions: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"experiment must be one of {EXPERIMENT_KINDS}, got {self.experiment!r}"
            )
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if not isinstance(self.n_samples, int) or self.n_samples < 10:
            raise ConfigError(f"n_samples must be an integer >= 10, got {self.n_samples!r}")
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise ConfigError(f"repetitions must be an integer >= 1, got {self.repetitions!r}")
        if len(self.transforms) != 2:
            raise ConfigError("transforms must hold exactly two entries")
        object.__setattr__(self, "transforms", tuple(self.transforms))

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "repetitions": self.repetitions,
            "distribution": self.distribution.to_json_dict(),
            "transforms": [t.to_json_dict() for t in self.transforms],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("experiment entry must be an object")
        for required in ("experiment", "seed", "n_samples", "distribution", "transforms"):
            if required not in data:
                raise ConfigError(f"experiment entry is missing field {required!r}")
        transforms = data["transforms"]
        if not isinstance(transforms, list) or len(transforms) != 2:
            raise ConfigError("transforms must be a list of exactly two transform objects")
        try:
            pair = tuple(TransformSpec.from_json_dict(t) for t in transforms)
        except InputError as exc:
            raise ConfigError(f"transforms: {exc}") from exc
        return ExperimentConfig(
            experiment=data["experiment"],
            seed=data["seed"],
            n_samples=data["n_samples"],
            distribution=DistributionSpec.from_json_dict(data["distribution"]),
            transforms=pair,
            repetitions=data.get("repetitions", 1),
        )


@dataclass(frozen=True)
class InvarianceResult:
    """Before/after values of one statistic under one transformed repetition.

    ``exact_expected`` marks rank identities that must hold with zero delta.
    The optional fields carry the oracle value and Monte Carlo standard error
    when an experiment has them (Pearson expectations, breakage runs).
    """

    statistic_name: str
    before: float
    after: float
    abs_delta: float
    exact_expected: bool
    repetition: int | None = 0
    expected_after: float | None = None
    standard_error: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "statistic_name": self.statistic_name,
            "before": self.before,
            "after": self.after,
            "abs_delta": self.abs_delta,
            "exact_expected": self.exact_expected,
            "repetition": self.repetition,
            "expected_after": self.expected_after,
            "standard_error": self.standard_error,
        }


def _result(name, before, after, exact, rep, expected=None, se=None) -> InvarianceResult:
    return InvarianceResult(
        statistic_name=name,
        before=float(before),
        after=float(after),
        abs_delta=abs(float(before) - float(after)),
        exact_expected=exact,
        repetition=rep,
        expected_after=expected,
        standard_error=se,
    )


def _strictly_increasing_on(t: TransformSpec, values: np.ndarray) -> bool:
    """Whether t strictly increases across the observed support (sorted unique values)."""
    support = np.unique(values)
    if support.size < 2:
        return True
    out = t(support)
    return bool(np.all(np.diff(out) > 0.0))


def copula_invariance_experiment(cfg: ExperimentConfig) -> list[InvarianceResult]:
    """Measure how the empirical copula and rank coefficients move under the transforms.

    When both transforms are strictly increasing on the generated support the
    deltas are rank identities and are reported with exact_expected=True;
    otherwise the observed deltas stand on their own.
    """
    results = []
    t_x, t_y = cfg.transforms
    for rep in range(cfg.repetitions):
        rng = rng_for(cfg.seed, rep)
        before = draw_sample(cfg.distribution, cfg.n_samples, rng)
        exact = _strictly_increasing_on(t_x, before.x) and _strictly_increasing_on(t_y, before.y)
        after = apply_transform(before, t_x, t_y)
        distance = empirical_copula_distance(empirical_copula(before), empirical_copula(after))
        # a copula's distance to itself is 0, so before=0 makes abs_delta the distance
        results.append(_result("empirical_copula_distance", 0.0, distance, exact, rep))
        results.append(_result("kendall_tau", kendall_tau(before), kendall_tau(after), exact, rep))
        results.append(
            _result("spearman_rho", spearman_rho(before), spearman_rho(after), exact, rep)
        )
    return results


def pearson_invariance_experiment(cfg: ExperimentConfig) -> list[InvarianceResult]:
    """Measure the Pearson coefficient before and after an affine transform pair.

    Positive slopes must preserve it to float precision; a negative slope
    flips its sign. The algebraically expected value is recorded alongside.
    """
    t_x, t_y = cfg.transforms
    if t_x.kind != "affine" or t_y.kind != "affine":
        raise InputError("pearson_invariance requires two affine transforms")
    sign = math.copysign(1.0, t_x.a) * math.copysign(1.0, t_y.a)
    results = []
    for rep in range(cfg.repetitions):
        rng = rng_for(cfg.seed, rep)
        before = draw_sample(cfg.distribution, cfg.n_samples, rng)
        after = apply_transform(before, t_x, t_y)
        rho_before = pearson_rho(before)
        rho_after = pearson_rho(after)
        results.append(
            _result(
                "pearson_rho", rho_before, rho_after, False, rep, expected=sign * rho_before
            )
        )
    return results


def pearson_breakage_experiment(cfg: ExperimentConfig) -> InvarianceResult:
    """Demonstrate that squaring breaks the Pearson coefficient of correlated normals.

    For standard bivariate normals corr(X^2, Y^2) = rho^2, so the averaged
    after-value must land within Monte Carlo error of rho^2 rather than rho.
    The standard error is estimated from the repetition spread, which requires
    repetitions >= 2.
    """
    t_x, t_y = cfg.transforms
    if cfg.distribution.kind != "bivariate_normal":
        raise ConfigError("pearson_breakage requires distribution.kind = bivariate_normal")
    if cfg.distribution.rho == 0.0:
        raise ConfigError("pearson_breakage requires distribution.rho != 0 (nothing would break)")
    if not (t_x.kind == "power" and t_x.p == 2.0 and t_y.kind == "power" and t_y.p == 2.0):
        raise ConfigError("pearson_breakage requires transforms = [power(2), power(2)]")
    if cfg.repetitions < 2:
        raise ConfigError("pearson_breakage requires repetitions >= 2 to estimate the Monte Carlo error")
    befores = []
    afters = []
    for rep in range(cfg.repetitions):
        rng = rng_for(cfg.seed, rep)
        before = draw_sample(cfg.distribution, cfg.n_samples, rng)
        after = apply_transform(before, t_x, t_y)
        befores.append(pearson_rho(before))
        afters.append(pearson_rho(after))
    se = statistics.stdev(afters) / math.sqrt(cfg.repetitions)
    return _result(
        "pearson_rho",
        statistics.fmean(befores),
        statistics.fmean(afters),
        False,
        None,
        expected=cfg.distribution.rho ** 2,
        se=se,
    )


_RUNNERS = {
    "copula_invariance": copula_invariance_experiment,
    "pearson_invariance": pearson_invariance_experiment,
    "pearson_breakage": lambda cfg: [pearson_breakage_experiment(cfg)],
}


def _transform_class(cfg: ExperimentConfig) -> str:
    """Empirical class of the transform pair on the support of repetition 0."""
    rng = rng_for(cfg.seed, 0)
    sample = draw_sample(cfg.distribution, cfg.n_samples, rng)
    verdicts = []
    for t, coord in zip(cfg.transforms, (sample.x, sample.y)):
        lo, hi = float(np.min(coord)), float(np.max(coord))
        verdicts.append(detect_monotone(t, uniform_probes(lo, hi)).classification)
    if all(v == Monotonicity.STRICTLY_INCREASING for v in verdicts):
        base = "strictly_increasing_pair"
    elif any(v == Monotonicity.NONMONOTONE for v in verdicts):
        base = "contains_nonmonotone"
    else:
        base = "contains_nonincreasing"
    if all(t.kind == "affine" for t in cfg.transforms):
        signs = "+" if all(t.a > 0 for t in cfg.transforms) else "mixed"
        return f"affine_pair(slopes={signs}), {base}"
    return base


def _preservation(max_delta: float) -> str:
    if max_delta == 0.0:
        return "exact"
    if max_delta <= APPROX_DELTA:
        return "approximate"
    return "broken"


@dataclass(frozen=True)
class BatteryReport:
    """Aggregated outcome of a list of experiments; serializes deterministically."""

    experiments: list[dict] = field(default_factory=list)
    summary: list[dict] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)
    all_exact_held: bool = True

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "rng": {"generator": GENERATOR_NAME, "seeds": list(self.seeds)},
            "experiments": self.experiments,
            "summary": self.summary,
            "all_exact_invariances_held": self.all_exact_held,
        }


def threads_from_env() -> int:
    """Worker cap from COPULA_LAB_THREADS; absent means the serial default (1)."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{THREADS_ENV_VAR} must be a positive integer, got {value}")
    return value


def run_battery(configs: list[ExperimentConfig]) -> BatteryReport:
    """Run every experiment and summarize which statistics each transform pair preserved.

    Experiments may run on a thread pool (capped by COPULA_LAB_THREADS); each
    owns its own seed-derived streams and results are keyed by index, so the
    report is identical however the work is scheduled.
    """
    if not configs:
        raise InputError("run_battery requires at least one experiment config")
    threads = threads_from_env()

    def run_one(item):
        index, cfg = item
        return index, _RUNNERS[cfg.experiment](cfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = dict(pool.map(run_one, enumerate(configs)))
    else:
        outcomes = dict(map(run_one, enumerate(configs)))

    experiments = []
    summary = []
    all_exact_held = True
    for index, cfg in enumerate(configs):
        results = outcomes[index]
        transform_class = _transform_class(cfg)
        experiments.append(
            {
                "index": index,
                "config": cfg.to_json_dict(),
                "transform_class": transform_class,
                "results": [r.to_json_dict() for r in results],
            }
        )
        per_statistic: dict[str, float] = {}
        for r in results:
            per_statistic[r.statistic_name] = max(
                per_statistic.get(r.statistic_name, 0.0), r.abs_delta
            )
            if r.exact_expected and r.abs_delta != 0.0:
                all_exact_held = False
        for statistic in sorted(per_statistic):
            summary.append(
                {
                    "experiment_index": index,
                    "transforms": ", ".join(t.describe() for t in cfg.transforms),
                    "transform_class": transform_class,
                    "statistic": statistic,
                    "max_abs_delta": per_statistic[statistic],
                    "preservation": _preservation(per_statistic[statistic]),
                }
            )
    return BatteryReport(
        experiments=experiments,
        summary=summary,
        seeds=[cfg.seed for cfg in configs],
        all_exact_held=all_exact_held,
    )


def parse_config_document(document: dict) -> list[ExperimentConfig]:
    """Parse a config JSON document {schema_version, experiments: [...]}."""
    if not isinstance(document, dict):
        raise ConfigError("config document must be a JSON object")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    entries = document.get("experiments")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("experiments must be a nonempty list")
    return [ExperimentConfig.from_json_dict(entry) for entry in entries]


def load_config_file(path) -> list[ExperimentConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            document = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return parse_config_document(document)


def shipped_config_names() -> list[str]:
    root = resources.files("copula_lab").joinpath("configs")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_shipped_config(name: str) -> list[ExperimentConfig]:
    """Load one of the configs bundled with the package (see shipped_config_names)."""
    resource = resources.files("copula_lab").joinpath("configs").joinpath(f"{name}.json")
    if not resource.is_file():
        raise ConfigError(
            f"no shipped config named {name!r}; available: {', '.join(shipped_config_names())}"
        )
    return parse_config_document(json.loads(resource.read_text(encoding="utf-8")))
