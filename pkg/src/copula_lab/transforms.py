"""Univariate transforms applied to sample coordinates, plus shape detectors.

The transform kinds cover the cases the invariance experiments need: affine
maps, powers, the exponential, negation, and custom strictly increasing
piecewise-linear tables. ``detect_monotone`` and ``detect_affine`` classify an
arbitrary transform (or bare callable) from its values on probe points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateTransformError, DomainError, InputError
from .stats import Sample

KINDS = ("affine", "power", "exp", "negate", "monotone_table")


@dataclass(frozen=True)
class TransformSpec:
    """A named univariate transform.

    Construct through the factory methods (``affine``, ``power``, ``exp``,
    ``negate``, ``monotone_table``, ``identity``). A monotone_table maps the
    observed [min, max] of its input onto the given strictly increasing
    breakpoint values by piecewise-linear interpolation over uniformly spaced
    knots, so it is strictly increasing on any input it is applied to.
    """

    kind: str
    a: float | None = None
    b: float | None = None
    p: float | None = None
    breakpoints: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown transform kind {self.kind!r}; known kinds: {KINDS}")
        if self.kind == "affine":
            if self.a is None or self.b is None:
                raise InputError("affine transform requires both a and b")
            if self.a == 0.0:
                raise DegenerateTransformError("affine slope a must be nonzero")
        elif self.kind == "power":
            if self.p is None:
                raise InputError("power transform requires exponent p")
            if self.p == 0.0:
                raise DegenerateTransformError("power exponent p must be nonzero")
        elif self.kind == "monotone_table":
            bps = self.breakpoints
            if bps is None or len(bps) < 2:
                raise InputError("monotone_table requires at least 2 breakpoints")
            bps = tuple(float(v) for v in bps)
            if any(not math.isfinite(v) for v in bps):
                raise InputError("monotone_table breakpoints must be finite")
            if any(hi <= lo for lo, hi in zip(bps, bps[1:])):
                raise InputError("monotone_table breakpoints must be strictly increasing")
            object.__setattr__(self, "breakpoints", bps)

    @staticmethod
    def affine(a: float, b: float) -> "TransformSpec":
        return TransformSpec(kind="affine", a=float(a), b=float(b))

    @staticmethod
    def identity() -> "TransformSpec":
        return TransformSpec.affine(1.0, 0.0)

    @staticmethod
    def power(p: float) -> "TransformSpec":
        return TransformSpec(kind="power", p=float(p))

    @staticmethod
    def exp() -> "TransformSpec":
        return TransformSpec(kind="exp")

    @staticmethod
    def negate() -> "TransformSpec":
        return TransformSpec(kind="negate")

    @staticmethod
    def monotone_table(*breakpoints: float) -> "TransformSpec":
        return TransformSpec(kind="monotone_table", breakpoints=tuple(breakpoints))

    def __call__(self, values) -> np.ndarray:
        x = np.asarray(values, dtype=float).reshape(-1)
        if self.kind == "affine":
            out = self.a * x + self.b
        elif self.kind == "exp":
            with np.errstate(over="ignore"):
                out = np.exp(x)
            _reject_nonfinite(out, "exp overflowed")
        elif self.kind == "negate":
            out = -x
        elif self.kind == "power":
            p = self.p
            if p != int(p):
                bad = np.flatnonzero(x < 0.0)
                if bad.size:
                    raise DomainError(
                        f"power({p}) is undefined for negative value {x[bad[0]]} at row {bad[0]}"
                    )
            if p < 0:
                bad = np.flatnonzero(x == 0.0)
                if bad.size:
                    raise DomainError(f"power({p}) is undefined at zero (row {bad[0]})")
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                out = np.power(x, p)
            _reject_nonfinite(out, f"power({p}) produced a non-finite value")
        else:  # monotone_table
            lo, hi = float(np.min(x)), float(np.max(x))
            if lo == hi:
                raise DegenerateTransformError(
                    "monotone_table needs inputs with nonzero spread to anchor its knots"
                )
            knots = np.linspace(lo, hi, len(self.breakpoints))
            out = np.interp(x, knots, np.asarray(self.breakpoints))
        return out

    def describe(self) -> str:
        if self.kind == "affine":
            return f"affine(a={self.a:g}, b={self.b:g})"
        if self.kind == "power":
            return f"power({self.p:g})"
        if self.kind == "monotone_table":
            return f"monotone_table({len(self.breakpoints)} breakpoints)"
        return self.kind

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "affine":
            out["a"] = self.a
            out["b"] = self.b
        elif self.kind == "power":
            out["p"] = self.p
        elif self.kind == "monotone_table":
            out["breakpoints"] = list(self.breakpoints)
        return out

    @staticmethod
    def from_json_dict(data: dict) -> "TransformSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise InputError("transform must be an object with a 'kind' field")
        kind = data["kind"]
        if kind == "identity":
            return TransformSpec.identity()
        if kind == "affine":
            return TransformSpec.affine(data.get("a", 1.0), data.get("b", 0.0))
        if kind == "power":
            if "p" not in data:
                raise InputError("power transform requires field 'p'")
            return TransformSpec.power(data["p"])
        if kind == "monotone_table":
            if "breakpoints" not in data:
                raise InputError("monotone_table transform requires field 'breakpoints'")
            return TransformSpec.monotone_table(*data["breakpoints"])
        return TransformSpec(kind=kind)


def _reject_nonfinite(values: np.ndarray, reason: str) -> None:
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DomainError(f"{reason} at row {bad[0]}")


def apply_transform(s: Sample, t_x: TransformSpec, t_y: TransformSpec) -> Sample:
    """Apply t_x to the x coordinates and t_y to the y coordinates, preserving order."""
    return Sample(t_x(s.x), t_y(s.y))


class Monotonicity(str, Enum):
    STRICTLY_INCREASING = "strictly_increasing"
    NONDECREASING = "nondecreasing"
    NONMONOTONE = "nonmonotone"


@dataclass(frozen=True)
class MonotonicityVerdict:
    classification: Monotonicity
    witness: tuple[float, float] | None = None

    def to_json_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "witness": None if self.witness is None else list(self.witness),
        }


@dataclass(frozen=True)
class AffinityVerdict:
    is_affine: bool
    slope: float
    intercept: float
    max_second_difference: float
    max_residual: float
    tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "is_affine": self.is_affine,
            "slope": self.slope,
            "intercept": self.intercept,
            "max_second_difference": self.max_second_difference,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
        }


def _probe_values(t, probes: np.ndarray) -> np.ndarray:
    if isinstance(t, TransformSpec):
        return t(probes)
    values = np.asarray([float(t(p)) for p in probes], dtype=float)
    return values


def _check_probes(probe_points, minimum: int = 3) -> np.ndarray:
    probes = np.asarray(probe_points, dtype=float).reshape(-1)
    if probes.size < minimum:
        raise InputError(f"need at least {minimum} probe points, got {probes.size}")
    if not np.all(np.isfinite(probes)):
        raise InputError("probe points must be finite")
    if np.any(np.diff(probes) <= 0.0):
        raise InputError("probe points must be strictly increasing")
    return probes


def uniform_probes(lo: float, hi: float, count: int = 33) -> np.ndarray:
    """Uniformly spaced probes over [lo, hi], the default detector placement."""
    if not hi > lo:
        raise InputError(f"probe range must satisfy lo < hi, got [{lo}, {hi}]")
    return np.linspace(float(lo), float(hi), int(count))


def detect_monotone(t, probe_points) -> MonotonicityVerdict:
    """Classify a transform from its values on strictly ordered probes.

    Verdicts: strictly_increasing (all consecutive values increase),
    nondecreasing (no decrease, some flat step), nonmonotone (some decrease);
    the witness is the first violating adjacent probe pair.
    """
    probes = _check_probes(probe_points)
    values = _probe_values(t, probes)
    diffs = np.diff(values)
    decreasing = np.flatnonzero(diffs < 0.0)
    if decreasing.size:
        k = int(decreasing[0])
        return MonotonicityVerdict(Monotonicity.NONMONOTONE, (float(probes[k]), float(probes[k + 1])))
    flat = np.flatnonzero(diffs == 0.0)
    if flat.size:
        k = int(flat[0])
        return MonotonicityVerdict(Monotonicity.NONDECREASING, (float(probes[k]), float(probes[k + 1])))
    return MonotonicityVerdict(Monotonicity.STRICTLY_INCREASING)


def detect_affine(t, probe_points, tol: float = 1e-12) -> AffinityVerdict:
    """Decide affinity from second differences f(p+h) - 2 f(p) + f(p-h) on uniform probes.

    The probes must be uniformly spaced (the second-difference criterion is
    only exact for affine maps in that case); any uniform placement works.
    Also reports the least-squares affine fit and its worst residual.
    """
    if not (tol >= 0.0):
        raise InputError(f"tolerance must be >= 0, got {tol}")
    probes = _check_probes(probe_points)
    spacings = np.diff(probes)
    span = float(probes[-1] - probes[0])
    if np.max(np.abs(spacings - spacings[0])) > 1e-9 * max(1.0, span):
        raise InputError("probe points must be uniformly spaced for the affinity test")
    values = _probe_values(t, probes)
    second = values[2:] - 2.0 * values[1:-1] + values[:-2]
    max_second = float(np.max(np.abs(second)))
    slope, intercept = np.polyfit(probes, values, 1)
    residuals = values - (slope * probes + intercept)
    return AffinityVerdict(
        is_affine=max_second <= tol,
        slope=float(slope),
        intercept=float(intercept),
        max_second_difference=max_second,
        max_residual=float(np.max(np.abs(residuals))),
        tolerance=float(tol),
    )
