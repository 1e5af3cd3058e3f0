"""Candidate copulas on the unit square and grid-based verification of the copula axioms.

A :class:`Copula2D` is only a *candidate*: it packages an evaluable function
C(u, v) with metadata, and the ``check_*`` operations decide on a finite grid
whether it behaves like a copula (boundary identities, nonnegative rectangle
volumes, Lipschitz bound, monotone partial differences).

All checks are pure functions of their inputs and report deterministic
witnesses: candidates are scanned in a canonical order documented per check,
and the first witness attaining the maximal violation is reported, so results
do not depend on evaluation order or internal parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError, InputError

SNAP_TOL = 1e-12
DEFAULT_TOL = 1e-9


def snap_unit(x: float, what: str = "coordinate") -> float:
    """Return x clamped to [0, 1], tolerating float noise within SNAP_TOL of the ends.

    Values further than SNAP_TOL outside the unit interval raise DomainError.
    """
    x = float(x)
    if math.isnan(x):
        raise DomainError(f"{what} is NaN")
    if x < 0.0:
        if x >= -SNAP_TOL:
            return 0.0
        raise DomainError(f"{what} {x!r} lies outside the unit interval")
    if x > 1.0:
        if x <= 1.0 + SNAP_TOL:
            return 1.0
        raise DomainError(f"{what} {x!r} lies outside the unit interval")
    return x


@dataclass(frozen=True, order=True)
class UnitPoint:
    """A point (u, v) of the closed unit square. Orders lexicographically by (u, v)."""

    u: float
    v: float

    def __post_init__(self):
        object.__setattr__(self, "u", snap_unit(self.u, "u"))
        object.__setattr__(self, "v", snap_unit(self.v, "v"))

    def to_json_dict(self) -> dict:
        return {"u": self.u, "v": self.v}


@dataclass(frozen=True, order=True)
class Rectangle:
    """An axis-aligned rectangle [u1, u2] x [v1, v2] inside the unit square.

    Degenerate rectangles (u1 == u2 or v1 == v2) are allowed. Orders
    lexicographically by (u1, u2, v1, v2).
    """

    u1: float
    u2: float
    v1: float
    v2: float

    def __post_init__(self):
        for name in ("u1", "u2", "v1", "v2"):
            object.__setattr__(self, name, snap_unit(getattr(self, name), name))
        if self.u1 > self.u2 or self.v1 > self.v2:
            raise InputError(
                f"rectangle corners must be ordered: got u1={self.u1}, u2={self.u2}, "
                f"v1={self.v1}, v2={self.v2}"
            )

    @property
    def is_degenerate(self) -> bool:
        return self.u1 == self.u2 or self.v1 == self.v2

    def to_json_dict(self) -> dict:
        return {"u1": self.u1, "u2": self.u2, "v1": self.v1, "v2": self.v2}


@dataclass(frozen=True)
class Copula2D:
    """A named candidate copula: an evaluable function on the closed unit square.

    ``func`` must be pure and total on the square (boundary included) and
    should accept numpy arrays elementwise; scalar-only callables are handled
    with a slower fallback. ``is_copula_claim`` records whether the function
    is claimed to satisfy the copula axioms; the bundled counterexamples
    carry False so verification reports expected failures rather than errors.
    """

    name: str
    func: Callable[..., float] = field(repr=False)
    params: Mapping[str, float] = field(default_factory=dict)
    is_copula_claim: bool = True

    def __call__(self, u: float, v: float) -> float:
        return float(self.func(snap_unit(u, "u"), snap_unit(v, "v")))

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "params": dict(self.params),
            "is_copula_claim": self.is_copula_claim,
        }


@dataclass(frozen=True)
class GridSpec:
    """A uniform grid of n points per axis: exactly {k/(n-1) : k = 0..n-1}."""

    n: int = 21

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise InputError(f"grid size must be an int, got {type(self.n).__name__}")
        if self.n < 2:
            raise InputError(f"grid size must be >= 2, got {self.n}")

    def points(self) -> np.ndarray:
        return np.arange(self.n, dtype=float) / (self.n - 1)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one axiom check.

    Invariants: ``passed`` is exactly ``violation <= tolerance_used``, and
    ``worst_witness`` is present whenever the check failed.
    """

    check_name: str
    passed: bool
    violation: float
    tolerance_used: float
    worst_witness: Rectangle | UnitPoint | None = None

    def to_json_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "passed": self.passed,
            "violation": self.violation,
            "tolerance": self.tolerance_used,
            "witness": None if self.worst_witness is None else self.worst_witness.to_json_dict(),
        }


def _make_report(check_name, violation, tol, witness) -> VerificationReport:
    passed = violation <= tol
    return VerificationReport(
        check_name=check_name,
        passed=passed,
        violation=violation,
        tolerance_used=tol,
        worst_witness=None if passed else witness,
    )


def _require_tol(tol: float) -> float:
    tol = float(tol)
    if not (tol >= 0.0):
        raise InputError(f"tolerance must be >= 0, got {tol}")
    return tol


def grid_values(c: Copula2D, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate c on the grid; returns (points, matrix) with matrix[i, j] = c(u_i, v_j)."""
    pts = grid.points()
    u_mat, v_mat = np.meshgrid(pts, pts, indexing="ij")
    try:
        vals = np.asarray(c.func(u_mat, v_mat), dtype=float)
        if vals.shape != u_mat.shape:
            raise TypeError("non-elementwise result")
    except Exception:
        vals = np.array([[float(c.func(u, v)) for v in pts] for u in pts], dtype=float)
    if not np.all(np.isfinite(vals)):
        i, j = np.argwhere(~np.isfinite(vals))[0]
        raise DomainError(f"{c.name} evaluated to a non-finite value at ({pts[i]}, {pts[j]})")
    return pts, vals


def h_volume(c: Copula2D, r: Rectangle) -> float:
    """Signed volume [c(u2,v2) - c(u1,v2)] - [c(u2,v1) - c(u1,v1)] of r under c."""
    return (c(r.u2, r.v2) - c(r.u1, r.v2)) - (c(r.u2, r.v1) - c(r.u1, r.v1))


def check_boundary(c: Copula2D, grid: GridSpec, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check C(0,v) = C(u,0) = 0 and C(1,v) = v, C(u,1) = u at every grid point.

    Candidates are scanned edge by edge (u=0, v=0, u=1, v=1, each with the free
    coordinate ascending); the first grid point attaining the maximal violation
    is the witness.
    """
    tol = _require_tol(tol)
    pts, vals = grid_values(c, grid)
    streams = [
        (np.abs(vals[0, :]), lambda k: UnitPoint(0.0, pts[k])),
        (np.abs(vals[:, 0]), lambda k: UnitPoint(pts[k], 0.0)),
        (np.abs(vals[-1, :] - pts), lambda k: UnitPoint(1.0, pts[k])),
        (np.abs(vals[:, -1] - pts), lambda k: UnitPoint(pts[k], 1.0)),
    ]
    worst = -math.inf
    witness = None
    for deviations, point_at in streams:
        k = int(np.argmax(deviations))
        if deviations[k] > worst:
            worst = float(deviations[k])
            witness = point_at(k)
    return _make_report("boundary", worst, tol, witness)


def _first_max_upper(violations: np.ndarray) -> tuple[float, int, int]:
    """Max over the strict upper triangle plus the row-major-first index attaining it."""
    m = violations.shape[0]
    masked = np.where(np.triu(np.ones((m, m), dtype=bool), k=1), violations, -np.inf)
    flat = int(np.argmax(masked))
    r, s = divmod(flat, m)
    return float(masked[r, s]), r, s


def check_two_increasing(
    c: Copula2D,
    grid: GridSpec,
    tol: float = DEFAULT_TOL,
    adjacent_only: bool = False,
) -> VerificationReport:
    """Check that every grid rectangle has nonnegative volume.

    By default all O(n^4) rectangles with grid-point corners are enumerated
    (in lexicographic (u1, u2, v1, v2) order); with ``adjacent_only`` only the
    (n-1)^2 unit grid cells are checked, which is sound because cell volumes
    sum to rectangle volumes. The witness is the first rectangle attaining the
    most negative volume.
    """
    tol = _require_tol(tol)
    pts, vals = grid_values(c, grid)
    worst = -math.inf
    witness = None
    if adjacent_only:
        cell_vols = vals[1:, 1:] - vals[:-1, 1:] - vals[1:, :-1] + vals[:-1, :-1]
        flat = int(np.argmin(cell_vols))
        i, j = divmod(flat, cell_vols.shape[1])
        worst = float(-cell_vols[i, j])
        witness = Rectangle(pts[i], pts[i + 1], pts[j], pts[j + 1])
    else:
        n = grid.n
        for i1 in range(n - 1):
            for i2 in range(i1 + 1, n):
                edge = vals[i2, :] - vals[i1, :]
                # violations[j1, j2] = -volume of [u_i1, u_i2] x [v_j1, v_j2]
                violations = edge[:, None] - edge[None, :]
                value, j1, j2 = _first_max_upper(violations)
                if value > worst:
                    worst = value
                    witness = Rectangle(pts[i1], pts[i2], pts[j1], pts[j2])
    return _make_report("two_increasing", max(0.0, worst), tol, witness)


def check_componentwise_monotone(
    c: Copula2D, grid: GridSpec, tol: float = DEFAULT_TOL
) -> VerificationReport:
    """Check c is nondecreasing along every grid line, in u and in v.

    Sweeps u-direction segments first (lines v ascending, then segment start u
    ascending), then v-direction segments (lines u ascending, then start v);
    the witness is the lower endpoint of the first segment attaining the
    maximal decrease.
    """
    tol = _require_tol(tol)
    pts, vals = grid_values(c, grid)
    dec_u = vals[:-1, :] - vals[1:, :]  # dec_u[k, j]: drop from (u_k, v_j) to (u_k+1, v_j)
    dec_v = vals[:, :-1] - vals[:, 1:]
    worst = -math.inf
    witness = None

    by_line_u = dec_u.T  # row-major scan = (line v, segment start u)
    flat = int(np.argmax(by_line_u))
    j, k = divmod(flat, by_line_u.shape[1])
    if by_line_u[j, k] > worst:
        worst = float(by_line_u[j, k])
        witness = UnitPoint(pts[k], pts[j])

    flat = int(np.argmax(dec_v))
    i, k = divmod(flat, dec_v.shape[1])
    if dec_v[i, k] > worst:
        worst = float(dec_v[i, k])
        witness = UnitPoint(pts[i], pts[k])

    return _make_report("componentwise_monotone", max(0.0, worst), tol, witness)


def check_partial_difference_monotone(
    c: Copula2D, grid: GridSpec, tol: float = DEFAULT_TOL
) -> VerificationReport:
    """Check that partial differences of c are nondecreasing.

    For every grid pair v_j1 < v_j2 the map a -> c(a, v_j2) - c(a, v_j1) must
    be nondecreasing across consecutive grid points, and symmetrically with
    the roles of the axes swapped. Each consecutive decrease equals minus the
    volume of a rectangle that is adjacent in one axis, so the witness is
    reported as that rectangle (first of the maximal ones, family by family in
    lexicographic order).
    """
    tol = _require_tol(tol)
    pts, vals = grid_values(c, grid)
    n = grid.n
    worst = -math.inf
    witness = None

    for k in range(n - 1):
        edge = vals[k + 1, :] - vals[k, :]
        violations = edge[:, None] - edge[None, :]
        value, j1, j2 = _first_max_upper(violations)
        candidate = Rectangle(pts[k], pts[k + 1], pts[j1], pts[j2])
        if value > worst or (value == worst and witness is not None and candidate < witness):
            worst = value
            witness = candidate

    for i1 in range(n - 1):
        for i2 in range(i1 + 1, n):
            diff = vals[i2, :] - vals[i1, :]
            drops = diff[:-1] - diff[1:]
            k = int(np.argmax(drops))
            candidate = Rectangle(pts[i1], pts[i2], pts[k], pts[k + 1])
            if drops[k] > worst or (drops[k] == worst and witness is not None and candidate < witness):
                worst = float(drops[k])
                witness = candidate

    return _make_report("partial_difference_monotone", max(0.0, worst), tol, witness)


def check_lipschitz(c: Copula2D, grid: GridSpec, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check |c(x2,y2) - c(x1,y1)| <= |x2-x1| + |y2-y1| over all grid point pairs.

    Pairs are scanned in lexicographic (x1, y1, x2, y2) order; the worst pair
    is reported as the rectangle spanned by its two corners (sides sorted).
    """
    tol = _require_tol(tol)
    pts, vals = grid_values(c, grid)
    n = grid.n
    flat_vals = vals.reshape(-1)
    xs = np.repeat(pts, n)
    ys = np.tile(pts, n)
    worst = -math.inf
    witness = None
    total = n * n
    for p in range(total - 1):
        excess = (
            np.abs(flat_vals[p + 1 :] - flat_vals[p])
            - np.abs(xs[p + 1 :] - xs[p])
            - np.abs(ys[p + 1 :] - ys[p])
        )
        k = int(np.argmax(excess))
        if excess[k] > worst:
            worst = float(excess[k])
            q = p + 1 + k
            witness = Rectangle(
                min(xs[p], xs[q]), max(xs[p], xs[q]), min(ys[p], ys[q]), max(ys[p], ys[q])
            )
    return _make_report("lipschitz", max(0.0, worst), tol, witness)


def verify_copula(
    c: Copula2D,
    grid: GridSpec,
    tol: float = DEFAULT_TOL,
    adjacent_only: bool = False,
) -> list[VerificationReport]:
    """Run all five axiom checks and return their reports, in a fixed order."""
    return [
        check_boundary(c, grid, tol),
        check_two_increasing(c, grid, tol, adjacent_only=adjacent_only),
        check_lipschitz(c, grid, tol),
        check_partial_difference_monotone(c, grid, tol),
        check_componentwise_monotone(c, grid, tol),
    ]


@dataclass(frozen=True)
class MarginalCDF:
    """A univariate distribution function: an evaluable map into [0, 1] plus its support."""

    func: Callable[[float], float] = field(repr=False)
    support: tuple[float, float] = (0.0, 1.0)

    def __call__(self, x: float) -> float:
        return snap_unit(float(self.func(x)), "marginal value")


@dataclass(frozen=True)
class JointCDF:
    """The joint distribution H(x, y) = C(F(x), G(y)) built by sklar_join."""

    copula: Copula2D
    margin_x: MarginalCDF
    margin_y: MarginalCDF

    def __call__(self, x: float, y: float) -> float:
        return self.copula(self.margin_x(x), self.margin_y(y))


def sklar_join(c: Copula2D, margin_x, margin_y) -> JointCDF:
    """Couple two marginal CDFs through c into an evaluable joint CDF.

    Margins may be MarginalCDF instances or bare callables (wrapped with unit
    support). Marginal values outside [0, 1] beyond the snap tolerance raise
    DomainError at evaluation time.
    """
    if not isinstance(margin_x, MarginalCDF):
        margin_x = MarginalCDF(margin_x)
    if not isinstance(margin_y, MarginalCDF):
        margin_y = MarginalCDF(margin_y)
    return JointCDF(copula=c, margin_x=margin_x, margin_y=margin_y)
