"""Paired samples, rank machinery, dependence coefficients, and the empirical copula.

Everything here is a pure function. Sums that feed the coefficients are
either exact integer sums (Kendall's concordance count, Spearman's squared
rank differences) or exactly rounded float sums (math.fsum for Pearson), so
the documented exact identities hold bitwise: permutation invariance, sign
flip under negation of one coordinate on tie-free data, and zero deltas under
strictly increasing transforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import snap_unit
from .errors import DegenerateSampleError, InputError

# slack used when comparing normalized ranks against u*n; far below the 1/2
# minimum spacing of average ranks, far above float error of the product
_RANK_EPS = 1e-9


@dataclass(frozen=True)
class Sample:
    """n paired observations (x_i, y_i); values must be finite."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.size != y.size:
            raise InputError(f"coordinate lengths differ: {x.size} vs {y.size}")
        if x.size == 0:
            raise InputError("sample must contain at least one pair")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InputError("sample values must be finite (no NaN or infinity)")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, pairs) -> "Sample":
        pairs = list(pairs)
        if not pairs:
            raise InputError("sample must contain at least one pair")
        return cls(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))

    @property
    def n(self) -> int:
        return int(self.x.size)

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def ranks(values) -> np.ndarray:
    """Average ranks (1 = smallest); ties share the mean of the ranks they span.

    The returned vector always sums to exactly n(n+1)/2.
    """
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise InputError("cannot rank an empty sequence")
    if not np.all(np.isfinite(arr)):
        raise InputError("cannot rank non-finite values")
    return rankdata(arr, method="average")


def _require_pairs(s: Sample, op: str) -> None:
    if s.n < 2:
        raise InputError(f"{op} requires at least 2 pairs, got {s.n}")


def kendall_tau(s: Sample) -> float:
    """Concordance coefficient (2/(n(n-1))) * sum_{i<j} sgn(x_j-x_i) sgn(y_j-y_i).

    The pair sum is accumulated as an exact integer, so the result is
    bit-identical to a direct enumeration of all pairs. O(n^2).
    """
    _require_pairs(s, "kendall_tau")
    x, y, n = s.x, s.y, s.n
    concordance = 0
    for i in range(n - 1):
        sx = np.sign(x[i + 1 :] - x[i]).astype(np.int64)
        sy = np.sign(y[i + 1 :] - y[i]).astype(np.int64)
        concordance += int(np.sum(sx * sy))
    return 2.0 * concordance / (n * (n - 1))


def has_ties(s: Sample) -> bool:
    return (np.unique(s.x).size < s.n) or (np.unique(s.y).size < s.n)


def spearman_rho(s: Sample) -> float:
    """Rank correlation.

    Tie-free samples use 1 - 6*sum(d_i^2)/(n(n^2-1)) with d_i the rank
    differences, evaluated as a single exact-integer division so that negating
    one coordinate negates the result exactly. With ties present the Pearson
    correlation of the two average-rank vectors is returned instead.
    """
    _require_pairs(s, "spearman_rho")
    rx = ranks(s.x)
    ry = ranks(s.y)
    if has_ties(s):
        return _pearson_of(rx, ry)
    d = np.rint(rx - ry).astype(np.int64)
    sum_d2 = int(np.sum(d * d))
    denom = s.n * (s.n * s.n - 1)
    return float(denom - 6 * sum_d2) / float(denom)


def _pearson_of(x: np.ndarray, y: np.ndarray) -> float:
    n = x.size
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    dx = x - mean_x
    dy = y - mean_y
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0.0 or syy == 0.0:
        which = "x" if sxx == 0.0 else "y"
        raise DegenerateSampleError(f"{which} coordinate has zero variance")
    return math.fsum(dx * dy) / math.sqrt(sxx * syy)


def pearson_rho(s: Sample) -> float:
    """Linear correlation Cov(X,Y)/(sigma(X) sigma(Y)), population normalization.

    The 1/n factors cancel between numerator and denominator; sums use exact
    (fsum) accumulation so the result is independent of pair order.
    """
    _require_pairs(s, "pearson_rho")
    return _pearson_of(s.x, s.y)


@dataclass(frozen=True)
class DependenceReport:
    """The three dependence coefficients of one sample."""

    kendall_tau: float
    spearman_rho: float
    pearson_rho: float
    n: int
    tie_adjusted: bool

    def to_json_dict(self) -> dict:
        return {
            "kendall_tau": self.kendall_tau,
            "spearman_rho": self.spearman_rho,
            "pearson_rho": self.pearson_rho,
            "n": self.n,
            "tie_adjusted": self.tie_adjusted,
        }


def dependence_report(s: Sample) -> DependenceReport:
    return DependenceReport(
        kendall_tau=kendall_tau(s),
        spearman_rho=spearman_rho(s),
        pearson_rho=pearson_rho(s),
        n=s.n,
        tie_adjusted=has_ties(s),
    )


class EmpiricalCopula:
    """The empirical copula of a sample: (u, v) -> (1/n) #{i : R_i/n <= u and S_i/n <= v}.

    Counting is left-closed, so eval(1, 1) == 1 exactly and two samples with
    identical rank structure induce bitwise-identical empirical copulas.
    """

    def __init__(self, ranks_x: np.ndarray, ranks_y: np.ndarray):
        ranks_x = np.asarray(ranks_x, dtype=float).reshape(-1)
        ranks_y = np.asarray(ranks_y, dtype=float).reshape(-1)
        if ranks_x.size != ranks_y.size or ranks_x.size == 0:
            raise InputError("rank vectors must be nonempty and of equal length")
        self.ranks_x = ranks_x
        self.ranks_y = ranks_y
        # smallest integer thresholds at which each observation starts counting
        self._ix = np.ceil(ranks_x - _RANK_EPS).astype(np.int64)
        self._iy = np.ceil(ranks_y - _RANK_EPS).astype(np.int64)

    @property
    def n(self) -> int:
        return int(self.ranks_x.size)

    def __call__(self, u: float, v: float) -> float:
        u = snap_unit(u, "u")
        v = snap_unit(v, "v")
        n = self.n
        inside = (self.ranks_x <= u * n + _RANK_EPS) & (self.ranks_y <= v * n + _RANK_EPS)
        return int(np.count_nonzero(inside)) / n

    def lattice_counts(self) -> np.ndarray:
        """Counts[i, j] = #{k : R_k <= i and S_k <= j} for i, j = 0..n."""
        n = self.n
        grid = np.zeros((n + 1, n + 1), dtype=np.int64)
        np.add.at(grid, (self._ix, self._iy), 1)
        return np.cumsum(np.cumsum(grid, axis=0), axis=1)


def empirical_copula(s: Sample) -> EmpiricalCopula:
    """Build the empirical copula from the sample's average ranks (n >= 1, ties allowed)."""
    return EmpiricalCopula(ranks(s.x), ranks(s.y))


def empirical_copula_distance(a: EmpiricalCopula, b: EmpiricalCopula) -> float:
    """Max over the n x n lattice {(i/n, j/n)} of |a - b|; 0 iff identical rank structure.

    Runs in O(n^2) time and O(n) memory via a row sweep over rank-x levels.
    """
    if a.n != b.n:
        raise InputError(f"empirical copulas have different sizes: {a.n} vs {b.n}")
    n = a.n
    order_a = np.argsort(a._ix, kind="stable")
    order_b = np.argsort(b._ix, kind="stable")
    ix_a, iy_a = a._ix[order_a], a._iy[order_a]
    ix_b, iy_b = b._ix[order_b], b._iy[order_b]
    hist_a = np.zeros(n + 1, dtype=np.int64)
    hist_b = np.zeros(n + 1, dtype=np.int64)
    pa = pb = 0
    worst = 0
    for level in range(1, n + 1):
        while pa < n and ix_a[pa] == level:
            hist_a[iy_a[pa]] += 1
            pa += 1
        while pb < n and ix_b[pb] == level:
            hist_b[iy_b[pb]] += 1
            pb += 1
        row_gap = int(np.max(np.abs(np.cumsum(hist_a[1:]) - np.cumsum(hist_b[1:]))))
        if row_gap > worst:
            worst = row_gap
    return worst / n
