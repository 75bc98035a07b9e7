"""Triangular fuzzy numbers, alpha-cuts, risk-weighted expectation, and
moment statistics for ensembles of fuzzy random variables.

A triangular fuzzy number (TFN) is stored by its endpoints ``l <= m <= u``:
``m`` is the core value (membership 1), ``l`` and ``u`` bound the support.
Alpha-cuts are expressed through the spreads ``m - l`` and ``u - m``, which
makes the membership function and the cut formula consistent with each other.

Ensemble moments (expectation, variance, covariance, correlation of fuzzy
random variables) are defined through the alpha-cut endpoint processes:
variances and covariances of the lower/upper endpoints are integrated over
alpha on a uniform grid with the trapezoidal rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "TriangularFuzzyNumber",
    "AlphaCut",
    "RiskAttitude",
    "FuzzyEnsemble",
    "crisp",
    "membership",
    "alpha_cut",
    "expectation",
    "scale",
    "reciprocal_scale",
    "add",
    "sub",
    "frv_expectation",
    "frv_variance",
    "frv_covariance",
    "frv_correlation",
]


@dataclass(frozen=True)
class TriangularFuzzyNumber:
    """A triangular fuzzy quantity with endpoints ``l <= m <= u``.

    The degenerate case ``l == m == u`` is a crisp real number and every
    operation reduces to ordinary arithmetic on ``m``.
    """

    l: float
    m: float
    u: float

    def __post_init__(self):
        if not (self.l <= self.m <= self.u):
            raise ValueError(
                f"invalid TFN: need l <= m <= u, got ({self.l}, {self.m}, {self.u})"
            )

    @property
    def is_crisp(self) -> bool:
        return self.l == self.m == self.u

    @property
    def left_spread(self) -> float:
        return self.m - self.l

    @property
    def right_spread(self) -> float:
        return self.u - self.m

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.l, self.m, self.u)


@dataclass(frozen=True)
class AlphaCut:
    """Closed interval of points with membership at least ``alpha``."""

    lo: float
    hi: float
    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.lo > self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class RiskAttitude:
    """Weight eta in [0, 1] shifting attention between the lower and upper
    bounds of a fuzzy price; 0.5 is risk neutral, values below 0.5 are
    pessimistic, values above 0.5 optimistic."""

    eta: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.eta <= 1.0):
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")


EtaLike = Union[RiskAttitude, float]


def _eta_value(eta: EtaLike) -> float:
    if isinstance(eta, RiskAttitude):
        return eta.eta
    return RiskAttitude(float(eta)).eta


def crisp(x: float) -> TriangularFuzzyNumber:
    """Embed a real number as a degenerate TFN."""
    return TriangularFuzzyNumber(x, x, x)


def membership(a: TriangularFuzzyNumber, x: float) -> float:
    """Piecewise-linear hat membership: 0 outside [l, u], 1 at m."""
    if x < a.l or x > a.u:
        return 0.0
    if x == a.m:
        return 1.0
    if x < a.m:
        # a.l < x < a.m here, so the spread is nonzero.
        return (x - a.l) / (a.m - a.l)
    return (a.u - x) / (a.u - a.m)


def alpha_cut(a: TriangularFuzzyNumber, alpha: float) -> AlphaCut:
    """Level set [m - (1-alpha)(m-l), m + (1-alpha)(u-m)].

    alpha = 0 recovers the support [l, u]; alpha = 1 the core point [m, m].
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha == 0.0:
        return AlphaCut(a.l, a.u, 0.0)
    if alpha == 1.0:
        return AlphaCut(a.m, a.m, 1.0)
    lo = a.m - (1.0 - alpha) * (a.m - a.l)
    hi = a.m + (1.0 - alpha) * (a.u - a.m)
    return AlphaCut(lo, hi, alpha)


def expectation(a: TriangularFuzzyNumber, eta: EtaLike = RiskAttitude()) -> float:
    """Risk-weighted expectation ((1-eta)*l + m + eta*u) / 2.

    Monotone non-decreasing in eta; at eta = 0.5 equals (l + 2m + u)/4, and
    for a crisp number it returns m for every eta.
    """
    e = _eta_value(eta)
    return ((1.0 - e) * a.l + a.m + e * a.u) / 2.0


def scale(gamma: float, a: TriangularFuzzyNumber) -> TriangularFuzzyNumber:
    """Scalar multiple; endpoints are reflected for negative gamma so the
    result remains a valid TFN."""
    if gamma >= 0.0:
        return TriangularFuzzyNumber(gamma * a.l, gamma * a.m, gamma * a.u)
    return TriangularFuzzyNumber(gamma * a.u, gamma * a.m, gamma * a.l)


def reciprocal_scale(gamma: float, a: TriangularFuzzyNumber) -> TriangularFuzzyNumber:
    """gamma / a, defined only when the support excludes zero."""
    if gamma == 0.0:
        raise ValueError("gamma must be nonzero")
    if not (a.l > 0.0 or a.u < 0.0):
        raise ValueError(f"support [{a.l}, {a.u}] must exclude 0")
    ends = sorted((gamma / a.l, gamma / a.m, gamma / a.u))
    return TriangularFuzzyNumber(*ends)


def add(a: TriangularFuzzyNumber, b: TriangularFuzzyNumber) -> TriangularFuzzyNumber:
    """Componentwise endpoint sum."""
    return TriangularFuzzyNumber(a.l + b.l, a.m + b.m, a.u + b.u)


def sub(
    a: TriangularFuzzyNumber,
    b: TriangularFuzzyNumber,
    componentwise: bool = False,
) -> TriangularFuzzyNumber:
    """Fuzzy difference.

    Default is interval-arithmetic subtraction (l_a - u_b, m_a - m_b,
    u_a - l_b), which always yields a valid TFN. With ``componentwise=True``
    the endpoints are subtracted pairwise instead; that form can violate the
    ordering invariant whenever ``b`` is wider than ``a``, in which case a
    ValueError is raised.
    """
    if componentwise:
        return TriangularFuzzyNumber(a.l - b.l, a.m - b.m, a.u - b.u)
    return TriangularFuzzyNumber(a.l - b.u, a.m - b.m, a.u - b.l)


@dataclass(frozen=True)
class FuzzyEnsemble:
    """An ordered collection of TFN samples of one fuzzy random variable.

    ``alpha_grid_size`` sets the resolution of the uniform alpha grid used
    by the moment quadratures.
    """

    samples: tuple[TriangularFuzzyNumber, ...]
    alpha_grid_size: int = 101

    def __post_init__(self):
        if self.alpha_grid_size < 2:
            raise ValueError("alpha_grid_size must be at least 2")
        object.__setattr__(self, "samples", tuple(self.samples))

    @classmethod
    def from_samples(
        cls, samples: Iterable[TriangularFuzzyNumber], alpha_grid_size: int = 101
    ) -> "FuzzyEnsemble":
        return cls(tuple(samples), alpha_grid_size)

    @classmethod
    def from_endpoints(
        cls,
        l: Sequence[float],
        m: Sequence[float],
        u: Sequence[float],
        alpha_grid_size: int = 101,
    ) -> "FuzzyEnsemble":
        samples = tuple(
            TriangularFuzzyNumber(float(a), float(b), float(c))
            for a, b, c in zip(l, m, u)
        )
        return cls(samples, alpha_grid_size)

    def __len__(self) -> int:
        return len(self.samples)

    def endpoint_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        l = np.array([s.l for s in self.samples])
        m = np.array([s.m for s in self.samples])
        u = np.array([s.u for s in self.samples])
        return l, m, u


def _cut_endpoint_matrices(ens: FuzzyEnsemble) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lower/upper alpha-cut endpoints of every sample on the alpha grid.

    Returns (alphas, L, U) where L[i, j] is the lower endpoint of sample j
    at alpha level alphas[i] (and likewise U for the upper endpoint).
    """
    l, m, u = ens.endpoint_arrays()
    alphas = np.linspace(0.0, 1.0, ens.alpha_grid_size)
    a = alphas[:, None]
    lower = m[None, :] - (1.0 - a) * (m - l)[None, :]
    upper = m[None, :] + (1.0 - a) * (u - m)[None, :]
    return alphas, lower, upper


def frv_expectation(ens: FuzzyEnsemble) -> TriangularFuzzyNumber:
    """Expectation of a fuzzy random variable: componentwise sample mean.

    For triangular samples this coincides with the mean of the alpha-cut
    endpoints at every alpha level.
    """
    if len(ens) == 0:
        raise ValueError("ensemble is empty")
    l, m, u = ens.endpoint_arrays()
    return TriangularFuzzyNumber(float(np.mean(l)), float(np.mean(m)), float(np.mean(u)))


def frv_variance(ens: FuzzyEnsemble) -> float:
    """Variance of a fuzzy random variable.

    Half the alpha-integral of the sample variances (ddof=1) of the lower
    and upper cut endpoints, evaluated by the trapezoidal rule on the
    ensemble's alpha grid.
    """
    if len(ens) < 2:
        raise ValueError("ensemble must contain at least 2 samples")
    alphas, lower, upper = _cut_endpoint_matrices(ens)
    var_low = np.var(lower, axis=1, ddof=1)
    var_up = np.var(upper, axis=1, ddof=1)
    return 0.5 * float(np.trapezoid(var_low + var_up, alphas))


def _paired_cut_endpoints(
    a: FuzzyEnsemble, b: FuzzyEnsemble
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    if len(a) != len(b):
        raise ValueError(f"ensemble sizes differ: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ValueError("ensembles must contain at least 2 samples")
    if a.alpha_grid_size != b.alpha_grid_size:
        raise ValueError("ensembles must share the alpha grid size")
    alphas, la, ua = _cut_endpoint_matrices(a)
    _, lb, ub = _cut_endpoint_matrices(b)
    return alphas, la, ua, lb, ub


def _row_cov(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample covariance (ddof=1) of each row of x with the same row of y."""
    n = x.shape[1]
    xc = x - x.mean(axis=1, keepdims=True)
    yc = y - y.mean(axis=1, keepdims=True)
    return np.sum(xc * yc, axis=1) / (n - 1)


def frv_covariance(a: FuzzyEnsemble, b: FuzzyEnsemble) -> float:
    """Covariance of two paired fuzzy random variables via the alpha-grid
    trapezoidal rule applied to the endpoint covariances."""
    alphas, la, ua, lb, ub = _paired_cut_endpoints(a, b)
    cov_low = _row_cov(la, lb)
    cov_up = _row_cov(ua, ub)
    return 0.5 * float(np.trapezoid(cov_low + cov_up, alphas))


def frv_correlation(a: FuzzyEnsemble, b: FuzzyEnsemble) -> float:
    """Correlation coefficient Cov / sqrt(Var_a * Var_b); both variances
    must be nonzero."""
    va = frv_variance(a)
    vb = frv_variance(b)
    if va == 0.0 or vb == 0.0:
        raise ValueError("correlation requires both variances to be nonzero")
    return frv_covariance(a, b) / np.sqrt(va * vb)
