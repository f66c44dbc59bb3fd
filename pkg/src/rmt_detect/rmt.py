"""Closed-form random-matrix laws.

Marchenko-Pastur density, support and distribution function for aspect ratio
``c = P/N``; empirical spectral histograms; and the outlier locations of
spiked covariance models above the phase transition ``1 + sqrt(c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import InvalidArgumentError
from .matrices import EigenSpectrum
from .models import Hypothesis, Scenario

__all__ = [
    "MpLaw",
    "EsdHistogram",
    "SpikePrediction",
    "mp_support",
    "mp_density",
    "mp_cdf",
    "mp_quantile",
    "esd_histogram",
    "empirical_cdf",
    "spike_limit",
    "spike_limit_data_side",
    "predicted_spikes",
    "ks_distance",
]

_QUAD_EPSABS = 1e-12


@dataclass(frozen=True)
class MpLaw:
    c: float
    a: float
    b: float
    mass_at_zero: float

    @classmethod
    def from_ratio(cls, c: float) -> MpLaw:
        return cls(c, *mp_support(c))


def _check_c(c: float) -> float:
    c = float(c)
    if not (c > 0 and math.isfinite(c)):
        raise InvalidArgumentError(f"aspect ratio c must be positive, got {c}")
    return c


def mp_support(c: float) -> tuple[float, float, float]:
    """Return ``(a, b, mass_at_zero)`` for aspect ratio ``c``."""
    c = _check_c(c)
    r = math.sqrt(c)
    return (1.0 - r) ** 2, (1.0 + r) ** 2, max(0.0, 1.0 - 1.0 / c)


def mp_density(x, c: float):
    """Continuous part of the MP density; zero outside ``(a, b)``.

    The atom at zero (``c > 1``) is not included.
    """
    a, b, _ = mp_support(c)
    x_arr = np.asarray(x, dtype=np.float64)
    inside = (x_arr > a) & (x_arr < b) & (x_arr > 0)
    xs = np.where(inside, x_arr, 1.0)
    out = np.where(inside, np.sqrt(np.clip((b - xs) * (xs - a), 0.0, None)) / (2.0 * np.pi * c * xs), 0.0)
    return float(out) if out.ndim == 0 else out


def _angle(x: float, a: float, b: float) -> float:
    return math.asin(math.sqrt(min(max((x - a) / (b - a), 0.0), 1.0)))


def _integrand(theta: float, a: float, b: float, c: float) -> float:
    # density dx after x = a + (b - a) sin^2(theta); smooth at both edges
    s2 = math.sin(theta) ** 2
    x = a + (b - a) * s2
    if x <= 0.0:
        return (b - a) * math.cos(theta) ** 2 / (math.pi * c)
    return (b - a) ** 2 * s2 * (1.0 - s2) / (math.pi * c * x)


def _segment(t0: float, t1: float, a: float, b: float, c: float) -> float:
    if t1 <= t0:
        return 0.0
    val, _ = integrate.quad(_integrand, t0, t1, args=(a, b, c), epsabs=_QUAD_EPSABS, epsrel=1e-12, limit=200)
    return val


def mp_cdf(x, c: float):
    """MP distribution function ``P(lambda <= x)``, including the zero atom.

    Computed by adaptive Gauss-Kronrod quadrature of the density after the
    edge substitution ``x = a + (b - a) sin^2(theta)``. Array input is sorted
    and integrated segment by segment, so the cost is one short quadrature
    per point.
    """
    c = _check_c(c)
    a, b, m0 = mp_support(c)
    x_arr = np.asarray(x, dtype=np.float64)
    flat = x_arr.ravel()
    out = np.empty_like(flat)
    order = np.argsort(flat, kind="stable")
    acc, prev = 0.0, 0.0
    for i in order:
        xi = flat[i]
        if xi < 0.0:
            out[i] = 0.0
        elif xi <= a:
            out[i] = m0
        elif xi >= b:
            out[i] = 1.0
        else:
            t = _angle(xi, a, b)
            acc += _segment(prev, t, a, b, c)
            prev = t
            out[i] = min(m0 + acc, 1.0)
    out = out.reshape(x_arr.shape)
    return float(out) if out.ndim == 0 else out


def mp_quantile(p: float, c: float) -> float:
    """Smallest ``x`` with ``mp_cdf(x, c) >= p``."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"probability must lie in [0, 1], got {p}")
    a, b, m0 = mp_support(c)
    if p <= m0:
        return 0.0
    if p >= 1.0:
        return b
    return optimize.brentq(lambda x: mp_cdf(x, c) - p, a, b, xtol=1e-14, rtol=1e-14)


@dataclass(frozen=True)
class EsdHistogram:
    """Binned eigenvalues. Values outside ``bin_edges`` go to under/overflow."""

    bin_edges: np.ndarray
    counts: np.ndarray
    total: int
    underflow: int = 0
    overflow: int = 0

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def density(self) -> np.ndarray:
        """Counts normalized by the total, so in-range mass is at most 1."""
        return self.counts / (self.total * self.widths)


def _values(eigs) -> np.ndarray:
    if isinstance(eigs, EigenSpectrum):
        return eigs.values
    return np.asarray(eigs, dtype=np.float64).ravel()


def esd_histogram(eigs, bin_count: int | None = None, range: tuple[float, float] | None = None) -> EsdHistogram:
    """Histogram of an empirical spectrum.

    ``bin_count=None`` uses the Freedman-Diaconis rule. Without ``range`` the
    bins span ``[min, max]`` of the data.
    """
    v = _values(eigs)
    if v.size == 0:
        raise InvalidArgumentError("cannot histogram an empty spectrum")
    if bin_count is not None and bin_count < 1:
        raise InvalidArgumentError(f"bin_count must be >= 1, got {bin_count}")
    lo, hi = (float(v.min()), float(v.max())) if range is None else map(float, range)
    if hi <= lo:
        hi = lo + 1.0 if range is None else hi
        if hi <= lo:
            raise InvalidArgumentError(f"empty histogram range ({lo}, {hi})")
    inside = v[(v >= lo) & (v <= hi)]
    if bin_count is None:
        edges = np.histogram_bin_edges(inside, bins="fd", range=(lo, hi))
    else:
        edges = np.linspace(lo, hi, bin_count + 1)
    counts, _ = np.histogram(inside, bins=edges)
    return EsdHistogram(
        bin_edges=edges,
        counts=counts.astype(np.int64),
        total=int(v.size),
        underflow=int(np.count_nonzero(v < lo)),
        overflow=int(np.count_nonzero(v > hi)),
    )


def empirical_cdf(eigs, x) -> np.ndarray:
    """ESD ``F(x) = #{lambda_j < x} / P``."""
    v = np.sort(_values(eigs))
    return np.searchsorted(v, np.asarray(x, dtype=np.float64), side="left") / v.size


def spike_limit(lambda_pop: float, c: float) -> float | None:
    """Almost-sure limit of the sample outlier for a population spike.

    Returns ``lambda + c * lambda / (lambda - 1)`` when
    ``lambda > 1 + sqrt(c)``, otherwise ``None``: below the phase transition
    the spike is absorbed into the bulk.
    """
    c = _check_c(c)
    if not lambda_pop > 0:
        raise InvalidArgumentError(f"population eigenvalue must be positive, got {lambda_pop}")
    if lambda_pop <= 1.0 + math.sqrt(c):
        return None
    return lambda_pop + c * lambda_pop / (lambda_pop - 1.0)


def spike_limit_data_side(lambda_popN: float, c: float) -> float:
    """Outlier limit for a sample-side spike ``lambda_N``.

    ``c * lambda_N + lambda_N / (lambda_N - 1)``. With ``lambda_P - 1 =
    c (lambda_N - 1)`` this equals :func:`spike_limit` of ``lambda_P``.
    """
    c = _check_c(c)
    if not lambda_popN > 1:
        raise InvalidArgumentError(f"sample-side spike must exceed 1, got {lambda_popN}")
    return c * lambda_popN + lambda_popN / (lambda_popN - 1.0)


@dataclass(frozen=True)
class SpikePrediction:
    population: np.ndarray
    limits: np.ndarray  # nan where not emerged
    emerged: np.ndarray
    phase_transition_edge: float
    bulk_edge: float

    @property
    def n_emerged(self) -> int:
        return int(np.count_nonzero(self.emerged))


def predicted_spikes(scenario: Scenario) -> SpikePrediction:
    """Outlier limits for the ``L`` antenna-side spikes ``P sigma2 + 1``."""
    if scenario.hypothesis is not Hypothesis.H1:
        raise InvalidArgumentError("no spikes are predicted under H0")
    c = scenario.c
    lam = scenario.P * scenario.sigma2 + 1.0
    limit = spike_limit(lam, c)
    L = scenario.L
    emerged = np.full(L, limit is not None)
    limits = np.full(L, np.nan if limit is None else limit)
    _, b, _ = mp_support(c)
    return SpikePrediction(
        population=np.full(L, lam),
        limits=limits,
        emerged=emerged,
        phase_transition_edge=1.0 + math.sqrt(c),
        bulk_edge=b,
    )


def ks_distance(eigs, law: MpLaw | float, exclude_top: int = 0) -> float:
    """Kolmogorov-Smirnov distance between a spectrum and the MP law.

    ``eigs`` may be an :class:`EigenSpectrum` or an array of pooled
    eigenvalues. ``exclude_top`` drops the largest values of a single
    spectrum first (outliers are not part of the bulk).
    """
    c = law.c if isinstance(law, MpLaw) else float(law)
    v = np.sort(_values(eigs))
    if exclude_top:
        v = v[:-exclude_top]
    n = v.size
    if n == 0:
        raise InvalidArgumentError("cannot compare an empty spectrum")
    F = mp_cdf(v, c)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - F)), np.max(np.abs((i - 1) / n - F))))
