"""Likelihood-ratio detection of a signal in white noise.

The statistic ``D = tr R - log det R - P = sum(lambda - log lambda - 1)``
tests whether the sample covariance ``R`` of a ``P x N`` block came from an
identity population covariance. For ``0 < c = P/N < 1`` it is asymptotically
normal with closed-form mean and variance under both hypotheses; those
moments give the threshold for a target false-alarm rate and the predicted
miss probability.

The closed forms are evaluated exactly as stated. In particular the H1 mean
carries ``+log(1-c)/2`` where the H0 mean carries ``-log(1-c)/2``, so with
no signal the two means differ by :func:`half_log_offset`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SingularMatrixError, UnsupportedRegimeError
from .matrices import EigenSpectrum, _check_square_hermitian, log_det_psd
from .models import Hypothesis

__all__ = [
    "Decision",
    "GlrtAsymptotics",
    "DetectionOutcome",
    "glrt_statistic",
    "glrt_statistic_from_matrix",
    "glrt_variance",
    "h0_asymptotics",
    "h1_asymptotics",
    "half_log_offset",
    "q_function",
    "threshold",
    "detect",
    "detect_statistic",
    "theoretical_miss_probability",
]


class Decision(str, enum.Enum):
    SIGNAL_PRESENT = "SignalPresent"
    NOISE_ONLY = "NoiseOnly"


@dataclass(frozen=True)
class GlrtAsymptotics:
    mu: float
    sigma2: float
    hypothesis: Hypothesis

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class DetectionOutcome:
    D: float
    G_prime: float
    gamma: float
    decision: Decision
    p_fa_target: float

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "gamma": self.gamma,
            "G_prime": self.G_prime,
            "decision": self.decision.value,
            "p_fa": self.p_fa_target,
        }


def glrt_statistic(eigs: EigenSpectrum | np.ndarray) -> float:
    """``sum(lambda - log lambda - 1)`` over the spectrum."""
    lam = eigs.values if isinstance(eigs, EigenSpectrum) else np.asarray(eigs, dtype=np.float64)
    if lam.size == 0:
        raise InvalidArgumentError("empty spectrum")
    if np.any(lam <= 0):
        raise SingularMatrixError(
            f"spectrum has {np.count_nonzero(lam <= 0)} non-positive eigenvalue(s); need N >= P"
        )
    return float(np.sum(lam - np.log(lam) - 1.0))


def glrt_statistic_from_matrix(R: np.ndarray) -> float:
    """``tr R - log det R - P`` without an eigendecomposition."""
    R = _check_square_hermitian(R)
    return float(np.real(np.trace(R))) - log_det_psd(R) - R.shape[0]


def _check_regime(c: float) -> float:
    c = float(c)
    if not 0.0 < c < 1.0:
        raise UnsupportedRegimeError(
            f"aspect ratio c = P/N = {c:.6g} is outside (0, 1); the asymptotic moments need log(1 - c)"
        )
    return c


def glrt_variance(c: float) -> float:
    """``-2 log(1-c) - 2c``, shared by both hypotheses."""
    c = _check_regime(c)
    return -2.0 * math.log1p(-c) - 2.0 * c


def half_log_offset(c: float) -> float:
    """``mu_H1 - mu_H0`` when the signal vanishes: ``log(1 - c)``."""
    return math.log1p(-_check_regime(c))


def h0_asymptotics(P: int, c: float) -> GlrtAsymptotics:
    c = _check_regime(c)
    lg = math.log1p(-c)
    mu = P * (1.0 - (c - 1.0) / c * lg) - lg / 2.0
    return GlrtAsymptotics(mu=mu, sigma2=glrt_variance(c), hypothesis=Hypothesis.H0)


def h1_asymptotics(P: int, c: float, L: int, sigma2_chan: float) -> GlrtAsymptotics:
    """Asymptotic mean and variance of ``D`` with ``L`` taps of power ``sigma2_chan``."""
    c = _check_regime(c)
    if L < 0:
        raise InvalidArgumentError(f"L must be non-negative, got {L}")
    if not sigma2_chan >= 0:
        raise InvalidArgumentError(f"channel power must be non-negative, got {sigma2_chan}")
    lg = math.log1p(-c)
    spike = P * sigma2_chan + 1.0
    mu = (
        P * (1.0 + L * spike / P - L / P - L * math.log(spike) / P - (1.0 - 1.0 / c) * lg)
        + lg / 2.0
    )
    return GlrtAsymptotics(mu=mu, sigma2=glrt_variance(c), hypothesis=Hypothesis.H1)


def q_function(x: float) -> float:
    """Standard normal upper tail ``P(Z > x)``."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def threshold(p_fa: float) -> float:
    """``gamma`` with ``q_function(gamma) == p_fa``.

    Bisection on a bracket that always contains the root, then Newton steps
    on the tail probability itself.
    """
    if not 0.0 < p_fa < 1.0:
        raise InvalidArgumentError(f"false-alarm probability must lie in (0, 1), got {p_fa}")
    lo, hi = -40.0, 40.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if q_function(mid) > p_fa:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(3):
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf == 0.0:
            break
        x += (q_function(x) - p_fa) / pdf
    return x


def detect_statistic(D: float, p_fa: float, P: int, c: float) -> DetectionOutcome:
    """Threshold an already computed statistic against the H0 moments."""
    h0 = h0_asymptotics(P, c)
    gamma = threshold(p_fa)
    g = (D - h0.mu) / h0.sigma - gamma
    decision = Decision.SIGNAL_PRESENT if g > 0 else Decision.NOISE_ONLY
    return DetectionOutcome(D=float(D), G_prime=g, gamma=gamma, decision=decision, p_fa_target=p_fa)


def detect(eigs: EigenSpectrum | np.ndarray, p_fa: float, P: int, c: float) -> DetectionOutcome:
    """Decide signal presence from a sample covariance spectrum.

    Computes ``D``, sets ``gamma = Q^-1(p_fa)`` and declares a signal when
    ``G' = (D - mu_H0) / sigma - gamma`` is positive. Both hypotheses are
    standardized with the H0 moments, since the channel power is unknown at
    decision time.
    """
    _check_regime(c)
    return detect_statistic(glrt_statistic(eigs), p_fa, P, c)


def theoretical_miss_probability(P: int, c: float, L: int, sigma2_chan: float, p_fa: float) -> float:
    """``Q((mu_H1 - mu_H0) / sigma - gamma)``."""
    h0 = h0_asymptotics(P, c)
    h1 = h1_asymptotics(P, c, L, sigma2_chan)
    return q_function((h1.mu - h0.mu) / h0.sigma - threshold(p_fa))
