"""Stochastic ingredients of the multi-antenna receive model.

A single transmitter sends a real sequence ``s(n)`` through an ``L``-tap
channel to ``P`` antennas; each antenna records ``N`` samples in unit-power
complex Gaussian noise::

    H0: X = W
    H1: X = H @ S_L + W

``S_L`` is the ``L x N`` matrix of delayed copies of the signal, ``H`` the
``P x L`` channel with i.i.d. CN(0, sigma2) taps, and ``W`` the ``P x N``
noise with i.i.d. CN(0, 1) entries.

Randomness is drawn from counter-based sub-streams: every component (signal,
channel, noise, ...) of every trial owns a generator keyed by
``(seed, *trial_key, component_tag)``, so a realization never depends on the
order in which trials are executed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import DimensionError, InvalidArgumentError

__all__ = [
    "SignalLaw",
    "Hypothesis",
    "Field",
    "Scenario",
    "Realization",
    "Stream",
    "derive_rng",
    "standard_complex_normal",
    "sigma2_from_snr_db",
    "snr_db_from_sigma2",
    "sample_signal",
    "lagged_signal_matrix",
    "sample_channel",
    "sample_noise",
    "generate_realization",
    "generate_received",
]

_UINT64_MAX = 2**64 - 1


class SignalLaw(str, enum.Enum):
    BINARY = "binary"
    GAUSSIAN = "gaussian"


class Hypothesis(str, enum.Enum):
    H0 = "H0"
    H1 = "H1"


class Field(str, enum.Enum):
    """Scalar field of channel and noise entries.

    ``COMPLEX`` is the receive model. ``REAL`` draws N(0, var) entries instead
    and exists as a diagnostic: the asymptotic GLRT moments used by the
    detector are those of the real Gaussian ensemble.
    """

    COMPLEX = "complex"
    REAL = "real"


class Stream(enum.IntEnum):
    """Component tags used as the last element of a sub-stream key."""

    SIGNAL = 1
    CHANNEL = 2
    NOISE = 3
    WISHART = 4
    POPULATION = 5


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for ``(seed, *key)``.

    Backed by :class:`numpy.random.SeedSequence` spawn keys, which hash the
    key into the PCG64 state; equal keys give bit-identical streams.
    """
    if not 0 <= int(seed) <= _UINT64_MAX:
        raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def sigma2_from_snr_db(snr_db: float, L: int) -> float:
    """Per-tap channel power giving ``10*log10(L*sigma2) == snr_db``."""
    if L < 1:
        raise InvalidArgumentError("SNR is undefined for a channel with no taps")
    return 10.0 ** (snr_db / 10.0) / L


def snr_db_from_sigma2(sigma2: float, L: int) -> float:
    if L < 1 or sigma2 <= 0:
        return -math.inf
    return 10.0 * math.log10(L * sigma2)


@dataclass(frozen=True)
class Scenario:
    """Full configuration of one simulated receive block.

    The aspect ratio ``c = P / N`` is derived on access, never stored.
    """

    P: int
    N: int
    L: int = 0
    sigma2: float = 0.0
    signal_law: SignalLaw = SignalLaw.BINARY
    hypothesis: Hypothesis = Hypothesis.H0
    seed: int = 0
    field: Field = Field.COMPLEX

    def __post_init__(self) -> None:
        object.__setattr__(self, "signal_law", SignalLaw(self.signal_law))
        object.__setattr__(self, "hypothesis", Hypothesis(self.hypothesis))
        object.__setattr__(self, "field", Field(self.field))
        for name in ("P", "N", "L", "seed"):
            value = getattr(self, name)
            if int(value) != value:
                raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.P < 1 or self.N < 1:
            raise InvalidArgumentError(f"P and N must be positive, got P={self.P}, N={self.N}")
        if not 0 <= self.L <= self.N:
            raise InvalidArgumentError(f"L must satisfy 0 <= L <= N, got L={self.L}, N={self.N}")
        if not (self.sigma2 >= 0 and math.isfinite(self.sigma2)):
            raise InvalidArgumentError(f"sigma2 must be finite and non-negative, got {self.sigma2}")
        if not 0 <= self.seed <= _UINT64_MAX:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def c(self) -> float:
        return self.P / self.N

    @property
    def snr_db(self) -> float:
        return snr_db_from_sigma2(self.sigma2, self.L)

    def with_snr_db(self, snr_db: float) -> Scenario:
        return replace(self, sigma2=sigma2_from_snr_db(snr_db, self.L))

    def replace(self, **changes) -> Scenario:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("signal_law", "hypothesis", "field"):
            d[k] = d[k].value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Scenario:
        return cls(**d)


@dataclass(frozen=True)
class Realization:
    """All random components of one trial.

    ``H`` and ``S`` are empty (zero-width) under H0 or when ``L == 0``.
    """

    H: np.ndarray
    S: np.ndarray
    W: np.ndarray
    X: np.ndarray


def sample_signal(length: int, law: SignalLaw | str, rng: np.random.Generator) -> np.ndarray:
    """Draw an i.i.d. transmit sequence.

    Binary values are equiprobable +/-1; Gaussian values are N(0, 1).
    """
    if length < 1:
        raise InvalidArgumentError(f"signal length must be >= 1, got {length}")
    law = SignalLaw(law)
    if law is SignalLaw.BINARY:
        return 2.0 * rng.integers(0, 2, size=length).astype(np.float64) - 1.0
    return rng.standard_normal(length)


def lagged_signal_matrix(s: np.ndarray, N: int, L: int) -> np.ndarray:
    """Stack the ``L`` delayed copies of ``s`` into an ``L x N`` matrix.

    ``s`` holds samples at indices ``n = -(L-1), ..., N-1`` (so ``s[0]`` is
    ``s(-(L-1))``). Row ``l``, column ``n`` is ``s(n - l)``: a linear delay
    that reads the pre-roll instead of wrapping around.
    """
    s = np.asarray(s)
    if L < 0 or N < 1:
        raise InvalidArgumentError(f"need N >= 1 and L >= 0, got N={N}, L={L}")
    if L == 0:
        return np.zeros((0, N), dtype=s.dtype)
    if s.ndim != 1 or s.size < N + L - 1:
        raise InvalidArgumentError(
            f"signal holds {s.size} samples, need at least N + L - 1 = {N + L - 1}"
        )
    return np.stack([s[L - 1 - l : L - 1 - l + N] for l in range(L)])


def standard_complex_normal(shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    # CN(0, 1): real and imaginary parts each N(0, 1/2)
    out = rng.standard_normal(shape + (2,))
    return (out[..., 0] + 1j * out[..., 1]) * np.sqrt(0.5)


def sample_channel(
    P: int,
    L: int,
    sigma2: float,
    rng: np.random.Generator,
    field: Field | str = Field.COMPLEX,
) -> np.ndarray:
    """Draw a ``P x L`` channel with i.i.d. CN(0, sigma2) taps.

    The draw is ``sqrt(sigma2)`` times a unit-power draw from the same
    stream, so channels at different powers are exact rescalings of each
    other.
    """
    if not sigma2 >= 0:
        raise InvalidArgumentError(f"sigma2 must be non-negative, got {sigma2}")
    if Field(field) is Field.REAL:
        unit = rng.standard_normal((P, L))
    else:
        unit = standard_complex_normal((P, L), rng)
    return np.sqrt(sigma2) * unit


def sample_noise(
    P: int, N: int, rng: np.random.Generator, field: Field | str = Field.COMPLEX
) -> np.ndarray:
    """Draw a ``P x N`` noise matrix with i.i.d. CN(0, 1) entries."""
    if P < 1 or N < 1:
        raise DimensionError(f"noise dimensions must be positive, got {P}x{N}")
    if Field(field) is Field.REAL:
        return rng.standard_normal((P, N)).astype(np.complex128)
    return standard_complex_normal((P, N), rng)


def generate_realization(scenario: Scenario, *key: int) -> Realization:
    """Draw every random component of one trial.

    ``key`` identifies the trial (e.g. ``(sweep_index, trial)``); each
    component uses the sub-stream ``(scenario.seed, *key, tag)``. The noise
    stream does not depend on the hypothesis, so an H1 scenario with no
    signal reproduces the H0 output bit for bit.
    """
    sc = scenario
    W = sample_noise(sc.P, sc.N, derive_rng(sc.seed, *key, Stream.NOISE), sc.field)
    if sc.hypothesis is Hypothesis.H0 or sc.L == 0:
        H = np.zeros((sc.P, 0), dtype=np.complex128)
        S = np.zeros((0, sc.N))
        return Realization(H=H, S=S, W=W, X=W)
    s = sample_signal(sc.N + sc.L - 1, sc.signal_law, derive_rng(sc.seed, *key, Stream.SIGNAL))
    S = lagged_signal_matrix(s, sc.N, sc.L)
    H = sample_channel(sc.P, sc.L, sc.sigma2, derive_rng(sc.seed, *key, Stream.CHANNEL), sc.field)
    return Realization(H=H, S=S, W=W, X=H @ S + W)


def generate_received(scenario: Scenario, *key: int) -> np.ndarray:
    """Return the ``P x N`` received matrix for one trial."""
    return generate_realization(scenario, *key).X
