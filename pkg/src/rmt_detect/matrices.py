"""Covariance constructions and Hermitian spectral primitives.

Four ``P x P`` matrices share one limiting spectral distribution:

* :func:`scm` -- the sample covariance ``X X* / N`` of the received data;
* :func:`build_surrogate` -- the same signal part rearranged so that the
  channel occupies the first ``L`` columns of a ``P x N`` information matrix;
* :func:`build_spiked_wishart` -- ``Z Sigma_N Z* / N`` with the spikes on the
  sample side;
* :func:`build_population_spiked` -- ``Sigma_P^1/2 Z Z* Sigma_P^1/2 / N`` with
  the spikes on the antenna side.

Every construction is reduced to ``P x P`` Gram form before any spectral work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    EigenConvergenceError,
    InvalidArgumentError,
    NotHermitianError,
    SingularMatrixError,
)
from .models import standard_complex_normal

__all__ = [
    "SpikedCovarianceSpec",
    "EigenSpectrum",
    "scm",
    "signal_part",
    "surrogate_signal_part",
    "noise_projection",
    "build_surrogate",
    "build_spiked_wishart",
    "build_population_spiked",
    "hermitian_eigenvalues",
    "log_det_psd",
]

HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class SpikedCovarianceSpec:
    """Diagonal covariance with ``L`` equal spikes followed by a unit bulk."""

    dim: int
    L: int
    spike_value: float
    bulk_value: float = 1.0

    def __post_init__(self) -> None:
        if not 0 <= self.L <= self.dim:
            raise InvalidArgumentError(f"need 0 <= L <= dim, got L={self.L}, dim={self.dim}")

    @classmethod
    def sample_side(cls, N: int, L: int, sigma2: float) -> SpikedCovarianceSpec:
        return cls(dim=N, L=L, spike_value=N * sigma2 + 1.0)

    @classmethod
    def antenna_side(cls, P: int, L: int, sigma2: float) -> SpikedCovarianceSpec:
        return cls(dim=P, L=L, spike_value=P * sigma2 + 1.0)

    def diagonal(self) -> np.ndarray:
        d = np.full(self.dim, self.bulk_value, dtype=np.float64)
        d[: self.L] = self.spike_value
        return d


@dataclass(frozen=True)
class EigenSpectrum:
    """Real eigenvalues of a Hermitian matrix, sorted descending."""

    values: np.ndarray
    source_dim: int

    def __len__(self) -> int:
        return self.values.size

    @property
    def ascending(self) -> np.ndarray:
        return self.values[::-1]

    def top(self, k: int) -> np.ndarray:
        return self.values[:k]

    def bulk(self, exclude_top: int) -> EigenSpectrum:
        return EigenSpectrum(self.values[exclude_top:], self.source_dim)

    def is_psd(self, rtol: float = 1e-8) -> bool:
        scale = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        return bool(self.values.size == 0 or self.values[-1] >= -rtol * scale)


def _gram(Y: np.ndarray, N: int) -> np.ndarray:
    M = (Y @ Y.conj().T) / N
    return 0.5 * (M + M.conj().T)


def scm(X: np.ndarray) -> np.ndarray:
    """Sample covariance ``X X* / N`` of a ``P x N`` data matrix.

    The product is symmetrized, ``(M + M*) / 2``, so the result is exactly
    Hermitian.
    """
    X = np.asarray(X)
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D data matrix, got shape {X.shape}")
    if X.shape[1] < 1:
        raise DimensionError("data matrix has no samples")
    return _gram(X, X.shape[1])


def noise_projection(S: np.ndarray, W: np.ndarray) -> np.ndarray:
    """``Q = S_L W* / sqrt(N)``, the ``L x P`` signal/noise cross term."""
    if S.shape[1] != W.shape[1]:
        raise DimensionError(f"S is {S.shape}, W is {W.shape}: sample counts differ")
    return (S @ W.conj().T) / np.sqrt(W.shape[1])


def signal_part(H: np.ndarray, Q: np.ndarray, N: int) -> np.ndarray:
    """``H H* + (H Q + Q* H*) / sqrt(N)``: the SCM minus its noise Gram part.

    This is the large-sample form, with ``S_L S_L* / N`` replaced by the
    identity.
    """
    if H.shape[1] != Q.shape[0] or H.shape[0] != Q.shape[1]:
        raise DimensionError(f"H is {H.shape}, Q is {Q.shape}")
    HQ = H @ Q
    return H @ H.conj().T + (HQ + HQ.conj().T) / np.sqrt(N)


def _surrogate_parts(H: np.ndarray, Q: np.ndarray, W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    P, L = H.shape
    if W.ndim != 2 or W.shape[0] != P:
        raise DimensionError(f"W is {W.shape}, expected {P} rows")
    N = W.shape[1]
    if Q.shape != (L, P):
        raise DimensionError(f"Q is {Q.shape}, expected {(L, P)}")
    if L > N:
        raise DimensionError(f"L={L} exceeds N={N}")
    H_hat = np.zeros((P, N), dtype=np.complex128)
    H_hat[:, :L] = np.sqrt(N) * H
    W_hat = np.empty((P, N), dtype=np.complex128)
    W_hat[:, :L] = Q.conj().T
    W_hat[:, L:] = W[:, L:]
    return H_hat, W_hat


def surrogate_signal_part(H: np.ndarray, Q: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Signal part of the surrogate, expanded from its information matrix.

    Returns ``(Ĥ Ĥ* + Ĥ Ŵ* + Ŵ Ĥ*) / N``, computed from the padded ``P x N``
    matrices rather than from ``H`` and ``Q`` directly.
    """
    H_hat, W_hat = _surrogate_parts(H, Q, W)
    N = W.shape[1]
    cross = H_hat @ W_hat.conj().T
    return (H_hat @ H_hat.conj().T + cross + cross.conj().T) / N


def build_surrogate(H: np.ndarray, Q: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Surrogate covariance ``(Ĥ + Ŵ)(Ĥ + Ŵ)* / N``.

    Parameters
    ----------
    H : (P, L) complex array
        Channel.
    Q : (L, P) complex array
        Cross term ``S_L W* / sqrt(N)``.
    W : (P, N) complex array
        Noise. Only its last ``N - L`` columns are used.

    Returns
    -------
    (P, P) Hermitian array. ``Ĥ`` holds ``sqrt(N) H`` in its first ``L``
    columns and zeros elsewhere; ``Ŵ`` holds ``Q*`` in its first ``L``
    columns followed by the last ``N - L`` columns of ``W``.
    """
    H_hat, W_hat = _surrogate_parts(np.asarray(H), np.asarray(Q), np.asarray(W))
    return _gram(H_hat + W_hat, W.shape[1])


def build_spiked_wishart(
    P: int, N: int, L: int, sigma2: float, rng: np.random.Generator
) -> np.ndarray:
    """Central Wishart ``Z Sigma_N Z* / N`` with sample-side spikes ``N sigma2 + 1``."""
    if not 0 <= L <= N:
        raise DimensionError(f"need 0 <= L <= N, got L={L}, N={N}")
    if not sigma2 >= 0:
        raise InvalidArgumentError(f"sigma2 must be non-negative, got {sigma2}")
    Z = standard_complex_normal((P, N), rng)
    d = SpikedCovarianceSpec.sample_side(N, L, sigma2).diagonal()
    return _gram(Z * np.sqrt(d), N)


def build_population_spiked(
    P: int, N: int, L: int, sigma2: float, rng: np.random.Generator
) -> np.ndarray:
    """``Sigma_P^1/2 Z Z* Sigma_P^1/2 / N`` with antenna-side spikes ``P sigma2 + 1``."""
    if not 0 <= L <= P:
        raise DimensionError(f"need 0 <= L <= P, got L={L}, P={P}")
    if not sigma2 >= 0:
        raise InvalidArgumentError(f"sigma2 must be non-negative, got {sigma2}")
    Z = standard_complex_normal((P, N), rng)
    d = SpikedCovarianceSpec.antenna_side(P, L, sigma2).diagonal()
    return _gram(np.sqrt(d)[:, None] * Z, N)


def _check_square_hermitian(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {M.shape}")
    scale = float(np.max(np.abs(M)))
    asym = float(np.max(np.abs(M - M.conj().T)))
    if asym > HERMITIAN_RTOL * max(scale, np.finfo(float).tiny):
        raise NotHermitianError(f"matrix asymmetry {asym:.3e} exceeds tolerance (scale {scale:.3e})")
    return M


def hermitian_eigenvalues(M: np.ndarray) -> EigenSpectrum:
    """All eigenvalues of a Hermitian matrix, sorted descending."""
    M = _check_square_hermitian(M)
    try:
        w = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(
            f"eigensolver failed on a {M.shape[0]}x{M.shape[0]} matrix: {exc}"
        ) from exc
    return EigenSpectrum(values=w[::-1].copy(), source_dim=M.shape[0])


def log_det_psd(M: np.ndarray) -> float:
    """``log det M`` of a Hermitian positive-definite matrix via Cholesky."""
    M = _check_square_hermitian(M)
    try:
        C = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            f"{M.shape[0]}x{M.shape[0]} matrix is not positive definite; "
            "a sample covariance needs N >= P"
        ) from exc
    diag = np.real(np.diagonal(C))
    if np.any(diag <= 0):
        raise SingularMatrixError("Cholesky factor has a non-positive pivot")
    return float(2.0 * np.sum(np.log(diag)))

