import math

import mpmath
import numpy as np
import pytest

from rmt_detect.errors import DimensionError, NotHermitianError, SingularMatrixError
from rmt_detect.matrices import (
    SpikedCovarianceSpec,
    build_population_spiked,
    build_spiked_wishart,
    build_surrogate,
    hermitian_eigenvalues,
    log_det_psd,
    noise_projection,
    scm,
    signal_part,
    surrogate_signal_part,
)
from rmt_detect.models import Scenario, derive_rng, generate_realization, standard_complex_normal


def random_hermitian(n, rng):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (A + A.conj().T) / 2


def random_pd(n, rng):
    A = rng.standard_normal((n, 2 * n)) + 1j * rng.standard_normal((n, 2 * n))
    return A @ A.conj().T / (2 * n)


def charpoly_roots(M, dps=60):
    """Eigenvalues via Faddeev-LeVerrier coefficients and polynomial roots, in high precision."""
    with mpmath.workdps(dps):
        n = M.shape[0]
        A = mpmath.matrix([[mpmath.mpc(complex(v)) for v in row] for row in M])
        coeffs = [mpmath.mpf(0)] * (n + 1)
        coeffs[n] = mpmath.mpf(1)
        Mk = mpmath.zeros(n, n)
        for k in range(1, n + 1):
            Mk = A * Mk + coeffs[n - k + 1] * mpmath.eye(n)
            AM = A * Mk
            coeffs[n - k] = -sum(AM[i, i] for i in range(n)) / k
        roots = mpmath.polyroots(coeffs[::-1], maxsteps=500, extraprec=200)
        return np.sort([float(mpmath.re(r)) for r in roots])[::-1]


# ---------------------------------------------------------------- scm


def test_scm_identity_input():
    np.testing.assert_allclose(scm(np.eye(2)), 0.5 * np.eye(2))


def test_scm_single_row():
    R = scm(np.array([[1.0, 1j]]))
    assert R.shape == (1, 1)
    assert R[0, 0] == pytest.approx(1.0)


def test_scm_exactly_hermitian_and_trace(rng):
    X = rng.standard_normal((20, 30)) + 1j * rng.standard_normal((20, 30))
    R = scm(X)
    np.testing.assert_array_equal(R, R.conj().T)
    assert np.real(np.trace(R)) == pytest.approx(np.sum(np.abs(X) ** 2) / 30, rel=1e-12)


def test_scm_rejects_vector():
    with pytest.raises(DimensionError):
        scm(np.ones(3))


def test_scm_h0_within_mp_support():
    sc = Scenario(P=256, N=512, seed=1)
    lam = hermitian_eigenvalues(scm(generate_realization(sc, 0).X)).values
    b = (1 + math.sqrt(0.5)) ** 2
    a = (1 - math.sqrt(0.5)) ** 2
    assert lam[0] <= b + 0.15
    assert lam[-1] >= a - 0.15


# ------------------------------------------------------------- surrogate


def test_surrogate_zero_signal_is_trimmed_noise_wishart(rng):
    P, N, L = 5, 9, 2
    W = rng.standard_normal((P, N)) + 1j * rng.standard_normal((P, N))
    R = build_surrogate(np.zeros((P, L)), np.zeros((L, P)), W)
    padded = np.concatenate([np.zeros((P, L)), W[:, L:]], axis=1)
    np.testing.assert_allclose(R, padded @ padded.conj().T / N, atol=1e-14)


def test_surrogate_signal_part_hand_built():
    P, N, L = 4, 8, 1
    H = np.array([[1.0], [2j], [-0.5], [0.25 + 0.25j]])
    Q = np.array([[0.3, -1j, 2.0, 0.5 - 0.5j]])
    W = np.arange(P * N, dtype=float).reshape(P, N) / 10 + 1j
    expected = H @ H.conj().T + (H @ Q + Q.conj().T @ H.conj().T) / math.sqrt(N)
    np.testing.assert_allclose(surrogate_signal_part(H, Q, W), expected, atol=1e-12)
    # full surrogate = signal part + noise part of the padded noise matrix
    W_hat = np.concatenate([Q.conj().T, W[:, L:]], axis=1)
    np.testing.assert_allclose(build_surrogate(H, Q, W), expected + W_hat @ W_hat.conj().T / N, atol=1e-12)


def test_signal_parts_agree_entrywise():
    sc = Scenario(P=24, N=64, L=4, sigma2=0.05, hypothesis="H1", seed=5)
    r = generate_realization(sc, 0)
    Q = noise_projection(r.S, r.W)
    np.testing.assert_allclose(surrogate_signal_part(r.H, Q, r.W), signal_part(r.H, Q, sc.N), rtol=0, atol=1e-12)


def test_scm_decomposes_into_signal_and_noise_parts():
    sc = Scenario(P=24, N=64, L=4, sigma2=0.05, hypothesis="H1", seed=6)
    r = generate_realization(sc, 0)
    Q = noise_projection(r.S, r.W)
    SS = r.S @ r.S.T / sc.N
    HQ = r.H @ Q
    T = r.H @ SS @ r.H.conj().T + (HQ + HQ.conj().T) / math.sqrt(sc.N)
    np.testing.assert_allclose(scm(r.X), T + r.W @ r.W.conj().T / sc.N, atol=1e-12)


def test_surrogate_dimension_checks(rng):
    with pytest.raises(DimensionError):
        build_surrogate(np.zeros((4, 2)), np.zeros((2, 3)), np.zeros((4, 8)))
    with pytest.raises(DimensionError):
        build_surrogate(np.zeros((4, 2)), np.zeros((2, 4)), np.zeros((5, 8)))


@pytest.mark.slow
def test_surrogate_largest_eigenvalue_close_to_scm():
    sc = Scenario(P=256, N=512, L=10, hypothesis="H1", seed=21).with_snr_db(-10)
    top_x, top_s = [], []
    for t in range(20):
        r = generate_realization(sc, t)
        top_x.append(hermitian_eigenvalues(scm(r.X)).values[0])
        top_s.append(hermitian_eigenvalues(build_surrogate(r.H, noise_projection(r.S, r.W), r.W)).values[0])
    assert abs(np.mean(top_s) - np.mean(top_x)) / np.mean(top_x) < 0.05


# ------------------------------------------------------- spiked models


def test_spiked_spec_diagonal():
    np.testing.assert_array_equal(SpikedCovarianceSpec.sample_side(5, 2, 0.5).diagonal(), [3.5, 3.5, 1, 1, 1])
    assert SpikedCovarianceSpec.antenna_side(256, 10, 0.01).spike_value == pytest.approx(3.56)


def test_spiked_wishart_zero_power_is_central_wishart():
    R = build_spiked_wishart(6, 10, 3, 0.0, derive_rng(1))
    Z = standard_complex_normal((6, 10), derive_rng(1))
    np.testing.assert_allclose(R, Z @ Z.conj().T / 10, atol=1e-14)


def test_spiked_wishart_rank_deficient_when_p_exceeds_n():
    lam = hermitian_eigenvalues(build_spiked_wishart(16, 8, 2, 0.1, derive_rng(2))).values
    scale = lam[0]
    assert np.count_nonzero(np.abs(lam) <= 1e-10 * scale) == 16 - 8


def test_population_spiked_zero_power_is_central_wishart():
    R = build_population_spiked(6, 10, 3, 0.0, derive_rng(3))
    Z = standard_complex_normal((6, 10), derive_rng(3))
    np.testing.assert_allclose(R, Z @ Z.conj().T / 10, atol=1e-14)


def test_population_spiked_full_rank_spike_scales_spectrum():
    P, N, s2 = 8, 20, 0.3
    lam = hermitian_eigenvalues(build_population_spiked(P, N, P, s2, derive_rng(4))).values
    base = hermitian_eigenvalues(build_population_spiked(P, N, 0, 0.0, derive_rng(4))).values
    np.testing.assert_allclose(lam, (P * s2 + 1) * base, rtol=1e-12)


@pytest.mark.slow
def test_population_spiked_outliers_match_limit():
    # P sigma2 + 1 = 3.56, c = 1/2: limit 3.56 + 0.5 * 3.56 / 2.56
    P, N, L = 256, 512, 10
    s2 = 2.56 / P
    expected = 3.56 + 0.5 * 3.56 / 2.56
    assert expected == pytest.approx(4.2553125)
    tops = [hermitian_eigenvalues(build_population_spiked(P, N, L, s2, derive_rng(5, t))).values[:L] for t in range(200)]
    assert abs(np.mean(tops) - expected) / expected < 0.02


def test_ab_ba_nonzero_spectra_coincide():
    rng = np.random.default_rng(6)
    for P, N in [(4, 9), (9, 4), (16, 16), (7, 12), (16, 5)]:
        Z = rng.standard_normal((P, N)) + 1j * rng.standard_normal((P, N))
        d = SpikedCovarianceSpec.sample_side(N, min(3, N), 0.7).diagonal()
        A = (Z * d) @ Z.conj().T / N
        half = Z * np.sqrt(d)
        B = half.conj().T @ half / N
        la = hermitian_eigenvalues((A + A.conj().T) / 2).values
        lb = hermitian_eigenvalues((B + B.conj().T) / 2).values
        k = min(P, N)
        np.testing.assert_allclose(la[:k], lb[:k], rtol=1e-8, atol=1e-10)
        assert np.all(np.abs(la[k:]) < 1e-10 * la[0])
        assert np.all(np.abs(lb[k:]) < 1e-10 * lb[0])


def test_all_constructions_psd():
    sc = Scenario(P=32, N=48, L=3, sigma2=0.05, hypothesis="H1", seed=8)
    r = generate_realization(sc, 0)
    mats = [
        scm(r.X),
        build_surrogate(r.H, noise_projection(r.S, r.W), r.W),
        build_spiked_wishart(32, 48, 3, 0.05, derive_rng(9)),
        build_population_spiked(32, 48, 3, 0.05, derive_rng(10)),
    ]
    for M in mats:
        assert hermitian_eigenvalues(M).is_psd()


# ------------------------------------------------------------ spectra


def test_eigenvalues_diagonal():
    np.testing.assert_allclose(hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0])).values, [3, 2, 1])


def test_eigenvalues_textbook():
    np.testing.assert_allclose(hermitian_eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]])).values, [3, 1])


def test_eigenvalues_match_characteristic_polynomial(rng):
    M = random_hermitian(8, rng)
    np.testing.assert_allclose(hermitian_eigenvalues(M).values, charpoly_roots(M), rtol=0, atol=1e-8)


def test_eigen_spectrum_invariants(rng):
    M = random_pd(12, rng)
    spec = hermitian_eigenvalues(M)
    assert np.all(np.diff(spec.values) <= 0)
    assert spec.source_dim == 12
    assert spec.values.sum() == pytest.approx(np.real(np.trace(M)), rel=1e-8)
    assert spec.is_psd()


def test_eigenvalues_reject_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        hermitian_eigenvalues(np.ones((2, 3)))


def test_log_det_identity():
    assert log_det_psd(np.eye(5)) == 0.0


def test_log_det_diagonal():
    assert log_det_psd(np.diag([2.0, 2.0])) == pytest.approx(1.386294361, rel=1e-9)


def test_log_det_matches_eigenvalues(rng):
    M = random_pd(16, rng)
    expected = np.sum(np.log(hermitian_eigenvalues(M).values))
    assert log_det_psd(M) == pytest.approx(expected, rel=1e-8)


def test_log_det_singular():
    X = np.ones((3, 2))
    with pytest.raises(SingularMatrixError):
        log_det_psd(scm(X))
