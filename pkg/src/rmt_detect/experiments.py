"""Monte Carlo harness producing plot-ready result tables.

Every runner takes a :class:`TrialPlan`. Trial ``t`` of sweep point ``i``
draws its randomness from sub-streams keyed by ``(master_seed, i, pool, t)``
(``pool`` separates the H0 and H1 populations of one point), and per-trial
results are reduced in trial order. Output is therefore identical for any
number of worker threads.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .detector import (
    glrt_statistic_from_matrix,
    h0_asymptotics,
    h1_asymptotics,
    half_log_offset,
    theoretical_miss_probability,
    threshold,
)
from .errors import InvalidArgumentError, RmtDetectError, SingularMatrixError
from .matrices import (
    _gram,
    build_population_spiked,
    build_spiked_wishart,
    build_surrogate,
    hermitian_eigenvalues,
    log_det_psd,
    noise_projection,
    scm,
)
from .models import Hypothesis, Scenario, Stream, derive_rng, generate_realization
from .rmt import esd_histogram, ks_distance, mp_density, mp_support, predicted_spikes

__all__ = [
    "TrialPlan",
    "ExperimentResult",
    "resolve_threads",
    "run_esd_overlay",
    "run_eig_comparison",
    "run_glrt_distribution",
    "run_miss_prob_sweep",
    "run_roc",
    "rerun",
    "write_result",
    "read_result",
    "crossing_snr",
]

H0_POOL = 0
H1_POOL = 1

_SCENARIO_KEYS = {"P", "N", "L", "sigma2", "signal_law", "hypothesis", "field"}
_SWEEP_KEYS = _SCENARIO_KEYS | {"snr_db", "p_fa"}

DEFAULT_SNR_GRID = tuple(float(x) for x in np.arange(-22.0, -10.0 + 0.25, 0.5))
DEFAULT_PFA_GRID = tuple(float(x) for x in np.logspace(-3, math.log10(0.5), 50))


def resolve_threads(threads: int | None) -> int:
    """``None`` reads ``RMT_DETECT_THREADS`` (default 1); ``0`` means all cores."""
    if threads is None:
        threads = int(os.environ.get("RMT_DETECT_THREADS", "1"))
    if threads < 0:
        raise InvalidArgumentError(f"threads must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


@dataclass(frozen=True)
class TrialPlan:
    """What to simulate, how often, and from which seed.

    ``sweep`` is a sequence of override dicts, one per sweep point. Keys are
    scenario fields (``P``, ``N``, ``L``, ``sigma2``, ...), ``snr_db`` (sets
    ``sigma2`` from ``10*log10(L*sigma2)``) or ``p_fa``. An empty sweep is a
    single point at the base scenario. ``threads`` affects speed only.
    """

    base_scenario: Scenario
    n_trials: int
    sweep: tuple[dict, ...] = ()
    master_seed: int = 0
    p_fa: float = 0.05
    threads: int = 1

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise InvalidArgumentError(f"n_trials must be >= 1, got {self.n_trials}")
        object.__setattr__(self, "sweep", tuple(dict(p) for p in self.sweep))
        for point in self.sweep:
            bad = set(point) - _SWEEP_KEYS
            if bad:
                raise InvalidArgumentError(f"unsupported sweep parameter(s): {sorted(bad)}")
        if not 0.0 < self.p_fa < 1.0:
            raise InvalidArgumentError(f"p_fa must lie in (0, 1), got {self.p_fa}")

    def points(self) -> list[tuple[Scenario, float]]:
        """Resolved ``(scenario, p_fa)`` for every sweep point."""
        base = replace(self.base_scenario, seed=self.master_seed)
        out = []
        for point in self.sweep or ({},):
            sc = replace(base, **{k: v for k, v in point.items() if k in _SCENARIO_KEYS})
            if "snr_db" in point:
                sc = sc.with_snr_db(point["snr_db"])
            out.append((sc, float(point.get("p_fa", self.p_fa))))
        return out

    def to_dict(self) -> dict:
        return {
            "base_scenario": self.base_scenario.to_dict(),
            "n_trials": self.n_trials,
            "sweep": [dict(p) for p in self.sweep],
            "master_seed": self.master_seed,
            "p_fa": self.p_fa,
        }

    @classmethod
    def from_dict(cls, d: dict, threads: int = 1) -> TrialPlan:
        return cls(
            base_scenario=Scenario.from_dict(d["base_scenario"]),
            n_trials=d["n_trials"],
            sweep=tuple(d.get("sweep", ())),
            master_seed=d.get("master_seed", 0),
            p_fa=d.get("p_fa", 0.05),
            threads=threads,
        )


@dataclass
class ExperimentResult:
    """Named, equal-length columns plus scalar summaries and a rerun recipe."""

    kind: str
    columns: dict[str, np.ndarray]
    summary: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.columns = {k: np.asarray(v, dtype=np.float64) for k, v in self.columns.items()}
        lengths = {v.size for v in self.columns.values()}
        if len(lengths) > 1:
            raise InvalidArgumentError(
                f"column lengths differ: { {k: v.size for k, v in self.columns.items()} }"
            )

    def __len__(self) -> int:
        return next(iter(self.columns.values())).size if self.columns else 0


def _map_trials(fn: Callable[[int], object], n: int, threads: int) -> list:
    if threads <= 1 or n == 1:
        return [fn(t) for t in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, range(n)))


def _metadata(kind: str, plan: TrialPlan, options: dict) -> dict:
    return {"kind": kind, "plan": plan.to_dict(), "options": options, "version": __version__}


def _relative_gap(x: float, y: float) -> float:
    return abs(x - y) / min(abs(x), abs(y))


# ---------------------------------------------------------------- ESD overlay


def run_esd_overlay(plan: TrialPlan, bins: int | None = 40) -> ExperimentResult:
    """Pooled sample-covariance spectra against the MP density.

    Under H1 the ``L`` largest eigenvalues of every trial are the outliers;
    they are excluded from the bulk KS distance and compared with the
    predicted spike limits instead.
    """
    threads = resolve_threads(plan.threads)
    cols: dict[str, list] = {k: [] for k in ("sweep_index", "bin_center", "empirical_density", "mp_density")}
    points = []
    for i, (sc, _) in enumerate(plan.points()):
        def trial(t: int, sc=sc, i=i) -> np.ndarray:
            X = generate_realization(sc, i, H1_POOL if sc.hypothesis is Hypothesis.H1 else H0_POOL, t).X
            return hermitian_eigenvalues(scm(X)).values

        E = np.stack(_map_trials(trial, plan.n_trials, threads))
        a, b, m0 = mp_support(sc.c)
        n_out = sc.L if sc.hypothesis is Hypothesis.H1 else 0
        bulk = E[:, n_out:].ravel()
        lo, hi = min(a, float(bulk.min())), max(b, float(bulk.max()))
        hist = esd_histogram(bulk, bins, range=(lo, hi))
        # bulk density is renormalized to the full spectrum size
        emp = hist.counts / (E.size * hist.widths)
        theory = mp_density(hist.centers, sc.c)
        cols["sweep_index"] += [i] * hist.centers.size
        cols["bin_center"] += list(hist.centers)
        cols["empirical_density"] += list(emp)
        cols["mp_density"] += list(theory)
        mean_eigs = E.mean(axis=0)
        info = {
            "P": sc.P,
            "N": sc.N,
            "c": sc.c,
            "hypothesis": sc.hypothesis.value,
            "mp_a": a,
            "mp_b": b,
            "mass_at_zero": m0,
            "ks_bulk": ks_distance(bulk, sc.c),
            "sup_density_deviation": float(np.max(np.abs(emp - theory))),
            "bulk_min": float(bulk.min()),
            "bulk_max": float(bulk.max()),
            "mean_top_eigenvalues": [float(v) for v in mean_eigs[: max(sc.L, 1) + 5]],
            "n_mean_above_edge": int(np.count_nonzero(mean_eigs > b)),
        }
        if sc.hypothesis is Hypothesis.H1 and sc.L > 0:
            pred = predicted_spikes(sc)
            info["predicted_spike_limits"] = [float(v) for v in pred.limits]
            info["n_predicted_emerged"] = pred.n_emerged
        points.append(info)
    return ExperimentResult(
        "EsdOverlay", cols, {"points": points}, _metadata("EsdOverlay", plan, {"bins": bins})
    )


# ----------------------------------------------------- three-matrix comparison


def run_eig_comparison(plan: TrialPlan, extra: int = 5) -> ExperimentResult:
    """Top eigenvalues of the received SCM and its ESD-equivalent models.

    Per trial and sweep point: the SCM of ``H S_L + W``, the surrogate built
    from the same ``H``, ``Q`` and ``W``, an independent spiked Wishart
    ``Z Sigma_N Z* / N`` and an independent ``Sigma_P``-spiked matrix.
    """
    threads = resolve_threads(plan.threads)
    names = ("scm", "surrogate", "wishart", "population")
    cols: dict[str, list] = {k: [] for k in ("sweep_index", "trial", "rank", *names)}
    points = []
    for i, (sc, _) in enumerate(plan.points()):
        sc = replace(sc, hypothesis=Hypothesis.H1)
        k = min(sc.L + extra, sc.P)

        def trial(t: int, sc=sc, i=i, k=k) -> np.ndarray:
            key = (i, H1_POOL, t)
            r = generate_realization(sc, *key)
            Q = noise_projection(r.S, r.W)
            mats = (
                scm(r.X),
                build_surrogate(r.H, Q, r.W),
                build_spiked_wishart(sc.P, sc.N, sc.L, sc.sigma2, derive_rng(sc.seed, *key, Stream.WISHART)),
                build_population_spiked(sc.P, sc.N, sc.L, sc.sigma2, derive_rng(sc.seed, *key, Stream.POPULATION)),
            )
            return np.stack([hermitian_eigenvalues(M).values[:k] for M in mats])

        T = np.stack(_map_trials(trial, plan.n_trials, threads))  # trials x 4 x k
        for t in range(plan.n_trials):
            cols["sweep_index"] += [i] * k
            cols["trial"] += [t] * k
            cols["rank"] += list(range(k))
            for j, name in enumerate(names):
                cols[name] += list(T[t, j])
        mean_top = T.mean(axis=0)
        largest = {name: float(mean_top[j, 0]) for j, name in enumerate(names)}
        gaps = {
            "scm_surrogate": _relative_gap(largest["scm"], largest["surrogate"]),
            "scm_wishart": _relative_gap(largest["scm"], largest["wishart"]),
            "surrogate_wishart": _relative_gap(largest["surrogate"], largest["wishart"]),
            "scm_population": _relative_gap(largest["scm"], largest["population"]),
        }
        lim = predicted_spikes(sc).limits[0] if sc.L and sc.sigma2 > 0 else float("nan")
        points.append(
            {
                "P": sc.P,
                "N": sc.N,
                "L": sc.L,
                "snr_db": sc.snr_db,
                "sigma2": sc.sigma2,
                "mean_largest": largest,
                "largest_gaps": gaps,
                "max_gap_three": max(gaps["scm_surrogate"], gaps["scm_wishart"], gaps["surrogate_wishart"]),
                "mean_top": {name: [float(v) for v in mean_top[j]] for j, name in enumerate(names)},
                "spike_limit": float(lim) if lim is not None else float("nan"),
                "mp_b": mp_support(sc.c)[1],
            }
        )
    return ExperimentResult(
        "EigComparison", cols, {"points": points}, _metadata("EigComparison", plan, {"extra": extra})
    )


# ---------------------------------------------------------- GLRT distribution


def _statistic_pool(sc: Scenario, key_prefix: tuple[int, ...], n: int, threads: int) -> np.ndarray:
    def trial(t: int) -> float:
        return glrt_statistic_from_matrix(scm(generate_realization(sc, *key_prefix, t).X))

    return np.asarray(_map_trials(trial, n, threads))


def _normal_pdf(x: np.ndarray, mu: float, var: float) -> np.ndarray:
    return np.exp(-0.5 * (x - mu) ** 2 / var) / math.sqrt(2.0 * math.pi * var)


def _moments(x: np.ndarray) -> dict:
    return {
        "mean": float(np.mean(x)),
        "var": float(np.var(x, ddof=1)) if x.size > 1 else 0.0,
        "stderr": float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan"),
        "n": int(x.size),
    }


def run_glrt_distribution(plan: TrialPlan, h0_N: int | None = None, bins: int = 50) -> ExperimentResult:
    """Empirical law of ``D`` under both hypotheses next to the normal limits.

    The base scenario supplies the H1 configuration; the H0 pool uses the
    same ``P`` and ``N = h0_N`` (default: the H1 ``N``).
    """
    threads = resolve_threads(plan.threads)
    cols: dict[str, list] = {
        k: [] for k in ("sweep_index", "bin_center", "density_h0", "density_h1", "theory_h0", "theory_h1")
    }
    points = []
    for i, (sc, p_fa) in enumerate(plan.points()):
        sc1 = replace(sc, hypothesis=Hypothesis.H1)
        sc0 = replace(sc, hypothesis=Hypothesis.H0, N=h0_N or sc.N)
        D0 = _statistic_pool(sc0, (i, H0_POOL), plan.n_trials, threads)
        D1 = _statistic_pool(sc1, (i, H1_POOL), plan.n_trials, threads)
        th0 = h0_asymptotics(sc0.P, sc0.c)
        th1 = h1_asymptotics(sc1.P, sc1.c, sc1.L, sc1.sigma2)
        ref1 = h0_asymptotics(sc1.P, sc1.c)
        gamma = threshold(p_fa)
        edges = np.linspace(min(D0.min(), D1.min()), max(D0.max(), D1.max()), bins + 1)
        centers = 0.5 * (edges[:-1] + edges[1:])
        h0_counts, _ = np.histogram(D0, edges)
        h1_counts, _ = np.histogram(D1, edges)
        w = np.diff(edges)
        cols["sweep_index"] += [i] * bins
        cols["bin_center"] += list(centers)
        cols["density_h0"] += list(h0_counts / (D0.size * w))
        cols["density_h1"] += list(h1_counts / (D1.size * w))
        cols["theory_h0"] += list(_normal_pdf(centers, th0.mu, th0.sigma2))
        cols["theory_h1"] += list(_normal_pdf(centers, th1.mu, th1.sigma2))
        points.append(
            {
                "P": sc.P,
                "N_h0": sc0.N,
                "N_h1": sc1.N,
                "L": sc1.L,
                "sigma2": sc1.sigma2,
                "snr_db": sc1.snr_db,
                "p_fa": p_fa,
                "empirical_h0": _moments(D0),
                "empirical_h1": _moments(D1),
                "theory_h0": {"mu": th0.mu, "sigma2": th0.sigma2},
                "theory_h1": {"mu": th1.mu, "sigma2": th1.sigma2},
                "half_log_offset": half_log_offset(sc1.c),
                "false_alarm_rate": float(np.mean((D0 - th0.mu) / th0.sigma - gamma > 0)),
                "detection_rate": float(np.mean((D1 - ref1.mu) / ref1.sigma - gamma > 0)),
                "detection_theory": 1.0 - theoretical_miss_probability(sc1.P, sc1.c, sc1.L, sc1.sigma2, p_fa),
            }
        )
    return ExperimentResult(
        "GlrtDistribution",
        cols,
        {"points": points},
        _metadata("GlrtDistribution", plan, {"h0_N": h0_N, "bins": bins}),
    )


# ------------------------------------------------- detection vs channel power


def _family_statistics(sc: Scenario, key: tuple[int, ...], sigma2s: Sequence[float]) -> np.ndarray:
    """GLRT statistic of one trial at several channel powers.

    With the trial's unit-power channel ``H1`` (common random numbers across
    the sweep), the SCM at power ``s2`` is ``C + U M(s2) U*`` where
    ``C = W W* / N``, ``U = [H1, K*]``, ``K = S W* / N`` and
    ``M = [[s2 S S*/N, sqrt(s2) I], [sqrt(s2) I, 0]]``. The log-determinant
    then follows from one Cholesky factor of ``C`` and a ``2L x 2L``
    determinant per power.
    """
    r = generate_realization(replace(sc, hypothesis=Hypothesis.H1, sigma2=1.0), *key)
    N, L, P = sc.N, sc.L, sc.P
    C = _gram(r.W, N)
    tr_C = float(np.real(np.trace(C)))
    logdet_C = log_det_psd(C)
    chol = np.linalg.cholesky(C)
    K = (r.S @ r.W.conj().T) / N
    U = np.concatenate([r.H, K.conj().T], axis=1)
    V = np.linalg.solve(chol, U)
    G = V.conj().T @ V  # U* C^-1 U
    SS = (r.S @ r.S.T) / N
    tr_A = float(np.real(np.trace(r.H @ SS @ r.H.conj().T)))
    tr_B = 2.0 * float(np.real(np.trace(r.H @ K)))
    eye = np.eye(2 * L)
    out = np.empty(len(sigma2s))
    for j, s2 in enumerate(sigma2s):
        s = math.sqrt(s2)
        M = np.zeros((2 * L, 2 * L), dtype=np.complex128)
        M[:L, :L] = s2 * SS
        M[:L, L:] = s * np.eye(L)
        M[L:, :L] = s * np.eye(L)
        sign, logabs = np.linalg.slogdet(eye + M @ G)
        if not np.real(sign) > 0:
            raise SingularMatrixError("sample covariance is not positive definite")
        out[j] = s2 * tr_A + s * tr_B + tr_C - (logdet_C + logabs) - P
    return out


def crossing_snr(snr_db: np.ndarray, p_la: np.ndarray, level: float = 0.5) -> float:
    """SNR where a miss curve first drops to ``level``, by linear interpolation."""
    snr_db, p_la = np.asarray(snr_db), np.asarray(p_la)
    below = np.nonzero(p_la <= level)[0]
    if below.size == 0 or below[0] == 0:
        return float("nan")
    j = below[0]
    x0, x1, y0, y1 = snr_db[j - 1], snr_db[j], p_la[j - 1], p_la[j]
    return float(x0 + (y0 - level) * (x1 - x0) / (y0 - y1))


def run_miss_prob_sweep(plan: TrialPlan, snr_grid: Sequence[float] = DEFAULT_SNR_GRID) -> ExperimentResult:
    """Theoretical and empirical miss probability over an SNR grid.

    Sweep points usually vary ``N``. Within a point every SNR reuses the
    trial's ``(H, S, W)`` with the channel rescaled, and the threshold comes
    from the H0 moments at ``c = P/N``.
    """
    threads = resolve_threads(plan.threads)
    snr_grid = np.asarray(snr_grid, dtype=np.float64)
    cols: dict[str, list] = {
        k: [] for k in ("sweep_index", "N", "snr_db", "sigma2", "p_la_theory", "p_la_empirical")
    }
    points = []
    for i, (sc, p_fa) in enumerate(plan.points()):
        sigma2s = [10.0 ** (s / 10.0) / sc.L for s in snr_grid]
        D = np.stack(
            _map_trials(lambda t, sc=sc, i=i: _family_statistics(sc, (i, H1_POOL, t), sigma2s), plan.n_trials, threads)
        )
        h0 = h0_asymptotics(sc.P, sc.c)
        d_thr = h0.mu + h0.sigma * threshold(p_fa)
        emp = np.mean(D <= d_thr, axis=0)
        theory = np.array([theoretical_miss_probability(sc.P, sc.c, sc.L, s2, p_fa) for s2 in sigma2s])
        cols["sweep_index"] += [i] * snr_grid.size
        cols["N"] += [sc.N] * snr_grid.size
        cols["snr_db"] += list(snr_grid)
        cols["sigma2"] += sigma2s
        cols["p_la_theory"] += list(theory)
        cols["p_la_empirical"] += list(emp)
        x_th, x_emp = crossing_snr(snr_grid, theory), crossing_snr(snr_grid, emp)
        points.append(
            {
                "P": sc.P,
                "N": sc.N,
                "L": sc.L,
                "p_fa": p_fa,
                "crossing_theory_db": x_th,
                "crossing_empirical_db": x_emp,
                "horizontal_gap_db": abs(x_th - x_emp),
            }
        )
    shifts = [
        {
            "from_N": a["N"],
            "to_N": b["N"],
            "theory_db": a["crossing_theory_db"] - b["crossing_theory_db"],
            "empirical_db": a["crossing_empirical_db"] - b["crossing_empirical_db"],
        }
        for a, b in zip(points, points[1:])
    ]
    return ExperimentResult(
        "MissProbSweep",
        cols,
        {"points": points, "crossing_shifts": shifts},
        _metadata("MissProbSweep", plan, {"snr_grid": [float(s) for s in snr_grid]}),
    )


# ------------------------------------------------------------------------ ROC


def run_roc(
    plan: TrialPlan,
    snr_list: Sequence[float] = (-16.0, -15.5),
    p_fa_grid: Sequence[float] = DEFAULT_PFA_GRID,
) -> ExperimentResult:
    """Theoretical and empirical ROC curves from shared statistic pools.

    One H0 pool and one H1 family (channel rescaled per SNR) are simulated;
    each false-alarm target only moves the threshold over the same samples.
    """
    threads = resolve_threads(plan.threads)
    sc, _ = plan.points()[0]
    p_fa_grid = np.asarray(p_fa_grid, dtype=np.float64)
    sigma2s = [10.0 ** (s / 10.0) / sc.L for s in snr_list]
    D0 = _statistic_pool(replace(sc, hypothesis=Hypothesis.H0), (0, H0_POOL), plan.n_trials, threads)
    D1 = np.stack(
        _map_trials(lambda t: _family_statistics(sc, (0, H1_POOL, t), sigma2s), plan.n_trials, threads)
    )
    h0 = h0_asymptotics(sc.P, sc.c)
    gammas = np.array([threshold(p) for p in p_fa_grid])
    d_thr = h0.mu + h0.sigma * gammas
    cols: dict[str, list] = {k: [] for k in ("snr_db", "p_fa", "p_fa_empirical", "pd_theory", "pd_empirical")}
    for j, (snr, s2) in enumerate(zip(snr_list, sigma2s)):
        cols["snr_db"] += [snr] * p_fa_grid.size
        cols["p_fa"] += list(p_fa_grid)
        cols["p_fa_empirical"] += list(np.mean(D0[:, None] > d_thr[None, :], axis=0))
        cols["pd_theory"] += [1.0 - theoretical_miss_probability(sc.P, sc.c, sc.L, s2, p) for p in p_fa_grid]
        cols["pd_empirical"] += list(np.mean(D1[:, j, None] > d_thr[None, :], axis=0))
    summary = {"P": sc.P, "N": sc.N, "L": sc.L, "snr_db": list(snr_list), "sigma2": sigma2s}
    return ExperimentResult(
        "Roc",
        cols,
        summary,
        _metadata("Roc", plan, {"snr_list": [float(s) for s in snr_list], "p_fa_grid": [float(p) for p in p_fa_grid]}),
    )


_RUNNERS = {
    "EsdOverlay": run_esd_overlay,
    "EigComparison": run_eig_comparison,
    "GlrtDistribution": run_glrt_distribution,
    "MissProbSweep": run_miss_prob_sweep,
    "Roc": run_roc,
}


def rerun(metadata: dict, threads: int = 1) -> ExperimentResult:
    """Reproduce a result from its metadata."""
    runner = _RUNNERS[metadata["kind"]]
    return runner(TrialPlan.from_dict(metadata["plan"], threads=threads), **metadata["options"])


# ------------------------------------------------------------------------ I/O


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_result(result: ExperimentResult, path: str | os.PathLike, format: str = "csv") -> None:
    """Write columns as CSV (header row, 17 significant digits) or JSON.

    JSON also carries the summary and the metadata needed by :func:`rerun`;
    floats use Python's shortest round-trip representation.
    """
    path = Path(path)
    fmt = format.lower()
    try:
        if fmt == "csv":
            names = list(result.columns)
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(names)
                for row in zip(*(result.columns[n] for n in names)):
                    w.writerow([format_float(v) for v in row])
        elif fmt == "json":
            doc = {
                "kind": result.kind,
                "columns": {k: v.tolist() for k, v in result.columns.items()},
                "summary": _jsonable(result.summary),
                "metadata": _jsonable(result.metadata),
            }
            path.write_text(json.dumps(doc, indent=1) + "\n")
        else:
            raise InvalidArgumentError(f"unknown result format {format!r} (expected csv or json)")
    except OSError as exc:
        raise RmtDetectError(f"cannot write result to {path}: {exc.strerror or exc}") from exc


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def read_result(path: str | os.PathLike) -> ExperimentResult:
    """Read a file written by :func:`write_result` (format from the suffix)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise RmtDetectError(f"cannot read result from {path}: {exc.strerror or exc}") from exc
    if path.suffix.lower() == ".json":
        doc = json.loads(text)
        return ExperimentResult(doc["kind"], doc["columns"], doc.get("summary", {}), doc.get("metadata", {}))
    rows = list(csv.reader(text.splitlines()))
    names = rows[0] if rows else []
    data = {n: [float(r[j]) for r in rows[1:]] for j, n in enumerate(names)}
    return ExperimentResult("csv", data)
