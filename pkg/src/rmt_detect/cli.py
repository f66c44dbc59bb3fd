"""Command-line entry point.

Every subcommand only assembles a scenario and a trial plan from flags and
an optional JSON config, then calls the library. Flags override config
values. The effective plan is written into the result metadata.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .detector import detect
from .errors import RmtDetectError
from .experiments import (
    DEFAULT_PFA_GRID,
    DEFAULT_SNR_GRID,
    ExperimentResult,
    TrialPlan,
    format_float,
    run_eig_comparison,
    run_esd_overlay,
    run_glrt_distribution,
    run_miss_prob_sweep,
    run_roc,
    write_result,
)
from .matrices import hermitian_eigenvalues, scm
from .models import Scenario, generate_received
from .rmt import mp_density, mp_support

__all__ = ["main", "parse_and_dispatch", "read_samples_csv", "write_samples_csv", "UsageError"]


class UsageError(Exception):
    """Bad flags or config; exit status 2."""


# ------------------------------------------------------------ sample files


def read_samples_csv(path: str | Path) -> np.ndarray:
    """Read a ``P x N`` complex matrix: one antenna per line, interleaved re,im.

    A first line whose first field is not a number is taken as a header.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise RmtDetectError(f"cannot read input file {path}: {exc.strerror or exc}") from exc
    rows, width, first = [], None, True
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if first:
            first = False
            if not _is_number(fields[0]):
                continue
        try:
            values = [float(f) for f in fields]
        except ValueError:
            bad = next(f for f in fields if not _is_number(f))
            raise RmtDetectError(f"{path}:{lineno}: non-numeric field {bad!r}") from None
        if len(values) % 2:
            raise RmtDetectError(f"{path}:{lineno}: odd field count {len(values)}; expected re,im pairs")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise RmtDetectError(f"{path}:{lineno}: ragged row with {len(values)} fields, expected {width}")
        rows.append(values)
    if not rows:
        raise RmtDetectError(f"{path}: no sample rows")
    a = np.asarray(rows, dtype=np.float64)
    return a[:, 0::2] + 1j * a[:, 1::2]


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def write_samples_csv(X: np.ndarray, path: str | Path) -> None:
    X = np.atleast_2d(np.asarray(X, dtype=np.complex128))
    inter = np.empty((X.shape[0], 2 * X.shape[1]))
    inter[:, 0::2] = X.real
    inter[:, 1::2] = X.imag
    try:
        with Path(path).open("w") as fh:
            for row in inter:
                fh.write(",".join(format_float(v) for v in row) + "\n")
    except OSError as exc:
        raise RmtDetectError(f"cannot write samples to {path}: {exc.strerror or exc}") from exc


# ------------------------------------------------------------------ parsing


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _ints(text) -> list[int]:
    return [int(v) for v in _floats(text)]


_SCENARIO_DEFAULTS = {
    "P": 256,
    "N": None,
    "c": None,
    "L": 10,
    "sigma2": None,
    "snr_db": None,
    "signal_law": "binary",
    "hypothesis": "H0",
    "field": "complex",
}
_RUN_DEFAULTS = {"seed": 0, "threads": None, "out": None, "format": "csv"}


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    g.add_argument("--P", type=int, help="antenna count (default 256)")
    g.add_argument("--N", type=int, help="samples per antenna (default P/c, or 2P)")
    g.add_argument("--c", type=float, help="aspect ratio P/N, used when --N is absent")
    g.add_argument("--L", type=int, help="channel taps (default 10)")
    g.add_argument("--sigma2", type=float, help="per-tap channel power, linear")
    g.add_argument("--snr-db", dest="snr_db", type=float, help="SNR in dB, 10*log10(L*sigma2); overrides --sigma2")
    g.add_argument("--signal-law", dest="signal_law", choices=["binary", "gaussian"], help="transmit signal law")
    g.add_argument("--hypothesis", choices=["H0", "H1"], help="H0 noise only, H1 signal present")
    g.add_argument("--field", choices=["complex", "real"], help="channel/noise entry field (default complex)")


def _add_run_flags(p: argparse.ArgumentParser, trials_default: int) -> None:
    g = p.add_argument_group("run")
    g.add_argument("--config", help="JSON object with any of these options; flags take precedence")
    g.add_argument("--trials", type=int, help=f"Monte Carlo trials per point (default {trials_default})")
    g.add_argument("--threads", type=int, help="worker threads, 0 = all cores (default $RMT_DETECT_THREADS or 1)")
    g.add_argument("--seed", type=int, help="master seed, 64-bit unsigned (default 0)")
    g.add_argument("--pfa", type=float, help="false-alarm probability in (0, 1) (default 0.05)")
    g.add_argument("--out", help="result file; printed to stdout as JSON when absent")
    g.add_argument("--format", choices=["csv", "json"], help="result file format (default csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmt-detect",
        description="Random-matrix analysis and GLRT detection for large antenna arrays.",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("esd", help="pooled eigenvalue histogram vs the MP law", argument_default=argparse.SUPPRESS)
    _add_scenario_flags(p)
    _add_run_flags(p, 200)
    p.add_argument("--bins", type=int, help="histogram bins (default 40)")
    p.add_argument("--N-values", dest="N_values", help="comma-separated N sweep, e.g. 512,2048")

    p = sub.add_parser("eig-compare", help="largest eigenvalues of the SCM and its equivalent models",
                       argument_default=argparse.SUPPRESS)
    _add_scenario_flags(p)
    _add_run_flags(p, 200)
    p.add_argument("--P-values", dest="P_values", help="comma-separated P sweep (N = P/c)")
    p.add_argument("--snr-values", dest="snr_values", help="SNR in dB for each P-value, e.g. --snr-values=-7,-16")
    p.add_argument("--extra", type=int, help="eigenvalues kept beyond the L outliers (default 5)")

    p = sub.add_parser("glrt-dist", help="distribution of the GLRT statistic under H0 and H1",
                       argument_default=argparse.SUPPRESS)
    _add_scenario_flags(p)
    _add_run_flags(p, 2000)
    p.add_argument("--h0-N", dest="h0_N", type=int, help="N for the H0 pool (default: same as --N)")
    p.add_argument("--bins", type=int, help="histogram bins (default 50)")

    p = sub.add_parser("miss-prob", help="miss probability vs SNR, theory and simulation",
                       argument_default=argparse.SUPPRESS)
    _add_scenario_flags(p)
    _add_run_flags(p, 2000)
    p.add_argument("--N-values", dest="N_values", help="comma-separated N sweep (default 512,1024,2048)")
    p.add_argument("--snr-grid", dest="snr_grid", help="comma-separated SNR values in dB, e.g. --snr-grid=-20,-19.5 (default -22:-10 step 0.5)")

    p = sub.add_parser("roc", help="ROC curves, theory and simulation", argument_default=argparse.SUPPRESS)
    _add_scenario_flags(p)
    _add_run_flags(p, 2000)
    p.add_argument("--snr-list", dest="snr_list", help="comma-separated SNR values in dB, e.g. --snr-list=-16,-15.5 (the default)")
    p.add_argument("--pfa-grid", dest="pfa_grid", help="comma-separated false-alarm probabilities")

    p = sub.add_parser("detect", help="run the detector on captured samples", argument_default=argparse.SUPPRESS)
    p.add_argument("--input", required=True, help="CSV, one antenna per line, interleaved re,im")
    p.add_argument("--pfa", type=float, help="false-alarm probability in (0, 1) (default 0.05)")

    p = sub.add_parser("mp-law", help="Marchenko-Pastur support and density", argument_default=argparse.SUPPRESS)
    p.add_argument("--c", type=float, required=True, help="aspect ratio P/N (> 0)")
    p.add_argument("--grid", type=int, help="write the density on this many points to --out")
    p.add_argument("--out", help="density table path (CSV)")

    p = sub.add_parser("generate", help="write one received block as a sample CSV", argument_default=argparse.SUPPRESS)
    _add_scenario_flags(p)
    p.add_argument("--seed", type=int, help="seed, 64-bit unsigned (default 0)")
    p.add_argument("--trial", type=int, help="trial index within the seed (default 0)")
    p.add_argument("--out", required=True, help="output CSV path")
    return parser


_COMMAND_KEYS = {
    "esd": {"bins", "N_values"},
    "eig-compare": {"P_values", "snr_values", "extra"},
    "glrt-dist": {"h0_N", "bins"},
    "miss-prob": {"N_values", "snr_grid"},
    "roc": {"snr_list", "pfa_grid"},
    "generate": {"trial"},
}
_COMMON_KEYS = set(_SCENARIO_DEFAULTS) | set(_RUN_DEFAULTS) | {"trials", "pfa"}


def _effective_options(command: str, args: argparse.Namespace) -> dict:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    opts: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            cfg = json.loads(Path(config_path).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config file {config_path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed config file {config_path}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError(f"malformed config file {config_path}: expected a JSON object")
        allowed = _COMMON_KEYS | _COMMAND_KEYS.get(command, set())
        unknown = sorted(set(cfg) - allowed)
        if unknown:
            raise UsageError(f"config file {config_path}: unknown key(s) {', '.join(unknown)}")
        for k, v in cfg.items():
            if isinstance(v, dict):
                raise UsageError(f"config file {config_path}: key {k!r} must not be nested")
        opts.update(cfg)
    opts.update(flags)
    return opts


def _scenario(opts: dict) -> Scenario:
    o = {**_SCENARIO_DEFAULTS, **{k: v for k, v in opts.items() if k in _SCENARIO_DEFAULTS}}
    P = int(o["P"])
    if o["N"] is not None:
        N = int(o["N"])
    elif o["c"] is not None:
        N = int(round(P / float(o["c"])))
    else:
        N = 2 * P
    sc = Scenario(
        P=P,
        N=N,
        L=int(o["L"]),
        sigma2=float(o["sigma2"] or 0.0),
        signal_law=o["signal_law"],
        hypothesis=o["hypothesis"],
        seed=int(opts.get("seed", 0)),
        field=o["field"],
    )
    if o["snr_db"] is not None:
        sc = sc.with_snr_db(float(o["snr_db"]))
    return sc


def _plan(opts: dict, sc: Scenario, trials_default: int, sweep=()) -> TrialPlan:
    return TrialPlan(
        base_scenario=sc,
        n_trials=int(opts.get("trials", trials_default)),
        sweep=tuple(sweep),
        master_seed=int(opts.get("seed", 0)),
        p_fa=float(opts.get("pfa", 0.05)),
        threads=opts.get("threads"),
    )


def _emit(result: ExperimentResult, opts: dict) -> None:
    out = opts.get("out")
    if out:
        write_result(result, out, opts.get("format", "csv"))
    else:
        doc = {"kind": result.kind, "summary": result.summary, "metadata": result.metadata}
        sys.stdout.write(json.dumps(doc, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _cmd_experiment(command: str, opts: dict) -> None:
    sc = _scenario(opts)
    if command == "esd":
        sweep = [{"N": n} for n in _ints(opts["N_values"])] if "N_values" in opts else []
        res = run_esd_overlay(_plan(opts, sc, 200, sweep), bins=int(opts.get("bins", 40)))
    elif command == "eig-compare":
        sweep = []
        if "P_values" in opts:
            Ps = _ints(opts["P_values"])
            snrs = _floats(opts.get("snr_values", [sc.snr_db] * len(Ps)))
            if len(snrs) != len(Ps):
                raise UsageError("--snr-values must list one SNR per --P-values entry")
            c = float(opts.get("c") or sc.c)
            sweep = [{"P": p, "N": int(round(p / c)), "snr_db": s} for p, s in zip(Ps, snrs)]
        res = run_eig_comparison(_plan(opts, sc, 200, sweep), extra=int(opts.get("extra", 5)))
    elif command == "glrt-dist":
        h0_N = opts.get("h0_N")
        res = run_glrt_distribution(_plan(opts, sc, 2000), h0_N=int(h0_N) if h0_N else None,
                                    bins=int(opts.get("bins", 50)))
    elif command == "miss-prob":
        Ns = _ints(opts.get("N_values", [512, 1024, 2048]))
        grid = _floats(opts["snr_grid"]) if "snr_grid" in opts else DEFAULT_SNR_GRID
        res = run_miss_prob_sweep(_plan(opts, sc, 2000, [{"N": n} for n in Ns]), snr_grid=grid)
    else:  # roc
        snrs = _floats(opts.get("snr_list", [-16.0, -15.5]))
        grid = _floats(opts["pfa_grid"]) if "pfa_grid" in opts else DEFAULT_PFA_GRID
        res = run_roc(_plan(opts, sc, 2000), snr_list=snrs, p_fa_grid=grid)
    _emit(res, opts)


def _cmd_detect(opts: dict) -> None:
    X = read_samples_csv(opts["input"])
    P, N = X.shape
    outcome = detect(hermitian_eigenvalues(scm(X)), float(opts.get("pfa", 0.05)), P, P / N)
    sys.stdout.write(json.dumps(outcome.to_dict()) + "\n")


def _cmd_mp_law(opts: dict) -> None:
    c = float(opts["c"])
    a, b, m0 = mp_support(c)
    sys.stdout.write(f"a={format_float(a)} b={format_float(b)} mass={format_float(m0)}\n")
    if "grid" in opts:
        if "out" not in opts:
            raise UsageError("--grid requires --out")
        x = np.linspace(a, b, int(opts["grid"]))
        write_result(ExperimentResult("MpLaw", {"x": x, "density": mp_density(x, c)}), opts["out"], "csv")


def _cmd_generate(opts: dict) -> None:
    sc = _scenario(opts)
    write_samples_csv(generate_received(sc, int(opts.get("trial", 0))), opts["out"])


def parse_and_dispatch(argv: list[str] | None = None) -> int:
    """Run one command; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = args.command
    try:
        if command == "mp-law":
            _cmd_mp_law(vars(args))
        elif command == "detect":
            _cmd_detect(vars(args))
        else:
            opts = _effective_options(command, args)
            if command == "generate":
                _cmd_generate(opts)
            else:
                _cmd_experiment(command, opts)
    except UsageError as exc:
        sys.stderr.write(f"rmt-detect {command}: usage error: {exc}\n")
        return 2
    except (RmtDetectError, ValueError, KeyError) as exc:
        sys.stderr.write(f"rmt-detect {command}: error: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
