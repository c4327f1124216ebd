"""Scenario runner and command line.

Scenarios are plain ``key = value`` text files (UTF-8, ``#`` comments).
Parsing is strict: unknown keys, duplicate keys, type mismatches and
invariant violations are rejected with the offending key and line
number. Outputs are CSV files plus a ``summary.txt``; all numbers are
written with 12 significant digits, a ``.`` decimal separator and
``\\n`` line endings, so a given config and seed reproduce byte-equal
files.

Exit codes: 0 on success, 2 for configuration problems, 3 for numeric
failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import asymptotics, equilibrium, jump_process, master_equation
from .errors import ConfigError, ConvergenceError, DegenerateModelError
from .model_core import ModelParams, calibrate

__all__ = ["ScenarioConfig", "parse_config", "run_scenario", "main", "console_entry"]

OUTPUT_KINDS = ("trajectory", "ensemble", "master", "macro", "equilibrium", "compare")

_INT_KEYS = {"N", "n1_0", "runs", "buckets", "seed"}
_FLOAT_KEYS = {"r", "c", "a0", "a1", "eta", "P", "shock_lo", "shock_hi", "horizon", "dt_override"}
_LIST_KEYS = {"outputs"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _LIST_KEYS
_REQUIRED = ("N", "r", "c", "a0", "a1", "eta", "n1_0", "horizon", "runs", "seed")


@dataclass(frozen=True)
class ScenarioConfig:
    params: ModelParams
    n1_0: int
    horizon: float
    runs: int
    seed: int
    buckets: int = 200
    dt_override: float | None = None
    outputs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.n1_0 <= self.params.N:
            raise ValueError(f"n1_0 out of [0, {self.params.N}]: {self.n1_0!r}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon!r}")
        if self.runs < 1:
            raise ValueError(f"runs must be at least 1, got {self.runs!r}")
        if self.buckets < 1:
            raise ValueError(f"buckets must be at least 1, got {self.buckets!r}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed!r}")
        if self.dt_override is not None and not self.dt_override > 0:
            raise ValueError(f"dt_override must be positive, got {self.dt_override!r}")
        for name in self.outputs:
            if name not in OUTPUT_KINDS:
                raise ValueError(f"unknown output kind {name!r}")


def parse_config(path) -> ScenarioConfig:
    """Read and validate a scenario file; raises ConfigError on any defect."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc

    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in raw:
            raise ConfigError(
                f"line {lineno}: duplicate key '{key}' (first set on line {raw[key][1]})"
            )
        raw[key] = (value, lineno)

    missing = [key for key in _REQUIRED if key not in raw]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    def get_int(key: str, default: int | None = None) -> int | None:
        if key not in raw:
            return default
        value, lineno = raw[key]
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: {key} must be an integer, got '{value}'") from None

    def get_float(key: str, default: float | None = None) -> float | None:
        if key not in raw:
            return default
        value, lineno = raw[key]
        try:
            out = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: {key} must be a number, got '{value}'") from None
        if not math.isfinite(out):
            raise ConfigError(f"line {lineno}: {key} must be finite, got '{value}'")
        return out

    def fail(key: str, message: str) -> ConfigError:
        lineno = raw[key][1] if key in raw else 0
        return ConfigError(f"line {lineno}: {key} {message}")

    N = get_int("N")
    if N < 1:
        raise fail("N", f"must be a positive integer, got {N}")
    r = get_float("r")
    if not r > 0:
        raise fail("r", f"must be positive, got {r}")
    c = get_float("c")
    if not 0 < c < 1:
        raise fail("c", f"out of (0,1): {c}")
    eta = get_float("eta")
    if not 0 <= eta <= 1:
        raise fail("eta", f"out of [0,1]: {eta}")
    P = get_float("P", 1.0)
    if not P > 0:
        raise fail("P", f"must be positive, got {P}")
    shock_lo = get_float("shock_lo", 0.75)
    shock_hi = get_float("shock_hi", 1.25)
    if not shock_lo < shock_hi:
        key = "shock_hi" if "shock_hi" in raw else "shock_lo"
        raise fail(key, f"support is empty: [{shock_lo}, {shock_hi}]")
    n1_0 = get_int("n1_0")
    if not 0 <= n1_0 <= N:
        raise fail("n1_0", f"out of [0, {N}]: {n1_0}")
    horizon = get_float("horizon")
    if not horizon > 0:
        raise fail("horizon", f"must be positive, got {horizon}")
    runs = get_int("runs")
    if runs < 1:
        raise fail("runs", f"must be at least 1, got {runs}")
    buckets = get_int("buckets", 200)
    if buckets < 1:
        raise fail("buckets", f"must be at least 1, got {buckets}")
    seed = get_int("seed")
    if seed < 0:
        raise fail("seed", f"must be nonnegative, got {seed}")
    dt_override = get_float("dt_override", None)
    if dt_override is not None and not dt_override > 0:
        raise fail("dt_override", f"must be positive, got {dt_override}")

    outputs: tuple[str, ...] = ()
    if "outputs" in raw:
        value, lineno = raw["outputs"]
        names = [item.strip() for item in value.split(",") if item.strip()]
        for name in names:
            if name not in OUTPUT_KINDS:
                raise ConfigError(
                    f"line {lineno}: outputs entry '{name}' is not one of "
                    f"{', '.join(OUTPUT_KINDS)}"
                )
        outputs = tuple(names)

    try:
        params = ModelParams(
            N=N, r=r, c=c, a0=get_float("a0"), a1=get_float("a1"), eta=eta,
            P=P, shock_lo=shock_lo, shock_hi=shock_hi,
        )
        return ScenarioConfig(
            params=params, n1_0=n1_0, horizon=horizon, runs=runs, seed=seed,
            buckets=buckets, dt_override=dt_override, outputs=outputs,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _csv(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(cells) for cells in rows)
    return "\n".join(lines) + "\n"


def _delta_vector(N: int, k: int) -> master_equation.ProbabilityVector:
    p = np.zeros(N + 1)
    p[k] = 1.0
    return master_equation.ProbabilityVector(p, t=0.0)


def run_scenario(config: ScenarioConfig, out_dir) -> list[Path]:
    """Execute a scenario and write its artifacts.

    Everything is computed before anything is written, so a failing run
    leaves no partial files. Returns the written paths.
    """
    params = config.params
    N = params.N
    rates = calibrate(params)
    if rates.degenerate:
        raise DegenerateModelError(
            "calibration produced zero intensity in both directions; nothing to simulate"
        )

    if config.dt_override is not None:
        b, d = master_equation.transition_rate_arrays(rates, N)
        smax = float(np.max(b + d))
        if smax > 0 and config.dt_override * smax >= 1.0:
            raise ConfigError(
                f"dt_override {config.dt_override} violates the stability bound "
                f"dt * {smax} < 1"
            )

    files: list[tuple[str, str]] = []
    summary: list[str] = []
    summary.append("scenario")
    for name in ("N", "r", "c", "a0", "a1", "eta", "P", "shock_lo", "shock_hi"):
        summary.append(f"  {name} = {_fmt(getattr(params, name))}")
    summary.append(f"  n1_0 = {config.n1_0}")
    summary.append(f"  horizon = {_fmt(config.horizon)}")
    summary.append(f"  runs = {config.runs}")
    summary.append(f"  buckets = {config.buckets}")
    summary.append(f"  seed = {config.seed}")
    summary.append("calibration")
    summary.append(f"  q0 = {_fmt(rates.q0)}")
    summary.append(f"  q1 = {_fmt(rates.q1)}")
    summary.append(f"  mu = {_fmt(rates.mu)}")
    summary.append(f"  u_bar = {_fmt(rates.u_bar)}")
    summary.append(f"  a_bar = {_fmt(rates.a_bar)}")
    summary.append(f"  zeta = {_fmt(rates.zeta)}")
    summary.append(f"  iota = {_fmt(rates.iota)}")
    summary.append(f"  lambda = {_fmt(rates.lam)}")
    summary.append(f"  gamma = {_fmt(rates.gamma)}")
    notes = [
        "per-period switching and failure probabilities are read as unit-time hazards",
    ]

    grid = np.linspace(0.0, config.horizon, config.buckets + 1)
    m0 = config.n1_0 / N

    if "trajectory" in config.outputs:
        child = np.random.SeedSequence(config.seed).spawn(1)[0]
        traj = jump_process.simulate_trajectory(
            params, rates, config.n1_0, config.horizon, child
        )
        rows = [("0", str(traj.initial))]
        rows.extend(
            (_fmt(t), str(int(v))) for t, v in zip(traj.times, traj.values)
        )
        files.append(("trajectory.csv", _csv("t,N1", rows)))
        summary.append("trajectory")
        summary.append(f"  events = {traj.times.size}")
        summary.append(f"  failures = {traj.failures}")
        if traj.degenerate:
            notes.append("trajectory is constant: both intensities are zero")

    stats = None
    if "ensemble" in config.outputs or "compare" in config.outputs:
        stats = jump_process.run_ensemble(
            params, rates, config.n1_0, config.horizon,
            config.runs, config.seed, config.buckets,
        )
    if "ensemble" in config.outputs:
        rows = [
            (_fmt(t), _fmt(m), _fmt(v))
            for t, m, v in zip(stats.grid, stats.mean_n1, stats.var_n1)
        ]
        files.append(("ensemble.csv", _csv("t,mean_n1,var_n1", rows)))
        summary.append("ensemble")
        summary.append(f"  runs = {stats.runs}")
        summary.append(f"  failure_rate = {_fmt(stats.failure_rate)}")

    if "master" in config.outputs:
        path = master_equation.integrate(
            _delta_vector(N, config.n1_0), rates, N, config.horizon,
            dt=config.dt_override,
        )
        final = path.final
        rows = [(str(k), _fmt(pk)) for k, pk in enumerate(final.p)]
        files.append(("master.csv", _csv("k,p", rows)))
        summary.append("master")
        summary.append(f"  t = {_fmt(final.t)}")
        summary.append(f"  renorm_max = {_fmt(path.renorm_max)}")

    if "macro" in config.outputs:
        mp = asymptotics.macro_path(rates, N, m0, grid)
        rows = [
            (_fmt(t), _fmt(m), _fmt(v), _fmt(y))
            for t, m, v, y in zip(mp.grid, mp.m, mp.var_s, mp.Y)
        ]
        files.append(("macro.csv", _csv("t,m,var_s,Y", rows)))

    report = None
    report_error = None
    if "equilibrium" in config.outputs or "compare" in config.outputs:
        try:
            m_star = asymptotics.stationary_drift(rates)
            report = equilibrium.equilibrium_report(rates.q0, rates.q1, m_star, N)
        except ValueError as exc:
            report_error = str(exc)

    if "equilibrium" in config.outputs:
        summary.append("equilibrium")
        if report is None:
            summary.append(f"  skipped: {report_error}")
            files.append(("potential.csv", _csv("n,U", [])))
        else:
            summary.append(f"  beta = {_fmt(report.beta)}")
            summary.append(f"  g = {_fmt(report.g)}")
            summary.append(f"  n_star = {_fmt(report.n_star)}")
            summary.append(f"  share_symmetric = {_fmt(report.share_symmetric)}")
            summary.append(f"  eta_gibbs = {_fmt(report.eta_gibbs)}")
            summary.append(f"  eta_gibbs_gap = {_fmt(report.eta_gibbs_gap)}")
            summary.append(f"  entropy = {_fmt(report.entropy)}")
            summary.append(f"  hazard_cdf = {_fmt(report.hazard_cdf)}")
            summary.append(f"  hazard_rate = {_fmt(report.hazard_rate)}")
            summary.append(f"  hazard_conditional = {_fmt(report.hazard_conditional)}")
            summary.append(f"  hazard_small_beta_ref = {_fmt(report.hazard_small_beta_ref)}")
            summary.append(f"  hazard_ratio = {_fmt(report.hazard_ratio)}")
            notes.extend(report.notes)
            rows = [
                (_fmt(n), _fmt(u))
                for n, u in zip(report.potential_n, report.potential_u)
            ]
            files.append(("potential.csv", _csv("n,U", rows)))

    if "compare" in config.outputs:
        snaps = master_equation.integrate(
            _delta_vector(N, config.n1_0), rates, N, config.horizon,
            dt=config.dt_override, snapshot_times=grid,
        )
        master_mean = np.empty(grid.size)
        master_var = np.empty(grid.size)
        for i, snap in enumerate(snaps.snapshots):
            master_mean[i], master_var[i] = master_equation.moments(snap)
        drift_mean = N * asymptotics.drift_solution(m0, grid, rates)
        gauss_var = N * asymptotics.spread_variance_at(grid, rates)
        rows = [
            (
                _fmt(grid[i]),
                _fmt(stats.mean_n1[i] * N),
                _fmt(master_mean[i]),
                _fmt(drift_mean[i]),
                _fmt(stats.var_n1[i] * N * N),
                _fmt(master_var[i]),
                _fmt(gauss_var[i]),
            )
            for i in range(grid.size)
        ]
        files.append((
            "compare.csv",
            _csv(
                "t,ensemble_mean,master_mean,drift_mean,ensemble_var,master_var,gaussian_var",
                rows,
            ),
        ))
        m_star = asymptotics.stationary_drift(rates)
        pi = master_equation.stationary_detailed_balance(rates, N)
        linf = float(np.max(np.abs(pi.p - master_equation.binomial_pmf(N, m_star))))
        ss = asymptotics.steady_state(params, rates)
        summary.append("stationary")
        summary.append(f"  m_star = {_fmt(ss.m_star)}")
        summary.append(f"  var_star = {_fmt(ss.var_star)}")
        summary.append(f"  binomial_check_linf = {_fmt(linf)}")
        summary.append(f"  Y_e = {_fmt(ss.Y_e)}")
        if report is None:
            summary.append(f"  beta = nan ({report_error})")
            summary.append("  n_star = nan")
        else:
            summary.append(f"  beta = {_fmt(report.beta)}")
            summary.append(f"  n_star = {_fmt(report.n_star)}")
            notes.extend(report.notes)
        summary.append(f"  ensemble_failure_rate = {_fmt(stats.failure_rate)}")

    summary.append("notes")
    seen = set()
    for note in notes:
        if note not in seen:
            summary.append(f"  - {note}")
            seen.add(note)
    files.append(("summary.txt", "\n".join(summary) + "\n"))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in files:
        target = out / name
        target.write_text(text, encoding="utf-8")
        written.append(target)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fragility",
        description="Mean-field engine for the two-state financial-fragility economy",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    help_lines = {
        "calibrate": "calibrate the economy and write summary.txt",
        "simulate": "draw exact sample paths (trajectory for runs=1, ensemble otherwise)",
        "master": "integrate the occupation-number distribution",
        "macro": "evaluate the deterministic share/variance/output path",
        "equilibrium": "write the statistical-equilibrium report and potential profile",
        "compare": "cross-check simulation, distribution and deterministic layers",
    }
    for name in ("calibrate", "simulate", "master", "macro", "equilibrium", "compare"):
        sp = sub.add_parser(name, help=help_lines[name])
        sp.add_argument("--config", required=True, help="scenario file (key = value lines)")
        sp.add_argument("--out", default=".", help="output directory (default: current)")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")

    args = parser.parse_args(argv)
    try:
        config = parse_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError(f"--seed must be nonnegative, got {args.seed}")
            config = dataclasses.replace(config, seed=args.seed)
        if args.command == "calibrate":
            outputs: tuple[str, ...] = ()
        elif args.command == "simulate":
            outputs = ("trajectory",) if config.runs == 1 else ("ensemble",)
        else:
            outputs = (args.command,)
        config = dataclasses.replace(config, outputs=outputs)
        written = run_scenario(config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, DegenerateModelError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


def console_entry() -> None:
    raise SystemExit(main())
