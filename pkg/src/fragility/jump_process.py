"""Exact event-driven simulation of the fragile-firm count.

The population state is the number of fragile firms ``N1`` in
``{0..N}``. Transitions move one firm at a time: a robust firm turns
fragile at total rate ``lam * (N - N1)``, a fragile one recovers at
total rate ``gamma * N1``. Holding times are exponential in the total
rate and the next move is chosen with probability proportional to its
rate, so sample paths follow the jump chain exactly, with no time
discretization.

Bankruptcies do not move the count (failed fragile firms are replaced
in state); they are tallied as a thinned counter with intensity
``mu * N1``. The tally accumulates the integral of ``mu * N1`` over the
holding intervals and realizes the count in a single draw, which is
distributionally identical to drawing interval by interval.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model_core import CalibratedRates, ModelParams

__all__ = [
    "Trajectory",
    "EnsembleStats",
    "birth_rate",
    "death_rate",
    "simulate_trajectory",
    "run_ensemble",
]

_BLOCK = 1024  # random variates drawn per refill


def birth_rate(n1: int, params: ModelParams, rates: CalibratedRates) -> float:
    """Total rate of robust-to-fragile moves at occupation ``n1``."""
    if not 0 <= n1 <= params.N:
        raise ValueError(f"occupation {n1!r} out of [0, {params.N}]")
    return rates.lam * (params.N - n1)


def death_rate(n1: int, rates: CalibratedRates) -> float:
    """Total rate of fragile-to-robust moves at occupation ``n1``."""
    if n1 < 0:
        raise ValueError(f"occupation must be nonnegative, got {n1!r}")
    return rates.gamma * n1


@dataclass
class Trajectory:
    """One sample path.

    ``times`` and ``values`` record post-event states; the path starts
    at ``initial`` and is constant between events and after the last
    one up to ``horizon``. ``failures`` counts bankruptcies over the
    whole window.
    """

    times: np.ndarray
    values: np.ndarray
    initial: int
    horizon: float
    failures: int
    degenerate: bool = False

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must align")
        if self.times.size:
            if np.any(np.diff(self.times) <= 0):
                raise ValueError("event times must be strictly increasing")
            if self.times[0] <= 0 or self.times[-1] > self.horizon:
                raise ValueError("event times must lie in (0, horizon]")
            steps = np.diff(np.concatenate(([self.initial], self.values)))
            if np.any(np.abs(steps) != 1):
                raise ValueError("moves must change the count by exactly one")
            if self.values.min() < 0:
                raise ValueError("occupation went negative")
        if self.failures < 0:
            raise ValueError("failure count must be nonnegative")

    def occupancy(self, t):
        """State at time(s) ``t`` (post-event step function)."""
        full = np.concatenate(([self.initial], self.values))
        idx = np.searchsorted(self.times, np.asarray(t, dtype=float), side="right")
        return full[idx]


@dataclass
class EnsembleStats:
    """Cross-run statistics of the intensive share ``n1 = N1 / N``."""

    grid: np.ndarray
    mean_n1: np.ndarray
    var_n1: np.ndarray
    runs: int
    failure_rate: float


def _resolve_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def simulate_trajectory(
    params: ModelParams,
    rates: CalibratedRates,
    n1_0: int,
    T: float,
    seed,
) -> Trajectory:
    """Draw one exact sample path on ``[0, T]`` starting from ``n1_0``.

    ``seed`` may be an integer, a ``numpy.random.SeedSequence`` or a
    ready ``Generator``; identical inputs give identical paths.
    """
    N = params.N
    if not 0 <= n1_0 <= N:
        raise ValueError(f"n1_0 out of [0, {N}]: {n1_0!r}")
    if not T > 0:
        raise ValueError(f"horizon must be positive, got {T!r}")
    rng = _resolve_rng(seed)
    lam = rates.lam
    gam = rates.gamma

    degenerate = lam == 0.0 and gam == 0.0
    if degenerate:
        warnings.warn("both intensities are zero; path is constant", stacklevel=2)

    times: list[float] = []
    values: list[int] = []
    occ_integral = 0.0  # integral of N1 dt, feeds the bankruptcy tally
    t = 0.0
    n = int(n1_0)

    exps = rng.standard_exponential(_BLOCK)
    unis = rng.random(_BLOCK)
    idx = 0
    while True:
        birth = lam * (N - n)
        total = birth + gam * n
        if total == 0.0:
            break
        if idx == _BLOCK:
            exps = rng.standard_exponential(_BLOCK)
            unis = rng.random(_BLOCK)
            idx = 0
        wait = exps[idx] / total
        u = unis[idx]
        idx += 1
        if t + wait > T:
            break
        occ_integral += n * wait
        t += wait
        n += 1 if u * total < birth else -1
        times.append(t)
        values.append(n)
    occ_integral += n * (T - t)

    failures = int(rng.poisson(rates.mu * occ_integral))
    return Trajectory(
        times=np.array(times),
        values=np.array(values, dtype=np.int64),
        initial=int(n1_0),
        horizon=float(T),
        failures=failures,
        degenerate=degenerate,
    )


def run_ensemble(
    params: ModelParams,
    rates: CalibratedRates,
    n1_0: int,
    T: float,
    runs: int,
    master_seed,
    buckets: int = 200,
) -> EnsembleStats:
    """Simulate ``runs`` independent paths and bucket them in time.

    Per-run seeds are spawned from ``numpy.random.SeedSequence(master_seed)``
    in run order, so run ``i`` is reproducible in isolation and the
    reduction is a fixed-order indexed accumulation.
    """
    if runs < 1:
        raise ValueError(f"runs must be at least 1, got {runs!r}")
    if buckets < 1:
        raise ValueError(f"buckets must be at least 1, got {buckets!r}")
    N = params.N
    grid = np.linspace(0.0, T, buckets + 1)
    sums = np.zeros(buckets + 1)
    sumsq = np.zeros(buckets + 1)
    total_failures = 0
    children = np.random.SeedSequence(master_seed).spawn(runs)
    for child in children:
        traj = simulate_trajectory(params, rates, n1_0, T, child)
        share = traj.occupancy(grid) / N
        sums += share
        sumsq += share * share
        total_failures += traj.failures
    mean = sums / runs
    var = np.clip(sumsq / runs - mean * mean, 0.0, None)
    return EnsembleStats(
        grid=grid,
        mean_n1=mean,
        var_n1=var,
        runs=runs,
        failure_rate=total_failures / (runs * T),
    )
