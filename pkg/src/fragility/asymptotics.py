"""Large-population behavior: drift, spread, and aggregate output.

Writing the count as ``N1 = N m + sqrt(N) s`` splits the dynamics into
a deterministic share ``m(t)`` and a fluctuation ``s`` of order one.
The share relaxes exponentially,

    dm/dt = -(lam + gamma) m + lam,
    m(t)  = m* + (m0 - m*) exp(-(lam + gamma) t),  m* = lam / (lam + gamma),

and the fluctuation variance relaxes at twice that rate toward
``lam * gamma / (lam + gamma)^2``, which equals ``m* (1 - m*)``. The
matching distribution-level picture is a discretized normal curve over
``{0..N}`` with mean ``N m(t)`` and variance ``N var_s(t)``.

Aggregate output stacks the two optimal scales:
``Y = N1 q1 + N0 q0`` with ``q1 = 1 / (r + 2 c mu)`` and ``q0 = 1 / r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .master_equation import ProbabilityVector
from .model_core import CalibratedRates, ModelParams

__all__ = [
    "SteadyState",
    "MacroPath",
    "macro_rhs",
    "stationary_drift",
    "drift_solution",
    "spread_stationary_variance",
    "spread_variance_at",
    "gaussian_approximation",
    "aggregate_output",
    "stationary_output",
    "macro_path",
    "steady_state",
]


@dataclass(frozen=True)
class SteadyState:
    m_star: float
    var_star: float
    Y_e: float


@dataclass
class MacroPath:
    """Deterministic share, fluctuation variance and output on a grid."""

    grid: np.ndarray
    m: np.ndarray
    var_s: np.ndarray
    Y: np.ndarray

    def __post_init__(self) -> None:
        n = self.grid.size
        if not (self.m.size == self.var_s.size == self.Y.size == n):
            raise ValueError("path arrays must share the grid length")


def macro_rhs(N1: float, rates: CalibratedRates, N: int) -> float:
    """Drift of the raw count: ``-(lam + gamma) N1 + lam N``."""
    return -(rates.lam + rates.gamma) * N1 + rates.lam * N


def stationary_drift(rates: CalibratedRates) -> float:
    """Resting share ``m* = lam / (lam + gamma)``."""
    total = rates.lam + rates.gamma
    if total <= 0:
        raise ValueError("at least one intensity must be positive")
    return rates.lam / total


def drift_solution(m0: float, t, rates: CalibratedRates):
    """Closed-form share relaxation from ``m0``; ``t`` may be an array."""
    m_star = stationary_drift(rates)
    decay = np.exp(-(rates.lam + rates.gamma) * np.asarray(t, dtype=float))
    out = m_star + (m0 - m_star) * decay
    return float(out) if out.ndim == 0 else out


def spread_stationary_variance(rates: CalibratedRates) -> float:
    """Resting fluctuation variance ``lam gamma / (lam + gamma)^2``."""
    total = rates.lam + rates.gamma
    if total <= 0:
        raise ValueError("at least one intensity must be positive")
    return rates.lam * rates.gamma / (total * total)


def spread_variance_at(t, rates: CalibratedRates):
    """Fluctuation variance relaxing from zero at rate ``2 (lam + gamma)``."""
    v_star = spread_stationary_variance(rates)
    out = v_star * (1.0 - np.exp(-2.0 * (rates.lam + rates.gamma) * np.asarray(t, dtype=float)))
    return float(out) if out.ndim == 0 else out


def gaussian_approximation(
    rates: CalibratedRates, N: int, m0: float, t: float
) -> ProbabilityVector:
    """Normal curve with the drift mean and spread variance, on ``{0..N}``.

    The density is evaluated at the integer states and rescaled to unit
    mass. At ``t = 0`` the variance vanishes and the mass collapses onto
    the nearest integer to ``N m0``.
    """
    if N < 10:
        raise ValueError(f"population too small for the normal curve, N={N!r}")
    if not 0 <= m0 <= 1:
        raise ValueError(f"m0 out of [0,1]: {m0!r}")
    mean = N * drift_solution(m0, t, rates)
    var = N * spread_variance_at(t, rates)
    stamp = float(t) if math.isfinite(t) else math.inf
    p = np.zeros(N + 1)
    if var <= 0.0:
        p[int(round(mean))] = 1.0
        return ProbabilityVector(p, t=stamp)
    k = np.arange(N + 1, dtype=float)
    z = (k - mean) ** 2 / (2.0 * var)
    p = np.exp(-(z - z.min()))
    p /= p.sum()
    return ProbabilityVector(p, t=stamp)


def aggregate_output(N1: float, N0: float, r: float, c: float, mu: float) -> float:
    """Total output of ``N1`` fragile and ``N0`` robust firms."""
    if N1 < 0 or N0 < 0:
        raise ValueError("firm counts must be nonnegative")
    return N1 / (r + 2.0 * c * mu) + N0 / r


def stationary_output(N: int, r: float, c: float, mu: float, m_star: float) -> float:
    """Resting aggregate output.

    ``N (1/r - m* 2 c mu / (r (r + 2 c mu)))``, identical to the mixture
    ``N (m* q1 + (1 - m*) q0)``.
    """
    return N * (1.0 / r - m_star * 2.0 * c * mu / (r * (r + 2.0 * c * mu)))


def macro_path(rates: CalibratedRates, N: int, m0: float, grid) -> MacroPath:
    """Evaluate share, fluctuation variance and output along a time grid."""
    grid = np.asarray(grid, dtype=float)
    m = drift_solution(m0, grid, rates)
    var_s = spread_variance_at(grid, rates)
    Y = N * (m * rates.q1 + (1.0 - m) * rates.q0)
    return MacroPath(grid=grid, m=m, var_s=var_s, Y=Y)


def steady_state(params: ModelParams, rates: CalibratedRates) -> SteadyState:
    """Resting point of the macro layer for a calibrated economy."""
    m_star = stationary_drift(rates)
    return SteadyState(
        m_star=m_star,
        var_star=spread_stationary_variance(rates),
        Y_e=stationary_output(params.N, params.r, params.c, rates.mu, m_star),
    )
