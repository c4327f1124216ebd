"""Firm-level micro model and rate calibration.

Firms come in two financial states. Fragile firms (state 1) carry a
positive failure probability each period; robust firms (state 0) carry
none. Demand is hit by a multiplicative price shock, uniform on a fixed
support, and a firm fails when the realized shock falls below a
threshold that depends on its output scale and equity position.

Calibration maps the exogenous economy description onto the intensive
switching parameters of the population dynamics:

* ``q1``: optimal output of a fragile firm, the fixed point of
  ``q1 = 1 / (r + 2 c mu)`` where ``mu`` is the failure probability
  implied by ``q1`` itself,
* ``q0 = 1 / r``: optimal output of a robust firm,
* ``zeta``: probability that a robust firm turns fragile,
* ``iota``: probability that a fragile firm turns robust,
* ``lam = zeta * (1 - eta)`` and ``gamma = iota * eta``: the per-firm
  switching intensities once the population mix ``eta`` is folded in.

Per-period probabilities are read as unit-time hazards by the
continuous-time layers; that reading is recorded in scenario output.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

SHOCK_LO = 0.75
SHOCK_HI = 1.25

__all__ = [
    "SHOCK_LO",
    "SHOCK_HI",
    "ModelParams",
    "CalibratedRates",
    "FirmSnapshot",
    "production",
    "capital_demand",
    "profit",
    "bankruptcy_cost",
    "clip_shock_threshold",
    "bankruptcy_probability",
    "equity_threshold",
    "robust_output",
    "solve_fragile_output",
    "transition_zeta",
    "transition_iota",
    "intensive_rates",
    "sample_shock",
    "firm_snapshot",
    "calibrate",
]


@dataclass(frozen=True)
class ModelParams:
    """Exogenous description of the economy.

    ``N`` firms, interest rate ``r``, failure-cost coefficient ``c``,
    equity ratios ``a0`` (robust) and ``a1`` (fragile), fragile
    population share ``eta``, price level ``P`` and the uniform shock
    support ``[shock_lo, shock_hi]``.
    """

    N: int
    r: float
    c: float
    a0: float
    a1: float
    eta: float
    P: float = 1.0
    shock_lo: float = SHOCK_LO
    shock_hi: float = SHOCK_HI

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r!r}")
        if not 0 < self.c < 1:
            raise ValueError(f"c out of (0,1): {self.c!r}")
        if not 0 <= self.eta <= 1:
            raise ValueError(f"eta out of [0,1]: {self.eta!r}")
        if not self.P > 0:
            raise ValueError(f"P must be positive, got {self.P!r}")
        if not self.shock_lo < self.shock_hi:
            raise ValueError(
                f"shock support is empty: [{self.shock_lo!r}, {self.shock_hi!r}]"
            )


@dataclass(frozen=True)
class CalibratedRates:
    """Output of the calibration pipeline.

    ``lam`` and ``gamma`` are built as ``zeta * (1 - eta)`` and
    ``iota * eta`` exactly, so the identity holds to machine precision
    for rates produced by :func:`calibrate`.
    """

    q1: float
    q0: float
    mu: float
    u_bar: float
    a_bar: float
    zeta: float
    iota: float
    lam: float
    gamma: float

    def __post_init__(self) -> None:
        if not (self.q1 > 0 and self.q0 > 0):
            raise ValueError("optimal outputs must be positive")
        for name in ("mu", "zeta", "iota"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} out of [0,1]: {v!r}")
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("intensities must be nonnegative")

    @property
    def degenerate(self) -> bool:
        """True when both switching intensities vanish."""
        return self.lam == 0.0 and self.gamma == 0.0


@dataclass(frozen=True)
class FirmSnapshot:
    """One firm's realized period: output, capital, shock, profit, failure cost."""

    q: float
    k: float
    u: float
    pi: float
    cost: float


def production(k: float) -> float:
    """Output from capital, ``q = 2 sqrt(k)``."""
    if k < 0:
        raise ValueError(f"capital must be nonnegative, got {k!r}")
    return 2.0 * math.sqrt(k)


def capital_demand(q: float) -> float:
    """Capital required for output ``q``, inverse of :func:`production`."""
    if q < 0:
        raise ValueError(f"output must be nonnegative, got {q!r}")
    return 0.5 * q * q


def profit(P: float, u: float, q: float, r: float, K: float) -> float:
    """Realized profit ``P u q - r K``."""
    return P * u * q - r * K


def bankruptcy_cost(c: float, P: float, u: float, q: float) -> float:
    """Failure cost, quadratic in realized revenue: ``c (P u q)^2``."""
    return c * (P * u * q) ** 2


def clip_shock_threshold(raw: float, lo: float = SHOCK_LO, hi: float = SHOCK_HI) -> float:
    """Clamp a raw shock threshold into the shock support."""
    return min(max(raw, lo), hi)


def _uniform_cdf(u: float, lo: float, hi: float) -> float:
    # Probability that the uniform shock falls at or below u, for u inside
    # the support. At the default support this is 2u - 1.5.
    return (u - lo) / (hi - lo)


def bankruptcy_probability(u_bar: float, lo: float = SHOCK_LO, hi: float = SHOCK_HI) -> float:
    """Probability that the shock falls below a clipped threshold ``u_bar``.

    ``u_bar`` must already lie inside the support; at the default support
    the value is ``2 u_bar - 1.5``.
    """
    if not lo <= u_bar <= hi:
        raise ValueError(f"threshold {u_bar!r} outside support [{lo!r}, {hi!r}]")
    return _uniform_cdf(u_bar, lo, hi)


def robust_output(r: float) -> float:
    """Optimal output with no failure risk, ``1 / r``."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r!r}")
    return 1.0 / r


def equity_threshold(r: float, q1: float, lo: float = SHOCK_LO) -> float:
    """Equity ratio below which failure risk switches on.

    ``a_bar = r - 2 lo / q1``; at the default support, ``r - 1.5 / q1``.
    """
    if q1 == 0:
        raise ValueError("q1 must be nonzero")
    return r - 2.0 * lo / q1


def solve_fragile_output(
    r: float,
    c: float,
    a1: float,
    lo: float = SHOCK_LO,
    hi: float = SHOCK_HI,
    damping: float = 0.5,
    max_iter: int = 10_000,
    tol: float = 1e-12,
) -> tuple[float, float, float]:
    """Fixed point of the fragile firm's output choice.

    Solves the coupled pair

        q1 = 1 / (r + 2 c mu)
        mu = cdf(clip(u_raw)),   u_raw = (q1 / 2) (r - 2 a1)

    by damped substitution on ``mu`` with bisection as fallback; the
    failure-probability map is nonincreasing in ``mu``, so the scalar
    residual ``phi(mu) = mu - cdf(clip(u_raw(mu)))`` is strictly
    increasing and brackets a unique root on [0, 1].

    Returns ``(q1, mu, u_bar)`` with ``u_bar`` the clipped threshold.
    """
    if not r > 0:
        raise ValueError(f"r must be positive, got {r!r}")
    if not c > 0:
        raise ValueError(f"c must be positive: {c!r}")

    slope = r - 2.0 * a1

    def threshold(mu: float) -> float:
        q1 = 1.0 / (r + 2.0 * c * mu)
        return clip_shock_threshold(0.5 * q1 * slope, lo, hi)

    def step(mu: float) -> float:
        return _uniform_cdf(threshold(mu), lo, hi)

    mu = 0.0
    residual = math.inf
    for _ in range(max_iter):
        target = step(mu)
        residual = abs(mu - target)
        if residual <= tol:
            break
        mu = (1.0 - damping) * mu + damping * target
    if residual > tol:
        # Bisection fallback on phi(mu) = mu - step(mu), increasing on [0, 1].
        a, b = 0.0, 1.0
        mu = 0.5 * (a + b)
        for _ in range(300):
            mu = 0.5 * (a + b)
            phi = mu - step(mu)
            residual = abs(phi)
            if residual <= tol:
                break
            if phi > 0:
                b = mu
            else:
                a = mu
        if residual > tol:
            raise ConvergenceError("fragile output fixed point", mu, residual)

    q1 = 1.0 / (r + 2.0 * c * mu)
    return q1, mu, threshold(mu)


def transition_zeta(
    q0: float,
    r: float,
    a_bar: float,
    a0: float,
    lo: float = SHOCK_LO,
    hi: float = SHOCK_HI,
) -> float:
    """Probability that a robust firm crosses into fragility.

    The raw crossing threshold is ``(q0 / 2) (r + a_bar - a0)``; at the
    default support the result is ``2 clip(.) - 1.5``.
    """
    u = clip_shock_threshold(0.5 * q0 * (r + a_bar - a0), lo, hi)
    return _uniform_cdf(u, lo, hi)


def transition_iota(
    q1: float,
    r: float,
    a_bar: float,
    a1: float,
    lo: float = SHOCK_LO,
    hi: float = SHOCK_HI,
) -> float:
    """Probability that a fragile firm recovers.

    Survival above the raw threshold ``(q1 / 2) (r + a_bar - a1)``; at
    the default support the result is ``-2 clip(.) + 2.5``.
    """
    u = clip_shock_threshold(0.5 * q1 * (r + a_bar - a1), lo, hi)
    return 1.0 - _uniform_cdf(u, lo, hi)


def intensive_rates(zeta: float, iota: float, eta: float) -> tuple[float, float]:
    """Fold the population mix into the switching probabilities.

    Returns ``(lam, gamma) = (zeta * (1 - eta), iota * eta)``.
    """
    for name, v in (("zeta", zeta), ("iota", iota), ("eta", eta)):
        if not 0 <= v <= 1:
            raise ValueError(f"{name} out of [0,1]: {v!r}")
    return zeta * (1.0 - eta), iota * eta


def sample_shock(
    rng: np.random.Generator,
    lo: float = SHOCK_LO,
    hi: float = SHOCK_HI,
    size: int | None = None,
):
    """Draw the multiplicative price shock, uniform on ``[lo, hi]``."""
    return rng.uniform(lo, hi, size)


def firm_snapshot(params: ModelParams, q: float, u: float) -> FirmSnapshot:
    """Assemble a firm's realized period at output ``q`` under shock ``u``."""
    k = capital_demand(q)
    return FirmSnapshot(
        q=q,
        k=k,
        u=u,
        pi=profit(params.P, u, q, params.r, k),
        cost=bankruptcy_cost(params.c, params.P, u, q),
    )


def calibrate(params: ModelParams) -> CalibratedRates:
    """Run the full calibration pipeline on an economy description."""
    if abs(0.5 * (params.shock_lo + params.shock_hi) - 1.0) > 1e-12:
        warnings.warn(
            "shock support mean differs from 1; optimal-output formulas assume a unit-mean shock",
            stacklevel=2,
        )
    lo, hi = params.shock_lo, params.shock_hi
    q1, mu, u_bar = solve_fragile_output(params.r, params.c, params.a1, lo, hi)
    q0 = robust_output(params.r)
    a_bar = equity_threshold(params.r, q1, lo)
    zeta = transition_zeta(q0, params.r, a_bar, params.a0, lo, hi)
    iota = transition_iota(q1, params.r, a_bar, params.a1, lo, hi)
    lam, gamma = intensive_rates(zeta, iota, params.eta)
    return CalibratedRates(
        q1=q1,
        q0=q0,
        mu=mu,
        u_bar=u_bar,
        a_bar=a_bar,
        zeta=zeta,
        iota=iota,
        lam=lam,
        gamma=gamma,
    )
