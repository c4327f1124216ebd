"""Statistical-equilibrium analysis of the two-state economy.

Given the per-state outputs ``y0`` (robust) and ``y1`` (fragile) and an
observed mean output, the least-biased distribution over states is
exponential in output with shape parameter ``beta``; the share of
fragile firms can then be read two ways:

* as the minimizer of the effective potential
  ``U(n) = -2 g n - H(n) / beta`` (``H`` the two-state entropy), which
  gives the odds form ``n* = exp(2 beta g) / (exp(2 beta g) + 1)``;
* as the symmetric-exponential ratio
  ``exp(2 beta g) / (exp(2 beta g) + exp(-2 beta g))``.

The two disagree whenever ``beta * g`` is away from zero. Both are
computed and reported side by side, deliberately without correcting
either, and the report flags the gap.

The same ``beta`` drives a failure-hazard curve ``F(m) = 1 / (1 +
exp(-2 beta m))``; the hazard conditioned on the resting share carries
a factor ``1 / (1 + exp(-2 beta g))`` that tends to one half as
``beta`` vanishes, so the small-``beta`` reference ``2 beta m*``
overstates it by a factor of two. That ratio is reported too.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ConditionalHazard",
    "EquilibriumReport",
    "maxent_beta",
    "outcome_gap",
    "gibbs_apriori",
    "potential",
    "potential_minimum",
    "gibbs_share_symmetric",
    "hazard_cdf_and_rate",
    "conditional_hazard",
    "entropy_shares",
    "equilibrium_report",
]


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def maxent_beta(y0: float, y1: float, y_mean: float) -> float:
    """Shape parameter of the least-biased two-state distribution.

    ``beta = ln(-(y1 - y_mean) / (y0 - y_mean)) / (y1 - y0)``. The mean
    must lie strictly between the two outputs.
    """
    if y0 == y1:
        raise ValueError("y0 equals y1: no uncertainty axis to weigh")
    lo, hi = min(y0, y1), max(y0, y1)
    if not lo < y_mean < hi:
        raise ValueError(f"mean output {y_mean!r} outside the open interval ({lo!r}, {hi!r})")
    return math.log(-(y1 - y_mean) / (y0 - y_mean)) / (y1 - y0)


def outcome_gap(y0: float, y1: float) -> float:
    """Half the output gap, ``g = (y0 - y1) / 2``."""
    return 0.5 * (y0 - y1)


def gibbs_apriori(beta: float, g: float, N: int) -> tuple[float, float]:
    """A-priori state weights ``(exp(beta g) / N, exp(-beta g) / N)``.

    Normalization requires ``exp(beta g) + exp(-beta g) = N``, i.e.
    ``|beta g| = arccosh(N / 2)``; inputs are checked against that
    within 1e-9 and rejected otherwise.
    """
    if N < 2:
        raise ValueError(f"need at least two firms, got N={N!r}")
    required = math.acosh(N / 2.0)
    if abs(abs(beta * g) - required) > 1e-9:
        raise ValueError(
            f"beta*g={beta * g!r} breaks the normalization constraint "
            f"|beta*g|=arccosh(N/2)={required!r}"
        )
    w = math.exp(beta * g)
    return w / N, 1.0 / (w * N)


def entropy_shares(n1: float) -> float:
    """Two-state entropy ``-n ln n - (1-n) ln(1-n)``; zero at the corners."""
    if not 0 <= n1 <= 1:
        raise ValueError(f"share out of [0,1]: {n1!r}")
    h = 0.0
    if 0 < n1 < 1:
        h = -n1 * math.log(n1) - (1.0 - n1) * math.log1p(-n1)
    return h


def potential(n, beta: float, g: float):
    """Effective potential ``U(n) = -2 g n - H(n) / beta``.

    Vectorized over ``n``. At the corners the entropy term vanishes and
    the limit ``-2 g n`` is returned (with a warning, since the
    derivative diverges there).
    """
    if beta == 0:
        raise ValueError("beta must be nonzero: the entropy weight diverges")
    arr = np.asarray(n, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("shares must lie in [0,1]")
    if np.any((arr == 0) | (arr == 1)):
        warnings.warn("potential evaluated at a corner share; entropy term dropped", stacklevel=2)
    inner = np.clip(arr, 1e-300, 1.0)
    co = np.clip(1.0 - arr, 1e-300, 1.0)
    H = -arr * np.log(inner) - (1.0 - arr) * np.log(co)
    out = -2.0 * g * arr - H / beta
    return float(out) if out.ndim == 0 else out


def potential_minimum(beta: float, g: float) -> float:
    """Odds-form share estimate ``exp(2 beta g) / (exp(2 beta g) + 1)``.

    Stationarity of the potential gives ``ln(n / (1 - n)) = 2 beta g``.
    Defined for any finite inputs; saturates toward 0 or 1 for large
    ``|beta * g|`` and gives the even split at ``beta * g = 0``.
    """
    return _sigmoid(2.0 * beta * g)


def gibbs_share_symmetric(beta: float, g: float) -> float:
    """Symmetric-exponential share ``exp(2bg) / (exp(2bg) + exp(-2bg))``.

    Kept in its stated form on purpose; it differs from
    :func:`potential_minimum` whenever ``beta * g`` is nonzero.
    """
    return _sigmoid(4.0 * beta * g)


def hazard_cdf_and_rate(m: float, beta: float) -> tuple[float, float]:
    """Failure curve ``F(m) = 1 / (1 + exp(-2 beta m))`` and rate ``2 beta F``."""
    F = _sigmoid(2.0 * beta * m)
    return F, 2.0 * beta * F


class ConditionalHazard(NamedTuple):
    value: float
    small_beta_reference: float
    ratio: float


def conditional_hazard(beta: float, g: float, m_star: float) -> ConditionalHazard:
    """Hazard at the resting share, next to its small-``beta`` reference.

    ``value = 2 beta m* / (1 + exp(-2 beta g))``; the reference is
    ``2 beta m*`` and the ratio equals ``1 / (1 + exp(-2 beta g))``,
    which tends to one half as ``beta`` goes to zero.
    """
    ratio = _sigmoid(2.0 * beta * g)
    reference = 2.0 * beta * m_star
    return ConditionalHazard(value=reference * ratio, small_beta_reference=reference, ratio=ratio)


@dataclass
class EquilibriumReport:
    """Bundle of equilibrium diagnostics for one economy.

    ``share_odds`` and ``share_symmetric`` are the two share estimates
    described in the module docstring; ``notes`` carries the
    plain-language flags, including their disagreement.
    """

    beta: float
    g: float
    eta_gibbs: float
    eta_gibbs_gap: float
    n_star: float
    share_symmetric: float
    potential_n: np.ndarray
    potential_u: np.ndarray
    hazard_cdf: float
    hazard_rate: float
    hazard_conditional: float
    hazard_small_beta_ref: float
    hazard_ratio: float
    entropy: float
    notes: tuple[str, ...]


def equilibrium_report(
    y0: float,
    y1: float,
    n1: float,
    N: int,
    profile_points: int = 199,
) -> EquilibriumReport:
    """Full equilibrium analysis for outputs ``(y0, y1)`` at share ``n1``."""
    if not 0 < n1 < 1:
        raise ValueError(f"share must be strictly interior, got {n1!r}")
    notes: list[str] = []
    g = outcome_gap(y0, y1)
    y_mean = n1 * y1 + (1.0 - n1) * y0
    beta = maxent_beta(y0, y1, y_mean)
    n_star = potential_minimum(beta, g)
    share_sym = gibbs_share_symmetric(beta, g)

    required = math.acosh(N / 2.0) if N >= 2 else math.nan
    gap = abs(beta * g) - required if N >= 2 else math.nan
    sign = 1.0 if beta * g >= 0 else -1.0
    eta_gibbs = math.exp(sign * required) / N if N >= 2 else math.nan

    grid = np.linspace(0.5 / profile_points, 1.0 - 0.5 / profile_points, profile_points)
    U = potential(grid, beta, g)

    F, h = hazard_cdf_and_rate(n_star, beta)
    cond = conditional_hazard(beta, g, n_star)

    if abs(share_sym - n_star) > 1e-12:
        notes.append(
            "share estimates disagree: odds form "
            f"{n_star:.6f} vs symmetric-exponential form {share_sym:.6f}; "
            "both are reported, neither is corrected"
        )
    notes.append(
        "conditional hazard is "
        f"{cond.ratio:.6f} of the small-beta reference 2*beta*m_star; "
        "the factor tends to 0.5 as beta goes to 0"
    )
    if beta < 0:
        notes.append("beta is negative; the hazard curve is documented for beta >= 0 only")
    if N >= 2:
        notes.append(
            "a-priori weights use the constrained |beta*g| = arccosh(N/2) "
            f"= {required:.6f}; the calibrated beta*g misses it by {gap:+.6f}"
        )

    return EquilibriumReport(
        beta=beta,
        g=g,
        eta_gibbs=eta_gibbs,
        eta_gibbs_gap=gap,
        n_star=n_star,
        share_symmetric=share_sym,
        potential_n=grid,
        potential_u=U,
        hazard_cdf=F,
        hazard_rate=h,
        hazard_conditional=cond.value,
        hazard_small_beta_ref=cond.small_beta_reference,
        hazard_ratio=cond.ratio,
        entropy=entropy_shares(n1),
        notes=tuple(notes),
    )
