import math

import pytest

from fragility.model_core import CalibratedRates, ModelParams, equity_threshold

# Closed-form anchors for the (r=1, c=1, a1=-1) calibration: the fixed
# point solves 6 q^2 - 2 q - 1 = 0, so q1 = (1 + sqrt 7) / 6 and
# mu = (sqrt 7 - 2) / 2.
Q1_CANON = (1.0 + math.sqrt(7.0)) / 6.0
MU_CANON = (math.sqrt(7.0) - 2.0) / 2.0
U_BAR_CANON = 1.5 * Q1_CANON


def make_rates(lam, gamma, mu=0.0, q1=1.0, q0=1.0, u_bar=0.75, a_bar=0.0,
               zeta=0.5, iota=0.5) -> CalibratedRates:
    """Assemble a rate record directly for layers that only need lam/gamma/mu."""
    return CalibratedRates(q1=q1, q0=q0, mu=mu, u_bar=u_bar, a_bar=a_bar,
                           zeta=zeta, iota=iota, lam=lam, gamma=gamma)


@pytest.fixture(scope="session")
def canonical_rates() -> CalibratedRates:
    """The lam=0.15, gamma=0.12 population built on the canonical firm solve."""
    return CalibratedRates(
        q1=Q1_CANON,
        q0=1.0,
        mu=MU_CANON,
        u_bar=U_BAR_CANON,
        a_bar=equity_threshold(1.0, Q1_CANON),
        zeta=0.25,
        iota=0.3,
        lam=0.25 * (1.0 - 0.4),
        gamma=0.3 * 0.4,
    )


@pytest.fixture(scope="session")
def demo_params() -> ModelParams:
    """Economy whose calibration lands on round numbers (q1=2/3, mu=1/2)."""
    return ModelParams(N=100, r=1.0, c=0.5, a0=-2.0, a1=-1.0, eta=0.4)
