"""Distribution-level dynamics of the fragile-firm count.

Evolves the probability vector ``p_k(t)``, ``k = 0..N``, under the gain
and loss balance

    dp_k/dt = b(k-1) p_{k-1} + d(k+1) p_{k+1} - (b(k) + d(k)) p_k

with ``b(k) = lam (N - k)`` and ``d(k) = gamma k``. The boundary rates
vanish on their own (``b(N) = 0``, ``d(0) = 0``), so the state space is
naturally confined to ``{0..N}`` and the right-hand side conserves
total probability identically; no reflecting or absorbing edge handling
is needed, and the module treats the chain as closed on that basis.

Time stepping is classical fourth-order one-step integration. Because
the right-hand side is linear in ``p``, a whole step can be written as
one precomputed matrix polynomial

    R(h) = I + hA + h^2 A^2 / 2 + h^3 A^3 / 6 + h^4 A^4 / 24,

which is applied when the state space is small enough to hold densely;
otherwise the identical update is assembled per step from the shifted
slices. Each step renormalizes the vector and records how much mass the
step drifted, which stays near machine precision.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model_core import CalibratedRates

__all__ = [
    "ProbabilityVector",
    "MasterPath",
    "transition_rate_arrays",
    "me_rhs",
    "lead_lag_rhs_check",
    "integrate",
    "stationary_detailed_balance",
    "binomial_pmf",
    "moments",
]

_DENSE_LIMIT = 1024  # largest state count for the dense one-step matrix


@dataclass
class ProbabilityVector:
    """A distribution over ``{0..N}`` stamped with its time."""

    p: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.p = np.asarray(self.p, dtype=float)
        if self.p.ndim != 1 or self.p.size < 1:
            raise ValueError("p must be a nonempty vector")
        if float(self.p.min()) < -1e-12:
            raise ValueError(f"negative probability mass: min {self.p.min()!r}")
        if abs(float(self.p.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probability mass sums to {self.p.sum()!r}")
        if self.t < 0:
            raise ValueError("time stamp must be nonnegative")

    @property
    def N(self) -> int:
        return self.p.size - 1

    def clamped(self) -> np.ndarray:
        """Copy with transient negatives clipped away and mass rescaled."""
        q = np.clip(self.p, 0.0, None)
        return q / q.sum()


@dataclass
class MasterPath:
    """Snapshots from one integration plus the worst per-step mass drift."""

    snapshots: list[ProbabilityVector]
    renorm_max: float

    @property
    def final(self) -> ProbabilityVector:
        return self.snapshots[-1]


def transition_rate_arrays(rates: CalibratedRates, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-state total up and down rates ``b(k)``, ``d(k)`` for ``k = 0..N``."""
    k = np.arange(N + 1, dtype=float)
    return rates.lam * (N - k), rates.gamma * k


def _as_vector(p, N: int | None = None) -> np.ndarray:
    vec = np.asarray(getattr(p, "p", p), dtype=float)
    if vec.ndim != 1:
        raise ValueError("expected a one-dimensional probability vector")
    if N is not None and vec.size != N + 1:
        raise ValueError(f"expected {N + 1} entries, got {vec.size}")
    return vec


def me_rhs(p, rates: CalibratedRates, N: int) -> np.ndarray:
    """Gain/loss balance applied to ``p``; entries sum to zero identically."""
    vec = _as_vector(p, N)
    b, d = transition_rate_arrays(rates, N)
    out = -(b + d) * vec
    out[1:] += b[:-1] * vec[:-1]
    out[:-1] += d[1:] * vec[1:]
    return out


def _lead_lag_rhs(p: np.ndarray, b: np.ndarray, d: np.ndarray) -> np.ndarray:
    # Shift-operator assembly: (lead - 1) applied to d*p plus
    # (lag - 1) applied to b*p, with zero fill past the boundaries.
    dp = d * p
    bp = b * p
    lead = np.concatenate((dp[1:], [0.0]))
    lag = np.concatenate(([0.0], bp[:-1]))
    return (lead - dp) + (lag - bp)


def lead_lag_rhs_check(p, rates: CalibratedRates, N: int) -> float:
    """Largest absolute gap between the two right-hand-side assemblies."""
    vec = _as_vector(p, N)
    b, d = transition_rate_arrays(rates, N)
    return float(np.max(np.abs(_lead_lag_rhs(vec, b, d) - me_rhs(vec, rates, N))))


def _generator_matrix(b: np.ndarray, d: np.ndarray) -> np.ndarray:
    n = b.size
    A = np.zeros((n, n))
    idx = np.arange(n)
    A[idx, idx] = -(b + d)
    A[idx[1:], idx[:-1]] = b[:-1]
    A[idx[:-1], idx[1:]] = d[1:]
    return A


def _step_matrix(A: np.ndarray, powers: list[np.ndarray], h: float) -> np.ndarray:
    R = np.eye(A.shape[0])
    coeff = 1.0
    for i, M in enumerate(powers, start=1):
        coeff *= h / i
        R += coeff * M
    return R


def _rk4_slice_step(p: np.ndarray, b: np.ndarray, d: np.ndarray, h: float) -> np.ndarray:
    def f(v: np.ndarray) -> np.ndarray:
        out = -(b + d) * v
        out[1:] += b[:-1] * v[:-1]
        out[:-1] += d[1:] * v[1:]
        return out

    k1 = f(p)
    k2 = f(p + 0.5 * h * k1)
    k3 = f(p + 0.5 * h * k2)
    k4 = f(p + h * k3)
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    p0,
    rates: CalibratedRates,
    N: int,
    T: float,
    dt: float | None = None,
    snapshot_times=None,
) -> MasterPath:
    """Integrate the distribution from ``p0`` over ``[0, T]``.

    The default step is ``0.1 / max_k(b(k) + d(k))``; an explicit ``dt``
    must satisfy ``dt * max_k(b(k) + d(k)) < 1`` or the call is rejected
    before any stepping. Snapshots are taken exactly at the requested
    times (the step is shortened to land on them) and always include
    ``T``.
    """
    if T < 0:
        raise ValueError(f"horizon must be nonnegative, got {T!r}")
    vec = _as_vector(p0, N).copy()
    start_t = float(getattr(p0, "t", 0.0))
    if T == 0:
        clean = np.clip(vec, 0.0, None)
        frozen = ProbabilityVector(clean / clean.sum(), t=start_t)
        return MasterPath(snapshots=[frozen], renorm_max=0.0)
    b, d = transition_rate_arrays(rates, N)
    smax = float(np.max(b + d))
    if dt is None:
        dt = 0.1 / smax if smax > 0 else T
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if smax > 0 and dt * smax >= 1.0:
        raise ValueError(
            f"dt {dt!r} violates the stability bound: dt * {smax!r} must stay below 1"
        )

    if snapshot_times is None:
        marks = [float(T)]
    else:
        marks = sorted({float(s) for s in snapshot_times})
        if marks and (marks[0] < 0 or marks[-1] > T * (1 + 1e-12)):
            raise ValueError("snapshot times must lie in [0, T]")
        if not marks or not math.isclose(marks[-1], T, rel_tol=1e-12, abs_tol=1e-12):
            marks.append(float(T))

    dense = (N + 1) <= _DENSE_LIMIT
    powers: list[np.ndarray] = []
    if dense:
        A = _generator_matrix(b, d)
        powers = [A]
        for _ in range(3):
            powers.append(powers[-1] @ A)
        R_full = _step_matrix(A, powers, dt)

    snapshots: list[ProbabilityVector] = []
    renorm_max = 0.0
    t = 0.0

    def advance(v: np.ndarray, h: float, full: bool) -> tuple[np.ndarray, float]:
        if dense:
            v = (R_full if full else _step_matrix(A, powers, h)) @ v
        else:
            v = _rk4_slice_step(v, b, d, h)
        mass = float(v.sum())
        return v / mass, abs(mass - 1.0)

    for mark in marks:
        span = mark - t
        if span < 0:
            raise ValueError("snapshot times must be nondecreasing")
        n_full = int(math.floor(span / dt + 1e-12))
        rem = span - n_full * dt
        if rem < 1e-12 * max(1.0, dt) and n_full > 0:
            rem = 0.0
        for _ in range(n_full):
            vec, drift = advance(vec, dt, full=True)
            renorm_max = max(renorm_max, drift)
        if rem > 0.0:
            vec, drift = advance(vec, rem, full=False)
            renorm_max = max(renorm_max, drift)
        t = mark
        clean = np.clip(vec, 0.0, None)
        snapshots.append(ProbabilityVector(clean / clean.sum(), t=start_t + t))

    return MasterPath(snapshots=snapshots, renorm_max=renorm_max)


def stationary_detailed_balance(rates: CalibratedRates, N: int) -> ProbabilityVector:
    """Stationary distribution from the pairwise flux balance.

    Successive ratios obey ``pi_{k+1} / pi_k = b(k) / d(k+1)``, which
    closes to the binomial law with success probability
    ``lam / (lam + gamma)``. Computed in log space for stability.
    """
    lam, gam = rates.lam, rates.gamma
    if lam + gam <= 0:
        raise ValueError("at least one intensity must be positive")
    p = np.zeros(N + 1)
    if lam == 0.0:
        warnings.warn("zero up-rate; all mass sits at 0", stacklevel=2)
        p[0] = 1.0
        return ProbabilityVector(p, t=math.inf)
    if gam == 0.0:
        warnings.warn("zero down-rate; all mass sits at N", stacklevel=2)
        p[N] = 1.0
        return ProbabilityVector(p, t=math.inf)
    k = np.arange(N, dtype=float)
    log_ratio = np.log(lam * (N - k)) - np.log(gam * (k + 1.0))
    log_pi = np.concatenate(([0.0], np.cumsum(log_ratio)))
    log_pi -= log_pi.max()
    pi = np.exp(log_pi)
    pi /= pi.sum()
    return ProbabilityVector(pi, t=math.inf)


def binomial_pmf(N: int, prob: float) -> np.ndarray:
    """Closed-form binomial mass function on ``{0..N}`` via log factorials."""
    if not 0 <= prob <= 1:
        raise ValueError(f"probability out of [0,1]: {prob!r}")
    if prob == 0.0 or prob == 1.0:
        p = np.zeros(N + 1)
        p[N if prob == 1.0 else 0] = 1.0
        return p
    k = np.arange(N + 1, dtype=float)
    log_c = (
        math.lgamma(N + 1)
        - np.array([math.lgamma(v + 1) + math.lgamma(N - v + 1) for v in k])
    )
    logp = log_c + k * math.log(prob) + (N - k) * math.log1p(-prob)
    out = np.exp(logp)
    return out / out.sum()


def moments(p) -> tuple[float, float]:
    """Mean and variance of the occupation number under ``p``."""
    vec = _as_vector(p)
    k = np.arange(vec.size, dtype=float)
    mean = float(k @ vec)
    var = float((k * k) @ vec - mean * mean)
    return mean, max(var, 0.0)
