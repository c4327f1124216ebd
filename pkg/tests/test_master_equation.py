"""Tests for the distribution-level dynamics.

Independent oracles: scipy's binomial law and matrix exponential, the
closed mean ODE (linear rates close the first moment exactly), and
hand-evaluated two- and three-state balances.
"""

import math

import numpy as np
import pytest
import scipy.linalg
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from fragility.master_equation import (
    MasterPath,
    ProbabilityVector,
    _generator_matrix,
    _rk4_slice_step,
    _step_matrix,
    binomial_pmf,
    integrate,
    lead_lag_rhs_check,
    me_rhs,
    moments,
    stationary_detailed_balance,
    transition_rate_arrays,
)

from conftest import make_rates


def random_distribution(n_states: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    raw = rng.random(n_states) + 1e-3
    return raw / raw.sum()


rate_floats = st.floats(0.0, 5.0)
positive_rates = st.floats(0.01, 5.0)


class TestProbabilityVector:
    def test_accepts_valid_mass(self):
        pv = ProbabilityVector(np.array([0.25, 0.5, 0.25]), t=1.5)
        assert pv.N == 2
        assert pv.t == 1.5

    def test_rejects_negative_mass(self):
        with pytest.raises(ValueError):
            ProbabilityVector(np.array([1.1, -0.1]))

    def test_rejects_unnormalized_mass(self):
        with pytest.raises(ValueError):
            ProbabilityVector(np.array([0.5, 0.6]))

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            ProbabilityVector(np.array([1.0]), t=-0.5)

    def test_clamped_removes_transient_negatives(self):
        pv = ProbabilityVector(np.array([1.0 + 5e-13, -5e-13]))
        q = pv.clamped()
        assert q.min() >= 0.0
        assert q.sum() == pytest.approx(1.0, abs=1e-15)


class TestRhs:
    def test_two_state_example(self):
        rates = make_rates(0.3, 0.7)
        dp = me_rhs(np.array([1.0, 0.0]), rates, 1)
        assert dp == pytest.approx([-0.3, 0.3], abs=1e-15)

    def test_frozen_model_gives_zero(self):
        rates = make_rates(0.0, 0.0)
        p = random_distribution(6, seed=1)
        assert np.all(me_rhs(p, rates, 5) == 0.0)

    def test_stationary_law_is_a_fixed_point(self, canonical_rates):
        pi = stationary_detailed_balance(canonical_rates, 50)
        dp = me_rhs(pi, canonical_rates, 50)
        assert np.max(np.abs(dp)) <= 1e-13

    def test_dimension_mismatch_rejected(self, canonical_rates):
        with pytest.raises(ValueError):
            me_rhs(np.zeros(7), canonical_rates, 10)

    @settings(max_examples=60, deadline=None)
    @given(
        lam=rate_floats,
        gamma=rate_floats,
        raw=hnp.arrays(
            np.float64,
            st.integers(1, 40),
            elements=st.floats(1e-6, 1.0),
        ),
    )
    def test_probability_flux_conserved(self, lam, gamma, raw):
        p = raw / raw.sum()
        dp = me_rhs(p, make_rates(lam, gamma), p.size - 1)
        assert abs(float(dp.sum())) <= 1e-13

    @settings(max_examples=40, deadline=None)
    @given(lam=positive_rates, gamma=positive_rates, seed=st.integers(0, 999))
    def test_mean_flow_closes_to_linear_law(self, lam, gamma, seed):
        # sum_k k * dp_k equals -(lam+gamma)*mean + lam*N for any p,
        # because the rates are linear in k
        N = 24
        p = random_distribution(N + 1, seed)
        rates = make_rates(lam, gamma)
        k = np.arange(N + 1.0)
        dmean = float(k @ me_rhs(p, rates, N))
        mean = float(k @ p)
        expect = -(lam + gamma) * mean + lam * N
        assert dmean == pytest.approx(expect, rel=1e-12, abs=1e-12)


class TestOperatorAssembly:
    def test_two_state_assemblies_coincide(self):
        rates = make_rates(0.3, 0.7)
        assert lead_lag_rhs_check(np.array([1.0, 0.0]), rates, 1) == 0.0

    def test_random_vectors_coincide(self, canonical_rates):
        p = random_distribution(51, seed=42)
        assert lead_lag_rhs_check(p, canonical_rates, 50) <= 1e-14

    @settings(max_examples=40, deadline=None)
    @given(lam=rate_floats, gamma=rate_floats, seed=st.integers(0, 999))
    def test_assemblies_coincide_for_any_rates(self, lam, gamma, seed):
        p = random_distribution(33, seed)
        assert lead_lag_rhs_check(p, make_rates(lam, gamma), 32) <= 1e-14


class TestIntegrate:
    def test_zero_horizon_returns_start(self, canonical_rates):
        p0 = ProbabilityVector(random_distribution(9, seed=3), t=2.0)
        path = integrate(p0, canonical_rates, 8, 0.0)
        assert len(path.snapshots) == 1
        assert path.final.t == 2.0
        assert np.allclose(path.final.p, p0.p, atol=1e-15)
        assert path.renorm_max == 0.0

    def test_matches_matrix_exponential(self):
        rates = make_rates(0.3, 0.2)
        N = 3
        p0 = np.array([0.0, 1.0, 0.0, 0.0])
        path = integrate(ProbabilityVector(p0), rates, N, 2.5, dt=1e-3)
        b, d = transition_rate_arrays(rates, N)
        expect = scipy.linalg.expm(2.5 * _generator_matrix(b, d)) @ p0
        assert np.max(np.abs(path.final.p - expect)) <= 1e-10

    def test_relaxes_to_binomial_law(self):
        rates = make_rates(0.15, 0.12)
        N = 40
        p0 = np.zeros(N + 1)
        p0[N] = 1.0
        T = 200.0 / (rates.lam + rates.gamma)
        path = integrate(ProbabilityVector(p0), rates, N, T)
        target = binomial_pmf(N, rates.lam / (rates.lam + rates.gamma))
        assert np.max(np.abs(path.final.p - target)) <= 1e-8
        assert path.renorm_max <= 1e-12

    def test_mean_follows_exponential_relaxation(self):
        rates = make_rates(0.4, 0.6)
        N = 60
        p0 = np.zeros(N + 1)
        p0[N] = 1.0
        grid = [1.0, 2.5, 5.0]
        path = integrate(ProbabilityVector(p0), rates, N, 5.0, snapshot_times=grid)
        m_star = rates.lam / (rates.lam + rates.gamma)
        for snap in path.snapshots:
            mean, _ = moments(snap)
            expect = m_star + (1.0 - m_star) * math.exp(
                -(rates.lam + rates.gamma) * snap.t
            )
            assert mean / N == pytest.approx(expect, abs=1e-8)

    def test_snapshots_at_requested_times(self, canonical_rates):
        p0 = np.zeros(13)
        p0[4] = 1.0
        path = integrate(
            ProbabilityVector(p0),
            canonical_rates,
            12,
            2.0,
            snapshot_times=[0.7, 1.3],
        )
        assert [s.t for s in path.snapshots] == pytest.approx([0.7, 1.3, 2.0])
        for snap in path.snapshots:
            assert snap.p.min() >= 0.0
            assert snap.p.sum() == pytest.approx(1.0, abs=1e-14)

    def test_unstable_step_rejected_before_running(self, canonical_rates):
        p0 = np.zeros(21)
        p0[0] = 1.0
        b_plus_d_max = canonical_rates.lam * 20
        with pytest.raises(ValueError):
            integrate(
                ProbabilityVector(p0),
                canonical_rates,
                20,
                5.0,
                dt=1.5 / b_plus_d_max,
            )

    def test_bad_snapshot_times_rejected(self, canonical_rates):
        p0 = np.zeros(6)
        p0[0] = 1.0
        with pytest.raises(ValueError):
            integrate(
                ProbabilityVector(p0), canonical_rates, 5, 1.0, snapshot_times=[2.0]
            )

    def test_dense_and_sliced_steps_agree(self):
        rates = make_rates(0.7, 0.9)
        N = 30
        b, d = transition_rate_arrays(rates, N)
        A = _generator_matrix(b, d)
        powers = [A]
        for _ in range(3):
            powers.append(powers[-1] @ A)
        p = random_distribution(N + 1, seed=8)
        h = 0.01
        via_matrix = _step_matrix(A, powers, h) @ p
        via_slices = _rk4_slice_step(p, b, d, h)
        assert np.max(np.abs(via_matrix - via_slices)) <= 1e-14


class TestStationaryLaw:
    def test_matches_binomial_oracle(self, canonical_rates):
        pi = stationary_detailed_balance(canonical_rates, 100)
        prob = canonical_rates.lam / (canonical_rates.lam + canonical_rates.gamma)
        oracle = scipy.stats.binom.pmf(np.arange(101), 100, prob)
        assert np.max(np.abs(pi.p - oracle)) <= 1e-12

    def test_three_state_balanced_case(self):
        pi = stationary_detailed_balance(make_rates(0.5, 0.5), 2)
        assert pi.p == pytest.approx([0.25, 0.5, 0.25], abs=1e-15)

    def test_two_state_shares(self):
        pi = stationary_detailed_balance(make_rates(0.3, 0.2), 1)
        assert pi.p == pytest.approx([0.4, 0.6], abs=1e-15)

    def test_one_sided_models_collapse_with_warning(self):
        with pytest.warns(UserWarning):
            top = stationary_detailed_balance(make_rates(0.4, 0.0), 5)
        assert top.p[-1] == 1.0
        with pytest.warns(UserWarning):
            bottom = stationary_detailed_balance(make_rates(0.0, 0.4), 5)
        assert bottom.p[0] == 1.0

    def test_frozen_model_rejected(self):
        with pytest.raises(ValueError):
            stationary_detailed_balance(make_rates(0.0, 0.0), 5)


class TestBinomialHelper:
    def test_matches_scipy(self):
        ours = binomial_pmf(64, 5.0 / 9.0)
        oracle = scipy.stats.binom.pmf(np.arange(65), 64, 5.0 / 9.0)
        assert np.max(np.abs(ours - oracle)) <= 1e-14

    def test_degenerate_edges(self):
        lo = binomial_pmf(4, 0.0)
        hi = binomial_pmf(4, 1.0)
        assert lo[0] == 1.0 and lo.sum() == 1.0
        assert hi[-1] == 1.0 and hi.sum() == 1.0

    def test_bad_probability_rejected(self):
        with pytest.raises(ValueError):
            binomial_pmf(4, 1.5)


class TestMoments:
    def test_point_mass(self):
        p = np.zeros(11)
        p[7] = 1.0
        assert moments(p) == (7.0, 0.0)

    def test_binomial_moments(self):
        p = binomial_pmf(100, 5.0 / 9.0)
        mean, var = moments(p)
        assert mean == pytest.approx(100 * 5.0 / 9.0, abs=1e-10)
        assert var == pytest.approx(100 * (5.0 / 9.0) * (4.0 / 9.0), abs=1e-10)
        assert mean == pytest.approx(55.5556, abs=1e-4)
        assert var == pytest.approx(24.6914, abs=1e-4)

    def test_uniform_three_states(self):
        mean, var = moments(np.full(3, 1.0 / 3.0))
        assert mean == pytest.approx(1.0, abs=1e-15)
        assert var == pytest.approx(2.0 / 3.0, abs=1e-14)
