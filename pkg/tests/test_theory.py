import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epikit.core import EpidemicParams
from epikit.distributions import (ConstantPeriod, EmpiricalPeriod,
                                  ExponentialPeriod, GammaPeriod,
                                  GenerationTimeFromPeriod)
from epikit.theory import (critical_vaccination, effective_r, endemic_level,
                           extinction_probability, integrate_endemic,
                           integrate_sir, lotka_r0, malthusian_rate,
                           multitype_r0, solve_final_size,
                           take_off_probability, vaccinated_r)

# roots of 1 - r = exp(-a r), frozen from a 40-digit independent solve
ROOT_15 = 0.5828116438658114
ROOT_20 = 0.7968121300200200
ROOT_30 = 0.9404797907073596
# root of 2 (1 - exp(-rho)) / rho = 1, frozen likewise
CONST_MALTHUS = 1.5936242600400401


def _params(beta, period, seed=0, i0=1):
    return EpidemicParams(n=1000, beta=beta, infectious_period=period,
                          initial_infectives=i0, seed=seed)


class TestFinalSize:
    @pytest.mark.parametrize("r0,expected", [
        (1.5, ROOT_15), (2.0, ROOT_20), (3.0, ROOT_30),
    ])
    def test_frozen_roots(self, r0, expected):
        root = solve_final_size(r0)
        assert root == pytest.approx(expected, abs=1e-10)
        assert abs(1.0 - root - math.exp(-r0 * root)) < 1e-12

    def test_with_partial_immunity(self):
        # r0 s = 1.5 gives the same root as r0 = 1.5 at full susceptibility
        assert solve_final_size(3.0, s=0.5) == pytest.approx(ROOT_15, abs=1e-10)
        assert 0.5 * solve_final_size(3.0, s=0.5) == pytest.approx(0.29141, abs=2e-4)

    def test_subcritical_returns_zero(self):
        assert solve_final_size(0.8) == 0.0
        assert solve_final_size(1.0) == 0.0
        assert solve_final_size(2.0, s=0.5) == 0.0

    def test_continuity_at_threshold(self):
        assert solve_final_size(1.0 + 1e-6) < 1e-4

    @settings(max_examples=60, deadline=None)
    @given(r0=st.floats(0.1, 9.9), s=st.floats(0.05, 1.0), bump=st.floats(0.01, 1.0))
    def test_monotone_in_r0_and_s(self, r0, s, bump):
        base = solve_final_size(r0, s)
        assert solve_final_size(r0 + bump, s) >= base
        if s + 0.05 <= 1.0:
            assert solve_final_size(r0, s + 0.05) >= base


class TestOde:
    def test_disease_free_is_constant(self):
        curve = integrate_sir((1.0, 0.0, 0.0), 5.0, beta=2.0, gamma=1.0, step=1e-2)
        assert np.all(curve.s == 1.0)
        assert np.all(curve.i == 0.0)

    def test_subcritical_i_monotone_decreasing(self):
        curve = integrate_sir((0.95, 0.05, 0.0), 20.0, r0=0.5, step=1e-2)
        assert np.all(np.diff(curve.i) <= 1e-12)

    def test_conservation(self):
        curve = integrate_sir((0.95, 0.05, 0.0), 30.0, beta=2.0, gamma=1.0, step=1e-3)
        drift = np.abs(curve.s + curve.i + curve.r - 1.0)
        assert drift.max() < 1e-9

    def test_limit_matches_final_size_root(self):
        # tiny seed fraction: the ODE's r(inf) approaches the final-size root
        curve = integrate_sir((1.0 - 1e-6, 1e-6, 0.0), 60.0, beta=2.0, gamma=1.0, step=1e-3)
        assert curve.r[-1] == pytest.approx(ROOT_20, abs=1e-3)

    def test_macroscopic_seed_matches_generalized_root(self):
        # with s0 = 0.95 the terminal fraction solves 1 - r = s0 exp(-r0 r)
        s0 = 0.95
        curve = integrate_sir((s0, 0.05, 0.0), 50.0, beta=2.0, gamma=1.0, step=1e-3)
        lo, hi = 0.5, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if 1.0 - mid - s0 * math.exp(-2.0 * mid) > 0:
                lo = mid
            else:
                hi = mid
        assert curve.r[-1] == pytest.approx(0.5 * (lo + hi), abs=1e-3)

    def test_i_rises_then_falls_when_supercritical(self):
        curve = integrate_sir((0.95, 0.05, 0.0), 30.0, beta=2.0, gamma=1.0, step=1e-2)
        peak = int(np.argmax(curve.i))
        assert 0 < peak < curve.i.size - 1
        assert curve.i[peak] > curve.i[0]

    def test_step_validation(self):
        with pytest.raises(ValueError):
            integrate_sir((1.0, 0.0, 0.0), 1.0, r0=2.0, step=0.0)

    def test_endemic_fixed_point_is_stationary(self):
        beta, gamma, mu = 2.0, 1.0, 1 / 75
        point = endemic_level(beta, gamma, mu)
        curve = integrate_endemic(beta, gamma, mu, point, 50.0, step=1e-2)
        assert abs(curve.s[-1] - point[0]) < 1e-6
        assert abs(curve.i[-1] - point[1]) < 1e-6

    def test_endemic_convergence_from_nearby_start(self):
        beta, gamma, mu = 2.0, 1.0, 1 / 75
        point = endemic_level(beta, gamma, mu)
        curve = integrate_endemic(beta, gamma, mu, (0.6, 0.01, 0.39), 2000.0, step=1e-2)
        assert curve.s[-1] == pytest.approx(point[0], abs=1e-3)
        assert curve.i[-1] == pytest.approx(point[1], abs=1e-3)

    def test_mu_zero_reduces_to_closed_model(self):
        closed = integrate_sir((0.9, 0.1, 0.0), 10.0, beta=1.5, gamma=0.8, step=1e-2)
        withmu = integrate_endemic(1.5, 0.8, 0.0, (0.9, 0.1, 0.0), 10.0, step=1e-2)
        assert np.array_equal(closed.s, withmu.s)
        assert np.array_equal(closed.i, withmu.i)


class TestExtinction:
    def test_subcritical_certain_extinction(self):
        p = _params(0.8, ExponentialPeriod(1.0))
        assert extinction_probability(p) == 1.0
        assert take_off_probability(p) == 0.0

    def test_markovian_closed_form(self):
        p = _params(2.0, ExponentialPeriod(1.0))
        assert extinction_probability(p) == pytest.approx(0.5, abs=1e-12)

    def test_constant_period_equals_final_size_root(self):
        # take-off probability solves the same equation as the final size
        p = _params(2.0, ConstantPeriod(1.0))
        assert take_off_probability(p) == pytest.approx(solve_final_size(2.0), abs=1e-10)

    def test_multiple_index_cases_power(self):
        single = extinction_probability(_params(2.0, ExponentialPeriod(1.0)))
        triple = extinction_probability(_params(2.0, ExponentialPeriod(1.0), i0=3))
        assert triple == pytest.approx(single**3, abs=1e-12)

    def test_gamma_period_fixed_point_residual(self):
        p = _params(3.0, GammaPeriod(2.0, 1.0))
        q = extinction_probability(p)
        pgf_q = p.infectious_period.laplace(p.beta * (1.0 - q))
        assert abs(pgf_q - q) < 1e-12
        assert 0.0 < q < 1.0


class TestMalthusian:
    def test_markovian_closed_form(self):
        assert malthusian_rate(_params(2.0, ExponentialPeriod(1.0))) == pytest.approx(1.0)

    def test_near_criticality(self):
        eps = 1e-6
        rho = malthusian_rate(_params(1.0 + eps, ExponentialPeriod(1.0)))
        assert rho == pytest.approx(eps, abs=1e-12)

    def test_constant_period_frozen_root(self):
        rho = malthusian_rate(_params(2.0, ConstantPeriod(1.0)))
        assert rho == pytest.approx(CONST_MALTHUS, abs=1e-10)
        assert abs(2.0 * (1.0 - math.exp(-rho)) / rho - 1.0) < 1e-10

    def test_subcritical_error(self):
        with pytest.raises(ValueError):
            malthusian_rate(_params(0.9, ExponentialPeriod(1.0)))

    def test_residual_for_general_periods(self):
        for period in (GammaPeriod(3.0, 1.5), EmpiricalPeriod((0.5, 1.0, 1.5, 2.0))):
            p = _params(2.5, period)
            rho = malthusian_rate(p)
            lhs = p.beta * (1.0 - period.laplace(rho)) / rho
            assert abs(lhs - 1.0) < 1e-10

    def test_constant_period_rate_matches_simulated_growth(self):
        # cross-check the root against the slope realized by the engine
        from epikit.estimators import IncidenceSeries, estimate_growth_rate
        from epikit.simulate import simulate_sir

        params = EpidemicParams(n=100_000, beta=2.0,
                                infectious_period=ConstantPeriod(1.0), seed=606)
        slopes = []
        rep = 0
        while len(slopes) < 10 and rep < 60:
            res = simulate_sir(params, record="grid", grid_dt=0.05,
                               max_infections=1500, replicate=rep)
            rep += 1
            if not (res.took_off and math.isnan(res.extinction_time)):
                continue
            traj = res.trajectory
            cases = traj.s[0] - traj.s
            keep = (cases >= 100) & (cases <= 1500)
            if keep.sum() < 3:
                continue
            series = IncidenceSeries(traj.t[keep], cases[keep])
            slopes.append(estimate_growth_rate(series).estimate)
        assert len(slopes) >= 10
        assert np.mean(slopes) == pytest.approx(CONST_MALTHUS, abs=0.2)


class TestLotka:
    def test_markovian_closed_form(self):
        g = GenerationTimeFromPeriod(ExponentialPeriod(1.0))
        assert lotka_r0(1.0, g) == pytest.approx(2.0, abs=1e-12)

    def test_constant_closed_form(self):
        g = GenerationTimeFromPeriod(ConstantPeriod(1.0))
        rho = CONST_MALTHUS
        assert lotka_r0(rho, g) == pytest.approx(rho / (1.0 - math.exp(-rho)), abs=1e-9)
        assert lotka_r0(rho, g) == pytest.approx(2.0, abs=1e-9)

    def test_rho_zero_gives_one(self):
        for period in (ExponentialPeriod(2.0), ConstantPeriod(0.5), GammaPeriod(2.0, 2.0)):
            assert lotka_r0(0.0, GenerationTimeFromPeriod(period)) == 1.0

    @pytest.mark.parametrize("period_factory", [
        lambda m: ExponentialPeriod(1.0 / m),
        lambda m: ConstantPeriod(m),
        lambda m: GammaPeriod(4.0, 4.0 / m),
    ])
    @pytest.mark.parametrize("r0", [1.5, 2.0, 4.0])
    def test_round_trip(self, period_factory, r0):
        period = period_factory(1.3)
        p = _params(r0 / period.mean(), period)
        rho = malthusian_rate(p)
        g = GenerationTimeFromPeriod(period)
        assert lotka_r0(rho, g) == pytest.approx(r0, abs=1e-6)

    def test_divergent_transform_rejected(self):
        g = GenerationTimeFromPeriod(ExponentialPeriod(1.0))
        with pytest.raises(ValueError):
            lotka_r0(-1.5, g)


class TestEndemicLevel:
    def test_first_coordinate_is_inverse_r0(self):
        s, _, _ = endemic_level(2.0, 1.0, 0.02)
        assert s == pytest.approx(1.0 / (2.0 / 1.02))

    def test_frozen_example(self):
        s, i, r = endemic_level(2.0, 1.0, 1 / 75)
        assert s == pytest.approx(0.50666667, abs=1e-6)
        assert i == pytest.approx(0.0064912281, abs=1e-9)
        assert s + i + r == pytest.approx(1.0, abs=1e-12)

    def test_derivatives_vanish(self):
        beta, gamma, mu = 2.0, 1.0, 1 / 75
        s, i, r = endemic_level(beta, gamma, mu)
        assert abs(mu - beta * s * i - mu * s) < 1e-12
        assert abs(beta * s * i - gamma * i - mu * i) < 1e-12
        assert abs(gamma * i - mu * r) < 1e-12

    def test_small_mu_limit(self):
        prev_i = 1.0
        for mu in (1e-2, 1e-4, 1e-6):
            s, i, _ = endemic_level(2.0, 1.0, mu)
            assert i < prev_i
            prev_i = i
        assert s == pytest.approx(0.5, abs=1e-5)

    def test_subcritical_error(self):
        with pytest.raises(ValueError):
            endemic_level(1.0, 1.0, 0.01)


class TestVaccination:
    def test_critical_coverage(self):
        assert critical_vaccination(2.0) == pytest.approx(0.5)
        assert critical_vaccination(0.8) == 0.0

    def test_effective_reproduction(self):
        assert effective_r(3.0, 0.5) == pytest.approx(1.5)

    def test_vaccinating_at_threshold_neutralizes(self):
        assert vaccinated_r(2.0, critical_vaccination(2.0)) == 1.0

    @settings(max_examples=40, deadline=None)
    @given(r0=st.floats(1.01, 20.0))
    def test_threshold_property(self, r0):
        assert vaccinated_r(r0, critical_vaccination(r0)) == pytest.approx(1.0, abs=1e-12)


class TestMultitype:
    def test_scalar(self):
        assert multitype_r0([[1.7]]) == pytest.approx(1.7, abs=1e-10)

    def test_diagonal(self):
        assert multitype_r0(np.diag([2.0, 0.5])) == pytest.approx(2.0, abs=1e-10)

    def test_periodic_two_type(self):
        # eigenvalues are +-1; the spectral radius is 1
        assert multitype_r0([[0.0, 2.0], [0.5, 0.0]]) == pytest.approx(1.0, abs=1e-10)

    def test_against_dense_eigensolver(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            k = int(rng.integers(1, 6))
            m = rng.random((k, k)) * rng.integers(0, 2, size=(k, k))
            expected = float(np.max(np.abs(np.linalg.eigvals(m))))
            assert multitype_r0(m) == pytest.approx(expected, abs=1e-8)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            multitype_r0([[1.0, -0.1], [0.0, 1.0]])
        with pytest.raises(ValueError):
            multitype_r0(np.ones((2, 3)))
