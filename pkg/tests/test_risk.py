"""Risk-profile producers: closed forms, samples, Monte Carlo, normal CDF.

High-precision reference values were computed with mpmath at 40 digits and
frozen below; Monte Carlo checks use the closed forms as oracles.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import finite_floats
from plsfair import (
    ContractError,
    EmpiricalSample,
    GbmParams,
    McConfig,
    TwoPointScenario,
    empirical_profile,
    gbm_closed_form,
    load_empirical_draws,
    monte_carlo_profile,
    std_normal_cdf,
    two_point_profile,
)

# mpmath.ncdf('1.96') to 20 digits: 0.97500210485177956586
PHI_196 = 0.9750021048517796

# GBM mu=0.1, sigma=0.2, T=1, L=100, from the closed form at 40 digits:
GBM_E_PROFIT = 14.665260653636594782
GBM_E_LOSS = 4.1481688460718323007
GBM_RHO = 0.2828568099840214365
GBM_DELTA = 10.517091807564762  # 100 * expm1(0.1)

GBM_EXAMPLE = GbmParams(mu=0.1, sigma=0.2, T=1.0, L=100.0)


class TestStdNormalCdf:
    def test_center(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_frozen_reference_point(self):
        assert std_normal_cdf(1.96) == pytest.approx(PHI_196, abs=1e-13)

    def test_against_mpmath_grid(self):
        mpmath.mp.dps = 30
        worst = max(
            abs(std_normal_cdf(i / 8.0) - float(mpmath.ncdf(i / 8.0)))
            for i in range(-64, 65)
        )
        assert worst <= 1e-12

    @given(finite_floats(-8.0, 8.0))
    def test_symmetry(self, x):
        assert std_normal_cdf(-x) == pytest.approx(1.0 - std_normal_cdf(x), abs=1e-14)

    @given(st.lists(finite_floats(-10.0, 10.0), min_size=2, max_size=20))
    def test_monotone_and_bounded(self, xs):
        xs = sorted(xs)
        values = [std_normal_cdf(x) for x in xs]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_deep_tails_clamp(self):
        assert std_normal_cdf(-40.0) == 0.0
        assert std_normal_cdf(40.0) == 1.0


class TestGbmClosedForm:
    def test_zero_drift_boundary(self):
        profile = gbm_closed_form(GbmParams(mu=0.0, sigma=0.2, T=1.0, L=100.0))
        assert profile.rho == 1.0
        assert profile.delta == 0.0
        assert profile.e_profit > 0.0
        assert profile.viable()

    def test_near_zero_drift_guard(self):
        profile = gbm_closed_form(GbmParams(mu=1e-12, sigma=0.2, T=1.0, L=100.0))
        assert profile.rho == 1.0 and profile.delta == 0.0

    def test_vanishing_volatility_kills_the_loss(self):
        profile = gbm_closed_form(GbmParams(mu=0.1, sigma=1e-6, T=1.0, L=100.0))
        assert profile.rho <= 1e-12
        assert profile.e_loss <= 1e-10
        assert profile.delta == pytest.approx(GBM_DELTA, rel=1e-12)

    def test_frozen_example(self):
        profile = gbm_closed_form(GBM_EXAMPLE)
        assert profile.delta == pytest.approx(GBM_DELTA, rel=1e-13)
        assert profile.e_profit == pytest.approx(GBM_E_PROFIT, rel=1e-12)
        assert profile.e_loss == pytest.approx(GBM_E_LOSS, rel=1e-11)
        assert profile.rho == pytest.approx(GBM_RHO, rel=1e-11)

    def test_viability_tracks_drift_sign(self):
        assert gbm_closed_form(GbmParams(0.05, 0.3, 2.0, 50.0)).viable()
        down = gbm_closed_form(GbmParams(-0.05, 0.3, 2.0, 50.0))
        assert not down.viable()
        assert down.rho > 1.0

    @given(
        finite_floats(-0.3, 0.3),
        finite_floats(0.05, 0.5),
        finite_floats(0.25, 4.0),
        finite_floats(1.0, 1e6),
    )
    @settings(max_examples=200)
    def test_internal_identities(self, mu, sigma, T, L):
        p = gbm_closed_form(GbmParams(mu, sigma, T, L))
        scale = max(1.0, p.e_profit, p.e_loss)
        assert abs(p.rho * p.e_profit - p.e_loss) <= 1e-12 * scale
        assert abs(p.delta - (p.e_profit - p.e_loss)) <= 1e-12 * scale
        if abs(mu * T) >= 1e-10:
            assert p.viable() == (mu >= 0.0)
        else:
            # inside the near-cancellation guard the boundary limit applies
            assert p.viable() and p.rho == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(mu=0.1, sigma=0.0, T=1.0, L=100.0),
            dict(mu=0.1, sigma=-0.2, T=1.0, L=100.0),
            dict(mu=0.1, sigma=0.2, T=0.0, L=100.0),
            dict(mu=0.1, sigma=0.2, T=1.0, L=0.0),
            dict(mu=float("nan"), sigma=0.2, T=1.0, L=100.0),
        ],
    )
    def test_rejects_bad_params(self, kwargs):
        with pytest.raises(ContractError):
            GbmParams(**kwargs)

    def test_monte_carlo_cross_check_at_ten_million_paths(self):
        closed = gbm_closed_form(GBM_EXAMPLE)
        mc = monte_carlo_profile(GBM_EXAMPLE, McConfig(n_paths=10_000_000, seed=0))
        assert abs(mc.rho - closed.rho) <= 3.0 * mc.se_rho
        assert abs(mc.delta - closed.delta) <= 3.0 * mc.se_delta


class TestTwoPointProfile:
    def test_worked_example(self):
        profile = two_point_profile(TwoPointScenario(0.6, 120.0, 90.0, 100.0))
        assert profile.e_profit == pytest.approx(12.0)
        assert profile.e_loss == pytest.approx(4.0)
        assert profile.rho == pytest.approx(1 / 3, abs=1e-15)
        assert profile.delta == pytest.approx(8.0)

    def test_certain_success_has_no_loss(self):
        profile = two_point_profile(TwoPointScenario(1.0, 120.0, 90.0, 100.0))
        assert profile.e_loss == 0.0 and profile.rho == 0.0

    @given(
        finite_floats(0.05, 1.0),
        finite_floats(101.0, 500.0),
        finite_floats(0.0, 100.0),
    )
    def test_delta_is_expected_income_minus_capital(self, beta, r_plus, r_minus):
        s = TwoPointScenario(beta, r_plus, r_minus, 100.0)
        profile = two_point_profile(s)
        expected_income = beta * r_plus + (1.0 - beta) * r_minus
        assert profile.delta == pytest.approx(expected_income - s.L, abs=1e-9)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(beta=0.0, r_plus=120.0, r_minus=90.0, L=100.0),
            dict(beta=1.5, r_plus=120.0, r_minus=90.0, L=100.0),
            dict(beta=0.5, r_plus=99.0, r_minus=90.0, L=100.0),
            dict(beta=0.5, r_plus=120.0, r_minus=100.5, L=100.0),
        ],
    )
    def test_rejects_bad_scenarios(self, kwargs):
        with pytest.raises(ContractError):
            TwoPointScenario(**kwargs)


class TestEmpiricalProfile:
    def test_two_draw_example(self):
        profile = empirical_profile(EmpiricalSample((120.0, 90.0), 100.0))
        assert profile.e_profit == pytest.approx(10.0)
        assert profile.e_loss == pytest.approx(5.0)
        assert profile.rho == pytest.approx(0.5)

    def test_singleton(self):
        profile = empirical_profile(EmpiricalSample((105.0,), 100.0))
        assert profile.e_profit == 5.0 and profile.e_loss == 0.0 and profile.rho == 0.0
        assert profile.se_profit == 0.0

    def test_all_draws_below_capital(self):
        with pytest.raises(ContractError):
            empirical_profile(EmpiricalSample((99.0, 99.0, 99.0), 100.0))

    def test_standard_errors(self):
        profile = empirical_profile(EmpiricalSample((120.0, 90.0, 100.0, 130.0), 100.0))
        profits = np.maximum(np.array([120.0, 90.0, 100.0, 130.0]) - 100.0, 0.0)
        assert profile.se_profit == pytest.approx(profits.std(ddof=1) / 2.0)

    def test_rejects_bad_samples(self):
        with pytest.raises(ContractError):
            EmpiricalSample((), 100.0)
        with pytest.raises(ContractError):
            EmpiricalSample((-1.0, 120.0), 100.0)

    def test_converges_to_two_point_law(self):
        # draws from the scenario's law at n = 1e5 land within 3 SE
        scenario = TwoPointScenario(0.6, 120.0, 90.0, 100.0)
        analytic = two_point_profile(scenario)
        rng = np.random.default_rng(7)
        draws = np.where(rng.random(100_000) < scenario.beta, 120.0, 90.0)
        profile = empirical_profile(EmpiricalSample(tuple(float(v) for v in draws), 100.0))
        assert abs(profile.e_profit - analytic.e_profit) <= 3.0 * profile.se_profit
        assert abs(profile.e_loss - analytic.e_loss) <= 3.0 * profile.se_loss


class TestMonteCarlo:
    def test_bit_identical_reruns(self):
        cfg = McConfig(n_paths=100_000, seed=42, chunk_size=1 << 14)
        first = monte_carlo_profile(GBM_EXAMPLE, cfg)
        second = monte_carlo_profile(GBM_EXAMPLE, cfg)
        assert first == second

    def test_seed_changes_the_estimate(self):
        a = monte_carlo_profile(GBM_EXAMPLE, McConfig(n_paths=10_000, seed=0))
        b = monte_carlo_profile(GBM_EXAMPLE, McConfig(n_paths=10_000, seed=1))
        assert a.rho != b.rho

    def test_constant_payoff_is_exact_with_zero_standard_error(self):
        # beta = 1 never draws the failure branch: R_T is constantly 1.2 L
        model = TwoPointScenario(1.0, 120.0, 90.0, 100.0)
        profile = monte_carlo_profile(model, McConfig(n_paths=10_000, seed=5))
        assert profile.e_profit == 20.0
        assert profile.e_loss == 0.0
        assert profile.se_profit == 0.0 and profile.se_rho == 0.0

    def test_gbm_estimate_matches_closed_form(self):
        closed = gbm_closed_form(GBM_EXAMPLE)
        mc = monte_carlo_profile(GBM_EXAMPLE, McConfig(n_paths=1_000_000, seed=11))
        assert abs(mc.rho - closed.rho) <= 3.0 * mc.se_rho
        assert abs(mc.delta - closed.delta) <= 3.0 * mc.se_delta
        assert abs(mc.e_profit - closed.e_profit) <= 3.0 * mc.se_profit

    def test_two_point_estimate_matches_closed_form(self):
        scenario = TwoPointScenario(0.6, 120.0, 90.0, 100.0)
        analytic = two_point_profile(scenario)
        mc = monte_carlo_profile(scenario, McConfig(n_paths=1_000_000, seed=2))
        assert abs(mc.rho - analytic.rho) <= 3.0 * mc.se_rho

    def test_three_sigma_coverage_over_seeds(self):
        # at n = 1e6 the estimate lands within 3 SE for >= 99 of 100 seeds
        closed = gbm_closed_form(GBM_EXAMPLE)
        hits = 0
        for seed in range(100):
            p = monte_carlo_profile(GBM_EXAMPLE, McConfig(n_paths=1_000_000, seed=seed))
            if abs(p.rho - closed.rho) <= 3.0 * p.se_rho:
                hits += 1
        assert hits >= 99

    def test_zero_profit_estimate_is_an_error(self):
        # seed 3 makes the single draw land on the failure branch
        model = TwoPointScenario(0.5, 120.0, 90.0, 100.0)
        with pytest.raises(ContractError):
            monte_carlo_profile(model, McConfig(n_paths=1, seed=3))

    def test_config_validation(self):
        with pytest.raises(ContractError):
            McConfig(n_paths=0)
        with pytest.raises(ContractError):
            McConfig(n_paths=10, seed=-1)
        with pytest.raises(ContractError):
            McConfig(n_paths=10, chunk_size=0)

    def test_unsupported_model(self):
        with pytest.raises(ContractError):
            monte_carlo_profile("not a model", McConfig(n_paths=10))


class TestDrawsFile:
    def test_plain_lf(self, tmp_path):
        path = tmp_path / "draws.txt"
        path.write_text("120.0\n90.0\n", encoding="utf-8")
        assert load_empirical_draws(path) == (120.0, 90.0)

    def test_crlf_and_header(self, tmp_path):
        path = tmp_path / "draws.txt"
        path.write_bytes(b"R_T\r\n120.5\r\n90.25\r\n")
        assert load_empirical_draws(path) == (120.5, 90.25)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "draws.txt"
        path.write_text("R_T\n120.0\n\n90.0\n\n", encoding="utf-8")
        assert load_empirical_draws(path) == (120.0, 90.0)

    def test_garbage_line_rejected(self, tmp_path):
        path = tmp_path / "draws.txt"
        path.write_text("120.0\nbogus\n", encoding="utf-8")
        with pytest.raises(ContractError):
            load_empirical_draws(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "draws.txt"
        path.write_text("R_T\n", encoding="utf-8")
        with pytest.raises(ContractError):
            load_empirical_draws(path)
