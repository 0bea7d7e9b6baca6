"""
Tests for the optimization service: visibility sweeps, seesaw and activation.
"""

import logging
import math
from types import SimpleNamespace
from unittest.mock import patch

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starnet.exceptions import DomainError, InvalidScenarioError
from starnet.models.scenario import ScenarioConfig
from starnet.services.encoding import generate_table
from starnet.services.network import QuantumStrategy, build_optimal_strategy, evaluate_quantum, quantum_optimum_formula
from starnet.services.optimize import (
    SeesawOptimizer,
    activation_experiment,
    activation_window,
    critical_visibility_closed_form,
    evaluate_visibilities,
    seesaw_best,
    seesaw_maximize,
    seesaw_strategy,
    visibility_sweep,
    werner_builder,
)
from starnet.services.qcore import werner_copies


class TestVisibilitySweep:
    """Test sweeps with fixed optimal observables."""

    def test_two_settings_critical_visibility(self):
        """n=2, m=2: critical visibility 1/sqrt 2."""
        cfg = ScenarioConfig.build(2, 2)
        table = generate_table(2)
        result = visibility_sweep(cfg, table, werner_builder(cfg, table), np.linspace(0, 1, 11))
        assert result.critical_v == pytest.approx(1 / math.sqrt(2), abs=1e-5)
        assert result.critical_v == pytest.approx(critical_visibility_closed_form(2), abs=1e-5)
        assert result.alpha == 2.0
        assert result.copies == 1

    def test_endpoints(self):
        """v=0 gives 0 and v=1 gives the quantum optimum."""
        cfg = ScenarioConfig.build(3, 3)
        table = generate_table(3)
        result = visibility_sweep(cfg, table, werner_builder(cfg, table), [0.0, 1.0])
        assert result.grid[0].delta == pytest.approx(0.0, abs=1e-12)
        assert result.grid[1].delta == pytest.approx(quantum_optimum_formula(3, 3))
        assert result.grid[1].violated is True

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_single_copy_threshold_is_n_independent(self, n):
        """With one pair per link delta is linear in v, so v* = alpha / qopt for m=3."""
        cfg = ScenarioConfig.build(n, 3)
        table = generate_table(3)
        result = visibility_sweep(cfg, table, werner_builder(cfg, table), np.linspace(0.5, 1, 6))
        assert result.critical_v == pytest.approx(critical_visibility_closed_form(3), abs=1e-6)
        assert result.critical_v == pytest.approx(6 / (4 * math.sqrt(3)), abs=1e-6)

    def test_two_copy_threshold(self):
        """m=4 on two Werner pairs: delta = 8 (v + v^2), threshold (sqrt 7 - 1)/2."""
        cfg = ScenarioConfig.build(2, 4)
        table = generate_table(4)
        builder = werner_builder(cfg, table)
        assert evaluate_quantum(cfg, table, builder(0.5)).delta == pytest.approx(6.0)
        result = visibility_sweep(cfg, table, builder, np.linspace(0, 1, 21))
        assert result.critical_v == pytest.approx((math.sqrt(7) - 1) / 2, abs=1e-6)

    def test_no_bracket(self):
        """A grid below the threshold reports no critical visibility."""
        cfg = ScenarioConfig.build(2, 2)
        table = generate_table(2)
        result = visibility_sweep(cfg, table, werner_builder(cfg, table), [0.1, 0.3, 0.5])
        assert result.critical_v is None
        assert not any(point.violated for point in result.grid)

    def test_grid_point_at_threshold(self):
        """A grid point sitting on the bound still brackets the threshold."""
        cfg = ScenarioConfig.build(2, 2)
        table = generate_table(2)
        result = visibility_sweep(cfg, table, werner_builder(cfg, table), [0.5, 1 / math.sqrt(2), 1.0])
        assert result.critical_v == pytest.approx(1 / math.sqrt(2), abs=1e-6)

    def test_delta_within_slack_is_not_a_sign_change(self):
        """Bisection uses the same tolerance as the violation flag."""
        cfg = ScenarioConfig.build(2, 2)
        table = generate_table(2)

        def builder(v):
            return SimpleNamespace(v=v, states=[SimpleNamespace(copies=1)])

        def fake_evaluate(cfg, table, strategy):
            # 5e-10 above alpha=2 at v=0.5, clearly violated at v=1
            return SimpleNamespace(delta=2.0 + 5e-10 + 4.0 * (strategy.v - 0.5))

        with patch("starnet.services.optimize.evaluate_quantum", side_effect=fake_evaluate):
            result = visibility_sweep(cfg, table, builder, [0.5, 1.0])
        assert result.grid[0].violated is False
        assert result.grid[1].violated is True
        assert result.critical_v == pytest.approx(0.5, abs=1e-6)

    def test_threads_match_serial(self):
        """Grid evaluation in parallel gives identical points."""
        cfg = ScenarioConfig.build(2, 3)
        table = generate_table(3)
        grid = np.linspace(0, 1, 9)
        serial = visibility_sweep(cfg, table, werner_builder(cfg, table), grid)
        parallel = visibility_sweep(cfg, table, werner_builder(cfg, table), grid, threads=3)
        assert [p.delta for p in serial.grid] == [p.delta for p in parallel.grid]
        assert serial.critical_v == parallel.critical_v

    def test_grid_domain(self):
        """Visibilities outside [0, 1] and empty grids are domain errors."""
        cfg = ScenarioConfig.build(2, 2)
        table = generate_table(2)
        with pytest.raises(DomainError):
            visibility_sweep(cfg, table, werner_builder(cfg, table), [0.5, 1.5])
        with pytest.raises(DomainError):
            visibility_sweep(cfg, table, werner_builder(cfg, table), [])

    def test_decreasing_delta_is_logged(self, caplog):
        """A builder whose delta falls with v triggers a warning."""
        cfg = ScenarioConfig.build(2, 2)
        table = generate_table(2)
        base = build_optimal_strategy(cfg, table)

        def reversed_builder(v):
            states = [werner_copies(1, 1.0 - v) for _ in range(2)]
            return QuantumStrategy(base.observables, base.hub_factors, states)

        with caplog.at_level(logging.WARNING, logger="starnet.services.optimize"):
            result = visibility_sweep(cfg, table, reversed_builder, [0.0, 0.5, 1.0])
        assert result.critical_v is None
        assert "decreases" in caplog.text

    @settings(max_examples=100, deadline=None)
    @given(
        v1=st.floats(min_value=0.0, max_value=1.0),
        v2=st.floats(min_value=0.0, max_value=1.0),
        n=st.sampled_from([2, 3]),
        m=st.sampled_from([2, 3, 4]),
    )
    def test_delta_monotone_in_visibility(self, v1, v2, n, m):
        """Raising the visibility never lowers delta for the optimal observables."""
        low, high = sorted((v1, v2))
        cfg = ScenarioConfig.build(n, m)
        table = generate_table(m)
        builder = werner_builder(cfg, table)
        d_low = evaluate_quantum(cfg, table, builder(low)).delta
        d_high = evaluate_quantum(cfg, table, builder(high)).delta
        assert d_low <= d_high + 1e-9


class TestHeterogeneousVisibilities:
    """Test per-link visibilities."""

    def test_product_of_visibilities(self):
        """m=3, one copy: delta = 4 sqrt 3 (v1 v2 v3)^(1/3)."""
        cfg = ScenarioConfig.build(3, 3)
        table = generate_table(3)
        report = evaluate_visibilities(cfg, table, build_optimal_strategy(cfg, table), [0.9, 0.8, 0.5])
        assert report.delta == pytest.approx(4 * math.sqrt(3) * (0.9 * 0.8 * 0.5) ** (1 / 3))

    def test_visibility_count(self):
        """One visibility per link."""
        cfg = ScenarioConfig.build(2, 2)
        with pytest.raises(DomainError):
            evaluate_visibilities(cfg, generate_table(2), build_optimal_strategy(cfg), [0.5])

    def test_closed_form_range(self):
        """The closed-form threshold is limited to m = 2, 3."""
        with pytest.raises(InvalidScenarioError):
            critical_visibility_closed_form(4)


class TestSeesaw:
    """Fast seesaw checks."""

    def test_seeded_determinism(self):
        """The same seed reproduces the trajectory."""
        cfg = ScenarioConfig.build(2, 3, 1)
        first = seesaw_maximize(cfg, seed=7, max_iters=30)
        second = seesaw_maximize(cfg, seed=7, max_iters=30)
        assert first.history == second.history
        assert first.delta == second.delta

    def test_history_is_non_decreasing(self):
        """Accepted steps never lower delta beyond round-off."""
        state = seesaw_maximize(ScenarioConfig.build(2, 4, 1), seed=3, max_iters=50)
        assert np.all(np.diff(state.history) >= -1e-9)
        assert state.iterations <= 50
        assert len(state.history) == state.iterations + 1

    def test_never_exceeds_optimum(self):
        """Seesaw values are bounded by 2^(m-1) sqrt m."""
        state = seesaw_maximize(ScenarioConfig.build(2, 3, 1), seed=1, max_iters=100)
        assert state.delta <= quantum_optimum_formula(2, 3) + 1e-9

    def test_final_strategy_reproduces_delta(self):
        """Re-evaluating the returned observables gives the reported delta."""
        cfg = ScenarioConfig.build(2, 3, 1)
        state = seesaw_maximize(cfg, seed=5, max_iters=40, visibility=0.9)
        report = evaluate_quantum(cfg, generate_table(3), seesaw_strategy(state))
        assert report.delta == pytest.approx(state.delta, abs=1e-9)

    def test_threads_do_not_change_best(self):
        """Restart results do not depend on the worker count."""
        cfg = ScenarioConfig.build(2, 3, 1)
        serial = seesaw_best(cfg, [0, 1, 2], max_iters=20)
        parallel = seesaw_best(cfg, [0, 1, 2], max_iters=20, threads=3)
        assert serial.delta == parallel.delta
        assert serial.seed == parallel.seed

    def test_requires_seeds(self):
        """At least one restart is needed."""
        with pytest.raises(InvalidScenarioError):
            seesaw_best(ScenarioConfig.build(2, 2), [])

    def test_optimizer_dimensions(self):
        """Observables live on 2^c dimensions."""
        optimizer = SeesawOptimizer(ScenarioConfig.build(2, 4, 1), seed=0, max_iters=1)
        assert optimizer.observables.shape == (2, 4, 2, 2)
        assert optimizer.hubs.shape == (2, 8, 2, 2)

    def test_activation_guards(self):
        """Activation needs m >= 4 and v in [0, 1]."""
        cfg = ScenarioConfig.build(2, 4)
        with pytest.raises(InvalidScenarioError):
            activation_experiment(cfg, 3, 0.9, seeds=[0])
        with pytest.raises(DomainError):
            activation_experiment(cfg, 4, 1.5, seeds=[0])


@pytest.mark.slow
class TestSeesawRestarts:
    """Multi-restart seesaw runs."""

    def test_recovers_three_setting_optimum(self):
        """One pair per link is enough for m=3."""
        state = seesaw_best(ScenarioConfig.build(2, 3, 1), list(range(20)))
        assert state.delta >= 4 * math.sqrt(3) - 1e-6

    def test_copy_advantage_at_four_settings(self):
        """Two pairs reach 16; one pair violates the bound of 12 but stays strictly lower."""
        multi = seesaw_best(ScenarioConfig.build(2, 4, 2), list(range(20)))
        single = seesaw_best(ScenarioConfig.build(2, 4, 1), list(range(20)))
        assert multi.delta == pytest.approx(16.0, abs=1e-5)
        assert 12.0 < single.delta < 15.9
        assert multi.delta > single.delta

    def test_activation_at_full_and_low_visibility(self):
        """v=1 violates on both sides; v=0.1 on neither."""
        cfg = ScenarioConfig.build(2, 4)
        seeds = list(range(5))
        assert activation_experiment(cfg, 4, 1.0, seeds=seeds).as_pair() == (True, True)
        assert activation_experiment(cfg, 4, 0.1, seeds=seeds).as_pair() == (False, False)

    def test_activation_window_scan(self):
        """The window scan returns one result per grid point in ascending order."""
        results = activation_window(ScenarioConfig.build(2, 4), 4, [0.9, 0.8], seeds=[0, 1], max_iters=200)
        assert [r.v for r in results] == [0.8, 0.9]
        assert all(r.alpha == 12.0 for r in results)
