"""
Star-network Controller.

This module contains the controller layer that coordinates the services
behind every command: bounds tables, verification bundles, quantum
evaluations, certificates, sweeps, seesaw runs and activation experiments.
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..exceptions import CapacityError, InvalidScenarioError
from ..models.reports import (
    ActivationResult,
    ClassicalBoundReport,
    EvaluationReport,
    SeesawState,
    SosReport,
    SweepResult,
    VerificationReport,
)
from ..models.scenario import RunSettings, ScenarioConfig
from ..services import lhv, network, optimize, sos
from ..services.encoding import generate_table
from ..services.qcore import bell_copies, observables_from_json

logger = logging.getLogger(__name__)

BOUNDS_M_RANGE = (2, 50)
OMEGA_TOL = 1e-10


class StarnetController:
    """Controller for star-network computations."""

    def __init__(self, settings: RunSettings):
        """
        Initialize the controller.

        Args:
            settings: Run settings (threads, search limits, seesaw restarts)
        """
        self.settings = settings

    def get_bounds(self, m_min: int = 2, m_max: int = 50) -> List[Tuple[int, int, float, float]]:
        """
        Classical bound, quantum optimum and their ratio for a range of m.

        Returns:
            List of (m, alpha_m, qopt, ratio) rows
        """
        low, high = BOUNDS_M_RANGE
        if not (low <= m_min <= m_max <= high):
            raise InvalidScenarioError(f"bounds range must satisfy {low} <= m-min <= m-max <= {high}")
        rows = network.ratio_curve(range(m_min, m_max + 1))
        logger.info(f"Computed bounds for m={m_min}..{m_max}")
        return rows

    def get_quantum(self, n: int, m: int) -> EvaluationReport:
        """Evaluate the optimal strategy."""
        cfg = ScenarioConfig.build(n, m)
        table = generate_table(m)
        report = network.evaluate_quantum(cfg, table, network.build_optimal_strategy(cfg, table),
                                          threads=self.settings.threads)
        logger.info(f"Quantum value n={n}, m={m}: delta={report.delta:.9g}")
        return report

    def get_classical(self, n: int, m: int) -> ClassicalBoundReport:
        """Exhaustive deterministic search; raises CapacityError when it does not fit."""
        cfg = ScenarioConfig.build(n, m)
        return lhv.exhaustive_strategy_max(cfg, max_states=self.settings.max_states,
                                           threads=self.settings.threads)

    def get_certificate(self, n: int, m: int, observables_json: Optional[str] = None) -> SosReport:
        """
        Certificate for the optimal strategy, or for observables loaded from JSON.

        Loaded observables are paired with floor(m/2)-copy Bell states (or the
        number of copies matching their dimension) and state-aware hub factors.
        """
        cfg = ScenarioConfig.build(n, m)
        table = generate_table(m)
        if observables_json is None:
            strat = network.build_optimal_strategy(cfg, table)
        else:
            observables = observables_from_json(observables_json)
            copies = int(round(math.log2(observables[0][0].dim)))
            cfg = ScenarioConfig.build(n, m, copies)
            states = [bell_copies(copies) for _ in range(n)]
            strat = network.strategy_from_observables(cfg, table, observables, states, hub="best")
        return sos.certificate(cfg, table, strat)

    def get_random_certificates(self, n: int, m: int, count: int, seed: int) -> Dict[str, float]:
        cfg = ScenarioConfig.build(n, m)
        return sos.random_strategy_check(cfg, count, seed)

    def verify(self, n: int, m: int) -> VerificationReport:
        """
        Run every check for one scenario.

        Checks: optimal delta, violation of the classical bound, certificate
        tightness, omega saturation, and agreement of the classical bounds
        (including the exhaustive search when it fits the state limit).
        """
        cfg = ScenarioConfig.build(n, m)
        table = generate_table(m)
        strat = network.build_optimal_strategy(cfg, table)
        evaluation = network.evaluate_quantum(cfg, table, strat, threads=self.settings.threads)
        certificate = sos.certificate(cfg, table, strat)

        skipped = []
        try:
            classical = lhv.exhaustive_strategy_max(cfg, max_states=self.settings.max_states,
                                                    threads=self.settings.threads)
        except CapacityError as e:
            logger.warning(f"Classical attainment check skipped: {e}")
            skipped.append("classical_attainment")
            classical = lhv.classical_bound_report(m)

        omegas = np.array(certificate.omegas)
        checks = {
            "optimal_delta": abs(evaluation.delta - evaluation.quantum_optimum)
            <= network.OPTIMUM_TOL * max(1.0, evaluation.quantum_optimum),
            "violation": evaluation.violated,
            "sos_tight": certificate.tight,
            "omega_saturation": bool(np.all(np.abs(omegas - math.sqrt(m)) <= OMEGA_TOL)),
            "classical_agreement": classical.agree,
        }
        report = VerificationReport(
            n=n,
            m=m,
            checks=checks,
            skipped=skipped,
            evaluation=evaluation,
            certificate=certificate,
            classical=classical,
        )
        if report.passed:
            logger.info(f"Verification passed for n={n}, m={m}")
        else:
            logger.error(f"Verification failed for n={n}, m={m}: {report.failed_checks}")
        return report

    def _seeds(self, seed: int, count: Optional[int] = None) -> List[int]:
        return list(range(seed, seed + (count or self.settings.seeds)))

    def get_seesaw(self, n: int, m: int, copies: int, seed: int = 0, seeds: Optional[int] = None,
                   visibility: float = 1.0, max_iters: int = 1000) -> SeesawState:
        cfg = ScenarioConfig.build(n, m, copies)
        return optimize.seesaw_best(cfg, self._seeds(seed, seeds), max_iters=max_iters,
                                    visibility=visibility, threads=self.settings.threads)

    def get_sweep(self, n: int, m: int, copies: Optional[int] = None, v_min: float = 0.0,
                  v_max: float = 1.0, steps: int = 21, seed: int = 0,
                  seeds: Optional[int] = None) -> SweepResult:
        """
        Visibility sweep with fixed observables.

        With floor(m/2) copies the optimal strategy is swept; with fewer copies
        the observables come from a noiseless seesaw run.
        """
        if steps < 2:
            raise InvalidScenarioError(f"a sweep needs at least 2 steps, got {steps}")
        cfg = ScenarioConfig.build(n, m, copies)
        table = generate_table(m)
        if cfg.full_copies:
            builder = optimize.werner_builder(cfg, table)
        else:
            best = self.get_seesaw(n, m, cfg.copies, seed=seed, seeds=seeds)
            builder = optimize.werner_builder(cfg, table, base=optimize.seesaw_strategy(best))
        grid = np.linspace(v_min, v_max, steps).tolist()
        return optimize.visibility_sweep(cfg, table, builder, grid, threads=self.settings.threads)

    def get_activation(self, m: int, v: float, n: int = 2, seed: int = 0,
                       seeds: Optional[int] = None) -> ActivationResult:
        cfg = ScenarioConfig.build(n, m)
        return optimize.activation_experiment(cfg, m, v, seeds=self._seeds(seed, seeds),
                                              threads=self.settings.threads)
