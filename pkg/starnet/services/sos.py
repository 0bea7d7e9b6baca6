"""
Sum-of-Squares Certificate Service.

This module checks the scalar consequences of the sum-of-squares
decomposition: the per-link norms omega of the edge operators, the slack
gamma = sum_i (prod_k omega_{k,i})^(1/n) - delta >= 0 and its tightness at
the optimum.

omega_{k,i}^2 = tr[rho_k (E_{k,i}^2 (x) I)]. On mixed link states the same
trace formula is used and the report is flagged as extended regime.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..exceptions import ImplementationInconsistencyError, NumericConsistencyError
from ..models.reports import SosReport
from ..models.scenario import ScenarioConfig
from .encoding import EncodingTable, generate_table
from .network import (
    QuantumStrategy,
    edge_operator,
    evaluate_quantum,
    quantum_optimum_formula,
)
from .qcore import (
    LinkState,
    Observable,
    anticommutator,
    anticommuting_set,
    bell_copies,
    random_involution,
    random_unitary,
)

logger = logging.getLogger(__name__)

RADICAND_FLOOR = -1e-10
EXPANSION_TOL = 1e-10
SLACK_TOL = 1e-8
TIGHT_TOL = 1e-7


def _alice_expectation(state: LinkState, operator: np.ndarray) -> float:
    return float(np.real(np.trace(state.alice_marginal() @ operator)))


def omega(edge_op: np.ndarray, state: LinkState) -> float:
    """
    Norm of (E (x) I) acting on the link state: sqrt(tr[rho (E^2 (x) I)]).

    Raises:
        NumericConsistencyError: If the radicand is below -1e-10
    """
    radicand = _alice_expectation(state, edge_op @ edge_op)
    if radicand < RADICAND_FLOOR:
        raise NumericConsistencyError(f"negative radicand {radicand} in omega")
    return math.sqrt(max(radicand, 0.0))


def omega_anticommutator_expansion(components: Sequence[Observable], signs: Sequence[int],
                                   state: LinkState) -> float:
    """
    omega from the expansion m + sum_{x<y} s_x s_y <{A_x, A_y}>.

    The result is cross-checked against omega() on the assembled edge operator.

    Args:
        components: The party's m observables
        signs: Sign vector of the term
        state: Link state

    Returns:
        omega

    Raises:
        ImplementationInconsistencyError: If the two radicands differ by more than 1e-10
    """
    matrices = [obs.matrix for obs in components]
    radicand = sum(_alice_expectation(state, a @ a) for a in matrices)
    for x in range(len(matrices)):
        for y in range(x + 1, len(matrices)):
            radicand += signs[x] * signs[y] * _alice_expectation(state, anticommutator(matrices[x], matrices[y]))

    edge = sum(s * a for s, a in zip(signs, matrices))
    direct = _alice_expectation(state, edge @ edge)
    if abs(direct - radicand) > EXPANSION_TOL:
        raise ImplementationInconsistencyError(
            f"anticommutator expansion {radicand!r} disagrees with direct radicand {direct!r}"
        )
    if radicand < RADICAND_FLOOR:
        raise NumericConsistencyError(f"negative radicand {radicand} in omega expansion")
    return math.sqrt(max(radicand, 0.0))


def max_anticommutator(observables: Sequence[Observable]) -> float:
    """Largest entry of {A_x, A_y} over pairs x < y."""
    worst = 0.0
    for x in range(len(observables)):
        for y in range(x + 1, len(observables)):
            value = float(np.max(np.abs(anticommutator(observables[x].matrix, observables[y].matrix))))
            worst = max(worst, value)
    return worst


def _is_pure(state: LinkState) -> bool:
    purity = float(np.real(np.trace(state.matrix @ state.matrix)))
    return abs(purity - 1.0) < 1e-10


def omega_matrix(cfg: ScenarioConfig, table: EncodingTable, strat: QuantumStrategy) -> np.ndarray:
    """omega_{k,i}, shape (n, 2^(m-1))."""
    strat.check(cfg)
    omegas = np.zeros((cfg.n, cfg.num_terms))
    for k in range(cfg.n):
        for i in range(1, cfg.num_terms + 1):
            edge = edge_operator(cfg, table, k + 1, i, strat.observables[k])
            omegas[k, i - 1] = omega(edge, strat.states[k])
    return omegas


def certificate_bound(omegas: np.ndarray) -> float:
    """sum_i (prod_k omega_{k,i})^(1/n)."""
    n = omegas.shape[0]
    return float(np.sum(np.prod(omegas, axis=0) ** (1.0 / n)))


def certificate(cfg: ScenarioConfig, table: EncodingTable, strat: QuantumStrategy) -> SosReport:
    """
    Fill an SosReport for a strategy.

    Args:
        cfg: Scenario
        table: Encoding table
        strat: Strategy to certify

    Returns:
        SosReport; tight at the optimal strategy, slack_ok for every valid strategy
    """
    omegas = omega_matrix(cfg, table, strat)
    delta_q = evaluate_quantum(cfg, table, strat).delta
    gamma = certificate_bound(omegas) - delta_q
    report = SosReport(
        n=cfg.n,
        m=cfg.m,
        omegas=omegas.tolist(),
        gamma=gamma,
        delta_q=delta_q,
        slack_ok=gamma >= -SLACK_TOL,
        tight=abs(gamma) < TIGHT_TOL,
        extended_regime=not all(_is_pure(state) for state in strat.states),
        max_anticommutator=max(max_anticommutator(party) for party in strat.observables),
    )
    if not report.slack_ok:
        logger.error(f"Certificate slack violated for n={cfg.n}, m={cfg.m}: gamma={gamma!r}")
    return report


def random_strategy(cfg: ScenarioConfig, rng: np.random.Generator,
                    states: Optional[Sequence[LinkState]] = None,
                    anticommuting: bool = False) -> QuantumStrategy:
    """
    Random observables and hub factors on the given (default: Bell-copy) states.

    With anticommuting=True every party gets a Haar-rotated Jordan-Wigner set,
    which needs copies_per_link = floor(m/2).
    """
    states = list(states) if states is not None else [bell_copies(cfg.copies) for _ in range(cfg.n)]
    observables: List[List[Observable]] = []
    for k, state in enumerate(states):
        if anticommuting:
            unitary = random_unitary(state.dim_a, rng)
            party = [Observable(unitary @ obs.matrix @ unitary.conj().T, (k + 1, x + 1))
                     for x, obs in enumerate(anticommuting_set(cfg.m))]
        else:
            party = [Observable(random_involution(state.dim_a, rng), (k + 1, x + 1)) for x in range(cfg.m)]
        observables.append(party)
    hubs = [[Observable(random_involution(state.dim_b, rng)) for _ in range(cfg.num_terms)] for state in states]
    return QuantumStrategy(observables, hubs, states)


def random_strategy_check(cfg: ScenarioConfig, count: int, seed: int = 0) -> Dict[str, float]:
    """
    Certificate statistics over random valid strategies.

    Tight certificates are expected only for nearly anticommuting observables;
    that correlation is logged, not enforced.

    Returns:
        Dictionary with min_gamma, max_bound (sum_i (prod_k omega)^(1/n)),
        max_omega_anticommuting, tight_count and tight_without_anticommutation
    """
    table = generate_table(cfg.m)
    rng = np.random.default_rng(seed)
    qopt = quantum_optimum_formula(cfg.n, cfg.m)
    min_gamma = math.inf
    max_bound = 0.0
    tight_count = 0
    tight_odd = 0
    max_omega_ac = 0.0

    for _ in range(count):
        strat = random_strategy(cfg, rng)
        report = certificate(cfg, table, strat)
        min_gamma = min(min_gamma, report.gamma)
        max_bound = max(max_bound, certificate_bound(np.array(report.omegas)))
        if report.tight:
            tight_count += 1
            if report.max_anticommutator >= 1e-3:
                tight_odd += 1

    if cfg.full_copies:
        for _ in range(count):
            strat = random_strategy(cfg, rng, anticommuting=True)
            max_omega_ac = max(max_omega_ac, float(np.max(omega_matrix(cfg, table, strat))))

    logger.info(
        f"Random certificate check n={cfg.n}, m={cfg.m}, {count} strategies: min gamma={min_gamma:.3e}, "
        f"max bound={max_bound:.9g} (optimum {qopt:.9g}), tight={tight_count}, "
        f"tight without anticommutation={tight_odd}"
    )
    return {
        "min_gamma": float(min_gamma),
        "max_bound": max_bound,
        "quantum_optimum": qopt,
        "max_omega_anticommuting": max_omega_ac,
        "tight_count": float(tight_count),
        "tight_without_anticommutation": float(tight_odd),
    }
