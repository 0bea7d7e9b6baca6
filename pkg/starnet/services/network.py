"""
Network Service.

This module assembles the star network: per-link edge operators, the hub's
factorized observables, link correlators and the inequality functional.

The hub observable B_i is stored as one factor per link, so the correlator
of term i is the product of n bipartite traces.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import (
    DimensionMismatchError,
    ImplementationInconsistencyError,
    InvalidScenarioError,
    NotNormalizableError,
)
from ..models.reports import EvaluationReport
from ..models.scenario import ScenarioConfig
from .encoding import EncodingTable, generate_table, sign_matrix
from .lhv import alpha_closed_form
from .qcore import (
    LinkState,
    Observable,
    anticommuting_set,
    bell_copies,
    expectation,
    kron_all,
    partial_trace,
    permute_subsystems,
    sign_projection,
    transpose_on_bob,
)

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-9
OPTIMUM_TOL = 1e-8


@dataclass(frozen=True)
class QuantumStrategy:
    """Observables, hub factors and link states of a star network.

    observables[k][x] is A^{k+1}_{x+1}; hub_factors[k][i] is the factor of
    B_{i+1} acting on Bob's end of link k+1; states[k] is the state of link k+1.
    """
    observables: Tuple[Tuple[Observable, ...], ...]
    hub_factors: Tuple[Tuple[Observable, ...], ...]
    states: Tuple[LinkState, ...]

    def __post_init__(self):
        observables = tuple(tuple(party) for party in self.observables)
        hub_factors = tuple(tuple(link) for link in self.hub_factors)
        states = tuple(self.states)
        if not (len(observables) == len(hub_factors) == len(states)):
            raise DimensionMismatchError(
                f"{len(observables)} parties, {len(hub_factors)} hub links and {len(states)} states"
            )
        for k, (party, link, state) in enumerate(zip(observables, hub_factors, states), start=1):
            if any(obs.dim != state.dim_a for obs in party):
                raise DimensionMismatchError(f"party {k} observables do not match the link dimension {state.dim_a}")
            if any(hub.dim != state.dim_b for hub in link):
                raise DimensionMismatchError(f"hub factors of link {k} do not match dimension {state.dim_b}")
        object.__setattr__(self, "observables", observables)
        object.__setattr__(self, "hub_factors", hub_factors)
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return len(self.states)

    def check(self, cfg: ScenarioConfig) -> None:
        """Raise DimensionMismatchError unless the strategy fits cfg."""
        if self.n != cfg.n:
            raise DimensionMismatchError(f"strategy has {self.n} parties, scenario has {cfg.n}")
        if any(len(party) != cfg.m for party in self.observables):
            raise DimensionMismatchError(f"every party needs {cfg.m} observables")
        if any(len(link) != cfg.num_terms for link in self.hub_factors):
            raise DimensionMismatchError(f"every link needs {cfg.num_terms} hub factors")


def edge_operator(cfg: ScenarioConfig, table: EncodingTable, k: int, i: int,
                  obs: Sequence[Observable]) -> np.ndarray:
    """
    Signed sum of one party's observables for term i.

    Args:
        cfg: Scenario
        table: Encoding table
        k: Party index (1-based, used in error messages)
        i: Term index (1-based)
        obs: The party's m observables

    Returns:
        sum_x (-1)^(y^i_x) A^k_x

    Raises:
        DimensionMismatchError: If the observable count or dimensions disagree
    """
    if len(obs) != cfg.m:
        raise DimensionMismatchError(f"party {k} has {len(obs)} observables, expected {cfg.m}")
    dims = {o.dim for o in obs}
    if len(dims) != 1:
        raise DimensionMismatchError(f"party {k} observables have mixed dimensions {sorted(dims)}")
    table.row(i)
    signs = sign_matrix(table)[i - 1]
    return np.tensordot(signs.astype(float), np.stack([o.matrix for o in obs]), axes=1)


def optimal_hub_factor(edge_op: np.ndarray, m: int) -> Observable:
    """
    Clean-case optimal hub factor (1/sqrt m) E^T.

    Raises:
        NotNormalizableError: If E^2 differs from m I, i.e. the edge observables do not anticommute
    """
    identity = np.eye(edge_op.shape[0], dtype=complex)
    deviation = float(np.max(np.abs(edge_op @ edge_op - m * identity)))
    if deviation > NORMALIZATION_TOL * m:
        raise NotNormalizableError(f"edge operator squared deviates from {m} I by {deviation:.3e}")
    return transpose_on_bob(Observable(edge_op / math.sqrt(m)))


def effective_hub_operator(edge_op: np.ndarray, state: LinkState) -> np.ndarray:
    """K = tr_A[(E (x) I) rho], so that tr[rho (E (x) B)] = tr[K B]."""
    full = np.kron(edge_op, np.eye(state.dim_b, dtype=complex)) @ state.matrix
    return partial_trace(full, list(state.dims), keep=[1])


def best_hub_factor(edge_op: np.ndarray, state: LinkState) -> Observable:
    """Hub factor sign(K) maximizing |tr[rho (E (x) B)]| over involutions B."""
    matrix, degenerate = sign_projection(effective_hub_operator(edge_op, state))
    if degenerate:
        logger.warning("Zero eigenvalue in hub sign projection, mapped to +1")
    return Observable(matrix)


def link_correlator(edge_op: np.ndarray, hub_factor: Observable, state: LinkState) -> float:
    """tr[rho (E (x) B)], imaginary part checked and dropped."""
    if edge_op.shape[0] != state.dim_a or hub_factor.dim != state.dim_b:
        raise DimensionMismatchError(
            f"operators of size ({edge_op.shape[0]}, {hub_factor.dim}) on a link of dims {state.dims}"
        )
    return expectation(state.matrix, np.kron(edge_op, hub_factor.matrix))


def quantum_optimum_formula(n: int, m: int) -> float:
    """Optimal quantum value 2^(m-1) sqrt(m); independent of n."""
    if m < 2:
        raise InvalidScenarioError(f"m must be >= 2, got {m}")
    return 2 ** (m - 1) * math.sqrt(m)


def signed_j_values(cfg: ScenarioConfig, table: EncodingTable, strat: QuantumStrategy,
                    threads: int = 1) -> List[float]:
    """J_i = prod_k tr[rho_k (E_{k,i} (x) B_i^(k))] for i = 1..2^(m-1)."""
    strat.check(cfg)

    def term(i: int) -> float:
        value = 1.0
        for k in range(cfg.n):
            edge = edge_operator(cfg, table, k + 1, i, strat.observables[k])
            value *= link_correlator(edge, strat.hub_factors[k][i - 1], strat.states[k])
        return value

    indices = range(1, cfg.num_terms + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(term, indices))
    return [term(i) for i in indices]


def evaluate_quantum(cfg: ScenarioConfig, table: EncodingTable, strat: QuantumStrategy,
                     threads: int = 1) -> EvaluationReport:
    """
    Evaluate the inequality functional for a quantum strategy.

    Args:
        cfg: Scenario
        table: Encoding table for cfg.m
        strat: Strategy consistent with cfg
        threads: Worker count for the terms

    Returns:
        EvaluationReport with |J_i|, delta, both bounds, ratio and the violation flag
    """
    if table.m != cfg.m:
        raise DimensionMismatchError(f"table is for m={table.m}, scenario has m={cfg.m}")
    report = EvaluationReport.from_values(
        n=cfg.n,
        m=cfg.m,
        copies=strat.states[0].copies,
        signed_values=signed_j_values(cfg, table, strat, threads=threads),
        classical_bound=float(alpha_closed_form(cfg.m)),
        quantum_optimum=quantum_optimum_formula(cfg.n, cfg.m),
    )
    logger.debug(f"Evaluated n={cfg.n}, m={cfg.m}: delta={report.delta:.9g}, violated={report.violated}")
    return report


def strategy_from_observables(cfg: ScenarioConfig, table: EncodingTable,
                              observables: Sequence[Sequence[Observable]],
                              states: Sequence[LinkState],
                              hub: str = "optimal") -> QuantumStrategy:
    """
    Complete a strategy with hub factors.

    Args:
        cfg: Scenario
        table: Encoding table
        observables: Per-party observable lists
        states: Per-link states (may differ, e.g. heterogeneous visibilities)
        hub: 'optimal' for (1/sqrt m) E^T (anticommuting inputs only),
            'best' for the state-aware sign(K) factor

    Returns:
        QuantumStrategy
    """
    if hub not in ("optimal", "best"):
        raise InvalidScenarioError(f"unknown hub rule '{hub}'")
    if len(observables) != cfg.n or len(states) != cfg.n:
        raise DimensionMismatchError(f"need {cfg.n} observable lists and states")
    hub_factors = []
    for k in range(cfg.n):
        link = []
        for i in range(1, cfg.num_terms + 1):
            edge = edge_operator(cfg, table, k + 1, i, observables[k])
            if hub == "optimal":
                link.append(optimal_hub_factor(edge, cfg.m))
            else:
                link.append(best_hub_factor(edge, states[k]))
        hub_factors.append(link)
    return QuantumStrategy(observables, hub_factors, states)


def build_optimal_strategy(cfg: ScenarioConfig, table: Optional[EncodingTable] = None,
                           states: Optional[Sequence[LinkState]] = None) -> QuantumStrategy:
    """
    Anticommuting observables on floor(m/2) Bell pairs per link.

    Args:
        cfg: Scenario with copies_per_link = floor(m/2)
        table: Encoding table (generated when omitted)
        states: Replacement link states, e.g. Werner states for noise sweeps

    Returns:
        QuantumStrategy reaching 2^(m-1) sqrt(m) on Bell states

    Raises:
        InvalidScenarioError: If copies_per_link is not floor(m/2)
        ImplementationInconsistencyError: If the clean strategy misses the optimum
    """
    if not cfg.full_copies:
        raise InvalidScenarioError(
            f"{cfg.m} anticommuting observables need {cfg.m // 2} copies per link, got {cfg.copies}; "
            "supply observables externally for fewer copies"
        )
    table = table if table is not None else generate_table(cfg.m)
    observables = [anticommuting_set(cfg.m, party=k + 1) for k in range(cfg.n)]
    clean = [bell_copies(cfg.copies) for _ in range(cfg.n)]
    strat = strategy_from_observables(cfg, table, observables, clean)

    report = evaluate_quantum(cfg, table, strat)
    if abs(report.delta - report.quantum_optimum) > OPTIMUM_TOL * max(1.0, report.quantum_optimum):
        raise ImplementationInconsistencyError(
            f"optimal strategy gives {report.delta!r}, expected {report.quantum_optimum!r}"
        )
    if states is not None:
        strat = QuantumStrategy(strat.observables, strat.hub_factors, states)
    return strat


def evaluate_dense(cfg: ScenarioConfig, table: EncodingTable, strat: QuantumStrategy,
                   joint_hubs: Optional[Sequence[np.ndarray]] = None) -> List[float]:
    """
    Signed J_i from the full three-party state, for n = 2 only.

    Args:
        joint_hubs: Optional non-factorized hub observables on B1 (x) B2, one per term;
            the Kronecker product of the stored factors is used otherwise

    Returns:
        List of J_i
    """
    if cfg.n != 2:
        raise InvalidScenarioError(f"dense evaluation supports n = 2 only, got n={cfg.n}")
    strat.check(cfg)
    first, second = strat.states
    dims = [first.dim_a, first.dim_b, second.dim_a, second.dim_b]
    # A1 B1 A2 B2 -> A1 A2 B1 B2
    rho = permute_subsystems(np.kron(first.matrix, second.matrix), dims, [0, 2, 1, 3])

    values = []
    for i in range(1, cfg.num_terms + 1):
        edges = [edge_operator(cfg, table, k + 1, i, strat.observables[k]) for k in range(2)]
        if joint_hubs is None:
            hub = np.kron(strat.hub_factors[0][i - 1].matrix, strat.hub_factors[1][i - 1].matrix)
        else:
            hub = np.asarray(joint_hubs[i - 1], dtype=complex)
        values.append(expectation(rho, kron_all([edges[0], edges[1], hub])))
    return values


def ratio_curve(m_values: Sequence[int]) -> List[Tuple[int, int, float, float]]:
    """(m, alpha_m, 2^(m-1) sqrt m, ratio) for each m."""
    rows = []
    for m in m_values:
        alpha = alpha_closed_form(m)
        qopt = quantum_optimum_formula(2, m)
        rows.append((m, alpha, qopt, qopt / alpha))
    return rows
