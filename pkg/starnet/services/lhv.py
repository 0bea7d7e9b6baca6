"""
Local Hidden Variable Service.

This module computes the n-local bound alpha_m three independent ways
(closed form, weight enumeration over the encoding table, exhaustive search
over deterministic strategies) and evaluates the inequality functional for
explicit deterministic hidden-variable models.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..exceptions import CapacityError, DimensionMismatchError, InvalidScenarioError
from ..models.reports import ClassicalBoundReport
from ..models.scenario import DEFAULT_MAX_STATES, ScenarioConfig
from .encoding import EncodingTable, generate_table, hamming_weight, sign_matrix

logger = logging.getLogger(__name__)

MAX_CLOSED_FORM_M = 60


@dataclass(frozen=True)
class DeterministicStrategy:
    """Outcome assignments of a deterministic n-local model.

    edge_assignments has shape (n, m) with entries <A^k_x>; hub_assignments
    has length 2^(m-1) with entries <B_i>. All entries are +1 or -1.
    """
    edge_assignments: np.ndarray
    hub_assignments: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edge_assignments, dtype=np.int64)
        hubs = np.asarray(self.hub_assignments, dtype=np.int64)
        if not (np.all(np.abs(edges) == 1) and np.all(np.abs(hubs) == 1)):
            raise InvalidScenarioError("deterministic assignments must be +1 or -1")
        object.__setattr__(self, "edge_assignments", edges)
        object.__setattr__(self, "hub_assignments", hubs)

    @classmethod
    def all_plus(cls, cfg: ScenarioConfig) -> "DeterministicStrategy":
        return cls(np.ones((cfg.n, cfg.m), dtype=np.int64), np.ones(cfg.num_terms, dtype=np.int64))


def alpha_closed_form(m: int) -> int:
    """
    Closed-form n-local bound: sum_{j=0}^{floor(m/2)} C(m, j) (m - 2j).

    Args:
        m: Settings per edge party

    Returns:
        alpha_m as an exact integer

    Raises:
        InvalidScenarioError: If m < 2
        CapacityError: If m > 60
    """
    if m < 2:
        raise InvalidScenarioError(f"alpha_m needs m >= 2, got {m}")
    if m > MAX_CLOSED_FORM_M:
        raise CapacityError(f"alpha_m closed form limited to m <= {MAX_CLOSED_FORM_M}, got {m}")
    return sum(math.comb(m, j) * (m - 2 * j) for j in range(m // 2 + 1))


def alpha_by_enumeration(table: EncodingTable) -> int:
    """Sum over encoding rows of |m - 2 wt(y^i)| (value of the all-ones assignment)."""
    m = table.m
    return sum(abs(m - 2 * hamming_weight(table, i)) for i in range(1, len(table) + 1))


def sign_flip_sums(table: EncodingTable, assignment: Sequence[int]) -> int:
    """Sum over i of |sum_x s^i_x a_x| for one edge party's +-1 assignment."""
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (table.m,):
        raise DimensionMismatchError(f"assignment length {a.shape} does not match m={table.m}")
    return int(np.abs(sign_matrix(table) @ a).sum())


def evaluate_strategy(cfg: ScenarioConfig, table: EncodingTable, s: DeterministicStrategy) -> float:
    """
    Evaluate the functional for a deterministic strategy.

    Args:
        cfg: Scenario
        table: Encoding table for cfg.m
        s: Deterministic strategy

    Returns:
        sum_i |prod_k (sum_x s^i_x a^k_x) b_i|^(1/n)

    Raises:
        DimensionMismatchError: If the strategy shape does not match (n, m)
    """
    if table.m != cfg.m:
        raise DimensionMismatchError(f"table is for m={table.m}, scenario has m={cfg.m}")
    if s.edge_assignments.shape != (cfg.n, cfg.m):
        raise DimensionMismatchError(
            f"edge assignments have shape {s.edge_assignments.shape}, expected {(cfg.n, cfg.m)}"
        )
    if s.hub_assignments.shape != (cfg.num_terms,):
        raise DimensionMismatchError(
            f"hub assignments have length {s.hub_assignments.shape}, expected {cfg.num_terms}"
        )

    column_sums = s.edge_assignments @ sign_matrix(table).T
    # root each factor first; the integer product overflows int64 once m^n > 2^63
    roots = np.abs(column_sums).astype(float) ** (1.0 / cfg.n)
    return float(np.sum(np.prod(roots, axis=0)))


def _all_assignments(m: int) -> np.ndarray:
    """Every +-1 vector of length m, shape (2^m, m)."""
    bits = (np.arange(2 ** m)[:, None] >> np.arange(m)[::-1]) & 1
    return 1 - 2 * bits


def exhaustive_strategy_max(
    cfg: ScenarioConfig,
    max_states: int = DEFAULT_MAX_STATES,
    threads: int = 1,
) -> ClassicalBoundReport:
    """
    Maximize the functional over every deterministic strategy.

    Each hub value b_i multiplies exactly one term and the absolute value
    absorbs its sign, so b_i = +1 throughout and only the 2^(nm) edge
    assignments are enumerated.

    Args:
        cfg: Scenario
        max_states: Upper limit on 2^(nm)
        threads: Worker count for the blocks of the first party's assignments

    Returns:
        ClassicalBoundReport carrying all three values of alpha_m

    Raises:
        CapacityError: If 2^(nm) exceeds max_states
    """
    total = 2 ** (cfg.n * cfg.m)
    if total > max_states:
        raise CapacityError(
            f"exhaustive search over 2^{cfg.n * cfg.m} edge assignments exceeds the limit of {max_states}"
        )

    table = generate_table(cfg.m)
    # |sum_x s^i_x a_x| for every single-party assignment, shape (2^m, 2^(m-1))
    per_party = np.abs(_all_assignments(cfg.m) @ sign_matrix(table).T)

    rest = np.ones((1, cfg.num_terms), dtype=np.int64)
    for _ in range(cfg.n - 1):
        rest = (rest[:, None, :] * per_party[None, :, :]).reshape(-1, cfg.num_terms)
    rest_f = rest.astype(float)

    def block_max(row: np.ndarray) -> float:
        return float(np.max(np.sum((row[None, :] * rest_f) ** (1.0 / cfg.n), axis=1)))

    rows = list(per_party.astype(float))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            best = max(pool.map(block_max, rows))
    else:
        best = max(block_max(row) for row in rows)

    best_int = int(round(best))
    if abs(best - best_int) > 1e-9:
        logger.warning(f"Deterministic maximum {best!r} is not an integer for n={cfg.n}, m={cfg.m}")

    report = ClassicalBoundReport(
        m=cfg.m,
        n=cfg.n,
        alpha_closed=alpha_closed_form(cfg.m),
        alpha_enumerated=alpha_by_enumeration(table),
        alpha_strategy_max=best_int,
        strategies_searched=total,
    )
    logger.info(
        f"Exhaustive search n={cfg.n}, m={cfg.m}: max={best_int} over {total} strategies "
        f"(alpha={report.alpha_closed}, agree={report.agree})"
    )
    return report


def classical_bound_report(m: int, cfg: Optional[ScenarioConfig] = None,
                           max_states: int = DEFAULT_MAX_STATES, threads: int = 1) -> ClassicalBoundReport:
    """Closed form and enumeration always; the exhaustive search only when cfg is given and fits."""
    if cfg is not None:
        try:
            return exhaustive_strategy_max(cfg, max_states=max_states, threads=threads)
        except CapacityError as e:
            logger.warning(f"Skipping exhaustive search: {e}")
    return ClassicalBoundReport(
        m=m,
        n=cfg.n if cfg is not None else None,
        alpha_closed=alpha_closed_form(m),
        alpha_enumerated=alpha_by_enumeration(generate_table(m)),
    )
