"""
Optimization Service.

This module contains the noise and dimension experiments: visibility sweeps
with bisection-refined critical visibilities, a seesaw heuristic maximizing
the functional with a fixed number of Bell pairs per link, and the
single-copy versus multi-copy activation comparison.

Seesaw values are lower bounds on the constrained-dimension maximum.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from ..exceptions import DomainError, InvalidScenarioError
from ..models.reports import (
    VIOLATION_SLACK,
    ActivationResult,
    EvaluationReport,
    SeesawState,
    SweepPoint,
    SweepResult,
)
from ..models.scenario import ScenarioConfig
from .encoding import EncodingTable, generate_table, sign_matrix
from .lhv import alpha_closed_form
from .network import (
    QuantumStrategy,
    best_hub_factor,
    build_optimal_strategy,
    evaluate_quantum,
    quantum_optimum_formula,
)
from .qcore import LinkState, Observable, partial_trace, random_involution, sign_projection, werner_copies

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-9
CRITICAL_XTOL = 1e-7
SEESAW_TOL = 1e-9
ACCEPT_SLACK = 1e-12
BACKTRACK_STEPS = (0.5, 0.25, 0.125, 0.0625)

StrategyBuilder = Callable[[float], QuantumStrategy]


def werner_builder(cfg: ScenarioConfig, table: Optional[EncodingTable] = None,
                   base: Optional[QuantumStrategy] = None) -> StrategyBuilder:
    """
    Strategy builder for homogeneous Werner noise.

    Observables and hub factors stay fixed (the clean-case optimal ones unless
    base is given); only the link states change with v.
    """
    table = table if table is not None else generate_table(cfg.m)
    base = base if base is not None else build_optimal_strategy(cfg, table)
    copies = base.states[0].copies

    def build(v: float) -> QuantumStrategy:
        states = [werner_copies(copies, v) for _ in range(cfg.n)]
        return QuantumStrategy(base.observables, base.hub_factors, states)

    return build


def visibility_sweep(cfg: ScenarioConfig, table: EncodingTable, strat_builder: StrategyBuilder,
                     v_grid: Sequence[float], threads: int = 1) -> SweepResult:
    """
    Evaluate delta along a visibility grid and locate the critical visibility.

    Args:
        cfg: Scenario
        table: Encoding table
        strat_builder: Maps a visibility to a strategy
        v_grid: Visibilities in [0, 1]
        threads: Worker count for the grid points

    Returns:
        SweepResult; critical_v is absent when no sign change of delta - alpha is bracketed
    """
    grid = sorted(float(v) for v in v_grid)
    if not grid:
        raise DomainError("visibility grid is empty")
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise DomainError(f"visibility grid must lie in [0, 1], got [{grid[0]}, {grid[-1]}]")
    alpha = float(alpha_closed_form(cfg.m))

    def delta_at(v: float) -> float:
        return evaluate_quantum(cfg, table, strat_builder(v)).delta

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            deltas = list(pool.map(delta_at, grid))
    else:
        deltas = [delta_at(v) for v in grid]

    for (v1, d1), (v2, d2) in zip(zip(grid, deltas), zip(grid[1:], deltas[1:])):
        if d1 > d2 + MONOTONE_SLACK:
            logger.warning(f"Delta decreases between v={v1:.6g} ({d1:.9g}) and v={v2:.6g} ({d2:.9g})")

    points = [SweepPoint(v=v, delta=d, violated=d > alpha + VIOLATION_SLACK) for v, d in zip(grid, deltas)]

    critical_v = None
    for left, right in zip(points, points[1:]):
        if not left.violated and right.violated:
            critical_v = bisect(lambda v: delta_at(v) - alpha - VIOLATION_SLACK, left.v, right.v,
                                xtol=CRITICAL_XTOL)
            break
    if critical_v is None:
        logger.warning(f"No violation threshold bracketed on [{grid[0]}, {grid[-1]}] for n={cfg.n}, m={cfg.m}")
    else:
        logger.info(f"Critical visibility for n={cfg.n}, m={cfg.m}: {critical_v:.7f}")

    return SweepResult(
        n=cfg.n,
        m=cfg.m,
        copies=strat_builder(grid[-1]).states[0].copies,
        alpha=alpha,
        grid=points,
        critical_v=critical_v,
    )


def evaluate_visibilities(cfg: ScenarioConfig, table: EncodingTable, base: QuantumStrategy,
                          visibilities: Sequence[float]) -> EvaluationReport:
    """Evaluate base observables and hub factors with a different Werner visibility on each link."""
    if len(visibilities) != cfg.n:
        raise DomainError(f"need {cfg.n} link visibilities, got {len(visibilities)}")
    copies = base.states[0].copies
    states = [werner_copies(copies, float(v)) for v in visibilities]
    return evaluate_quantum(cfg, table, QuantumStrategy(base.observables, base.hub_factors, states))


def critical_visibility_closed_form(m: int) -> float:
    """
    alpha_m / (2^(m-1) sqrt m) for one Bell pair per link (m = 2, 3).

    With a single copy every link correlator of the optimal strategy scales
    linearly in v, so delta(v) = 2^(m-1) sqrt(m) v for every n.
    """
    if m not in (2, 3):
        raise InvalidScenarioError(f"closed-form critical visibility holds for m = 2, 3 only, got m={m}")
    return alpha_closed_form(m) / quantum_optimum_formula(2, m)


class SeesawOptimizer:
    """Alternating maximization of delta over observables with fixed link states."""

    def __init__(self, cfg: ScenarioConfig, seed: int, visibility: float = 1.0,
                 max_iters: int = 1000, tol: float = SEESAW_TOL):
        """
        Initialize the optimizer.

        Args:
            cfg: Scenario; copies_per_link fixes the local dimension 2^c
            seed: Seed for the random starting observables
            visibility: Werner visibility of every copy
            max_iters: Iteration cap
            tol: Stop once an iteration improves delta by less than this
        """
        self.cfg = cfg
        self.seed = seed
        self.visibility = visibility
        self.max_iters = max_iters
        self.tol = tol
        self.table = generate_table(cfg.m)
        self.signs = sign_matrix(self.table).astype(float)
        self.states: List[LinkState] = [werner_copies(cfg.copies, visibility) for _ in range(cfg.n)]
        self.rng = np.random.default_rng(seed)
        dim = 2 ** cfg.copies
        self.observables = np.stack([
            np.stack([random_involution(dim, self.rng, signature=dim // 2) for _ in range(cfg.m)])
            for _ in range(cfg.n)
        ])
        self.hubs = np.zeros((cfg.n, cfg.num_terms, dim, dim), dtype=complex)
        self._update_hubs()

    def _edges(self, party: np.ndarray) -> np.ndarray:
        """E_i for every term, shape (2^(m-1), d, d)."""
        return np.tensordot(self.signs, party, axes=1)

    def _correlators(self, observables: np.ndarray, hubs: np.ndarray) -> np.ndarray:
        correlators = np.zeros((self.cfg.n, self.cfg.num_terms))
        for k, state in enumerate(self.states):
            for i, edge in enumerate(self._edges(observables[k])):
                correlators[k, i] = float(np.real(np.trace(state.matrix @ np.kron(edge, hubs[k, i]))))
        return correlators

    def _delta(self, correlators: np.ndarray) -> float:
        return float(np.sum(np.prod(np.abs(correlators), axis=0) ** (1.0 / self.cfg.n)))

    def _update_hubs(self) -> None:
        """Exact step: each hub factor becomes sign(tr_A[(E (x) I) rho])."""
        for k, state in enumerate(self.states):
            for i, edge in enumerate(self._edges(self.observables[k])):
                self.hubs[k, i] = best_hub_factor(edge, state).matrix

    def _project(self, hermitian: np.ndarray) -> np.ndarray:
        matrix, degenerate = sign_projection(hermitian)
        if degenerate:
            logger.warning(f"Zero eigenvalue in observable sign projection (seed {self.seed}), mapped to +1")
        return matrix

    def _update_party(self, k: int, delta: float) -> float:
        """Linearized step for party k with backtracking; returns the accepted delta."""
        n = self.cfg.n
        state = self.states[k]
        correlators = self._correlators(self.observables, self.hubs)
        others = np.prod(np.abs(np.delete(correlators, k, axis=0)), axis=0) ** (1.0 / n)
        own = correlators[k]
        magnitude = np.maximum(np.abs(own), 1e-12)
        weights = others * (magnitude ** (1.0 / n - 1.0)) * np.where(own >= 0, 1.0, -1.0) / n

        dims = list(state.dims)
        eye_a = np.eye(state.dim_a, dtype=complex)
        # L_i = tr_B[(I (x) B_i) rho], so that c_{k,i} = tr[E_i L_i]
        local = np.stack([
            partial_trace(np.kron(eye_a, hub) @ state.matrix, dims, keep=[0]) for hub in self.hubs[k]
        ])
        gradient = np.tensordot(self.signs.T * weights[None, :], local, axes=1)
        proposal = np.stack([self._project(h) for h in gradient])

        current = self.observables[k].copy()
        for step in (1.0,) + BACKTRACK_STEPS:
            if step == 1.0:
                candidate = proposal
            else:
                candidate = np.stack([self._project((1.0 - step) * a + step * b)
                                      for a, b in zip(current, proposal)])
            trial = self.observables.copy()
            trial[k] = candidate
            value = self._delta(self._correlators(trial, self.hubs))
            if value >= delta - ACCEPT_SLACK:
                self.observables = trial
                return value
        return delta

    def run(self) -> SeesawState:
        """
        Iterate party updates and hub updates until the improvement drops below tol.

        Returns:
            SeesawState with the final observables and hub factors
        """
        delta = self._delta(self._correlators(self.observables, self.hubs))
        history = [delta]
        converged = False
        iterations = 0
        for iterations in range(1, self.max_iters + 1):
            previous = delta
            for k in range(self.cfg.n):
                delta = self._update_party(k, delta)
            self._update_hubs()
            delta = self._delta(self._correlators(self.observables, self.hubs))
            history.append(delta)
            logger.debug(f"Seesaw seed {self.seed} iteration {iterations}: delta={delta:.12g}")
            if delta - previous < self.tol:
                converged = True
                break

        if not converged:
            logger.warning(f"Seesaw seed {self.seed} stopped after {self.max_iters} iterations without converging")

        observables = [[Observable(a, (k + 1, x + 1)) for x, a in enumerate(party)]
                       for k, party in enumerate(self.observables)]
        hubs = [[Observable(b) for b in link] for link in self.hubs]
        return SeesawState(
            n=self.cfg.n,
            m=self.cfg.m,
            copies=self.cfg.copies,
            visibility=self.visibility,
            seed=self.seed,
            delta=delta,
            iterations=iterations,
            converged=converged,
            history=history,
            observables=observables,
            hub_factors=hubs,
        )


def seesaw_maximize(cfg: ScenarioConfig, seed: int, max_iters: int = 1000,
                    visibility: float = 1.0) -> SeesawState:
    """One seeded seesaw trajectory."""
    return SeesawOptimizer(cfg, seed, visibility=visibility, max_iters=max_iters).run()


def seesaw_best(cfg: ScenarioConfig, seeds: Sequence[int], max_iters: int = 1000,
                visibility: float = 1.0, threads: int = 1) -> SeesawState:
    """
    Best trajectory over several restarts.

    Ties go to the earliest seed, so the result does not depend on threads.
    """
    if not seeds:
        raise InvalidScenarioError("seesaw needs at least one seed")

    def run(seed: int) -> SeesawState:
        return seesaw_maximize(cfg, seed, max_iters=max_iters, visibility=visibility)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            states = list(pool.map(run, seeds))
    else:
        states = [run(seed) for seed in seeds]

    best = states[0]
    for state in states[1:]:
        if state.delta > best.delta:
            best = state
    logger.info(
        f"Seesaw n={cfg.n}, m={cfg.m}, copies={cfg.copies}, v={visibility}: best delta={best.delta:.9g} "
        f"(seed {best.seed}, {len(states)} restarts)"
    )
    return best


def seesaw_strategy(state: SeesawState) -> QuantumStrategy:
    """QuantumStrategy carrying the observables found by a seesaw run."""
    states = [werner_copies(state.copies, state.visibility) for _ in range(state.n)]
    return QuantumStrategy(state.observables, state.hub_factors, states)


def activation_experiment(cfg: ScenarioConfig, m: int, v: float, seeds: Sequence[int] = tuple(range(20)),
                          max_iters: int = 1000, threads: int = 1) -> ActivationResult:
    """
    Compare one Bell pair per link against floor(m/2) pairs at the same per-copy visibility.

    Args:
        cfg: Scenario providing n
        m: Settings per edge party (m >= 4)
        v: Per-copy visibility
        seeds: Seesaw restarts for each side

    Returns:
        ActivationResult; activation is (violated_single, violated_multi) = (False, True)
    """
    if m < 4:
        raise InvalidScenarioError(f"activation needs m >= 4, got {m}")
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"visibility must lie in [0, 1], got {v}")
    alpha = float(alpha_closed_form(m))
    single = seesaw_best(ScenarioConfig.build(cfg.n, m, 1), seeds, max_iters, v, threads)
    multi = seesaw_best(ScenarioConfig.build(cfg.n, m, m // 2), seeds, max_iters, v, threads)
    result = ActivationResult(
        m=m,
        n=cfg.n,
        v=v,
        alpha=alpha,
        delta_single=single.delta,
        delta_multi=multi.delta,
        violated_single=single.delta > alpha + VIOLATION_SLACK,
        violated_multi=multi.delta > alpha + VIOLATION_SLACK,
    )
    logger.info(f"Activation m={m}, v={v}: single={single.delta:.9g}, multi={multi.delta:.9g}, pair={result.as_pair()}")
    return result


def activation_window(cfg: ScenarioConfig, m: int, v_grid: Sequence[float],
                      seeds: Sequence[int] = tuple(range(20)), max_iters: int = 1000,
                      threads: int = 1) -> List[ActivationResult]:
    """Run the activation comparison along a grid and log the edges of any (False, True) window."""
    results = [activation_experiment(cfg, m, v, seeds, max_iters, threads) for v in sorted(v_grid)]
    window = [r.v for r in results if r.activated]
    if window:
        logger.info(f"Activation window for m={m}: v in [{min(window):.6g}, {max(window):.6g}]")
    else:
        logger.info(f"No activation window found for m={m} on the given grid")
    return results
