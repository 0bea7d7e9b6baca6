"""
Report models.

This module contains the serializable results produced by the services:
classical bounds, quantum evaluations, certificates, sweeps, seesaw runs and
run manifests. All of them are pydantic models so they dump to JSON directly.
"""

from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

VIOLATION_SLACK = 1e-9


class ClassicalBoundReport(BaseModel):
    """The n-local bound alpha_m computed up to three independent ways."""

    m: int
    n: Optional[int] = None
    alpha_closed: int
    alpha_enumerated: int
    alpha_strategy_max: Optional[int] = None
    strategies_searched: int = 0
    agree: bool = False

    @model_validator(mode="after")
    def _fill_agree(self) -> "ClassicalBoundReport":
        values = {self.alpha_closed, self.alpha_enumerated}
        if self.alpha_strategy_max is not None:
            values.add(self.alpha_strategy_max)
        self.agree = len(values) == 1
        return self


class EvaluationReport(BaseModel):
    """Value of the inequality functional for one strategy."""

    n: int
    m: int
    copies: int
    per_i_values: List[float]
    signed_values: List[float] = Field(default_factory=list)
    delta: float
    classical_bound: float
    quantum_optimum: float
    ratio: float
    violated: bool

    @classmethod
    def from_values(
        cls,
        n: int,
        m: int,
        copies: int,
        signed_values: List[float],
        classical_bound: float,
        quantum_optimum: float,
    ) -> "EvaluationReport":
        """Fill the derived fields (delta, ratio, violated) from the signed J values."""
        per_i = [abs(j) for j in signed_values]
        delta = float(sum(value ** (1.0 / n) for value in per_i))
        return cls(
            n=n,
            m=m,
            copies=copies,
            per_i_values=per_i,
            signed_values=list(signed_values),
            delta=delta,
            classical_bound=classical_bound,
            quantum_optimum=quantum_optimum,
            ratio=delta / classical_bound if classical_bound else 0.0,
            violated=delta > classical_bound + VIOLATION_SLACK,
        )


class SosReport(BaseModel):
    """Numerical consequences of the sum-of-squares certificate."""

    n: int
    m: int
    omegas: List[List[float]]
    gamma: float
    delta_q: float
    slack_ok: bool
    tight: bool
    extended_regime: bool = False
    max_anticommutator: float = 0.0


class SweepPoint(BaseModel):
    v: float
    delta: float
    violated: bool


class SweepResult(BaseModel):
    """Delta along a visibility grid, with the bisection-refined threshold."""

    n: int
    m: int
    copies: int
    alpha: float
    grid: List[SweepPoint]
    critical_v: Optional[float] = None


class SeesawState(BaseModel):
    """Outcome of one (or the best of several) seesaw trajectories.

    The final observables and hub factors ride along unserialized; only
    scalar diagnostics and the delta history are dumped.
    """

    model_config = {"arbitrary_types_allowed": True}

    n: int
    m: int
    copies: int
    visibility: float = 1.0
    seed: int
    delta: float
    iterations: int
    converged: bool
    history: List[float] = Field(default_factory=list)
    observables: Any = Field(default=None, exclude=True)
    hub_factors: Any = Field(default=None, exclude=True)


class ActivationResult(BaseModel):
    """Single-copy versus multi-copy comparison at one visibility."""

    m: int
    n: int
    v: float
    alpha: float
    delta_single: float
    delta_multi: float
    violated_single: bool
    violated_multi: bool

    @property
    def activated(self) -> bool:
        return (not self.violated_single) and self.violated_multi

    def as_pair(self) -> Tuple[bool, bool]:
        return (self.violated_single, self.violated_multi)


class RunManifest(BaseModel):
    """Provenance record written next to every exported file."""

    command: str
    parameters: Dict[str, Any]
    argv: List[str]
    version: str
    seed: Optional[int] = None
    timestamp: str
    outputs: List[str] = Field(default_factory=list)


class VerificationReport(BaseModel):
    """Bundle of named checks for one scenario."""

    n: int
    m: int
    checks: Dict[str, bool]
    skipped: List[str] = Field(default_factory=list)
    evaluation: EvaluationReport
    certificate: SosReport
    classical: ClassicalBoundReport

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed_checks(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]
