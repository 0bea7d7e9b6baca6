"""
Scenario and run-settings models.

This module contains the validated input models: one member of the
inequality family (ScenarioConfig) and the process-wide run settings.
"""

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from ..exceptions import InvalidScenarioError

DEFAULT_MAX_STATES = 2 ** 24
DEFAULT_SEEDS = 20


class ScenarioConfig(BaseModel):
    """Star network with n edge parties, m binary settings each.

    copies_per_link defaults to floor(m/2) Bell pairs per link, the
    dimension on which m mutually anticommuting observables fit.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    m: int
    copies_per_link: Optional[int] = None

    @field_validator("n")
    @classmethod
    def _check_n(cls, value: int) -> int:
        if value < 2:
            raise ValueError(f"n must be >= 2, got {value}")
        return value

    @field_validator("m")
    @classmethod
    def _check_m(cls, value: int) -> int:
        if value < 2:
            raise ValueError(f"m must be >= 2, got {value}")
        return value

    @model_validator(mode="before")
    @classmethod
    def _default_copies(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("copies_per_link") is None and isinstance(data.get("m"), int):
            data = {**data, "copies_per_link": max(data["m"] // 2, 1)}
        return data

    @field_validator("copies_per_link")
    @classmethod
    def _check_copies(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError(f"copies_per_link must be >= 1, got {value}")
        return value

    @property
    def copies(self) -> int:
        return int(self.copies_per_link)

    @property
    def num_terms(self) -> int:
        """Number of hub settings, 2^(m-1)."""
        return 2 ** (self.m - 1)

    @property
    def full_copies(self) -> bool:
        """True when every link carries floor(m/2) copies."""
        return self.copies == self.m // 2

    @classmethod
    def build(cls, n: int, m: int, copies: Optional[int] = None) -> "ScenarioConfig":
        """Construct a scenario, translating validation errors to InvalidScenarioError."""
        try:
            return cls(n=n, m=m, copies_per_link=copies)
        except ValidationError as e:
            raise InvalidScenarioError(f"invalid scenario (n={n}, m={m}, copies={copies}): {e}") from e


class RunSettings(BaseModel):
    """Process-wide knobs resolved from the environment and CLI flags."""

    threads: int = 1
    max_states: int = DEFAULT_MAX_STATES
    seeds: int = DEFAULT_SEEDS
    log_level: str = "INFO"
    out_dir: str = "."
    host: str = "0.0.0.0"
    port: int = 8080

    @field_validator("threads", "seeds")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value
