import math
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from fp_testing.errors import ConfigError
from fp_testing.hypotheses import parse_epsilon
from fp_testing.measure import ExactReal

TestName = Literal["subbasis", "amplify", "clopen", "bl_separated", "fsigma"]


class IntervalSpec(BaseModel):
    """One interval of a Bernoulli parameter set, endpoints as number tokens ("1/3", 0.25)."""

    model_config = ConfigDict(extra="forbid")

    lo: str | float
    hi: str | float
    lo_closed: bool = True
    hi_closed: bool = True

    @model_validator(mode="after")
    def _ordered(self):
        lo, hi = _token(self.lo, "lo"), _token(self.hi, "hi")
        if not lo.is_rational or not hi.is_rational:
            raise ValueError("interval endpoints must be rational")
        if not 0 <= lo <= hi <= 1:
            raise ValueError(f"interval [{lo}, {hi}] must lie in [0, 1] with lo <= hi")
        return self


class CustomPair(BaseModel):
    model_config = ConfigDict(extra="forbid")

    h0: list[IntervalSpec] = Field(min_length=1)
    h1: list[IntervalSpec] = Field(min_length=1)


class TestParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: TestName
    alpha: float = 0.05
    # amplification margin; also the bound column's epsilon
    epsilon: float | None = None
    gamma: float | None = None
    N: int | None = None
    log_base: float = math.e
    max_pieces: int = 32
    merge_into: Literal[0, 1] | None = None

    @field_validator("alpha")
    @classmethod
    def _alpha(cls, v):
        if not v > 0:
            raise ValueError("alpha must be positive")
        return v

    @field_validator("epsilon")
    @classmethod
    def _epsilon(cls, v):
        if v is not None and not 0 < v < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        return v

    @field_validator("gamma")
    @classmethod
    def _gamma(cls, v):
        if v is not None and not v > 0:
            raise ValueError("gamma must be positive")
        return v

    @field_validator("N")
    @classmethod
    def _shift(cls, v):
        if v is not None and v < 1:
            raise ValueError("N must be at least 1")
        return v

    @field_validator("log_base")
    @classmethod
    def _log_base(cls, v):
        if not v > 1:
            raise ValueError("log_base must exceed 1")
        return v

    @field_validator("max_pieces")
    @classmethod
    def _max_pieces(cls, v):
        if v < 1:
            raise ValueError("max_pieces must be at least 1")
        return v


class SimConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pair: int | None = None
    custom: CustomPair | None = None
    # catalogue pair 5 gap half-width
    epsilon: str | float | None = None
    test: TestParams
    true_param: str | float
    n_grid: list[int] = Field(min_length=1)
    reps: int = 1000
    seed: int = 0
    out: Path | None = None
    workers: int = 1

    @field_validator("pair")
    @classmethod
    def _pair(cls, v):
        if v is not None and v not in range(1, 6):
            raise ValueError("pair must be one of 1..5")
        return v

    @field_validator("epsilon")
    @classmethod
    def _epsilon(cls, v):
        if v is not None:
            parse_epsilon(v)
        return v

    @field_validator("true_param")
    @classmethod
    def _true_param(cls, v):
        p = _token(v, "true_param")
        if not 0 <= p <= 1:
            raise ValueError("true_param must lie in [0, 1]")
        return v

    @field_validator("n_grid")
    @classmethod
    def _n_grid(cls, v):
        if v[0] < 1:
            raise ValueError("sample sizes must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return v

    @field_validator("reps")
    @classmethod
    def _reps(cls, v):
        if v < 1:
            raise ValueError("reps must be at least 1")
        return v

    @field_validator("seed")
    @classmethod
    def _seed(cls, v):
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v

    @field_validator("workers")
    @classmethod
    def _workers(cls, v):
        if v < 1:
            raise ValueError("workers must be at least 1")
        return v

    @model_validator(mode="after")
    def _one_pair(self):
        if (self.pair is None) == (self.custom is None):
            raise ValueError("exactly one of pair and custom must be given")
        if self.pair == 5 and self.epsilon is None:
            raise ValueError("pair 5 needs epsilon")
        return self

    @property
    def parameter(self) -> ExactReal:
        return _token(self.true_param, "true_param")


def _token(value, name: str) -> ExactReal:
    try:
        return ExactReal.of(str(value) if isinstance(value, float) else value)
    except (TypeError, ValueError) as e:
        raise ValueError(f"{name} is not a number token: {e}") from e


def _first_field(e: ValidationError) -> str | None:
    errors = e.errors()
    if not errors:
        return None
    return ".".join(str(part) for part in errors[0]["loc"]) or None


def parse_sim_config(data: dict) -> SimConfig:
    """Validate a config mapping, reporting the first offending field."""
    if not isinstance(data, dict):
        raise ConfigError("Config must be a mapping of SimConfig fields")
    try:
        return SimConfig.model_validate(data)
    except ValidationError as e:
        field = _first_field(e)
        message = e.errors()[0]["msg"] if e.errors() else str(e)
        raise ConfigError(f"Invalid config field {field}: {message}", field=field) from e


def load_sim_config(config_path: str | Path) -> SimConfig:
    """Load a simulation config from a YAML (or JSON) file"""
    config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    try:
        data = yaml.safe_load(config_path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing YAML file: {e}")
    return parse_sim_config(data)
