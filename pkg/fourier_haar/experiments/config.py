import json
from pathlib import Path
from typing import Any, List, Optional, Union

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from fourier_haar.analysis import DEFAULT_PHASES, DEFAULT_WORK_CAP_LOG2, SearchMode
from fourier_haar.errors import ConfigError, SizeError
from fourier_haar.evaluation import DEFAULT_SUCCESS_THRESHOLD
from fourier_haar.models import LevelStructure, MagnitudeLaw, SparsityPattern, dyadic_exponent
from fourier_haar.sampling import DEFAULT_EPSILON, AllocationParams, SamplingMode
from fourier_haar.solvers.base import SolverOptions
from fourier_haar.transforms import DEFAULT_DENSE_LIMIT


class ExperimentConfig(BaseModel):
    """Configuration for audits, recovery trials and allocation sweeps"""

    # Problem settings
    n: int = Field(256, description="Signal dimension, a power of two")
    k: List[int] = Field(
        default_factory=lambda: [2, 2, 3, 4, 4, 3, 2, 1],
        description="Per-level sparsities, one per level",
    )
    magnitude_law: MagnitudeLaw = Field(
        MagnitudeLaw.UNIT_MODULUS, description="Law of the nonzero test coefficients"
    )

    # Sampling settings
    epsilon: float = Field(DEFAULT_EPSILON, description="Failure parameter in (0, e^-1]")
    c_alloc: float = Field(1.0, ge=0.0, description="Allocation constant for recover")
    c_alloc_sweep: List[float] = Field(
        default_factory=lambda: [0.0, 0.125, 0.25, 0.5, 1.0, 4.0],
        description="Allocation constants tried by sweep",
    )
    sampling_mode: SamplingMode = Field(
        SamplingMode.MULTILEVEL, description="Multilevel or uniform-global sampling"
    )

    # Trial settings
    trials: int = Field(50, ge=1, description="Trials per configuration")
    base_seed: int = Field(0, ge=0, description="Base seed all trial seeds derive from")
    eta_relative: float = Field(1e-6, ge=0.0, description="Noise bound as a fraction of ||y||_2")
    eta: Optional[float] = Field(None, ge=0.0, description="Absolute noise bound (overrides eta_relative)")
    success_threshold: float = Field(
        DEFAULT_SUCCESS_THRESHOLD, gt=0.0, description="Relative error counted as success"
    )
    solver: SolverOptions = Field(default_factory=SolverOptions)

    # Audit settings
    c_test: float = Field(0.5, gt=0.0, description="Constant used by the condition checks")
    search_mode: SearchMode = Field(SearchMode.EXTREME, description="k-tilde candidate search")
    lhs_bound: Optional[float] = Field(
        None, gt=0.0, description="Condition (ii) left-side bound; the decay-law value when unset"
    )
    phases: int = Field(DEFAULT_PHASES, ge=2, description="Phase grid density for exact K")
    dense_limit: int = Field(DEFAULT_DENSE_LIMIT, ge=2, description="Largest n for dense U")
    work_cap_log2: float = Field(DEFAULT_WORK_CAP_LOG2, gt=0.0, description="Exact K work cap (log2)")

    # Execution settings
    max_workers: int = Field(1, ge=1, description="Parallel trial workers")
    output_dir: str = Field("results", description="Directory for output files")

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        try:
            dyadic_exponent(value)
        except SizeError as e:
            raise ValueError(str(e)) from e
        return value

    @field_validator("epsilon")
    @classmethod
    def _epsilon_range(cls, value: float) -> float:
        if not 0.0 < value <= DEFAULT_EPSILON * (1 + 1e-12):
            raise ValueError(f"epsilon must lie in (0, e^-1], got {value}")
        return value

    @field_validator("c_alloc_sweep")
    @classmethod
    def _sweep_values(cls, value: List[float]) -> List[float]:
        if not value or any(c < 0 for c in value):
            raise ValueError("c_alloc_sweep must be a nonempty list of nonnegative values")
        return value

    @model_validator(mode="after")
    def _pattern_matches(self) -> "ExperimentConfig":
        r = dyadic_exponent(self.n)
        if len(self.k) != r:
            raise ValueError(f"k has {len(self.k)} entries, n = {self.n} has {r} levels")
        SparsityPattern(k=tuple(self.k))
        return self

    @property
    def levels(self) -> LevelStructure:
        return LevelStructure.from_dimension(self.n)

    @property
    def sparsity(self) -> SparsityPattern:
        return SparsityPattern(k=tuple(self.k))

    def allocation(self, c_alloc: Optional[float] = None) -> AllocationParams:
        return AllocationParams(
            c_alloc=self.c_alloc if c_alloc is None else c_alloc, epsilon=self.epsilon
        )

    def noise_bound(self, y_norm: float) -> float:
        return self.eta if self.eta is not None else self.eta_relative * y_norm

    @classmethod
    def _from_mapping(cls, config_dict: Any, file_path: Union[str, Path]) -> "ExperimentConfig":
        if config_dict is None:
            return cls()
        if not isinstance(config_dict, dict):
            raise ConfigError(
                f"Config {file_path} must hold a mapping at the top level, got {type(config_dict).__name__}"
            )
        return cls(**config_dict)

    @classmethod
    def from_json(cls, file_path: Union[str, Path]) -> "ExperimentConfig":
        """Load configuration from a JSON file"""
        with open(file_path, "r") as f:
            try:
                config_dict = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"Invalid JSON in {file_path}: {e}") from e
        return cls._from_mapping(config_dict, file_path)

    @classmethod
    def from_yaml(cls, file_path: Union[str, Path]) -> "ExperimentConfig":
        """Load configuration from a YAML file"""
        with open(file_path, "r") as f:
            try:
                config_dict = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"Invalid YAML in {file_path}: {e}") from e
        return cls._from_mapping(config_dict, file_path)

    @classmethod
    def from_file(cls, file_path: Union[str, Path]) -> "ExperimentConfig":
        """
        Load configuration from a .json, .yaml or .yml file.

        Raises:
            FileNotFoundError: If the file does not exist.
            ConfigError: On an unknown suffix or unparsable content.
            pydantic.ValidationError: On invalid field values.
        """
        path = Path(file_path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        suffix = path.suffix.lower()
        if suffix == ".json":
            return cls.from_json(path)
        if suffix in (".yaml", ".yml"):
            return cls.from_yaml(path)
        raise ConfigError(f"Unsupported config format '{suffix}', use .json or .yaml")

    def to_json(self, file_path: Union[str, Path]) -> Path:
        """Save configuration to a JSON file"""
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.model_dump(mode="json"), f, indent=2, sort_keys=True)
        return path

    def to_yaml(self, file_path: Union[str, Path]) -> None:
        """Save configuration to a YAML file"""
        with open(file_path, "w") as f:
            yaml.safe_dump(self.model_dump(mode="json"), f, sort_keys=False)

    @classmethod
    def get_default_config(cls) -> "ExperimentConfig":
        """Get default configuration"""
        return cls()
