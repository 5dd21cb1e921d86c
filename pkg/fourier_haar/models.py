from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

from fourier_haar.errors import SizeError


def dyadic_exponent(n: int) -> int:
    """
    Returns r such that n = 2**r.

    Args:
        n: A signal or coefficient length.

    Raises:
        SizeError: If n is not a power of two of at least 2.
    """
    n = int(n)
    if n < 2 or n & (n - 1):
        raise SizeError(f"Length must be a power of two >= 2, got {n}")
    return n.bit_length() - 1


def complex_pairs(values: np.ndarray) -> List[List[float]]:
    """Serializes a complex vector as [[re, im], ...] for JSON output."""
    values = np.asarray(values, dtype=complex)
    return [[float(v.real), float(v.imag)] for v in values]


class MagnitudeLaw(str, Enum):
    """Distributions for the nonzero entries of generated test signals"""

    UNIT_MODULUS = "unit_modulus"
    COMPLEX_GAUSSIAN = "complex_gaussian"
    RANDOM_SIGN = "random_sign"


class LevelStructure(BaseModel):
    """
    Dyadic partition of the Haar coefficient index space.

    Level 0 holds the scaling coefficient and the coarsest wavelet (2 entries);
    level j >= 1 holds the 2**j wavelets at scale j. Documentation uses the
    1-based ranges {M_j + 1, ..., M_{j+1}}; internally level j is the 0-based
    slice [M_j, M_{j+1}).

    Attributes:
        r: Number of levels, so that n = 2**r.
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"description": "Dyadic level boundaries M_j for n = 2**r"},
    )

    r: int = Field(..., ge=1, le=30, description="Number of levels (n = 2**r)")

    @classmethod
    def from_dimension(cls, n: int) -> "LevelStructure":
        """Builds the level structure for a vector of length n."""
        return cls(r=dyadic_exponent(n))

    @property
    def n(self) -> int:
        return 2**self.r

    @property
    def boundaries(self) -> List[int]:
        """M_0 = 0 and M_j = 2**j for j = 1..r."""
        return [0] + [2**j for j in range(1, self.r + 1)]

    @property
    def sizes(self) -> List[int]:
        return [self.level_size(j) for j in range(self.r)]

    def level_size(self, j: int) -> int:
        self._check_level(j)
        return 2 if j == 0 else 2**j

    def level_range(self, j: int) -> slice:
        """Returns the 0-based slice of level j."""
        self._check_level(j)
        bounds = self.boundaries
        return slice(bounds[j], bounds[j + 1])

    def level_of(self, index: int) -> int:
        """Returns the level containing the 0-based coefficient index."""
        if not 0 <= index < self.n:
            raise IndexError(f"Coefficient index {index} outside [0, {self.n})")
        return max(int(index).bit_length() - 1, 0)

    def _check_level(self, j: int) -> None:
        if not 0 <= j < self.r:
            raise IndexError(f"Level {j} outside [0, {self.r - 1}]")


class SparsityPattern(BaseModel):
    """
    Per-level sparsities k = (k_0, ..., k_{r-1}) of the sparsity-in-levels model.

    Attributes:
        k: Number of nonzeros allowed in each level.
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"description": "Per-level sparsities k_j"},
    )

    k: Tuple[int, ...] = Field(..., min_length=1, description="Per-level sparsities")

    @field_validator("k")
    @classmethod
    def _nonnegative(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(k_j < 0 for k_j in value):
            raise ValueError(f"Sparsities must be nonnegative, got {value}")
        return value

    @model_validator(mode="after")
    def _fits_levels(self) -> "SparsityPattern":
        for j, k_j in enumerate(self.k):
            size = 2 if j == 0 else 2**j
            if k_j > size:
                raise ValueError(f"k_{j} = {k_j} exceeds level size {size}")
        return self

    @property
    def r(self) -> int:
        return len(self.k)

    @property
    def total(self) -> int:
        return int(sum(self.k))

    @property
    def levels(self) -> LevelStructure:
        return LevelStructure(r=self.r)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.k, dtype=float)

    def check_compatible(self, levels: LevelStructure) -> None:
        """Raises SizeError if the pattern does not have one entry per level."""
        if self.r != levels.r:
            raise SizeError(
                f"Sparsity pattern has {self.r} levels, level structure has {levels.r}"
            )


class CoefficientVector(BaseModel):
    """
    Haar coefficients c = Phi^* x together with their level structure.

    Attributes:
        values: Complex vector of length 2**r (read-only).
        levels: The level structure the vector is partitioned by.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    levels: LevelStructure

    @field_validator("values", mode="before")
    @classmethod
    def _as_complex_array(cls, value) -> np.ndarray:
        array = np.array(value, dtype=complex).reshape(-1)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _length_matches(self) -> "CoefficientVector":
        if self.values.shape[0] != self.levels.n:
            raise ValueError(
                f"Coefficient vector of length {self.values.shape[0]} "
                f"does not match n = {self.levels.n}"
            )
        return self

    @classmethod
    def from_array(cls, values) -> "CoefficientVector":
        """Wraps an array, inferring the level structure from its length."""
        array = np.asarray(values).reshape(-1)
        return cls(values=array, levels=LevelStructure.from_dimension(array.shape[0]))

    @property
    def n(self) -> int:
        return self.levels.n

    @field_serializer("values")
    def _serialize_values(self, values: np.ndarray) -> List[List[float]]:
        return complex_pairs(values)
