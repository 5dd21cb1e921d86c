"""
Frequency bands W_j, per-band measurement budgets and multilevel random
subsampling of the centred frequency grid.
"""

import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fourier_haar.errors import ParameterError, SizeError
from fourier_haar.models import SparsityPattern, dyadic_exponent

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = math.exp(-1)


class AllocationMode(str, Enum):
    """Where per-band budgets come from"""

    THEORY = "theory"
    EXPLICIT = "explicit"


class SamplingMode(str, Enum):
    """How the sampled frequencies are drawn"""

    MULTILEVEL = "multilevel"
    UNIFORM_GLOBAL = "uniform_global"


def build_bands(r: int) -> List[np.ndarray]:
    """
    Builds the frequency bands W_0, ..., W_{r-1}.

    W_0 = {0, 1} and W_j = {-2**j+1, ..., -2**(j-1)} U {2**(j-1)+1, ..., 2**j}.
    Each band is returned sorted ascending.

    Raises:
        ParameterError: If r < 1.
    """
    if r < 1:
        raise ParameterError(f"Number of levels must be >= 1, got {r}")
    bands = [np.array([0, 1])]
    for j in range(1, r):
        negative = np.arange(-(2**j) + 1, -(2 ** (j - 1)) + 1)
        positive = np.arange(2 ** (j - 1) + 1, 2**j + 1)
        bands.append(np.concatenate([negative, positive]))
    return bands


def band_of_frequency(omega):
    """Returns the band index j with omega in W_j (vectorized)."""
    omega_arr = np.asarray(omega, dtype=np.int64)
    magnitude = np.where(omega_arr >= 2, omega_arr - 1, np.where(omega_arr <= -1, -omega_arr, 0))
    band = np.where(magnitude > 0, np.floor(np.log2(np.maximum(magnitude, 1))) + 1, 0)
    band = band.astype(np.int64)
    return band if band.ndim else int(band)


def theory_weights(k: SparsityPattern) -> np.ndarray:
    """t_j = k_j + sum_{l != j} 2**(-|j-l|/2) k_l."""
    index = np.arange(k.r)
    decay = 2.0 ** (-np.abs(index[:, None] - index[None, :]) / 2)
    return decay @ k.as_array()


class AllocationParams(BaseModel):
    """
    Parameters of the per-band budget rule.

    Attributes:
        c_alloc: Scaling constant in front of the theory value.
        epsilon: Failure parameter in (0, e**-1].
        mode: THEORY evaluates the rule; EXPLICIT uses budgets as given.
        budgets: Explicit per-band budgets (EXPLICIT mode only).
    """

    model_config = ConfigDict(use_enum_values=False)

    c_alloc: float = Field(1.0, ge=0.0, description="Allocation constant C_alloc")
    epsilon: float = Field(DEFAULT_EPSILON, description="Failure parameter epsilon")
    mode: AllocationMode = Field(AllocationMode.THEORY, description="Budget source")
    budgets: Optional[List[int]] = Field(None, description="Explicit per-band budgets")

    @model_validator(mode="after")
    def _explicit_has_budgets(self) -> "AllocationParams":
        if self.mode == AllocationMode.EXPLICIT and self.budgets is None:
            raise ValueError("Explicit allocation mode requires budgets")
        return self


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon <= DEFAULT_EPSILON * (1 + 1e-12):
        raise ParameterError(f"epsilon must lie in (0, e^-1], got {epsilon}")


def allocate_budgets(k: SparsityPattern, params: AllocationParams, n: int) -> List[int]:
    """
    Computes the per-band measurement budgets m_0, ..., m_{r-1}.

    m_j = min(|W_j|, max(1 if t_j > 0 else 0, ceil(C_alloc t_j ln(1/eps) log2(n))))
    with t_j the theory weight. ln is used for epsilon and log2 for n; the base
    choice is absorbed by C_alloc.

    Args:
        k: Sparsity pattern with one entry per level.
        params: Allocation parameters.
        n: Dimension, must equal 2**len(k).

    Returns:
        Budgets per band.

    Raises:
        ParameterError: If epsilon is out of range or explicit budgets are invalid.
        SizeError: If n does not match the pattern.
    """
    r = dyadic_exponent(n)
    if r != k.r:
        raise SizeError(f"n = {n} has {r} levels, sparsity pattern has {k.r}")
    _check_epsilon(params.epsilon)
    sizes = [band.shape[0] for band in build_bands(r)]

    if params.mode == AllocationMode.EXPLICIT:
        budgets = [int(m_j) for m_j in params.budgets]
        _check_budgets(budgets, sizes)
        return budgets

    scale = params.c_alloc * -math.log(params.epsilon) * math.log2(n)
    budgets = []
    for t_j, size in zip(theory_weights(k), sizes):
        floor = 1 if t_j > 0 else 0
        # rounding guards against 8.000000001 style ceilings
        value = math.ceil(round(scale * float(t_j), 9))
        budgets.append(int(min(size, max(floor, value))))
    logger.debug(f"Allocated budgets {budgets} for k = {list(k.k)}")
    return budgets


def _check_budgets(budgets: List[int], sizes: List[int]) -> None:
    if len(budgets) != len(sizes):
        raise ParameterError(f"Expected {len(sizes)} budgets, got {len(budgets)}")
    for j, (m_j, size) in enumerate(zip(budgets, sizes)):
        if not 0 <= m_j <= size:
            raise ParameterError(f"Budget m_{j} = {m_j} outside [0, |W_{j}| = {size}]")


def derive_seed(*keys: int) -> int:
    """
    Derives a 64-bit seed from a tuple of nonnegative integer keys.

    Used to split a base seed into per-trial and per-purpose seeds.
    """
    sequence = np.random.SeedSequence([int(key) for key in keys])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def band_generator(seed: int, stream: int) -> np.random.Generator:
    """
    Counter-based stream for one band.

    Band j draws from Philox keyed by SeedSequence([seed, j]); the
    uniform-global baseline uses stream r.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


class BandPlan(BaseModel):
    """
    Sampling plan: bands, budgets and the drawn frequency set Omega.

    Attributes:
        r: Number of bands (n = 2**r).
        m: Number of sampled frequencies in each band.
        omega: Sampled frequencies, sorted ascending.
        seed: Seed the plan was drawn with.
        sampling_mode: Multilevel or uniform-global drawing.
    """

    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=1, le=30, description="Number of bands")
    m: List[int] = Field(..., description="Per-band budgets m_j")
    omega: List[int] = Field(..., description="Sorted sampled frequencies")
    seed: int = Field(0, ge=0, description="Seed used for drawing")
    sampling_mode: SamplingMode = Field(SamplingMode.MULTILEVEL)

    @model_validator(mode="after")
    def _consistent(self) -> "BandPlan":
        bands = build_bands(self.r)
        _check_budgets(self.m, [band.shape[0] for band in bands])
        omega = np.asarray(self.omega, dtype=np.int64)
        if np.any(np.diff(omega) <= 0):
            raise ValueError("omega must be strictly increasing")
        half = 2 ** (self.r - 1)
        if omega.size and (omega[0] <= -half or omega[-1] > half):
            raise ValueError(f"omega outside [{-half + 1}, {half}]")
        counts = np.bincount(band_of_frequency(omega), minlength=self.r) if omega.size else np.zeros(self.r)
        if list(map(int, counts)) != list(self.m):
            raise ValueError(f"Per-band counts {list(counts)} do not match budgets {self.m}")
        return self

    @classmethod
    def full(cls, r: int, seed: int = 0) -> "BandPlan":
        """Plan sampling every frequency."""
        bands = build_bands(r)
        omega = sorted(int(w) for band in bands for w in band)
        return cls(r=r, m=[band.shape[0] for band in bands], omega=omega, seed=seed)

    @property
    def n(self) -> int:
        return 2**self.r

    @property
    def bands(self) -> List[np.ndarray]:
        return build_bands(self.r)

    @property
    def total_m(self) -> int:
        return len(self.omega)

    @property
    def omega_by_band(self) -> List[List[int]]:
        """Omega_j for each band."""
        grouped: Dict[int, List[int]] = {j: [] for j in range(self.r)}
        for w in self.omega:
            grouped[band_of_frequency(w)].append(w)
        return [grouped[j] for j in range(self.r)]

    def to_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.model_dump(mode="json"), f, indent=2)
        return path

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "BandPlan":
        with open(path, "r") as f:
            return cls(**json.load(f))


def draw_omega(bands: List[np.ndarray], budgets: List[int], seed: int) -> BandPlan:
    """
    Draws Omega_j uniformly without replacement from each band W_j.

    Args:
        bands: Output of build_bands.
        budgets: m_j per band, 0 <= m_j <= |W_j|.
        seed: Nonnegative integer seed; band j uses its own Philox stream.

    Returns:
        The resulting BandPlan.

    Raises:
        ParameterError: If a budget is negative or exceeds its band.
    """
    _check_budgets([int(m_j) for m_j in budgets], [band.shape[0] for band in bands])
    omega: List[int] = []
    for j, (band, m_j) in enumerate(zip(bands, budgets)):
        if m_j == 0:
            continue
        picked = band_generator(seed, j).choice(band, size=int(m_j), replace=False, shuffle=False)
        omega.extend(int(w) for w in picked)
    return BandPlan(r=len(bands), m=[int(m_j) for m_j in budgets], omega=sorted(omega), seed=seed)


def uniform_global_plan(r: int, total_m: int, seed: int) -> BandPlan:
    """
    Baseline plan drawing total_m frequencies uniformly from the whole grid.

    The resulting per-band counts are recorded as m.

    Raises:
        ParameterError: If total_m is outside [0, 2**r].
    """
    n = 2**r
    if not 0 <= total_m <= n:
        raise ParameterError(f"Total budget {total_m} outside [0, {n}]")
    grid = np.arange(-n // 2 + 1, n // 2 + 1)
    picked = band_generator(seed, r).choice(grid, size=int(total_m), replace=False, shuffle=False)
    omega = np.sort(picked)
    counts = np.bincount(band_of_frequency(omega), minlength=r) if omega.size else np.zeros(r, dtype=int)
    return BandPlan(
        r=r,
        m=[int(c) for c in counts],
        omega=[int(w) for w in omega],
        seed=seed,
        sampling_mode=SamplingMode.UNIFORM_GLOBAL,
    )


def make_plan(
    k: SparsityPattern,
    params: AllocationParams,
    n: int,
    seed: int,
    sampling_mode: SamplingMode = SamplingMode.MULTILEVEL,
) -> BandPlan:
    """Allocates budgets and draws Omega; uniform-global keeps the same total m."""
    budgets = allocate_budgets(k, params, n)
    r = dyadic_exponent(n)
    if SamplingMode(sampling_mode) == SamplingMode.UNIFORM_GLOBAL:
        return uniform_global_plan(r, sum(budgets), seed)
    return draw_omega(build_bands(r), budgets, seed)
