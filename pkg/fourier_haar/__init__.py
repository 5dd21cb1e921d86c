"""Multilevel Fourier sampling and l1 recovery of signals sparse in the Haar basis."""

from fourier_haar.errors import (
    CapacityError,
    ConfigError,
    ConvergenceError,
    FourierHaarError,
    ParameterError,
    SizeError,
)
from fourier_haar.levels import (
    is_sparse_in_levels,
    level_slice,
    project_sparse_in_levels,
    random_sparse_in_levels,
    sigma_km,
)
from fourier_haar.models import CoefficientVector, LevelStructure, MagnitudeLaw, SparsityPattern
from fourier_haar.sampling import (
    AllocationParams,
    BandPlan,
    SamplingMode,
    allocate_budgets,
    build_bands,
    draw_omega,
)
from fourier_haar.transforms import (
    BuildMode,
    ChangeOfBasisMatrix,
    MeasurementOperator,
    apply_adjoint,
    apply_measurement,
    build_U,
    dft_forward,
    dft_inverse,
    fourier_haar_entry,
    haar_forward,
    haar_inverse,
)

__version__ = "0.1.0"
