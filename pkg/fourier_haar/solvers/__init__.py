from fourier_haar.solvers.base import (
    BaseSolver,
    Certificate,
    RecoveryProblem,
    RecoveryResult,
    SolverOptions,
)
from fourier_haar.solvers.certificate import residual_certificate
from fourier_haar.solvers.noise import add_noise
from fourier_haar.solvers.primal_dual import PrimalDualSolver, solve_qcbp
from fourier_haar.solvers.subgradient import ProjectedSubgradientSolver, StepSchedule

__all__ = [
    "BaseSolver",
    "Certificate",
    "PrimalDualSolver",
    "ProjectedSubgradientSolver",
    "RecoveryProblem",
    "RecoveryResult",
    "SolverOptions",
    "StepSchedule",
    "add_noise",
    "residual_certificate",
    "solve_qcbp",
]
