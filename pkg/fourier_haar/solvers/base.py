from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

from fourier_haar.models import CoefficientVector, complex_pairs
from fourier_haar.transforms import MeasurementOperator, haar_inverse


class SolverOptions(BaseModel):
    """
    Iteration and stopping parameters shared by the recovery solvers.

    Attributes:
        max_iter: Iteration cap; reaching it yields a non-converged result.
        tol_feas_rel: Relative feasibility tolerance (times ||y||_2).
        tol_feas_abs: Absolute feasibility tolerance.
        tol_gap: Relative objective change allowed over the stopping window.
        window: Number of iterations the objective change is measured over.
        tau: Primal step size.
        sigma: Dual step size; tau * sigma * ||A||**2 must stay below 1.
    """

    max_iter: int = Field(20000, ge=1, description="Maximum number of iterations")
    tol_feas_rel: float = Field(1e-9, ge=0.0, description="Relative feasibility tolerance")
    tol_feas_abs: float = Field(1e-12, ge=0.0, description="Absolute feasibility tolerance")
    tol_gap: float = Field(1e-8, ge=0.0, description="Relative objective change tolerance")
    window: int = Field(50, ge=1, description="Objective stopping window")
    tau: float = Field(0.99, gt=0.0, description="Primal step size")
    sigma: float = Field(0.99, gt=0.0, description="Dual step size")

    @model_validator(mode="after")
    def _step_sizes(self) -> "SolverOptions":
        # ||A||_2 <= 1 for a subsampled unitary operator
        if self.tau * self.sigma > 1.0:
            raise ValueError(f"tau * sigma must be <= 1, got {self.tau * self.sigma}")
        return self

    def feasibility_tolerance(self, y_norm: float) -> float:
        return self.tol_feas_rel * y_norm + self.tol_feas_abs


class RecoveryProblem(BaseModel):
    """
    min ||c||_1 subject to ||y - A c||_2 <= eta.

    Attributes:
        y: Measurement vector of length m.
        eta: Noise bound.
        operator: Fast measurement operator A.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    y: np.ndarray
    eta: float = Field(0.0, ge=0.0, description="Noise bound eta")
    operator: MeasurementOperator

    @field_validator("y", mode="before")
    @classmethod
    def _as_complex(cls, value) -> np.ndarray:
        array = np.array(value, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("Measurements must be finite")
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _length_matches(self) -> "RecoveryProblem":
        if self.y.shape[0] != self.operator.m:
            raise ValueError(
                f"Measurement vector of length {self.y.shape[0]}, operator has m = {self.operator.m}"
            )
        return self

    @property
    def n(self) -> int:
        return self.operator.n

    @property
    def y_norm(self) -> float:
        return float(np.linalg.norm(self.y))


class Certificate(BaseModel):
    """
    Approximate optimality check of a recovery result.

    Attributes:
        feasibility_violation: max(||y - A c||_2 - eta, 0).
        dual_violation: max(max_i |(A^* v)_i| - 1, 0) for the scaled dual v.
        sign_alignment_error: max over the support of |(A^* v)_i - sign(c_i)|.
        relative_gap: (||c||_1 - weak-duality lower bound from v) / ||c||_1.
        slackness_violation: max(eta - ||y - A c||_2, 0) for a nonzero c.
        dual_scale: Scale applied to the dual vector.
        support_size: Number of coefficients treated as nonzero.
        dual_source: Where the dual vector came from.
    """

    feasibility_violation: float
    dual_violation: float
    sign_alignment_error: float
    relative_gap: float
    slackness_violation: float
    dual_scale: float
    support_size: int
    dual_source: str

    @property
    def max_violation(self) -> float:
        return max(
            self.feasibility_violation,
            self.dual_violation,
            self.sign_alignment_error,
            self.relative_gap,
            self.slackness_violation,
        )


class RecoveryResult(BaseModel):
    """
    Output of a recovery solver.

    Attributes:
        c_hat: Recovered Haar coefficients.
        x_hat: Recovered signal Phi c_hat.
        iterations: Iterations performed.
        primal_residual: Feasibility surplus ||y - A c_hat||_2 - eta.
        residual_norm: ||y - A c_hat||_2.
        objective: ||c_hat||_1.
        certificate: Optimality certificate, if computed.
        converged: Whether the stopping criteria were met.
        solver: Name of the solver.
        dual: Final dual iterate in measurement space (not serialized).
        message: Diagnostic message.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    c_hat: CoefficientVector
    x_hat: np.ndarray
    iterations: int
    primal_residual: float
    residual_norm: float
    objective: float
    certificate: Optional[Certificate] = None
    converged: bool
    solver: str
    dual: Optional[np.ndarray] = Field(None, exclude=True)
    message: str = ""

    @field_serializer("x_hat")
    def _serialize_signal(self, value: np.ndarray) -> List[List[float]]:
        return complex_pairs(value)


class BaseSolver(ABC):
    """Abstract base class for quadratically constrained l1 solvers."""

    def __init__(self, options: Optional[SolverOptions] = None):
        self.options = options or SolverOptions()

    @abstractmethod
    def solve(self, problem: RecoveryProblem) -> RecoveryResult:
        """
        Solves min ||c||_1 s.t. ||y - A c||_2 <= eta.

        Args:
            problem: The recovery problem.

        Returns:
            The recovery result; non-convergence is reported, never raised.
        """
        pass

    @property
    @abstractmethod
    def name(self) -> str:
        """Returns the name of the solver."""
        pass

    @property
    def config(self) -> Dict[str, Any]:
        """Returns the configuration of the solver as a dictionary."""
        return self.options.model_dump()

    def _format_result(
        self,
        problem: RecoveryProblem,
        coefficients: np.ndarray,
        iterations: int,
        converged: bool,
        dual: Optional[np.ndarray] = None,
        message: str = "",
    ) -> RecoveryResult:
        """
        Packages a coefficient estimate into a RecoveryResult.

        Args:
            problem: The solved problem.
            coefficients: Final coefficient iterate.
            iterations: Iterations performed.
            converged: Whether the stopping rule fired.
            dual: Optional final dual iterate.
            message: Diagnostic message.
        """
        c_hat = CoefficientVector.from_array(coefficients)
        residual_norm = float(np.linalg.norm(problem.y - problem.operator.forward(c_hat.values)))
        return RecoveryResult(
            c_hat=c_hat,
            x_hat=haar_inverse(c_hat),
            iterations=iterations,
            primal_residual=residual_norm - problem.eta,
            residual_norm=residual_norm,
            objective=float(np.sum(np.abs(c_hat.values))),
            converged=converged,
            solver=self.name,
            dual=dual,
            message=message,
        )
