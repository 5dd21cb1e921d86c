import logging
from enum import Enum
from typing import Optional

import numpy as np

from fourier_haar.solvers.base import BaseSolver, RecoveryProblem, RecoveryResult, SolverOptions
from fourier_haar.solvers.proximal import complex_sign, project_l2_ball

logger = logging.getLogger(__name__)


class StepSchedule(str, Enum):
    """Diminishing step-size rules"""

    SQRT = "sqrt"
    GEOMETRIC = "geometric"


class ProjectedSubgradientSolver(BaseSolver):
    """
    Slow reference solver: projected subgradient descent on ||c||_1 over
    {c : ||y - A c||_2 <= eta}.

    Every iterate is projected exactly onto the constraint set (A A^* = I) and
    the best iterate seen is returned. Intended as an independent check of
    PrimalDualSolver on small problems, with max_iter in the millions.

    Args:
        options: Only max_iter and the feasibility tolerances are used.
        step0: Initial step; defaults to ||y||_2 / n.
        schedule: SQRT uses step0 / sqrt(k + 1); GEOMETRIC decays step0 by
            final_ratio over the whole run.
        final_ratio: Ratio of last to first step for the geometric schedule.
        dense: Use the dense m x n matrix instead of the fast operator.
    """

    def __init__(
        self,
        options: Optional[SolverOptions] = None,
        step0: Optional[float] = None,
        schedule: StepSchedule = StepSchedule.GEOMETRIC,
        final_ratio: float = 1e-8,
        dense: bool = True,
    ):
        super().__init__(options)
        self.step0 = step0
        self.schedule = StepSchedule(schedule)
        self.final_ratio = final_ratio
        self.dense = dense

    @property
    def name(self) -> str:
        return "projected_subgradient"

    @property
    def config(self):
        config = super().config
        config.update(
            {"step0": self.step0, "schedule": self.schedule.value, "final_ratio": self.final_ratio}
        )
        return config

    def solve(self, problem: RecoveryProblem) -> RecoveryResult:
        operator, y, eta = problem.operator, problem.y, problem.eta
        max_iter = self.options.max_iter

        if self.dense:
            matrix = operator.matrix()
            hermitian = matrix.conj().T

            def forward(c: np.ndarray) -> np.ndarray:
                return matrix @ c

            def adjoint(w: np.ndarray) -> np.ndarray:
                return hermitian @ w

        else:
            forward, adjoint = operator.forward, operator.adjoint

        def project(c: np.ndarray) -> np.ndarray:
            image = forward(c)
            return c + adjoint(project_l2_ball(image, y, eta) - image)

        step0 = self.step0 if self.step0 is not None else max(problem.y_norm, 1e-300) / operator.n
        decay = self.final_ratio ** (1.0 / max_iter)

        c = project(adjoint(y))
        best, best_objective = c.copy(), float(np.sum(np.abs(c)))
        step = step0
        for k in range(max_iter):
            if self.schedule == StepSchedule.SQRT:
                step = step0 / np.sqrt(k + 1)
            c = project(c - step * complex_sign(c))
            objective = float(np.sum(np.abs(c)))
            if objective < best_objective:
                best, best_objective = c.copy(), objective
            if self.schedule == StepSchedule.GEOMETRIC:
                step *= decay

        surplus = float(np.linalg.norm(y - forward(best))) - eta
        feasible = surplus <= self.options.feasibility_tolerance(problem.y_norm)
        message = f"Ran {max_iter} subgradient steps, best objective {best_objective:.12g}"
        logger.debug(message)
        return self._format_result(problem, best, max_iter, feasible, message=message)
