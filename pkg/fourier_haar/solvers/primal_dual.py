import logging
from collections import deque
from typing import Optional

import numpy as np

from fourier_haar.solvers.base import BaseSolver, RecoveryProblem, RecoveryResult, SolverOptions
from fourier_haar.solvers.certificate import residual_certificate
from fourier_haar.solvers.proximal import project_l2_ball, project_onto_constraint, soft_threshold

logger = logging.getLogger(__name__)


class PrimalDualSolver(BaseSolver):
    """
    First-order primal-dual (Chambolle-Pock) solver for
    min ||c||_1 s.t. ||y - A c||_2 <= eta.

    The l1 term is handled by complex soft-thresholding and the constraint by
    the Moreau identity on the projection onto the ball around y. Fixed steps
    tau, sigma are valid because ||A||_2 <= 1.

    The iteration runs on (y, eta) scaled by 1 / ||y||_2, so solving (alpha y,
    alpha eta) returns alpha times the solution of (y, eta). Stopping is judged
    on the exact projection of each iterate onto the constraint set: it stops
    once the projected objective changes by at most tol_gap (relative) over
    the window.
    """

    @property
    def name(self) -> str:
        return "primal_dual"

    def solve(self, problem: RecoveryProblem) -> RecoveryResult:
        options = self.options
        operator, eta = problem.operator, problem.eta
        y_norm = problem.y_norm

        if y_norm <= eta:
            # zero is feasible and has objective 0
            c = np.zeros(operator.n, dtype=complex)
            return self._format_result(problem, c, 0, True, message="Zero is feasible")

        # iterate on (y, eta) / ||y||_2 so the fixed steps and tolerances are scale-free
        y, eta = problem.y / y_norm, eta / y_norm
        tau, sigma = options.tau, options.sigma

        c = np.zeros(operator.n, dtype=complex)
        v = np.zeros(operator.m, dtype=complex)
        image = np.zeros(operator.m, dtype=complex)
        image_bar = np.zeros(operator.m, dtype=complex)
        history = deque(maxlen=options.window + 1)

        converged = False
        change = np.inf
        iteration = 0
        for iteration in range(1, options.max_iter + 1):
            # dual step: prox of sigma g^* by the Moreau identity
            shifted = v + sigma * image_bar
            v = shifted - sigma * project_l2_ball(shifted / sigma, y, eta)

            c_next = soft_threshold(c - tau * operator.adjoint(v), tau)
            image_next = operator.forward(c_next)
            image_bar = 2.0 * image_next - image
            c, image = c_next, image_next

            # exact projection of the iterate, A (c + A^*(target - image)) = target lies in the ball
            target = project_l2_ball(image, y, eta)
            projected = c + operator.adjoint(target - image)
            objective = float(np.sum(np.abs(projected)))
            history.append(objective)

            # zero is infeasible here, so a zero iterate never stops the loop
            if len(history) > options.window and np.any(c):
                previous = history[0]
                scale = max(abs(objective), abs(previous), np.finfo(float).tiny)
                change = abs(objective - previous) / scale
                if change <= options.tol_gap:
                    converged = True
                    break

        if converged:
            message = f"Converged after {iteration} iterations"
            logger.debug(message)
        else:
            message = (
                f"Reached max_iter = {options.max_iter} with relative objective change "
                f"{change:.3e} over the last {options.window} iterations"
            )
            logger.warning(message)

        c = project_onto_constraint(c, y, eta, operator) * y_norm
        return self._format_result(problem, c, iteration, converged, dual=-v, message=message)


def solve_qcbp(
    problem: RecoveryProblem, options: Optional[SolverOptions] = None
) -> RecoveryResult:
    """
    Solves the quadratically constrained basis pursuit problem in Haar coefficients.

    Args:
        problem: Measurements, noise bound and operator.
        options: Solver options; defaults are used when omitted.

    Returns:
        The recovery result with its optimality certificate attached.
    """
    result = PrimalDualSolver(options).solve(problem)
    return result.model_copy(update={"certificate": residual_certificate(result, problem)})
