import logging
from typing import List, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, lsqr

from fourier_haar.solvers.base import Certificate, RecoveryProblem, RecoveryResult
from fourier_haar.solvers.proximal import complex_sign

logger = logging.getLogger(__name__)

SUPPORT_TOL = 1e-6


def _support_fit(problem: RecoveryProblem, support: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Minimum-norm w with (A^* w)_S closest to sign(c_S), via LSQR."""
    operator = problem.operator
    n, m = operator.n, operator.m

    def matvec(w: np.ndarray) -> np.ndarray:
        return operator.adjoint(np.ravel(w))[support]

    def rmatvec(u: np.ndarray) -> np.ndarray:
        embedded = np.zeros(n, dtype=complex)
        embedded[support] = np.ravel(u)
        return operator.forward(embedded)

    restricted = LinearOperator((support.shape[0], m), matvec=matvec, rmatvec=rmatvec, dtype=complex)
    return lsqr(restricted, signs, atol=1e-14, btol=1e-14, iter_lim=10 * max(m, 1))[0]


def _dual_candidates(
    result: RecoveryResult,
    problem: RecoveryProblem,
    support: np.ndarray,
    signs: np.ndarray,
    residual: np.ndarray,
) -> List[Tuple[np.ndarray, str]]:
    candidates = []
    if support.shape[0] <= problem.operator.m:
        candidates.append((_support_fit(problem, support, signs), "support_fit"))
    if result.dual is not None:
        candidates.append((np.asarray(result.dual), "dual_iterate"))
    residual_norm = float(np.linalg.norm(residual))
    if problem.eta > 0 and residual_norm > 0:
        candidates.append((residual / residual_norm, "residual_direction"))
    if not candidates:
        candidates.append((_support_fit(problem, support, signs), "least_squares_fit"))
    return candidates


def _evaluate(
    w: np.ndarray,
    source: str,
    problem: RecoveryProblem,
    c: np.ndarray,
    support: np.ndarray,
    signs: np.ndarray,
    feasibility: float,
    slackness: float,
) -> Certificate:
    image = problem.operator.adjoint(w)
    on_support = image[support]
    energy = float(np.vdot(on_support, on_support).real)
    scale = max(float(np.vdot(on_support, signs).real) / energy, 0.0) if energy > 0 else 0.0
    v, image = scale * w, scale * image

    peak = float(np.max(np.abs(image))) if image.size else 0.0
    dual_violation = max(peak - 1.0, 0.0)
    alignment = float(np.max(np.abs(image[support] - signs)))

    # weak duality: every feasible c' has ||c'||_1 >= (Re<v, y> - eta ||v||_2) / max(1, ||A^* v||_inf)
    objective = float(np.sum(np.abs(c)))
    bound = (float(np.vdot(v, problem.y).real) - problem.eta * float(np.linalg.norm(v))) / max(peak, 1.0)
    relative_gap = max(objective - max(bound, 0.0), 0.0) / objective

    return Certificate(
        feasibility_violation=feasibility,
        dual_violation=dual_violation,
        sign_alignment_error=alignment,
        relative_gap=relative_gap,
        slackness_violation=slackness,
        dual_scale=scale,
        support_size=int(support.shape[0]),
        dual_source=source,
    )


def residual_certificate(result: RecoveryResult, problem: RecoveryProblem) -> Certificate:
    """
    Checks approximate optimality of result for min ||c||_1 s.t. ||y - A c||_2 <= eta.

    (a) feasibility: ||y - A c||_2 <= eta + tol.
    (b) a scaled dual vector v with A^* v in the subdifferential of ||.||_1 at
        c: |(A^* v)_i| <= 1 everywhere and (A^* v)_i = sign(c_i) on the support.
    (c) the duality gap of v: ||c||_1 minus the weak-duality lower bound
        (Re<v, y> - eta ||v||_2) / max(1, ||A^* v||_inf), relative to ||c||_1.
        For eta > 0 this vanishes only when y - A c = eta v / ||v||_2, so a
        feasible point that is not a minimizer always reports at least its
        relative suboptimality.
    (d) complementary slackness: a nonzero c needs ||y - A c||_2 = eta.

    Dual candidates are the minimum-norm fit of the support signs (when the
    support has at most m entries), the solver's dual iterate and, for
    eta > 0, the residual direction; a least-squares sign fit is used when none
    applies. Each is scaled by the least-squares match of A^* v to the signs on
    the support, and the candidate with the smallest worst violation is
    reported. Violations are reported, never raised.
    """
    c = result.c_hat.values
    operator = problem.operator
    peak = float(np.max(np.abs(c))) if c.size else 0.0
    support = np.flatnonzero(np.abs(c) > SUPPORT_TOL * peak) if peak > 0 else np.array([], dtype=int)
    signs = complex_sign(c[support])

    residual = problem.y - operator.forward(c)
    residual_norm = float(np.linalg.norm(residual))
    feasibility = max(residual_norm - problem.eta, 0.0)

    if support.shape[0] == 0:
        # c = 0 is optimal iff it is feasible
        return Certificate(
            feasibility_violation=feasibility,
            dual_violation=0.0,
            sign_alignment_error=0.0,
            relative_gap=0.0,
            slackness_violation=0.0,
            dual_scale=0.0,
            support_size=0,
            dual_source="none",
        )

    slackness = max(problem.eta - residual_norm, 0.0)
    certificates = [
        _evaluate(w, source, problem, c, support, signs, feasibility, slackness)
        for w, source in _dual_candidates(result, problem, support, signs, residual)
    ]
    best = min(certificates, key=lambda cert: cert.max_violation)
    logger.debug(
        f"Certificate from {best.dual_source}: dual {best.dual_violation:.2e}, "
        f"sign {best.sign_alignment_error:.2e}, gap {best.relative_gap:.2e}"
    )
    return best
