"""
Coherence and sparsity analysis of the Fourier-Haar change-of-basis matrix.

Computes local coherences, block spectral norms and relative sparsities, the
fitted constants of their decay laws, and checks the two sufficient recovery
conditions for a given set of per-band budgets.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer

from fourier_haar.errors import CapacityError, ConvergenceError, SizeError
from fourier_haar.models import SparsityPattern, dyadic_exponent
from fourier_haar.sampling import build_bands, theory_weights
from fourier_haar.transforms import ChangeOfBasisMatrix, MeasurementOperator

logger = logging.getLogger(__name__)

DEFAULT_PHASES = 16
DEFAULT_WORK_CAP_LOG2 = 24.0


class SearchMode(str, Enum):
    """Candidate generation over the k-tilde polytope"""

    EXTREME = "extreme"
    GRID = "grid"


def _decay_matrix(r: int) -> np.ndarray:
    index = np.arange(r)
    return 2.0 ** (-np.abs(index[:, None] - index[None, :]) / 2)


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


class CoherenceProfile(BaseModel):
    """
    Local coherence and sparsity profile of U for one sparsity pattern.

    Attributes:
        n: Dimension.
        k: Sparsity pattern the relative sparsities were computed for.
        mu_block: r x r matrix of max squared entry moduli of each block U_jl.
        mu_local: r x r local coherences mu(j,l).
        block_norm: r x r spectral norms of U_jl.
        K: Relative sparsities K_j.
        K_exact: True if K comes from enumeration, False if it is the block-norm bound.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int
    k: List[int]
    mu_block: np.ndarray
    mu_local: np.ndarray
    block_norm: np.ndarray
    K: np.ndarray
    K_exact: bool = Field(..., description="Whether K was enumerated exactly")

    @property
    def r(self) -> int:
        return len(self.k)

    @field_serializer("mu_block", "mu_local", "block_norm", "K")
    def _serialize_array(self, value: np.ndarray) -> list:
        return np.asarray(value, dtype=float).tolist()


def local_coherences(U: ChangeOfBasisMatrix):
    """
    Computes mu(U_jl) and the local coherences mu(j,l).

    mu(U_jl) = max |entry|**2 over block (j,l);
    mu(j,l) = sqrt(mu(U_jl)) * max_l' sqrt(mu(U_jl')).

    Returns:
        (mu_block, mu_local) as r x r arrays.
    """
    r = U.r
    mu_block = np.zeros((r, r))
    for j in range(r):
        for l in range(r):
            mu_block[j, l] = np.max(np.abs(U.block(j, l)) ** 2)
    root = np.sqrt(mu_block)
    mu_local = root * root.max(axis=1, keepdims=True)
    return mu_block, mu_local


def spectral_norm(matrix: np.ndarray, tol: float = 1e-10, max_squarings: int = 64) -> float:
    """
    Largest singular value by power iteration on the Gram matrix.

    The Gram matrix G (B^*B or BB^*, whichever is smaller) is repeatedly
    squared and renormalized, i.e. power iteration with exponents 2, 4, 8, ...
    applied to all start vectors at once. The deterministic start is the
    normalized all-ones vector; when it is orthogonal to the dominant
    eigenspace the largest column of the converged iterate is used instead.

    Raises:
        ConvergenceError: If the iterate has not settled after max_squarings.
    """
    matrix = np.asarray(matrix)
    if matrix.size == 0 or not np.any(matrix):
        return 0.0

    if matrix.shape[1] <= matrix.shape[0]:
        gram = matrix.conj().T @ matrix
    else:
        gram = matrix @ matrix.conj().T

    iterate = gram / np.linalg.norm(gram)
    residual = np.inf
    for squaring in range(max_squarings):
        following = iterate @ iterate
        following /= np.linalg.norm(following)
        residual = float(np.linalg.norm(following - iterate))
        iterate = following
        if residual <= tol:
            logger.debug(f"Power iteration settled after {squaring + 1} squarings")
            break
    else:
        raise ConvergenceError(
            f"Power iteration did not settle after {max_squarings} squarings",
            residual=residual,
        )

    start = np.ones(gram.shape[0]) / np.sqrt(gram.shape[0])
    vector = iterate @ start
    if np.linalg.norm(vector) < 1e-8:
        vector = iterate[:, np.argmax(np.linalg.norm(iterate, axis=0))]
    rayleigh = np.vdot(vector, gram @ vector).real / np.vdot(vector, vector).real
    return float(np.sqrt(max(rayleigh, 0.0)))


def block_norms(
    U: ChangeOfBasisMatrix, tol: float = 1e-10, max_squarings: int = 64
) -> np.ndarray:
    """Returns the r x r matrix of spectral norms ||U_jl||_2."""
    r = U.r
    norms = np.zeros((r, r))
    for j in range(r):
        for l in range(r):
            norms[j, l] = spectral_norm(U.block(j, l), tol=tol, max_squarings=max_squarings)
    return norms


def operator_norm(
    operator: MeasurementOperator, tol: float = 1e-10, max_iter: int = 1000
) -> float:
    """
    ||A||_2 of the fast measurement operator by power iteration on A^*A.

    Starts from the normalized all-ones vector and falls back to a ramp when
    A^*A annihilates it.

    Raises:
        ConvergenceError: If the estimate has not settled after max_iter steps.
    """
    if operator.m == 0:
        return 0.0

    n = operator.n
    vector = np.ones(n, dtype=complex) / np.sqrt(n)
    if np.linalg.norm(operator.forward(vector)) < 1e-12:
        vector = np.arange(1, n + 1, dtype=complex)
        vector /= np.linalg.norm(vector)

    estimate = 0.0
    for _ in range(max_iter):
        image = operator.adjoint(operator.forward(vector))
        size = np.linalg.norm(image)
        if size == 0.0:
            return 0.0
        following = float(np.vdot(vector, image).real)
        vector = image / size
        if abs(following - estimate) <= tol * max(following, 1.0):
            return float(np.sqrt(max(following, 0.0)))
        estimate = following
    raise ConvergenceError(
        f"Operator norm did not settle after {max_iter} iterations",
        residual=abs(following - estimate),
    )


# ---------------------------------------------------------------------------
# Relative sparsities
# ---------------------------------------------------------------------------


def _enumeration_work(U: ChangeOfBasisMatrix, k: SparsityPattern, phases: int) -> float:
    sizes = U.levels.sizes
    supports = sum(math.log2(math.comb(size, k_l)) for size, k_l in zip(sizes, k.k))
    return supports + max(k.total - 1, 0) * math.log2(phases)


def _band_indicator(U: ChangeOfBasisMatrix) -> np.ndarray:
    indicator = np.zeros((U.r, U.n))
    for j in range(U.r):
        indicator[j, U.row_indices(j)] = 1.0
    return indicator


def _support_maximum(
    columns: np.ndarray, indicator: np.ndarray, phases: int, chunk_log2: int = 16
) -> np.ndarray:
    """
    max over the phase grid of per-band energies ||P_{W_j} U_S z||**2.

    The first coordinate is fixed to 1 (a global phase does not change the
    energies); the remaining s-1 coordinates range over the P-th roots of unity.
    """
    s = columns.shape[1]
    roots = np.exp(2j * np.pi * np.arange(phases) / phases)
    free = s - 1
    tail = min(free, max(chunk_log2 // max(int(math.log2(phases)), 1), 1))
    head = free - tail

    if tail:
        tail_grid = np.indices((phases,) * tail).reshape(tail, -1)
    else:
        tail_grid = np.zeros((0, 1), dtype=np.int64)
    best = np.zeros(indicator.shape[0])
    for head_index in itertools.product(range(phases), repeat=head):
        z = np.empty((s, tail_grid.shape[1]), dtype=complex)
        z[0] = 1.0
        if head:
            z[1 : 1 + head] = roots[np.asarray(head_index)][:, None]
        if tail:
            z[1 + head :] = roots[tail_grid]
        energy = indicator @ (np.abs(columns @ z) ** 2)
        best = np.maximum(best, energy.max(axis=1))
    return best


def relative_sparsity_exact(
    U: ChangeOfBasisMatrix,
    k: SparsityPattern,
    phases: int = DEFAULT_PHASES,
    work_cap_log2: float = DEFAULT_WORK_CAP_LOG2,
    max_workers: int = 1,
) -> np.ndarray:
    """
    Relative sparsities K_j by enumeration.

    K_j = max over supports with k_l entries in level l and over z on that
    support with |z_i| = 1 of ||sum_l U_jl z^(l)||**2. The objective is convex,
    so the maximum over the polydisc lies on the torus, which is sampled by a
    uniform grid of `phases` phases per coordinate.

    Args:
        U: Dense change-of-basis matrix.
        k: Sparsity pattern.
        phases: Phase grid density per coordinate.
        work_cap_log2: Cap on log2 of the number of evaluated vectors.
        max_workers: Threads over supports; results are combined by max.

    Raises:
        CapacityError: If the enumeration exceeds the work cap; use
            relative_sparsity_bound instead.
    """
    k.check_compatible(U.levels)
    if k.total == 0:
        return np.zeros(U.r)

    work = _enumeration_work(U, k, phases)
    if work > work_cap_log2:
        raise CapacityError(
            f"Exact relative sparsity needs 2^{work:.1f} evaluations, cap is "
            f"2^{work_cap_log2:g}; use relative_sparsity_bound instead"
        )

    indicator = _band_indicator(U)
    level_choices = [
        list(itertools.combinations(range(U.n)[U.levels.level_range(l)], k_l))
        for l, k_l in enumerate(k.k)
    ]
    supports = [sum(choice, ()) for choice in itertools.product(*level_choices)]

    def evaluate(support) -> np.ndarray:
        return _support_maximum(U.entries[:, list(support)], indicator, phases)

    logger.debug(f"Enumerating {len(supports)} supports with {phases} phases")
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            results = list(executor.map(evaluate, supports))
    else:
        results = [evaluate(support) for support in supports]
    return np.max(np.vstack(results), axis=0)


def phase_grid_convergence(
    U: ChangeOfBasisMatrix,
    k: SparsityPattern,
    phases: int = DEFAULT_PHASES,
    work_cap_log2: float = DEFAULT_WORK_CAP_LOG2,
) -> Dict[str, object]:
    """Relative change of exact K when the phase grid density doubles."""
    coarse = relative_sparsity_exact(U, k, phases=phases, work_cap_log2=work_cap_log2)
    fine = relative_sparsity_exact(U, k, phases=2 * phases, work_cap_log2=work_cap_log2)
    scale = np.maximum(np.abs(fine), np.finfo(float).tiny)
    change = np.where(fine > 0, np.abs(fine - coarse) / scale, 0.0)
    return {
        "phases": phases,
        "coarse": coarse.tolist(),
        "fine": fine.tolist(),
        "relative_change": float(np.max(change)),
    }


class SparsityBound(BaseModel):
    """
    Upper bounds on the relative sparsities.

    Attributes:
        kl_bound: (sum_l ||U_jl||_2 sqrt(k_l))**2 per band.
        theory_bound: fit_constant * sum_l 2**(-|j-l|/2) k_l per band.
        fit_constant: block_norm_constant**2 * band_sum.
        block_norm_constant: max ||U_jl||_2 2**(|j-l|/2).
        band_sum: max_l sum_j 2**(-|j-l|/2).
    """

    kl_bound: List[float]
    theory_bound: List[float]
    fit_constant: float
    block_norm_constant: float
    band_sum: float


def relative_sparsity_bound(block_norm: np.ndarray, k: SparsityPattern) -> SparsityBound:
    """Bounds K_j through the block norms, then through their decay law."""
    block_norm = np.asarray(block_norm, dtype=float)
    if block_norm.shape != (k.r, k.r):
        raise SizeError(f"Block norm matrix {block_norm.shape} does not match r = {k.r}")

    kl_bound = (block_norm @ np.sqrt(k.as_array())) ** 2
    c_b = float(np.max(block_norm / _decay_matrix(k.r)))
    band_sum = geometric_band_sum(k.r)
    fit = c_b**2 * band_sum
    return SparsityBound(
        kl_bound=kl_bound.tolist(),
        theory_bound=(fit * theory_weights(k)).tolist(),
        fit_constant=fit,
        block_norm_constant=c_b,
        band_sum=band_sum,
    )


def compute_profile(
    U: ChangeOfBasisMatrix,
    k: SparsityPattern,
    exact: Optional[bool] = None,
    phases: int = DEFAULT_PHASES,
    work_cap_log2: float = DEFAULT_WORK_CAP_LOG2,
    max_workers: int = 1,
) -> CoherenceProfile:
    """
    Builds the full profile of U for pattern k.

    Args:
        exact: True forces enumeration, False uses the block-norm bound, None
            enumerates when the work cap allows it.
    """
    k.check_compatible(U.levels)
    mu_block, mu_local = local_coherences(U)
    norms = block_norms(U)

    use_exact = exact
    if exact is None:
        use_exact = _enumeration_work(U, k, phases) <= work_cap_log2
    if use_exact:
        K = relative_sparsity_exact(
            U, k, phases=phases, work_cap_log2=work_cap_log2, max_workers=max_workers
        )
    else:
        K = np.asarray(relative_sparsity_bound(norms, k).kl_bound)

    logger.info(f"Computed coherence profile for n = {U.n} ({'exact' if use_exact else 'bound'} K)")
    return CoherenceProfile(
        n=U.n,
        k=list(k.k),
        mu_block=mu_block,
        mu_local=mu_local,
        block_norm=norms,
        K=K,
        K_exact=bool(use_exact),
    )


# ---------------------------------------------------------------------------
# Decay constants
# ---------------------------------------------------------------------------


def geometric_band_sum(r: int) -> float:
    """max_l sum_j 2**(-|j-l|/2); below 1 + 2 / (sqrt(2) - 1) for every r."""
    return float(np.max(_decay_matrix(r).sum(axis=0)))


def coherence_decay_constant(profile: CoherenceProfile) -> float:
    """max mu(j,l) 2**j 2**(|j-l|/2)."""
    r = profile.r
    scale = (2.0 ** np.arange(r))[:, None] / _decay_matrix(r)
    return float(np.max(profile.mu_local * scale))


def block_norm_constant(profile: CoherenceProfile) -> float:
    """max ||U_jl||_2 2**(|j-l|/2)."""
    return float(np.max(profile.block_norm / _decay_matrix(profile.r)))


def entry_decay_constant(U: ChangeOfBasisMatrix) -> float:
    """max over blocks and entries of |U_jl entry| 2**(j/2) 2**(|j-l|/2)."""
    r = U.r
    constant = 0.0
    for j in range(r):
        for l in range(r):
            peak = np.max(np.abs(U.block(j, l)))
            constant = max(constant, float(peak * 2.0 ** (j / 2) * 2.0 ** (abs(j - l) / 2)))
    return constant


def allocation_implies_condition_i(profile: CoherenceProfile, k: SparsityPattern) -> Dict[str, object]:
    """
    Ratio of the condition (i) requirement to the allocation weight, per band.

    ratio_j = |W_j| sum_l mu(j,l) k_l / (k_j + sum_{l != j} 2**(-|j-l|/2) k_l);
    bands with zero weight get ratio 0.
    """
    sizes = np.array([band.shape[0] for band in build_bands(profile.r)], dtype=float)
    weights = theory_weights(k)
    demand = sizes * (profile.mu_local @ k.as_array())
    ratios = np.where(weights > 0, demand / np.where(weights > 0, weights, 1.0), 0.0)
    return {"ratios": ratios.tolist(), "max_ratio": float(np.max(ratios))}


def band_sine_bounds(r: int) -> Dict[int, bool]:
    """
    Checks 2**(j-r) <= |sin(pi omega / 2**r)| <= pi 2**(j-r) on every band j >= 1.

    Returns:
        Map from band index to whether the bound holds on the whole band.
    """
    results = {}
    for j, band in enumerate(build_bands(r)):
        if j == 0:
            continue
        sine = np.abs(np.sin(np.pi * band / 2**r))
        lower, upper = 2.0 ** (j - r), np.pi * 2.0 ** (j - r)
        results[j] = bool(np.all(sine >= lower * (1 - 1e-12)) and np.all(sine <= upper * (1 + 1e-12)))
    return results


# ---------------------------------------------------------------------------
# Recovery conditions
# ---------------------------------------------------------------------------


def _log_factor(epsilon: float, n: int) -> float:
    return -math.log(epsilon) * math.log2(n)


def _covers(m_j: float, need: float, size: int) -> bool:
    # relative slack absorbs rounding in products of coherences
    return bool(m_j >= need * (1 - 1e-9) or m_j >= size)


class ConditionIReport(BaseModel):
    """Per-band check of m_j >= C |W_j| (sum_l mu(j,l) k_l) ln(1/eps) log2(n)."""

    required: List[float]
    budgets: List[int]
    passed: List[bool]
    margin: List[Optional[float]] = Field(..., description="m_j / required_j; None if nothing is required")

    @property
    def all_passed(self) -> bool:
        return all(self.passed)


class ConditionIIReport(BaseModel):
    """
    Check of the second condition with the choice m-tilde = k-tilde.

    For every candidate k-tilde the budgets must cover C k-tilde_j ln(1/eps) log2(n),
    and sum_j (|W_j| - k-tilde_j) mu(j,l) must stay below lhs_bound for every l.

    The decay-law default of lhs_bound dominates sum_j |W_j| mu(j,l) for every
    profile, so with lhs_bound_source == "decay_law" only the budget part of
    the check can fail.
    """

    passed: bool
    vacuous: bool = False
    required: List[float] = Field(default_factory=list)
    budget_passed: List[bool] = Field(default_factory=list)
    lhs: List[float] = Field(default_factory=list)
    lhs_bound: Optional[float] = None
    lhs_bound_source: Optional[str] = Field(
        None, description="decay_law (always met) or given (supplied by the caller)"
    )
    worst_l: Optional[int] = None
    margin: Optional[float] = None
    tilde_k_used: List[List[float]] = Field(default_factory=list)


class ConditionReport(BaseModel):
    condition_i: ConditionIReport
    condition_ii: ConditionIIReport

    @property
    def passed(self) -> bool:
        return self.condition_i.all_passed and self.condition_ii.passed


def _check_budget_count(budgets: Sequence[int], r: int) -> None:
    if len(budgets) != r:
        raise SizeError(f"Expected {r} band budgets, got {len(budgets)}")


def check_condition_i(
    profile: CoherenceProfile,
    budgets: Sequence[int],
    epsilon: float,
    n: int,
    c_test: float = 1.0,
) -> ConditionIReport:
    """
    Evaluates the first recovery condition band by band.

    A fully sampled band (m_j = |W_j|) passes regardless of the requirement.
    """
    _check_budget_count(budgets, profile.r)
    sizes = [band.shape[0] for band in build_bands(profile.r)]
    k = np.asarray(profile.k, dtype=float)
    factor = _log_factor(epsilon, n)

    required, passed, margin = [], [], []
    for j, (m_j, size) in enumerate(zip(budgets, sizes)):
        need = float(c_test * size * (profile.mu_local[j] @ k) * factor)
        required.append(need)
        if need <= 0.0:
            passed.append(True)
            margin.append(None)
            continue
        passed.append(_covers(m_j, need, size))
        margin.append(m_j / need)
    return ConditionIReport(required=required, budgets=list(budgets), passed=passed, margin=margin)


def _tilde_k_candidates(caps: np.ndarray, total: float, mode: SearchMode) -> List[np.ndarray]:
    r = caps.shape[0]
    candidates = [np.zeros(r)]
    for j in range(r):
        single = np.zeros(r)
        single[j] = min(caps[j], total)
        candidates.append(single)

    if mode == SearchMode.GRID:
        for j in range(r):
            for fraction in (0.25, 0.5, 0.75):
                point = np.zeros(r)
                point[j] = fraction * min(caps[j], total)
                candidates.append(point)
        candidates.append(np.minimum(caps, total / r))
    else:
        # vertices: a few bands at their caps plus one band taking the rest
        for size in range(1, min(r, 3) + 1):
            for capped in itertools.combinations(range(r), size):
                used = float(caps[list(capped)].sum())
                if used > total:
                    continue
                base = np.zeros(r)
                base[list(capped)] = caps[list(capped)]
                candidates.append(base)
                for f in range(r):
                    if f in capped:
                        continue
                    point = base.copy()
                    point[f] = min(caps[f], total - used)
                    candidates.append(point)

    unique = {tuple(np.round(c, 12)) for c in candidates}
    return [np.array(c) for c in sorted(unique)]


def check_condition_ii(
    profile: CoherenceProfile,
    budgets: Sequence[int],
    k: SparsityPattern,
    epsilon: float,
    n: int,
    c_test: float = 1.0,
    search: SearchMode = SearchMode.EXTREME,
    lhs_bound: Optional[float] = None,
) -> ConditionIIReport:
    """
    Evaluates the second recovery condition over candidate k-tilde vectors.

    Candidates lie in {0 <= k-tilde_j <= K_j, sum_j k-tilde_j <= sum_j k_j}.
    With m-tilde = k-tilde the left side of the inequality becomes
    sum_j (|W_j| - k-tilde_j) mu(j,l), extended continuously to k-tilde_j = 0.

    Args:
        lhs_bound: Largest admissible left side; defaults to
            2 * coherence_decay_constant(profile) * geometric_band_sum(r).
    """
    r = profile.r
    _check_budget_count(budgets, r)
    total = float(k.total)
    if total == 0:
        return ConditionIIReport(passed=True, vacuous=True)

    sizes = np.array([band.shape[0] for band in build_bands(r)], dtype=float)
    caps = np.minimum(np.asarray(profile.K, dtype=float), total)
    candidates = _tilde_k_candidates(caps, total, SearchMode(search))
    lhs_bound_source = "given"
    if lhs_bound is None:
        lhs_bound = 2.0 * coherence_decay_constant(profile) * geometric_band_sum(r)
        lhs_bound_source = "decay_law"

    worst_tilde = np.max(np.vstack(candidates), axis=0)
    factor = _log_factor(epsilon, n)
    required = c_test * worst_tilde * factor
    budgets_arr = np.asarray(budgets, dtype=float)
    budget_passed = [_covers(m_j, need, size) for m_j, need, size in zip(budgets_arr, required, sizes)]

    lhs = np.max(
        np.vstack([(sizes - tilde) @ profile.mu_local for tilde in candidates]), axis=0
    )
    worst_l = int(np.argmax(lhs))
    margin = float(lhs_bound / lhs[worst_l]) if lhs[worst_l] > 0 else None

    return ConditionIIReport(
        passed=all(budget_passed) and bool(lhs[worst_l] <= lhs_bound),
        required=required.tolist(),
        budget_passed=budget_passed,
        lhs=lhs.tolist(),
        lhs_bound=float(lhs_bound),
        lhs_bound_source=lhs_bound_source,
        worst_l=worst_l,
        margin=margin,
        tilde_k_used=[c.tolist() for c in candidates],
    )


def check_conditions(
    profile: CoherenceProfile,
    budgets: Sequence[int],
    k: SparsityPattern,
    epsilon: float,
    n: int,
    c_test: float = 1.0,
    search: SearchMode = SearchMode.EXTREME,
    lhs_bound: Optional[float] = None,
) -> ConditionReport:
    return ConditionReport(
        condition_i=check_condition_i(profile, budgets, epsilon, n, c_test),
        condition_ii=check_condition_ii(profile, budgets, k, epsilon, n, c_test, search, lhs_bound),
    )


class ErrorBoundTerms(BaseModel):
    """
    D and E of the recovery error bound, reading N_j - N_{j-1} as |W_j|.

    E = max_j |W_j| / m_j and D = 1 + sqrt(log2(6/eps)) / log2(4 E n sqrt(k)).
    Both are None when a band has no samples or k = 0.
    """

    budgets: List[int]
    band_sizes: List[int]
    k_total: int
    epsilon: float
    n: int
    E: Optional[float]
    D: Optional[float]


def error_bound_terms(budgets: Sequence[int], k_total: int, epsilon: float, n: int) -> ErrorBoundTerms:
    sizes = [int(band.shape[0]) for band in build_bands(dyadic_exponent(n))]
    _check_budget_count(budgets, len(sizes))
    E = D = None
    if all(m_j > 0 for m_j in budgets):
        E = max(size / m_j for size, m_j in zip(sizes, budgets))
        if k_total > 0:
            D = 1.0 + math.sqrt(math.log2(6.0 / epsilon)) / math.log2(4.0 * E * n * math.sqrt(k_total))
    return ErrorBoundTerms(
        budgets=list(budgets), band_sizes=sizes, k_total=k_total, epsilon=epsilon, n=n, E=E, D=D
    )
