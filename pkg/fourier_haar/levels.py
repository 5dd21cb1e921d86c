"""Sparsity-in-levels bookkeeping on Haar coefficient vectors."""

from typing import List, Optional, Union

import numpy as np

from fourier_haar.models import (
    CoefficientVector,
    LevelStructure,
    MagnitudeLaw,
    SparsityPattern,
)

SeedLike = Union[None, int, np.random.Generator]


def level_slice(c: CoefficientVector, j: int) -> np.ndarray:
    """
    Returns the entries of level j, i.e. 1-based indices {M_j + 1, ..., M_{j+1}}.

    Args:
        c: The coefficient vector.
        j: Level index, 0 <= j <= r - 1.

    Returns:
        A copy of the level segment.

    Raises:
        IndexError: If j is out of range.
    """
    return c.values[c.levels.level_range(j)].copy()


def level_sparsity(c: CoefficientVector, tol: float = 0.0) -> List[int]:
    """Counts the entries with modulus above tol in each level."""
    return [
        int(np.count_nonzero(np.abs(level_slice(c, j)) > tol))
        for j in range(c.levels.r)
    ]


def is_sparse_in_levels(c: CoefficientVector, k: SparsityPattern) -> bool:
    """Tests membership of c in Sigma_{k,M}."""
    k.check_compatible(c.levels)
    return all(count <= k_j for count, k_j in zip(level_sparsity(c), k.k))


def project_sparse_in_levels(
    c: CoefficientVector, k: SparsityPattern
) -> CoefficientVector:
    """
    Best (k, M)-term approximation of c in the l1 sense.

    Keeps the k_j largest-magnitude entries of each level and zeroes the rest.
    The l1 distance decouples over levels and coordinates, so per-level hard
    thresholding is the exact minimizer. Ties are broken by lowest index.

    Args:
        c: The coefficient vector.
        k: Per-level sparsities, one per level of c.

    Returns:
        The projected vector, an element of Sigma_{k,M}.
    """
    k.check_compatible(c.levels)
    projected = np.zeros(c.n, dtype=complex)

    for j, k_j in enumerate(k.k):
        if k_j == 0:
            continue
        level = c.levels.level_range(j)
        segment = c.values[level]
        keep = np.argsort(-np.abs(segment), kind="stable")[:k_j]
        projected[level.start + keep] = segment[keep]

    return CoefficientVector(values=projected, levels=c.levels)


def sigma_km(c: CoefficientVector, k: SparsityPattern) -> float:
    """Returns sigma_{k,M}(c)_1 = ||c - project_sparse_in_levels(c, k)||_1."""
    projected = project_sparse_in_levels(c, k)
    return float(np.sum(np.abs(c.values - projected.values)))


def random_sparse_in_levels(
    k: SparsityPattern,
    seed: SeedLike = None,
    magnitude_law: MagnitudeLaw = MagnitudeLaw.UNIT_MODULUS,
    levels: Optional[LevelStructure] = None,
) -> CoefficientVector:
    """
    Draws a vector with exactly k_j nonzeros in level j.

    Supports are uniform without replacement within each level; nonzero values
    follow magnitude_law. The result is a deterministic function of seed.

    Args:
        k: Per-level sparsities; also fixes r = len(k) unless levels is given.
        seed: Integer seed or an explicit numpy Generator.
        magnitude_law: Law of the nonzero entries.
        levels: Optional level structure, must agree with k.

    Returns:
        The generated coefficient vector.
    """
    levels = levels or k.levels
    k.check_compatible(levels)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    law = MagnitudeLaw(magnitude_law)

    values = np.zeros(levels.n, dtype=complex)
    for j, k_j in enumerate(k.k):
        if k_j == 0:
            continue
        level = levels.level_range(j)
        support = level.start + rng.choice(levels.level_size(j), size=k_j, replace=False)
        values[np.sort(support)] = _draw_values(rng, k_j, law)

    return CoefficientVector(values=values, levels=levels)


def _draw_values(rng: np.random.Generator, size: int, law: MagnitudeLaw) -> np.ndarray:
    if law == MagnitudeLaw.UNIT_MODULUS:
        return np.exp(2j * np.pi * rng.random(size))
    if law == MagnitudeLaw.COMPLEX_GAUSSIAN:
        return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)
    if law == MagnitudeLaw.RANDOM_SIGN:
        return rng.choice([-1.0, 1.0], size=size).astype(complex)
    raise ValueError(f"Unsupported magnitude law: {law}")
