"""Proximal maps used by the recovery solvers."""

import numpy as np

from fourier_haar.transforms import MeasurementOperator


def complex_sign(values: np.ndarray) -> np.ndarray:
    """values / |values|, with 0 where values vanish."""
    magnitude = np.abs(values)
    return np.where(magnitude > 0, values / np.where(magnitude > 0, magnitude, 1.0), 0.0)


def soft_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    """
    Complex soft-thresholding: shrinks magnitudes by threshold, keeps phases.

    This is the proximal map of threshold * ||.||_1.
    """
    magnitude = np.abs(values)
    shrink = np.maximum(magnitude - threshold, 0.0)
    return complex_sign(values) * shrink


def project_l2_ball(values: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Projects onto {z : ||z - center||_2 <= radius}; radius 0 projects onto the center."""
    offset = values - center
    distance = np.linalg.norm(offset)
    if distance <= radius:
        return values.copy()
    if radius == 0.0:
        return np.array(center, dtype=complex, copy=True)
    return center + offset * (radius / distance)


def project_onto_constraint(
    c: np.ndarray, y: np.ndarray, eta: float, operator: MeasurementOperator
) -> np.ndarray:
    """
    Exact projection of c onto {c : ||y - A c||_2 <= eta}.

    Relies on A A^* = I, which holds for rows subsampled from a unitary matrix:
    the projection is c + A^*(P(A c) - A c) with P the projection onto the
    ball of radius eta around y.
    """
    image = operator.forward(c)
    target = project_l2_ball(image, y, eta)
    return c + operator.adjoint(target - image)
