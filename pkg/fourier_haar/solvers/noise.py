from typing import Optional, Union

import numpy as np

from fourier_haar.errors import ParameterError


def add_noise(
    clean_y: np.ndarray, eta: float, seed: Optional[Union[int, np.random.Generator]] = None
) -> np.ndarray:
    """
    Adds noise e with ||e||_2 = eta exactly.

    e has i.i.d. complex Gaussian entries and is rescaled to norm eta, the
    boundary of the recovery constraint.

    Args:
        clean_y: Noise-free measurements.
        eta: Noise norm, >= 0.
        seed: Integer seed or Generator.

    Raises:
        ParameterError: If eta is negative.
    """
    if eta < 0:
        raise ParameterError(f"Noise bound must be nonnegative, got {eta}")
    clean_y = np.asarray(clean_y, dtype=complex)
    if eta == 0 or clean_y.size == 0:
        return clean_y.copy()

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    noise = rng.standard_normal(clean_y.shape) + 1j * rng.standard_normal(clean_y.shape)
    return clean_y + noise * (eta / np.linalg.norm(noise))
