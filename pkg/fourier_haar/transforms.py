"""
Discrete Haar transform, unitary DFT on the centred frequency grid, the
closed-form Fourier transform of the Haar atoms and the fast measurement
operator A = P_Omega F Phi.

Conventions:
    * Signals are complex numpy arrays indexed t = 0..n-1 with n = 2**r.
    * Frequencies are omega = -n/2+1, ..., n/2 and frequency vectors are stored
      in that ascending order (row = omega + n/2 - 1).
    * Fx(omega) = n**-0.5 * sum_{t=0}^{n-1} x(t) exp(+2 pi i omega t / n).
    * U has the Fourier transforms of the Haar atoms as its columns, ordered
      (psi, phi_00 | phi_10, phi_11 | ...).
"""

import csv
import logging
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import List, NamedTuple, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from fourier_haar.errors import CapacityError, SizeError
from fourier_haar.models import CoefficientVector, LevelStructure, dyadic_exponent
from fourier_haar.sampling import BandPlan, build_bands

logger = logging.getLogger(__name__)

SignalVector = np.ndarray
ArrayLike = Union[np.ndarray, List[complex], List[float]]

DEFAULT_DENSE_LIMIT = 4096
_SQRT_HALF = np.sqrt(0.5)


class BuildMode(str, Enum):
    """How the dense change-of-basis matrix is assembled"""

    ANALYTIC = "analytic"
    BRUTE_FORCE = "brute_force"


class HaarAtom(NamedTuple):
    """Identifies the Haar atom behind a coefficient index."""

    level: int
    translation: int
    is_scaling: bool

    @classmethod
    def from_column(cls, column: int, r: int) -> "HaarAtom":
        if not 0 <= column < 2**r:
            raise IndexError(f"Column {column} outside [0, {2**r})")
        if column == 0:
            return cls(level=0, translation=0, is_scaling=True)
        level = int(column).bit_length() - 1
        return cls(level=level, translation=column - 2**level, is_scaling=False)


# ---------------------------------------------------------------------------
# Haar transform
# ---------------------------------------------------------------------------


def _as_signal(x: ArrayLike) -> np.ndarray:
    array = np.asarray(x)
    dyadic_exponent(array.shape[0] if array.ndim else 0)
    return array.astype(np.result_type(array, np.float64), copy=False)


def _haar_analysis(x: np.ndarray) -> np.ndarray:
    """Averaging/differencing pyramid along axis 0; returns Phi^* x."""
    approx = x
    details = []
    while approx.shape[0] > 1:
        even, odd = approx[0::2], approx[1::2]
        details.append((even - odd) * _SQRT_HALF)
        approx = (even + odd) * _SQRT_HALF
    return np.concatenate([approx] + details[::-1], axis=0)


def _haar_synthesis(c: np.ndarray) -> np.ndarray:
    """Inverse pyramid along axis 0; returns Phi c."""
    approx = c[:1]
    size = 1
    while size < c.shape[0]:
        detail = c[size : 2 * size]
        out = np.empty((2 * size,) + c.shape[1:], dtype=np.result_type(approx, detail))
        out[0::2] = (approx + detail) * _SQRT_HALF
        out[1::2] = (approx - detail) * _SQRT_HALF
        approx = out
        size *= 2
    return approx


def haar_forward(x: ArrayLike) -> CoefficientVector:
    """
    Computes c = Phi^* x in O(n).

    Args:
        x: Signal of length 2**r.

    Returns:
        Coefficients ordered (<x,psi>, <x,phi_00> | <x,phi_10>, <x,phi_11> | ...).

    Raises:
        SizeError: If the length is not a power of two >= 2.
    """
    signal = _as_signal(x)
    if signal.ndim != 1:
        raise SizeError(f"Expected a 1-D signal, got shape {signal.shape}")
    return CoefficientVector.from_array(_haar_analysis(signal))


def haar_inverse(c: Union[CoefficientVector, ArrayLike]) -> SignalVector:
    """
    Computes x = Phi c in O(n).

    Raises:
        SizeError: If the length is not a power of two >= 2.
    """
    values = c.values if isinstance(c, CoefficientVector) else _as_signal(c)
    if values.ndim != 1:
        raise SizeError(f"Expected a 1-D coefficient vector, got shape {values.shape}")
    return _haar_synthesis(values)


def haar_matrix(r: int) -> np.ndarray:
    """
    Dense Phi with the Haar atoms as columns, built from the atom definitions.

    psi(t) = 2**(-r/2); phi_{j,p} equals +2**((j-r)/2) on [p 2**(r-j), (p+1/2) 2**(r-j))
    and -2**((j-r)/2) on [(p+1/2) 2**(r-j), (p+1) 2**(r-j)).
    """
    n = 2**r
    phi = np.zeros((n, n))
    phi[:, 0] = 2.0 ** (-r / 2)
    for j in range(r):
        width = 2 ** (r - j)
        amplitude = 2.0 ** ((j - r) / 2)
        for p in range(2**j):
            start = p * width
            phi[start : start + width // 2, 2**j + p] = amplitude
            phi[start + width // 2 : start + width, 2**j + p] = -amplitude
    return phi


# ---------------------------------------------------------------------------
# Fourier transform on the centred grid
# ---------------------------------------------------------------------------


def frequency_grid(n: int) -> np.ndarray:
    """Returns omega = -n/2+1, ..., n/2 in storage order."""
    dyadic_exponent(n)
    return np.arange(-n // 2 + 1, n // 2 + 1)


def frequency_to_row(omega, n: int) -> np.ndarray:
    """
    Maps frequencies to storage rows (row = omega + n/2 - 1).

    Raises:
        IndexError: If any omega lies outside {-n/2+1, ..., n/2}.
    """
    dyadic_exponent(n)
    omega = np.asarray(omega, dtype=np.int64)
    if np.any(omega <= -n // 2) or np.any(omega > n // 2):
        raise IndexError(f"Frequency outside [{-n // 2 + 1}, {n // 2}] for n = {n}")
    return omega + n // 2 - 1


@lru_cache(maxsize=32)
def _fft_index(n: int) -> np.ndarray:
    """FFT bin of each storage row: omega mod n. Read-only after construction."""
    index = frequency_grid(n) % n
    index.setflags(write=False)
    return index


def dft_forward(x: ArrayLike) -> np.ndarray:
    """
    Unitary DFT with the +i convention, indexed by omega = -n/2+1..n/2.

    The positive exponent makes numpy's inverse FFT (orthonormal scaling) the
    forward transform; the output is reshuffled from FFT bins into centred
    order.

    Raises:
        SizeError: If the length is not a power of two >= 2.
    """
    signal = _as_signal(x)
    return np.fft.ifft(signal, axis=0, norm="ortho")[_fft_index(signal.shape[0])]


def dft_inverse(y: ArrayLike) -> SignalVector:
    """Returns F^* y for a centred frequency vector y."""
    spectrum = _as_signal(y)
    n = spectrum.shape[0]
    bins = np.empty_like(spectrum, dtype=complex)
    bins[_fft_index(n)] = spectrum
    return np.fft.fft(bins, axis=0, norm="ortho")


def _check_frequencies(omega: np.ndarray, r: int) -> None:
    half = 2 ** (r - 1)
    if np.any(omega <= -half) or np.any(omega > half):
        raise IndexError(f"Frequency outside [{-half + 1}, {half}] for n = {2**r}")


def fourier_psi_entry(omega, r: int):
    """Fpsi(omega): 1 at omega = 0 and 0 elsewhere."""
    omega_arr = np.asarray(omega, dtype=np.int64)
    _check_frequencies(omega_arr, r)
    values = np.where(omega_arr == 0, 1.0 + 0j, 0j)
    return values if values.ndim else complex(values)


def fourier_haar_entry(omega, l: int, p: int, r: int):
    """
    Closed-form Fphi_{l,p}(omega).

    Fphi_{l,p}(omega) = 2**(l/2 - r) e^{2 pi i omega p / 2**l}
                        (1 - e^{2 pi i omega / 2**(l+1)})**2 / (1 - e^{2 pi i omega / 2**r})

    for omega != 0, and 0 at omega = 0. Vectorized over omega.

    Args:
        omega: Frequency or array of frequencies in {-n/2+1, ..., n/2}.
        l: Level of the atom, 0 <= l <= r - 1.
        p: Translation, 0 <= p < 2**l.
        r: log2 of the dimension.

    Raises:
        IndexError: On an out-of-range frequency, level or translation.
    """
    if not 0 <= l < r:
        raise IndexError(f"Level {l} outside [0, {r - 1}]")
    if not 0 <= p < 2**l:
        raise IndexError(f"Translation {p} outside [0, {2**l})")

    omega_arr = np.asarray(omega, dtype=np.int64)
    _check_frequencies(omega_arr, r)
    values = _haar_spectrum(omega_arr, l, np.asarray(p, dtype=np.int64), r)
    return values if values.ndim else complex(values)


def _haar_spectrum(omega: np.ndarray, l: int, p: np.ndarray, r: int) -> np.ndarray:
    """
    Closed form with broadcasting between omega and p.

    Phases are reduced modulo their period before exponentiation.
    """
    nonzero = omega != 0
    safe = np.where(nonzero, omega, 1)

    half_turn = np.exp(2j * np.pi * (safe % 2 ** (l + 1)) / 2 ** (l + 1))
    denominator = 1.0 - np.exp(2j * np.pi * (safe % 2**r) / 2**r)
    base = 2.0 ** (l / 2 - r) * (1.0 - half_turn) ** 2 / denominator

    shift = np.exp(2j * np.pi * ((np.multiply(safe, p)) % 2**l) / 2**l)
    return np.where(nonzero, base * shift, 0j)


def fourier_haar_modulus(omega, l: int, r: int):
    """
    |Fphi_{l,p}(omega)| via 2**(l/2 - r + 1) sin^2(pi omega / 2**(l+1)) / |sin(pi omega / 2**r)|.

    Independent of the translation p; 0 at omega = 0.
    """
    if not 0 <= l < r:
        raise IndexError(f"Level {l} outside [0, {r - 1}]")
    omega_arr = np.asarray(omega, dtype=np.int64)
    _check_frequencies(omega_arr, r)

    safe = np.where(omega_arr != 0, omega_arr, 1).astype(float)
    modulus = (
        2.0 ** (l / 2 - r + 1)
        * np.sin(np.pi * safe / 2 ** (l + 1)) ** 2
        / np.abs(np.sin(np.pi * safe / 2**r))
    )
    values = np.where(omega_arr != 0, modulus, 0.0)
    return values if values.ndim else float(values)


# ---------------------------------------------------------------------------
# Dense change-of-basis matrix
# ---------------------------------------------------------------------------


class ChangeOfBasisMatrix(BaseModel):
    """
    Dense U = F Phi with rows omega = -n/2+1..n/2 and Haar-atom columns.

    Blocks U_jl restrict rows to band W_j and columns to level l.

    Attributes:
        entries: Complex n x n array (read-only).
        levels: Level structure of the columns.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray
    levels: LevelStructure

    @model_validator(mode="after")
    def _square(self) -> "ChangeOfBasisMatrix":
        n = self.levels.n
        if self.entries.shape != (n, n):
            raise SizeError(f"Expected a {n}x{n} matrix, got {self.entries.shape}")
        self.entries.setflags(write=False)
        return self

    @property
    def n(self) -> int:
        return self.levels.n

    @property
    def r(self) -> int:
        return self.levels.r

    @property
    def bands(self) -> List[np.ndarray]:
        return build_bands(self.r)

    def row_indices(self, j: int) -> np.ndarray:
        """Storage rows of band W_j."""
        self.levels.level_range(j)
        return frequency_to_row(self.bands[j], self.n)

    def block(self, j: int, l: int) -> np.ndarray:
        """Returns U_jl, rows ordered as in W_j."""
        return self.entries[np.ix_(self.row_indices(j), np.arange(self.n)[self.levels.level_range(l)])]

    def gram_error(self) -> float:
        """max |U^* U - I|."""
        gram = self.entries.conj().T @ self.entries
        return float(np.max(np.abs(gram - np.eye(self.n))))

    def to_csv(self, path: Union[str, Path]) -> Path:
        """
        Writes every entry as (j, l, omega, column, atom_level, translation,
        scaling, real, imag): band j, coefficient level l and the Haar atom of
        the column.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        atoms = [HaarAtom.from_column(column, self.r) for column in range(self.n)]
        levels = [self.levels.level_of(column) for column in range(self.n)]
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(
                ["j", "l", "omega", "column", "atom_level", "translation", "scaling", "real", "imag"]
            )
            for j, band in enumerate(self.bands):
                for omega, row in zip(band, frequency_to_row(band, self.n)):
                    for column, (atom, l) in enumerate(zip(atoms, levels)):
                        value = self.entries[row, column]
                        writer.writerow(
                            [
                                j,
                                l,
                                int(omega),
                                column,
                                atom.level,
                                atom.translation,
                                int(atom.is_scaling),
                                repr(float(value.real)),
                                repr(float(value.imag)),
                            ]
                        )
        logger.info(f"Wrote change-of-basis blocks to {path}")
        return path


def build_U(
    levels: LevelStructure,
    mode: BuildMode = BuildMode.ANALYTIC,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> ChangeOfBasisMatrix:
    """
    Assembles the dense change-of-basis matrix.

    Args:
        levels: Level structure (n = 2**r).
        mode: ANALYTIC fills entries from the closed form; BRUTE_FORCE applies
            the FFT to the dense Haar matrix.
        dense_limit: Largest n for which a dense matrix may be built.

    Returns:
        The matrix with rows in centred frequency order.

    Raises:
        CapacityError: If n exceeds dense_limit.
    """
    n, r = levels.n, levels.r
    if n > dense_limit:
        raise CapacityError(
            f"Dense U for n = {n} exceeds the dense limit {dense_limit}; "
            "use the fast MeasurementOperator instead"
        )

    mode = BuildMode(mode)
    if mode == BuildMode.BRUTE_FORCE:
        entries = np.fft.ifft(haar_matrix(r), axis=0, norm="ortho")[_fft_index(n)]
    else:
        omega = frequency_grid(n)
        entries = np.empty((n, n), dtype=complex)
        entries[:, 0] = fourier_psi_entry(omega, r)
        for l in range(r):
            p = np.arange(2**l)
            entries[:, 2**l : 2 ** (l + 1)] = _haar_spectrum(omega[:, None], l, p[None, :], r)

    logger.debug(f"Built {mode.value} U for n = {n}")
    return ChangeOfBasisMatrix(entries=np.ascontiguousarray(entries), levels=levels)


# ---------------------------------------------------------------------------
# Fast measurement operator
# ---------------------------------------------------------------------------


class MeasurementOperator:
    """
    A = P_Omega F Phi applied in O(n log n).

    forward: inverse Haar, DFT, keep rows Omega (sorted ascending).
    adjoint: zero-fill, inverse DFT, forward Haar.
    """

    def __init__(self, omega, n: int):
        self._r = dyadic_exponent(n)
        self._n = n
        omega = np.asarray(omega, dtype=np.int64)
        order = np.sort(omega)
        if np.unique(order).shape[0] != order.shape[0]:
            raise SizeError("Sampled frequencies must be distinct")
        self._omega = order
        self._bins = _fft_index(n)[frequency_to_row(order, n)]
        self._omega.setflags(write=False)
        self._bins.setflags(write=False)

    @classmethod
    def from_plan(cls, plan: BandPlan) -> "MeasurementOperator":
        return cls(plan.omega, plan.n)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return int(self._omega.shape[0])

    @property
    def omega(self) -> np.ndarray:
        return self._omega

    def forward(self, c: Union[CoefficientVector, np.ndarray]) -> np.ndarray:
        values = c.values if isinstance(c, CoefficientVector) else np.asarray(c)
        if values.shape[0] != self._n:
            raise SizeError(f"Coefficient vector of length {values.shape[0]}, operator n = {self._n}")
        signal = _haar_synthesis(values)
        return np.fft.ifft(signal, axis=0, norm="ortho")[self._bins]

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y)
        if y.shape[0] != self.m:
            raise SizeError(f"Measurement vector of length {y.shape[0]}, operator m = {self.m}")
        bins = np.zeros((self._n,) + y.shape[1:], dtype=complex)
        bins[self._bins] = y
        return _haar_analysis(np.fft.fft(bins, axis=0, norm="ortho"))

    def matrix(self) -> np.ndarray:
        """Dense m x n matrix P_Omega U, for small-n oracles."""
        return self.forward(np.eye(self._n, dtype=complex))

    def __repr__(self) -> str:
        return f"MeasurementOperator(n={self._n}, m={self.m})"


def apply_measurement(
    c: Union[CoefficientVector, np.ndarray],
    plan: BandPlan,
    operator: Optional[MeasurementOperator] = None,
) -> np.ndarray:
    """
    Computes y = P_Omega F Phi c.

    Raises:
        SizeError: If c and plan disagree on n.
    """
    operator = operator or MeasurementOperator.from_plan(plan)
    return operator.forward(c)


def apply_adjoint(
    y: np.ndarray, plan: BandPlan, operator: Optional[MeasurementOperator] = None
) -> np.ndarray:
    """Computes A^* y = Phi^* F^* P_Omega^T y."""
    operator = operator or MeasurementOperator.from_plan(plan)
    return operator.adjoint(y)
