"""
Symmetric Toeplitz matrices stored by their first column, with FFT matvecs
through a 2n circulant embedding.
"""
import functools
from typing import Optional, Tuple

import numpy as np
from scipy import fft

from src.exceptions import DomainError, ShapeMismatchError

# dense_expand is a debugging/test helper, not a solver path
DENSE_LIMIT = 4096

# spectra kept across operator builds; one per (order, level size) in practice
SPECTRUM_CACHE_SIZE = 64


class SymmetricToeplitz:
    """n x n symmetric Toeplitz matrix T[i, j] = t[|i - j|]."""

    def __init__(self, first_column: np.ndarray):
        column = np.ascontiguousarray(first_column, dtype=np.float64)
        if column.ndim != 1 or column.shape[0] < 1:
            raise DomainError("First column must be a non-empty 1-D array")
        column.flags.writeable = False
        self.first_column = column

    @property
    def n(self) -> int:
        return int(self.first_column.shape[0])

    def __repr__(self) -> str:
        return f"SymmetricToeplitz(n={self.n})"


class CirculantSpectrum:
    """Eigenvalues of the 2n circulant that embeds a symmetric Toeplitz matrix.

    The embedding is real and even, so the first n + 1 eigenvalues are the ones
    used with real transforms.
    """

    def __init__(self, eigenvalues: np.ndarray, n: int):
        eigenvalues = np.asarray(eigenvalues, dtype=np.complex128)
        if eigenvalues.shape != (2 * n,):
            raise ShapeMismatchError(
                f"Expected {2 * n} eigenvalues for n={n}, got {eigenvalues.shape[0]}"
            )
        eigenvalues.flags.writeable = False
        self.eigenvalues = eigenvalues
        self.n = n
        self.half = np.ascontiguousarray(eigenvalues[: n + 1])
        self.half.flags.writeable = False

    @property
    def size(self) -> int:
        return 2 * self.n

    @property
    def nbytes(self) -> int:
        return int(self.eigenvalues.nbytes + self.half.nbytes)


@functools.lru_cache(maxsize=SPECTRUM_CACHE_SIZE)
def _spectrum_of(n: int, column: bytes) -> CirculantSpectrum:
    t = np.frombuffer(column, dtype=np.float64)
    c = np.zeros(2 * n)
    c[:n] = t
    if n > 1:
        c[n + 1:] = t[:0:-1]
    return CirculantSpectrum(fft.fft(c), n)


def embed_circulant(toeplitz: SymmetricToeplitz) -> CirculantSpectrum:
    """Spectrum of the circulant with first column (t_0..t_{n-1}, 0, t_{n-1}..t_1)."""
    return _spectrum_of(toeplitz.n, toeplitz.first_column.tobytes())


def spectrum_cache_size() -> int:
    return _spectrum_of.cache_info().currsize


def clear_spectrum_cache():
    """Forget every cached circulant spectrum."""
    _spectrum_of.cache_clear()


class ToeplitzWorkspace:
    """Reusable zero-padded buffer for matvecs on batches up to a fixed shape.

    The tail [n:2n] of the buffer is never written, so it stays zero between calls.
    A smaller batch uses the leading rows of the buffer.
    """

    def __init__(self, batch_shape: Tuple[int, ...], n: int):
        self.n = n
        self.batch_shape = tuple(batch_shape)
        self.buffer = np.zeros(self.batch_shape + (2 * n,))

    def fits(self, shape: Tuple[int, ...]) -> bool:
        shape = tuple(shape)
        if len(shape) != len(self.batch_shape) + 1 or shape[-1] != self.n:
            return False
        return all(size <= cap for size, cap in zip(shape[:-1], self.batch_shape))

    def view(self, shape: Tuple[int, ...]) -> np.ndarray:
        """Leading block of the buffer for a batch of `shape` (must fit)."""
        return self.buffer[tuple(slice(0, size) for size in shape[:-1])]


def toeplitz_matvec(
    spectrum: CirculantSpectrum,
    v: np.ndarray,
    workspace: Optional[ToeplitzWorkspace] = None,
) -> np.ndarray:
    """T v along the last axis of v; leading axes are independent vectors."""
    n = spectrum.n
    if v.shape[-1] != n:
        raise ShapeMismatchError(
            f"Toeplitz operator has n={n} but vector length is {v.shape[-1]}"
        )

    if workspace is not None and workspace.fits(v.shape):
        padded = workspace.view(v.shape)
        padded[..., :n] = v
    else:
        padded = np.zeros(v.shape[:-1] + (2 * n,))
        padded[..., :n] = v

    product = fft.irfft(fft.rfft(padded, axis=-1) * spectrum.half, n=2 * n, axis=-1)
    return product[..., :n]


def dense_expand(toeplitz: SymmetricToeplitz) -> np.ndarray:
    """Dense copy of the matrix, for tests and small two-grid analyses."""
    n = toeplitz.n
    if n > DENSE_LIMIT:
        raise DomainError(f"Refusing to densify a Toeplitz matrix with n={n} > {DENSE_LIMIT}")
    idx = np.arange(n)
    return toeplitz.first_column[np.abs(idx[:, None] - idx[None, :])]
