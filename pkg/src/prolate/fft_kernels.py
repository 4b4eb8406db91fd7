"""FFT-backed kernels: symmetric-Toeplitz products and the partial Fourier projector.

The two structured matrices everything else is built from are the prolate
matrix (symmetric Toeplitz, sinc entries) and the orthogonal projector onto
the lowest-frequency DFT columns (circulant, Dirichlet-kernel entries).
Both apply to a vector in O(n log n) through a single precomputed transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "ToeplitzSymbol",
    "ToeplitzOperator",
    "PartialFourier",
    "prolate_symbol",
    "prolate_matrix_dense",
    "nearest_odd_integer",
    "next_pow2",
]


def next_pow2(m: int) -> int:
    """Smallest power of two >= m."""
    return 1 << (int(m) - 1).bit_length()


def nearest_odd_integer(x: float) -> int:
    """Nearest odd integer to x; exact ties round upward."""
    return 2 * int(math.floor((x - 1.0) / 2.0 + 0.5)) + 1


@dataclass(frozen=True)
class ToeplitzSymbol:
    """First column of a symmetric Toeplitz matrix: entry (m, n) is col[|m - n|]."""

    col: np.ndarray

    def __post_init__(self):
        col = np.asarray(self.col, dtype=np.float64)
        if col.ndim != 1 or col.size == 0:
            raise ValueError("symbol column must be a nonempty 1-d array")
        if not np.all(np.isfinite(col)):
            raise ValueError("symbol column must be finite")
        object.__setattr__(self, "col", col)

    @property
    def n(self) -> int:
        return self.col.size

    def dense(self) -> np.ndarray:
        return scipy.linalg.toeplitz(self.col)


def prolate_symbol(n: int, w: float) -> ToeplitzSymbol:
    """Symbol of the n x n prolate matrix with half-bandwidth w in (0, 1/2).

    col[0] = 2w (the sinc limit) and col[m] = sin(2*pi*w*m) / (pi*m) for m >= 1.
    """
    if n <= 0:
        raise ValueError(f"matrix dimension must be positive, got {n}")
    if not 0.0 < w < 0.5:
        raise ValueError(f"half-bandwidth must lie in (0, 1/2), got {w}")
    col = np.empty(n)
    col[0] = 2.0 * w
    if n > 1:
        m = np.arange(1, n)
        col[1:] = np.sin(2.0 * np.pi * w * m) / (np.pi * m)
    return ToeplitzSymbol(col)


def prolate_matrix_dense(n: int, w: float) -> np.ndarray:
    """Dense prolate matrix; reference/oracle path only."""
    return prolate_symbol(n, w).dense()


class ToeplitzOperator:
    """Fast application of a symmetric Toeplitz matrix via a circulant embedding.

    The embedding length is the smallest power of two >= 2n and the circulant
    spectrum is precomputed at construction, so each apply() costs two FFTs.
    Instances are immutable and safe to share across threads.
    """

    def __init__(self, symbol: ToeplitzSymbol):
        self.symbol = symbol
        n = symbol.n
        self.n = n
        self.fft_len = next_pow2(2 * n)
        circ = np.zeros(self.fft_len)
        circ[:n] = symbol.col
        if n > 1:
            circ[self.fft_len - n + 1:] = symbol.col[1:][::-1]
        self.spectrum = np.fft.fft(circ)
        # the embedded circulant is real and symmetric, so its spectrum is real;
        # the half spectrum drives an all-real transform path
        self.half_spectrum = np.fft.rfft(circ).real

    def apply(self, x: np.ndarray) -> np.ndarray:
        """T @ x in O(n log n); output is complex regardless of input dtype."""
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise ValueError(f"expected a length-{self.n} vector, got shape {x.shape}")
        xs = np.fft.fft(x, n=self.fft_len)
        return np.fft.ifft(self.spectrum * xs)[: self.n]

    def apply_real(self, x: np.ndarray) -> np.ndarray:
        """T @ x for real x through the half-spectrum; returns a real vector."""
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise ValueError(f"expected a length-{self.n} vector, got shape {x.shape}")
        if np.iscomplexobj(x):
            raise ValueError("apply_real expects a real vector")
        xs = np.fft.rfft(x, n=self.fft_len)
        return np.fft.irfft(self.half_spectrum * xs, n=self.fft_len)[: self.n]

    def apply_block(self, x: np.ndarray) -> np.ndarray:
        """T @ X for an (n, m) block of column vectors."""
        x = np.asarray(x)
        if x.ndim != 2 or x.shape[0] != self.n:
            raise ValueError(f"expected an ({self.n}, m) block, got shape {x.shape}")
        xs = np.fft.fft(x, n=self.fft_len, axis=0)
        return np.fft.ifft(self.spectrum[:, None] * xs, axis=0)[: self.n]

    def dense(self) -> np.ndarray:
        return self.symbol.dense()


class PartialFourier:
    """Frame of the lowest 2nw' frequency DFT columns of length n.

    2nw' is the nearest odd integer to 2nw, so the column frequencies k/n,
    k = -(2nw'-1)/2 .. (2nw'-1)/2, form a symmetric integer set.  The Gram
    projector F F* is then a real circulant with Dirichlet-kernel entries
    sin(2*pi*w'*(m-n)) / (n*sin(pi*(m-n)/n)) and diagonal 2w'.

    adjoint() and apply() route through a single length-n FFT.
    """

    def __init__(self, n: int, w: float):
        if n <= 0:
            raise ValueError(f"signal length must be positive, got {n}")
        if not 0.0 < w < 0.5:
            raise ValueError(f"half-bandwidth must lie in (0, 1/2), got {w}")
        q = nearest_odd_integer(2.0 * n * w)
        if q > n:
            raise ValueError(f"frequency count {q} exceeds signal length {n}")
        self.n = n
        self.num_cols = q
        self.w_prime = q / (2.0 * n)
        self.half_span = (q - 1) // 2
        self._scale = math.sqrt(n)

    def adjoint(self, x: np.ndarray) -> np.ndarray:
        """F* x, ordered by ascending column frequency."""
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise ValueError(f"expected a length-{self.n} vector, got shape {x.shape}")
        spec = np.fft.fft(x)
        r = self.half_span
        if r == 0:
            return spec[:1] / self._scale
        return np.concatenate([spec[self.n - r:], spec[: r + 1]]) / self._scale

    def apply(self, c: np.ndarray) -> np.ndarray:
        """F c: scatter the coefficients into their DFT bins and invert."""
        c = np.asarray(c)
        if c.shape != (self.num_cols,):
            raise ValueError(f"expected {self.num_cols} coefficients, got shape {c.shape}")
        r = self.half_span
        spec = np.zeros(self.n, dtype=complex)
        if r > 0:
            spec[self.n - r:] = c[:r]
        spec[: r + 1] = c[r:]
        return np.fft.ifft(spec) * self._scale

    def project(self, x: np.ndarray) -> np.ndarray:
        """The circulant projector F F* applied to x."""
        return self.apply(self.adjoint(x))

    def columns_dense(self) -> np.ndarray:
        """Materialize F; reference/oracle path only."""
        k = np.arange(-self.half_span, self.half_span + 1)
        m = np.arange(self.n)
        return np.exp(2j * np.pi * np.outer(m, k) / self.n) / self._scale

    def projector_dense(self) -> np.ndarray:
        f = self.columns_dense()
        return f @ f.conj().T
