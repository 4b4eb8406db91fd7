"""Slepian basis vectors and eigenvalues through the commuting tridiagonal matrix.

Only the handful of eigenpairs whose eigenvalues fall strictly between the
two cluster plateaus are ever needed; they are located by expanding a
windowed tridiagonal eigensolve outward from the expected transition index,
with each eigenvalue recovered as a Rayleigh quotient against the fast
Toeplitz apply (the tridiagonal's own spectrum is unrelated to the
concentration values).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fft_kernels import ToeplitzOperator, prolate_matrix_dense, prolate_symbol

__all__ = [
    "PreconditionViolated",
    "EigenPair",
    "TransitionEigenSet",
    "commuting_tridiagonal",
    "rayleigh_lambda",
    "transition_window",
    "transition_eigenpairs",
    "transition_count",
    "dense_slepian_basis",
    "default_subspace_dim",
    "DENSE_GUARD",
]

DENSE_GUARD = 4096
_CLAMP_TOL = 1e-12
_SIGN_TOL = 1e-12


class PreconditionViolated(ValueError):
    """The requested subspace split contradicts the eigenvalue layout."""


def default_subspace_dim(n: int, w: float) -> int:
    """Default subspace dimension round(2nw), ties rounding up."""
    return int(math.floor(2.0 * n * w + 0.5))


def commuting_tridiagonal(n: int, w: float):
    """Diagonal and off-diagonal of the tridiagonal matrix sharing the Slepian eigenvectors.

    diagonal[m] = ((n-1-2m)/2)^2 * cos(2*pi*w); off-diagonal[m] = (m+1)(n-1-m)/2.
    Its eigenvectors, ordered by descending tridiagonal eigenvalue, are the
    Slepian basis vectors in descending concentration order.
    """
    if n <= 0:
        raise ValueError(f"dimension must be positive, got {n}")
    if not 0.0 < w < 0.5:
        raise ValueError(f"half-bandwidth must lie in (0, 1/2), got {w}")
    m = np.arange(n, dtype=float)
    diag = ((n - 1 - 2 * m) / 2.0) ** 2 * math.cos(2.0 * math.pi * w)
    off = (m[: n - 1] + 1.0) * (n - 1 - m[: n - 1]) / 2.0
    return diag, off


def rayleigh_lambda(v: np.ndarray, b_op: ToeplitzOperator) -> float:
    """v' (B v) through the fast Toeplitz apply, clamped into [0, 1]."""
    v = np.asarray(v)
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"expected a unit vector, got norm {nrm}")
    lam = float(np.real(np.vdot(v, b_op.apply(v))))
    return _clamp_eigenvalue(lam)


def _clamp_eigenvalue(lam: float) -> float:
    if lam < -_CLAMP_TOL or lam > 1.0 + _CLAMP_TOL:
        raise ValueError(f"eigenvalue estimate {lam} outside [0, 1] beyond clamp tolerance")
    return min(max(lam, 0.0), 1.0)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the first entry larger than the sign tolerance positive, per column."""
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        nz = np.flatnonzero(np.abs(col) > _SIGN_TOL)
        lead = nz[0] if nz.size else int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            vectors[:, j] = -col
    return vectors


def _slepian_vectors(d, e, n, lo, hi):
    """Slepian eigenvectors for the index range [lo, hi] (inclusive, ascending)."""
    if n == 1:
        return np.ones((1, 1))
    # slepian index l corresponds to the (n-1-l)-th ascending tridiagonal eigenvalue
    tri_lo, tri_hi = n - 1 - hi, n - 1 - lo
    _, vec = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(tri_lo, tri_hi))
    return _fix_signs(vec[:, ::-1].copy())


@dataclass(frozen=True)
class EigenPair:
    """One Slepian eigenpair: position in descending eigenvalue order, value, vector."""

    index: int
    lam: float
    vector: np.ndarray


@dataclass(frozen=True)
class TransitionEigenSet:
    """Consecutive eigenpairs with lo < lam < hi, split at the subspace dimension k.

    ``vectors[:, j]`` belongs to Slepian index ``start_index + j``; the set
    is empty when both cluster plateaus meet.
    """

    n: int
    w: float
    lo: float
    hi: float
    k: int
    start_index: int
    lams: np.ndarray
    vectors: np.ndarray

    @property
    def count(self) -> int:
        return int(self.lams.size)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + self.count)

    def split(self):
        """(lams, vectors) below k and at-or-above k."""
        cut = max(0, min(self.count, self.k - self.start_index))
        return (
            (self.lams[:cut], self.vectors[:, :cut]),
            (self.lams[cut:], self.vectors[:, cut:]),
        )

    @property
    def below_k(self):
        (lams, vecs), _ = self.split()
        return [EigenPair(self.start_index + j, float(lams[j]), vecs[:, j]) for j in range(lams.size)]

    @property
    def at_or_above_k(self):
        (lams0, _), (lams, vecs) = self.split()
        base = self.start_index + lams0.size
        return [EigenPair(base + j, float(lams[j]), vecs[:, j]) for j in range(lams.size)]


def transition_window(n, w, lo, hi, b_op=None, max_pairs=4096):
    """All consecutive eigenpairs with lo < lam < hi.

    Returns (start_index, lams, vectors).  The window is found by expanding a
    tridiagonal eigensolve outward from round(2nw) until an eigenvalue >= hi
    appears on the low-index side and one <= lo on the high-index side (or
    the spectrum ends).  Eigenvalues below the float noise floor cannot be
    told apart from zero, so thresholds smaller than that make the window
    sweep the whole lower cluster; max_pairs caps the sweep.
    """
    empty = np.zeros(0), np.zeros((n, 0))
    if lo >= hi or hi <= 0.0 or lo >= 1.0:
        return min(max(default_subspace_dim(n, w), 0), n), *empty
    if b_op is None:
        b_op = ToeplitzOperator(prolate_symbol(n, w))
    d, e = commuting_tridiagonal(n, w)

    center = min(max(default_subspace_dim(n, w), 0), n - 1)
    chunk = 16
    e_lo = max(0, center - chunk)
    e_hi = min(n - 1, center + chunk)
    vecs = _slepian_vectors(d, e, n, e_lo, e_hi)
    lams = _rayleigh_block(vecs, b_op)

    while True:
        if lams[0] < hi and e_lo > 0:
            step = min(chunk, e_lo)
            new = _slepian_vectors(d, e, n, e_lo - step, e_lo - 1)
            vecs = np.hstack([new, vecs])
            lams = np.concatenate([_rayleigh_block(new, b_op), lams])
            e_lo -= step
        elif lams[-1] > lo and e_hi < n - 1:
            step = min(chunk, n - 1 - e_hi)
            new = _slepian_vectors(d, e, n, e_hi + 1, e_hi + step)
            vecs = np.hstack([vecs, new])
            lams = np.concatenate([lams, _rayleigh_block(new, b_op)])
            e_hi += step
        else:
            break
        chunk = min(2 * chunk, 512)
        if lams.size > max_pairs:
            raise RuntimeError(
                f"transition window exceeded {max_pairs} eigenpairs for n={n}, "
                f"thresholds ({lo:g}, {hi:g}); thresholds are likely below "
                "the eigenvalue resolution of double precision"
            )

    below_hi = np.flatnonzero(lams < hi)
    start_off = int(below_hi[0]) if below_hi.size else lams.size
    at_or_below_lo = np.flatnonzero(lams[start_off:] <= lo)
    stop_off = start_off + (int(at_or_below_lo[0]) if at_or_below_lo.size else lams.size - start_off)
    return e_lo + start_off, lams[start_off:stop_off].copy(), vecs[:, start_off:stop_off].copy()


def _rayleigh_block(vecs, b_op):
    bv = b_op.apply_block(vecs)
    lams = np.real(np.einsum("ij,ij->j", vecs.conj(), bv))
    return np.array([_clamp_eigenvalue(float(x)) for x in lams])


def transition_eigenpairs(n, w, epsilon, k=None, b_op=None, max_pairs=4096) -> TransitionEigenSet:
    """Eigenpairs with epsilon < lam < 1 - epsilon, split at k (default round(2nw)).

    Raises PreconditionViolated unless lam^(k-1) > epsilon and lam^(k) < 1 - epsilon.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"tolerance must lie in (0, 1/2), got {epsilon}")
    if k is None:
        k = default_subspace_dim(n, w)
    start, lams, vecs = transition_window(n, w, epsilon, 1.0 - epsilon, b_op=b_op, max_pairs=max_pairs)
    if not start <= k <= start + lams.size:
        raise PreconditionViolated(
            f"subspace dimension k={k} violates the split condition: eigenvalues in "
            f"({epsilon:g}, {1 - epsilon:g}) occupy indices [{start}, {start + lams.size})"
        )
    return TransitionEigenSet(n, w, epsilon, 1.0 - epsilon, k, start, lams, vecs)


def transition_count(n, w, epsilon, b_op=None, max_pairs=4096) -> int:
    """Number of eigenvalues strictly inside (epsilon, 1 - epsilon)."""
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"tolerance must lie in (0, 1/2), got {epsilon}")
    _, lams, _ = transition_window(n, w, epsilon, 1.0 - epsilon, b_op=b_op, max_pairs=max_pairs)
    return int(lams.size)


def dense_slepian_basis(n: int, w: float):
    """Full Slepian basis and eigenvalues by dense eigendecomposition (test oracle).

    Returns (S, lams) with orthonormal columns and eigenvalues descending.
    Guarded to n <= DENSE_GUARD.
    """
    if n > DENSE_GUARD:
        raise ValueError(f"dense Slepian basis guarded to n <= {DENSE_GUARD}, got {n}")
    b = prolate_matrix_dense(n, w)
    lams, vecs = np.linalg.eigh(b)
    lams, vecs = lams[::-1], vecs[:, ::-1]
    lams = np.array([_clamp_eigenvalue(float(x)) for x in lams])
    return _fix_signs(vecs.copy()), lams
