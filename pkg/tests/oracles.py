"""Independent dense oracles shared across the test modules.

Everything here is built entrywise from closed forms or by dense
eigendecomposition, never through the fast code paths under test.
Expensive spectral data is cached per (n, w).
"""

from functools import lru_cache

import numpy as np


def prolate_dense(n, w):
    """Entrywise sinc kernel sin(2*pi*w*(m-l)) / (pi*(m-l)), diagonal 2w."""
    d = np.subtract.outer(np.arange(n), np.arange(n)).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(2.0 * np.pi * w * d) / (np.pi * d)
    np.fill_diagonal(out, 2.0 * w)
    return out


def dirichlet_projector_dense(n, w_prime):
    """Entrywise Dirichlet kernel sin(2*pi*w'*(m-l)) / (n*sin(pi*(m-l)/n)), diagonal 2w'."""
    d = np.subtract.outer(np.arange(n), np.arange(n)).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(2.0 * np.pi * w_prime * d) / (n * np.sin(np.pi * d / n))
    np.fill_diagonal(out, 2.0 * w_prime)
    return out


def sinc_alias_dense(n):
    """The odd residual kernel: sinc minus Dirichlet minus the two adjacent images."""
    d = np.subtract.outer(np.arange(n), np.arange(n)).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            1.0 / (np.pi * d)
            - 1.0 / (n * np.sin(np.pi * d / n))
            - 1.0 / (np.pi * (d + n))
            - 1.0 / (np.pi * (d - n))
        )
    np.fill_diagonal(out, 0.0)
    return out


def kernel_mismatch_dense(n):
    """The odd kernel before unfolding: sinc minus Dirichlet, zero diagonal."""
    d = np.subtract.outer(np.arange(n), np.arange(n)).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 / (np.pi * d) - 1.0 / (n * np.sin(np.pi * d / n))
    np.fill_diagonal(out, 0.0)
    return out


def bandwidth_shift_dense(n, w, w_prime):
    """The even kernel 2*sin(pi*(w-w')*(m-l)) / (pi*(m-l)), diagonal 2*(w-w')."""
    d = np.subtract.outer(np.arange(n), np.arange(n)).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 2.0 * np.sin(np.pi * (w - w_prime) * d) / (np.pi * d)
    np.fill_diagonal(out, 2.0 * (w - w_prime))
    return out


@lru_cache(maxsize=32)
def eig_dense(n, w):
    """Descending eigendecomposition of the dense prolate matrix; cached."""
    lams, vecs = np.linalg.eigh(prolate_dense(n, w))
    return lams[::-1].copy(), vecs[:, ::-1].copy()


@lru_cache(maxsize=32)
def eigvals_dense(n, w):
    lams = np.linalg.eigvalsh(prolate_dense(n, w))
    return lams[::-1].copy()


def projection_oracle(n, w, k):
    _, vecs = eig_dense(n, w)
    vk = vecs[:, :k]
    return vk @ vk.T


def pinv_oracle(n, w, k):
    lams, vecs = eig_dense(n, w)
    vk = vecs[:, :k]
    return (vk / lams[:k]) @ vk.T


def tikhonov_oracle(n, w, alpha):
    lams, vecs = eig_dense(n, w)
    b = prolate_dense(n, w)
    refined = np.clip(np.einsum("ij,ij->j", vecs, b @ vecs), 0.0, 1.0)
    f = refined / (refined**2 + alpha)
    return (vecs * f) @ vecs.T


def diag_lyapunov_dense(a_diag, b_col):
    """Closed-form solution of diag(a) X + X diag(a) = b b'."""
    a_diag = np.asarray(a_diag, float)
    b_col = np.asarray(b_col, float)
    return np.outer(b_col, b_col) / np.add.outer(a_diag, a_diag)


def norm2(m):
    return float(np.linalg.norm(m, 2))
