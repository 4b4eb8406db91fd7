import math

import numpy as np
import pytest

from prolate.dpss import (
    PreconditionViolated,
    commuting_tridiagonal,
    default_subspace_dim,
    dense_slepian_basis,
    rayleigh_lambda,
    transition_count,
    transition_eigenpairs,
    transition_window,
)
from prolate.fft_kernels import ToeplitzOperator, ToeplitzSymbol, prolate_symbol
from prolate.lowrank import transition_count_budget

from oracles import eig_dense, eigvals_dense, prolate_dense


class TestCommutingTridiagonal:
    def test_single_point(self):
        diag, off = commuting_tridiagonal(1, 0.3)
        assert diag.shape == (1,) and off.shape == (0,)
        assert diag[0] == 0.0

    def test_entry_formulas(self):
        n, w = 5, 0.1
        diag, off = commuting_tridiagonal(n, w)
        c = math.cos(2 * math.pi * w)
        assert np.allclose(diag, [4 * c, 1 * c, 0.0, 1 * c, 4 * c])
        assert np.allclose(off, [2.0, 3.0, 3.0, 2.0])

    def test_eigenvectors_commute_with_prolate(self):
        n, w = 32, 0.25
        diag, off = commuting_tridiagonal(n, w)
        import scipy.linalg

        _, vecs = scipy.linalg.eigh_tridiagonal(diag, off)
        b = prolate_dense(n, w)
        for j in range(n):
            v = vecs[:, j]
            lam = float(v @ (b @ v))
            assert np.linalg.norm(b @ v - lam * v) <= 1e-8

    def test_rayleigh_values_match_dense_spectrum(self):
        # thresholds outside [0, 1] force the window to cover the whole spectrum
        n, w = 64, 0.25
        start, lams, _ = transition_window(n, w, -1.0, 2.0)
        assert start == 0 and lams.size == n
        dense = eigvals_dense(n, w)
        assert np.abs(np.sort(lams)[::-1] - dense).max() <= 1e-10


class TestRayleighLambda:
    def test_identity_symbol_gives_one(self, rng):
        col = np.zeros(32)
        col[0] = 1.0
        op = ToeplitzOperator(ToeplitzSymbol(col))
        v = rng.standard_normal(32)
        v /= np.linalg.norm(v)
        assert rayleigh_lambda(v, op) == pytest.approx(1.0, abs=1e-12)

    def test_extreme_slepian_vectors(self):
        n, w = 64, 0.25
        dense_lams, dense_vecs = eig_dense(n, w)
        op = ToeplitzOperator(prolate_symbol(n, w))
        assert rayleigh_lambda(dense_vecs[:, 0], op) == pytest.approx(dense_lams[0], abs=1e-10)
        assert rayleigh_lambda(dense_vecs[:, -1], op) == pytest.approx(dense_lams[-1], abs=1e-10)

    def test_rejects_non_unit_vector(self):
        op = ToeplitzOperator(prolate_symbol(8, 0.25))
        with pytest.raises(ValueError):
            rayleigh_lambda(np.full(8, 0.9), op)


class TestTransitionEigenpairs:
    def test_count_matches_dense_and_bound(self):
        n, w, eps = 256, 0.25, 1e-3
        es = transition_eigenpairs(n, w, eps)
        dense = eigvals_dense(n, w)
        want = int(np.count_nonzero((dense > eps) & (dense < 1 - eps)))
        assert es.count == want
        assert es.count <= transition_count_budget(n, eps)

    def test_wide_tolerance_can_be_empty(self):
        n, w, eps = 64, 0.25, 0.499
        es = transition_eigenpairs(n, w, eps)
        dense = eigvals_dense(n, w)
        want = int(np.count_nonzero((dense > eps) & (dense < 1 - eps)))
        assert es.count == want
        if want == 0:
            assert not es.below_k and not es.at_or_above_k

    def test_postconditions(self):
        n, w, eps = 128, 0.25, 1e-6
        es = transition_eigenpairs(n, w, eps)
        assert np.all((es.lams > eps) & (es.lams < 1 - eps))
        assert all(p.index < es.k for p in es.below_k)
        assert all(p.index >= es.k for p in es.at_or_above_k)
        dense = eigvals_dense(n, w)
        want = int(np.count_nonzero((dense > eps) & (dense < 1 - eps)))
        assert es.count == want

    def test_transition_vectors_orthogonal(self):
        es = transition_eigenpairs(512, 0.25, 1e-6)
        gram = es.vectors.T @ es.vectors
        assert np.abs(gram - np.eye(es.count)).max() <= 1e-8

    def test_split_respects_k(self):
        es = transition_eigenpairs(256, 0.25, 1e-6, k=128)
        (lam2, vec2), (lam3, vec3) = es.split()
        assert lam2.size + lam3.size == es.count
        assert vec2.shape[1] == lam2.size and vec3.shape[1] == lam3.size

    def test_bad_split_rejected(self):
        with pytest.raises(PreconditionViolated):
            transition_eigenpairs(64, 0.25, 1e-3, k=0)
        with pytest.raises(PreconditionViolated):
            transition_eigenpairs(64, 0.25, 1e-3, k=64)

    def test_deterministic(self):
        a = transition_eigenpairs(128, 0.25, 1e-6)
        b = transition_eigenpairs(128, 0.25, 1e-6)
        assert np.array_equal(a.lams, b.lams)
        assert np.array_equal(a.vectors, b.vectors)

    def test_sign_convention(self):
        # first entry beyond the sign tolerance is positive in every vector
        for vecs in (transition_eigenpairs(128, 0.25, 1e-6).vectors, dense_slepian_basis(64, 0.25)[0]):
            for j in range(vecs.shape[1]):
                col = vecs[:, j]
                lead = np.flatnonzero(np.abs(col) > 1e-12)[0]
                assert col[lead] > 0

    def test_count_helper_agrees(self):
        assert transition_count(128, 0.25, 1e-6) == transition_eigenpairs(128, 0.25, 1e-6).count


class TestDenseSlepianBasis:
    def test_two_by_two_closed_form(self):
        _, lams = dense_slepian_basis(2, 0.25)
        assert lams[0] == pytest.approx(0.5 + 1 / math.pi, abs=1e-14)
        assert lams[1] == pytest.approx(0.5 - 1 / math.pi, abs=1e-14)

    def test_orthonormal_and_reconstructs(self):
        n, w = 256, 0.25
        s, lams = dense_slepian_basis(n, w)
        assert np.abs(s.T @ s - np.eye(n)).max() <= 1e-10
        b = prolate_dense(n, w)
        assert np.linalg.norm(b - (s * lams) @ s.T, 2) <= 1e-8
        assert np.all(np.diff(lams) <= 1e-12)

    def test_quarter_band_eigenvalue_symmetry(self):
        for n in (32, 128):
            _, lams = dense_slepian_basis(n, 0.25)
            assert np.abs(lams + lams[::-1] - 1.0).max() <= 1e-8

    def test_guard(self):
        with pytest.raises(ValueError):
            dense_slepian_basis(5000, 0.25)


class TestAsymptoticBand:
    def test_count_within_factor_two(self):
        for n in (256, 1024):
            for eps in (1e-3, 1e-6):
                count = transition_count(n, 0.25, eps)
                asym = 2.0 / math.pi**2 * math.log(n) * math.log(1.0 / eps - 1.0)
                assert asym / 2 <= count <= 2 * asym


def test_default_subspace_dim_rounds_half_up():
    assert default_subspace_dim(64, 0.25) == 32
    assert default_subspace_dim(63, 0.25) == 32  # 31.5 rounds up
    assert default_subspace_dim(10, 0.26) == 5  # 5.2 rounds down
