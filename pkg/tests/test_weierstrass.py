"""Weierstrass decomposition, spectral projectors and the feedback-loop model."""

import numpy as np
import pytest
import scipy.linalg
from conftest import random_complex, random_regular_pencil, random_well_conditioned

from daepencil import (
    MatrixPencil,
    build_zero_dynamics,
    decompose,
    reconstruct,
    resolvent_norm,
    spectral_norm,
    spectral_projectors,
)
from daepencil.errors import DegeneratePairing, IrregularPencil, NoConvergence


def _reconstruction_residual(pencil, decomp):
    rec = reconstruct(decomp)
    return spectral_norm(rec.E - pencil.E) + spectral_norm(rec.A - pencil.A)


class TestDecompose:
    def test_ode_case(self):
        A = np.diag([-1.0, -2.0])
        d = decompose(MatrixPencil(np.eye(2), A))
        assert d.d2 == 0 and d.nilpotency_index == 0
        assert np.allclose(sorted(np.linalg.eigvals(d.A1).real), [-2.0, -1.0], atol=1e-10)

    def test_already_weierstrass(self):
        d = decompose(MatrixPencil(np.diag([1.0, 0.0]), np.eye(2)))
        assert d.d1 == d.d2 == 1
        assert d.nilpotency_index == 1
        assert np.allclose(d.N, [[0.0]], atol=1e-12)
        assert np.allclose(d.A1, [[1.0]], atol=1e-12)

    def test_zero_dynamics_nilpotency(self):
        model = build_zero_dynamics(np.diag([-1.0, -2.0, -3.0, -4.0]), np.eye(4)[:, 0], np.eye(4)[:, 0])
        d = decompose(model.pencil)
        assert d.nilpotency_index == 2
        assert d.d2 == 2

    def test_invariants_randomized(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            p = random_regular_pencil(rng, 3, 3)
            d = decompose(p)
            scale = spectral_norm(p.E) + spectral_norm(p.A)
            assert _reconstruction_residual(p, d) <= 1e-8 * scale
            # block forms
            Et = d.T_L @ p.E @ d.T_R
            At = d.T_L @ p.A @ d.T_R
            assert spectral_norm(Et[: d.d1, : d.d1] - np.eye(d.d1)) <= 1e-8
            assert spectral_norm(At[d.d1 :, d.d1 :] - np.eye(d.d2)) <= 1e-8
            assert spectral_norm(Et[: d.d1, d.d1 :]) + spectral_norm(Et[d.d1 :, : d.d1]) <= 1e-8
            assert spectral_norm(At[: d.d1, d.d1 :]) + spectral_norm(At[d.d1 :, : d.d1]) <= 1e-8
            # projector identities
            assert spectral_norm(d.P @ d.P - d.P) <= 1e-8
            assert spectral_norm(d.R @ d.R - d.R) <= 1e-8
            assert spectral_norm(p.E @ d.P - d.R @ p.E) <= 1e-8 * max(spectral_norm(p.E), 1.0)
            assert spectral_norm(p.A @ d.P - d.R @ p.A) <= 1e-8 * max(spectral_norm(p.A), 1.0)
            assert round(np.trace(d.P).real) == d.d1

    def test_irregular_raises(self):
        N = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(IrregularPencil):
            decompose(MatrixPencil(N, N))

    def test_nilpotency_invariant_under_equivalence(self):
        rng = np.random.default_rng(1)
        base = random_regular_pencil(rng, 3, 2)
        ref = decompose(base).nilpotency_index
        for _ in range(5):
            G = random_well_conditioned(rng, 5)
            H = random_well_conditioned(rng, 5)
            p = MatrixPencil(G @ base.E @ H, G @ base.A @ H)
            assert decompose(p).nilpotency_index == ref

    def test_neumann_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            p = random_regular_pencil(rng, 2, 3)
            d = decompose(p)
            lam = 2.0 + rng.uniform()
            k = max(d.nilpotency_index, 1)
            series = -sum(
                np.linalg.matrix_power(lam * d.N, l) for l in range(k)
            )
            inv = np.linalg.inv(lam * d.N - np.eye(d.d2))
            assert spectral_norm(inv - series) <= 1e-12 * max(spectral_norm(inv), 1.0)

    def test_resolvent_set_matches_A1(self):
        rng = np.random.default_rng(3)
        p = random_regular_pencil(rng, 3, 2)
        d = decompose(p)
        eigs = np.linalg.eigvals(d.A1)
        inside = complex(eigs[0])  # spectrum point: not in rho
        outside = complex(np.max(eigs.real) + 1.0, 0.3)
        assert not resolvent_norm(p, inside).in_resolvent_set
        assert resolvent_norm(p, outside).in_resolvent_set


class TestSpectralProjectors:
    def test_ode_case(self):
        P, R = spectral_projectors(MatrixPencil(np.eye(2), np.diag([-1.0, -3.0])), p=0)
        assert np.allclose(P, np.eye(2), atol=1e-7)
        assert np.allclose(R, np.eye(2), atol=1e-7)

    def test_diagonal_dae(self):
        P, R = spectral_projectors(MatrixPencil(np.diag([1.0, 0.0]), -np.eye(2)), p=0)
        assert np.allclose(P, np.diag([1.0, 0.0]), atol=1e-7)
        assert np.allclose(R, np.diag([1.0, 0.0]), atol=1e-7)

    def test_matches_decompose(self):
        # for p >= 1 the limit formula has a double-precision rounding floor
        # of order eps * lambda^{p+2}, so the cross-check runs at a relaxed
        # Cauchy tolerance and matches to 1e-5 rather than machine level
        rng = np.random.default_rng(4)
        for _ in range(5):
            p = random_regular_pencil(rng, 3, 2, stable=True)
            d = decompose(p)
            P, R = spectral_projectors(p, p=max(d.nilpotency_index - 1, 0), tol=1e-4)
            assert spectral_norm(P - d.P) <= 1e-5
            assert spectral_norm(R - d.R) <= 1e-5

    def test_strict_tolerance_unreachable_for_higher_index(self):
        # documents the rounding floor: at the default 1e-8 Cauchy tolerance
        # the p = 1 limit cannot converge in double precision
        rng = np.random.default_rng(8)
        p = random_regular_pencil(rng, 3, 2, stable=True)
        with pytest.raises(NoConvergence):
            spectral_projectors(p, p=1)


class TestZeroDynamics:
    def test_assembly(self):
        A0 = np.diag([-1.0, -2.0, -3.0, -4.0])
        b = c = np.eye(4)[:, 0]
        model = build_zero_dynamics(A0, b, c)
        assert np.allclose(model.E, scipy.linalg.block_diag(np.eye(4), 0.0))
        assert np.allclose(model.A[:4, :4], A0)
        assert np.allclose(model.A[:4, 4], b)
        assert np.allclose(model.A[4, :4], c.conj())

    def test_qb_annihilates_b(self):
        rng = np.random.default_rng(5)
        A0 = random_complex(rng, 3, 3)
        b, c = random_complex(rng, 3), random_complex(rng, 3)
        model = build_zero_dynamics(A0, b, c)
        Qb = lambda z: z - (np.vdot(c, z) / np.vdot(c, b)) * b
        assert np.linalg.norm(Qb(b)) <= 1e-12 * np.linalg.norm(b)

    def test_transform_blocks(self):
        A0 = np.diag([-1.0, -2.0, -3.0, -4.0])
        b = c = np.eye(4)[:, 0]
        model = build_zero_dynamics(A0, b, c)
        Et = model.U @ model.E @ model.V
        At = model.U @ model.A @ model.V
        m = A0.shape[0]
        # E block: blkdiag(I_{m-1}, N) with N strictly lower 2x2
        assert np.allclose(Et[: m - 1, : m - 1], np.eye(m - 1), atol=1e-10)
        assert np.allclose(Et[m - 1 :, m - 1 :] - np.tril(Et[m - 1 :, m - 1 :], -1), 0.0, atol=1e-10)
        # A block: blkdiag(*, I_2)
        assert np.allclose(At[m - 1 :, m - 1 :], np.eye(2), atol=1e-10)
        assert np.allclose(At[: m - 1, m - 1 :], 0.0, atol=1e-10)
        assert np.allclose(At[m - 1 :, : m - 1], 0.0, atol=1e-10)

    def test_cross_validates_with_decompose(self):
        rng = np.random.default_rng(6)
        A0 = random_complex(rng, 4, 4) - 3.0 * np.eye(4)
        b, c = random_complex(rng, 4), random_complex(rng, 4)
        model = build_zero_dynamics(A0, b, c)
        d = decompose(model.pencil)
        assert d.nilpotency_index == 2
        assert d.d2 == 2
        At = model.U @ model.A @ model.V
        m = 4
        ours = np.sort_complex(np.linalg.eigvals(At[: m - 1, : m - 1]))
        theirs = np.sort_complex(np.linalg.eigvals(d.A1))
        assert np.allclose(ours, theirs, atol=1e-6)

    def test_degenerate_pairing(self):
        with pytest.raises(DegeneratePairing):
            build_zero_dynamics(np.eye(2), np.array([1.0, 0.0]), np.array([0.0, 1.0]))


class TestReconstruct:
    def test_trivial_roundtrip(self):
        p = MatrixPencil(np.eye(2), np.diag([-1.0, -2.0]))
        rec = reconstruct(decompose(p))
        assert np.allclose(rec.E, p.E, atol=1e-12)
        assert np.allclose(rec.A, p.A, atol=1e-12)

    def test_zero_dynamics_roundtrip(self):
        model = build_zero_dynamics(np.diag([-1.0, -2.0, -3.0, -4.0]), np.eye(4)[:, 0], np.eye(4)[:, 0])
        d = decompose(model.pencil)
        assert _reconstruction_residual(model.pencil, d) <= 1e-8

    def test_random_roundtrip(self):
        rng = np.random.default_rng(7)
        p = random_regular_pencil(rng, 4, 2)
        d = decompose(p)
        scale = spectral_norm(p.E) + spectral_norm(p.A)
        assert _reconstruction_residual(p, d) <= 1e-8 * scale
