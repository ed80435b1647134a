"""Weierstrass-form decomposition of regular pencils.

``decompose`` brings ``(E, A)`` to the equivalent pair
``(blkdiag(I, N), blkdiag(A1, I))`` with nilpotent ``N`` via a reordered
generalized Schur factorization followed by block decoupling with a coupled
generalized Sylvester solve.  ``spectral_projectors`` recovers the same
splitting through the large-shift limit of powers of the scaled
pseudo-resolvent, as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import MatrixPencil, as_complex_matrix, probe_regularity, spectral_norm
from .errors import DegeneratePairing, IllConditionedTransform, IrregularPencil, NoConvergence

__all__ = [
    "WeierstrassDecomposition",
    "ZeroDynModel",
    "decompose",
    "reconstruct",
    "spectral_projectors",
    "build_zero_dynamics",
    "nilpotency_index_of",
]

_INF_EIG_TOL = 1e-10
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class WeierstrassDecomposition:
    """T_L E T_R = blkdiag(I, N), T_L A T_R = blkdiag(A1, I)."""

    T_L: np.ndarray
    T_R: np.ndarray
    A1: np.ndarray
    N: np.ndarray
    d1: int
    d2: int
    P: np.ndarray
    R: np.ndarray
    nilpotency_index: int

    @property
    def n(self) -> int:
        return self.d1 + self.d2


@dataclass(frozen=True)
class ZeroDynModel:
    """Single-input/single-output coupling of a generator A0 with b, c.

    Assembles the (m+1)-dimensional pencil E = blkdiag(I_m, 0),
    A = [[A0, b], [c*, 0]] together with the explicit equivalence
    transformations U, V that expose the nilpotent block.
    """

    A0: np.ndarray
    b: np.ndarray
    c: np.ndarray
    E: np.ndarray
    A: np.ndarray
    U: np.ndarray
    V: np.ndarray
    U_inv: np.ndarray
    V_inv: np.ndarray
    # coordinates: (m-1) kernel-of-c* directions, the b direction, the scalar input
    E_tilde: np.ndarray
    A_tilde: np.ndarray

    @property
    def pencil(self) -> MatrixPencil:
        return MatrixPencil(self.E, self.A)


def nilpotency_index_of(N: np.ndarray, scale: float | None = None) -> int:
    """Smallest k with ||N^k|| below the rounding floor of ||N||^k."""
    N = np.atleast_2d(N)
    if N.shape[0] == 0:
        return 0
    if scale is None:
        scale = max(spectral_norm(N), 1.0)
    power = np.eye(N.shape[0], dtype=complex)
    for k in range(N.shape[0] + 1):
        if spectral_norm(power) <= 1e-10 * scale**k:
            return k
        power = power @ N
    return N.shape[0]  # numerically not nilpotent; capped at the dimension


def decompose(pencil: MatrixPencil) -> WeierstrassDecomposition:
    """Weierstrass form via pseudo-resolvent deflating subspaces.

    The generalized eigenvalues split the spectrum into a finite part (d1
    values) and an infinite part (d2 values); a generalized eigenvalue
    (alpha, beta) counts as infinite when |beta| <= tol * (|alpha| + |beta|).
    QZ computes infinite eigenvalues of nilpotency degree k with a beta of
    order eps^{1-1/k}, which for k >= 2 exceeds any fixed tolerance, so the
    classification tolerance is relaxed step by step and each resulting
    candidate split is validated by its reconstruction residual.

    For a candidate split the transformations come from the exact subspace
    identities at a shift mu in the resolvent set: powers of the right
    pseudo-resolvent R(mu) = (mu E - A)^{-1} E have range equal to the
    finite-eigenvalue deflating subspace and kernel equal to the infinite
    one, and the left pseudo-resolvent E (mu E - A)^{-1} gives the codomain
    pair.  This avoids the eps^{1/k} accuracy loss of reordered-QZ
    decoupling for higher-degree nilpotent blocks.
    """
    if not probe_regularity(pencil, trials=max(16, pencil.n + 1), seed=0):
        raise IrregularPencil("pencil is numerically singular for all probed shifts")
    scale = spectral_norm(pencil.E) + spectral_norm(pencil.A)

    alpha, beta = scipy.linalg.eig(
        pencil.A.astype(complex), pencil.E.astype(complex), right=False, homogeneous_eigvals=True
    )
    d1_candidates = []
    for tol in (_INF_EIG_TOL, 1e-8, 1e-6, 1e-4, 1e-3):
        d1 = int(np.count_nonzero(np.abs(beta) > tol * (np.abs(alpha) + np.abs(beta))))
        if d1 not in d1_candidates:
            d1_candidates.append(d1)

    last_error: Exception | None = None
    for d1 in d1_candidates:
        for mu in _shift_candidates(pencil):
            try:
                decomp = _decompose_at(pencil, d1, mu)
            except (IllConditionedTransform, np.linalg.LinAlgError) as exc:
                last_error = exc
                continue
            rec = reconstruct(decomp)
            residual = spectral_norm(rec.E - pencil.E) + spectral_norm(rec.A - pencil.A)
            if residual <= 1e-8 * max(scale, 1e-300):
                return decomp
            last_error = IllConditionedTransform(
                f"reconstruction residual {residual:.3e} for split d1 = {d1}"
            )
    raise IllConditionedTransform(f"no valid finite/infinite splitting found ({last_error})")


def _shift_candidates(pencil: MatrixPencil, count: int = 4):
    """A few well-spread shifts in the resolvent set, best-conditioned first."""
    radius = 2.0 * (spectral_norm(pencil.E) + spectral_norm(pencil.A))
    rng = np.random.default_rng(12345)
    found = []
    for _ in range(4 * count):
        lam = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        sig = np.linalg.svd(pencil.shifted(lam), compute_uv=False)
        if sig[-1] > 1e-12 * max(sig[0], 1.0):
            found.append((sig[0] / sig[-1], lam))
    found.sort(key=lambda t: t[0])
    return [lam for _, lam in found[:count]]


def _range_and_kernel(M: np.ndarray, rank: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Orthonormal bases of ran M and ker M for a matrix of known rank.

    Returns (range basis, kernel basis, singular-value gap ratio).
    """
    U, sigma, Vh = np.linalg.svd(M)
    if rank < len(sigma) and sigma[rank] > 0.0:
        gap = sigma[rank - 1] / sigma[rank] if rank > 0 else np.inf
    else:
        gap = np.inf
    return U[:, :rank], Vh[rank:, :].conj().T, float(gap)


def _stable_power_split(M: np.ndarray, target_rank: int) -> tuple[np.ndarray, np.ndarray]:
    """Bases of ran M^k and ker M^k for the smallest k reaching target_rank."""
    n = M.shape[0]
    base = M / max(spectral_norm(M), 1e-300)
    X = base
    for _ in range(n):
        ran, ker, gap = _range_and_kernel(X, target_rank)
        if ker.shape[1] == n - target_rank and gap > 1e4:
            s = np.linalg.svd(X, compute_uv=False)
            if target_rank >= len(s) or s[target_rank] <= 1e-8 * s[0]:
                return ran, ker
        X = X @ base
        X = X / max(spectral_norm(X), 1e-300)
    raise IllConditionedTransform(
        f"pseudo-resolvent powers never reach rank {target_rank} with a clear gap"
    )


def _kernel_flag_basis(N: np.ndarray) -> np.ndarray:
    """Unitary basis adapted to ker N <= ker N^2 <= ... for nilpotent N.

    In this basis N is strictly upper triangular up to rounding, because N
    maps ker N^j into ker N^{j-1}.  Unlike a Schur form this costs no
    accuracy: a perturbed nilpotent matrix of degree k has spurious
    eigenvalues of order eps^{1/k}, while its kernel flag is determined to
    working precision by the singular value gaps of its powers.
    """
    d = N.shape[0]
    scale = max(spectral_norm(N), 1e-300)
    M = np.eye(d, dtype=complex)
    blocks: list[np.ndarray] = []
    covered = 0
    for _ in range(d):
        if covered == d:
            break
        M = M @ (N / scale)
        _, sigma_full, Vh = np.linalg.svd(M)
        # M is a power of a unit-norm matrix, so an absolute cut is meaningful
        rank = int(np.count_nonzero(sigma_full > 1e-8))
        kernel = Vh[rank:, :].conj().T
        if blocks:
            prev = np.hstack(blocks)
            kernel = kernel - prev @ (prev.conj().T @ kernel)
        U, sigma, _ = np.linalg.svd(kernel, full_matrices=False)
        fresh = U[:, sigma > 0.5]
        if fresh.shape[1] != (d - rank) - covered:
            raise IllConditionedTransform("kernel flag of the nilpotent block is ill determined")
        blocks.append(fresh)
        covered = d - rank
    if covered != d:
        raise IllConditionedTransform("infinite-eigenvalue block is not numerically nilpotent")
    return np.hstack(blocks)


def _decompose_at(pencil: MatrixPencil, d1: int, mu: complex) -> WeierstrassDecomposition:
    E, A, n = pencil.E, pencil.A, pencil.n
    d2 = n - d1
    if d2 == 0:
        T_L = np.linalg.inv(E)
        T_R = np.eye(n, dtype=complex)
        A1 = T_L @ A
        N = np.zeros((0, 0), dtype=complex)
    elif d1 == 0:
        T_L = np.linalg.inv(A)
        T_R = np.eye(n, dtype=complex)
        A1 = np.zeros((0, 0), dtype=complex)
        N = T_L @ E
    else:
        shifted = pencil.shifted(mu)
        Rmu = np.linalg.solve(shifted, E)
        Lmu = E @ np.linalg.inv(shifted)
        ran_r, ker_r = _stable_power_split(Rmu, d1)
        ran_l, ker_l = _stable_power_split(Lmu, d1)
        T_R = np.hstack([ran_r, ker_r])
        T_L = np.linalg.inv(np.hstack([ran_l, ker_l]))
        Et = T_L @ E @ T_R
        At = T_L @ A @ T_R
        E11, E22 = Et[:d1, :d1], Et[d1:, d1:]
        A11, A22 = At[:d1, :d1], At[d1:, d1:]
        T_L = scipy.linalg.block_diag(np.linalg.inv(E11), np.linalg.inv(A22)) @ T_L
        A1 = np.linalg.solve(E11, A11)
        N = np.linalg.solve(A22, E22)

    if d2 > 0:
        # rotate the infinite block so N is strictly upper triangular
        W = _kernel_flag_basis(N)
        N = np.triu(W.conj().T @ N @ W, 1)
        rot = scipy.linalg.block_diag(np.eye(d1), W)
        T_R = T_R @ rot
        T_L = rot.conj().T @ T_L

    if max(np.linalg.cond(T_L), np.linalg.cond(T_R), 1.0) > _COND_LIMIT:
        raise IllConditionedTransform("equivalence transformations exceed condition 1e12")

    k = nilpotency_index_of(N) if d2 else 0
    T_R_inv = np.linalg.inv(T_R)
    T_L_inv = np.linalg.inv(T_L)
    sel = np.zeros((n, n))
    sel[:d1, :d1] = np.eye(d1)
    P = T_R @ sel @ T_R_inv
    R = T_L_inv @ sel @ T_L
    return WeierstrassDecomposition(
        T_L=T_L, T_R=T_R, A1=A1, N=N, d1=d1, d2=d2, P=P, R=R, nilpotency_index=k
    )


def reconstruct(decomp: WeierstrassDecomposition) -> MatrixPencil:
    """Map the block form back: (T_L^-1 blkdiag(I,N) T_R^-1, T_L^-1 blkdiag(A1,I) T_R^-1)."""
    d1, d2 = decomp.d1, decomp.d2
    Eb = scipy.linalg.block_diag(np.eye(d1), decomp.N)
    Ab = scipy.linalg.block_diag(decomp.A1, np.eye(d2))
    T_L_inv = np.linalg.inv(decomp.T_L)
    T_R_inv = np.linalg.inv(decomp.T_R)
    return MatrixPencil(T_L_inv @ Eb @ T_R_inv, T_L_inv @ Ab @ T_R_inv)


def spectral_projectors(
    pencil: MatrixPencil,
    p: int,
    lambda_sequence=None,
    tol: float = 1e-8,
):
    """Limit projectors P, R from powers of the scaled pseudo-resolvents.

    P = lim (lambda (lambda E - A)^{-1} E)^{p+1} and
    R = lim (lambda E (lambda E - A)^{-1})^{p+1}, approximated on a geometric
    shift sequence with one Richardson extrapolation level.  Raises
    NoConvergence when the extrapolated approximants are not Cauchy.
    """
    E, A = pencil.E, pencil.A
    if lambda_sequence is None:
        lam0 = 10.0 * (1.0 + spectral_norm(A) / max(spectral_norm(E), 1e-300))
        lambda_sequence = lam0 * 2.0 ** np.arange(12)
    lams = np.asarray(lambda_sequence, dtype=float)
    if lams.ndim != 1 or len(lams) < 3 or np.any(np.diff(lams) <= 0):
        raise ValueError("lambda_sequence must be increasing with at least 3 entries")

    Ps, Rs = [], []
    for lam in lams:
        right = np.linalg.solve(pencil.shifted(lam), E)
        left = E @ np.linalg.inv(pencil.shifted(lam))
        Ps.append(np.linalg.matrix_power(lam * right, p + 1))
        Rs.append(np.linalg.matrix_power(lam * left, p + 1))

    def extrapolate(seq):
        # error expands in powers of 1/lambda; ratio-2 Richardson cancels the
        # first two orders
        ex1 = [2.0 * seq[i + 1] - seq[i] for i in range(len(seq) - 1)]
        ex = [(4.0 * ex1[i + 1] - ex1[i]) / 3.0 for i in range(len(ex1) - 1)]
        diffs = [spectral_norm(ex[i + 1] - ex[i]) for i in range(len(ex) - 1)]
        # for p >= 1 the shifted solves carry a rounding floor of order
        # eps * lambda^{p+2}, so the smallest successive difference along the
        # sequence is the right acceptance point, not the last one
        best = int(np.argmin(diffs))
        if diffs[best] <= tol:
            return ex[best + 1]
        raise NoConvergence(
            f"projector approximants not Cauchy at tolerance {tol:g} (best diff {diffs[best]:.3e})"
        )

    return extrapolate(Ps), extrapolate(Rs)


def build_zero_dynamics(A0, b, c) -> ZeroDynModel:
    """Assemble the rank-one coupled pencil and its explicit block transformation.

    Requires <b, c> != 0.  The transformed pair is blkdiag(I_{m-1}, N) vs
    blkdiag(Y, I_2) where N is the strictly lower 2x2 nilpotent block and Y
    is the compression of (I - b c*/<c,b>) A0 onto ker c*.
    """
    A0 = as_complex_matrix(A0)
    m = A0.shape[0]
    b = np.asarray(b, dtype=complex).reshape(m)
    c = np.asarray(c, dtype=complex).reshape(m)
    pairing = np.vdot(c, b)  # <c, b> = c* b
    if abs(pairing) < 1e-12 * np.linalg.norm(b) * np.linalg.norm(c):
        raise DegeneratePairing("<c, b> is numerically zero")

    E = np.zeros((m + 1, m + 1), dtype=complex)
    E[:m, :m] = np.eye(m)
    A = np.zeros((m + 1, m + 1), dtype=complex)
    A[:m, :m] = A0
    A[:m, m] = b
    A[m, :m] = c.conj()

    Qb = np.eye(m) - np.outer(b, c.conj()) / pairing
    Ctil = c.conj()[None, :] / pairing          # 1 x m
    Btil = (b / pairing)[:, None]               # m x 1
    K = Ctil @ A0                               # 1 x m

    # orthonormal basis of ker c* = ran Qb
    _, _, vh = np.linalg.svd(c.conj()[None, :])
    W1 = vh[1:, :].conj().T                     # m x (m-1)

    U = np.zeros((m + 1, m + 1), dtype=complex)
    U[: m - 1, :m] = W1.conj().T @ Qb
    U[: m - 1, m] = -(W1.conj().T @ Qb @ A0 @ Btil)[:, 0]
    U[m - 1, m] = 1.0 / pairing                 # b-coefficient of Btil*u
    U[m, :m] = Ctil[0]
    U[m, m] = -(K @ Btil)[0, 0]

    U_inv = np.zeros((m + 1, m + 1), dtype=complex)
    U_inv[:m, : m - 1] = W1
    U_inv[:m, m - 1] = A0 @ b
    U_inv[:m, m] = b
    U_inv[m, m - 1] = pairing                   # c*(y2 b) = y2 <c,b>

    V = np.zeros((m + 1, m + 1), dtype=complex)
    V[:m, : m - 1] = W1
    V[:m, m - 1] = b
    V[m, : m - 1] = -(K @ W1)[0]
    V[m, m] = 1.0

    V_inv = np.zeros((m + 1, m + 1), dtype=complex)
    V_inv[: m - 1, :m] = W1.conj().T @ Qb
    V_inv[m - 1, :m] = Ctil[0]
    V_inv[m, :m] = (K @ Qb)[0]
    V_inv[m, m] = 1.0

    for M, Minv, name in ((U, U_inv, "U"), (V, V_inv, "V")):
        resid = spectral_norm(M @ Minv - np.eye(m + 1))
        if resid > 1e-12 * max(spectral_norm(M) * spectral_norm(Minv), 1.0):
            raise AssertionError(f"{name} inverse residual {resid:.3e}")

    E_tilde = U @ E @ V
    A_tilde = U @ A @ V
    return ZeroDynModel(
        A0=A0, b=b, c=c, E=E, A=A, U=U, V=V, U_inv=U_inv, V_inv=V_inv,
        E_tilde=E_tilde, A_tilde=A_tilde,
    )
