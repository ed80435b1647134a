"""Worked example systems assembled as concrete finite pencils.

Three models: a viscoelastic-nanorod vibration model (port-Hamiltonian,
5 fields on a 1-D grid), a diagonal 2x2-block system on a truncated
sequence space with a scalar feedback loop, and the zero-dynamics pencil
built in the weierstrass module.  Where a closed-form resolvent exists it
is provided as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import MatrixPencil
from .errors import InvalidParams, PoleHit
from .phdae import PhPencil

__all__ = [
    "NanorodParams",
    "L2ExampleParams",
    "build_nanorod",
    "build_l2_example",
    "m_k_resolvent",
]


@dataclass(frozen=True)
class NanorodParams:
    """Physical and grid parameters of the nanorod vibration model."""

    l: float = 1.0  # rod length
    n_grid: int = 50  # interior grid points
    rho: float = 1.0  # mass density
    D: float = 1.0  # cross-sectional area
    C_mod: float = 1.0  # elastic modulus
    mu_nl: float = 1.0  # nonlocal parameter
    tau_d: float = 1.0  # viscous damping
    a2: float = 1.0  # layer stiffness
    b2: float = 1.0  # layer damping

    def __post_init__(self):
        for name in ("l", "rho", "D", "C_mod", "mu_nl", "tau_d", "a2", "b2"):
            if getattr(self, name) <= 0:
                raise InvalidParams(f"{name} must be strictly positive")
        if self.n_grid < 4:
            raise InvalidParams("n_grid must be at least 4")


@dataclass(frozen=True)
class L2ExampleParams:
    """Truncation size of the diagonal block system (blocks 0..K)."""

    K: int = 40

    def __post_init__(self):
        if self.K < 2:
            raise InvalidParams("K must be at least 2")


def build_nanorod(params: NanorodParams) -> PhPencil:
    """Assemble the 5-field nanorod model on a uniform interior grid.

    The spatial derivative is the centered difference with eliminated
    boundary rows, which is exactly skew-symmetric; the two derivative
    couplings therefore cancel in the Hermitian part of A, making the
    dissipativity of A hold to rounding: the Hermitian part is
    diag(0, -b2*I, -(C*D*tau_d + mu*b2)*I, 0, 0).
    """
    n = params.n_grid
    h = params.l / (n + 1)
    # centered first difference on interior points, boundary values eliminated
    diff = (np.eye(n, k=1) - np.eye(n, k=-1)) / (2.0 * h)
    I = np.eye(n)
    Z = np.zeros((n, n))
    damp3 = params.C_mod * params.D * params.tau_d + params.mu_nl * params.b2
    A = np.block(
        [
            [Z, I, Z, Z, Z],
            [-I, -params.b2 * I, Z, Z, diff],
            [Z, Z, -damp3 * I, -I, I],
            [Z, Z, I, Z, Z],
            [Z, diff, -I, Z, Z],
        ]
    )
    E = np.kron(np.diag([1.0, 1.0, 1.0, 1.0, 0.0]), I)
    q_diag = [
        params.a2,
        1.0 / (params.rho * params.D),
        1.0 / (params.mu_nl * params.rho * params.D),
        params.C_mod * params.D + params.mu_nl * params.a2,
        1.0,
    ]
    Q = np.kron(np.diag(q_diag), I)
    return PhPencil(E, A, Q)


def _l2_blocks(K: int):
    a_blocks, e_blocks, b_rows = [], [], []
    for k in range(K + 1):
        if k == 0:
            a_blocks.append(np.array([[0.0, -1.0], [1.0, 0.0]]))
            e_blocks.append(np.diag([1.0, 0.0]))
            b_rows.append(np.array([0.0, 1.0]))
        else:
            s = np.sqrt(k**4 + 1.0)
            a_blocks.append(np.array([[0.0, s], [-s, -2.0]]))
            e_blocks.append(np.eye(2))
            b_rows.append(np.array([0.0, float(k) ** 1.25]))
    A = scipy.linalg.block_diag(*a_blocks)
    E = scipy.linalg.block_diag(*e_blocks)
    B = np.concatenate(b_rows)[:, None]
    return A, E, B


def build_l2_example(params: L2ExampleParams) -> MatrixPencil:
    """Truncated diagonal block system closed by a scalar feedback chain.

    State dimension is 2(K+1) + 2: blocks 0..K plus two coupling scalars.
    The big pencil is cal_E = blkdiag(E, 0, 0) and
    cal_A = [[A, B, 0], [-B^T, 0, 1], [0, -1, 0]].
    """
    A, E, B = _l2_blocks(params.K)
    m = A.shape[0]
    cal_E = np.zeros((m + 2, m + 2))
    cal_E[:m, :m] = E
    cal_A = np.zeros((m + 2, m + 2))
    cal_A[:m, :m] = A
    cal_A[:m, m] = B[:, 0]
    cal_A[m, :m] = -B[:, 0]
    cal_A[m, m + 1] = 1.0
    cal_A[m + 1, m] = -1.0
    return MatrixPencil(cal_E, cal_A)


def m_k_resolvent(k: int, lam: complex) -> np.ndarray:
    """Closed-form 2x2 resolvent of block k: (lam*E_k - A_k)^{-1}.

    For k = 0 this is [[0, -1], [1, lam]]; for k >= 1 it is
    [[lam+2, s], [-s, lam]] / (lam*(lam+2) + k^4 + 1) with s = sqrt(k^4+1).
    """
    if k < 0:
        raise InvalidParams("k must be nonnegative")
    lam = complex(lam)
    if k == 0:
        return np.array([[0.0, -1.0], [1.0, lam]], dtype=complex)
    s = np.sqrt(k**4 + 1.0)
    den = lam * (lam + 2.0) + k**4 + 1.0
    if abs(den) <= 1e-14 * (abs(lam) ** 2 + k**4):
        raise PoleHit(f"lambda = {lam} is (numerically) a pole of block k = {k}")
    return np.array([[lam + 2.0, s], [-s, lam]], dtype=complex) / den
