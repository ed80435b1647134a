"""Dense complex matrix pencils, resolvents and pseudo-resolvents.

A pencil is the family ``lambda*E - A`` for a square pair ``(E, A)``.  All
operators are concrete complex matrices; norms are spectral norms.  Every
routine here is pure: inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularShift

__all__ = [
    "MatrixPencil",
    "ResolventSample",
    "as_complex_matrix",
    "spectral_norm",
    "kappa_max",
    "probe_regularity",
    "resolvent",
    "resolvent_norm",
    "right_pseudo_resolvent",
    "left_pseudo_resolvent",
]


def as_complex_matrix(M) -> np.ndarray:
    """Validate and return a finite, 2-D complex matrix."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains NaN or Inf entries")
    return M


def spectral_norm(M: np.ndarray) -> float:
    """Largest singular value."""
    M = np.atleast_2d(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def kappa_max(n: int) -> float:
    """Condition-number threshold above which a shift counts as singular."""
    return 1.0 / (1e-12 * n)


@dataclass(frozen=True)
class MatrixPencil:
    """Square pencil ``lambda*E - A`` on C^n."""

    E: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        E = as_complex_matrix(self.E)
        A = as_complex_matrix(self.A)
        if E.shape != A.shape or E.shape[0] != E.shape[1]:
            raise ValueError(f"E and A must be square with equal shape, got {E.shape} and {A.shape}")
        E.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.E.shape[0]

    def shifted(self, lam: complex) -> np.ndarray:
        return lam * self.E - self.A


@dataclass(frozen=True)
class ResolventSample:
    """Norm of the resolvent at one shift, with an invertibility flag."""

    lam: complex
    norm: float
    in_resolvent_set: bool


def probe_regularity(pencil: MatrixPencil, trials: int | None = None, seed: int = 0) -> bool:
    """Pseudo-random check that det(lambda*E - A) is not identically zero.

    Draws ``trials`` shifts (default max(16, n+1): the determinant is a
    polynomial of degree at most n, so n+1 samples cannot all be roots)
    from a disk of radius 2*(||E|| + ||A||) and returns True as soon as
    one of them is numerically invertible.
    """
    n = pencil.n
    if trials is None:
        trials = max(16, n + 1)
    if trials < n + 1:
        raise ValueError(f"trials must be at least n+1 = {n + 1}")
    rng = np.random.default_rng(seed)
    radius = 2.0 * (spectral_norm(pencil.E) + spectral_norm(pencil.A))
    if radius == 0.0:
        return False
    for _ in range(trials):
        r = radius * np.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2.0 * np.pi)
        lam = r * np.exp(1j * phi)
        sig = np.linalg.svd(pencil.shifted(lam), compute_uv=False)
        if sig[-1] > 1e-12 * max(sig[0], 1.0):
            return True
    return False


def _checked_shift(pencil: MatrixPencil, lam: complex) -> np.ndarray:
    M = pencil.shifted(lam)
    sig = np.linalg.svd(M, compute_uv=False)
    if sig[-1] == 0.0 or sig[0] / sig[-1] > kappa_max(pencil.n):
        raise SingularShift(f"lambda = {lam} is outside the resolvent set")
    return M


def resolvent(pencil: MatrixPencil, lam: complex) -> np.ndarray:
    """(lambda*E - A)^{-1}."""
    return np.linalg.inv(_checked_shift(pencil, lam))


def resolvent_norm(pencil: MatrixPencil, lam: complex) -> ResolventSample:
    """Spectral norm of the resolvent, 1/sigma_min of the shifted pencil."""
    sig = np.linalg.svd(pencil.shifted(lam), compute_uv=False)
    ok = sig[-1] > 0.0 and sig[0] / sig[-1] <= kappa_max(pencil.n)
    nrm = float(1.0 / sig[-1]) if sig[-1] > 0.0 else np.inf
    return ResolventSample(lam=lam, norm=nrm, in_resolvent_set=bool(ok))


def right_pseudo_resolvent(pencil: MatrixPencil, lam: complex) -> np.ndarray:
    """(lambda*E - A)^{-1} E."""
    return np.linalg.solve(_checked_shift(pencil, lam), pencil.E)


def left_pseudo_resolvent(pencil: MatrixPencil, lam: complex) -> np.ndarray:
    """E (lambda*E - A)^{-1}."""
    return pencil.E @ np.linalg.inv(_checked_shift(pencil, lam))
