"""Closed-form precision limits for unitary channels via eigen-angle spreads."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AngleSpreadExceeded, DomainError, NotUnitary
from .numkit import STRUCTURAL_TOL, as_complex_matrix, hermitian_eig


@dataclass(frozen=True)
class EigenAngles:
    """Angles ``theta_j`` in ``(-pi, pi]`` with ``exp(-i theta_j)`` the unitary's
    eigenvalues, sorted non-increasing."""

    angles: np.ndarray

    @property
    def spread(self) -> float:
        return float(self.angles[0] - self.angles[-1])


def _require_unitary(u: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = as_complex_matrix(u, name)
    if m.shape[0] != m.shape[1]:
        raise NotUnitary(f"{name} must be square, got {m.shape}")
    dim = m.shape[0]
    residual = np.linalg.norm(m.conj().T @ m - np.eye(dim))
    if residual > STRUCTURAL_TOL * np.sqrt(dim):
        raise NotUnitary(f"{name} deviates from unitarity by {residual:.3e}")
    return m


def eigen_angles(u) -> EigenAngles:
    """Eigen-angles of a unitary, on the branch ``(-pi, pi]`` (pi wins at the cut)."""
    m = _require_unitary(u)
    eigs = np.linalg.eigvals(m)
    theta = -np.angle(eigs)
    theta[theta <= -np.pi] += 2.0 * np.pi
    theta = np.sort(theta)[::-1]
    return EigenAngles(angles=theta)


def bures_angle_unitaries(u1, u2) -> float:
    """Bures angle between two unitary channels: half the eigen-angle spread
    of ``u1^dag u2``.

    Raises
    ------
    AngleSpreadExceeded
        When the spread exceeds pi, outside the closed-form regime; no
        fallback is attempted.
    """
    a = _require_unitary(u1, "u1")
    b = _require_unitary(u2, "u2")
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    spread = eigen_angles(a.conj().T @ b).spread
    if spread > np.pi:
        raise AngleSpreadExceeded(
            f"eigen-angle spread {spread:.6f} exceeds pi; closed form does not apply"
        )
    return 0.5 * spread


def max_qfi_unitary(h, t: float, n_probes: int) -> float:
    """Maximal QFI for ``n_probes`` parallel probes under ``exp(-i h x t)``:
    ``N^2 (lambda_max - lambda_min)^2 t^2`` (Heisenberg scaling)."""
    if n_probes < 1:
        raise DomainError("n_probes must be >= 1")
    eig = hermitian_eig(h)
    spread = float(eig.eigenvalues[-1] - eig.eigenvalues[0])
    return (n_probes * spread * float(t)) ** 2


def precision_bound(j: float, n_repeats: int) -> float:
    """Smallest achievable standard deviation ``1 / sqrt(n J)`` for QFI ``j``
    over ``n_repeats`` independent runs."""
    if j <= 0:
        raise DomainError(f"QFI must be positive, got {j}")
    if n_repeats < 1:
        raise DomainError("n_repeats must be >= 1")
    return 1.0 / np.sqrt(n_repeats * j)
