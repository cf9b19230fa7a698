"""Deciding when ancillary systems cannot improve the precision limit.

If all cross products ``F_i(x)^dag F_j(x+dx)`` are diagonal in one
orthonormal basis, only the diagonal of the probe state (in that basis)
enters the fidelity matrix, so a pure state with the optimal diagonal
already attains the extended-channel optimum and an ancilla is useless.
This module implements that sufficient condition plus the exact check that
compares the pure-restricted optimum against the certified extended one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelFamily
from .errors import NotConverged, ShapeMismatch
from .qfi import cross_products
from .saddle import SaddleResult

#: Default tolerance for normality/commutation/off-diagonal residuals.
DEFAULT_DIAG_TOL = 1e-8

#: Default slack when comparing pure-restricted and extended fidelities
#: (limited by solver accuracy, not by the algebraic condition).
DEFAULT_QFI_COMPARISON_TOL = 1e-4

#: Seed for the random Hermitian combination used to build the common basis.
_COMBINATION_SEED = 20240817


@dataclass(frozen=True)
class DiagonalizabilityReport:
    """Outcome of a simultaneous-unitary-diagonalizability test.

    ``common_basis`` is present only when ``simultaneous`` is true;
    ``max_offdiag_residual`` is infinite when no basis was attempted.
    """

    simultaneous: bool
    common_basis: np.ndarray | None
    max_offdiag_residual: float
    max_commutator_norm: float


def _offdiag_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def simultaneously_diagonalizable(mats, tol: float = DEFAULT_DIAG_TOL) -> DiagonalizabilityReport:
    """Test whether the given matrices share one orthonormal eigenbasis.

    The test is conservative: each matrix must be normal within ``tol``,
    every pair (including the mixed products ``A_i A_j^dag``) must commute
    within ``tol``, and a candidate basis built from a fixed random Hermitian
    combination must leave every matrix diagonal up to ``tol * ||A_i||_F``.
    Failing any stage reports ``simultaneous=False``; families that are
    similarity- but not unitarily diagonalizable are rejected.
    """
    arrays = [np.asarray(m, dtype=complex) for m in mats]
    if not arrays:
        raise ShapeMismatch("need at least one matrix")
    n = arrays[0].shape[0]
    for a in arrays:
        if a.ndim != 2 or a.shape != (n, n):
            raise ShapeMismatch(f"all matrices must be {n}x{n}, got {a.shape}")

    max_comm = 0.0
    for a in arrays:
        max_comm = max(max_comm, float(np.linalg.norm(a @ a.conj().T - a.conj().T @ a)))
    for i, a in enumerate(arrays):
        for b in arrays[i + 1:]:
            max_comm = max(max_comm, float(np.linalg.norm(a @ b - b @ a)))
            max_comm = max(
                max_comm,
                float(np.linalg.norm(a @ b.conj().T - b.conj().T @ a)),
            )
    if max_comm > tol:
        return DiagonalizabilityReport(
            simultaneous=False,
            common_basis=None,
            max_offdiag_residual=np.inf,
            max_commutator_norm=max_comm,
        )

    rng = np.random.default_rng(_COMBINATION_SEED)
    combo = np.zeros((n, n), dtype=complex)
    for a in arrays:
        herm = 0.5 * (a + a.conj().T)
        anti = 0.5j * (a.conj().T - a)  # Hermitian image of the anti-Hermitian part
        combo += rng.uniform(0.1, 1.0) * herm + rng.uniform(0.1, 1.0) * anti
    _, basis = np.linalg.eigh(combo)

    max_resid = 0.0
    for a in arrays:
        resid = _offdiag_norm(basis.conj().T @ a @ basis)
        max_resid = max(max_resid, resid)
        if resid > tol * max(1.0, float(np.linalg.norm(a))):
            return DiagonalizabilityReport(
                simultaneous=False,
                common_basis=None,
                max_offdiag_residual=max_resid,
                max_commutator_norm=max_comm,
            )
    return DiagonalizabilityReport(
        simultaneous=True,
        common_basis=basis,
        max_offdiag_residual=max_resid,
        max_commutator_norm=max_comm,
    )


def ancilla_unnecessary_sufficient(
    fam: ChannelFamily,
    x: float,
    dx: float,
    tol: float = DEFAULT_DIAG_TOL,
) -> DiagonalizabilityReport:
    """Sufficient condition for ancilla uselessness at one ``(x, dx)`` pair.

    Applies :func:`simultaneously_diagonalizable` to all ``d^2`` cross
    products ``F_i(x)^dag F_j(x+dx)``. A ``True`` report proves ancillas
    cannot help; ``False`` is inconclusive on its own.
    """
    prods = cross_products(fam(x), fam(x + dx))
    flat = [prods[i, j] for i in range(prods.shape[0]) for j in range(prods.shape[1])]
    return simultaneously_diagonalizable(flat, tol=tol)


def ancilla_needed_exact(
    res: SaddleResult,
    pure_value: float,
    tol: float = DEFAULT_QFI_COMPARISON_TOL,
) -> bool:
    """Exact ancilla-necessity check from a converged saddle result.

    Returns ``False`` (ancilla unnecessary) when the optimal reduced state is
    pure within ``tol`` or when the pure-restricted fidelity matches the
    extended optimum within ``tol``. A mixed optimizer alone proves nothing
    when the optimum is degenerate, so the fidelity comparison is the
    operative test.
    """
    if not res.converged:
        raise NotConverged("ancilla_needed_exact requires a converged saddle result")
    if res.rho_opt.purity() >= 1.0 - tol:
        return False
    if pure_value <= res.upper + tol:
        return False
    return True
