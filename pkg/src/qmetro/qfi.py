"""Cross-operator fidelity matrix and finite-difference QFI formulas.

The central object is the ``d x d`` matrix ``M(rho)`` with entries
``Tr[rho F_i(x)^dag F_j(x+dx)]``; its trace norm is the output fidelity
between the channel at ``x`` and at ``x + dx`` for any pure probe whose
reduced system state is ``rho``. QFI follows from the second-order
expansion ``J = 8 (1 - ||M||_1) / dx^2`` as ``dx -> 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelFamily, DensityMatrix, KrausChannel
from .errors import (
    DegenerateStep,
    DomainError,
    NotUnitary,
    NumericalFailure,
    ShapeMismatch,
)
from .numkit import CERTIFICATE_TOL, STRUCTURAL_TOL, as_complex_matrix, trace_norm

#: Default finite-difference step: small enough that the O(dx^2) truncation of
#: the fidelity expansion is negligible, large enough that 1 - ||M||_1 (of
#: order J dx^2 / 8) survives double-precision cancellation.
DEFAULT_DX = 1e-3

#: Steps below this are rejected outright (catastrophic cancellation).
MIN_DX = 1e-6

#: Largest admissible step for the finite-difference formulas.
MAX_DX = 0.1


@dataclass(frozen=True)
class MMatrix:
    """Cross-operator fidelity matrix at a fixed ``(x, dx)`` pair."""

    matrix: np.ndarray
    x: float
    dx: float

    @property
    def d(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class QfiEstimate:
    """A finite-difference QFI value with its step and truncation metadata.

    ``truncation_estimate`` is ``|J(dx/2) - J(dx)|`` when Richardson
    extrapolation was applied and 0.0 otherwise.
    """

    value: float
    dx_used: float
    extrapolated: bool
    truncation_estimate: float


def cross_products(ch1: KrausChannel, ch2: KrausChannel) -> np.ndarray:
    """All products ``F_i^dag G_j`` stacked as a ``(d, d, m1, m1)`` array."""
    if ch1.d != ch2.d or ch1.m1 != ch2.m1 or ch1.m2 != ch2.m2:
        raise ShapeMismatch(
            f"channel pair mismatch: ({ch1.d},{ch1.m2}x{ch1.m1}) vs "
            f"({ch2.d},{ch2.m2}x{ch2.m1})"
        )
    d = ch1.d
    return np.array(
        [[ch1.kraus_ops[i].conj().T @ ch2.kraus_ops[j] for j in range(d)]
         for i in range(d)]
    )


def m_matrix(rho_s: DensityMatrix, fam: ChannelFamily, x: float, dx: float) -> MMatrix:
    """``M(rho)_ij = Tr[rho F_i(x)^dag F_j(x+dx)]`` for the given family."""
    ch1 = fam(x)
    ch2 = fam(x + dx)
    if rho_s.dim != ch1.m1:
        raise ShapeMismatch(
            f"probe dimension {rho_s.dim} does not match channel input {ch1.m1}"
        )
    prods = cross_products(ch1, ch2)
    m = np.tensordot(prods, rho_s.matrix.T, axes=([2, 3], [0, 1]))
    tn = trace_norm(m)
    if tn > 1.0 + STRUCTURAL_TOL:
        raise NumericalFailure(
            f"||M||_1 = {tn:.12g} exceeds 1; the channel pair is not trace preserving"
        )
    return MMatrix(matrix=m, x=float(x), dx=float(dx))


def fidelity_pure_probe(rho_s: DensityMatrix, fam: ChannelFamily, x: float, dx: float) -> float:
    """Output fidelity ``||M(rho)||_1`` between the channels at ``x`` and ``x+dx``.

    For a bare channel ``rho_s`` must be the pure probe itself; for the
    ancilla-extended channel ``rho_s`` is the reduced system state of a pure
    probe and may be mixed (caller's responsibility).
    """
    return trace_norm(m_matrix(rho_s, fam, x, dx).matrix)


def _check_dx(dx: float) -> float:
    dx = float(dx)
    if dx <= 0 or dx > MAX_DX:
        raise DomainError(f"dx must lie in ({MIN_DX:g}, {MAX_DX:g}], got {dx}")
    if dx < MIN_DX:
        raise DegenerateStep(f"dx = {dx:g} is below the cancellation guard {MIN_DX:g}")
    return dx


def clip_qfi(value: float) -> float:
    """Clip tiny negative QFI values to zero; fail on anything more negative."""
    if value < -CERTIFICATE_TOL:
        raise NumericalFailure(f"QFI estimate {value:.3e} is negative beyond tolerance")
    return max(value, 0.0)


def qfi_pure_probe(
    rho_s: DensityMatrix,
    fam: ChannelFamily,
    x: float = 0.0,
    dx: float = DEFAULT_DX,
    richardson: bool = True,
) -> QfiEstimate:
    """Finite-difference QFI ``8 (1 - ||M||_1) / dx^2`` for a fixed probe.

    With ``richardson`` the estimates at ``dx`` and ``dx/2`` are combined as
    ``(4 J(dx/2) - J(dx)) / 3``, cancelling the leading O(dx^2) truncation
    term; the difference of the two raw estimates is reported as the
    truncation estimate.
    """
    dx = _check_dx(dx)

    def raw(step: float) -> float:
        f = fidelity_pure_probe(rho_s, fam, x, step)
        return 8.0 * (1.0 - f) / step**2

    j1 = raw(dx)
    if not richardson:
        return QfiEstimate(value=clip_qfi(j1), dx_used=dx, extrapolated=False,
                           truncation_estimate=0.0)
    j2 = raw(dx / 2.0)
    combined = (4.0 * j2 - j1) / 3.0
    return QfiEstimate(value=clip_qfi(combined), dx_used=dx, extrapolated=True,
                       truncation_estimate=abs(j2 - j1))


def qfi_from_bures_angle(b: float, dx: float) -> float:
    """Small-angle QFI ``4 b^2 / dx^2`` from a channel Bures angle ``b``."""
    if not 0.0 <= b <= np.pi / 2.0:
        raise DomainError(f"Bures angle must lie in [0, pi/2], got {b}")
    if dx <= 0:
        raise DomainError(f"dx must be positive, got {dx}")
    return 4.0 * b * b / (dx * dx)


def representation_remix(ch: KrausChannel, u) -> KrausChannel:
    """Equivalent Kraus representation ``F~_i = sum_r u_ir F_r`` for unitary ``u``."""
    um = as_complex_matrix(u, "remix matrix")
    if um.shape != (ch.d, ch.d):
        raise ShapeMismatch(f"remix matrix must be {ch.d}x{ch.d}, got {um.shape}")
    if np.linalg.norm(um.conj().T @ um - np.eye(ch.d)) > STRUCTURAL_TOL * np.sqrt(ch.d):
        raise NotUnitary("remix matrix is not unitary within tolerance")
    stacked = np.array(ch.kraus_ops)
    remixed = np.tensordot(um, stacked, axes=([1], [0]))
    return KrausChannel(tuple(remixed))
