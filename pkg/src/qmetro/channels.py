"""Quantum channels as Kraus-operator families, plus the built-in channel zoo.

A channel maps an ``m1``-dimensional input to an ``m2``-dimensional output via
``rho -> sum_j F_j rho F_j^dag`` with ``sum_j F_j^dag F_j = I``. A
:class:`ChannelFamily` is a map from a real parameter ``x`` to such a channel
with fixed Kraus rank and dimensions; families expose point evaluation only,
all derivative-like quantities downstream are finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import (
    CapacityError,
    CompletenessViolation,
    DomainError,
    ShapeMismatch,
)
from .numkit import STRUCTURAL_TOL, as_complex_matrix, dimension_cap

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    Construction validates all three properties (tolerance
    ``STRUCTURAL_TOL``); the stored array is read-only.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise ShapeMismatch(f"density matrix must be square, got {m.shape}")
        if np.linalg.norm(m - m.conj().T) > STRUCTURAL_TOL * max(1.0, np.linalg.norm(m)):
            raise DomainError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > STRUCTURAL_TOL or abs(np.trace(m).imag) > STRUCTURAL_TOL:
            raise DomainError(f"density matrix trace {np.trace(m):.12g} is not 1")
        eigs = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if eigs[0] < -STRUCTURAL_TOL:
            raise DomainError(f"density matrix has negative eigenvalue {eigs[0]:.3e}")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        """Tr[rho^2] in [1/dim, 1]."""
        return float(np.trace(self.matrix @ self.matrix).real)

    @staticmethod
    def pure(vector) -> "DensityMatrix":
        """Projector onto a state vector (normalized internally)."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0 or not np.all(np.isfinite(v)):
            raise DomainError("state vector must be finite and nonzero")
        v = v / norm
        return DensityMatrix(np.outer(v, v.conj()))

    @staticmethod
    def maximally_mixed(dim: int) -> "DensityMatrix":
        if dim < 1:
            raise DomainError("dimension must be positive")
        return DensityMatrix(np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True)
class KrausChannel:
    """Ordered family of Kraus operators, each ``m2 x m1``.

    Construction only coerces the operators to complex arrays; full
    validation (uniform shapes, completeness) is performed by
    :func:`validate` so that deliberately broken channels can be inspected.
    """

    kraus_ops: tuple

    def __post_init__(self):
        if len(self.kraus_ops) == 0:
            raise DomainError("a channel needs at least one Kraus operator")
        ops = tuple(_readonly(as_complex_matrix(op, f"Kraus operator {i}"))
                    for i, op in enumerate(self.kraus_ops))
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def d(self) -> int:
        """Kraus rank (number of operators, zero operators included)."""
        return len(self.kraus_ops)

    @property
    def m1(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def m2(self) -> int:
        return self.kraus_ops[0].shape[0]


def validate(ch: KrausChannel) -> None:
    """Check uniform operator shapes and Kraus completeness.

    Raises
    ------
    ShapeMismatch
        If the operators do not all share the same ``m2 x m1`` shape.
    CompletenessViolation
        If ``||sum_j F_j^dag F_j - I||_F`` exceeds ``STRUCTURAL_TOL``;
        the exception carries the residual norm.
    """
    shape = ch.kraus_ops[0].shape
    for i, op in enumerate(ch.kraus_ops):
        if op.shape != shape:
            raise ShapeMismatch(
                f"Kraus operator {i} has shape {op.shape}, expected {shape}"
            )
    acc = np.zeros((ch.m1, ch.m1), dtype=complex)
    for op in ch.kraus_ops:
        acc += op.conj().T @ op
    residual = float(np.linalg.norm(acc - np.eye(ch.m1)))
    if residual > STRUCTURAL_TOL:
        raise CompletenessViolation(residual)


def apply(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Apply the channel: ``rho -> sum_j F_j rho F_j^dag``."""
    shape = ch.kraus_ops[0].shape
    for i, op in enumerate(ch.kraus_ops):
        if op.shape != shape:
            raise ShapeMismatch(f"Kraus operator {i} has shape {op.shape}, expected {shape}")
    if rho.dim != ch.m1:
        raise ShapeMismatch(f"state dimension {rho.dim} does not match channel input {ch.m1}")
    out = np.zeros((ch.m2, ch.m2), dtype=complex)
    for op in ch.kraus_ops:
        out += op @ rho.matrix @ op.conj().T
    return DensityMatrix(0.5 * (out + out.conj().T))


@dataclass(frozen=True)
class ChannelFamily:
    """Map ``x -> KrausChannel`` with constant Kraus rank and dimensions.

    ``params`` records the named constants the family was built from (for
    reporting only). Families are immutable; concurrent evaluation at
    distinct ``x`` is safe.
    """

    evaluate: Callable[[float], KrausChannel]
    label: str
    d: int
    m1: int
    m2: int
    params: Mapping[str, float] = field(default_factory=dict)

    def __call__(self, x: float) -> KrausChannel:
        return self.evaluate(float(x))


def tensor(a: ChannelFamily, b: ChannelFamily) -> ChannelFamily:
    """Tensor product of two families sharing the same parameter semantics.

    The Kraus set is all pairwise products ``F_i (x) G_j``, ordered
    lexicographically in ``(i, j)`` so downstream matrices are reproducible.
    """
    cap = dimension_cap()
    if a.m1 * b.m1 > cap or a.m2 * b.m2 > cap:
        raise CapacityError(
            f"tensor dimensions {a.m1 * b.m1}x{a.m2 * b.m2} exceed cap {cap}"
        )

    def evaluate(x: float) -> KrausChannel:
        ca, cb = a(x), b(x)
        ops = tuple(np.kron(fa, fb) for fa in ca.kraus_ops for fb in cb.kraus_ops)
        return KrausChannel(ops)

    params = {f"left.{k}": v for k, v in a.params.items()}
    params.update({f"right.{k}": v for k, v in b.params.items()})
    return ChannelFamily(
        evaluate=evaluate,
        label=f"{a.label}(x){b.label}",
        d=a.d * b.d,
        m1=a.m1 * b.m1,
        m2=a.m2 * b.m2,
        params=params,
    )


def n_fold(fam: ChannelFamily, n: int) -> ChannelFamily:
    """``n`` independent copies of the same family acting in parallel."""
    if n < 1:
        raise DomainError("n must be >= 1")
    out = fam
    for _ in range(n - 1):
        out = tensor(out, fam)
    if n > 1:
        out = ChannelFamily(
            evaluate=out.evaluate,
            label=f"{fam.label}^{n}",
            d=out.d,
            m1=out.m1,
            m2=out.m2,
            params=dict(fam.params, copies=n),
        )
    return out


def extend_with_identity_ancilla(ch: KrausChannel, anc_dim: int | None = None) -> KrausChannel:
    """Extend the channel to act trivially on an ancilla: ``F_j -> F_j (x) I``.

    ``anc_dim`` defaults to the channel input dimension.
    """
    if anc_dim is None:
        anc_dim = ch.m1
    if anc_dim < 1:
        raise DomainError("ancilla dimension must be >= 1")
    cap = dimension_cap()
    if ch.m1 * anc_dim > cap or ch.m2 * anc_dim > cap:
        raise CapacityError(
            f"extended dimensions {ch.m2 * anc_dim}x{ch.m1 * anc_dim} exceed cap {cap}"
        )
    eye = np.eye(anc_dim, dtype=complex)
    return KrausChannel(tuple(np.kron(op, eye) for op in ch.kraus_ops))


def partial_trace(rho: np.ndarray, dim_a: int, dim_b: int, keep: str = "a") -> np.ndarray:
    """Partial trace of a ``(dim_a * dim_b)``-dimensional bipartite matrix."""
    m = as_complex_matrix(rho, "bipartite matrix")
    if m.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ShapeMismatch(f"matrix shape {m.shape} does not factor as {dim_a}x{dim_b}")
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "a":
        return np.einsum("ibjb->ij", t)
    if keep == "b":
        return np.einsum("aiaj->ij", t)
    raise DomainError("keep must be 'a' or 'b'")


# ---------------------------------------------------------------------------
# Channel zoo. All qubit families use the phase rotation
# U(x) = exp(-i sigma_z x / 2) as the parameter encoding.
# ---------------------------------------------------------------------------


def _rz(x: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * x), 0.0], [0.0, np.exp(0.5j * x)]], dtype=complex
    )


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    return eta


def dephasing(eta: float) -> ChannelFamily:
    """Phase rotation with dephasing noise of strength ``1 - eta``.

    Kraus operators ``sqrt((1+eta)/2) U(x)`` and ``sqrt((1-eta)/2) sigma_z U(x)``;
    ``eta = 1`` is the noiseless unitary, ``eta = 0`` kills all coherences.
    """
    eta = _check_eta(eta)
    c1 = np.sqrt((1.0 + eta) / 2.0)
    c2 = np.sqrt((1.0 - eta) / 2.0)

    def evaluate(x: float) -> KrausChannel:
        u = _rz(x)
        return KrausChannel((c1 * u, c2 * (PAULI_Z @ u)))

    return ChannelFamily(evaluate, label="dephasing", d=2, m1=2, m2=2,
                         params={"eta": eta})


def spontaneous_emission(eta: float) -> ChannelFamily:
    """Phase rotation with spontaneous emission; ``eta`` is the survival amplitude
    of the excited level (``eta = 1`` noiseless, ``eta = 0`` full decay)."""
    eta = _check_eta(eta)
    f1 = np.array([[1.0, 0.0], [0.0, np.sqrt(eta)]], dtype=complex)
    f2 = np.array([[0.0, np.sqrt(1.0 - eta)], [0.0, 0.0]], dtype=complex)

    def evaluate(x: float) -> KrausChannel:
        u = _rz(x)
        return KrausChannel((f1 @ u, f2 @ u))

    return ChannelFamily(evaluate, label="spontaneous_emission", d=2, m1=2, m2=2,
                         params={"eta": eta})


def xy_noise(eta: float) -> ChannelFamily:
    """Phase rotation with noise along the X and Y axes."""
    eta = _check_eta(eta)
    c1 = np.sqrt((1.0 + eta) / 2.0)
    c2 = np.sqrt((1.0 - eta) / 2.0)

    def evaluate(x: float) -> KrausChannel:
        u = _rz(x)
        return KrausChannel((c1 * (PAULI_X @ u), c2 * (PAULI_Y @ u)))

    return ChannelFamily(evaluate, label="xy_noise", d=2, m1=2, m2=2,
                         params={"eta": eta})


def unitary_family(h, t: float = 1.0) -> ChannelFamily:
    """Single-Kraus family ``x -> exp(-i h x t)`` generated by a Hermitian ``h``."""
    hm = as_complex_matrix(h, "generator")
    if hm.shape[0] != hm.shape[1]:
        raise ShapeMismatch(f"generator must be square, got {hm.shape}")
    if np.linalg.norm(hm - hm.conj().T) > STRUCTURAL_TOL * max(1.0, np.linalg.norm(hm)):
        raise DomainError("generator must be Hermitian")
    t = float(t)
    w, v = np.linalg.eigh(0.5 * (hm + hm.conj().T))
    dim = hm.shape[0]

    def evaluate(x: float) -> KrausChannel:
        u = (v * np.exp(-1j * w * x * t)) @ v.conj().T
        return KrausChannel((u,))

    return ChannelFamily(evaluate, label="unitary", d=1, m1=dim, m2=dim,
                         params={"t": t})


_CE_SIGNS_NEG = np.array([1, -1, 1, -1, 1j, -1j, 1j, -1j], dtype=complex)
_CE_SIGNS_POS = np.array([1, 1, -1, -1, 1, 1, -1, -1], dtype=complex)


def counterexample_8d() -> ChannelFamily:
    """8-dimensional two-Kraus family whose optimal certificate contraction
    is non-unitary.

    Two branches glued at the origin: for ``x <= 0`` the second Kraus
    operator carries the sign pattern ``(+,-,+,-,i,-i,i,-i)``, for ``x > 0``
    the pattern ``(+,+,-,-,+,+,-,-)``, each scaled by ``|x|`` against a
    ``sqrt(1 - x^2)`` identity component. Valid for ``|x| <= 1``.
    """

    def evaluate(x: float) -> KrausChannel:
        if abs(x) > 1.0:
            raise DomainError(f"counterexample family requires |x| <= 1, got {x}")
        beta = abs(x)
        alpha = np.sqrt(1.0 - x * x)
        signs = _CE_SIGNS_NEG if x <= 0 else _CE_SIGNS_POS
        return KrausChannel((alpha * np.eye(8, dtype=complex), np.diag(beta * signs)))

    return ChannelFamily(evaluate, label="counterexample_8d", d=2, m1=8, m2=8)
