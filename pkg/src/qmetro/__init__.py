"""Ultimate precision limits for parameter estimation under Kraus channels.

Computes maximal quantum Fisher information and Bures angles for arbitrary
finite-dimensional channel families, finds optimal probe states via a
certified convex-concave saddle solver, and decides when ancillas cannot
help. See the README for the companion ``qmetro`` command-line interface.
"""

from .ancilla import (
    DiagonalizabilityReport,
    ancilla_needed_exact,
    ancilla_unnecessary_sufficient,
    simultaneously_diagonalizable,
)
from .channels import (
    ChannelFamily,
    DensityMatrix,
    KrausChannel,
    apply,
    counterexample_8d,
    dephasing,
    extend_with_identity_ancilla,
    n_fold,
    partial_trace,
    spontaneous_emission,
    tensor,
    unitary_family,
    validate,
    xy_noise,
)
from .errors import (
    AngleSpreadExceeded,
    CapacityError,
    CompletenessViolation,
    DegenerateStep,
    DomainError,
    NotConverged,
    NotUnitary,
    NumericalFailure,
    QmetroError,
    ShapeMismatch,
)
from .numkit import (
    HermitianEig,
    SingularValueDecomposition,
    hermitian_eig,
    kron,
    operator_norm,
    svd,
    trace_norm,
)
from .qfi import (
    MMatrix,
    QfiEstimate,
    fidelity_pure_probe,
    m_matrix,
    qfi_from_bures_angle,
    qfi_pure_probe,
    representation_remix,
)
from .saddle import (
    ProbeState,
    SaddleResult,
    best_rho,
    best_w,
    k_w,
    max_qfi_extended,
    optimal_probe,
    pure_restricted_min,
    solve_saddle,
)
from .unitary import (
    EigenAngles,
    bures_angle_unitaries,
    eigen_angles,
    max_qfi_unitary,
    precision_bound,
)

__version__ = "0.1.0"
