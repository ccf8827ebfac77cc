"""Hypocoercivity indices, staircase forms, and decay certificates.

Tools for linear semi-dissipative systems dx/dt = (J - R) x and their DAE
counterparts E dx/dt = (J - R) x with J skew-Hermitian, R Hermitian positive
semi-definite, and E Hermitian positive semi-definite: the hypocoercivity
index and its short-time decay signature, a unitary staircase normal form
with pencil classification, strict Lyapunov weights with certified decay
rates, and truncated Fourier mode models of Oseen flows on the torus.

Set ``HYPOCO_THREADS`` to pin the BLAS thread count before import; results
are deterministic either way, this only controls thread fan-out.
"""

import os as _os

_threads = _os.environ.get("HYPOCO_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .core import (  # noqa: E402
    DEFAULT_TOL,
    DaeTriple,
    ToleranceConfig,
    hermitian_part,
    min_eigenvalue_hermitian,
    numerical_rank,
    psd_sqrt,
    skew_part,
)
from .hc_index import (  # noqa: E402
    HcIndexReport,
    hc_index,
    hc_index_kalman,
    hc_index_kernel,
    hc_index_sum,
    is_hypocoercive_spectrum,
    short_time_exponent,
)
from .staircase import (  # noqa: E402
    DynamicPart,
    PencilClassification,
    StaircaseError,
    StaircaseForm,
    classify_pencil,
    dae_hc_index,
    dae_short_time_exponent,
    dynamic_part,
    staircase_transform,
)
from .lyapunov import (  # noqa: E402
    LyapunovCertificate,
    ProjectionChain,
    build_weight,
    largest_certified_mu,
    lmi_check,
    projection_chain,
    tune_certificate,
    verify_envelope,
)
from .oseen import (  # noqa: E402
    PARSEVAL,
    ModeState,
    OseenConfig,
    QuantReport,
    alpha_min,
    build_aniso_const_mode,
    build_aniso_sin_system,
    build_isotropic_mode,
    decay_envelope,
    kappa_truncated,
    lambda1_min,
    lambda1_positive_root,
    leray_project,
    mode_unitary,
    pressure_poisson,
    q_matrix,
    quant_report,
    sin_staircase,
    sin_weight,
    velocity_from_vorticity,
    vorticity_coordinates,
)
from .simulate import (  # noqa: E402
    DecayFit,
    DecayReport,
    Trajectory,
    fit_decay,
    full_decay_report,
    propagate_dae,
    propagate_ode,
    propagator_norm,
    random_band_states,
    reconstruct_field,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "DaeTriple",
    "ToleranceConfig",
    "hermitian_part",
    "min_eigenvalue_hermitian",
    "numerical_rank",
    "psd_sqrt",
    "skew_part",
    "HcIndexReport",
    "hc_index",
    "hc_index_kalman",
    "hc_index_kernel",
    "hc_index_sum",
    "is_hypocoercive_spectrum",
    "short_time_exponent",
    "DynamicPart",
    "PencilClassification",
    "StaircaseError",
    "StaircaseForm",
    "classify_pencil",
    "dae_hc_index",
    "dae_short_time_exponent",
    "dynamic_part",
    "staircase_transform",
    "LyapunovCertificate",
    "ProjectionChain",
    "build_weight",
    "largest_certified_mu",
    "lmi_check",
    "projection_chain",
    "tune_certificate",
    "verify_envelope",
    "PARSEVAL",
    "ModeState",
    "OseenConfig",
    "QuantReport",
    "alpha_min",
    "build_aniso_const_mode",
    "build_aniso_sin_system",
    "build_isotropic_mode",
    "decay_envelope",
    "kappa_truncated",
    "lambda1_min",
    "lambda1_positive_root",
    "leray_project",
    "mode_unitary",
    "pressure_poisson",
    "q_matrix",
    "quant_report",
    "sin_staircase",
    "sin_weight",
    "velocity_from_vorticity",
    "vorticity_coordinates",
    "DecayFit",
    "DecayReport",
    "Trajectory",
    "fit_decay",
    "full_decay_report",
    "propagate_dae",
    "propagate_ode",
    "propagator_norm",
    "random_band_states",
    "reconstruct_field",
    "__version__",
]
