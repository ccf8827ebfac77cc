"""Shared matrix utilities and structural types.

Everything in this package works on dense complex numpy arrays.  This module
holds the small set of decompositions the analysis code leans on: Hermitian /
skew splitting, positive semi-definite square roots, numerical rank decisions,
and extremal eigenvalues of Hermitian matrices.  All rank and positivity
decisions go through explicit relative tolerances so results are reproducible
across BLAS builds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "DaeTriple",
    "as_matrix",
    "hermitian_part",
    "skew_part",
    "psd_sqrt",
    "numerical_rank",
    "min_eigenvalue_hermitian",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances for rank, positivity, and coercivity decisions.

    Parameters
    ----------
    rank_rtol : float
        Singular values below ``rank_rtol * sigma_max`` count as zero.
    psd_rtol : float
        Eigenvalues above ``-psd_rtol * ||M||`` are accepted as nonnegative
        (and clamped where a square root is taken).
    coercivity_rtol : float
        A Hermitian matrix counts as strictly positive definite only when
        ``lambda_min > coercivity_rtol * max(1, scale)``; the ``max(1, .)``
        keeps the floor meaningful for small-norm matrices.

    All three must be strictly positive and at most ``1e-3``.
    """

    rank_rtol: float = 1e-10
    psd_rtol: float = 1e-10
    coercivity_rtol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rtol", "psd_rtol", "coercivity_rtol"):
            value = getattr(self, name)
            if not (0.0 < value <= 1e-3):
                raise ValueError(f"{name} must lie in (0, 1e-3], got {value!r}")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(M) -> np.ndarray:
    """Coerce input to a 2-d complex array with finite entries."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return A


def _require_square(A: np.ndarray) -> np.ndarray:
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def hermitian_part(M) -> np.ndarray:
    """Return ``(M + M^H) / 2``, the Hermitian part of a square matrix."""
    A = _require_square(as_matrix(M))
    return (A + A.conj().T) / 2.0


def skew_part(M) -> np.ndarray:
    """Return ``(M - M^H) / 2``, the skew-Hermitian part of a square matrix.

    Together with :func:`hermitian_part` this reproduces ``M`` exactly up to
    rounding: ``hermitian_part(M) + skew_part(M) == M``.
    """
    A = _require_square(as_matrix(M))
    return (A - A.conj().T) / 2.0


def psd_sqrt(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Unique positive semi-definite square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-psd_rtol * ||M||, 0)`` are treated as rounding noise
    and clamped to zero before taking the root.  Raises ``ValueError`` when
    ``M`` is not Hermitian within tolerance or has an eigenvalue below the
    clamping window.
    """
    A = _require_square(as_matrix(M))
    scale = float(np.linalg.norm(A))
    if float(np.linalg.norm(A - A.conj().T)) > tol.psd_rtol * max(scale, 1.0):
        raise ValueError("psd_sqrt requires a Hermitian matrix")
    w, V = np.linalg.eigh(hermitian_part(A))
    lam_scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[0] < -tol.psd_rtol * max(lam_scale, 1e-300):
        raise ValueError(
            f"matrix is not positive semi-definite: lambda_min = {w[0]:.3e}"
        )
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.conj().T


def numerical_rank(M, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_rtol * sigma_max``.

    The zero matrix (and any empty matrix) has rank 0.  Ties at the cutoff
    resolve toward the smaller rank, so claimed invertibility of retained
    blocks stays robust.
    """
    A = as_matrix(M)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rtol * s[0]))


def min_eigenvalue_hermitian(M, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    The input must be Hermitian within ``psd_rtol`` (relative to its norm);
    the eigenvalue is computed from the exact Hermitian symmetrization.
    """
    A = _require_square(as_matrix(M))
    scale = float(np.linalg.norm(A))
    if float(np.linalg.norm(A - A.conj().T)) > tol.psd_rtol * max(scale, 1.0):
        raise ValueError("min_eigenvalue_hermitian requires a Hermitian matrix")
    if A.shape[0] == 0:
        raise ValueError("empty matrix has no eigenvalues")
    return float(np.linalg.eigvalsh(hermitian_part(A))[0])


def _structural_residuals(E, J, R):
    """Relative symmetry/definiteness residuals of a candidate (E, J, R)."""
    resid = {}
    for name, M, sign in (("E", E, +1), ("J", J, -1), ("R", R, +1)):
        norm = float(np.linalg.norm(M))
        dev = float(np.linalg.norm(M - sign * M.conj().T))
        resid[name + "_sym"] = dev / norm if norm > 0 else 0.0
    for name, M in (("E", E), ("R", R)):
        H = hermitian_part(M)
        norm = float(np.linalg.norm(H))
        if norm > 0:
            lam = float(np.linalg.eigvalsh(H)[0])
            resid[name + "_neg"] = max(-lam, 0.0) / norm
        else:
            resid[name + "_neg"] = 0.0
    return resid


@dataclass(frozen=True)
class DaeTriple:
    """A structured triple ``(E, J, R)`` describing ``E x' = (J - R) x``.

    ``E`` and ``R`` must be Hermitian positive semi-definite and ``J``
    skew-Hermitian, all of the same square size.  Structure is validated on
    construction (within a relative tolerance tied to machine noise from
    congruence transforms) and the stored arrays are defensive read-only
    copies, so triples are safe to share across parallel workers.
    """

    E: np.ndarray
    J: np.ndarray
    R: np.ndarray

    _STRUCT_RTOL = 1e-8

    def __post_init__(self):
        E = _require_square(as_matrix(self.E))
        J = _require_square(as_matrix(self.J))
        R = _require_square(as_matrix(self.R))
        if not (E.shape == J.shape == R.shape):
            raise ValueError(
                f"E, J, R must share one size, got {E.shape}, {J.shape}, {R.shape}"
            )
        resid = _structural_residuals(E, J, R)
        for key, value in resid.items():
            if value > self._STRUCT_RTOL:
                raise ValueError(
                    f"structural violation ({key}): relative residual {value:.3e}"
                )
        for name, M in (("E", E), ("J", J), ("R", R)):
            M = M.copy()
            M.setflags(write=False)
            object.__setattr__(self, name, M)

    @property
    def n(self) -> int:
        return self.E.shape[0]

    @property
    def A(self) -> np.ndarray:
        """The system matrix ``J - R``."""
        return self.J - self.R
