"""Staircase condensed form for semi-dissipative pencils ``E x' = (J - R) x``.

A unitary congruence P brings the triple into a five-block form exposing the
structural split between dynamic, algebraic, and redundant variables:

    E -> P E P^H   nonzero only in the leading 2x2 block grid (PD there),
    R -> P R P^H   nonzero only in the leading 3x3 block grid,
    J -> P J P^H   with an invertible coupling block J_41 tying block 4
                   (Lagrange-multiplier rows) to block 1, zero rows/columns
                   on block 5, and zeros at (4,2), (4,3), (4,4).

Block sizes ``dims = (n1, n2, n3, n4, n5)`` satisfy ``n4 = n1``; ``n5 > 0``
signals a singular pencil.  The index-reduced dynamics live on block 2 with
generator ``A22_hat`` after eliminating block 3; blocks 1 and 4 are slaved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_TOL,
    DaeTriple,
    ToleranceConfig,
    hermitian_part,
    numerical_rank,
)
from .hc_index import HcIndexReport, hc_index, short_time_exponent

__all__ = [
    "StaircaseError",
    "StaircaseForm",
    "PencilClassification",
    "DynamicPart",
    "staircase_transform",
    "classify_pencil",
    "dynamic_part",
    "dae_hc_index",
    "dae_short_time_exponent",
]

# Condition number on certified-invertible blocks beyond which a warning is
# attached to the form (the transform still succeeds; rank decisions were
# already made at rank_rtol).
_COND_WARN = 1e8


class StaircaseError(RuntimeError):
    """Raised when the computed form violates its own structure guarantees."""


@dataclass(frozen=True)
class StaircaseForm:
    """Unitary congruence to staircase structure.

    ``P`` is unitary with ``X_check = P X P^H`` for X in {E, J, R};
    ``dims = (n1, n2, n3, n4, n5)`` are the block sizes in order.
    ``warnings`` carries non-fatal conditioning notes.
    """

    P: np.ndarray
    dims: tuple
    E_check: np.ndarray
    J_check: np.ndarray
    R_check: np.ndarray
    warnings: tuple = ()

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def offsets(self):
        """Cumulative block offsets, length 6."""
        return np.concatenate([[0], np.cumsum(self.dims)])

    def block(self, M, i: int, j: int) -> np.ndarray:
        """Extract block (i, j) of a matrix in staircase coordinates, 1-based."""
        o = self.offsets()
        return M[o[i - 1]:o[i], o[j - 1]:o[j]]


@dataclass(frozen=True)
class PencilClassification:
    """Regularity, differentiation index, and spectral verdict of a pencil.

    ``dae_index`` is None for singular pencils.  ``negative_hypocoercive``
    means: regular, index at most 2, and every finite eigenvalue in the open
    left half plane (vacuously true when no finite eigenvalues exist).
    """

    regular: bool
    dae_index: Optional[int]
    finite_eigenvalues: np.ndarray
    negative_hypocoercive: bool
    dims: tuple


@dataclass(frozen=True)
class DynamicPart:
    """Reduced ODE ``E22 y2' = A22_hat y2`` on the dynamic block.

    ``present`` is False when the dynamic block is empty, in which case both
    matrices are 0x0.  ``E22`` is Hermitian positive definite and
    ``A22_hat`` semi-dissipative whenever present.
    """

    present: bool
    E22: np.ndarray
    A22_hat: np.ndarray


def _blkdiag(*blocks):
    mats = [np.asarray(b, dtype=complex) for b in blocks if b.shape[0] > 0 or b.shape[1] > 0]
    if not mats:
        return np.zeros((0, 0), dtype=complex)
    return scipy.linalg.block_diag(*mats)


def _rank_split_svd(s, cutoff):
    """Count singular values above an absolute cutoff.

    The cutoff is ``rank_rtol`` times the GLOBAL scale of the triple, not the
    local block's largest singular value: blocks that vanish in exact
    arithmetic carry congruence noise near eps * scale, and a block-relative
    threshold would count that noise as full rank.
    """
    if s.size == 0:
        return 0
    return int(np.count_nonzero(s > cutoff))


def staircase_transform(t: DaeTriple, tol: ToleranceConfig = DEFAULT_TOL) -> StaircaseForm:
    """Compute the staircase form of a semi-dissipative triple.

    Three unitary congruences are chained.  First a spectral split of E
    orders its positive eigenspace in front.  Second, on the E-kernel the
    matrix M = (J - R)_22 is compressed to an invertible leading part; the
    kernel of the stacked matrix [M; M^H] identifies the common null space
    of M and M^H (they coincide because the skew part of M is normal on the
    relevant subspace), which gives direct singular-value control on both
    row and column spaces at once.  Third, the remaining coupling block of
    J is diagonalized by SVD to expose the invertible J_41.

    Raises :class:`StaircaseError` if the resulting matrices violate the
    guaranteed zero patterns beyond ``1e-8 * scale``.
    """
    n = t.n
    E, J, R = t.E, t.J, t.R
    scale = max(
        float(np.linalg.norm(E, 2)),
        float(np.linalg.norm(J, 2)),
        float(np.linalg.norm(R, 2)),
        1.0,
    )

    cutoff = tol.rank_rtol * scale

    # Step 1: split off the positive eigenspace of E.
    w, U = np.linalg.eigh(hermitian_part(E))
    nt1 = int(np.count_nonzero(w > cutoff))
    order = np.argsort(-w)
    P1 = U[:, order].conj().T
    E1 = P1 @ E @ P1.conj().T
    J1 = P1 @ J @ P1.conj().T
    R1 = P1 @ R @ P1.conj().T

    # Step 2: compress M = (J - R)_22 on the kernel of E.
    rest = n - nt1
    if rest > 0:
        M = (J1 - R1)[nt1:, nt1:]
        stacked = np.vstack([M, M.conj().T])
        U2, s2, V2h = np.linalg.svd(stacked)
        nt2 = _rank_split_svd(s2, cutoff)
        P22 = V2h
        P2 = _blkdiag(np.eye(nt1, dtype=complex), P22)
    else:
        nt2 = 0
        P2 = np.eye(n, dtype=complex)
    E2 = P2 @ E1 @ P2.conj().T
    J2 = P2 @ J1 @ P2.conj().T
    R2 = P2 @ R1 @ P2.conj().T

    # Step 3: SVD of the coupling block of J between the E-kernel remainder
    # and the E-positive space.
    nt3 = n - nt1 - nt2
    J31 = J2[nt1 + nt2:, :nt1]
    if nt3 > 0 and nt1 > 0:
        U31, s31, V31h = np.linalg.svd(J31, full_matrices=True)
        n1 = _rank_split_svd(s31, cutoff)
    else:
        U31 = np.eye(nt3, dtype=complex)
        V31h = np.eye(nt1, dtype=complex)
        n1 = 0
    P3 = _blkdiag(V31h, np.eye(nt2, dtype=complex), U31.conj().T)
    E3 = P3 @ E2 @ P3.conj().T
    J3 = P3 @ J2 @ P3.conj().T
    R3 = P3 @ R2 @ P3.conj().T

    P = P3 @ P2 @ P1
    dims = (n1, nt1 - n1, nt2, n1, nt3 - n1)
    form = StaircaseForm(
        P=P, dims=dims, E_check=E3, J_check=J3, R_check=R3, warnings=()
    )
    warnings = _verify_structure(form, t, scale, tol)
    if warnings:
        form = StaircaseForm(
            P=P, dims=dims, E_check=E3, J_check=J3, R_check=R3,
            warnings=tuple(warnings),
        )
    return form


def _pattern_mask(dims):
    """Boolean masks of entries REQUIRED to vanish for (E, J, R)."""
    n1, n2, n3, n4, n5 = dims
    o = np.concatenate([[0], np.cumsum(dims)])
    n = o[-1]

    def zero_blocks(pairs):
        mask = np.zeros((n, n), dtype=bool)
        for i, j in pairs:
            mask[o[i - 1]:o[i], o[j - 1]:o[j]] = True
        return mask

    e_zero = zero_blocks(
        [(i, j) for i in range(1, 6) for j in range(1, 6) if i > 2 or j > 2]
    )
    r_zero = zero_blocks(
        [(i, j) for i in range(1, 6) for j in range(1, 6) if i > 3 or j > 3]
    )
    j_zero = zero_blocks(
        [(4, 2), (4, 3), (4, 4), (4, 5), (2, 4), (3, 4), (5, 4),
         (5, 1), (5, 2), (5, 3), (5, 5), (1, 5), (2, 5), (3, 5), (4, 5)]
    )
    return e_zero, j_zero, r_zero


def _verify_structure(form, t, scale, tol):
    """Check unitarity, patterns, and certified invertibility; raise on failure."""
    n = form.n
    dims = form.dims
    pattern_tol = 1e-8 * scale
    P = form.P
    unit_dev = float(np.linalg.norm(P @ P.conj().T - np.eye(n)))
    if unit_dev > 1e-8 * max(1.0, np.sqrt(n)):
        raise StaircaseError(f"transform lost unitarity, ||PP^H - I|| = {unit_dev:.3e}")

    e_zero, j_zero, r_zero = _pattern_mask(dims)
    for name, M, mask in (
        ("E", form.E_check, e_zero),
        ("J", form.J_check, j_zero),
        ("R", form.R_check, r_zero),
    ):
        if mask.any():
            dev = float(np.max(np.abs(M[mask])))
            if dev > pattern_tol:
                raise StaircaseError(
                    f"{name} violates its staircase zero pattern by {dev:.3e} "
                    f"(allowed {pattern_tol:.3e})"
                )

    n1, n2, n3, n4, n5 = dims
    o = form.offsets()
    warnings = []

    lead = n1 + n2
    if lead > 0:
        E_lead = form.E_check[:lead, :lead]
        lam = float(np.linalg.eigvalsh(hermitian_part(E_lead))[0])
        if lam <= tol.rank_rtol * scale * 1e-2:
            raise StaircaseError(
                f"leading block of E is not positive definite, lambda_min = {lam:.3e}"
            )

    if n1 > 0:
        J41 = form.block(form.J_check, 4, 1)
        s = np.linalg.svd(J41, compute_uv=False)
        if _rank_split_svd(s, tol.rank_rtol * scale) < n1:
            raise StaircaseError("coupling block J_41 is singular")
        if s[-1] > 0 and s[0] / s[-1] > _COND_WARN:
            warnings.append(
                f"J_41 badly conditioned (cond = {s[0] / s[-1]:.2e})"
            )

    if n3 > 0:
        A33 = form.block(form.J_check, 3, 3) - form.block(form.R_check, 3, 3)
        s = np.linalg.svd(A33, compute_uv=False)
        if _rank_split_svd(s, tol.rank_rtol * scale) < n3:
            raise StaircaseError("algebraic block J_33 - R_33 is singular")
        if s[-1] > 0 and s[0] / s[-1] > _COND_WARN:
            warnings.append(
                f"J_33 - R_33 badly conditioned (cond = {s[0] / s[-1]:.2e})"
            )
    return warnings


def dynamic_part(form: StaircaseForm, tol: ToleranceConfig = DEFAULT_TOL) -> DynamicPart:
    """Eliminate the algebraic block and return the reduced dynamic ODE.

    With A_check = J_check - R_check, the reduced generator is

        A22_hat = A22            (no algebraic block), or
        A22_hat = A22 - A23 A33^{-1} A32,

    the Schur complement after solving the block-3 constraint.  Raises
    ``ValueError`` on singular pencils (n5 > 0).
    """
    n1, n2, n3, n4, n5 = form.dims
    if n5 > 0:
        raise ValueError("singular pencil: dynamic part undefined (n5 > 0)")
    if n2 == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return DynamicPart(present=False, E22=empty, A22_hat=empty)
    A = form.J_check - form.R_check
    E22 = form.block(form.E_check, 2, 2)
    A22 = form.block(A, 2, 2)
    if n3 > 0:
        A23 = form.block(A, 2, 3)
        A32 = form.block(A, 3, 2)
        A33 = form.block(A, 3, 3)
        A22_hat = A22 - A23 @ np.linalg.solve(A33, A32)
    else:
        A22_hat = A22
    lam = float(np.linalg.eigvalsh(hermitian_part(A22_hat))[-1])
    scale = max(1.0, float(np.linalg.norm(A22_hat, 2)))
    if lam > 1e-8 * scale:
        raise StaircaseError(
            f"reduced generator lost semi-dissipativity, lambda_max(H) = {lam:.3e}"
        )
    return DynamicPart(present=True, E22=E22, A22_hat=A22_hat)


def classify_pencil(t: DaeTriple, tol: ToleranceConfig = DEFAULT_TOL) -> PencilClassification:
    """Classify regularity, index, and eigenvalue locations of (E, J - R).

    Regularity combines the structural test (n5 == 0) with full rank of
    ``lambda0 E - A`` at three pseudo-random points on a circle enclosing
    the spectrum (fixed seed, so classification is reproducible).  The
    finite eigenvalues are those of the reduced dynamic generator.
    """
    form = staircase_transform(t, tol)
    n1, n2, n3, n4, n5 = form.dims
    n = t.n
    A = t.A

    regular = n5 == 0
    rng = np.random.default_rng(20240817)
    radius = 1.0 + float(np.linalg.norm(A, 2)) / max(float(np.linalg.norm(t.E, 2)), 1.0)
    for theta in rng.uniform(0.0, 2.0 * np.pi, size=3):
        lam0 = radius * np.exp(1j * theta)
        if numerical_rank(lam0 * t.E - A, tol) < n:
            regular = False

    if n5 > 0:
        dae_index = None
    elif n1 > 0:
        dae_index = 2
    elif n3 > 0:
        dae_index = 1
    else:
        dae_index = 0

    if regular and n2 > 0:
        dyn = dynamic_part(form, tol)
        finite = np.linalg.eigvals(np.linalg.solve(dyn.E22, dyn.A22_hat))
        finite = finite[np.lexsort((finite.imag, finite.real))]
    else:
        finite = np.zeros(0, dtype=complex)

    if regular and finite.size:
        thr = tol.coercivity_rtol * max(1.0, float(np.abs(finite).max()))
        neg_hc = bool(np.max(finite.real) < -thr)
    else:
        neg_hc = regular
    return PencilClassification(
        regular=regular,
        dae_index=dae_index,
        finite_eigenvalues=finite,
        negative_hypocoercive=neg_hc,
        dims=form.dims,
    )


def _weighted_generator(form: StaircaseForm, tol: ToleranceConfig):
    """Return S^{-1} A22_hat S^{-1} with S = E22^{1/2} (the E-weighted generator)."""
    dyn = dynamic_part(form, tol)
    if not dyn.present:
        raise ValueError("trivial dynamics: the dynamic block is empty")
    w, V = np.linalg.eigh(hermitian_part(dyn.E22))
    if w[0] <= 0.0:
        raise StaircaseError("E22 is not positive definite")
    S_inv = (V / np.sqrt(w)) @ V.conj().T
    return S_inv @ dyn.A22_hat @ S_inv


def dae_hc_index(t, m_max=None,
                 tol: ToleranceConfig = DEFAULT_TOL) -> HcIndexReport:
    """Hypocoercivity index of the E-weighted dynamic generator.

    Accepts a triple or an already computed staircase form.  The reduced
    flow on block 2 in E-weighted coordinates is generated by
    ``G = E22^{-1/2} A22_hat E22^{-1/2}``, whose skew/Hermitian split feeds
    the standard index computation.  Empty dynamics (n2 == 0) yield index 0
    with infinite coercivity constant: every solution is stationary zero
    after slaving, so decay is immediate.
    """
    form = t if isinstance(t, StaircaseForm) else staircase_transform(t, tol)
    n1, n2, n3, n4, n5 = form.dims
    if n5 > 0:
        raise ValueError("singular pencil: index undefined (n5 > 0)")
    if n2 == 0:
        return HcIndexReport(m_hc=0, kappa=np.inf, m_max=0)
    G = _weighted_generator(form, tol)
    J = (G - G.conj().T) / 2.0
    R = -(G + G.conj().T) / 2.0
    # Rounding can leave tiny negative eigenvalues in R; clamp within psd_rtol.
    lam = float(np.linalg.eigvalsh(R)[0])
    if lam < 0.0:
        R = R - min(lam, 0.0) * np.eye(R.shape[0])
    return hc_index(J, R, m_max=m_max, tol=tol)


def dae_short_time_exponent(t: DaeTriple, t_grid=None,
                            tol: ToleranceConfig = DEFAULT_TOL):
    """Short-time exponent of the E-weighted propagator on the dynamic block.

    Fits ``1 - ||e^{G s}||_2 ~ c s^a`` for the weighted reduced generator G;
    consistent solutions obey ``||x(s)||_E = ||e^{G s} y2(0)||_2``, so the
    fitted a matches 2 m + 1 for the index m of the reduced flow.
    """
    form = staircase_transform(t, tol)
    G = _weighted_generator(form, tol)
    return short_time_exponent(-G, t_grid=t_grid)
