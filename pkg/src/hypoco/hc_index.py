"""Hypocoercivity index of semi-dissipative systems ``dx/dt = (J - R) x``.

With ``J`` skew-Hermitian and ``R`` Hermitian PSD, the index is the smallest
integer m making

    T_m = sum_{j=0}^{m}  J^j R (J^H)^j

strictly positive definite.  Equivalent characterizations: the block row
``[R, JR, ..., J^m R]`` reaches full rank, and the stacked matrix
``[R^{1/2}; R^{1/2} J; ...; R^{1/2} J^m]`` reaches full rank.  All three are
implemented and can be cross-checked through :func:`hc_index`.  A finite
index m governs the short-time propagator norm,

    || e^{(J - R) t} ||_2 = 1 - c t^{2m+1} + O(t^{2m+2}),

which :func:`short_time_exponent` recovers numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    hermitian_part,
    numerical_rank,
)

__all__ = [
    "HcIndexReport",
    "hc_index",
    "hc_index_sum",
    "hc_index_kalman",
    "hc_index_kernel",
    "is_hypocoercive_spectrum",
    "short_time_exponent",
]


@dataclass(frozen=True)
class HcIndexReport:
    """Result of an index computation.

    ``m_hc`` is None when no m up to ``m_max`` certifies coercivity.
    ``kappa`` is the smallest eigenvalue of T_{m_hc} (of T_{m_max} when the
    index is absent), so a present index always comes with ``kappa`` above
    the coercivity threshold.  ``method_agreement`` is filled only by the
    cross-checking front end :func:`hc_index`.
    """

    m_hc: Optional[int]
    kappa: float
    m_max: int
    method_agreement: Optional[dict] = None


def _validated_pair(J, R, tol: ToleranceConfig):
    J = as_matrix(J)
    R = as_matrix(R)
    if J.shape != R.shape or J.shape[0] != J.shape[1]:
        raise ValueError(f"J, R must be square of one size, got {J.shape}, {R.shape}")
    n = J.shape[0]
    if n == 0:
        raise ValueError("empty system")
    normJ = float(np.linalg.norm(J))
    if float(np.linalg.norm(J + J.conj().T)) > 1e-8 * max(normJ, 1.0):
        raise ValueError("J must be skew-Hermitian")
    normR = float(np.linalg.norm(R))
    if float(np.linalg.norm(R - R.conj().T)) > 1e-8 * max(normR, 1.0):
        raise ValueError("R must be Hermitian")
    lam = float(np.linalg.eigvalsh(hermitian_part(R))[0])
    if lam < -tol.psd_rtol * max(normR, 1.0):
        raise ValueError(f"R must be positive semi-definite, lambda_min = {lam:.3e}")
    return J, R


def _coercivity_threshold(R, tol: ToleranceConfig) -> float:
    scale = max(1.0, float(np.linalg.norm(R, 2)))
    return tol.coercivity_rtol * scale


def _checked_m_max(m_max, n: int) -> int:
    if m_max is None:
        return n
    m_max = int(m_max)
    if m_max < 0:
        raise ValueError(f"m_max must be nonnegative, got {m_max}")
    return m_max


def _kappa_at(J, R, m: int) -> float:
    T = hermitian_part(R)
    term = np.asarray(R, dtype=complex)
    for _ in range(m):
        term = J @ term @ J.conj().T
        T = T + hermitian_part(term)
    return float(np.linalg.eigvalsh(T)[0])


def hc_index_sum(J, R, m_max=None, tol: ToleranceConfig = DEFAULT_TOL) -> HcIndexReport:
    """Index via the smallest m with ``T_m`` strictly positive definite."""
    J, R = _validated_pair(J, R, tol)
    n = J.shape[0]
    m_max = _checked_m_max(m_max, n)
    thr = _coercivity_threshold(R, tol)
    T = hermitian_part(R)
    term = np.asarray(R, dtype=complex)
    lam = float(np.linalg.eigvalsh(T)[0])
    for m in range(m_max + 1):
        if m > 0:
            term = J @ term @ J.conj().T
            T = T + hermitian_part(term)
            lam = float(np.linalg.eigvalsh(T)[0])
        if lam > thr:
            return HcIndexReport(m_hc=m, kappa=lam, m_max=m_max)
    return HcIndexReport(m_hc=None, kappa=lam, m_max=m_max)


def hc_index_kalman(J, R, m_max=None, tol: ToleranceConfig = DEFAULT_TOL) -> HcIndexReport:
    """Index via the rank of the block row ``[R, JR, ..., J^m R]``."""
    J, R = _validated_pair(J, R, tol)
    n = J.shape[0]
    m_max = _checked_m_max(m_max, n)
    blocks = [np.asarray(R, dtype=complex)]
    for m in range(m_max + 1):
        if m > 0:
            blocks.append(J @ blocks[-1])
        if numerical_rank(np.hstack(blocks), tol) == n:
            return HcIndexReport(m_hc=m, kappa=_kappa_at(J, R, m), m_max=m_max)
    return HcIndexReport(m_hc=None, kappa=_kappa_at(J, R, m_max), m_max=m_max)


def _rank_truncated_sqrt(R, tol: ToleranceConfig):
    """PSD square root sharing the numerical kernel of R.

    A plain ``psd_sqrt`` maps eigenvalue noise of size eps * ||R|| to
    singular values of size sqrt(eps) * ||R||^{1/2}, which lands above the
    rank cutoff and corrupts rank decisions on the stacked blocks; zeroing
    eigenvalues below ``rank_rtol * lambda_max`` first keeps the two kernels
    identical.
    """
    w, V = np.linalg.eigh(hermitian_part(R))
    w = np.clip(w, 0.0, None)
    if w.size:
        w[w <= tol.rank_rtol * float(w.max())] = 0.0
    return (V * np.sqrt(w)) @ V.conj().T


def hc_index_kernel(J, R, m_max=None, tol: ToleranceConfig = DEFAULT_TOL) -> HcIndexReport:
    """Index via the rank of the stacked matrix ``[R^{1/2} J^j]_{j<=m}``.

    A unit vector x is in the kernel of every listed block exactly when the
    dissipation seen along the first m commutator directions vanishes, so
    full rank of the stack certifies the index.
    """
    J, R = _validated_pair(J, R, tol)
    n = J.shape[0]
    m_max = _checked_m_max(m_max, n)
    Rh = _rank_truncated_sqrt(R, tol)
    blocks = [Rh]
    for m in range(m_max + 1):
        if m > 0:
            blocks.append(blocks[-1] @ J)
        if numerical_rank(np.vstack(blocks), tol) == n:
            return HcIndexReport(m_hc=m, kappa=_kappa_at(J, R, m), m_max=m_max)
    return HcIndexReport(m_hc=None, kappa=_kappa_at(J, R, m_max), m_max=m_max)


def hc_index(J, R, m_max=None, tol: ToleranceConfig = DEFAULT_TOL) -> HcIndexReport:
    """Compute the index with all three methods and report their agreement.

    The returned ``m_hc`` and ``kappa`` come from the defining T_m test;
    ``method_agreement`` records, per method, whether it matched.  The three
    agree on exact-arithmetic inputs, so a False here flags a borderline
    rank decision worth a tolerance review.
    """
    r_sum = hc_index_sum(J, R, m_max=m_max, tol=tol)
    r_kal = hc_index_kalman(J, R, m_max=m_max, tol=tol)
    r_ker = hc_index_kernel(J, R, m_max=m_max, tol=tol)
    agreement = {
        "sum": True,
        "kalman": r_kal.m_hc == r_sum.m_hc,
        "kernel": r_ker.m_hc == r_sum.m_hc,
    }
    return HcIndexReport(
        m_hc=r_sum.m_hc,
        kappa=r_sum.kappa,
        m_max=r_sum.m_max,
        method_agreement=agreement,
    )


def is_hypocoercive_spectrum(C, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True when every eigenvalue of C has real part above the coercivity floor.

    Here C is the generator written as ``dx/dt = -C x``; decay of the
    propagator at some exponential rate is equivalent to ``Re lambda > 0``
    for all eigenvalues of C (given semi-dissipativity, C = R - J with the
    usual structure).  Purely imaginary eigenvalues fail the test.
    """
    C = as_matrix(C)
    if C.shape[0] != C.shape[1]:
        raise ValueError("expected a square matrix")
    thr = tol.coercivity_rtol * max(1.0, float(np.linalg.norm(C, 2)))
    return bool(np.min(np.linalg.eigvals(C).real) > thr)


def _contraction_defect(C, t, norm_c):
    """Return (1 - ||e^{-Ct}||_2, noise_floor) without catastrophic cancellation.

    For ||C|| t < 1/2 the propagator is written as I + N with N summed from
    the exponential series to machine precision; then

        sigma_max^2 = 1 + lambda_max(N + N^H + N^H N)

    and the defect 1 - sigma_max = -lam / (1 + sqrt(1 + lam)) is obtained
    from lam = lambda_max(...) with absolute error on the order of
    eps * ||C|| t.  That resolves defects near 1e-15 which a plain
    expm + svd evaluation (absolute error near 1e-14 regardless of t)
    would drown.  The accompanying floor estimates the noise level so
    callers can discard unresolved points.
    """
    n = C.shape[0]
    x = norm_c * t
    eps = np.finfo(float).eps
    if x < 0.5:
        A = -C * t
        N = np.zeros_like(A)
        term = np.eye(n, dtype=complex)
        for j in range(1, 80):
            term = term @ A / j
            N += term
            if float(np.linalg.norm(term)) < 1e-24 * max(x, 1e-300):
                break
        M = N + N.conj().T + N.conj().T @ N
        lam = float(np.linalg.eigvalsh(hermitian_part(M))[-1])
        defect = -lam / (1.0 + np.sqrt(max(1.0 + lam, 0.0)))
        floor = 100.0 * eps * max(x, 1e-300)
    else:
        s = scipy.linalg.svdvals(scipy.linalg.expm(-C * t))
        defect = 1.0 - float(s[0])
        floor = 100.0 * eps
    return defect, floor


def short_time_exponent(C, t_grid=None):
    """Fit ``1 - ||e^{-Ct}||_2 ~ c t^a`` on a short-time grid; return (a, c).

    The generator convention is ``dx/dt = -C x`` with C semi-dissipative
    (Hermitian part PSD), so the propagator norm starts at 1 and the defect
    grows like t^{2m+1} for index m.  Points below the numerical noise floor
    of the defect evaluation are discarded; the fit then restricts to the
    two smallest surviving decades of t so the leading power dominates.
    Raises ``ValueError`` when no resolvable decay signal remains (e.g. a
    purely skew generator).
    """
    C = as_matrix(C)
    if C.shape[0] != C.shape[1]:
        raise ValueError("expected a square matrix")
    if t_grid is None:
        t_grid = np.geomspace(1e-3, 1e-2, 16)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(t_grid <= 0):
        raise ValueError("t_grid must hold at least two positive times")
    t_grid = np.sort(t_grid)
    norm_c = float(np.linalg.norm(C, 2))
    ts, ds = [], []
    for t in t_grid:
        d, floor = _contraction_defect(C, t, norm_c)
        if d > 10.0 * floor:
            ts.append(t)
            ds.append(d)
    if len(ts) < 2:
        raise ValueError("no decay signal: contraction defect below noise floor")
    ts = np.asarray(ts)
    ds = np.asarray(ds)
    keep = ts <= 100.0 * ts[0]
    ts, ds = ts[keep], ds[keep]
    if ts.size < 2:
        raise ValueError("no decay signal: too few resolved grid points")
    design = np.column_stack([np.log(ts), np.ones(ts.size)])
    coef, *_ = np.linalg.lstsq(design, np.log(ds), rcond=None)
    a, log_c = coef
    return float(a), float(np.exp(log_c))
