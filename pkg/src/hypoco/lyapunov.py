"""Strict Lyapunov weights for hypocoercive systems ``dx/dt = (J - R) x``.

The decay of a hypocoercive but not coercive system is invisible to the
Euclidean norm at time zero.  A modified inner product <x, X x> with

    X = I + sum_{j=1}^{m} eps_j (A_{j-1}~ P_j + P_j A_{j-1}~^H)

turns it into strict exponential decay.  The ingredients come from a nested
projection iteration: P_j projects onto the subspace still untouched by
dissipation after j commutator levels, and the off-diagonal terms of X are
exactly the couplings that transport dissipation there.  The iteration also
computes the hypocoercivity index (number of levels until the projection
dies), so it doubles as an independent index algorithm.

``lmi_check`` verifies A^H X + X A + 2 mu X <= 0, which implies

    ||x(t)||_2 <= sqrt(cond(X)) e^{-mu t} ||x(0)||_2.
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
)
from .hc_index import _validated_pair

__all__ = [
    "ProjectionChain",
    "LyapunovCertificate",
    "projection_chain",
    "build_weight",
    "lmi_check",
    "largest_certified_mu",
    "tune_certificate",
    "verify_envelope",
]

# Admissibility floor for the weight: X must stay uniformly positive
# definite, not merely nonsingular, for the norm equivalence to be usable.
_X_MIN_EIG = 1e-6


@dataclass(frozen=True)
class ProjectionChain:
    """Trace of the nested projection iteration.

    ``projections[j]`` is the orthogonal projector P_j (P_0 = I), with the
    chain strictly decreasing until it vanishes after ``m_hc`` steps;
    ``a_tilde[j]`` and ``b_tilde[j]`` are the compressed generators and
    coupling blocks used both for the weight and for the next projector.
    """

    projections: tuple
    a_tilde: tuple
    b_tilde: tuple
    m_hc: int


@dataclass(frozen=True)
class LyapunovCertificate:
    """A certified strict decay estimate.

    ``X`` is Hermitian positive definite, ``mu`` the certified rate, and
    ``condition_number`` = cond_2(X) controls the envelope constant
    sqrt(cond(X)) of the induced Euclidean-norm bound.
    """

    X: np.ndarray
    mu: float
    eps: tuple
    condition_number: float

    @property
    def envelope_constant(self) -> float:
        return float(np.sqrt(self.condition_number))


def _kernel_projection(B, rank_rtol):
    """Orthogonal projector onto ker(B B^H) = range(B)^perp."""
    n = B.shape[0]
    if float(np.linalg.norm(B)) == 0.0:
        return np.eye(n, dtype=complex)
    U, s, _ = np.linalg.svd(B)
    r = int(np.count_nonzero(s > rank_rtol * s[0]))
    Ur = U[:, :r]
    return np.eye(n, dtype=complex) - Ur @ Ur.conj().T


def projection_chain(J, R, tol: ToleranceConfig = DEFAULT_TOL) -> ProjectionChain:
    """Run the nested projection iteration on a semi-dissipative pair.

    Starting from P_0 = I, A_0~ = -J, B_0~ = R, each step projects onto the
    orthogonal complement of everything B_{j-1}~ can reach, compresses the
    generator there, and records the coupling to the freshly dissipated
    part.  The first vanishing projection stops the iteration and its level
    is the hypocoercivity index.  Failure to terminate within n + 1 steps
    means the projections stabilized at a nonzero subspace never reached by
    dissipation; the index is infinite and a ``ValueError`` is raised.
    """
    J, R = _validated_pair(J, R, tol)
    n = J.shape[0]
    projections = [np.eye(n, dtype=complex)]
    a_tilde = [-J.astype(complex)]
    b_tilde = [hermitian_part(R)]
    while True:
        j = len(projections)
        P_next = _kernel_projection(b_tilde[j - 1], tol.rank_rtol) @ projections[j - 1]
        if float(np.linalg.norm(P_next, 2)) < 0.5:
            m = j - 1
            break
        if j > n:
            raise ValueError(
                "projection iteration did not terminate: infinite index "
                "(system is not hypocoercive)"
            )
        projections.append(P_next)
        a_tilde.append(P_next @ a_tilde[j - 1] @ P_next)
        b_tilde.append(P_next @ a_tilde[j - 1] @ (projections[j - 1] - P_next))
    return ProjectionChain(
        projections=tuple(projections),
        a_tilde=tuple(a_tilde),
        b_tilde=tuple(b_tilde),
        m_hc=m,
    )


def build_weight(chain: ProjectionChain, eps) -> np.ndarray:
    """Assemble X = I + sum_j eps_j (A_{j-1}~ P_j + P_j A_{j-1}~^H).

    ``eps`` must supply one coefficient per chain level (m_hc of them).
    The result is Hermitian by construction; positive definiteness depends
    on the eps magnitudes and is the caller's concern (see
    :func:`tune_certificate`).
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    if eps.ndim != 1 or eps.size != chain.m_hc:
        raise ValueError(
            f"need exactly {chain.m_hc} coefficients, got {eps.size}"
        )
    X = chain.projections[0].copy()
    for j in range(1, chain.m_hc + 1):
        term = chain.a_tilde[j - 1] @ chain.projections[j]
        X = X + eps[j - 1] * (term + term.conj().T)
    return X


def lmi_check(A, X, mu, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Decide whether A^H X + X A + 2 mu X is negative semi-definite.

    The test allows eigenvalues up to ``psd_rtol`` relative to the natural
    scale ||A|| ||X||, so exact equality cases (e.g. normal systems at the
    sharp rate) pass.
    """
    A = as_matrix(A)
    X = as_matrix(X)
    if A.shape != X.shape or A.shape[0] != A.shape[1]:
        raise ValueError("A and X must be square of one size")
    S = A.conj().T @ X + X @ A + 2.0 * float(mu) * X
    lam = float(np.linalg.eigvalsh(hermitian_part(S))[-1])
    scale = max(1.0, float(np.linalg.norm(A, 2)) * float(np.linalg.norm(X, 2)))
    return lam <= tol.psd_rtol * scale


def largest_certified_mu(A, X, mu_hi, tol, steps=20):
    """Largest mu in [0, mu_hi] passing the LMI, by bisection; None if even 0 fails."""
    if not lmi_check(A, X, 0.0, tol):
        return None
    if mu_hi <= 0.0:
        return 0.0
    if lmi_check(A, X, mu_hi, tol):
        return float(mu_hi)
    lo, hi = 0.0, float(mu_hi)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if lmi_check(A, X, mid, tol):
            lo = mid
        else:
            hi = mid
    return lo


def tune_certificate(A=None, chain: ProjectionChain = None,
                     tol: ToleranceConfig = DEFAULT_TOL,
                     grid_points: int = 32) -> Optional[LyapunovCertificate]:
    """Search eps coefficients maximizing the certified rate mu.

    Candidate eps_j run over a logarithmic grid [1e-4, 0.5] scaled by the
    size of the j-th weight term, refined coordinate-wise (two sweeps).  A
    candidate is admissible when X stays positive definite and the LMI
    holds at mu = 0; the certified mu is then maximized by bisection, with
    the spectral abscissa of A as upper bound so the certificate can never
    claim more than the true asymptotic rate.  Returns None when no
    candidate is admissible.
    """
    if chain is None:
        raise ValueError("a ProjectionChain is required")
    if A is None:
        # the chain stores a_tilde[0] = -J and b_tilde[0] = herm(R)
        A = -chain.a_tilde[0] - chain.b_tilde[0]
    A = as_matrix(A)
    m = chain.m_hc
    abscissa = -float(np.max(np.linalg.eigvals(A).real))
    mu_hi = max(abscissa, 0.0)

    def evaluate(eps):
        X = build_weight(chain, eps) if m else np.eye(A.shape[0], dtype=complex)
        lam_min = float(np.linalg.eigvalsh(hermitian_part(X))[0])
        if lam_min < _X_MIN_EIG:
            return None
        mu = largest_certified_mu(A, X, mu_hi, tol)
        if mu is None:
            return None
        lam_max = float(np.linalg.eigvalsh(hermitian_part(X))[-1])
        return LyapunovCertificate(
            X=X, mu=float(mu), eps=tuple(float(e) for e in eps),
            condition_number=lam_max / lam_min,
        )

    if m == 0:
        return evaluate(())

    scales = []
    for j in range(1, m + 1):
        term = chain.a_tilde[j - 1] @ chain.projections[j]
        term = term + term.conj().T
        scales.append(1.0 / max(float(np.linalg.norm(term, 2)), 1e-300))
    grid = np.geomspace(1e-4, 0.5, grid_points)

    eps_cur = [0.01 * s for s in scales]
    best = evaluate(eps_cur)
    for _ in range(2):
        for j in range(m):
            for g in grid:
                trial = list(eps_cur)
                trial[j] = g * scales[j]
                cert = evaluate(trial)
                if cert is not None and (best is None or cert.mu > best.mu):
                    best = cert
                    eps_cur = trial
    return best


def verify_envelope(A, cert: LyapunovCertificate, x0, t_grid, rtol=1e-8) -> bool:
    """Check ||e^{At} x0|| <= sqrt(cond(X)) e^{-mu t} ||x0|| on a time grid."""
    A = as_matrix(A)
    x0 = np.asarray(x0, dtype=complex).reshape(-1)
    if x0.size != A.shape[0]:
        raise ValueError("state dimension mismatch")
    norm0 = float(np.linalg.norm(x0))
    if norm0 == 0.0:
        return True
    C = cert.envelope_constant
    for t in np.asarray(t_grid, dtype=float):
        xt = scipy.linalg.expm(A * t) @ x0
        bound = C * np.exp(-cert.mu * t) * norm0
        if float(np.linalg.norm(xt)) > bound * (1.0 + rtol):
            return False
    return True
