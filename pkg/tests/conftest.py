"""Shared random-model generators for the test suite.

Everything is seeded by the caller, so tests stay reproducible; builders
that need an invertible block draw again with a derived seed when a draw
degenerates (vanishingly rare, but kept deterministic).
"""

import numpy as np

from hypoco import DaeTriple


def random_unitary(rng, n):
    """Haar-ish unitary from the QR of a complex Gaussian matrix."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, Rf = np.linalg.qr(Z)
    return Q * (np.diag(Rf) / np.abs(np.diag(Rf)))


def random_psd(rng, n, rank=None, shift=0.0):
    """Random PSD matrix of the given rank (default full), plus shift * I."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    rank = n if rank is None else rank
    B = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    M = B @ B.conj().T / max(rank, 1)
    return M + shift * np.eye(n)


def random_pd(rng, n, spread=(0.5, 2.0)):
    """Random Hermitian positive definite matrix with bounded spectrum."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    U = random_unitary(rng, n)
    w = rng.uniform(*spread, size=n)
    return (U * w) @ U.conj().T


def random_skew(rng, n):
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    S = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (S - S.conj().T) / 2.0


def random_pair(rng, n, rank=None):
    """Random semi-dissipative (J, R) pair; R rank defaults to a draw."""
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    return random_skew(rng, n), random_psd(rng, n, rank=max(rank, 0))


def staircase_like_triple(rng, n1, n2, n3, n5=0):
    """Triple unitarily equivalent to a staircase form with known dims.

    Blocks are drawn directly in staircase coordinates (so the dimensions
    (n1, n2, n3, n1, n5) are known by construction) and then hidden by a
    random unitary congruence.  Returns (triple, dims).
    """
    nE = n1 + n2          # rank of E
    nR = nE + n3          # extent of the R pattern
    n = nR + n1 + n5
    E = np.zeros((n, n), dtype=complex)
    if nE:
        E[:nE, :nE] = random_pd(rng, nE)
    R = np.zeros((n, n), dtype=complex)
    if nR:
        R[:nR, :nR] = random_psd(rng, nR, rank=nR)
        if n3:
            # strictly dissipative algebraic block keeps J33 - R33 invertible
            R[nE:nR, nE:nR] += 0.5 * np.eye(n3)
    J = np.zeros((n, n), dtype=complex)
    if nR:
        J[:nR, :nR] = random_skew(rng, nR)
    if n1:
        J14 = random_pd(rng, n1) + random_skew(rng, n1)
        J[:n1, nR:nR + n1] = J14
        J[nR:nR + n1, :n1] = -J14.conj().T
    U = random_unitary(rng, n)
    triple = DaeTriple(E=U @ E @ U.conj().T, J=U @ J @ U.conj().T,
                       R=U @ R @ U.conj().T)
    return triple, (n1, n2, n3, n1, n5)


def random_triple(rng, n):
    """Fully random semi-dissipative triple (dims unknown a priori)."""
    e_rank = int(rng.integers(0, n + 1))
    E = random_psd(rng, n, rank=e_rank)
    J, R = random_pair(rng, n)
    return DaeTriple(E=E, J=J, R=R)
