"""Tests for the hypocoercivity index and short-time exponent fits."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypoco import (
    DEFAULT_TOL,
    hc_index,
    hc_index_kalman,
    hc_index_kernel,
    hc_index_sum,
    is_hypocoercive_spectrum,
    short_time_exponent,
)

from conftest import random_pair, random_pd, random_skew, random_unitary

# Hand-checked model pairs: (J, R, expected index).
J_ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
R_E1 = np.diag([1.0, 0.0])

# Shift chain on 3 nodes with damping on the first only; the Kalman block
# row ranks grow 1 -> 2 -> 3, so the index is 2.
J_CHAIN = np.array([
    [0.0, -1.0, 0.0],
    [1.0, 0.0, -1.0],
    [0.0, 1.0, 0.0],
])
R_CHAIN = np.zeros((3, 3))
R_CHAIN[0, 0] = 1.0


def test_index_zero_for_definite_r():
    rng = np.random.default_rng(0)
    J = random_skew(rng, 4)
    R = random_pd(rng, 4)
    rep = hc_index(J, R)
    assert rep.m_hc == 0
    assert rep.kappa == pytest.approx(
        float(np.linalg.eigvalsh((R + R.conj().T) / 2)[0]), rel=1e-12
    )


def test_index_one_rotation_with_partial_damping():
    rep = hc_index(J_ROT, R_E1)
    assert rep.m_hc == 1
    # T_1 = R + J R J^T = I exactly, so kappa is 1
    assert rep.kappa == pytest.approx(1.0, abs=1e-14)
    assert rep.method_agreement == {"sum": True, "kalman": True, "kernel": True}


def test_index_two_chain():
    rep = hc_index(J_CHAIN, R_CHAIN)
    assert rep.m_hc == 2
    assert all(rep.method_agreement.values())


def test_no_index_without_coupling():
    rep = hc_index(np.zeros((2, 2)), R_E1)
    assert rep.m_hc is None
    assert rep.kappa <= DEFAULT_TOL.coercivity_rtol
    assert all(rep.method_agreement.values())


def test_m_max_truncates_search():
    rep = hc_index_sum(J_ROT, R_E1, m_max=0)
    assert rep.m_hc is None
    assert rep.m_max == 0


def test_validation_rejects_bad_structure():
    with pytest.raises(ValueError):
        hc_index(np.eye(2), R_E1)                 # J not skew
    with pytest.raises(ValueError):
        hc_index(J_ROT, np.diag([1.0, -1.0]))     # R indefinite
    with pytest.raises(ValueError):
        hc_index(J_ROT, np.eye(3))                # size mismatch
    with pytest.raises(ValueError):
        hc_index(np.zeros((0, 0)), np.zeros((0, 0)))
    with pytest.raises(ValueError):
        hc_index(J_ROT, R_E1, m_max=-1)


def test_methods_agree_individually():
    for builder in (hc_index_sum, hc_index_kalman, hc_index_kernel):
        assert builder(J_ROT, R_E1).m_hc == 1
        assert builder(J_CHAIN, R_CHAIN).m_hc == 2


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=8),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_three_methods_agree_property(n, seed):
    rng = np.random.default_rng(seed)
    J, R = random_pair(rng, n)
    rep = hc_index(J, R)
    assert all(rep.method_agreement.values())
    # index present exactly when the spectrum certifies decay
    assert (rep.m_hc is not None) == is_hypocoercive_spectrum(R - J)


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=6),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_index_invariant_under_unitary_congruence(n, seed):
    rng = np.random.default_rng(seed)
    J, R = random_pair(rng, n)
    U = random_unitary(rng, n)
    rep = hc_index(J, R)
    rep_u = hc_index(U @ J @ U.conj().T, U @ R @ U.conj().T)
    assert rep.m_hc == rep_u.m_hc


def test_spectrum_test_matches_convention():
    # dx/dt = -C x with C = R - J; rotation plus full damping decays
    assert is_hypocoercive_spectrum(R_E1 - J_ROT)
    # undamped direction with no coupling does not
    assert not is_hypocoercive_spectrum(R_E1)
    assert not is_hypocoercive_spectrum(-J_ROT)


def test_short_time_exponent_pure_damping():
    # defect 1 - e^{-t} = t (1 - t/2 + ...) bends the fitted slope slightly
    # below 1 on a finite grid; one percent covers the curvature
    a, c = short_time_exponent(np.eye(3))
    assert a == pytest.approx(1.0, rel=1e-2)
    assert c == pytest.approx(1.0, rel=2e-2)


def test_short_time_exponent_index_one():
    a, _ = short_time_exponent(R_E1 - J_ROT)
    assert a == pytest.approx(3.0, rel=0.05)


def test_short_time_exponent_index_two():
    a, _ = short_time_exponent(R_CHAIN - J_CHAIN)
    assert a == pytest.approx(5.0, rel=0.05)


def test_short_time_exponent_rejects_pure_rotation():
    with pytest.raises(ValueError):
        short_time_exponent(-J_ROT)


def test_short_time_exponent_rejects_bad_grid():
    with pytest.raises(ValueError):
        short_time_exponent(np.eye(2), t_grid=[0.0, 1.0])
    with pytest.raises(ValueError):
        short_time_exponent(np.eye(2), t_grid=[0.5])
