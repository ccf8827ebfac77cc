"""Acceptance sweep: the headline claims of the package, one verdict line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines.
Each test prints exactly one verdict and then asserts, so a red run still
shows which claims survived.  Seeds are fixed; runtime-limited criteria
assert their wall-clock budget.
"""

import time

import numpy as np
import pytest
import scipy.linalg

from conftest import random_pair
from hypoco import (
    ModeState,
    OseenConfig,
    alpha_min,
    build_aniso_const_mode,
    build_isotropic_mode,
    classify_pencil,
    fit_decay,
    full_decay_report,
    hc_index,
    kappa_truncated,
    lambda1_min,
    lambda1_positive_root,
    leray_project,
    lmi_check,
    pressure_poisson,
    projection_chain,
    propagate_dae,
    propagator_norm,
    q_matrix,
    random_band_states,
    reconstruct_field,
    short_time_exponent,
    sin_staircase,
    sin_weight,
    staircase_transform,
    velocity_from_vorticity,
    vorticity_coordinates,
)
from hypoco.oseen import PARSEVAL, kappa_aux_g, taylor_coefficients

J_ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
R_E1 = np.diag([1.0, 0.0])
# shift chain on 3 nodes, damping on the first only: index 2
J_CHAIN = np.array([
    [0.0, -1.0, 0.0],
    [1.0, 0.0, -1.0],
    [0.0, 1.0, 0.0],
])
R_CHAIN = np.diag([1.0, 0.0, 0.0])


def verdict(name, failures):
    """Print one PASS/FAIL line, then fail the test if anything broke."""
    print(f"[{'FAIL' if failures else 'PASS'}] {name}")
    assert not failures, f"{name}: " + "; ".join(failures)


def test_index_methods_agree_on_random_pairs():
    failures = []
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    for trial in range(500):
        n = int(rng.integers(1, 9))
        J, R = random_pair(rng, n)
        report = hc_index(J, R)
        if not all(report.method_agreement.values()):
            failures.append(f"trial {trial} (n = {n}): {report.method_agreement}")
    elapsed = time.perf_counter() - start
    if elapsed >= 10.0:
        failures.append(f"runtime {elapsed:.1f} s exceeds 10 s")
    verdict("index equivalence on 500 random pairs", failures)


def test_short_time_law_exponents():
    failures = []
    start = time.perf_counter()
    cases = [
        (np.eye(2), 0),                # coercive: decay from t^1
        (R_E1 - J_ROT, 1),             # one commutator step: t^3
        (R_CHAIN - J_CHAIN, 2),        # two steps: t^5
    ]
    for C, m in cases:
        a, _ = short_time_exponent(C)
        target = 2 * m + 1
        if abs(a - target) > 0.05 * target:
            failures.append(f"m = {m}: fitted exponent {a:.3f} vs {target}")
    elapsed = time.perf_counter() - start
    if elapsed >= 5.0:
        failures.append(f"runtime {elapsed:.1f} s exceeds 5 s")
    verdict("short-time decay exponent 2m + 1", failures)


def test_isotropic_modal_rates():
    failures = []
    nu = 0.7
    rng = np.random.default_rng(33)
    drawn = set()
    while len(drawn) < 20:
        k = tuple(int(v) for v in rng.integers(-3, 4, size=2))
        if k != (0, 0):
            drawn.add(k)
    times = np.linspace(0.0, 2.0, 21)
    for k in sorted(drawn):
        t = build_isotropic_mode(k, (0.3, -0.2), nu)
        form = staircase_transform(t)
        if form.dims != (1, 1, 0, 1, 0):
            failures.append(f"k = {k}: dims {form.dims}")
            continue
        x0 = np.array([-k[1], k[0], 0.0], dtype=complex) / np.hypot(*k)
        traj = propagate_dae(t, x0, times)
        mu = fit_decay(traj).mu_fit
        rate = nu * (k[0] ** 2 + k[1] ** 2)
        if abs(mu - rate) > 0.01 * rate:
            failures.append(f"k = {k}: rate {mu:.4f} vs {rate:.4f}")
    # slowest mode over the whole truncation range sets the spectral gap
    slowest = min(
        nu * (k1 ** 2 + k2 ** 2)
        for k1 in range(-3, 4) for k2 in range(-3, 4) if (k1, k2) != (0, 0)
    )
    if abs(slowest - nu) > 0.01 * nu:
        failures.append(f"slowest rate {slowest} vs nu = {nu}")
    verdict("isotropic modes: staircase dims and rates", failures)


def test_const_drift_conserves_norms():
    failures = []
    nu, b = 0.5, (1.0, 0.0)
    times = np.linspace(0.0, 20.0, 41)
    for k1 in (1, 2, 3):
        t = build_aniso_const_mode((k1, 0), b, nu)
        cls = classify_pencil(t)
        if cls.negative_hypocoercive:
            failures.append(f"k1 = {k1}: classified hypocoercive")
        x0 = np.array([0.0, 1.0, 0.0], dtype=complex)
        traj = propagate_dae(t, x0, times)
        dev = float(np.max(np.abs(traj.norms - traj.norms[0])))
        if dev > 1e-10:
            failures.append(f"k1 = {k1}: norm drift {dev:.2e}")
    # traveling wave u = (0, cos(x1 - t)): reconstructed field norm is static
    K = 2
    t = build_aniso_const_mode((1, 0), b, nu)
    x0 = np.array([0.0, 0.5, 0.0], dtype=complex)
    traj = propagate_dae(t, x0, times)
    field_norms = []
    for i in range(times.size):
        phi = np.zeros((2 * K + 1, 2), dtype=complex)
        phi[K, :] = traj.states[i][:2]
        plus = ModeState(k1=1, phi=phi, p=np.zeros(2 * K + 1, dtype=complex))
        minus = ModeState(k1=-1, phi=np.conj(phi[::-1]),
                          p=np.zeros(2 * K + 1, dtype=complex))
        x1, _, U, _ = reconstruct_field([plus, minus])
        quad = (2.0 * np.pi / x1.size) ** 2 * float(np.sum(U ** 2))
        field_norms.append(np.sqrt(quad))
    dev = max(abs(v - field_norms[0]) for v in field_norms)
    if dev > 1e-8 * field_norms[0]:
        failures.append(f"traveling wave norm drift {dev:.2e}")
    verdict("constant drift: no decay, invariant field norm", failures)


def test_sin_band_index_is_one():
    failures = []
    for K in (16, 32, 64):
        for k1 in range(1, 11):
            _, J22, R22 = sin_staircase(k1, 1.0, K)
            report = hc_index(J22, R22)
            if report.m_hc != 1:
                failures.append(f"k1 = {k1}, K = {K}: m_hc = {report.m_hc}")
    # the projection chain collapses after a single step onto the center mode
    for k1 in (1, 5, 10):
        K = 16
        _, J22, R22 = sin_staircase(k1, 1.0, K)
        chain = projection_chain(J22, R22)
        if chain.m_hc != 1:
            failures.append(f"k1 = {k1}: chain depth {chain.m_hc}")
            continue
        e0 = np.zeros(2 * K + 1)
        e0[K] = 1.0
        if not np.allclose(chain.projections[1], np.outer(e0, e0), atol=1e-10):
            failures.append(f"k1 = {k1}: first projector is not e0 e0^T")
    verdict("sin band: index 1, chain stops on the center mode", failures)


def test_taylor_coefficients_and_propagator_floor():
    failures = []
    for nu in (0.3, 1.0):
        norm0, d1, d2, d3 = taylor_coefficients(nu, K=8)
        scale = 2.0 * np.pi ** 2
        checks = [
            ("||u0||^2", norm0, scale),
            ("d1", d1, 0.0),
            ("d2", d2, 0.0),
            ("d3", d3, -2.0 * nu * np.pi ** 2),
        ]
        for name, got, want in checks:
            if abs(got - want) > 1e-8 * max(abs(want), scale):
                failures.append(f"nu = {nu}: {name} = {got!r} vs {want!r}")
        _, J22, R22 = sin_staircase(1, nu, 8)
        A = J22 - R22
        for t in (1e-3, 3e-3, 1e-2):
            floor = 1.0 - nu * t ** 3 / 12.0 - 1e-6
            got = propagator_norm(A, t)
            if got < floor:
                failures.append(f"nu = {nu}, t = {t}: |e^(At)| = {got} < {floor}")
    verdict("cubic Taylor law and propagator floor", failures)


def test_weighted_dissipation_certificate():
    failures = []
    for nu in (0.1, 1.0, 10.0):
        a_ref = 0.9 * alpha_min(nu)
        for k1 in range(1, 33):
            Q = q_matrix(k1, a_ref, nu)
            tr = float(np.trace(Q))
            if abs(tr - 20.0 * nu) > 1e-10 * nu:
                failures.append(f"nu = {nu}, k1 = {k1}: trace {tr}")
            if np.linalg.eigvalsh(Q)[0] <= 0.0:
                failures.append(f"nu = {nu}, k1 = {k1}: Q not PD at 0.9 alpha_min")
        # uniform lower bound on the smallest eigenvalue for admissible alpha
        a_cap = min(alpha_min(nu), lambda1_positive_root(nu))
        for frac in np.linspace(0.1, 0.9, 9):
            a = frac * a_cap
            bound = lambda1_min(a, nu)
            if bound <= 0.0:
                failures.append(f"nu = {nu}, alpha = {a:.4f}: bound {bound}")
                continue
            worst = min(
                np.linalg.eigvalsh(q_matrix(k1, a, nu))[0] for k1 in range(1, 33)
            )
            if worst < bound - 1e-12 * nu:
                failures.append(
                    f"nu = {nu}, alpha = {a:.4f}: lambda1 {worst} < {bound}"
                )
        # decay inequality at a quarter of the bound, on the band system
        a = 0.9 * a_cap
        mu = lambda1_min(a, nu) / 4.0
        K = 8
        for k1 in range(1, 33):
            _, J22, R22 = sin_staircase(k1, nu, K)
            X = sin_weight(k1, a, K)
            if not lmi_check(J22 - R22, X, mu):
                failures.append(f"nu = {nu}, k1 = {k1}: decay inequality fails")
    verdict("weighted dissipation: trace, positivity, uniform bound", failures)


def test_truncated_coercivity_floor():
    failures = []
    for nu in (0.1, 1.0, 10.0):
        for k1 in range(1, 17):
            kap = kappa_truncated(k1, nu, 64)
            if kap < nu / 100.0:
                failures.append(f"nu = {nu}, k1 = {k1}: kappa {kap:.3e}")
            kap_fine = kappa_truncated(k1, nu, 128)
            if abs(kap_fine - kap) > 0.05 * kap:
                failures.append(
                    f"nu = {nu}, k1 = {k1}: kappa moves {kap:.3e} -> {kap_fine:.3e}"
                )
    for g_arg, num, den in ((1.0, 64.0, 68.0), (2.0, 81.0, 89.0)):
        got = kappa_aux_g(g_arg)
        if abs(got - num / den) > 1e-12:
            failures.append(f"g({g_arg}) = {got!r} vs {num}/{den}")
    verdict("truncated coercivity floor nu / 100", failures)


def test_decay_envelope_on_random_states():
    failures = []
    nu = 1.0
    cfg = OseenConfig(nu=nu, drift="sin", K=32, k1_range=tuple(range(-8, 9)))
    alpha = 0.5 * alpha_min(nu)
    times = np.linspace(0.0, 20.0, 81)
    rng = np.random.default_rng(909)
    start = time.perf_counter()
    for trial in range(20):
        states = random_band_states(range(0, 9), cfg.K, rng)
        rep = full_decay_report(cfg, states, times=times, alpha=alpha)
        if not rep.envelope_ok:
            failures.append(f"trial {trial}: envelope violated "
                            f"(margin {rep.envelope_margin:.4f})")
        if not rep.pressure_ok:
            failures.append(f"trial {trial}: pressure gradient exceeds velocity")
    elapsed = time.perf_counter() - start
    if elapsed >= 120.0:
        failures.append(f"runtime {elapsed:.1f} s exceeds 120 s")
    verdict("certified decay envelope on 20 random states", failures)


def test_isometry_and_reconstruction():
    failures = []
    rng = np.random.default_rng(77)
    for trial in range(50):
        K = int(rng.integers(2, 12))
        k1 = int(rng.integers(1, 9))
        y = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
        state = velocity_from_vorticity(y, k1)
        if abs(np.linalg.norm(state.phi) - np.linalg.norm(y)) > 1e-12 * np.linalg.norm(y):
            failures.append(f"trial {trial}: isometry broken")
        back = vorticity_coordinates(state)
        if np.linalg.norm(back - y) > 1e-12 * np.linalg.norm(y):
            failures.append(f"trial {trial}: round trip broken")
    states = random_band_states((0, 1, 2, 5), K=6, rng=rng)
    x1, _, U, _ = reconstruct_field(states)
    quad = (2.0 * np.pi / x1.size) ** 2 * float(np.sum(U ** 2))
    coeff = PARSEVAL * sum(float(np.sum(np.abs(s.phi) ** 2)) for s in states)
    if abs(quad - coeff) > 1e-8 * coeff:
        failures.append(f"Parseval mismatch {quad!r} vs {coeff!r}")
    for trial in range(50):
        k = tuple(int(v) for v in rng.integers(-5, 6, size=2))
        phi = rng.normal(size=2) + 1j * rng.normal(size=2)
        proj = leray_project(phi, k)
        if np.linalg.norm(leray_project(proj, k) - proj) > 1e-12 * max(np.linalg.norm(phi), 1.0):
            failures.append(f"trial {trial}: projection not idempotent")
        if (k[0] or k[1]) and abs(k[0] * proj[0] + k[1] * proj[1]) > 1e-12 * np.linalg.norm(phi):
            failures.append(f"trial {trial}: divergence survives projection")
    verdict("vorticity isometry, Parseval, Leray projection", failures)
