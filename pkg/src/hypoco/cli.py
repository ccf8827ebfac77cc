"""Command line front end.

Subcommands
-----------
hc-index      index and coercivity constant of a (J, R) pair
staircase     staircase form and pencil classification of a triple
lyapunov      strict Lyapunov weight and certified decay rate
oseen build   assemble a model triple (also: oseen-build)
oseen quant   quantitative certificate tables (also: oseen-quant)
simulate      propagate one system from a JSON config, write CSV
decay-report  multi-band decay envelope run, write CSV/JSON

Matrices travel as JSON objects {rows, cols, re, im}; triples as {E, J, R}.
Reports embed the tolerance settings and SHA-256 hashes of their inputs,
carry no timestamps, and all randomness is seeded, so identical invocations
produce byte-identical outputs.

Exit codes: 0 success, 1 malformed input or usage error, 2 numerical
certification failure, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from .core import DEFAULT_TOL, DaeTriple, ToleranceConfig
from .hc_index import hc_index
from .lyapunov import (
    build_weight,
    largest_certified_mu,
    projection_chain,
    tune_certificate,
)
from .matrix_io import (
    load_json,
    matrix_from_dict,
    matrix_to_dict,
    save_json,
    triple_from_dict,
    triple_to_dict,
)
from .oseen import (
    ModeState,
    OseenConfig,
    alpha_min,
    build_aniso_const_mode,
    build_aniso_sin_system,
    build_isotropic_mode,
    decay_envelope,
    pressure_poisson,
    quant_report,
    sin_weight,
    velocity_from_vorticity,
    vorticity_coordinates,
)
from .simulate import (
    full_decay_report,
    propagate_dae,
    random_band_states,
    reconstruct_field,
)
from .staircase import StaircaseError, classify_pencil, staircase_transform

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_CERTIFICATION = 2
EXIT_INVARIANT = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_MALFORMED)


class CliError(Exception):
    def __init__(self, message, code=EXIT_MALFORMED):
        super().__init__(message)
        self.code = code


def _sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _sha256_config(obj):
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True).encode()
    ).hexdigest()


def _tolerances(args):
    kwargs = {}
    if getattr(args, "tol_rank", None) is not None:
        kwargs["rank_rtol"] = args.tol_rank
    if getattr(args, "tol_psd", None) is not None:
        kwargs["psd_rtol"] = args.tol_psd
    try:
        return ToleranceConfig(**kwargs) if kwargs else DEFAULT_TOL
    except ValueError as exc:
        raise CliError(str(exc))


def _tol_dict(tol):
    return {
        "rank_rtol": tol.rank_rtol,
        "psd_rtol": tol.psd_rtol,
        "coercivity_rtol": tol.coercivity_rtol,
    }


def _load_matrix_file(path):
    try:
        return matrix_from_dict(load_json(path)), _sha256_file(path)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise CliError(f"cannot read matrix from {path}: {exc}")


def _load_triple_file(path):
    try:
        return triple_from_dict(load_json(path)), _sha256_file(path)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise CliError(f"cannot read triple from {path}: {exc}")


def _emit(report, out):
    if out:
        save_json(out, report)
    else:
        json.dump(report, sys.stdout, indent=1, sort_keys=True)
        print()


def _complex_list(values):
    return [[float(v.real), float(v.imag)] for v in values]


# ---------------------------------------------------------------- commands


def _cmd_hc_index(args):
    tol = _tolerances(args)
    J, j_hash = _load_matrix_file(args.j)
    R, r_hash = _load_matrix_file(args.r)
    try:
        report = hc_index(J, R, m_max=args.m_max, tol=tol)
    except ValueError as exc:
        raise CliError(str(exc))
    out = {
        "m_hc": report.m_hc,
        "kappa": report.kappa,
        "m_max": report.m_max,
        "method_agreement": report.method_agreement,
        "tolerances": _tol_dict(tol),
        "inputs": {"j": {"path": args.j, "sha256": j_hash},
                   "r": {"path": args.r, "sha256": r_hash}},
    }
    _emit(out, args.out)
    return EXIT_OK


def _get_triple(args):
    if args.triple:
        return _load_triple_file(args.triple)
    if not (args.e and args.j and args.r):
        raise CliError("provide either --triple or all of --e, --j, --r")
    E, e_hash = _load_matrix_file(args.e)
    J, j_hash = _load_matrix_file(args.j)
    R, r_hash = _load_matrix_file(args.r)
    try:
        triple = DaeTriple(E=E, J=J, R=R)
    except ValueError as exc:
        raise CliError(str(exc))
    return triple, _sha256_config([e_hash, j_hash, r_hash])


def _cmd_staircase(args):
    tol = _tolerances(args)
    triple, t_hash = _get_triple(args)
    form = staircase_transform(triple, tol)
    cls = classify_pencil(triple, tol)
    out = {
        "dims": list(form.dims),
        "P": matrix_to_dict(form.P),
        "E_check": matrix_to_dict(form.E_check),
        "J_check": matrix_to_dict(form.J_check),
        "R_check": matrix_to_dict(form.R_check),
        "warnings": list(form.warnings),
        "classification": {
            "regular": cls.regular,
            "dae_index": cls.dae_index,
            "finite_eigenvalues": _complex_list(cls.finite_eigenvalues),
            "negative_hypocoercive": cls.negative_hypocoercive,
        },
        "tolerances": _tol_dict(tol),
        "inputs": {"triple": {"sha256": t_hash}},
    }
    _emit(out, args.out)
    return EXIT_OK


def _cmd_lyapunov(args):
    tol = _tolerances(args)
    J, j_hash = _load_matrix_file(args.j)
    R, r_hash = _load_matrix_file(args.r)
    try:
        chain = projection_chain(J, R, tol)
    except ValueError as exc:
        raise CliError(str(exc), code=EXIT_CERTIFICATION)
    A = J - R
    if args.eps:
        try:
            eps = [float(x) for x in args.eps.split(",") if x.strip()]
        except ValueError as exc:
            raise CliError(f"bad --eps: {exc}")
        try:
            X = build_weight(chain, eps)
        except ValueError as exc:
            raise CliError(str(exc))
        w = np.linalg.eigvalsh((X + X.conj().T) / 2.0)
        if w[0] <= 0:
            raise CliError(
                f"weight is not positive definite (lambda_min = {w[0]:.3e})",
                code=EXIT_CERTIFICATION,
            )
        abscissa = max(-float(np.max(np.linalg.eigvals(A).real)), 0.0)
        mu = largest_certified_mu(A, X, abscissa, tol)
        if mu is None:
            raise CliError("weight fails the decay inequality at mu = 0",
                           code=EXIT_CERTIFICATION)
        cert_dict = {
            "X": matrix_to_dict(X),
            "mu": float(mu),
            "eps": list(map(float, eps)),
            "condition_number": float(w[-1] / w[0]),
            "m_hc": chain.m_hc,
        }
    else:
        cert = tune_certificate(A, chain, tol)
        if cert is None:
            raise CliError("no admissible weight found", code=EXIT_CERTIFICATION)
        cert_dict = {
            "X": matrix_to_dict(cert.X),
            "mu": cert.mu,
            "eps": list(cert.eps),
            "condition_number": cert.condition_number,
            "m_hc": chain.m_hc,
        }
    cert_dict.update({
        "tolerances": _tol_dict(tol),
        "inputs": {"j": {"path": args.j, "sha256": j_hash},
                   "r": {"path": args.r, "sha256": r_hash}},
    })
    _emit(cert_dict, args.out)
    return EXIT_OK


def _cmd_oseen_build(args):
    if args.nu is None or args.nu <= 0:
        raise CliError("--nu must be a positive number")
    if args.model == "sin":
        if args.k1 is None or args.K is None:
            raise CliError("sin model needs --k1 and --K")
        triple = build_aniso_sin_system(args.k1, args.nu, args.K)
    else:
        if args.k1 is None:
            raise CliError(f"{args.model} model needs --k1 (and optionally --k2)")
        k = (args.k1, args.k2)
        b = (args.b1, args.b2)
        builder = build_isotropic_mode if args.model == "iso" else build_aniso_const_mode
        try:
            triple = builder(k, b, args.nu)
        except ValueError as exc:
            raise CliError(str(exc))
    doc = triple_to_dict(triple)
    doc["model"] = {
        "name": args.model, "nu": args.nu, "k1": args.k1, "k2": args.k2,
        "K": args.K, "b": [args.b1, args.b2],
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_oseen_quant(args):
    if args.nu is None or args.nu <= 0:
        raise CliError("--nu must be a positive number")
    rep = quant_report(args.nu, k1_max=args.k1_max, K=args.K)
    doc = rep.as_dict()
    doc["tolerances"] = _tol_dict(DEFAULT_TOL)
    doc["config_sha256"] = _sha256_config(
        {"nu": args.nu, "k1_max": args.k1_max, "K": args.K}
    )
    _emit(doc, args.out)
    return EXIT_OK


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else repr(float(v)) for v in row) + "\n")


def _interleave_band(state):
    """Stack a ModeState into the (phi1, phi2, p) per-mode system ordering."""
    n = state.phi.shape[0]
    w = np.zeros(3 * n, dtype=complex)
    w[0::3] = state.phi[:, 0]
    w[1::3] = state.phi[:, 1]
    w[2::3] = state.p
    return w


def _deinterleave_band(w, k1):
    phi = np.column_stack([w[0::3], w[1::3]])
    return ModeState(k1=k1, phi=phi, p=w[2::3])


def _cmd_simulate(args):
    try:
        cfg = load_json(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {args.config}: {exc}")
    cfg_hash = _sha256_file(args.config)
    if not isinstance(cfg, dict):
        raise CliError("config must be a JSON object")
    model = cfg.get("model")
    if model not in ("iso", "const", "sin"):
        raise CliError("config key 'model' must be 'iso', 'const', or 'sin'")
    try:
        nu = float(cfg.get("nu", 1.0))
        t_max = float(cfg.get("t_max", 10.0))
        num_times = int(cfg.get("num_times", 101))
        seed = int(cfg.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad config value: {exc}")
    if nu <= 0 or t_max <= 0 or num_times < 2:
        raise CliError("need nu > 0, t_max > 0, num_times >= 2")
    times = np.linspace(0.0, t_max, num_times)
    rng = np.random.default_rng(seed)

    if model == "sin":
        k1 = int(cfg.get("k1", 1))
        K = int(cfg.get("K", 16))
        if k1 == 0:
            raise CliError("sin band simulation needs k1 != 0")
        if K < 2:
            raise CliError("need K >= 2")
        triple = build_aniso_sin_system(k1, nu, K)
        y0 = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
        state0 = velocity_from_vorticity(y0, k1)
        state0 = ModeState(k1=k1, phi=state0.phi, p=pressure_poisson(state0))
        x0 = _interleave_band(state0)
        alpha = cfg.get("alpha")
        alpha = 0.5 * alpha_min(nu) if alpha is None else float(alpha)
        c_env, rate = decay_envelope(alpha, nu)
        X = sin_weight(k1, alpha, K)
    else:
        k = cfg.get("k")
        if not (isinstance(k, (list, tuple)) and len(k) == 2):
            raise CliError("iso/const config needs 'k': [k1, k2]")
        b = cfg.get("b", [0.0, 0.0])
        builder = build_isotropic_mode if model == "iso" else build_aniso_const_mode
        try:
            triple = builder(k, b, nu)
        except ValueError as exc:
            raise CliError(str(exc))
        k1, k2 = int(k[0]), int(k[1])
        kvec = np.array([k1, k2], dtype=float)
        phi = rng.normal(size=2) + 1j * rng.normal(size=2)
        ksq = float(kvec @ kvec)
        phi = phi - kvec * (kvec @ phi) / ksq
        x0 = np.array([phi[0], phi[1], 0.0], dtype=complex)
        X = None
        if model == "iso":
            c_env, rate = 1.0, nu * ksq
        else:
            c_env = rate = None

    try:
        traj = propagate_dae(triple, x0, times)
    except StaircaseError as exc:
        raise CliError(str(exc), code=EXIT_INVARIANT)
    except ValueError as exc:
        raise CliError(str(exc))

    E = np.asarray(triple.E)
    energy = np.sqrt(np.maximum(
        np.real(np.einsum("ti,ij,tj->t", traj.states.conj(), E, traj.states)), 0.0
    ))
    weighted = [None] * times.size
    if model == "sin" and X is not None:
        weighted = []
        for i in range(times.size):
            st = _deinterleave_band(traj.states[i], k1)
            y2 = vorticity_coordinates(st, div_rtol=1e-6)
            weighted.append(float(np.sqrt(max(np.real(y2.conj() @ X @ y2), 0.0))))
    if rate is not None:
        envelope = [float(c_env * np.exp(-rate * ti) * energy[0]) for ti in times]
    else:
        envelope = [None] * times.size

    if args.out:
        os.makedirs(args.out, exist_ok=True)
    outdir = args.out or "."
    rows = [
        (times[i], energy[i], weighted[i], envelope[i])
        for i in range(times.size)
    ]
    _write_csv(os.path.join(outdir, "timeseries.csv"),
               ["t", "norm", "weighted_norm", "envelope"], rows)
    report = {
        "model": model,
        "nu": nu,
        "final_norm": float(energy[-1]),
        "tolerances": _tol_dict(DEFAULT_TOL),
        "inputs": {"config": {"path": args.config, "sha256": cfg_hash}},
    }
    save_json(os.path.join(outdir, "report.json"), report)
    return EXIT_OK


def _field_rows(x1, x2, U, P):
    rows = []
    for i in range(x1.size):
        for j in range(x2.size):
            rows.append((x1[i], x2[j], U[i, j, 0], U[i, j, 1], P[i, j]))
    return rows


def _cmd_decay_report(args):
    if args.nu is None or args.nu <= 0:
        raise CliError("--nu must be a positive number")
    K = args.K
    k1_max = args.k1_max
    if K < 2 or k1_max < 1:
        raise CliError("need --K >= 2 and --k1-max >= 1")
    cfg = OseenConfig(
        nu=args.nu, drift="sin", K=K,
        k1_range=tuple(range(-k1_max, k1_max + 1)),
    )
    rng = np.random.default_rng(args.seed)
    states = random_band_states(range(0, k1_max + 1), K, rng)
    times = np.linspace(0.0, args.t_max, args.num_times)
    alpha = args.alpha if args.alpha is not None else 0.5 * alpha_min(args.nu)
    try:
        report = full_decay_report(cfg, states, times=times, alpha=alpha)
    except ValueError as exc:
        raise CliError(str(exc))

    if args.out:
        os.makedirs(args.out, exist_ok=True)
    outdir = args.out or "."

    doc = report.as_dict()
    doc["tolerances"] = _tol_dict(DEFAULT_TOL)
    doc["config_sha256"] = _sha256_config({
        "nu": args.nu, "K": K, "k1_max": k1_max, "seed": args.seed,
        "alpha": alpha, "t_max": args.t_max, "num_times": args.num_times,
    })
    save_json(os.path.join(outdir, "report.json"), doc)

    rows = [
        (report.times[i], report.norms[i], report.weighted_norms[i],
         report.envelope[i])
        for i in range(report.times.size)
    ]
    _write_csv(os.path.join(outdir, "timeseries.csv"),
               ["t", "norm", "weighted_norm", "envelope"], rows)

    x1, x2, U0, P0 = reconstruct_field(states)
    _write_csv(os.path.join(outdir, "field_initial.csv"),
               ["x1", "x2", "u1", "u2", "p"], _field_rows(x1, x2, U0, P0))
    x1, x2, U1, P1 = reconstruct_field(report.final_states)
    _write_csv(os.path.join(outdir, "field_final.csv"),
               ["x1", "x2", "u1", "u2", "p"], _field_rows(x1, x2, U1, P1))

    if not (report.envelope_ok and report.pressure_ok):
        print("certified envelope violated", file=sys.stderr)
        return EXIT_CERTIFICATION
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_tol_flags(p):
    p.add_argument("--tol-rank", type=float, default=None,
                   help="relative rank tolerance (default 1e-10)")
    p.add_argument("--tol-psd", type=float, default=None,
                   help="relative positivity tolerance (default 1e-10)")


def _add_out_flag(p):
    p.add_argument("--out", default=None, help="output file or directory")


def _configure_oseen_build(p):
    p.add_argument("--model", required=True, choices=["iso", "const", "sin"])
    p.add_argument("--k1", type=int, default=None)
    p.add_argument("--k2", type=int, default=0)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--b1", type=float, default=0.0)
    p.add_argument("--b2", type=float, default=0.0)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_oseen_build)


def _configure_oseen_quant(p):
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--k1-max", type=int, default=16)
    p.add_argument("--K", type=int, default=64)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_oseen_quant)


def build_parser():
    parser = _Parser(prog="hypoco",
                     description="hypocoercivity indices, staircase forms, "
                                 "and decay certificates")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hc-index", help="index of a (J, R) pair")
    p.add_argument("--j", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--m-max", type=int, default=None)
    _add_tol_flags(p)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_hc_index)

    p = sub.add_parser("staircase", help="staircase form of a triple")
    p.add_argument("--triple", default=None)
    p.add_argument("--e", default=None)
    p.add_argument("--j", default=None)
    p.add_argument("--r", default=None)
    _add_tol_flags(p)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_staircase)

    p = sub.add_parser("lyapunov", help="strict Lyapunov certificate")
    p.add_argument("--j", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--eps", default=None,
                   help="comma-separated weight coefficients (default: tuned)")
    _add_tol_flags(p)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_lyapunov)

    p = sub.add_parser("oseen", help="model builders and certificates")
    osub = p.add_subparsers(dest="oseen_command", required=True)
    _configure_oseen_build(osub.add_parser("build"))
    _configure_oseen_quant(osub.add_parser("quant"))

    _configure_oseen_build(sub.add_parser("oseen-build"))
    _configure_oseen_quant(sub.add_parser("oseen-quant"))

    p = sub.add_parser("simulate", help="propagate one system from a config")
    p.add_argument("--config", required=True)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("decay-report", help="multi-band decay envelope run")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--K", type=int, default=32)
    p.add_argument("--k1-max", type=int, default=8)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--num-times", type=int, default=81)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_decay_report)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"hypoco: {exc}", file=sys.stderr)
        return exc.code
    except StaircaseError as exc:
        print(f"hypoco: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"hypoco: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
