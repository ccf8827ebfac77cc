"""End-to-end tests of the command line interface (in-process)."""

import json

import numpy as np
import pytest

from hypoco import build_isotropic_mode
from hypoco.cli import main
from hypoco.matrix_io import (
    load_json,
    matrix_from_dict,
    matrix_to_dict,
    save_json,
    triple_to_dict,
)

J_ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
R_E1 = np.diag([1.0, 0.0])


def write_matrix(path, M):
    save_json(str(path), matrix_to_dict(np.asarray(M, dtype=complex)))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    return header, rows


def col(rows, i):
    return [float(r[i]) if r[i] else None for r in rows]


@pytest.fixture
def rot_pair(tmp_path):
    j = write_matrix(tmp_path / "j.json", J_ROT)
    r = write_matrix(tmp_path / "r.json", R_E1)
    return j, r


# -------------------------------------------------------------------- hc-index


def test_hc_index_command(rot_pair, tmp_path):
    j, r = rot_pair
    out = tmp_path / "report.json"
    assert main(["hc-index", "--j", j, "--r", r, "--out", str(out)]) == 0
    doc = load_json(str(out))
    assert doc["m_hc"] == 1
    assert doc["kappa"] == pytest.approx(1.0, rel=1e-8)
    assert all(doc["method_agreement"].values())
    assert set(doc["tolerances"]) == {"rank_rtol", "psd_rtol", "coercivity_rtol"}
    for key in ("j", "r"):
        assert len(doc["inputs"][key]["sha256"]) == 64


def test_hc_index_stdout_and_determinism(rot_pair, tmp_path, capsys):
    j, r = rot_pair
    assert main(["hc-index", "--j", j, "--r", r]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["m_hc"] == 1
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["hc-index", "--j", j, "--r", r, "--out", str(out1)]) == 0
    assert main(["hc-index", "--j", j, "--r", r, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_hc_index_error_paths(rot_pair, tmp_path):
    j, r = rot_pair
    assert main(["hc-index", "--j", str(tmp_path / "nope.json"), "--r", r]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("not json at all")
    assert main(["hc-index", "--j", str(bad), "--r", r]) == 1
    assert main(["hc-index", "--j", j, "--r", r, "--tol-rank", "0.5"]) == 1
    assert main(["hc-index", "--j", j, "--r", r, "--m-max", "-3"]) == 1


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["hc-index", "--no-such-flag"])
    assert exc.value.code == 1


# -------------------------------------------------------------------- staircase


def test_staircase_command_triple_file(tmp_path):
    t = build_isotropic_mode((1, 2), (0.3, -0.1), 0.7)
    path = tmp_path / "triple.json"
    save_json(str(path), triple_to_dict(t))
    out = tmp_path / "form.json"
    assert main(["staircase", "--triple", str(path), "--out", str(out)]) == 0
    doc = load_json(str(out))
    assert doc["dims"] == [1, 1, 0, 1, 0]
    assert doc["classification"]["dae_index"] == 2
    assert doc["classification"]["negative_hypocoercive"] is True
    ev = doc["classification"]["finite_eigenvalues"]
    assert len(ev) == 1
    assert ev[0][0] == pytest.approx(-0.7 * 5.0, rel=1e-8)
    P = matrix_from_dict(doc["P"])
    assert np.allclose(P @ P.conj().T, np.eye(3), atol=1e-12)
    assert doc["warnings"] == []


def test_staircase_command_separate_files(tmp_path):
    t = build_isotropic_mode((1, 2), (0.0, 0.0), 0.7)
    e = write_matrix(tmp_path / "e.json", t.E)
    j = write_matrix(tmp_path / "j.json", t.J)
    r = write_matrix(tmp_path / "r.json", t.R)
    out = tmp_path / "form.json"
    assert main(["staircase", "--e", e, "--j", j, "--r", r,
                 "--out", str(out)]) == 0
    assert load_json(str(out))["dims"] == [1, 1, 0, 1, 0]
    assert main(["staircase", "--e", e, "--j", j]) == 1  # r missing


def test_staircase_singular_pencil_reported(tmp_path):
    zero = np.zeros((1, 1))
    e = write_matrix(tmp_path / "e.json", zero)
    j = write_matrix(tmp_path / "j.json", zero)
    r = write_matrix(tmp_path / "r.json", zero)
    out = tmp_path / "form.json"
    assert main(["staircase", "--e", e, "--j", j, "--r", r,
                 "--out", str(out)]) == 0
    doc = load_json(str(out))
    assert doc["dims"] == [0, 0, 0, 0, 1]
    assert doc["classification"]["regular"] is False
    assert doc["classification"]["dae_index"] is None


# -------------------------------------------------------------------- lyapunov


def test_lyapunov_tuned(rot_pair, tmp_path):
    j, r = rot_pair
    out = tmp_path / "cert.json"
    assert main(["lyapunov", "--j", j, "--r", r, "--out", str(out)]) == 0
    doc = load_json(str(out))
    assert doc["m_hc"] == 1
    assert 0.0 < doc["mu"] <= 0.5 + 1e-9
    assert doc["condition_number"] >= 1.0
    X = matrix_from_dict(doc["X"])
    assert np.linalg.eigvalsh((X + X.conj().T) / 2.0)[0] > 0.0


def test_lyapunov_explicit_eps(rot_pair, tmp_path):
    j, r = rot_pair
    out = tmp_path / "cert.json"
    assert main(["lyapunov", "--j", j, "--r", r, "--eps", "0.4",
                 "--out", str(out)]) == 0
    doc = load_json(str(out))
    assert doc["eps"] == [0.4]
    assert doc["mu"] > 0.0


def test_lyapunov_failure_modes(rot_pair, tmp_path):
    j, r = rot_pair
    assert main(["lyapunov", "--j", j, "--r", r, "--eps", "a,b"]) == 1
    # eps far too large: the weight loses definiteness
    assert main(["lyapunov", "--j", j, "--r", r, "--eps", "10"]) == 2
    # J = 0 with singular R never certifies: infinite index
    j0 = write_matrix(tmp_path / "j0.json", np.zeros((2, 2)))
    assert main(["lyapunov", "--j", j0, "--r", r]) == 2


# ----------------------------------------------------------------------- oseen


def test_oseen_build_both_spellings(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["--model", "iso", "--k1", "1", "--k2", "2", "--nu", "0.7",
            "--b1", "0.3", "--b2", "-0.1"]
    assert main(["oseen", "build"] + argv + ["--out", str(out1)]) == 0
    assert main(["oseen-build"] + argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc = load_json(str(out1))
    assert doc["model"]["name"] == "iso"
    assert np.allclose(matrix_from_dict(doc["E"]), np.diag([1.0, 1.0, 0.0]))


def test_oseen_build_error_paths(tmp_path):
    assert main(["oseen-build", "--model", "iso", "--k1", "1"]) == 1  # no nu
    assert main(["oseen-build", "--model", "sin", "--k1", "1",
                 "--nu", "1.0"]) == 1  # no K
    assert main(["oseen-build", "--model", "iso", "--k1", "0", "--k2", "0",
                 "--nu", "1.0"]) == 1  # zero mode
    with pytest.raises(SystemExit) as exc:
        main(["oseen-build", "--model", "cubic", "--k1", "1", "--nu", "1.0"])
    assert exc.value.code == 1


def test_oseen_quant_command(tmp_path):
    out = tmp_path / "quant.json"
    assert main(["oseen-quant", "--nu", "1.0", "--k1-max", "2", "--K", "16",
                 "--out", str(out)]) == 0
    doc = load_json(str(out))
    assert doc["alpha_min"] == pytest.approx(0.6972, rel=1e-3)
    assert len(doc["kappa"]) == 2
    assert len(doc["config_sha256"]) == 64
    assert main(["oseen-quant", "--k1-max", "2"]) == 1  # nu missing


# -------------------------------------------------------------------- simulate


def write_config(path, **kwargs):
    path.write_text(json.dumps(kwargs))
    return str(path)


def test_simulate_sin_band(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", model="sin", nu=1.0, K=6, k1=1,
                       t_max=5.0, num_times=11, seed=3)
    outdir = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(outdir)]) == 0
    header, rows = read_csv(outdir / "timeseries.csv")
    assert header == ["t", "norm", "weighted_norm", "envelope"]
    assert len(rows) == 11
    norm = col(rows, 1)
    weighted = col(rows, 2)
    envelope = col(rows, 3)
    assert norm[-1] < norm[0]
    assert all(w is not None and w > 0 for w in weighted)
    assert all(n <= e * (1.0 + 1e-8) for n, e in zip(norm, envelope))
    report = load_json(str(outdir / "report.json"))
    assert report["model"] == "sin"
    assert report["final_norm"] == pytest.approx(norm[-1])
    assert len(report["inputs"]["config"]["sha256"]) == 64


def test_simulate_iso_matches_modal_rate(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", model="iso", nu=0.5, k=[1, 2],
                       t_max=2.0, num_times=9, seed=1)
    outdir = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(outdir)]) == 0
    _, rows = read_csv(outdir / "timeseries.csv")
    norm = col(rows, 1)
    envelope = col(rows, 3)
    assert col(rows, 2) == [None] * 9
    for n, e in zip(norm, envelope):
        assert n == pytest.approx(e, rel=1e-8)


def test_simulate_const_preserves_norm(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", model="const", nu=0.5, k=[2, 0],
                       b=[1.0, 0.0], t_max=20.0, num_times=21, seed=2)
    outdir = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(outdir)]) == 0
    _, rows = read_csv(outdir / "timeseries.csv")
    norm = col(rows, 1)
    assert col(rows, 3) == [None] * 21
    assert max(abs(n - norm[0]) for n in norm) < 1e-10 * norm[0]


def test_simulate_reruns_are_byte_identical(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", model="sin", nu=1.0, K=4, k1=1,
                       t_max=2.0, num_times=5, seed=7)
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["simulate", "--config", cfg, "--out", str(d1)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(d2)]) == 0
    assert (d1 / "timeseries.csv").read_bytes() == (d2 / "timeseries.csv").read_bytes()
    assert (d1 / "report.json").read_bytes() == (d2 / "report.json").read_bytes()


def test_simulate_config_errors(tmp_path):
    missing = tmp_path / "nope.json"
    assert main(["simulate", "--config", str(missing)]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["simulate", "--config", str(bad)]) == 1
    cases = [
        dict(nu=1.0),                                   # no model
        dict(model="spiral"),                           # unknown model
        dict(model="iso", nu=1.0),                      # no k
        dict(model="iso", nu=1.0, k=[1, 2], num_times=1),
        dict(model="sin", nu=1.0, k1=0, K=4),
        dict(model="sin", nu=-1.0, k1=1, K=4),
    ]
    for i, c in enumerate(cases):
        cfg = write_config(tmp_path / f"c{i}.json", **c)
        assert main(["simulate", "--config", cfg]) == 1, c


# ---------------------------------------------------------------- decay-report


def test_decay_report_command(tmp_path):
    outdir = tmp_path / "run"
    assert main(["decay-report", "--nu", "1.0", "--K", "4", "--k1-max", "1",
                 "--t-max", "5.0", "--num-times", "11", "--seed", "5",
                 "--out", str(outdir)]) == 0
    doc = load_json(str(outdir / "report.json"))
    assert doc["envelope_ok"] is True and doc["pressure_ok"] is True
    assert doc["alpha"] > 0.0
    assert len(doc["config_sha256"]) == 64
    assert {row["k1"] for row in doc["per_k1"]} == {-1, 0, 1}
    header, rows = read_csv(outdir / "timeseries.csv")
    assert header == ["t", "norm", "weighted_norm", "envelope"]
    assert len(rows) == 11
    assert all(float(r[1]) <= float(r[3]) * (1 + 1e-8) for r in rows)
    fh, frows = read_csv(outdir / "field_initial.csv")
    assert fh == ["x1", "x2", "u1", "u2", "p"]
    assert len(frows) == 10 * 10  # default grid 2 max(K, k1_max) + 2
    _, frows2 = read_csv(outdir / "field_final.csv")
    assert len(frows2) == len(frows)


def test_decay_report_bad_arguments():
    assert main(["decay-report", "--nu", "-1.0"]) == 1
    assert main(["decay-report", "--nu", "1.0", "--K", "1"]) == 1
    assert main(["decay-report", "--nu", "1.0", "--k1-max", "0"]) == 1
