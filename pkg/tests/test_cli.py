import csv
import os
import subprocess
import sys

import numpy as np
import pytest

from subdiff.cli import read_manifest, run
from subdiff.ffpe import FfpeProblem, cell_centred_grid, gaussian_initial_profile, max_stable_dt, solve_ffpe
from subdiff.parallel import run_blocks
from subdiff.pricing import ContractParams, map_real_params, subordinated_price_mc, subordinated_price_quadrature
from subdiff.specfun import f_alpha, f_alpha_mode, gamma, mittag_leffler_neg
from subdiff.subdiffusion import ModelParams, sample_subordinated_paths, subordinated_density_grid
from subdiff.subordinator import SimConfig

REAL = ["--spot", "100", "--strike", "100", "--rate", "0.05", "--sigma", "0.2", "--maturity", "1"]


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_price_quad_textbook(tmp_path):
    assert run(["price", "--alpha", "1.0", *REAL, "--method", "quad", "--out-dir", str(tmp_path)]) == 0
    (row,) = read_rows(tmp_path / "price.csv")
    assert list(row) == ["alpha", "t", "spot", "strike", "beta", "method", "price", "std_error"]
    assert abs(float(row["price"]) - 10.4506) < 1e-4
    assert read_manifest(tmp_path / "manifest.txt")["artifact"] == ["price.csv"]


def test_price_quad_vs_mc(tmp_path):
    q, m = tmp_path / "q", tmp_path / "m"
    assert run(["price", "--alpha", "0.8", *REAL, "--method", "quad", "--out-dir", str(q)]) == 0
    assert run(["price", "--alpha", "0.8", *REAL, "--method", "mc", "--paths", "1000000",
                "--seed", "7", "--out-dir", str(m)]) == 0
    pq = float(read_rows(q / "price.csv")[0]["price"])
    rm = read_rows(m / "price.csv")[0]
    assert abs(pq - float(rm["price"])) <= 3 * float(rm["std_error"])
    c = map_real_params(100, 100, 0.05, 0.2, 1)
    assert float(rm["price"]) == subordinated_price_mc(0.8, c.tau, c, SimConfig(seed=7, n_paths=1_000_000, dtau=0.05, t_max=c.tau))[0]


def test_price_dimensionless_flags(tmp_path):
    assert run(["price", "--alpha", "0.6", "--spot", "100", "--strike", "110", "--beta", "0.5",
                "--tau-dimless", "1.0", "--out-dir", str(tmp_path)]) == 0
    (row,) = read_rows(tmp_path / "price.csv")
    ref = subordinated_price_quadrature(0.6, 1.0, ContractParams(100, 110, 0.5))
    assert float(row["price"]) == pytest.approx(ref, rel=1e-9)


def test_density_matches_module(tmp_path):
    assert run(["density", "--alpha", "0.7", "--t", "2", "--n-points", "11", "--out-dir", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "density.csv")
    x = np.array([float(r["x"]) for r in rows])
    ref = subordinated_density_grid(ModelParams(0.7), 2.0, np.linspace(-5, 5, 11)).values
    assert np.array_equal(x, np.linspace(-5, 5, 11))
    assert np.allclose([float(r["p"]) for r in rows], ref, rtol=1e-9)


def test_simulate_matches_module(tmp_path):
    argv = ["simulate", "--process", "subdiffusion", "--alpha", "0.6", "--paths", "3",
            "--n-times", "4", "--seed", "5", "--out-dir", str(tmp_path)]
    assert run(argv) == 0
    rows = read_rows(tmp_path / "paths.csv")
    assert len(rows) == 15 and list(rows[0]) == ["path_id", "t", "value"]
    grid = np.linspace(0, 1, 5)
    cfg = SimConfig(seed=5, n_paths=3, dtau=0.01, t_max=1.0)
    ref = run_blocks(lambda rng, n: sample_subordinated_paths(ModelParams(0.6), grid, cfg, rng, n), 3, 5, cfg.block_size)
    got = np.array([float(r["value"]) for r in rows]).reshape(3, 5)
    assert np.array_equal(got, ref)


@pytest.mark.parametrize("process", ["stable", "inverse"])
def test_simulate_monotone_processes(tmp_path, process):
    assert run(["simulate", "--process", process, "--alpha", "0.5", "--paths", "4", "--out-dir", str(tmp_path)]) == 0
    v = np.array([float(r["value"]) for r in read_rows(tmp_path / "paths.csv")]).reshape(4, -1)
    assert np.all(np.diff(v, axis=1) >= 0) and np.all(v[:, 0] == 0)


def test_special_values(tmp_path, capsys):
    assert run(["special", "--function", "f_alpha", "--alpha", "0.5", "--z", "0", "--out-dir", str(tmp_path)]) == 0
    assert abs(float(capsys.readouterr().out) - 0.5641896) < 1e-7
    assert float(read_rows(tmp_path / "special.csv")[0]["value"]) == f_alpha(0.5, 0.0)
    assert run(["special", "--function", "mittag_leffler", "--alpha", "0.3", "--z", "1", "7",
                "--out-dir", str(tmp_path)]) == 0
    vals = [float(r["value"]) for r in read_rows(tmp_path / "special.csv")]
    assert vals == [mittag_leffler_neg(0.3, 1.0), mittag_leffler_neg(0.3, 7.0)]
    assert run(["special", "--function", "gamma", "--z", "5", "--out-dir", str(tmp_path)]) == 0
    assert float(read_rows(tmp_path / "special.csv")[0]["value"]) == gamma(5) == 24
    assert run(["special", "--function", "f_alpha_mode", "--alpha", "0.75", "--out-dir", str(tmp_path)]) == 0
    assert float(read_rows(tmp_path / "special.csv")[0]["value"]) == f_alpha_mode(0.75)


def test_fpe_matches_module(tmp_path):
    assert run(["fpe", "--alpha", "0.5", "--dx", "0.4", "--n-output", "4", "--out-dir", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "fpe.csv")
    summary = read_rows(tmp_path / "fpe_summary.csv")
    x = cell_centred_grid(8.0, 40)
    n = int(np.ceil(1.0 / (0.5 * max_stable_dt(0.5, 1.0, x[1] - x[0]))))
    prob = FfpeProblem(ModelParams(0.5), x, np.linspace(0, 1, n + 1), gaussian_initial_profile(x, 1.0, 0.1))
    sol = solve_ffpe(prob, output_every=max(n // 4, 1))
    assert len(rows) == sol.p.size
    assert np.array_equal(np.array([float(r["p"]) for r in rows]), sol.p.ravel())
    assert [float(r["t"]) for r in summary] == list(sol.t)
    assert all(abs(float(r["mass_error"])) < 1e-6 for r in summary)


def test_exit_codes(tmp_path, capsys):
    out = ["--out-dir", str(tmp_path)]
    assert run(["price", "--alpha", "0.5", "--bogus", *out]) == 2
    assert "--bogus" in capsys.readouterr().err
    assert run(["price", "--alpha", "1.5", *REAL, *out]) == 2
    assert run(["price", "--alpha", "0.5", "--spot", "100", "--strike", "100", "--rate", "0.05", *out]) == 2
    assert run(["special", "--function", "gamma", "--z", "-2", *out]) == 2
    assert run(["fpe", "--alpha", "0.5", "--dt", "0.05", *out]) == 1
    err = capsys.readouterr().err
    assert "stability" in err
    assert run(["special", "--function", "f_alpha", *out]) == 2


def test_quadrature_failure_reports_tolerance(tmp_path, capsys):
    # an unreachable tolerance must fail loudly
    code = run(["density", "--alpha", "0.5", "--tol", "1e-300", "--n-points", "3", "--out-dir", str(tmp_path)])
    assert code == 1
    assert "achieved tolerance" in capsys.readouterr().err


def _files(d):
    return {f: (d / f).read_bytes() for f in sorted(os.listdir(d))}


@pytest.mark.parametrize("argv", [
    ["price", "--alpha", "0.7", *REAL, "--method", "mc", "--paths", "20000", "--seed", "3"],
    ["simulate", "--process", "inverse", "--alpha", "0.4", "--paths", "5", "--seed", "11"],
    ["fpe", "--alpha", "0.6", "--dx", "0.4", "--n-output", "3"],
])
def test_determinism_and_manifest_replay(tmp_path, monkeypatch, argv):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    monkeypatch.setenv("SUBDIFF_THREADS", "1")
    assert run([*argv, "--out-dir", str(a)]) == 0
    monkeypatch.setenv("SUBDIFF_THREADS", "4")
    assert run([*argv, "--out-dir", str(b)]) == 0
    assert _files(a) == _files(b)
    assert run(["replay", str(a / "manifest.txt"), "--out-dir", str(c)]) == 0
    assert _files(a) == _files(c)
    man = read_manifest(a / "manifest.txt")
    assert set(man["artifact"]) | {"manifest.txt"} == set(_files(a))


def test_csv_format(tmp_path):
    run(["special", "--function", "phi", "--z", "0.1", "--out-dir", str(tmp_path)])
    raw = (tmp_path / "special.csv").read_bytes()
    assert b"\r" not in raw
    assert raw.splitlines()[1] == b"phi,,0.10000000000000001,0.53982783727702899"


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "subdiff", "special", "--function", "gamma", "--z", "0.5",
                          "--out-dir", str(tmp_path)], capture_output=True, text=True, check=True)
    assert float(out.stdout) == pytest.approx(1.7724538509055159)
