"""End-to-end tests of the command-line interface."""

import csv

import numpy as np
import pytest

from ssmc.cli import SCAN_COLUMNS, main
from ssmc.libio import load_library

SMALL_CFG = (
    "family = morse\n"
    "n_species = 2\n"
    "T = 250\n"
    "n_seeds = 2\n"
)


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(SMALL_CFG)
    return str(path)


@pytest.fixture
def lib_path(tmp_path, cfg_path):
    out = str(tmp_path / "lib.txt")
    assert main(["build-library", "--config", cfg_path, "--out", out,
                 "--save-states"]) == 0
    return out


def test_build_library(lib_path, capsys):
    lib = load_library(lib_path)
    assert lib.kind == "ssmc"
    assert lib.n_species == 2
    assert lib.final_states is not None


def test_build_library_naive(tmp_path, cfg_path):
    out = str(tmp_path / "naive.txt")
    assert main(["build-library", "--config", cfg_path, "--out", out,
                 "--naive"]) == 0
    assert load_library(out).kind == "naive"


def test_build_library_bad_config(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("family = unknown\n")
    out = str(tmp_path / "x.txt")
    assert main(["build-library", "--config", str(bad), "--out", out]) == 2
    assert main(["build-library", "--config", str(tmp_path / "none.cfg"),
                 "--out", out]) == 2


def test_characterize(lib_path, tmp_path, capsys):
    csv_path = str(tmp_path / "run.csv")
    assert main(["characterize", "--library", lib_path, "--y", "0.3,0.7",
                 "--sigma", "0.001", "--seed", "3", "--out", csv_path]) == 0
    out = capsys.readouterr().out
    assert "epsilon" in out and "cond(A)" in out
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["method", "cond_A", "epsilon", "sigma_rel", "seed"]
    assert rows[1][0] == "ssmc"
    assert float(rows[1][2]) < 0.1


def test_characterize_random_mixture(lib_path, capsys):
    assert main(["characterize", "--library", lib_path, "--seed", "5"]) == 0
    out = capsys.readouterr().out
    y = [float(v) for v in out.splitlines()[-3].split("=")[1].split()]
    assert sum(y) == pytest.approx(1.0, abs=1e-6)


def test_characterize_wrong_y_length(lib_path):
    assert main(["characterize", "--library", lib_path,
                 "--y", "0.2,0.3,0.5"]) == 2


def test_extend_library(lib_path, tmp_path, capsys):
    out = str(tmp_path / "bigger.txt")
    assert main(["extend-library", "--library", lib_path, "--out", out,
                 "--mass", "1900"]) == 0
    lib = load_library(out)
    assert lib.n_species == 3
    assert lib.labels[-1] == "m=1900"
    assert lib.species[-1]["m"] == "1900"


def test_extend_library_requires_parameter(lib_path, tmp_path):
    out = str(tmp_path / "bigger.txt")
    assert main(["extend-library", "--library", lib_path, "--out", out]) == 2


def test_scan_sigma(tmp_path):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text(SMALL_CFG + "scan_axis = sigma\n"
                   "scan_values = 0.001, 0.01\n")
    out = str(tmp_path / "scan.csv")
    assert main(["scan", "--config", str(cfg), "--out", out]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == SCAN_COLUMNS
    # 2 values x 2 methods x 2 seeds
    assert len(rows) == 1 + 8
    methods = {r[2] for r in rows[1:]}
    assert methods == {"ssmc", "naive"}
    assert all(r[7] == "" for r in rows[1:])       # no error rows
    eps = [float(r[5]) for r in rows[1:] if r[2] == "ssmc"]
    assert all(np.isfinite(eps))


def test_scan_n_s(tmp_path):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text(SMALL_CFG + "scan_axis = n_s\nscan_values = 2, 3\n")
    out = str(tmp_path / "scan.csv")
    assert main(["scan", "--config", str(cfg), "--out", out]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert {r[1] for r in rows[1:]} == {"2", "3"}


def test_scan_requires_axis(tmp_path, cfg_path):
    out = str(tmp_path / "scan.csv")
    assert main(["scan", "--config", cfg_path, "--out", out]) == 2
