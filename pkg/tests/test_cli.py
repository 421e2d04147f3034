"""End-to-end command-line tests: flows, file outputs, and exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest

from xtcancel import cli
from xtcancel.bundle import save_bundle
from xtcancel.errors import SimulationDivergedError
from xtcancel.fixtures import (non_realizable_bundle, reference_termination,
                               uncoupled_bundle)
from xtcancel.termination import load_network, save_network

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fx(name):
    return str(FIXTURES / name)


def test_version(capsys):
    assert cli.main(["--version"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("xtcancel ")
    assert "schemas" in out


def test_synth_full_network(tmp_path):
    out = tmp_path / "net.json"
    zc = tmp_path / "zc.json"
    hist = tmp_path / "hist.csv"
    code = cli.main(["synth", "--lc", fx("six.json"), "-o", str(out),
                     "--zc", str(zc), "--histogram", str(hist)])
    assert code == 0
    net = load_network(out)
    assert len(net.elements) == 21  # 6 self + 15 cross
    zdata = json.loads(zc.read_text())
    assert zdata["n"] == 6
    z = np.array(zdata["zc"])
    assert np.array_equal(z, z.T)
    assert hist.read_text().splitlines()[0] == "siemens,count"


def test_synth_reduce_existing_network(tmp_path):
    src = tmp_path / "table.json"
    save_network(reference_termination(), src)
    explicit = tmp_path / "explicit.json"
    implied = tmp_path / "implied.json"
    assert cli.main(["synth", "--net", str(src), "--cutoff-self", "500",
                     "--cutoff-cross", "1000", "-o", str(explicit)]) == 0
    assert len(load_network(explicit).elements) == 33
    # omitting --cutoff-cross applies the recommended doubled value
    assert cli.main(["synth", "--net", str(src), "--cutoff-self", "500",
                     "-o", str(implied)]) == 0
    assert implied.read_bytes() == explicit.read_bytes()


def test_synth_flag_validation(tmp_path):
    out = str(tmp_path / "x.json")
    assert cli.main(["synth", "--lc", fx("six.json"), "--net", fx("pair-network.json"),
                     "-o", out]) == 2
    assert cli.main(["synth", "--net", fx("pair-network.json"), "--zc",
                     str(tmp_path / "z.json"), "-o", out]) == 2
    assert cli.main(["synth", "--lc", fx("six.json"), "--cutoff-cross", "100",
                     "-o", out]) == 2
    assert cli.main(["synth", "-o", out]) == 2


def test_synth_non_realizable_exit_3(tmp_path):
    src = tmp_path / "bad.json"
    save_bundle(non_realizable_bundle(), src)
    assert cli.main(["synth", "--lc", str(src), "-o", str(tmp_path / "n.json")]) == 3


def test_fom_report_and_codes(tmp_path):
    rep = tmp_path / "rep.json"
    codes = tmp_path / "codes.csv"
    assert cli.main(["fom", "--lc", fx("pair.json"), "-o", str(rep),
                     "--codes", str(codes)]) == 0
    data = json.loads(rep.read_text())
    assert data["n_codes"] == 4 and data["sampled"] is False
    assert data["avg_bundle_current_a"] == pytest.approx(6.0e-3, rel=1e-9)
    assert data["max_wire_current_a"] == pytest.approx(12.5e-3, rel=1e-9)
    assert data["avg_power_w"] == pytest.approx(9.25e-3, rel=1e-9)
    lines = codes.read_text().splitlines()
    assert lines[0] == "code,i1,i2" and len(lines) == 5


def test_fom_from_network_file(tmp_path):
    rep = tmp_path / "rep.json"
    assert cli.main(["fom", "--network", fx("twelve-50ohm.json"),
                     "-o", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert data["n_codes"] == 4096
    assert data["max_bundle_current_a"] == pytest.approx(0.120, rel=1e-9)
    assert data["max_wire_current_a"] == pytest.approx(10.0e-3, rel=1e-9)


def test_fom_cap_and_sampling(tmp_path):
    wide = tmp_path / "wide.json"
    save_bundle(uncoupled_bundle(21), wide)
    rep = tmp_path / "rep.json"
    assert cli.main(["fom", "--lc", str(wide), "-o", str(rep)]) == 4
    assert cli.main(["fom", "--lc", str(wide), "-o", str(rep),
                     "--samples", "400", "--seed", "3"]) == 0
    data = json.loads(rep.read_text())
    assert data["sampled"] is True and data["samples"] == 400
    assert data["max_wire_current_a"] == pytest.approx(10.0e-3, rel=1e-6)
    # exhaustive code table cannot combine with sampling
    assert cli.main(["fom", "--lc", str(wide), "-o", str(rep),
                     "--samples", "400", "--codes", str(tmp_path / "c.csv")]) == 2


def test_sim_eye_flow(tmp_path):
    waves = tmp_path / "waves.csv"
    assert cli.main(["sim", "--link", fx("link-scalar.json"), "-o", str(waves)]) == 0
    header = waves.read_text().splitlines()[0]
    assert header == "time_s,w1"
    eye = tmp_path / "eye.json"
    svg = tmp_path / "eye.svg"
    folded = tmp_path / "folded.csv"
    assert cli.main(["eye", "--waves", str(waves), "--link", fx("link-scalar.json"),
                     "-o", str(eye), "--svg", str(svg), "--folded", str(folded)]) == 0
    data = json.loads(eye.read_text())
    # ideal source, matched line: full 1 V eye
    assert data["min_v"] == pytest.approx(1.0, abs=1e-9)
    assert svg.read_text().startswith("<svg")
    assert folded.read_text().splitlines()[0] == "wire,phase_ui,volts"


def test_sim_deterministic_and_seeded(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert cli.main(["sim", "--link", fx("link-pair.json"), "-o", str(a)]) == 0
    assert cli.main(["sim", "--link", fx("link-pair.json"), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    assert cli.main(["sim", "--link", fx("link-pair.json"), "--seed", "9",
                     "-o", str(c)]) == 0
    assert c.read_bytes() != a.read_bytes()


def test_sweep_rs(tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--mode", "rs", "--link", fx("link-scalar.json"),
                     "--values", "0,25", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "value,wire,eye_v,min_v,avg_v,max_v"
    assert len(lines) == 3
    rows = [line.split(",") for line in lines[1:]]
    assert float(rows[0][0]) == 0.0 and float(rows[1][0]) == 25.0
    assert float(rows[0][2]) > float(rows[1][2])  # eye shrinks with source R
    assert float(rows[1][2]) == pytest.approx(50.0 / 75.0, rel=0.01)


def test_sweep_cutoff(tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--mode", "cutoff", "--link", fx("link-pair.json"),
                     "--values", "inf,90/100", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5  # 2 cutoff points x 2 wires
    full = [float(line.split(",")[2]) for line in lines[1:3]]
    cut = [float(line.split(",")[2]) for line in lines[3:5]]
    assert min(full) > 0.95  # full cancellation at rs = 0
    assert all(v > 0.0 for v in cut)
    assert lines[1].split(",")[0] == "inf"


def test_sweep_uncoupled(tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--mode", "uncoupled", "--link", fx("link-pair.json"),
                     "--values", "0,0.002", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5
    base = min(float(line.split(",")[2]) for line in lines[1:3])
    far = min(float(line.split(",")[2]) for line in lines[3:5])
    assert far <= base + 1e-12


def test_sweep_value_validation(tmp_path):
    out = str(tmp_path / "s.csv")
    assert cli.main(["sweep", "--mode", "rs", "--link", fx("link-scalar.json"),
                     "--values", "", "-o", out]) == 2
    assert cli.main(["sweep", "--mode", "rs", "--link", fx("link-scalar.json"),
                     "--values", "1,abc", "-o", out]) == 2
    assert cli.main(["sweep", "--mode", "cutoff", "--link", fx("link-pair.json"),
                     "--values", "500", "-o", out]) == 2


def test_exit_code_2_on_bad_inputs(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["synth", "--lc", str(bad), "-o", str(tmp_path / "o.json")]) == 2
    assert cli.main(["sim", "--link", str(tmp_path / "missing.json"),
                     "-o", str(tmp_path / "w.csv")]) == 2
    assert cli.main(["fom", "--lc", fx("pair.json"), "-o", str(tmp_path / "r.json"),
                     "--levels", "1"]) == 2
    assert cli.main(["sim", "--no-such-flag"]) == 2
    assert cli.main(["frobnicate"]) == 2


def test_eye_wire_mismatch_exit_2(tmp_path):
    waves = tmp_path / "waves.csv"
    assert cli.main(["sim", "--link", fx("link-scalar.json"), "-o", str(waves)]) == 0
    assert cli.main(["eye", "--waves", str(waves), "--link", fx("link-pair.json"),
                     "-o", str(tmp_path / "e.json")]) == 2


def test_exit_code_5_on_divergence(tmp_path, monkeypatch):
    def blow_up(engine, duration_s=None):
        raise SimulationDivergedError(41, "receiver node voltages")

    monkeypatch.setattr(cli, "run_transient", blow_up)
    assert cli.main(["sim", "--link", fx("link-scalar.json"),
                     "-o", str(tmp_path / "w.csv")]) == 5
