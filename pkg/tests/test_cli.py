import numpy as np

from curvecross.cli import main

NARROW = """\
[scan]
omega_min_cm1 = 10500
omega_max_cm1 = 11500
omega_step_cm1 = 20
"""


def read_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return data[:, 0], data[:, 1]


def test_absorption_default_window(tmp_path):
    out = tmp_path / "run"
    assert main(["absorption", "--out", str(out)]) == 0
    for name in ("absorption_coupled.csv", "absorption_uncoupled.csv"):
        path = out / name
        assert path.exists()
        header = path.read_text().splitlines()[0]
        assert header == "omega_cm1,intensity"
        omega, intensity = read_csv(path)
        assert omega.size == 401
        assert omega[0] == 9500.0 and omega[-1] == 13500.0
        assert np.all(intensity > 0)
    assert (out / "absorption.meta.txt").exists()


def test_zero_coupling_files_identical(tmp_path):
    cfg = tmp_path / "narrow.cfg"
    cfg.write_text(NARROW)
    out = tmp_path / "run"
    assert main(["absorption", "--config", str(cfg), "--k0", "0", "--out", str(out)]) == 0
    coupled = (out / "absorption_coupled.csv").read_bytes()
    uncoupled = (out / "absorption_uncoupled.csv").read_bytes()
    assert coupled == uncoupled


def test_sharp_line_peaks(tmp_path):
    out = tmp_path / "run"
    assert main(["absorption", "--gamma", "20", "--k0", "0", "--out", str(out)]) == 0
    omega, intensity = read_csv(out / "absorption_uncoupled.csv")
    peaks = np.flatnonzero(
        (intensity[1:-1] > intensity[:-2]) & (intensity[1:-1] > intensity[2:])
    ) + 1
    for expected in (10700.0, 11100.0, 11500.0):
        nearest = peaks[np.argmin(np.abs(omega[peaks] - expected))]
        assert abs(omega[nearest] - expected) <= 10.0


def test_raman_zero_displacement(tmp_path):
    out = tmp_path / "run"
    assert main(
        ["raman", "--nf", "1", "--displacement", "0", "--out", str(out)]
    ) == 0
    _, uncoupled = read_csv(out / "raman_uncoupled.csv")
    assert np.max(uncoupled) < 1e-20


def test_raman_overtone_runs(tmp_path):
    cfg = tmp_path / "narrow.cfg"
    cfg.write_text(NARROW)
    out = tmp_path / "run"
    assert main(["raman", "--nf", "2", "--config", str(cfg), "--out", str(out)]) == 0
    omega, intensity = read_csv(out / "raman_coupled.csv")
    assert omega.size == 51
    assert np.all(np.isfinite(intensity))


def test_determinism_and_sidecar_roundtrip(tmp_path):
    cfg = tmp_path / "narrow.cfg"
    cfg.write_text(NARROW)
    first = tmp_path / "a"
    second = tmp_path / "b"
    assert main(["raman", "--config", str(cfg), "--out", str(first)]) == 0
    assert main(["raman", "--config", str(cfg), "--out", str(second)]) == 0
    assert (first / "raman_coupled.csv").read_bytes() == (
        second / "raman_coupled.csv"
    ).read_bytes()
    # the sidecar config echo reproduces the run exactly
    third = tmp_path / "c"
    assert main(
        ["raman", "--config", str(first / "raman.meta.txt"), "--out", str(third)]
    ) == 0
    assert (first / "raman_coupled.csv").read_bytes() == (
        third / "raman_coupled.csv"
    ).read_bytes()


def test_greens_probe(tmp_path):
    cfg = tmp_path / "narrow.cfg"
    cfg.write_text(NARROW)
    out = tmp_path / "run"
    assert main(["greens-probe", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "greens_probe.csv").read_text().splitlines()
    assert lines[0] == "omega_cm1,g1_real,g1_imag,g2_real,g2_imag"
    assert len(lines) == 52
    # retarded sign convention: Im G(x_c, x_c) < 0
    g1_imag = [float(line.split(",")[2]) for line in lines[1:]]
    assert all(v < 0 for v in g1_imag)


def test_invalid_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[model]\nmass_amu = -1\n")
    assert main(["validate", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "mass_amu" in err


def test_missing_config_exits_2(tmp_path):
    assert main(["absorption", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_numerical_failure_exits_3(tmp_path, capsys):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text("[grid]\ngrid_x_max_angstrom = 0.15\n" + NARROW)
    out = tmp_path / "run"
    assert main(["absorption", "--config", str(cfg), "--out", str(out)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_validate_quick_passes(capsys):
    assert main(["validate", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "FAIL" not in out
