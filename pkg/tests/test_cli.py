import json
import subprocess
import sys

import numpy as np
import pytest

from invsource import io as fio
from invsource.cli import EXIT_INVALID, EXIT_OK, EXIT_VERIFY, main

FAR = """
[source]
t_min = 0
t_max = 1
amplitude = quadratic
[shape]
kind = Peanut
[observations]
mode = far
{obs}
[imaging]
box = -3 3 -3 3
resolution = 21
{extra}
"""


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def far_cfg(tmp_path):
    return write(tmp_path, FAR.format(obs="directions = 1 0", extra=""))


def test_synthesize_m8_gives_16_files(tmp_path):
    cfg = write(tmp_path, FAR.format(obs="angles = 8", extra=""))
    out = tmp_path / "data"
    assert main(["synthesize", "--config", cfg, "--out", str(out)]) == EXIT_OK
    files = sorted(out.glob("far_*.dat"))
    assert len(files) == 16
    run = json.loads((out / "run.json").read_text())
    assert run["files"] == [f.name for f in files]
    assert run["grid"]["N"] == 16


def test_noise_seed_reproducible(tmp_path):
    cfg = write(tmp_path, FAR.format(obs="directions = 1 0", extra="[noise]\nlevel = 0.01\nseed = 5"))
    outs = []
    for i, seed in enumerate((None, None, 6)):
        out = tmp_path / f"o{i}"
        args = ["synthesize", "--config", cfg, "--out", str(out)] + ([] if seed is None else ["--seed", str(seed)])
        assert main(args) == EXIT_OK
        outs.append((out / "far_000.dat").read_bytes())
    assert outs[0] == outs[1] and outs[0] != outs[2]


def test_image_far_outputs(tmp_path, far_cfg, capsys):
    out = tmp_path / "img"
    assert main(["image-far", "--config", far_cfg, "--out", str(out)]) == EXIT_OK
    g = fio.read_grid(out / "grid.txt")
    assert g.shape == (21, 21) and "input_hash" in g.manifest and g.manifest["delta"] == 3e-3
    assert (out / "grid.pgm").read_bytes().startswith(b"P5\n21 21\n255\n")
    assert "points above delta" in capsys.readouterr().out


def test_image_from_files_matches_synthesis(tmp_path, far_cfg):
    data = tmp_path / "data"
    main(["synthesize", "--config", far_cfg, "--out", str(data)])
    files = [str(p) for p in sorted(data.glob("*.dat"))]
    main(["image-far", "--config", far_cfg, "--out", str(tmp_path / "a")])
    main(["image-far", "--config", far_cfg, "--out", str(tmp_path / "b"), "--threads", "4"] + files[::-1])
    assert (tmp_path / "a" / "grid.txt").read_bytes() == (tmp_path / "b" / "grid.txt").read_bytes()


def test_mixed_manifest_refused(tmp_path, far_cfg, capsys):
    other = write(tmp_path, FAR.format(obs="directions = 1 0", extra="").replace("Peanut", "Kite"), "o.ini")
    main(["synthesize", "--config", far_cfg, "--out", str(tmp_path / "a")])
    main(["synthesize", "--config", other, "--out", str(tmp_path / "b")])
    files = [str(tmp_path / "a" / "far_000.dat"), str(tmp_path / "b" / "far_001.dat")]
    assert main(["image-far", "--config", far_cfg, "--out", str(tmp_path / "c")] + files) == EXIT_INVALID
    assert "different runs" in capsys.readouterr().err


def test_mode_and_regime_mismatch(tmp_path, far_cfg, capsys):
    assert main(["image-near", "--config", far_cfg, "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["scan-tmin", "--config", far_cfg, "--out", str(tmp_path)]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert "expects 'near'" in err and "scan-tmax" in err


def test_unknown_key_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, FAR.format(obs="directions = 1 0", extra="colour = red"))
    assert main(["image-far", "--config", cfg]) == EXIT_INVALID
    assert "unknown key 'colour'" in capsys.readouterr().err
    assert main(["verify", "--config", str(tmp_path / "missing.ini")]) == EXIT_INVALID
    assert main(["verify", "--config", cfg, "--threads", "0"]) == EXIT_INVALID


def test_malformed_dataset_exit_code(tmp_path, far_cfg, capsys):
    bad = tmp_path / "bad.dat"
    bad.write_text("# mode far\n# direction 1 0\n")
    assert main(["image-far", "--config", far_cfg, str(bad)]) == EXIT_INVALID
    assert "bad.dat:3:" in capsys.readouterr().err


def test_scan_tmax_end_to_end(tmp_path, capsys):
    cfg = """
[source]
t_min = 0
t_max = 4
amplitude = quadratic
[shape]
kind = RoundSquare
r = 0.8
[band]
n = 32
[observations]
directions = 1 0
[scan]
eps0 = 0.01
eta_min = 3
eta_max = 5
"""
    path = write(tmp_path, cfg)
    out = tmp_path / "scan"
    assert main(["scan-tmax", "--config", path, "--out", str(out)]) == EXIT_OK
    curve = fio.read_scan(out / "scan.txt")
    assert abs(curve.estimate - 4.0) <= 0.25
    assert "estimate 4.15" in capsys.readouterr().out


def test_verify_default_passes(tmp_path, far_cfg, capsys):
    assert main(["verify", "--config", far_cfg, "--out", str(tmp_path)]) == EXIT_OK
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("CHECK")]
    names = {l.split()[1] for l in lines}
    assert names == {"conjugate-symmetry", "probe-ft-box", "factorization", "time-domain", "ft-support"}
    assert all(" PASS " in l for l in lines)
    assert json.loads((tmp_path / "verify.json").read_text())["checks"]


def test_verify_flags_corrupted_dataset(tmp_path, far_cfg, capsys):
    data = tmp_path / "data"
    main(["synthesize", "--config", far_cfg, "--out", str(data)])
    path = data / "far_000.dat"
    lines = path.read_text().splitlines()
    k, re, im = lines[10].split()
    lines[10] = f"{k} {re} {-float(im)!r}"
    path.write_text("\n".join(lines) + "\n")
    files = [str(path), str(data / "far_001.dat")]
    assert main(["verify", "--config", far_cfg, "--out", str(tmp_path)] + files) == EXIT_VERIFY
    out = capsys.readouterr().out
    bad = [l for l in out.splitlines() if l.startswith("CHECK conjugate-symmetry FAIL")]
    assert len(bad) == 1 and f"worst_k={-float(k):.17g}" in bad[0]


def test_verify_coarse_quadrature_reported(tmp_path, capsys):
    cfg = write(tmp_path, FAR.format(obs="directions = 1 0", extra="[quadrature]\nscheme = midpoint\nn = 6"))
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == EXIT_VERIFY
    out = capsys.readouterr().out
    assert "CHECK factorization FAIL" in out and "verification FAILED" in out


def test_console_entry_point(far_cfg):
    res = subprocess.run([sys.executable, "-m", "invsource", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("invsource ")
