import hashlib
import json

import numpy as np
import pytest

from fibred.cli import main, write_basin
from fibred.core import FibredMap, SampledLoop
from fibred.io import (
    PALETTE,
    ConfigError,
    RunConfig,
    dump_config,
    load_config,
    parse_config,
    read_curve_csv,
    read_ppm,
    write_curve_csv,
)

CONSTRUCT_FILES = [
    "loop.csv", "two_curve.csv", "correction.csv", "corrected_map.csv", "unfolded_map.csv",
    "gamma1.csv", "gamma2.csv", "normalization.csv", "normalized_gamma1.csv",
    "normalized_gamma2.csv", "construct.json", "config.txt",
]


def digest(paths):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in paths}


@pytest.fixture(scope="module")
def constructed(tmp_path_factory):
    out = tmp_path_factory.mktemp("construct")
    code = main(["construct", "--set", f"output_dir={out}"])
    return out, code


def test_parse_config_and_overrides(tmp_path):
    cfg = parse_config("# comment\nr = 0.1  # trailing\n\na=0.5\nbudget = 1e4\n")
    assert (cfg.r, cfg.a, cfg.budget) == (0.1, 0.5, 10_000)
    path = tmp_path / "run.cfg"
    path.write_text("r = 0.1\n", encoding="utf-8")
    cfg = load_config(path, ["r=0.15", "seed = 3"])
    assert cfg.r == 0.15 and cfg.seed == 3
    assert parse_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize("text", ["colour = red", "r 0.1", "budget = many"])
def test_bad_config_is_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


@pytest.mark.parametrize("override", ["r=0.3", "a=1.0", "alpha=0", "curve_n=4", "window=0"])
def test_invalid_values_are_rejected(override):
    with pytest.raises(ConfigError):
        load_config(None, [override])


def test_cli_config_errors_exit_2(tmp_path, capsys):
    assert main(["construct", "--set", "r=0.3", "--set", f"output_dir={tmp_path}"]) == 2
    assert "limb" in capsys.readouterr().err
    assert main(["kappa", "--set", "colour=red"]) == 2
    assert main(["report", "--set", f"output_dir={tmp_path / 'none'}"]) == 2


def test_construct_writes_artifacts(constructed):
    out, code = constructed
    assert code == 0
    for name in CONSTRUCT_FILES:
        assert (out / name).is_file(), name
    t, z = read_curve_csv(out / "two_curve.csv")
    assert t.size == 2 * RunConfig().curve_n == 2048
    assert t[0] == 0.0 and t[-1] < 2.0
    np.testing.assert_allclose(np.diff(t), 2.0 / 2048, atol=1e-15)
    # the second half holds the partner points
    np.testing.assert_allclose(z[1024:], -1.0 - z[:1024], atol=1e-12)
    meta = json.loads((out / "construct.json").read_text())
    assert meta["attracting"] and meta["tau"] == 1
    assert meta["kappa2"] < 0


def test_construct_is_byte_identical(constructed):
    out, _ = constructed
    first = digest(out / n for n in CONSTRUCT_FILES)
    assert main(["construct", "--set", f"output_dir={out}"]) == 0
    assert digest(out / n for n in CONSTRUCT_FILES) == first


def test_uniform_loop_is_not_attracting(tmp_path, capsys):
    assert main(["construct", "--set", "a=0", "--set", f"output_dir={tmp_path}"]) == 1
    meta = json.loads((tmp_path / "construct.json").read_text())
    assert abs(meta["kappa2"]) < 1e-9 and not meta["attracting"]
    assert "not negative" in capsys.readouterr().err


def test_kappa_command(tmp_path, capsys):
    assert main(["kappa"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["closed_form"] == pytest.approx(-0.16)
    assert abs(result["cycle_term"] + 0.16) < 1e-6
    assert abs(result["kappa_gamma1"] - result["kappa2"]) < 1e-6


def test_tampered_curve_fails_verification(constructed, tmp_path, capsys):
    out, _ = constructed
    t, z = read_curve_csv(out / "two_curve.csv")
    z = z.copy()
    z[100] += 1e-3
    bad = tmp_path / "tampered.csv"
    write_curve_csv(bad, t, z)
    code = main(["verify", "--curve", str(bad), "--set", f"output_dir={tmp_path}",
                 "--set", "basin_g=64", "--set", "budget=2000"])
    assert code == 1
    printed = capsys.readouterr().out
    assert "FAIL  stored_curve_invariance" in printed
    report = json.loads((tmp_path / "report.json").read_text())
    failed = [r["id"] for r in report["claims"] if not r["pass"]]
    assert failed == ["stored_curve_invariance"]
    for r in report["claims"]:
        assert r["provenance"] and r["anchor"]
    # the report command replays the stored verdicts
    assert main(["report", "--set", f"output_dir={tmp_path}"]) == 1
    assert "FAIL  stored_curve_invariance" in capsys.readouterr().out


def test_untampered_curve_passes(constructed, tmp_path):
    out, _ = constructed
    code = main(["verify", "--curve", str(out / "two_curve.csv"), "--set", f"output_dir={tmp_path}",
                 "--set", "basin_g=64", "--set", "budget=2000"])
    assert code == 0
    assert main(["report", "--set", f"output_dir={tmp_path}"]) == 0


def test_minimal_basin_grid(tmp_path):
    code = main(["basin", "--set", f"output_dir={tmp_path}", "--set", "basin_g=8",
                 "--set", "image_px=8", "--set", "budget=5000"])
    lines = (tmp_path / "basin.csv").read_text().splitlines()
    assert lines[0] == "theta,label,step,distance"
    assert len(lines) == 9
    assert code in (0, 1)
    summary = json.loads((tmp_path / "basin_summary.json").read_text())
    assert sum(summary["counts"].values()) == 8
    assert read_ppm(tmp_path / "basin_slice.ppm").shape == (8, 8, 3)


def test_uniform_escape_image(tmp_path):
    cfg = RunConfig(basin_g=8, image_px=16, budget=500, image_budget=200)
    fmap = FibredMap.standard(SampledLoop.constant(1.0), 0.3)
    scan = write_basin(tmp_path, fmap, [], cfg)
    assert scan.counts == {"esc": 8}
    img = read_ppm(tmp_path / "basin_slice.ppm")
    assert img.shape == (16, 16, 3)
    assert np.all(img == np.array(PALETTE["esc"], dtype=np.uint8))
    legend = (tmp_path / "basin_legend.txt").read_text()
    assert all(line.startswith("#") for line in legend.splitlines())
