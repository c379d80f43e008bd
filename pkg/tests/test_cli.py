import json
import math
import re

import pytest

from pkm_synth.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synth_all(capsys):
    code, out, _ = run(capsys, "synth", "--arch", "all")
    assert code == 0
    rows = {line.split()[0]: line.split()[1:] for line in out.splitlines()[1:]}
    assert rows["biglide1"][:2] == ["1.947", "0.547"]
    assert rows["biglide2"][:2] == ["0.459", "0.529"]
    assert rows["orthoglide"][:2] == ["1.961", "1.109"]


def test_synth_tighter_upper_bound(capsys):
    code, out, _ = run(capsys, "synth", "--arch", "orthoglide", "--lambda-max", "2", "--format", "json")
    assert code == 0
    rec = json.loads(out)["records"][0]
    assert rec["L0_over_L"] < 10 / math.sqrt(26)


def test_synth_degenerate_bounds_exit_2(capsys):
    code, _, err = run(capsys, "synth", "--arch", "biglide1", "--lambda-min", "0.9", "--lambda-max", "1.1")
    assert code == 2
    assert "NoFeasibleRange" in err


def test_partial_failure_exit_3(capsys):
    code, _, _ = run(capsys, "synth", "--arch", "biglide1,custom", "--alpha1", "0", "--alpha2", "0")
    assert code == 3


@pytest.mark.parametrize("argv", [
    ["synth", "--arch", "triglide"],
    ["synth", "--lambda-min", "3", "--lambda-max", "1"],
    ["compare", "--resolution", "8"],
    ["synth", "--config", "/nonexistent/pkm.cfg"],
])
def test_config_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith("config error:")


def test_config_file_overridden_by_flags(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("arch = biglide2\nformat = json\nlambda_max = 2.0\n")
    code, out, _ = run(capsys, "synth", "--config", str(cfg), "--lambda-max", "3")
    assert code == 0
    rec = json.loads(out)["records"]
    assert [r["name"] for r in rec] == ["biglide2"]
    assert rec[0]["L0_over_L"] == pytest.approx(2 / math.sqrt(19), abs=1e-8)


def test_config_file_error_has_line(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("arch = biglide2\nresolution = x\n")
    code, _, err = run(capsys, "synth", "--config", str(cfg))
    assert code == 1
    assert f"{cfg}:2" in err


def test_compare_target_area_scales_lengths(capsys):
    _, out1, _ = run(capsys, "compare", "--resolution", "96", "--format", "json")
    _, out4, _ = run(capsys, "compare", "--resolution", "96", "--format", "json", "--target-area", "4")
    for a, b in zip(json.loads(out1)["records"], json.loads(out4)["records"]):
        for key in ("L0", "L", "delta_rho"):
            assert b[key] == pytest.approx(2 * a[key], rel=1e-8)
        assert b["envelope_area"] == pytest.approx(4 * a["envelope_area"], rel=1e-8)


def test_compare_writes_files(capsys, tmp_path):
    code, out, _ = run(capsys, "compare", "--resolution", "64", "--arch", "orthoglide", "--out", str(tmp_path))
    assert code == 0
    assert "Target rectangular workspace" in out
    assert sorted(p.name for p in tmp_path.iterdir()) == ["report.csv", "report.json", "table1.txt", "table2.txt"]


def test_pose_lambda_at_rail_origins(capsys):
    code, out, _ = run(capsys, "pose", "--arch", "biglide1", "--rho1", "0", "--rho2", "0", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["lambda2"] == pytest.approx(3.0, abs=1e-3)


def test_pose_parallel_singular(capsys):
    code, out, _ = run(capsys, "pose", "--arch", "biglide1", "--L0", "2", "--L", "1", "--delta-rho", "1",
                       "--rho1", "0", "--rho2", "0")
    assert code == 0
    assert "parallel: true" in out.splitlines()
    theta = {k: float(v) for k, v in (l.split(": ") for l in out.splitlines()) if k in ("theta1", "theta2")}
    assert abs(theta["theta1"] - theta["theta2"]) == pytest.approx(math.pi)


def test_pose_out_of_reach(capsys):
    code, out, _ = run(capsys, "pose", "--arch", "biglide1", "--x", "0.5", "--y", "5")
    assert code == 2
    assert out.strip() == "error: OutOfReach(leg=1)"


def test_pose_by_position(capsys):
    code, out, _ = run(capsys, "pose", "--arch", "biglide1", "--L0", "2", "--L", "1.4142135623730951",
                       "--delta-rho", "1", "--x", "1", "--y", "1", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["rho"] == pytest.approx([0, 0], abs=1e-12)
    assert rep["lambda1"] == pytest.approx(1 / math.sqrt(2))


def test_pose_needs_coordinates(capsys):
    code, _, _ = run(capsys, "pose", "--arch", "biglide1")
    assert code == 1


def _rect_sides(svg):
    block = svg.split('id="inscribed-rectangle"', 1)[1].split("</g>", 1)[0]
    d = re.search(r'd="([^"]*)"', block).group(1)
    pts = [tuple(map(float, m)) for m in re.findall(r"[ML] ([-\d.]+) ([-\d.]+)", d)]
    sides = [math.dist(pts[i], pts[i + 1]) for i in range(3)]
    return sides[0], sides[1]


@pytest.fixture(scope="module")
def plots(tmp_path_factory):
    out = tmp_path_factory.mktemp("plots")
    assert main(["plot", "--resolution", "256", "--out", str(out)]) == 0
    return out


def test_plot_rectangles(plots):
    og = (plots / "orthoglide.svg").read_text()
    assert og.count('id="inscribed-rectangle"') == 1
    a, b = _rect_sides(og)
    # one raster cell is about 2/256 of the drawing extent in each direction
    assert a / b == pytest.approx(1.0, abs=2 * 2 / 256)
    a, b = _rect_sides((plots / "biglide2.svg").read_text())
    assert max(a, b) / min(a, b) > 1.5


def test_plot_layers_present(plots):
    svg = (plots / "biglide1.svg").read_text()
    assert 'id="t-connected-region"' in svg
    assert "parallel singularity" in svg and "serial singularity" in svg


def test_plot_is_deterministic(plots, tmp_path):
    assert main(["plot", "--resolution", "256", "--out", str(tmp_path)]) == 0
    for name in ("biglide1", "biglide2", "orthoglide"):
        assert (tmp_path / f"{name}.svg").read_bytes() == (plots / f"{name}.svg").read_bytes()


def test_plot_debug_raster(tmp_path, capsys):
    assert main(["plot", "--arch", "biglide2", "--resolution", "64", "--out", str(tmp_path), "-v"]) == 0
    assert (tmp_path / "biglide2.pgm").read_text().startswith("P2")
