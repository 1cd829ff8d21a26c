import json
import subprocess
import sys

import pytest

from yarnvision import cli, synthgen


def run_json(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 and out.out.startswith("{") else None), out.err


@pytest.fixture
def images(tmp_path):
    paths = {}
    for name in ("diameter-s2", "slub-pattern", "twist", "hairy", "cross-section", "fibers",
                 "grade-nep", "splice-A", "splice-F"):
        img, truth, ppm = synthgen.render_preset(name)
        p = tmp_path / f"{name}.pgm"
        synthgen.write_render(img, truth, p, ppm)
        paths[name] = str(p)
    return paths


def test_report_envelope_and_pgm_calibration(capsys, images):
    code, rep, _ = run_json(capsys, "diameter", "--image", images["diameter-s2"], "--count", "40:Ne1")
    assert code == 0
    assert rep["schema_version"] == 1 and rep["tool"] == "yarnvision" and rep["subcommand"] == "diameter"
    assert rep["calibration"] == {"px_per_mm": 68.0, "source": "pgm-comment"}
    assert round(rep["result"]["mean_mm"], 3) == 0.150
    assert rep["result"]["within_theory_band"] is True


def test_cal_flag_overrides_comment(capsys, images):
    _, rep, _ = run_json(capsys, "diameter", "--image", images["diameter-s2"], "--cal", "34")
    assert rep["calibration"]["source"] == "flag"
    assert rep["result"]["mean_mm"] == pytest.approx(0.3)


@pytest.mark.parametrize("mode", ["perc", "infl"])
def test_diameter_histogram_modes(capsys, images, mode):
    _, rep, _ = run_json(capsys, "diameter", "--image", images["diameter-s2"], "--mode", mode)
    assert abs(rep["result"]["mean_px"] - 10.2) <= 1


def test_every_image_subcommand(capsys, images, tmp_path):
    cases = [
        ("twist", images["twist"], ["--method", "both", "--diameter-mm", "0.96"]),
        ("hairiness", images["hairy"], []),
        ("slub", images["slub-pattern"], []),
        ("packing", images["cross-section"], ["--yarn-level", "1"]),
        ("texture", images["fibers"], []),
        ("grade", images["grade-nep"], []),
        ("splice", images["splice-F"], []),
    ]
    for cmd, img, extra in cases:
        csv_path = tmp_path / f"{cmd}.csv"
        code, rep, err = run_json(capsys, cmd, "--image", img, "--csv", str(csv_path), *extra)
        assert code == 0, (cmd, err)
        assert rep["subcommand"] == cmd
        if cmd not in ("splice", "twist", "packing"):
            assert csv_path.read_text().count("\n") > 1
    _, rep, _ = run_json(capsys, "splice", "--image", images["splice-F"])
    assert rep["result"]["grade"] == "F"


def test_out_file_and_determinism(tmp_path, images):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.run(["twist", "--image", images["twist"], "--method", "lines", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_exit_codes(capsys, images, tmp_path):
    assert cli.run(["bogus"]) == 2
    assert cli.run(["diameter", "--image", str(tmp_path / "missing.pgm")]) == 2
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P2\n1 1\n255\n0")
    assert cli.run(["diameter", "--image", str(bad), "--cal", "1"]) == 2
    assert cli.run(["twist", "--image", images["twist"], "--diameter-mm", "-1"]) == 2
    # no calibration anywhere
    assert cli.run(["diameter", "--image", images["fibers"]]) == 2
    # valid image, nothing to measure
    flat = tmp_path / "flat.pgm"
    synthgen.write_render(synthgen.to_gray(synthgen.render_fiber_field(0)[0] * 0), {}, flat)
    assert cli.run(["twist", "--image", str(flat)]) == 3
    capsys.readouterr()


def test_config_flags(capsys, tmp_path, images):
    assert cli.run(["--dump-config"]) == 0
    dumped = json.loads(capsys.readouterr().out)
    assert dumped["grade"]["saliency_window"] == 103
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"twist": {"method": "lines"}}))
    _, rep, _ = run_json(capsys, "--config", str(cfg), "twist", "--image", images["twist"])
    assert rep["result"]["method"] == "lines"
    cfg.write_text(json.dumps({"twist": {"bogus": 1}}))
    assert cli.run(["--config", str(cfg), "twist", "--image", images["twist"]]) == 2


def test_calibrate_and_stats(capsys, tmp_path):
    _, rep, _ = run_json(capsys, "calibrate", "--pixels", "34", "--length-mm", "0.5", "--width-px", "10.2")
    assert rep["result"]["px_per_mm"] == 68.0 and round(rep["result"]["width_mm"], 3) == 0.15
    _, rep, _ = run_json(capsys, "stats", "--means", "38.01,41.91,23.86", "--ns", "5", "--mse", "22.106")
    first = rep["result"]["pairwise"][0]
    assert round(first["mean_diff"], 3) == -3.9 and round(first["se"], 3) == 2.974
    data = tmp_path / "d.csv"
    data.write_text("group,value\na,1\na,2\nb,3\nb,5\n")
    _, rep, _ = run_json(capsys, "stats", "--csv", str(data))
    assert rep["result"]["anova"]["between"]["df"] == 1
    data.write_text("a,1\na,1\nb,2\nb,2\n")
    _, rep, _ = run_json(capsys, "stats", "--csv", str(data))
    assert rep["result"]["anova"]["F"] == "infinite"


def test_splice_confusion_report(capsys, tmp_path):
    conf = tmp_path / "conf.csv"
    conf.write_text("predicted,truth\nA,A\nB1,B1\nA,B1\n")
    out_csv = tmp_path / "rep.csv"
    _, rep, _ = run_json(capsys, "splice", "--confusion", str(conf), "--csv", str(out_csv))
    assert rep["result"]["total"]["incorrect"] == 1
    assert out_csv.read_text().splitlines()[-1].startswith("total,3,2,1,")


def test_batch_manifest(tmp_path, images):
    manifest = {"subcommand": "splice", "items": [
        {"image": images["splice-A"], "truth": "A"},
        {"image": images["splice-F"], "truth": "F"},
        {"image": str(tmp_path / "missing.pgm")},
        {"image": images["splice-A"], "overrides": {"splice": {"r_open": 1.2}}},
    ]}
    mf = tmp_path / "m.json"
    mf.write_text(json.dumps(manifest))
    outs = []
    for workers in ("1", "3"):
        out = tmp_path / f"b{workers}.csv"
        assert cli.run(["batch", "--manifest", str(mf), "--workers", workers, "--out", str(out)]) == 0
        outs.append(out.read_text())
    assert outs[0] == outs[1]
    lines = outs[0].splitlines()
    header = lines[0].split(",")
    g = header.index("grade")
    assert [l.split(",")[2] for l in lines[1:]] == ["ok", "ok", "error", "ok"]
    assert lines[1].split(",")[g] == "A" and lines[2].split(",")[g] == "F"


def test_synth_to_stdout_piped_into_analysis():
    exe = [sys.executable, "-m", "yarnvision.cli"]
    synth = subprocess.run(exe + ["synth", "--preset", "slub-pattern"], capture_output=True, check=True)
    res = subprocess.run(exe + ["slub", "--image", "-"], input=synth.stdout, capture_output=True, check=True)
    rep = json.loads(res.stdout)
    assert rep["result"]["period"] == 2
    assert rep["calibration"]["px_per_mm"] == 4.0
