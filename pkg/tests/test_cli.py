import json
import subprocess
import sys

import numpy as np
import pytest

from datassim.calibrate import find_threshold
from datassim.cli import main
from datassim.core import GridField2D
from datassim.io import read_f2d, write_f2d
from datassim.testgen import base_field, precision_codec


@pytest.fixture
def grids(tmp_path):
    x = base_field(64, 80, 1)
    a = tmp_path / "a.f2d"
    b = tmp_path / "b.f2d"
    write_f2d(x, a)
    write_f2d(precision_codec(x, 6).reconstructed, b)
    return a, b


@pytest.mark.parametrize("variant", ["pixel", "sf-dssim", "dssim", "dssim-noquant"])
def test_compare_self(grids, capsys, variant):
    a, _ = grids
    assert main(["compare", "--a", str(a), "--b", str(a), "--variant", variant, "--threshold", "1.0"]) == 0
    out = capsys.readouterr().out
    assert "1.0000" in out and "PASS" in out


def test_compare_threshold_fail(grids, capsys):
    a, b = grids
    assert main(["compare", "--a", str(a), "--b", str(b), "--json", "-"]) == 0
    value = json.loads(capsys.readouterr().out)["mean_value"]
    assert value < 0.99919
    assert main(["compare", "--a", str(a), "--b", str(b), "--threshold", "0.99919"]) == 1


def test_compare_missing_flag(grids, capsys):
    a, _ = grids
    with pytest.raises(SystemExit) as exc:
        main(["compare", "--a", str(a)])
    assert exc.value.code == 2
    assert "--b" in capsys.readouterr().err


def test_compare_missing_file(grids, capsys, tmp_path):
    a, _ = grids
    assert main(["compare", "--a", str(a), "--b", str(tmp_path / "nope.f2d")]) == 2
    assert "--b" in capsys.readouterr().err


def test_compare_bad_kernel(grids, capsys):
    a, _ = grids
    assert main(["compare", "--a", str(a), "--b", str(a), "--kernel", "4"]) == 2


def test_compare_csv_and_map(tmp_path, capsys):
    rng = np.random.default_rng(0)
    x = rng.uniform(size=(15, 15))
    np.savetxt(tmp_path / "a.csv", x, delimiter=",")
    np.savetxt(tmp_path / "b.csv", x * 0.9, delimiter=",")
    rc = main(["compare", "--a", str(tmp_path / "a.csv"), "--b", str(tmp_path / "b.csv"),
               "--map-out", str(tmp_path / "m.f2d"), "--json", str(tmp_path / "r.json")])
    assert rc == 0
    m = read_f2d(tmp_path / "m.f2d").data
    assert (~np.isnan(m)).sum() == 25
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["windows"]["total"] == 25


def _manifest(tmp_path, n, missing=False):
    x = base_field(40, 40, 3)
    write_f2d(x, tmp_path / "x.f2d")
    entries = []
    for i in range(n):
        write_f2d(precision_codec(x, 4 + i).reconstructed, tmp_path / f"y{i}.f2d")
        entries.append({"id": f"e{i:02d}", "path_original": "x.f2d", "path_comparison": f"y{i}.f2d"})
    if missing:
        entries.append({"id": "zz", "path_original": "x.f2d", "path_comparison": "gone.f2d"})
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"entries": entries[::-1]}))
    return path


def test_batch_identical_pairs(tmp_path, capsys):
    x = base_field(40, 40, 3)
    write_f2d(x, tmp_path / "x.f2d")
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"entries": [
        {"id": f"p{i}", "path_original": "x.f2d", "path_comparison": "x.f2d"} for i in range(10)
    ]}))
    assert main(["batch", "--manifest", str(path), "--threshold", "0.99919"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["counts"]["pass"] == 10


def test_batch_jobs_deterministic(tmp_path, capsys):
    path = _manifest(tmp_path, 12)
    main(["batch", "--manifest", str(path), "--threshold", "0.999", "--jobs", "1", "--out", str(tmp_path / "o1")])
    one = capsys.readouterr().out
    main(["batch", "--manifest", str(path), "--threshold", "0.999", "--jobs", "8", "--out", str(tmp_path / "o8")])
    eight = capsys.readouterr().out
    assert one == eight
    assert (tmp_path / "o1" / "summary.json").read_bytes() == (tmp_path / "o8" / "summary.json").read_bytes()
    ids = [e["id"] for e in json.loads(one)["entries"]]
    assert ids == sorted(ids)
    assert (tmp_path / "o1" / "e03.json").exists()


def test_batch_missing_file_continues(tmp_path, capsys):
    path = _manifest(tmp_path, 3, missing=True)
    assert main(["batch", "--manifest", str(path)]) == 2
    summary = json.loads(capsys.readouterr().out)
    assert summary["counts"] == {"pass": 0, "fail": 0, "scored": 3, "error": 1}
    assert summary["entries"][-1]["status"] == "error"


def test_calibrate(tmp_path, capsys):
    rng = np.random.default_rng(1)
    ref = 1 - rng.exponential(5e-5, 300)
    dssim = 1 - 20 * (1 - ref) + rng.normal(0, 2e-4, 300)
    p = tmp_path / "pairs.csv"
    p.write_text("ref,dssim\n" + "".join(f"{r!r},{d!r}\n" for r, d in zip(ref.tolist(), dssim.tolist())))
    rc = main(["calibrate", "--pairs", str(p), "--sweep-out", str(tmp_path / "s.csv"), "--json", str(tmp_path / "c.json")])
    assert rc == 0
    res = find_threshold(np.column_stack([ref, dssim]))
    doc = json.loads((tmp_path / "c.json").read_text())
    assert doc["threshold"] == res.threshold
    assert doc["inconsistent"] == res.matrix.inconsistent
    rows = (tmp_path / "s.csv").read_text().strip().splitlines()
    assert len(rows) - 1 == len(res.sweep)
    assert f"threshold {doc['threshold_5sig']}" in capsys.readouterr().out


def test_calibrate_separable(tmp_path, capsys):
    p = tmp_path / "pairs.csv"
    p.write_text("1.0,0.9999\n0.99999,0.9995\n0.999,0.99\n0.9,0.5\n")
    assert main(["calibrate", "--pairs", str(p)]) == 0
    assert "inconsistent 0 of 4" in capsys.readouterr().out


def test_calibrate_malformed(tmp_path):
    p = tmp_path / "pairs.csv"
    p.write_text("1.0,0.9\n1.0,x\n")
    assert main(["calibrate", "--pairs", str(p)]) == 2


def test_gen_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["gen", "--rows", "40", "--cols", "48", "--seed", "7", "--case", "base",
                     "--out", str(tmp_path / f"{name}.f2d")]) == 0
    assert (tmp_path / "a.f2d").read_bytes() == (tmp_path / "b.f2d").read_bytes()


def test_gen_pert_and_codec(tmp_path, capsys):
    assert main(["gen", "--rows", "40", "--cols", "40", "--seed", "1", "--case", "pert",
                 "--pert-lo", "1e-7", "--pert-hi", "0.1", "--out", str(tmp_path / "p.f2d")]) == 0
    d = read_f2d(tmp_path / "p.f2d").data - base_field(40, 40, 1).data
    assert d.min() >= 1e-7 - 1e-12 and d.max() <= 0.1
    assert main(["gen", "--rows", "40", "--cols", "40", "--codec-p", "8", "--out", str(tmp_path / "c.f2d")]) == 0
    assert "nominal_cr 4.0" in capsys.readouterr().out


def test_gen_errors(tmp_path):
    assert main(["gen", "--rows", "8", "--cols", "40", "--out", str(tmp_path / "x.f2d")]) == 2
    assert main(["gen", "--rows", "40", "--cols", "40", "--case", "pert", "--pert-lo", "0",
                 "--out", str(tmp_path / "x.f2d")]) == 2
    with pytest.raises(SystemExit):
        main(["gen", "--rows", "40", "--cols", "40", "--case", "lossy", "--out", str(tmp_path / "x.f2d")])


def test_bench_json(tmp_path):
    out = tmp_path / "b.json"
    assert main(["bench", "--rows", "64", "--cols", "64", "--reps", "5", "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["times_s"]) == 5
    assert doc["min_time_s"] == min(doc["times_s"])
    assert doc["points_per_s"] == pytest.approx(64 * 64 / doc["min_time_s"])


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "datassim", "gen", "--rows", "32", "--cols", "32",
                          "--out", str(tmp_path / "g.f2d")], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert read_f2d(tmp_path / "g.f2d").shape == (32, 32)
