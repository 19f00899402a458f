import json

import numpy as np
import pytest

from l2growth.cli import main
from conftest import COMPLEXES


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_betti_circle(capsys):
    code, out, _ = run(capsys, "betti", str(COMPLEXES / "circle.json"),
                       "--subgroup", "12", "--dim", "1")
    assert code == 0
    assert "b=1 index=12 short=12" in out
    assert "agreement=ok" in out


def test_betti_stripe(capsys):
    code, out, _ = run(capsys, "betti", str(COMPLEXES / "stripe_t2_q3.json"),
                       "--subgroup", "2 0; 0 3", "--dim", "3")
    assert code == 0
    assert out.splitlines()[0] == "b=3 index=6 short=2"


def test_betti_congruence(capsys, tmp_path):
    doc = {
        "group": {"kind": "integral_matrix", "dimension": 2,
                  "generators": [[[1, 2], [0, 1]], [[1, 0], [2, 1]]]},
        "cells": [1, 1],
        "boundaries": [{"dim": 1, "entries": [[[{"coeff": 2, "word": []},
                                                {"coeff": -1, "word": [1]}]]]}],
    }
    path = tmp_path / "mat.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "betti", str(path), "--subgroup", "mod 3",
                       "--dim", "1")
    assert code == 0
    assert out.strip() == "b=0 index=24 short=3"


def test_malformed_boundary_rejected(capsys, tmp_path):
    doc = json.loads((COMPLEXES / "circle.json").read_text())
    doc["cells"] = [1, 1, 1]
    doc["boundaries"].append(
        {"dim": 2, "entries": [[[{"coeff": 1, "element": [0]}]]]})
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _out, err = run(capsys, "betti", str(path), "--subgroup", "3",
                          "--dim", "1")
    assert code == 1
    assert "d_1 o d_2" in err and "(0, 0)" in err


def test_density_csv(capsys):
    code, out, _ = run(capsys, "density", str(COMPLEXES / "circle.json"),
                       "--dim", "0", "--grid", "0:4:0.5", "--samples", "8192",
                       "--seed", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "lambda,F"
    rows = {float(l.split(",")[0]): float(l.split(",")[1]) for l in lines[1:]}
    assert rows[2.0] == pytest.approx(0.5, abs=0.02)
    assert rows[4.0] == 1.0


def test_density_gap_zero_below_one(capsys):
    code, out, _ = run(capsys, "density", str(COMPLEXES / "gap.json"),
                       "--dim", "1", "--grid", "0:0.95:0.05",
                       "--samples", "2048")
    assert code == 0
    for line in out.strip().splitlines()[1:]:
        lam, val = (float(x) for x in line.split(","))
        assert val == 0.0


def test_density_deterministic_and_ns(capsys, tmp_path):
    argv = ["density", str(COMPLEXES / "circle.json"), "--dim", "0",
            "--samples", "131072", "--seed", "11", "--ns"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    alpha_line = out1.strip().splitlines()[-1]
    assert alpha_line.startswith("alpha_hat,")
    assert 0.8 <= float(alpha_line.split(",")[1]) <= 1.2
    out_path = tmp_path / "density.csv"
    code3, _, _ = run(capsys, *argv, "--out", str(out_path))
    assert code3 == 0 and out_path.read_text() == out1


def test_density_quotient_family(capsys):
    code, out, _ = run(capsys, "density", str(COMPLEXES / "circle.json"),
                       "--dim", "0", "--quotients", "10,100",
                       "--grid", "0:4:1")
    assert code == 0
    rows = dict(tuple(map(float, l.split(",")))
                for l in out.strip().splitlines()[1:])
    assert rows[2.0] == pytest.approx(0.5, abs=0.06)


def test_density_usage_errors(capsys):
    code, _, err = run(capsys, "density", str(COMPLEXES / "circle.json"),
                       "--dim", "0", "--samples", "0")
    assert code == 1 and "sample_count" in err
    code2, _, err2 = run(capsys, "density", str(COMPLEXES / "circle.json"),
                         "--dim", "0", "--grid", "oops")
    assert code2 == 1


def test_bounds_gap(capsys):
    code, out, _ = run(capsys, "bounds", str(COMPLEXES / "gap.json"),
                       "--subgroup", "30", "--dim", "1", "--regime", "gap",
                       "--lambda0", "1", "--samples", "4096")
    assert code == 0
    assert "SATISFIED" in out and "M=0.666667" in out
    bound = float(next(p.split("=")[1] for p in out.split() if p.startswith("bound=")))
    assert bound == pytest.approx(120 * np.exp(-20.0), rel=1e-4)


def test_bounds_sublog(capsys):
    code, out, _ = run(capsys, "bounds", str(COMPLEXES / "circle.json"),
                       "--subgroup", "100", "--dim", "1", "--regime", "sublog",
                       "--samples", "16384")
    assert code == 0 and "SATISFIED" in out


def test_bounds_ns_with_estimated_constant(capsys):
    code, out, _ = run(capsys, "bounds", str(COMPLEXES / "circle.json"),
                       "--subgroup", "50", "--dim", "1", "--regime", "ns",
                       "--beta", "0.5", "--samples", "16384")
    assert code == 0 and "SATISFIED" in out


def test_bounds_gap_unverified_exit_1(capsys):
    code, _, err = run(capsys, "bounds", str(COMPLEXES / "circle.json"),
                       "--subgroup", "12", "--dim", "0", "--regime", "gap",
                       "--lambda0", "1", "--samples", "4096")
    assert code == 1
    assert "mass below" in err


def test_bounds_family_csv(capsys):
    code, out, _ = run(capsys, "bounds", str(COMPLEXES / "gap.json"),
                       "--dim", "1", "--regime", "gap", "--lambda0", "1",
                       "--samples", "2048", "--family", "4|12|60")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,short,betti,bound"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "4" and first[1] == "4" and first[2] == "0"


def test_cross_check_mismatch_exits_2(capsys, monkeypatch):
    import l2growth.cli as cli_mod

    def broken(cx, quot, dim, caps, cross_check=False, cover=None):
        return 999, None

    monkeypatch.setattr(cli_mod, "betti_by_characters", broken)
    code, out, _ = run(capsys, "betti", str(COMPLEXES / "circle.json"),
                       "--subgroup", "5", "--dim", "0")
    assert code == 2
    assert "MISMATCH" in out


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["verify", "--suite", "nope"])
    assert err.value.code == 1


def test_verify_stripes_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "stripes")
    assert code == 0
    assert out.startswith("stripes: ")
    total = out.split()[1]
    passed, ran = (int(x) for x in total.split("/"))
    assert passed == ran >= 300


def test_missing_document(capsys):
    code, _, err = run(capsys, "betti", "/nonexistent.json",
                       "--subgroup", "2", "--dim", "0")
    assert code == 1
