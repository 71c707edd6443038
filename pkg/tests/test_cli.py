import json
import subprocess
import sys

import pytest

from kummer_assoc import cli


def run(tmp_path, *args):
    code = cli.run(list(args) + ["--out", str(tmp_path)])
    return code


def report(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


@pytest.mark.parametrize("tag,total", [("c2-a1", 4), ("c2-a2", 8), ("c2c2-a1", 32), ("t7-involutions", 12)])
def test_count_associatives(tmp_path, tag, total):
    assert run(tmp_path, "count-associatives", "--fixture", tag) == 0
    r = report(tmp_path, "count-associatives-%s.json" % tag)
    assert r["passed"] and r["results"]["guaranteed_total"] == total
    assert r["fixtures"][0]["sha256"]


def test_orbifold_resolution_pair(tmp_path):
    d = json.loads((cli.fixture_dir() / "c2-a1.json").read_text())
    (tmp_path / "orb.json").write_text(json.dumps({"tag": "orb", "orbifold": d["orbifold"]}))
    (tmp_path / "res.json").write_text(json.dumps({"tag": "res", "resolution": d["resolution"], "expect": d["expect"]}))
    assert cli.run(["count-associatives", "--orbifold", str(tmp_path / "orb.json"),
                    "--resolution", str(tmp_path / "res.json"), "--out", str(tmp_path / "o")]) == 0


def test_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "verify-gh", "--seed", "4") == 0
    assert run(b, "verify-gh", "--seed", "4") == 0
    assert (a / "verify-gh.json").read_bytes() == (b / "verify-gh.json").read_bytes()
    assert (a / "verify-gh.timings.json").exists()


def test_rationals_serialize_as_pairs(tmp_path):
    assert run(tmp_path, "enumerate-bieberbach") == 0
    r = report(tmp_path, "enumerate-bieberbach.json")
    pt = r["results"]["groups"][1]["axes"][0]["base"]["singular_points"][0]["point"][0]
    assert set(pt) == {"num", "den"}


def test_digest_excludes_itself(tmp_path):
    import hashlib
    run(tmp_path, "enumerate-bieberbach")
    r = report(tmp_path, "enumerate-bieberbach.json")
    digest = r.pop("digest")
    assert hashlib.sha256(cli.canonical(r).encode()).hexdigest() == digest


def test_failing_expectation_sets_exit_code(tmp_path):
    # the shipped symmetry claim for the T^7 example does not hold (see the ledger)
    assert run(tmp_path, "singular-set", "--fixture", "t7-involutions") == 1
    r = report(tmp_path, "singular-set-t7-involutions.json")
    failed = [i["name"] for i in r["expectations"] if not i["pass"]]
    assert failed == ["components paired by the symmetry"]


def test_tolerance_override(tmp_path):
    assert run(tmp_path, "verify-gh", "--tolerance", "decay_slope_max=-3.5") == 1
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["verify-gh", "--bogus"])
    assert run(tmp_path, "verify-gh", "--tolerance", "nonsense=1") == 2


def test_parse_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "tag": "x",\n  "orbifold": [1, 2,, 3]\n}\n')
    assert cli.run(["count-associatives", "--fixture", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "column" in err


def test_missing_field_reported(tmp_path, capsys):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"tag": "f", "orbifold": {"kind": "local", "components": []}}))
    assert cli.run(["count-associatives", "--fixture", str(f)]) == 2
    assert "resolution" in capsys.readouterr().err


def test_list_examples(tmp_path):
    cat = cli.catalog()
    assert set(cat) == {"c2-a1", "c2-a2", "c2c2-a1", "c2c2-a3-d4", "t7-involutions"}
    assert cli.catalog(tmp_path) == {}
    for name in ("a.json", "b.json"):
        (tmp_path / name).write_text(json.dumps({"tag": "same"}))
    with pytest.raises(ValueError):
        cli.catalog(tmp_path)
    assert cli.run(["list-examples", "--fixture-dir", str(tmp_path)]) == 2


def test_fueter_demo_csv(tmp_path):
    assert run(tmp_path, "fueter-demo", "--csv", "--trials", "40") == 0
    rows = (tmp_path / "fueter-demo-L-sweep.csv").read_text().splitlines()
    assert "L" in rows[0].split(",") and "c_l2" in rows[0].split(",")
    assert len(rows) == 8


def test_fixed_locus_by_arguments(tmp_path):
    assert run(tmp_path, "fixed-locus", "--gamma", "A2", "--rotations", "R2", "--samples", "500") == 0
    r = report(tmp_path, "fixed-locus.json")
    assert len(r["results"]["problems"][0]["components"]) == 2


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "kummer_assoc", "list-examples"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "t7-involutions" in json.loads(out.stdout)["results"]["examples"]
