import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from g2calib.chern import constant_bundle
from g2calib.cli import RunReport, main, paper_examples
from g2calib.surfaces import torus_grid

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() and code in (0, 1) and "--pretty" not in argv else out), err


def fixture(name):
    return str(FIXTURES / name)


def test_verify_identities(capsys):
    code, rep, _ = run(capsys, "verify-identities", "--seed", "1", "--trials", "10000")
    assert code == 0 and rep["passed"]
    assert rep["inputs"] == {"seed": 1, "trials": 10000}
    assert all(c["pass"] for c in rep["checks"])


def test_verify_identities_single_trial(capsys):
    code, rep, _ = run(capsys, "verify-identities", "--seed", "2", "--trials", "1")
    assert code == 0 and rep["passed"]


def test_verify_identities_corrupted_table_fails(capsys):
    code, rep, _ = run(capsys, "verify-identities", "--trials", "100", "--corrupt-phi")
    assert code == 1 and not rep["passed"]
    failed = {c["name"] for c in rep["checks"] if not c["pass"]}
    assert "cross_table_matches_octonions" in failed


def test_verify_identities_deterministic(capsys):
    _, a, _ = run(capsys, "verify-identities", "--seed", "5", "--trials", "50")
    _, b, _ = run(capsys, "verify-identities", "--seed", "5", "--trials", "50")
    assert a["checks"] == b["checks"]


def test_trials_must_be_positive(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify-identities", "--trials", "0"])
    assert exc.value.code == 2


def test_index_fixture(capsys):
    code, rep, _ = run(capsys, "index", fixture("components_bryant_salamon_3.json"))
    assert code == 0
    assert rep["outputs"]["index"] == 4 and rep["outputs"]["maslov"] == 1


def test_index_two_components(capsys):
    code, rep, _ = run(capsys, "index", "--input", fixture("components_second_joyce.json"))
    assert rep["outputs"]["index"] == 2 and "maslov" not in rep["outputs"]


def test_chern_fixtures(capsys):
    for name, expected in (("tautological_sphere.json", -1), ("tangent_sphere.json", 2), ("nu_x_sphere.json", 0)):
        code, rep, _ = run(capsys, "chern", fixture(name))
        assert code == 0 and rep["outputs"]["c1"] == expected
        assert rep["outputs"]["genus"] == 0


def test_maslov_fixture(capsys):
    code, rep, _ = run(capsys, "maslov", fixture("tautological_sphere.json"))
    assert code == 0
    assert rep["outputs"]["maslov"] == 1 == rep["outputs"]["maslov_from_index"]


def test_maslov_on_torus_is_invariant_violation(capsys, tmp_path):
    path = tmp_path / "torus.json"
    path.write_text(json.dumps(constant_bundle(torus_grid(4)).to_json()))
    code, _, err = run(capsys, "maslov", str(path))
    assert code == 3 and "PreconditionError" in err


def test_classify_plane(capsys):
    code, rep, _ = run(capsys, "classify-plane", fixture("plane_e1234.json"))
    assert code == 0
    out = rep["outputs"]
    assert not out["coassociative"] and not out["psi_positive"] and not out["phi_free"]
    code, rep, _ = run(capsys, "classify-plane", fixture("plane_e145.json"))
    assert rep["outputs"]["associative"]


def test_boundary_split_cases(capsys):
    code, rep, _ = run(capsys, "boundary-split", fixture("boundary_standard.json"))
    assert code == 0 and rep["outputs"]["case"] == "coassociative"
    code, rep, _ = run(capsys, "boundary-split", fixture("boundary_psi_positive.json"))
    assert code == 0 and rep["outputs"]["case"] == "psi-positive"
    assert rep["outputs"]["ellipticity"]["pass"]


def test_ebc_check(capsys):
    code, rep, _ = run(capsys, "ebc-check", "--grid", "360")
    assert code == 0
    assert rep["outputs"]["pass"] and rep["outputs"]["grid"] == 360
    assert rep["outputs"]["min_singular_value"] > 0.1
    code, rep, _ = run(capsys, "ebc-check", "--grid", "720", "--z", "1-2i")
    assert code == 0 and rep["outputs"]["psi_positive"]["pass"]


def test_ebc_check_bad_arguments(capsys):
    assert main(["ebc-check", "--grid", "10"]) == 2
    assert main(["ebc-check", "--z", "nonsense"]) == 2
    capsys.readouterr()


def test_fixed_loci_and_census(capsys):
    code, rep, _ = run(capsys, "fixed-loci", fixture("involutions_flat.json"))
    loci = rep["outputs"]["loci"]
    assert [l["components"] for l in loci] == [16, 8]
    assert [l["types"] for l in loci] == [["associative"], ["coassociative"]]
    code, rep, _ = run(capsys, "census", fixture("census_alpha_tori.json"))
    assert code == 0 and rep["outputs"]["orbit_count"] == 4
    code, rep, _ = run(capsys, "census", fixture("census_warmup_tau.json"))
    assert code == 0
    rows = {r["delta"]: r["components"] for r in rep["outputs"]["rows"]}
    assert rows["Id"] == 8 and rows["beta*gamma"] == 128


def test_parse_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["chern", str(bad)]) == 2
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps([{"genus": 0}]))
    assert main(["index", str(missing)]) == 2
    _, err = capsys.readouterr()
    assert "c1" in err
    assert main(["chern", str(tmp_path / "nope.json")]) == 2
    assert main(["chern"]) == 2
    capsys.readouterr()


def test_invariant_errors_exit_3(capsys, tmp_path):
    data = json.loads((FIXTURES / "boundary_standard.json").read_text())
    data["w"] = [0, 0, 0, 1, 0, 0, 0]
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    assert main(["boundary-split", str(path)]) == 3
    capsys.readouterr()


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO('[{"genus": 2, "c1": -2}]'))
    code, rep, _ = run(capsys, "index", "-")
    assert rep["outputs"]["index"] == -3


def test_pretty_output(capsys):
    code = main(["index", fixture("components_bryant_salamon_3.json"), "--pretty"])
    out, _ = capsys.readouterr()
    assert code == 0 and out.startswith("== index ==")


def test_run_report_round_trip(capsys):
    main(["maslov", fixture("nu_x_sphere.json")])
    data = json.loads(capsys.readouterr()[0])
    rep = RunReport.from_json(data)
    assert rep.to_json() == data
    assert json.loads(json.dumps(rep.to_json())) == data


def test_examples_table():
    rep = paper_examples()
    rows = {r["example"]: r for r in rep.outputs["rows"]}
    for name in ("local coassociative g=0", "Bryant-Salamon n=5", "Calabi-Yau g=2", "flat torus index",
                 "Joyce warm-up index", "second Joyce index", "Maslov example"):
        assert rows[name]["computed"] == rows[name]["quoted"]
    failing = [n for n, p, _ in rep.checks if not p]
    # the only quoted value that does not reproduce is the isolated-point count
    assert failing == ["warm-up isolated points in quotient"]
    assert rows["warm-up isolated points in quotient"]["computed"] == 16


def test_console_script_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "g2calib.cli", "index", fixture("components_bryant_salamon_3.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outputs"]["index"] == 4
