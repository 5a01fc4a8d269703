import json

import pytest

from arboreal.checks import run_check
from arboreal.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_check_unknown():
    with pytest.raises(KeyError):
        run_check("no-such-check", {})


def test_check_lifting_report():
    report = run_check("lifting", {"group": "grigorchuk"})
    assert report.ok and report.exit_code() == 0
    assert report.evidence["sigma.lifting"] == "pass"
    decoded = json.loads(report.to_json())
    assert decoded["status"] == "pass"


def test_check_lifting_gs3_inconclusive():
    report = run_check("lifting", {"group": "gs3"})
    assert report.status == "inconclusive"
    assert report.exit_code() == 2


def test_cli_run_lifting(capsys):
    code, out, _ = run_cli(capsys, "run", "lifting", "--group", "grigorchuk")
    assert code == 0
    assert "PASS" in out


def test_cli_run_perm_order(capsys):
    code, out, _ = run_cli(capsys, "run", "perm-order", "--group", "g01inf",
                           "--gens", "a,c", "--level", "3", "--expect", "8",
                           "--format", "json")
    assert code == 0
    assert json.loads(out)["evidence"]["order"] == 8


def test_cli_run_hnn_relators_short(capsys):
    code, out, _ = run_cli(capsys, "run", "hnn-relators", "--group", "grigorchuk",
                           "--presentation", "short")
    assert code == 0
    assert "short: pass" in out


def test_cli_run_separation(capsys):
    code, out, _ = run_cli(capsys, "run", "separation", "--group", "g01inf",
                           "--level", "4")
    assert code == 0


def test_cli_run_failing_check_exit_code(capsys):
    code, out, _ = run_cli(capsys, "run", "perm-order", "--group", "g01inf",
                           "--gens", "a,c", "--level", "3", "--expect", "9")
    assert code == 1


def test_cli_run_ggs(capsys):
    code, out, _ = run_cli(capsys, "run", "ggs", "--p", "5", "--e", "1,-1,0,0")
    assert code == 0
    code, _, _ = run_cli(capsys, "run", "ggs", "--p", "3", "--e", "1,-1")
    assert code == 1


def test_cli_unknown_group_usage_error(capsys):
    code, _, err = run_cli(capsys, "run", "lifting", "--group", "bogus")
    assert code == 3
    assert "unknown group" in err


def test_cli_portrait_deterministic(capsys):
    args = ("portrait", "--group", "grigorchuk", "--element", "d",
            "--depth", "3", "--labels")
    code, out1, _ = run_cli(capsys, *args)
    assert code == 0
    code, out2, _ = run_cli(capsys, *args)
    assert out1 == out2
    assert '"root" [label="d [0,1]"]' in out1


def test_cli_portrait_json_matches_figure(capsys):
    code, out, _ = run_cli(capsys, "portrait", "--group", "grigorchuk",
                           "--element", "d", "--depth", "3",
                           "--labels", "--format", "json")
    nodes = {n["vertex"]: n for n in json.loads(out)}
    assert nodes["1"]["section"] == "b"
    assert nodes["11"]["section"] == "c"
    assert nodes["111"]["section"] == "d"
    switches = [v for v, n in nodes.items() if n["perm"] != [0, 1]]
    assert sorted(switches) == ["10", "110"]


def test_cli_portrait_identity(capsys):
    code, out, _ = run_cli(capsys, "portrait", "--group", "grigorchuk",
                           "--element", "1", "--depth", "2", "--format", "json")
    assert code == 0
    assert all(n["perm"] == [0, 1] for n in json.loads(out))


def test_cli_portrait_theta_periodic(capsys):
    code, out, _ = run_cli(capsys, "portrait", "--group", "grigorchuk",
                           "--element", "b", "--theta", "--up", "3", "--down", "3",
                           "--labels", "--format", "json")
    assert code == 0
    nodes = json.loads(out)
    spine = {n["level"]: n["section"] for n in nodes
             if set(n["vertex"].partition(":")[2]) <= {"1"}}
    assert spine == {-3: "b", -2: "c", -1: "d", 0: "b", 1: "c", 2: "d", 3: "b"}


def test_cli_portrait_parse_error(capsys):
    code, _, err = run_cli(capsys, "portrait", "--group", "grigorchuk",
                           "--element", "zz*qq")
    assert code == 3


def test_cli_perm_group_orbit(capsys):
    code, out, _ = run_cli(capsys, "perm-group-on-level", "--group", "grigorchuk",
                           "--level", "4", "--orbit", "0000", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["orbit_size"] == 16


def test_cli_stabilizer(capsys):
    code, out, _ = run_cli(capsys, "stabilizer-of-first-level", "--group", "g01inf")
    assert code == 0
    assert out.startswith("< b, c, d,")


def test_cli_intersection_transcript(capsys):
    code, out, _ = run_cli(capsys, "intersection", "--group", "g01inf",
                           "--level", "4",
                           "--gens-a", "b,c,d,a*b*a,a*c*a,a*d*a",
                           "--gens-b", "(1,a),(1,c)")
    assert code == 0
    assert "Group(())" in out


def test_cli_intersection_nontrivial_exit(capsys):
    code, out, _ = run_cli(capsys, "intersection", "--group", "grigorchuk",
                           "--level", "3", "--gens-a", "a,b", "--gens-b", "a,b")
    assert code == 1


def test_cli_catalog(capsys):
    code, out, _ = run_cli(capsys, "catalog")
    assert code == 0
    assert "grigorchuk" in out
    code, out, _ = run_cli(capsys, "catalog", "--id", "lamplighter")
    assert json.loads(out)["substitutions"]["sigma0"]["letter"] == 0


def test_cli_acceptance_single(capsys):
    code, out, _ = run_cli(capsys, "acceptance", "--criterion", "2")
    assert code == 0
    assert "PASS" in out


def test_cli_acceptance_json_is_valid(capsys):
    code, out, _ = run_cli(capsys, "acceptance", "--format", "json")
    assert code == 0
    reports = json.loads(out)
    assert len(reports) == 9
    assert all(r["status"] == "pass" for r in reports)


def test_cli_spec_file(tmp_path, capsys):
    spec = tmp_path / "basilica.json"
    spec.write_text(json.dumps({
        "wreath": "a=(b,1)(1,2),b=(a,1)",
        "substitutions": {"sigma": {"letter": 0, "images": {"a": "b", "b": "a^2"}}},
        "default_sigma": "sigma",
    }))
    code, out, _ = run_cli(capsys, "run", "lifting", "--spec", str(spec))
    assert code == 0

    wreath = tmp_path / "dihedral.txt"
    wreath.write_text("a=(1,1)(1,2),b=(a,b)")
    code, out, _ = run_cli(capsys, "perm-group-on-level", "--spec", str(wreath),
                           "--level", "3", "--format", "json")
    assert code == 0
    # the infinite dihedral group maps onto the dihedral group of order 2^(n+1)
    assert json.loads(out)["order"] == 16


def test_cli_usage_error_exit_3(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "not-a-check"])
    assert excinfo.value.code == 3


def test_checks_witnesses(capsys):
    report = run_check("witnesses", {"group": "grigorchuk"})
    assert report.ok
    assert report.evidence["witnesses"]["a"] == "a*c*a"


def test_checks_spine_and_dilation():
    assert run_check("spine", {"group": "basilica", "depth": 12}).ok
    report = run_check("dilation", {"group": "basilica", "element": "t",
                                    "samples": 200, "expect": 1})
    assert report.ok


def test_checks_two_transitivity_and_transitivity():
    assert run_check("two-transitivity", {"group": "basilica", "level": 4}).ok
    assert run_check("transitivity", {"group": "grigorchuk",
                                      "copies": 2, "length": 2}).ok


def test_checks_stabilizer_projection():
    assert run_check("stabilizer-projection", {"group": "grigorchuk", "depth": 4}).ok


def test_check_evidence_deterministic():
    # identical params give identical statuses and evidence (timing aside)
    first = run_check("dilation", {"group": "basilica", "element": "t*a*T*b",
                                   "samples": 200, "seed": 5})
    second = run_check("dilation", {"group": "basilica", "element": "t*a*T*b",
                                    "samples": 200, "seed": 5})
    assert (first.status, first.evidence) == (second.status, second.evidence)
    w1 = run_check("witnesses", {"group": "grigorchuk"})
    w2 = run_check("witnesses", {"group": "grigorchuk"})
    assert w1.evidence == w2.evidence
