import io
import json

import pytest

from sullivan.cli import main
from sullivan.corpus import fixtures_dir, read_manifest, write_corpus


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def fx(name):
    return str(fixtures_dir() / f"{name}.json")


def test_tncz_of_the_hopf_fibration():
    code, text = run("fibration", "tncz", fx("cp3-over-s4"))
    assert code == 0 and "TNCZ: yes" in text


def test_halperin_check_on_cp3():
    code, text = run("halperin", "check", fx("cp3"))
    assert code == 0 and "Der^{<0}=0: yes" in text


def test_trivialize_over_even_sphere_is_an_error_with_the_obstruction():
    code, text = run("fibration", "trivialize", fx("s2xs6-twisted-over-s4-cohomology"))
    assert code == 2 and "even-base-obstruction" in text


def test_trivialize_over_odd_wedge_passes():
    code, _ = run("fibration", "trivialize", fx("s2xs6-twisted-over-s3-wedge-s5"))
    assert code == 0


@pytest.mark.parametrize("name", ["cp3-over-s4-reversed", "d-squared-over-s3"])
def test_invalid_extensions_fail(name):
    assert run("fibration", "validate", fx(name))[0] == 1


def test_non_tncz_fails():
    assert run("fibration", "tncz", fx("circle-bundle-over-s2"))[0] == 1


def test_non_regular_presentation_fails():
    assert run("elliptic", "check", fx("square-and-mixed"))[0] == 1


def test_low_cap_is_inconclusive_unless_strict():
    code, text = run("elliptic", "check", fx("cp4"), "--cap", "3")
    assert code == 0 and "inconclusive" in text
    assert run("elliptic", "check", fx("cp4"), "--cap", "3", "--strict")[0] == 1


def test_elliptic_check_with_oracle():
    code, text = run("elliptic", "check", fx("flag-u3"), "--oracle")
    assert code == 0 and "positively elliptic: yes" in text


def test_halperin_on_test_mode_input_finds_the_derivation():
    code, text = run("halperin", "check", fx("truncated-two-generator"), "--oracle", "--format", "json")
    data = json.loads(text)
    assert code == 1 and data["status"] == "fail" and data["exit"] == 1


def test_json_output_and_out_file(tmp_path):
    code, text = run("invariants", fx("cp2-over-s3-wedge-s5"), "--format", "json", "--out", str(tmp_path / "r"))
    data = json.loads(text)
    assert code == 0 and data["command"] == "invariants"
    saved = json.loads((tmp_path / "r" / "report.json").read_text())
    assert saved == data


def test_parse_error_exits_two_with_location(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "kind": "cdga",\n "generators": [{"name": "x", "degree": 2, "parity": "odd"}]}')
    code, text = run("oracle", str(bad), "--format", "json")
    data = json.loads(text)
    assert code == 2 and data["line"] == 2 and "parity mismatch" in data["error"]


def test_missing_file_exits_two(tmp_path):
    assert run("fibration", "validate", str(tmp_path / "nope.json"))[0] == 2


def test_oracle_command_agrees():
    code, text = run("oracle", fx("cp3-over-s4"))
    assert code == 0 and "agree" in text


def test_report_on_a_fixture_subset(tmp_path):
    src = tmp_path / "set"
    write_corpus(src)
    keep = {"cp2.json", "square-and-mixed.json", "s3-wedge-s5.json", "cp2-times-s3.json"}
    manifest = json.loads((src / "manifest.json").read_text())
    manifest["fixtures"] = [e for e in manifest["fixtures"] if e["file"] in keep]
    (src / "manifest.json").write_text(json.dumps(manifest))
    out = tmp_path / "out"
    code, text = run("report", str(src), "--out", str(out))
    assert code == 0 and "4/4 fixtures match" in text
    for name in ("report.json", "report.txt", "inequalities.tsv", "figures/invariants.png",
                 "figures/betti-cp2.png"):
        assert (out / name).stat().st_size > 0
    rows = (out / "inequalities.tsv").read_text().splitlines()
    assert rows[0].split("\t") == ["fixture", "rule", "status", "detail", "anchor"]
    assert any(r.startswith("cp2-times-s3\todd-wedge-cone-length\tpass") for r in rows)


def test_report_flags_a_wrong_expectation(tmp_path):
    src = tmp_path / "set"
    write_corpus(src)
    manifest = {"schema_version": 1, "fixtures": [{"file": "cp2.json", "kind": "presentation",
                                                   "expect": {"cup0": 5}}]}
    (src / "manifest.json").write_text(json.dumps(manifest))
    code, text = run("report", str(src), "--out", str(tmp_path / "out"))
    assert code == 1 and "cup0: expected 5, got 2" in text


def test_report_without_manifest_is_an_error(tmp_path):
    assert run("report", str(tmp_path))[0] == 2


def test_manifest_lists_every_fixture():
    assert len(read_manifest()) == len(list(fixtures_dir().glob("*.json"))) - 1
