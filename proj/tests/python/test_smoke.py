import os
import pathlib

import pytest

import eb2jml

ROOT = pathlib.Path(os.environ.get("EB2JML_SOURCE_DIR", pathlib.Path(__file__).parents[2]))
MACHINES = ROOT / "machines"


def machine(name):
    return (MACHINES / name).read_text(encoding="utf-8")


def test_parse_renders_canonical_text():
    text = eb2jml.parse(machine("counter.ebm"))
    assert text.startswith("machine counter")
    assert eb2jml.parse(text) == text


def test_parse_error_is_a_value_error():
    with pytest.raises(eb2jml.ParseError, match="expected keyword machine"):
        eb2jml.parse("")
    assert issubclass(eb2jml.ParseError, ValueError)


def test_translate_and_normalize():
    java = eb2jml.translate(machine("social.ebm"))
    assert "public abstract boolean guard_edit_owned();" in java
    assert eb2jml.translate(machine("social.ebm")) == java
    norm = eb2jml.normalize_jml(java)
    assert eb2jml.normalize_jml(norm) == norm


def test_trace_pairs():
    pairs = eb2jml.trace(machine("counter.ebm"))
    assert ("inv1", "invariant[0]") in pairs


def test_check_counter():
    report = eb2jml.check(machine("counter.ebm"), int_range=(0, 1))
    assert report["overall"] == "PASS"
    assert [v["name"] for v in report["verdicts"]] == ["initialisation", "inc"]


def test_check_social_flagship():
    report = eb2jml.check(machine("social.ebm"), carriers={"PERSON": 2, "CONTENTS": 2})
    assert report["overall"] == "PASS"


def test_check_ceiling():
    report = eb2jml.check(machine("social.ebm"), carriers={"PERSON": 2, "CONTENTS": 2},
                          ceiling=10)
    assert report["overall"] == "RESOURCE_LIMIT"


@pytest.mark.parametrize("mutation,expected", [
    ("widen_ensures_true", "FAIL"),
    ("drop_old", "FAIL"),
    ("shrink_assignable", "PASS"),
])
def test_mutations(mutation, expected):
    report = eb2jml.check(machine("counter.ebm"), mutation=mutation, event="inc")
    assert report["overall"] == expected


def test_unknown_mutation():
    with pytest.raises(ValueError):
        eb2jml.check(machine("counter.ebm"), mutation="no_such_mutation")


def test_main_exit_codes(tmp_path):
    code, out, err = eb2jml.main(["check", str(MACHINES / "counter.ebm")])
    assert code == 0 and "PASS" in out and err == ""
    code, _, err = eb2jml.main(["parse", str(tmp_path / "missing.ebm")])
    assert code == 2 and "missing.ebm" in err
    target = tmp_path / "counter.java"
    code, out, _ = eb2jml.main(["translate", str(MACHINES / "counter.ebm"), "-o", str(target)])
    assert code == 0 and target.exists()
