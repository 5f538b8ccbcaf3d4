import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from borelsd.cli import build_parser, main, resolve_config
from borelsd.family import CSV_FIELDS

REF_FAMILY = {"n": 5, "levels": [{"ni": 5, "a": [3, 2, 2, 1, 1]}, {"ni": 4, "a": [1, 1, 1, 1]}]}
INT_LIST = {"type": "array", "items": {"type": "integer"}}
GENS = {"type": "array", "items": INT_LIST}

DECOMPOSITION = {
    "type": "object",
    "required": ["n", "g", "mode", "sdepth", "intervals", "verified", "degree_cap"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "g": INT_LIST,
        "mode": {"enum": ["ideal", "quotient"]},
        "sdepth": {"type": "integer", "minimum": 0},
        "intervals": {"type": "array", "items": {
            "type": "object", "required": ["c", "d", "Z"],
            "properties": {"c": INT_LIST, "d": INT_LIST, "Z": INT_LIST}}},
        "verified": {"type": "boolean"},
        "degree_cap": {"type": "integer"},
    },
}
CHAIN = {
    "type": "object",
    "required": ["n", "gens", "levels", "regularity", "regularity_agree"],
    "properties": {
        "gens": GENS,
        "levels": {"type": "array", "items": {
            "type": "object",
            "required": ["i", "n_i", "gens_I", "gens_J", "gens_J_sat", "s_value", "depth_S_mod_I", "depth_I"]}},
        "regularity": {"type": "object", "additionalProperties": {"type": "integer"}},
    },
}
BOREL = {
    "type": "object",
    "required": ["n", "gens", "borel_type", "conditions"],
    "properties": {"conditions": {"type": "array", "items": {
        "type": "object", "required": ["j", "holds", "sat_by_variable", "sat_by_prefix"]}}},
}
REPORT = {
    "type": "object",
    "required": ["meta", "tally", "trials", "rows", "witnesses"],
    "properties": {
        "meta": {"type": "object", "required": ["seed", "budget", "box_cap", "version"]},
        "tally": {"type": "object", "required": ["bounds-hold", "lower-violated", "upper-violated", "skipped"]},
        "rows": {"type": "array", "items": {"type": "object", "required": CSV_FIELDS}},
    },
}
REPRODUCE = {
    "type": "object",
    "required": ["all_ok", "checks"],
    "properties": {"checks": {"type": "array", "minItems": 1, "items": {
        "type": "object", "required": ["name", "expected", "got", "ok"]}}},
}


@pytest.fixture
def files(tmp_path):
    fam = tmp_path / "family.json"
    fam.write_text(json.dumps(REF_FAMILY))
    human = tmp_path / "q.txt"
    human.write_text("x1^3, x2^2")
    prime = tmp_path / "prime.txt"
    prime.write_text("x1, x2, x3, x4")
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 5, "gens": [[1, 2]]')
    notborel = tmp_path / "nb.json"
    notborel.write_text('{"n": 2, "gens": [[0, 1]]}')
    return {"family": str(fam), "human": str(human), "prime": str(prime), "bad": str(bad),
            "notborel": str(notborel), "dir": tmp_path}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sdepth_reports(capsys, files):
    code, out, _ = run(capsys, "sdepth", "-i", files["family"], "--verify")
    doc = json.loads(out)
    jsonschema.validate(doc, DECOMPOSITION)
    assert code == 0 and doc["sdepth"] == 2 and doc["verified"] and doc["degree_cap"] == 10
    code, out, _ = run(capsys, "sdepth-quotient", "-i", files["family"], "--verify")
    doc = json.loads(out)
    jsonschema.validate(doc, DECOMPOSITION)
    assert doc["sdepth"] == 0 and doc["mode"] == "quotient"
    code, out, _ = run(capsys, "decomp", "-i", files["prime"], "--nvars", "5", "--verify")
    doc = json.loads(out)
    jsonschema.validate(doc, DECOMPOSITION)
    assert doc["sdepth"] == 3 and doc["spaces"]


def test_chain_and_reg(capsys, files):
    code, out, _ = run(capsys, "chain", "-i", files["family"])
    doc = json.loads(out)
    jsonschema.validate(doc, CHAIN)
    assert code == 0 and [lv["n_i"] for lv in doc["levels"]] == [5, 4]
    assert doc["regularity"] == {"chain": 5, "decomposition": 5, "family": 5}
    code, out, _ = run(capsys, "reg", "-i", files["human"])
    assert json.loads(out)["regularity"] == {"chain": 4, "decomposition": 4}
    code, out, _ = run(capsys, "reg", "-i", files["prime"])
    assert json.loads(out)["regularity"]["chain"] == 1


def test_borel_check(capsys, files):
    code, out, _ = run(capsys, "borel-check", "-i", files["family"])
    jsonschema.validate(json.loads(out), BOREL)
    assert code == 0
    code, out, _ = run(capsys, "borel-check", "-i", files["notborel"])
    doc = json.loads(out)
    assert code == 1 and not doc["borel_type"] and not doc["conditions"][1]["holds"]


def test_exit_codes(capsys, files):
    code, _, err = run(capsys, "sdepth", "-i", files["bad"])
    assert code == 2 and json.loads(err)["error"] == "input"
    code, _, err = run(capsys, "sdepth", "-i", files["family"], "--box-cap", "10")
    assert code == 3 and json.loads(err)["error"] == "infeasible"
    code, _, _ = run(capsys, "chain", "-i", files["notborel"])
    assert code == 2
    code, _, _ = run(capsys, "sdepth", "-i", str(files["dir"] / "missing.json"))
    assert code == 2
    code, _, _ = run(capsys, "sdepth", "-i", files["family"], "--box-cap", "0")
    assert code == 2


def test_reproduce(capsys):
    code, out, _ = run(capsys, "reproduce")
    doc = json.loads(out)
    jsonschema.validate(doc, REPRODUCE)
    assert code == 0 and doc["all_ok"]
    code, _, err = run(capsys, "reproduce", "--box-cap", "20")
    assert code == 3 and json.loads(err)["error"] == "infeasible"


def test_family_commands(capsys, files):
    code, out, _ = run(capsys, "family", "gen", "--n", "5", "--m", "1", "--seed", "9")
    fam = json.loads(out)
    assert code == 0 and fam["n"] == 5 and len(fam["levels"]) == 2
    code, out, _ = run(capsys, "family", "run", "-i", files["family"])
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT)
    assert code == 0 and doc["rows"][0]["sdepth"] == 2
    code, out, _ = run(capsys, "family", "run", "--count", "4", "--max-n", "4", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == CSV_FIELDS
    wdir = files["dir"] / "w"
    code, out, _ = run(capsys, "family", "question", "--trials", "3", "--max-n", "4",
                       "--witness-dir", str(wdir), "--format", "text")
    assert code == 0 and "bounds-hold" in out
    code, out, _ = run(capsys, "family", "question", "--trials", "0")
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT)
    assert doc["rows"] == []


def test_output_file_and_text(capsys, files):
    target = files["dir"] / "out.txt"
    code, out, _ = run(capsys, "sdepth", "-i", files["human"], "--format", "text", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("sdepth = 1")


def test_precedence(monkeypatch):
    parser = build_parser()
    monkeypatch.setenv("BORELSD_BOX_CAP", "77")
    monkeypatch.setenv("BORELSD_SEED", "5")
    monkeypatch.setenv("BORELSD_WORKERS", "3")
    cfg = resolve_config(parser.parse_args(["sdepth", "-i", "x", "--seed", "9"]))
    assert cfg.box_cap == 77 and cfg.seed == 9 and cfg.workers == 3
    cfg = resolve_config(parser.parse_args(["sdepth", "-i", "x", "--canonical"]))
    assert cfg.workers == 1
    cfg = resolve_config(parser.parse_args(["reproduce"]))
    assert cfg.workers == 1
    monkeypatch.delenv("BORELSD_BOX_CAP")
    cfg = resolve_config(parser.parse_args(["sdepth", "-i", "x"]))
    assert cfg.box_cap == 10**6


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "borelsd.cli", "sdepth", "-i", files["family"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["sdepth"] == 2
