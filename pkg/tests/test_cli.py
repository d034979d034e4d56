import io
import json
import subprocess
import sys

import pytest

from test_multitypes import delta_on_identity
from vsc.cli import corpus_run, load_corpus, main, parse_term, run_command
from vsc.multitypes import derivation_to_json
from vsc.syntax import parse


def run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), out)
    return code, out.getvalue()


def test_reduce_json():
    code, text = run("reduce", r"(\x.x x)(\z.z)", "--strategy", "o", "--fuel", "100", "--json")
    assert code == 0
    obj = json.loads(text)
    assert obj["status"] == "NormalForm"
    assert obj["counts"]["m"] == 2
    assert obj["counts"]["e_lambda"] + obj["counts"]["e_var"] == 2
    assert obj["counts"] == {"m": 2, "e_lambda": 2, "e_var": 0, "glue": 0, "beta_v": 0}


def test_global_flags_before_subcommand():
    code, text = run("--json", "--fuel", "1", "reduce", "OMEGA")
    assert code == 0 and json.loads(text)["status"] == "FuelExhausted"


def test_reduce_text_and_betav():
    code, text = run("reduce", "I y")
    assert code == 0 and "-m->" in text and "status: NormalForm" in text
    code, text = run("reduce", "DELTA I", "--strategy", "betav", "--json")
    assert code == 0 and json.loads(text)["counts"]["beta_v"] == 2
    code, _ = run("reduce", "x[x<-y]", "--strategy", "betav")
    assert code == 2


def test_classify():
    code, text = run("classify", r"x[x<-y (\x.x)] y")
    assert code == 0 and json.loads(text)["inert"] is True


def test_type():
    code, text = run("type", r"(\x.x x)(\z.z)", "--mode", "open")
    assert code == 0 and "2*2+0 == 4: OK" in text
    code, text = run("type", r"\x.I I", "--mode", "solving", "--json")
    obj = json.loads(text)
    assert code == 0 and obj["msize"] == 4 and obj["inert"]
    code, _ = run("type", "OMEGA")
    assert code == 1


def test_check_derivation(tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps(derivation_to_json(delta_on_identity())))
    code, text = run("check-derivation", str(p), "--json")
    assert code == 0 and json.loads(text)["msize"] == 5
    obj = derivation_to_json(delta_on_identity())
    obj["premises"][1]["judgment"]["type"] = []
    p.write_text(json.dumps(obj))
    code, text = run("check-derivation", str(p), "--json")
    assert code == 1 and json.loads(text)["ok"] is False
    p.write_text("{not json")
    assert run("check-derivation", str(p))[0] == 2
    assert run("check-derivation", str(tmp_path / "missing.json"))[0] == 2


def test_solve():
    code, text = run("solve", r"\x.OMEGA", "--fuel", "1000", "--json")
    obj = json.loads(text)
    assert (obj["scrutable"], obj["solvable"]) == ("Yes", "No")
    assert obj["traces"]["solving"]["status"] == "Cycle"


def test_sigma_and_equiv():
    assert run("sigma-check", r"(\x.x) y w", "--rule", "sigma1")[0] == 0
    assert run("sigma-check", r"w ((\x.q) (z y))", "--rule", "sigma3")[0] == 0
    assert run("sigma-check", "x y")[0] == 1
    assert run("equiv", "x[x<-y] w", "(x w)[x<-y]") == (0, "true\n")
    assert run("equiv", "x[x<-y] w", "x w")[0] == 1


def test_usage_errors():
    assert run()[0] == 2
    assert run("reduce", "(x")[0] == 2
    assert run("reduce", "x", "--strategy", "nope")[0] == 2
    assert run("reduce", "x", "--fuel", "-3")[0] == 2
    assert run("frobnicate")[0] == 2


def test_abbreviations():
    assert parse_term("DELTA I") == parse(r"(\x.x x) (\z.z)")


# ------------------------------------------------------------ corpus

def test_bundled_corpus_passes():
    report = corpus_run(None, 1000)
    assert report["ok"], [e for e in report["entries"] if not e["ok"]]
    assert len(report["entries"]) >= 15
    names = {e.name for e in load_corpus(None)}
    assert {"omega", "delta_on_identity", "abs_omega"} <= names


def test_corpus_provenance_tags():
    for e in load_corpus(None):
        for key in e.expected:
            if key == "witness":
                continue
            assert e.provenance.get(key) in ("hand", "computed"), (e.name, key)


def test_empty_corpus(tmp_path):
    p = tmp_path / "empty.jsonl"
    p.write_text("")
    code, text = run("corpus", str(p), "--json")
    assert code == 0
    assert json.loads(text) == {"entries": [], "ok": True}


def test_corpus_negative_control(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text(json.dumps({"name": "omega", "term": "OMEGA",
                             "expected": {"solvable": "Yes"}}) + "\n")
    code, text = run("corpus", str(p), "--fuel", "1000")
    assert code == 1
    assert "FAIL omega" in text and "expected Yes, got No" in text


def test_corpus_bad_file(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"term": "x"}\n')
    assert run("corpus", str(p))[0] == 2
    assert run("corpus", str(tmp_path / "nope.jsonl"))[0] == 2


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "vsc.cli", "classify", "x"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["value"] is True
    assert main(["equiv", "x", "x"]) == 0
