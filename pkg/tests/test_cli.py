from __future__ import annotations

import json
import random

import pytest

from elemtype import construction as C
from elemtype import fpgroup as F
from elemtype import homomorph as H
from elemtype.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_hom(tmp_path, text, target, p, seed=0, name="hom.json"):
    c = C.parse(text, C.standard_registry(p))
    rho = H.random_hom(c, target, random.Random(seed))
    path = tmp_path / name
    path.write_text(json.dumps(H.hom_to_json(rho)))
    return str(path)


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "<(<A> * <B>)>")
    assert code == 0
    rep = json.loads(out)
    assert rep["extension_rank"] == 2
    assert [t["rank"] for t in rep["principal_tuples"]] == [2, 2]


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "analyze", "<(A * B>")
    assert code == 2 and "error" in err
    assert run(capsys, "analyze", "Q")[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2
    assert run(capsys, "lvalue", "--group", "um:2,3", "--cap", "0")[0] == 2


def test_lvalue(capsys):
    code, out, _ = run(capsys, "lvalue", "--group", "um:3,2")
    rep = json.loads(out)
    assert code == 0 and rep["l"] == 4 and rep["matches_analytic"]
    code, out, _ = run(capsys, "lvalue", "--group", "ubar:3,2")
    rep = json.loads(out)
    assert rep["l"] == 4 and rep["equals_lemma_bound"]
    code, out, _ = run(capsys, "lvalue", "--group", "ubar:9,2", "--cap", "1000")
    rep = json.loads(out)
    assert code == 0 and rep["bound_only"] and rep["lemma_bound"] == 28


def test_invalid_hom_exit_code(capsys, tmp_path):
    G = F.unitriangular(2, 3)
    doc = {"construction": "<B>", "target": "um:2,3",
           "images": {"B.x@E": G.element_to_json(G.index_of(F.elementary(3, 0, 1))),
                      "z@": G.element_to_json(G.index_of(F.elementary(3, 1, 2)))}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "factor", "--hom", str(path))
    assert code == 3
    assert json.loads(out)["violations"]


def test_factor_verify_roundtrip(capsys, tmp_path):
    hom = write_hom(tmp_path, "<<(<D2> * <B>)>>", F.unitriangular(2, 3), 3, seed=4)
    cert = tmp_path / "cert.json"
    code, out, _ = run(capsys, "factor", "--hom", hom, "--cert", str(cert))
    assert code == 0
    rep = json.loads(out)
    assert rep["final_extension_rank"] <= rep["l"]
    code, out, _ = run(capsys, "verify", "--cert", str(cert))
    assert code == 0 and json.loads(out)["ok"]


def test_verify_rejects_mutation(capsys, tmp_path):
    G = F.cyclic(3, 1)
    g = G.element_to_json(G.index_of(G.generators[0]))
    e = G.element_to_json(0)
    doc = {"construction": "<<<A>>>", "target": "cyclic:1,3",
           "images": {"A.x@EEE": g, "z@EE": g, "z@E": g, "z@": e}}
    hom = tmp_path / "hom.json"
    hom.write_text(json.dumps(doc))
    cert = tmp_path / "cert.json"
    assert run(capsys, "factor", "--hom", str(hom), "--cert", str(cert))[0] == 0
    obj = json.loads(cert.read_text())
    assert obj["stages"]
    obj["stages"][0]["k"] += 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "verify", "--cert", str(bad))
    assert code == 4 and json.loads(out)["problems"]
    bad.write_text("{not json")
    assert run(capsys, "verify", "--cert", str(bad))[0] == 4


def test_output_is_byte_stable(capsys, tmp_path):
    hom = write_hom(tmp_path, "<(<A> * <D2>)>", F.unitriangular(2, 3), 3, seed=2)
    outs = {run(capsys, "factor", "--hom", hom, "--threads", str(t))[1] for t in (1, 1, 3)}
    assert len(outs) == 1
    outs = {run(capsys, "lvalue", "--group", "ubar:3,2", "--threads", str(t))[1] for t in (1, 2, 4)}
    assert len(outs) == 1


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "<<<A>>>", "--n", "2")
    rep = json.loads(out)
    assert code == 0 and rep["f_value"] == 3 and rep["e"] == 3
    code, out, _ = run(capsys, "bounds", "--group", "um:2,3")
    assert json.loads(out)["f_value"] == 3
    code, out, _ = run(capsys, "bounds", "--group", "ubar:3,2", "--p", "2")
    rep = json.loads(out)
    assert rep["mode"] == "lemma_bound" and rep["f_value"] == 5
    assert run(capsys, "bounds")[0] == 2


def test_bounds_infinite_entry_exit_code(capsys, tmp_path):
    blocks = C.registry_to_json(C.standard_registry(3))
    blocks.append({"id": "X", "kind": "custom", "p": 3, "theta": [1],
                   "presentation": {"generators": ["x"], "relations": []}, "bounds": [1]})
    path = tmp_path / "blocks.json"
    path.write_text(json.dumps(blocks))
    code, _, err = run(capsys, "bounds", "<X>", "--blocks", str(path), "--n", "2")
    assert code == 5 and "infinite" in err
    code, _, _ = run(capsys, "bounds", "--group", "cyclic:1,3", "--blocks", str(path))
    assert code == 5


def test_massey(capsys):
    code, out, _ = run(capsys, "massey", "--m", "3", "--p", "2", "--exact-l")
    rep = json.loads(out)
    assert code == 0 and rep["lemma_bound"] == 5 and rep["exact_within_lemma"]


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "<D2>", "--omega", "1,1,1")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and rep["syml"] == 1 and rep["max_syml"] == 1
    assert run(capsys, "oracle", "<D2>", "--omega", "1")[0] == 2
    assert run(capsys, "oracle", "D2", "--p", "2")[0] == 5
    assert run(capsys, "oracle", "<<D2>>", "--state-cap", "5")[0] == 5


def test_table_format(capsys):
    code, out, _ = run(capsys, "analyze", "<A>", "--format", "table")
    assert code == 0 and "extension_rank" in out and not out.startswith("{")


@pytest.mark.parametrize("argv", [["--help"], ["analyze", "--help"]])
def test_help(capsys, argv):
    assert run(capsys, *argv)[0] == 0
