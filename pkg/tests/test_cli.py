import json

import pytest

from cbi.cli import main
from cbi.constructions import relational_model, z_mod
from cbi.fixtures import load_proof
from cbi.formula import MTOP
from cbi.modal import check_axioms, embed_model, frame_to_json
from cbi.models import find_isomorphism, model_from_json, model_to_json
from cbi.proofs import check_proof
from cbi.rules import audit_belnap_conditions
from cbi.semantics import sat


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def run_json(capsys, *argv):
    status, out, _ = run(capsys, *argv, "--json")
    return status, json.loads(out)


# ---------------------------------------------------------------- parse

def test_parse_renders_unicode(capsys):
    status, out, _ = run(capsys, "parse", "~~P <-> P")
    assert status == 0 and out.strip() == "(∼∼P → P) ∧ (P → ∼∼P)"


def test_parse_latex(capsys):
    status, out, _ = run(capsys, "parse", "P -* Q", "--render", "latex")
    assert status == 0 and out.strip() == r"P \mathrel{\hbox{---}\llap{$\ast$}} Q"


def test_parse_error_reports_offset(capsys):
    status, doc = run_json(capsys, "parse", "P & & Q")
    assert status == 2 and doc["offset"] == 4
    status, _, err = run(capsys, "parse", "P & & Q")
    assert status == 2 and "byte 4" in err


def test_usage_error_status(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


# ---------------------------------------------------------------- model

def test_model_build_matches_library(capsys):
    status, out, _ = run(capsys, "model", "build", "zmod", "4", "2")
    assert status == 0
    assert json.loads(out) == model_to_json(z_mod(4, 2))


def test_model_build_to_file_and_validate(capsys, tmp_path):
    path = tmp_path / "z.json"
    assert run(capsys, "model", "build", "zmod", "3", "1", "-o", str(path))[0] == 0
    status, doc = run_json(capsys, "model", "validate", str(path))
    assert status == 0 and doc["ok"] and doc["kind"] == "CBI"


def test_model_validate_bundled(capsys):
    status, out, _ = run(capsys, "model", "validate", "prop29.json")
    assert status == 0 and out.startswith("ok")


def test_model_validate_failure(capsys, tmp_path):
    doc = model_to_json(z_mod(3, 1))
    doc["inv"]["0"] = "0"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    status, report = run_json(capsys, "model", "validate", str(path))
    assert status == 1 and not report["ok"]


def test_union_side_condition(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(model_to_json(z_mod(3, 1))))
    b.write_text(json.dumps(model_to_json(z_mod(2, 1))))
    status, out, _ = run(capsys, "model", "build", "union", str(a), str(b))
    assert status == 1 and "side condition" in out


def test_model_list(capsys):
    status, doc = run_json(capsys, "model", "list")
    assert status == 0
    assert {"abelian", "zmod", "bitvec", "powerset", "action", "heap", "denyguar", "union", "product",
            "bbiext"} <= set(doc["builders"])


def test_missing_file_is_usage_error(capsys):
    assert run(capsys, "model", "validate", "/nonexistent/model.json")[0] == 2


# ---------------------------------------------------------------- eval / countermodel

def test_eval_prop29_false_at_a(capsys):
    status, out, _ = run(capsys, "eval", "prop29.json", "K -> L", "--truth")
    assert status == 1
    assert out.splitlines()[:2] == ["false", "witness point: a"]


def test_eval_top_true(capsys, tmp_path):
    path = tmp_path / "zmod42.json"
    path.write_text(json.dumps(model_to_json(z_mod(4, 2))))
    status, doc = run_json(capsys, "eval", str(path), "top", "--truth")
    assert status == 0 and doc["truth"] is True


def test_eval_at_point_with_env(capsys, tmp_path):
    env = tmp_path / "env.json"
    env.write_text(json.dumps({"P": ["a"]}))
    status, doc = run_json(capsys, "eval", "prop28.json", "I & J -> P", "--at", "b", "--env", str(env))
    assert status == 1 and doc["value"] is False


def test_eval_unknown_point(capsys):
    assert run(capsys, "eval", "prop29.json", "top", "--at", "zz")[0] == 2


def test_countermodel_emp(capsys):
    status, doc = run_json(capsys, "countermodel", "emp")
    assert status == 1 and doc["found"]
    m = model_from_json(doc["model"])
    assert m.size == 2 and not sat(m, {}, doc["point"], MTOP)


def test_countermodel_k_implies_l(capsys):
    status, doc = run_json(capsys, "countermodel", "K -> L")
    assert status == 1 and doc["found"]
    assert find_isomorphism(model_from_json(doc["model"]), relational_model()) is not None


def test_countermodel_exhausted(capsys):
    status, doc = run_json(capsys, "countermodel", "~~P <-> P")
    assert status == 1 and doc["exhausted"] and not doc["found"]


# ---------------------------------------------------------------- proof

def test_proof_check_fig4(capsys):
    status, out, _ = run(capsys, "proof", "check", "fig4.json")
    assert status == 0 and out.startswith("ok, cut-free")
    status, doc = run_json(capsys, "proof", "check", "fig4.json")
    assert doc == check_proof(load_proof("fig4")).to_json()


def test_proof_check_rejects(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"conclusion": "P |- Q", "rule": "Id"}))
    status, doc = run_json(capsys, "proof", "check", str(path))
    assert status == 1 and not doc["ok"]


def test_proof_prove_unit(capsys):
    status, doc = run_json(capsys, "proof", "prove", "ME |- emp")
    assert status == 0 and doc["proved"]
    assert doc["proof"]["rule"] == "MTopR" and not doc["proof"].get("premises")


def test_proof_prove_exhausted(capsys):
    status, doc = run_json(capsys, "proof", "prove", "AE |- AE", "--depth", "10")
    assert status == 1 and doc["exhausted"]


def test_proof_identity(capsys):
    status, doc = run_json(capsys, "proof", "identity", "P * Q")
    assert status == 0 and doc["check"]["ok"]


def test_proof_audit(capsys):
    status, doc = run_json(capsys, "proof", "audit")
    assert status == 0 and doc == audit_belnap_conditions().to_json()
    status, out, _ = run(capsys, "proof", "audit", "--with-controls")
    assert status == 1 and "DupX violates C3" in out and "FlipX violates C4" in out


# ---------------------------------------------------------------- modal

def test_modal_embed(capsys):
    status, out, _ = run(capsys, "modal", "embed", "coemp")
    assert status == 0 and out.strip() == "!INF"


def test_modal_revembed(capsys):
    status, out, _ = run(capsys, "modal", "revembed", "!-.(!-.P o !-.Q)")
    assert status == 0 and out.strip() == "!!~(!!~P * !!~Q)"


def test_modal_embed_model_and_check_axioms(capsys, tmp_path):
    path = tmp_path / "frame.json"
    assert run(capsys, "modal", "embed-model", "prop29.json", "-o", str(path))[0] == 0
    assert json.loads(path.read_text()) == frame_to_json(embed_model(relational_model()))
    status, doc = run_json(capsys, "modal", "check-axioms", str(path))
    assert status == 0 and doc == check_axioms(embed_model(relational_model())).to_json()
    status, out, _ = run(capsys, "modal", "check-axioms", str(path))
    assert out.strip().endswith("11/11 axioms hold, unitary")


def test_modal_check_axioms_failure(capsys, tmp_path):
    doc = frame_to_json(embed_model(z_mod(3, 0)))
    doc["comp"] = [t for t in doc["comp"] if t != ["1", "2", "0"]]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    status, report = run_json(capsys, "modal", "check-axioms", str(path))
    assert status == 1 and report["passed"] < 11


def test_modal_sahlqvist(capsys):
    assert run(capsys, "modal", "sahlqvist", "E o P -> P")[0] == 0
    assert run(capsys, "modal", "sahlqvist", "!P -> P")[0] == 1
    assert run(capsys, "modal", "sahlqvist", "P * Q")[0] == 2
