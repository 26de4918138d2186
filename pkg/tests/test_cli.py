"""CLI surface: verbs, formats, exit codes, file schemas."""

import json

import numpy as np
import pytest

from grouprg import models as md
from grouprg import groups as gr
from grouprg.cli import main


@pytest.fixture
def prog_file(tmp_path):
    Q8 = gr.catalog_group("Q8")
    inst = md.random_instance("program", Q8, 6, 6, 1, 0, 3)
    path = tmp_path / "prog.json"
    path.write_text(md.instance_to_json(inst))
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_group_info(capsys):
    code, out = run(capsys, "group", "info", "Q8")
    rep = json.loads(out)
    assert code == 0 and rep["order"] == 8 and rep["p_group"]["p"] == 2
    assert rep["dedekind"] is True


def test_group_info_csv(capsys):
    code, out = run(capsys, "--format", "csv", "group", "info", "Z6")
    assert code == 0 and out.splitlines()[0].startswith("name,order")


def test_rep_check_and_mixing(capsys):
    code, out = run(capsys, "rep", "check", "Q8")
    assert code == 0 and json.loads(out)["passed"] is True
    code, out = run(capsys, "rep", "mixing", "S3")
    rep = json.loads(out)
    assert code == 0 and rep["mixing"] is False


def test_rand_sample_and_audit(capsys):
    code, out = run(capsys, "rand", "sample", "--sampler", "sb2(n=8,eps=0.25)",
                    "--seed", "ff")
    rep = json.loads(out)
    assert code == 0 and len(rep["output"]) == 8
    code, out = run(capsys, "rand", "audit", "--sampler", "sb2(n=6,eps=0.125)")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is True and rep["measured"] <= 0.125


def test_model_verbs(capsys, prog_file):
    code, out = run(capsys, "model", "stats", "--instance", str(prog_file))
    rep = json.loads(out)
    assert code == 0 and rep["ell"] == 6 and rep["w"] == 1 and rep["q"] == 0
    code, out = run(capsys, "model", "eval", "--instance", str(prog_file),
                    "--x", "2a")
    assert code == 0 and "value" in json.loads(out)
    code, out = run(capsys, "model", "restrict", "--instance", str(prog_file),
                    "--D", "15", "--T", "0f")
    rep = json.loads(out)
    assert code == 0 and rep["stats"]["ell"] == 6


def test_compile_verb(capsys, prog_file, tmp_path):
    out_file = tmp_path / "pm.json"
    code, _ = run(capsys, "compile", "--program", str(prog_file),
                  "--out", str(out_file))
    assert code == 0
    obj = json.loads(out_file.read_text())
    assert obj["group"] == "Q8" and obj["k"] == 3


def test_prg_build_and_eval(capsys, prog_file, tmp_path):
    spec_file = tmp_path / "spec.json"
    code, _ = run(capsys, "prg", "build", "--construction", "pgroup",
                  "--group", "Q8", "--n", "6", "--eps", "0.2",
                  "--paper-asymptotic", "--out", str(spec_file))
    assert code == 0
    obj = json.loads(spec_file.read_text())
    assert obj["construction"] == "pgroup" and obj["seed_len"] > 0
    code, out = run(capsys, "eval", "--instance", str(prog_file),
                    "--prg", str(spec_file), "--eps", "0.2")
    rep = json.loads(out)
    assert code == 0 and rep["exact_delta"] <= 0.2 and rep["bound_holds"]


def test_eval_exit_code_on_failure(capsys, prog_file):
    code, out = run(capsys, "eval", "--instance", str(prog_file),
                    "--sampler", "const(n=6,value=0)", "--eps", "1e-9")
    assert code == 1


def test_experiment_verb(capsys, tmp_path):
    cfg = {"group": "Q8", "n": 12, "ell": 4, "w": 2, "q": 2, "kind": "block",
           "corpus_size": 2, "eps": 0.25, "trials": 400,
           "D": "hthr(n=12,b=1,k=2)", "T": "hthr(n=12,b=3,k=2)",
           "thresholds": {"freq_collapse": 0.5}}
    cfg_file = tmp_path / "exp.json"
    cfg_file.write_text(json.dumps(cfg))
    code, out = run(capsys, "experiment", "--config", str(cfg_file))
    rep = json.loads(out)
    assert code == 0 and rep["freq_collapse_meets"] is True


def test_calibrate_verb(capsys):
    code, out = run(capsys, "calibrate", "--construction", "pgroup",
                    "--group", "Q8", "--n", "8", "--eps", "0.25",
                    "--corpus-size", "4")
    rep = json.loads(out)
    assert code == 0 and rep["params"]["provenance"] == "calibrated"


def test_out_flag_writes_file(capsys, tmp_path):
    dest = tmp_path / "report.json"
    code, out = run(capsys, "group", "info", "Q8", "--out", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["order"] == 8


def test_shipped_catalog_files_match_construction():
    from importlib import resources
    from grouprg import reps
    from grouprg.datagen import CATALOG_NAMES, _fname
    from grouprg.groups import group_from_json, catalog_group
    base = resources.files("grouprg").joinpath("data")
    for name in CATALOG_NAMES:
        text = base.joinpath(f"groups/{_fname(name)}.json").read_text()
        G = group_from_json(text)
        assert (G.table == catalog_group(name).table).all()
        rtext = base.joinpath(f"irreps/{_fname(name)}.json").read_text()
        S = reps.irreps_from_json(rtext)
        assert reps.validate_irrep_set(S.group, S).passed()
