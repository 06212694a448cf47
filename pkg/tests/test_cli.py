from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from loggas.cli import main, render, run
from loggas.config import inputs_to_text, parse_config, render_config
from loggas.errors import ConfigError


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run_cli(tmp_path, text, *extra):
    out = tmp_path / "out.json"
    code = main(["--config", write(tmp_path, text), "--out", str(out), *extra])
    body = out.read_text() if out.exists() else ""
    return code, body


CANONICAL = "command = canonical\ncharges = 1\npopulations = 2\npotential = 0 0 1\nfamily = monomial\n"


def test_canonical_document(tmp_path):
    code, body = run_cli(tmp_path, CANONICAL)
    doc = json.loads(body)
    assert code == 0
    assert doc["results"]["canonical"]["value"] == pytest.approx(math.sqrt(2 * math.pi) / 2, rel=1e-11)
    assert doc["results"]["canonical"]["error"] >= 0
    assert doc["inputs"]["charges"] == "1"
    assert "canonical" in doc["timings"]


def test_grand_empty(tmp_path):
    code, body = run_cli(tmp_path, "command = grand\ncharges = 1 2\ntotal_charge = 0\n")
    assert code == 0
    assert json.loads(body)["results"]["grand"]["value"] == 1.0


def test_pfaffian_command(tmp_path):
    code, body = run_cli(tmp_path, "command = pfaffian\ncharges = 2\npopulations = 1\n")
    assert code == 0
    assert json.loads(body)["results"]["pfaffian"]["value"] == pytest.approx(math.sqrt(math.pi / 2), rel=1e-11)


def test_verify_passes(tmp_path):
    code, body = run_cli(tmp_path, "command = verify\ncharges = 1 2\ntotal_charge = 3\nfugacities = 0.5 2\n")
    doc = json.loads(body)
    assert code == 0, [c for c in doc["checks"] if not c["pass"]]
    names = [c["name"] for c in doc["checks"]]
    assert "grand_vs_canonical_sum" in names
    assert any(n.startswith("canonical_vs_oracle") for n in names)
    assert doc["oracle"]


def test_verify_zero_tolerance_fails(tmp_path, capsys):
    code, body = run_cli(tmp_path, "command = verify\ncharges = 1\npopulations = 2\ntolerance = 0\n")
    doc = json.loads(body)
    assert code == 1
    assert doc["status"] == "verification_failed"
    assert not all(c["pass"] for c in doc["checks"])
    assert "verification failed" in capsys.readouterr().err


def test_unknown_keys_listed(tmp_path, capsys):
    code, _ = run_cli(tmp_path, CANONICAL + "colour = blue\nsize = 3\n")
    assert code == 2
    err = capsys.readouterr().err
    assert "colour" in err and "size" in err


def test_infeasible_shape_is_config_error(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "command = canonical\ncharges = 1 1\npopulations = 1 1\n")
    assert code == 2
    assert "distinct" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["--config", str(tmp_path / "nope.cfg")]) == 2


def test_non_convergence_exit(tmp_path):
    text = "command = canonical\ncharges = 1\npopulations = 2\nnodes = 2\nmax_depth = 1\ntol_abs = 1e-15\ntol_rel = 1e-15\n"
    code, _ = run_cli(tmp_path, text)
    assert code == 3


def test_positional_command_override(tmp_path):
    code, body = run_cli(tmp_path, "command = canonical\ncharges = 2\npopulations = 1\n", "pfaffian")
    assert code == 0
    assert "pfaffian" in json.loads(body)["results"]


def test_csv_output(tmp_path):
    code, body = run_cli(tmp_path, CANONICAL, "--format", "csv")
    assert code == 0
    lines = body.splitlines()
    assert lines[0] == "section,name,field,value"
    value_line = next(l for l in lines if l.startswith("results,canonical,value"))
    assert float(value_line.split(",")[-1]) == pytest.approx(math.sqrt(2 * math.pi) / 2, rel=1e-11)


def test_round_trip_of_echoed_inputs(tmp_path):
    text = ("command = grand\ncharges = 1 2\ntotal_charge = 4\nfugacities = 0.1 0.30000000000000004\n"
            "tol_rel = 1e-10\nbeta = 1\nfamily = hermite\n")
    cfg = parse_config(text)
    _, doc = run(cfg)
    assert parse_config(inputs_to_text(doc["inputs"])) == cfg
    assert parse_config(render_config(cfg)) == cfg


BLOCKS = """command = debruijn-check
domain = interval
interval = 0 1
[block]
length = 1
row = 1
row = 1
[block]
length = 1
row = 0 1
row = 1
"""


def test_debruijn_explicit_blocks(tmp_path):
    code, body = run_cli(tmp_path, BLOCKS)
    doc = json.loads(body)
    assert code == 0
    assert doc["results"]["lhs"]["value"] == pytest.approx(1 / 6, abs=1e-13)
    assert doc["results"]["rhs"]["value"] == pytest.approx(1 / 6, abs=1e-13)
    assert doc["inputs"]["blocks"][1]["rows"] == ["0.0 1.0", "1.0"]
    assert parse_config(inputs_to_text(doc["inputs"])) == parse_config(BLOCKS)


def test_determinism(tmp_path):
    text = "command = debruijn-check\nrandom_trials = 8\n"
    docs = []
    for _ in range(2):
        code, body = run_cli(tmp_path, text, "--seed", "7")
        doc = json.loads(body)
        doc.pop("timings")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]
    _, doc = run(parse_config(CANONICAL))
    doc2 = run(parse_config(CANONICAL))[1]
    doc.pop("timings"), doc2.pop("timings")
    assert render(doc, "json") == render(doc2, "json")


def test_parallel_matches_serial(tmp_path):
    text = "command = debruijn-check\nrandom_trials = 4\n"
    _, serial = run_cli(tmp_path, text, "--seed", "3")
    _, parallel = run_cli(tmp_path, text, "--seed", "3", "--jobs", "2")
    a, b = json.loads(serial), json.loads(parallel)
    assert a["checks"] == b["checks"]


@pytest.mark.parametrize("text,needle", [
    ("charges = 1\n", "command"),
    ("command = canonical\ncharges = 1\n", "missing"),
    ("command = grand\ncharges = 1\ntotal_charge = 2\nrandom_trials = 3\n", "not accepted"),
    ("command = canonical\ncharges = 1\npopulations = x\n", "bad value"),
    ("command = canonical\ncharges = 1\ncharges = 2\npopulations = 1\n", "duplicate"),
    ("command = canonical\ncharges = 1\npopulations = 1\n[block]\nlength = 1\nrow = 1\n", "block"),
    ("command = debruijn-check\n", "random_trials"),
    ("command = debruijn-check\n[block]\nlength = 2\nrow = 1\n", "entries"),
    ("command = verify\ncharges = 1\n", "populations"),
    ("[section]\n", "unknown section"),
    ("command canonical\n", "expected key"),
])
def test_config_errors(text, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert needle in str(info.value)


def test_profile_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("LOGGAS_QUAD_PROFILE", "fast")
    code, body = run_cli(tmp_path, CANONICAL)
    assert code == 0
    assert json.loads(body)["results"]["canonical"]["value"] == pytest.approx(math.sqrt(2 * math.pi) / 2, rel=1e-8)
    monkeypatch.setenv("LOGGAS_QUAD_PROFILE", "bogus")
    assert run_cli(tmp_path, CANONICAL)[0] == 2


def test_module_entry_point(tmp_path):
    path = write(tmp_path, CANONICAL)
    proc = subprocess.run([sys.executable, "-m", "loggas", "--config", path], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["canonical"]["value"] > 0
