import json
import subprocess

import pytest

jsonschema = pytest.importorskip("jsonschema")

import rotmhd


def examples(root):
    return sorted(p for p in (root / "config").glob("*.json") if p.name != "schema.json")


def test_schema_is_valid(root):
    schema = json.loads((root / "config" / "schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)


def test_example_configs_validate(root):
    schema = json.loads((root / "config" / "schema.json").read_text())
    found = examples(root)
    assert {p.stem for p in found} >= {"simulate", "linear", "kernels", "strichartz", "sweep", "check"}
    for p in found:
        doc = json.loads(p.read_text())
        jsonschema.validate(doc, schema)
        # the schema and the parser agree on every example, and so does the echo
        full = rotmhd.normalize_config(doc)
        jsonschema.validate(full, schema)


def test_schema_rejects_unknown_keys(root):
    schema = json.loads((root / "config" / "schema.json").read_text())
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"kind": "linear", "bogus": 1}, schema)


def run(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def test_cli_exit_codes(cli, root, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "linear", "model": {"eps": 0.1}, "linaer": {}}))
    r = run(cli, "linear", "--config", str(bad), "--out", str(tmp_path / "o"))
    assert r.returncode == 2
    assert "unknown key 'linaer'" in r.stderr

    r = run(cli, "simulate", "--config", str(root / "config" / "linear.json"))
    assert r.returncode == 2  # kind does not match the subcommand

    r = run(cli, "frobnicate")
    assert r.returncode == 2

    out = tmp_path / "lin"
    r = run(cli, "linear", "--config", str(root / "config" / "linear.json"), "--out", str(out),
            "--seed", "9")
    assert r.returncode == 0, r.stderr
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 9
    assert manifest["exit_code"] == 0

    blow = tmp_path / "blow.json"
    blow.write_text(json.dumps({
        "kind": "simulate", "grid": {"n_h": 8, "n_v": 8, "box_h": 16.0, "box_v": 16.0},
        "model": {"eps": 0.5, "alpha": 1.0}, "initial": {"k_min": 0.3, "l2": 400.0},
        "solver": {"dt": 0.5, "t_end": 2.0, "blowup_factor": 1.0000001}}))
    r = run(cli, "simulate", "--config", str(blow), "--out", str(tmp_path / "b"))
    assert r.returncode == 3
