#!/usr/bin/env python3
"""Run each CLI subcommand and validate its JSON against schemas/.

usage: validate_outputs.py <mixgap binary> <schemas dir> <test data dir>
"""
import json
import pathlib
import subprocess
import sys
import tempfile

from jsonschema import Draft202012Validator
from referencing import Registry, Resource


def load_registry(schema_dir):
    resources = []
    for path in schema_dir.glob("*.schema.json"):
        schema = json.loads(path.read_text())
        resources.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(resources)


def run(binary, *args):
    proc = subprocess.run([binary, *args], capture_output=True, text=True, check=False)
    if proc.returncode != 0:
        raise SystemExit(f"{' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return proc.stdout


def main():
    binary, schema_dir, data_dir = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    registry = load_registry(schema_dir)

    def check(name, text):
        schema = registry.contents(f"{name}.schema.json")
        errors = list(Draft202012Validator(schema, registry=registry).iter_errors(json.loads(text)))
        for err in errors:
            print(f"{name}: {err.json_path}: {err.message}")
        return not errors

    ok = True
    with tempfile.TemporaryDirectory() as tmp:
        traj = str(pathlib.Path(tmp) / "traj.txt")
        star = str(pathlib.Path(tmp) / "star.json")
        for matrix in ("footnote_chain.json", "two_state.json", "nonreversible3.json", "half.csv"):
            ok &= check("spectrum", run(binary, "spectrum", "--matrix", str(data_dir / matrix), "--kmax", "20"))
        run(binary, "simulate", "--matrix", str(data_dir / "nonreversible3.json"), "--m", "20000", "--out", traj)
        ok &= check("estimate", run(binary, "estimate", "--traj", traj, "--K", "3", "--reversible"))
        ok &= check("estimate", run(binary, "estimate", "--traj", traj, "--adaptive-eps", "1"))
        ok &= check("coverage", run(binary, "coverage", "--matrix", str(data_dir / "two_state.json"), "--m", "2000",
                                    "--runs", "4", "--K", "2"))
        run(binary, "family", "star", "--alpha", "0.3", "--d", "3", "--out", star)
        ok &= check("matrix", pathlib.Path(star).read_text())
        for matrix in data_dir.glob("*.json"):
            ok &= check("matrix", matrix.read_text())
    print("all outputs valid" if ok else "schema violations found")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
