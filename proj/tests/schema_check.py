#!/usr/bin/env python3
"""Runs the CLI over the bundled instances and validates every JSON document
it reads or writes against schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

BASE = "https://trailnet.example/schemas/"


def load_registry(schema_dir):
    resources = []
    for path in sorted(schema_dir.glob("*.schema.json")):
        doc = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(doc)
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(resources)


def main():
    tool, data_dir, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    registry = load_registry(schema_dir)
    failures = 0
    checked = 0

    def validate(doc, schema, what):
        nonlocal failures, checked
        checked += 1
        validator = jsonschema.Draft202012Validator(
            {"$ref": BASE + schema + ".schema.json"}, registry=registry)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        if errors:
            failures += 1
            print(f"FAIL {what}: {errors[0].message} at {list(errors[0].absolute_path)}")

    def run(args, schema, expect=0):
        proc = subprocess.run([tool, *args], capture_output=True, text=True)
        what = "trailnet " + " ".join(args)
        if proc.returncode != expect:
            nonlocal failures
            failures += 1
            print(f"FAIL {what}: exit {proc.returncode}, expected {expect}: {proc.stderr.strip()}")
            return None
        doc = json.loads(proc.stdout)
        validate(doc, schema, what)
        return doc

    instances = sorted((data_dir / "instances").glob("*.json"))
    for path in instances:
        validate(json.loads(path.read_text()), "instance", path.name)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        generated = []
        for profile in ["fsirc", "separable", "ladlas", "simple", "acyclic"]:
            out = tmp / f"{profile}.json"
            doc = run(["oracle", "gen", "--seed", "3", "--profile", profile], "instance")
            out.write_text(json.dumps(doc))
            generated.append(out)
        priced = tmp / "priced.json"
        priced.write_text(json.dumps(run(["oracle", "gen", "--seed", "2", "--kind", "priced"], "priced")))
        base = tmp / "base.json"
        entry = tmp / "entry.json"
        base.write_text(json.dumps(run(["oracle", "gen", "--seed", "2", "--kind", "entry",
                                        "--entry-out", str(entry)], "instance")))
        validate(json.loads(entry.read_text()), "entry", "generated entry event")

        for path in [*instances, *generated]:
            p = str(path)
            run(["validate", p], "validate")
            run(["solve", p, "--trace"], "solve")
            run(["solve", p, "--side", "seller"], "solve")
            run(["enumerate", p], "enumerate")
            run(["check", p, "--outcome", "[]", "--notion", "all", "--all-witnesses"], "check")
            run(["check-axioms", p], "check-axioms")
            for notion in ["trail", "set", "chain"]:
                run(["oracle", "brute", p, "--notion", notion], "oracle-brute")
        run(["enumerate", str(generated[2]), "--terminal-lattice"], "enumerate")
        run(["dynamics", str(generated[2]), "--rural-hospitals"], "dynamics")

        trace = tmp / "trace.json"
        for side in ["buyer", "seller"]:
            run(["equilibrium", str(priced), "--perspective", side, "--trace", str(trace)], "equilibrium")
            validate(json.loads(trace.read_text()), "equilibrium-trace", f"{side} trace")
        run(["check-axioms", str(priced), "--priced"], "check-axioms")

        fp = run(["solve", str(base)], "solve")
        run(["dynamics", str(base), "--entry", str(entry)], "dynamics")
        run(["dynamics", str(base), "--entry", str(entry), "--readjust-from", json.dumps(fp["outcome"])],
            "dynamics")
        sellers = run(["validate", str(base)], "validate")["terminal_sellers"]
        run(["dynamics", str(base), "--exit", sellers[0]], "dynamics")

        run(["oracle", "partition", "--weights", "3,1,2,2"], "oracle-partition")
        run(["oracle", "partition", "--weights", "2,3"], "oracle-partition")
        run(["oracle", "needle", "--n", "3"], "oracle-needle")
        run(["oracle", "needle", "--n", "3", "--hidden", "2,4,5"], "oracle-needle")

        bad = tmp / "bad.json"
        bad.write_text('{"agents": ["a", "a"], "contracts": [{"id": "x", "seller": "a", "buyer": "q"}]}')
        run(["validate", str(bad)], "error", expect=2)
        run(["check", str(instances[0]), "--outcome", '["nope"]'], "error", expect=2)
        run(["enumerate", str(instances[0]), "--terminal-lattice"], "enumerate")
        run(["dynamics", str(instances[0]), "--entry", str(entry)], "error", expect=2)

    print(f"{checked} documents checked, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
