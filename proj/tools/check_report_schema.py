#!/usr/bin/env python3
"""Run `taskxfer analyze` on a records file and validate report.json against the schema."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main():
    if len(sys.argv) != 4:
        sys.exit("usage: check_report_schema.py TASKXFER_BINARY SCHEMA RECORDS")
    binary, schema_path, records = sys.argv[1:]
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    runs = [[], ["--ceiling", "best", "--all-cliques"], ["--threshold", "pct:50", "--percentile", "100"]]
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, extra in enumerate(runs):
            out = Path(tmp) / str(i)
            subprocess.run([binary, "analyze", records, "-o", str(out), *extra], check=True, capture_output=True)
            report = json.loads((out / "report.json").read_text())
            for error in validator.iter_errors(report):
                failures += 1
                print(f"{' '.join(extra) or 'defaults'}: {error.json_path}: {error.message}")
    print("ok" if failures == 0 else f"{failures} schema violation(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
