#!/usr/bin/env python3
"""Run a spread of xeig commands and validate every JSON report against the schema."""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def main() -> int:
    cli, schema_path, matrices = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    validator = jsonschema.Draft202012Validator(schema)
    diag = str(matrices / "diag124.json")
    nil = str(matrices / "nilpotent4.json")
    cases = [
        ["shift", "member", "--weights", "exptail:pos=1/2,neg=1/2", "--lambda", "3"],
        ["shift", "member", "--weights", "powerlaw:alpha=1", "--lambda", "1+i", "--mode", "sampled"],
        ["shift", "annulus", "--weights", "exptail:pos=1/2,neg=1/3"],
        ["shift", "norms", "--weights", "powerlaw:alpha=1", "--kmax", "5", "--exact"],
        ["shift", "quasinilpotence", "--weights", "powerlaw:alpha=1"],
        ["shift", "witness", "--weights", "exptail:pos=1/2,neg=1/2", "--lambda", "3", "--k", "2"],
        ["matrix", "sigma", "--input", diag],
        ["matrix", "sigma", "--input", nil],
        ["matrix", "member", "--input", diag, "--lambda", "2"],
        ["matrix", "member", "--input", diag, "--lambda", "3"],
        ["matrix", "orbit", "--input", diag, "--samples", "4", "--seed", "1"],
        ["volterra", "discretize", "--n", "4"],
        ["volterra", "evidence", "--lambda", "1/2", "--grids", "8,16"],
        ["volterra", "shifted", "--gamma", "2", "--n", "6", "--scheme", "trapezoid"],
        ["volterra", "probe", "--lambda", "2", "--m", "0", "--k", "0", "--j", "3", "--grids", "8,16"],
        ["sweep", "shift", "--weights", "powerlaw:alpha=1", "--grid", "modulus:1/2;1;2,phase:0..2pi:3"],
        ["sweep", "matrix", "--input", diag, "--grid", "modulus:1;2;3"],
    ]
    failures = 0
    for args in cases:
        proc = subprocess.run([cli, *args], capture_output=True, text=True)
        label = " ".join(args[:2])
        if proc.returncode != 0:
            print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        errors = sorted(validator.iter_errors(json.loads(proc.stdout)), key=lambda e: list(e.path))
        if errors:
            failures += 1
            for e in errors:
                print(f"FAIL {label}: {'/'.join(map(str, e.path))}: {e.message}")
        else:
            print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
