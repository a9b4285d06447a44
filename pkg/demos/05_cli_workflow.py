#!/usr/bin/env python3
"""The command-line workflow: JSON in, JSON out, deterministic reports.

Writes a function spec and matrices to a scratch directory, evaluates and
differentiates through the ``moikit`` CLI, and runs a filtered slice of the
seeded verification suite twice to show the reports are byte-identical.
"""

import hashlib
import json
import pathlib
import subprocess
import sys
import tempfile

import numpy as np

from moikit.spectral import matrix_to_dict


def run(*args):
    cmd = [sys.executable, "-m", "moikit.cli", *args]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(f"$ moikit {' '.join(args)}  -> exit {proc.returncode}")
    return proc


work = pathlib.Path(tempfile.mkdtemp(prefix="moikit-demo-"))

# function spec: cos as a two-atom oscillatory sum
(work / "cos.json").write_text(json.dumps(
    {"kind": "wiener", "atoms": [[1.0, 0.5, 0.0], [-1.0, 0.5, 0.0]]}))

# matrices
A = np.diag([0.0, np.pi / 2, np.pi])
B = np.full((3, 3), 0.5)
(work / "a.json").write_text(json.dumps(matrix_to_dict(A)))
(work / "b.json").write_text(json.dumps(matrix_to_dict(B)))

# evaluate cos(A)
run("eval", "--function", str(work / "cos.json"), "--matrix", str(work / "a.json"),
    "--out", str(work / "cosA.json"))
print("  cos(diag(0, pi/2, pi)) diagonal:",
      [round(row[i], 6) for i, row in enumerate(json.loads(
          (work / "cosA.json").read_text())["re"])])

# first derivative with the built-in stencil cross-check
run("derivative", "--function", str(work / "cos.json"),
    "--matrix", str(work / "a.json"), "--matrix", str(work / "b.json"),
    "--order", "1", "--check", "--out", str(work / "dcos.json"))
report = json.loads((work / "dcos.json.report.json").read_text())
print(f"  oracle residual: {report['checks'][0]['residual']:.2e}")

# a filtered slice of the verification suite, twice, same seed
for _ in range(2):
    run("verify", "--seed", "42", "--filter", "truncation",
        "--out", str(work / "verify.json"))
    body = (work / "verify.json.body").read_bytes()
    print(f"  report body: {len(body)} bytes, sha256 = {hashlib.sha256(body).hexdigest()[:12]}")

print(f"\nartifacts left in {work}")
