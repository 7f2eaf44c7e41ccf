"""Drive the full pipeline through the command-line interface.

Generates a walk operator on a degree-3 tree (42x42, padded to 64x64
automatically), runs a short search, and inspects the artifacts:
the gatelist circuit, the per-worker cost history CSV, and the summary.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

workdir = Path(tempfile.mkdtemp(prefix="csdopt_demo_"))
matrix_file = workdir / "cayley.mat"
prefix = workdir / "run"

subprocess.run([sys.executable, "-m", "csdopt.cli", "gen", "cayley", "3", "3",
                "--out", str(matrix_file)], check=True)
print(f"wrote {matrix_file} ({matrix_file.stat().st_size} bytes)")

# short budgets so the demo finishes in about a minute
subprocess.run([sys.executable, "-m", "csdopt.cli", "compile",
                "--input", str(matrix_file), "--prefix", str(prefix),
                "--imax", "400", "--jmax", "60", "--workers", "2",
                "--seed", "1", "--verify"], check=True)

print("\n--- summary ---")
print((workdir / "run.summary.txt").read_text())

circuit_lines = (workdir / "run.circuit").read_text().splitlines()
print(f"--- circuit: {len(circuit_lines)} lines, first 6 ---")
print("\n".join(circuit_lines[:6]))

history = (workdir / "run.history.csv").read_text().splitlines()
print(f"\n--- history: {len(history) - 1} rows, e.g. ---")
print("\n".join(history[:3] + history[-2:]))
print(f"\nartifacts kept in {workdir}")
