"""Command-line driver: compile a unitary matrix file into a circuit.

Matrix file format: a header line ``dim <m> <real|complex>`` followed by m
rows of m whitespace-separated entries.  Complex entries are written as
``re,im`` with no spaces around the comma; decimal and scientific notation
are both accepted.

The compile run writes three artifacts, all byte-deterministic for a fixed
(seed, workers, config): ``<prefix>.circuit`` (gatelist),
``<prefix>.history.csv`` (per-worker cost traces) and
``<prefix>.summary.txt`` (three-stage cost report).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import benchgen
from .circuit import SIMULATION_CAP, evaluate, export_gatelist
from .errors import CsdoptError, NotUnitary, ParseError
from .linalg import UNITARY_TOL, expand_to_power_of_two, unitarity_deviation
from .optimizer import AnnealConfig, parallel_search
from .csd import resolve_branch


@dataclass(frozen=True)
class RunConfig:
    input_path: str
    branch: str = "auto"
    i_max: int = 40000
    j_max: int = 1000
    alpha: float = 0.01
    seed: int = 1
    workers: int | None = None     # None: one per available CPU
    prefix: str = "out"
    verify: bool = False
    tol: float = UNITARY_TOL
    max_parallel: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must satisfy 0 <= alpha < 1")


def parse_matrix_file(path: str, tol: float = UNITARY_TOL) -> np.ndarray:
    """Read and validate a matrix file; raises ParseError / NotUnitary."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split()
    if len(head) != 3 or head[0] != "dim":
        raise ParseError(f"expected 'dim <m> <real|complex>', got {lines[0]!r}", 1)
    try:
        m = int(head[1])
    except ValueError:
        raise ParseError(f"bad dimension {head[1]!r}", 1) from None
    if head[2] not in ("real", "complex"):
        raise ParseError(f"bad kind {head[2]!r} (want real|complex)", 1)
    is_complex = head[2] == "complex"
    if m < 1:
        raise ParseError("dimension must be positive", 1)
    if len(lines) < 1 + m:
        raise ParseError(f"expected {m} rows, file ends early", len(lines) + 1)
    out = np.zeros((m, m), dtype=complex if is_complex else float)
    for i in range(m):
        lineno = 2 + i
        toks = lines[1 + i].split()
        if len(toks) != m:
            raise ParseError(f"expected {m} entries, got {len(toks)}", lineno)
        for j, tok in enumerate(toks):
            try:
                if is_complex:
                    re, _, im = tok.partition(",")
                    out[i, j] = complex(float(re), float(im) if im else 0.0)
                else:
                    if "," in tok:
                        raise ValueError("complex entry in a real matrix")
                    out[i, j] = float(tok)
            except ValueError as e:
                raise ParseError(f"bad entry {tok!r} (column {j + 1}): {e}",
                                 lineno) from None
    dev = unitarity_deviation(out)
    if dev > tol:
        raise NotUnitary(dev, tol)
    return out


def write_matrix_file(path, matrix: np.ndarray) -> None:
    m = np.asarray(matrix)
    is_complex = np.iscomplexobj(m) and np.abs(m.imag).max() != 0.0
    lines = [f"dim {m.shape[0]} {'complex' if is_complex else 'real'}"]
    for row in m:
        if is_complex:
            lines.append(" ".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
        else:
            lines.append(" ".join(f"{v.real:.17g}" for v in row))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _history_csv(result) -> str:
    lines = ["worker,iteration,phase,cost"]
    for oc in result.outcomes:
        for it, c in oc.qsel_history:
            lines.append(f"{oc.worker},{it},qubitsel,{c}")
        for it, c in oc.state.history:
            lines.append(f"{oc.worker},{it},anneal,{c}")
    return "\n".join(lines) + "\n"


def _summary_text(cfg: RunConfig, result, dim_in: int, dim_used: int,
                  branch: str, workers: int, verify_dev: float | None) -> str:
    b = result.breakdown
    s, p, u, pt, s2 = b.five_terms()
    lines = [
        f"input: {cfg.input_path}",
        (f"dimension: {dim_in} (expanded to {dim_used})"
         if dim_used != dim_in else f"dimension: {dim_in}"),
        f"branch: {branch}",
        f"workers: {workers} seed: {cfg.seed} i_max: {cfg.i_max} "
        f"j_max: {cfg.j_max} alpha: {cfg.alpha:g}",
        f"No optimisation: c_num(U, I, I) = {result.stage_unoptimised} gates",
        "After selection of an optimised qubit permutation: "
        f"c_num(U, I, Q) = {result.stage_qubit_selected} gates",
        "After simulated annealing: "
        f"c_num(U, P, Q) = {s} + {p} + {u} + {pt} + {s2} = {b.total} gates",
        f"best worker: {result.worker}",
        f"q: {list(result.q)}",
    ]
    if verify_dev is not None:
        lines.append(f"verification: max deviation {verify_dev:.3e}")
    return "\n".join(lines) + "\n"


def run_pipeline(cfg: RunConfig) -> int:
    """Parse, optimise, write artifacts.  Returns the exit status."""
    artifacts = [Path(cfg.prefix + ext)
                 for ext in (".circuit", ".history.csv", ".summary.txt")]
    try:
        U = parse_matrix_file(cfg.input_path, cfg.tol)
        dim_in = U.shape[0]
        U = expand_to_power_of_two(U, cfg.tol)
        dim_used = U.shape[0]
        branch = resolve_branch(U, cfg.branch)
        workers = cfg.workers
        if workers is None:
            workers = os.cpu_count() or 1
        acfg = AnnealConfig(i_max=cfg.i_max, j_max=cfg.j_max, alpha=cfg.alpha,
                            seed=cfg.seed, workers=workers)
        result = parallel_search(U, acfg, branch, cfg.tol,
                                 max_parallel=cfg.max_parallel)
        verify_dev = None
        n = dim_used.bit_length() - 1
        if cfg.verify and n <= SIMULATION_CAP:
            V = evaluate(result.circuit.concatenated())
            verify_dev = float(np.abs(V - U).max())
        artifacts[0].write_text(export_gatelist(result.circuit))
        artifacts[1].write_text(_history_csv(result))
        artifacts[2].write_text(_summary_text(
            cfg, result, dim_in, dim_used, branch, workers, verify_dev))
        if verify_dev is not None and verify_dev > 1e-8:
            print(f"verification FAILED: max deviation {verify_dev:.3e}",
                  file=sys.stderr)
            return 1
        return 0
    except (CsdoptError, OSError, ValueError) as e:
        for a in artifacts:
            a.unlink(missing_ok=True)
        print(f"error: {e}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="csdopt",
        description="Compile a unitary matrix into a circuit of controlled "
                    "rotations, minimising gate count over permutations.")
    sub = ap.add_subparsers(dest="command")
    comp = sub.add_parser("compile", help="run the full pipeline")
    comp.add_argument("--input", required=True, help="matrix file path")
    comp.add_argument("--branch", choices=("auto", "real", "complex"),
                      default="auto")
    comp.add_argument("--imax", type=int, default=40000,
                      help="annealing iterations (default 40000)")
    comp.add_argument("--jmax", type=int, default=1000,
                      help="qubit-selection iterations (default 1000)")
    comp.add_argument("--alpha", type=float, default=0.01,
                      help="threshold fraction in [0,1) (default 0.01)")
    comp.add_argument("--seed", type=int, default=1)
    comp.add_argument("--workers", type=int, default=None,
                      help="search workers (default: one per CPU)")
    comp.add_argument("--prefix", default="out",
                      help="output artifact prefix (default 'out')")
    comp.add_argument("--verify", action="store_true",
                      help="evaluate the exported circuit against the input")
    comp.add_argument("--tol", type=float, default=UNITARY_TOL,
                      help="unitarity validation tolerance")
    gen = sub.add_parser("gen", help="generate a benchmark matrix file")
    gen.add_argument("kind", choices=("qft", "star", "cayley", "fixture",
                                      "randorth"))
    gen.add_argument("args", type=int, nargs="*",
                     help="qft <dim> | star <leaves> | cayley <degree> "
                          "<generations> | randorth <dim>")
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", default="-", help="output path (default stdout)")
    return ap


def _run_gen(ns) -> int:
    try:
        if ns.kind == "qft":
            (dim,) = ns.args
            M = benchgen.qft_matrix(dim)
        elif ns.kind == "star":
            (k,) = ns.args
            M = benchgen.dtqw_step(benchgen.star_graph(k))
        elif ns.kind == "cayley":
            deg, gens = ns.args
            M = benchgen.dtqw_step(benchgen.cayley_tree(deg, gens))
        elif ns.kind == "fixture":
            if ns.args:
                raise ValueError("fixture takes no arguments")
            M = benchgen.sparse_orthogonal_fixture()
        else:  # randorth
            (dim,) = ns.args
            M = benchgen.random_orthogonal(
                dim, np.random.default_rng(ns.seed))
        write_matrix_file(ns.out, M)
        return 0
    except (CsdoptError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    if ns.command == "gen":
        return _run_gen(ns)
    if ns.command == "compile":
        cfg = RunConfig(
            input_path=ns.input, branch=ns.branch, i_max=ns.imax,
            j_max=ns.jmax, alpha=ns.alpha, seed=ns.seed, workers=ns.workers,
            prefix=ns.prefix, verify=ns.verify, tol=ns.tol)
        return run_pipeline(cfg)
    _build_parser().print_help()
    return 2


if __name__ == "__main__":
    sys.exit(main())
