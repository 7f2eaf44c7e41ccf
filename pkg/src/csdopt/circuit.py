"""Gate and circuit model, gate merging, evaluation, and serialisation.

Gates are controlled single-qubit operations plus SWAP.  A control pattern
assigns each non-target qubit one of {control-on-1, control-on-0, none}.
Gates listed earlier in a circuit act earlier in time, so a circuit
``[g1, g2]`` evaluates to the matrix ``M(g2) @ M(g1)``.

Internally gates are handled as flat records ``(kind, target, care, val,
angle)`` where ``care``/``val`` are bitmasks over basis-index bits (qubit 1
is the most significant bit).  The reduction pass and the decomposition
engine share this representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParseError, TooLarge
from .linalg import permutation_cycles, validate_permutation

KINDS = ("RY", "RZ", "PHASE", "Z", "SWAP")
ANGLE_KINDS = ("RY", "RZ", "PHASE")

MERGE_ANGLE_TOL = 1e-12
SIMULATION_CAP = 12


@dataclass(frozen=True)
class Gate:
    """One controlled single-qubit operation (or an uncontrolled SWAP).

    ``controls`` is a sorted tuple of (qubit, bit) pairs; qubits absent from
    it are unconstrained.  SWAP gates carry no angle and no controls, and
    ``target`` is then a pair of qubit indices.
    """

    kind: str
    target: int | tuple[int, int]
    angle: float | None = None
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "SWAP":
            if self.angle is not None or self.controls:
                raise ValueError("SWAP gates carry no angle and no controls")
            if not (isinstance(self.target, tuple) and len(self.target) == 2):
                raise ValueError("SWAP target must be a pair of qubits")
        else:
            if self.kind in ANGLE_KINDS and self.angle is None:
                raise ValueError(f"{self.kind} gate needs an angle")
            if self.kind == "Z" and self.angle is not None:
                raise ValueError("Z gates carry no angle")
            for q, b in self.controls:
                if q == self.target:
                    raise ValueError("target qubit cannot be a control")
                if b not in (0, 1):
                    raise ValueError("control bit must be 0 or 1")


@dataclass(frozen=True)
class Circuit:
    """Ordered gate sequence on ``n_qubits`` wires plus a global phase.

    The global phase is a scalar factor exp(i*phase) applied by
    :func:`evaluate`; it is bookkeeping, not a gate, and does not count
    towards the gate count.
    """

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    global_phase: float = 0.0

    def __post_init__(self):
        for g in self.gates:
            qubits = g.target if isinstance(g.target, tuple) else (g.target,)
            for q in qubits + tuple(q for q, _ in g.controls):
                if not 1 <= q <= self.n_qubits:
                    raise ValueError(f"qubit {q} outside 1..{self.n_qubits}")

    def __len__(self):
        return len(self.gates)


SEGMENT_NAMES = ("Q", "P", "Uprime", "PT", "QT")


@dataclass(frozen=True)
class SegmentedCircuit:
    """The five-part circuit Q, P, U', P^T, Q^T (in time order)."""

    segments: tuple[Circuit, ...]

    def __post_init__(self):
        if len(self.segments) != 5:
            raise ValueError("expected exactly five segments")
        if len({c.n_qubits for c in self.segments}) != 1:
            raise ValueError("segments disagree on qubit count")

    @property
    def n_qubits(self) -> int:
        return self.segments[0].n_qubits

    def gate_counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.segments)

    def total_gates(self) -> int:
        return sum(self.gate_counts())

    def concatenated(self) -> Circuit:
        gates = tuple(g for c in self.segments for g in c.gates)
        phase = float(sum(c.global_phase for c in self.segments))
        return Circuit(self.n_qubits, gates, phase)


# ---------------------------------------------------------------------------
# record representation


def gate_to_record(g: Gate, n: int):
    care = 0
    val = 0
    for q, b in g.controls:
        bit = 1 << (n - q)
        care |= bit
        if b:
            val |= bit
    return (g.kind, g.target, care, val, g.angle)


def record_to_gate(rec, n: int) -> Gate:
    kind, target, care, val, angle = rec
    controls = []
    for q in range(1, n + 1):
        bit = 1 << (n - q)
        if care & bit:
            controls.append((q, 1 if val & bit else 0))
    return Gate(kind, target, angle, tuple(controls))


def reduce_records(recs: list) -> list:
    """Merge mergeable gate pairs within contiguous same-kind-same-target runs.

    Two gates merge when kind, target and angle agree (angle within
    ``MERGE_ANGLE_TOL``) and their control patterns are identical except at
    exactly one qubit, where one is control-on-0 and the other control-on-1.
    The merged gate drops that control.  Runs to a fixpoint; the scan is
    greedy left to right, so the output is deterministic.
    """
    out = []
    i = 0
    total = len(recs)
    while i < total:
        j = i
        kind, target = recs[i][0], recs[i][1]
        if kind == "SWAP":
            out.append(recs[i])
            i += 1
            continue
        while j < total and recs[j][0] == kind and recs[j][1] == target \
                and recs[j][0] != "SWAP":
            j += 1
        run = recs[i:j]
        out.extend(run if len(run) == 1 else _merge_run(run))
        i = j
    return out


def _mergeable(g1, g2):
    if g1[2] != g2[2]:
        return False
    if g1[4] is not None and abs(g1[4] - g2[4]) > MERGE_ANGLE_TOL:
        return False
    d = g1[3] ^ g2[3]
    return d != 0 and not (d & (d - 1))


def _merge_run(run):
    kind, target = run[0][0], run[0][1]
    if len(run) == 2:
        g1, g2 = run
        if _mergeable(g1, g2):
            bit = g1[3] ^ g2[3]
            return [(kind, target, g1[2] & ~bit, g1[3] & ~bit, g1[4])]
        return run
    # items: [care, val, angle, order position]
    if kind == "Z":
        clusters = [[[g[2], g[3], g[4], pos] for pos, g in enumerate(run)]]
    else:
        order = sorted(range(len(run)), key=lambda pos: run[pos][4])
        clusters = []
        cur = [[run[order[0]][2], run[order[0]][3], run[order[0]][4], order[0]]]
        for pos in order[1:]:
            g = run[pos]
            if g[4] - cur[-1][2] <= MERGE_ANGLE_TOL:
                cur.append([g[2], g[3], g[4], pos])
            else:
                clusters.append(cur)
                cur = [[g[2], g[3], g[4], pos]]
        clusters.append(cur)
        if all(len(cl) == 1 for cl in clusters):
            return run
    survivors = []
    for cl in clusters:
        cl.sort(key=lambda it: it[3])
        while len(cl) > 1:
            index = {(it[0], it[1]): idx for idx, it in enumerate(cl)}
            consumed = [False] * len(cl)
            nxt = []
            merged_any = False
            for idx, it in enumerate(cl):
                if consumed[idx]:
                    continue
                care, val, ang, pos = it
                consumed[idx] = True
                bits = care
                while bits:
                    bit = bits & (-bits)
                    bits ^= bit
                    pj = index.get((care, val ^ bit))
                    if pj is not None and pj != idx and not consumed[pj]:
                        consumed[pj] = True
                        nxt.append([care & ~bit, val & ~bit, ang,
                                    min(pos, cl[pj][3])])
                        merged_any = True
                        break
                else:
                    nxt.append(it)
            nxt.sort(key=lambda it: it[3])
            cl = nxt
            if not merged_any:
                break
        survivors.extend(cl)
    survivors.sort(key=lambda it: it[3])
    return [(kind, target, it[0], it[1], it[2]) for it in survivors]


def reduce_circuit(circuit: Circuit) -> Circuit:
    """Public reduction pass; see :func:`reduce_records`."""
    n = circuit.n_qubits
    recs = []
    for g in circuit.gates:
        if g.kind == "SWAP":
            recs.append((g.kind, g.target, 0, 0, None))
        else:
            recs.append(gate_to_record(g, n))
    red = reduce_records(recs)
    gates = []
    for rec in red:
        if rec[0] == "SWAP":
            gates.append(Gate("SWAP", rec[1]))
        else:
            gates.append(record_to_gate(rec, n))
    return Circuit(n, tuple(gates), circuit.global_phase)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(circuit: Circuit, cap: int = SIMULATION_CAP) -> np.ndarray:
    """Dense unitary of a circuit (the verification oracle).

    Gates apply in list order; the result is
    ``M(g_last) @ ... @ M(g_first) * exp(i * global_phase)``.
    """
    n = circuit.n_qubits
    if n > cap:
        raise TooLarge(f"{n} qubits exceeds the simulation cap of {cap}")
    m = 1 << n
    M = np.eye(m, dtype=complex)
    idx = np.arange(m)
    for g in circuit.gates:
        if g.kind == "SWAP":
            qa, qb = g.target
            ba, bb = n - qa, n - qb
            bits_a = (idx >> ba) & 1
            bits_b = (idx >> bb) & 1
            src = idx ^ ((bits_a ^ bits_b) * ((1 << ba) | (1 << bb)))
            M = M[src, :]
            continue
        kind, target, care, val, angle = gate_to_record(g, n)
        b = n - target
        sel = (idx & care) == val
        if kind == "PHASE":
            rows = idx[sel & ((idx >> b) & 1 == 1)]
            M[rows, :] *= np.exp(1j * angle)
            continue
        if kind == "Z":
            rows = idx[sel & ((idx >> b) & 1 == 1)]
            M[rows, :] *= -1.0
            continue
        i0 = idx[sel & ((idx >> b) & 1 == 0)]
        i1 = i0 | (1 << b)
        if kind == "RY":
            c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
            u00, u01, u10, u11 = c, -s, s, c
        else:  # RZ
            u00 = np.exp(-1j * angle / 2.0)
            u11 = np.exp(1j * angle / 2.0)
            u01 = u10 = 0.0
        r0 = u00 * M[i0, :] + u01 * M[i1, :]
        r1 = u10 * M[i0, :] + u11 * M[i1, :]
        M[i0, :] = r0
        M[i1, :] = r1
    if circuit.global_phase:
        M = M * np.exp(1j * circuit.global_phase)
    return M


# ---------------------------------------------------------------------------
# qubit permutations as swap circuits


def qubit_perm_to_swap_circuit(q: Sequence[int]) -> Circuit:
    """Realise a qubit permutation with its minimal swap-gate sequence.

    Emits exactly ``swap_gate_count(q)`` SWAP gates; the transpose
    permutation is the same swaps in reverse order.
    """
    validate_permutation(q)
    n = len(q)
    swaps = []
    for cyc in permutation_cycles(q):
        # adjacent transpositions of the cycle, emitted innermost first so
        # that the evaluation matches the lifted permutation matrix
        for a, b in reversed(list(zip(cyc, cyc[1:]))):
            swaps.append(Gate("SWAP", (a, b)))
    return Circuit(n, tuple(swaps))


def transpose_swap_circuit(c: Circuit) -> Circuit:
    """Same swaps applied in reverse order."""
    return Circuit(c.n_qubits, tuple(reversed(c.gates)), c.global_phase)


# ---------------------------------------------------------------------------
# serialisation


def _pattern_string(g: Gate, n: int) -> str:
    chars = ["."] * n
    for q, b in g.controls:
        chars[q - 1] = "1" if b else "0"
    return "".join(chars)


def _gate_line(g: Gate, n: int) -> str:
    if g.kind == "SWAP":
        return f"SWAP t={g.target[0]},{g.target[1]}"
    pat = _pattern_string(g, n)
    if g.angle is None:
        return f"{g.kind} t={g.target} c={pat}"
    return f"{g.kind} t={g.target} a={g.angle:.17g} c={pat}"


def export_gatelist(sc: SegmentedCircuit) -> str:
    """Deterministic text serialisation; round-trips via parse_gatelist."""
    n = sc.n_qubits
    lines = [f"qubits {n}", f"segments {len(sc.segments)}"]
    for name, circ in zip(SEGMENT_NAMES, sc.segments):
        lines.append(f"segment {name} {len(circ)}")
        if circ.global_phase:
            lines.append(f"gphase {circ.global_phase:.17g}")
        for g in circ.gates:
            lines.append(_gate_line(g, n))
    return "\n".join(lines) + "\n"


def parse_gatelist(text: str) -> SegmentedCircuit:
    lines = text.splitlines()
    pos = 0

    def need(prefix):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"expected {prefix!r}, found end of file", pos + 1)
        ln = lines[pos]
        if not ln.startswith(prefix + " "):
            raise ParseError(f"expected {prefix!r}, found {ln!r}", pos + 1)
        pos += 1
        return ln[len(prefix) + 1:]

    try:
        n = int(need("qubits"))
        k = int(need("segments"))
    except ValueError as e:
        raise ParseError(str(e), pos) from None
    segs = []
    for _ in range(k):
        hdr = need("segment").split()
        if len(hdr) != 2:
            raise ParseError("malformed segment header", pos)
        count = int(hdr[1])
        phase = 0.0
        if pos < len(lines) and lines[pos].startswith("gphase "):
            phase = float(lines[pos].split()[1])
            pos += 1
        gates = []
        for _ in range(count):
            if pos >= len(lines):
                raise ParseError("unexpected end of file in segment", pos + 1)
            gates.append(_parse_gate_line(lines[pos], n, pos + 1))
            pos += 1
        segs.append(Circuit(n, tuple(gates), phase))
    return SegmentedCircuit(tuple(segs))


def _parse_gate_line(line: str, n: int, lineno: int) -> Gate:
    parts = line.split()
    if not parts:
        raise ParseError("empty gate line", lineno)
    kind = parts[0]
    fields = {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise ParseError(f"malformed token {tok!r}", lineno)
        key, _, value = tok.partition("=")
        fields[key] = value
    try:
        if kind == "SWAP":
            a, b = fields["t"].split(",")
            return Gate("SWAP", (int(a), int(b)))
        target = int(fields["t"])
        angle = float(fields["a"]) if "a" in fields else None
        pat = fields["c"]
        if len(pat) != n:
            raise ParseError(f"pattern length {len(pat)} != {n}", lineno)
        controls = []
        for q, ch in enumerate(pat, start=1):
            if ch == ".":
                continue
            if ch not in "01":
                raise ParseError(f"bad pattern character {ch!r}", lineno)
            controls.append((q, int(ch)))
        return Gate(kind, target, angle, tuple(controls))
    except ParseError:
        raise
    except (KeyError, ValueError) as e:
        raise ParseError(f"malformed gate line: {e}", lineno) from None


def export_qasm_like(sc: SegmentedCircuit) -> str:
    """One instruction per line, qasm-flavoured; not required to round-trip."""
    n = sc.n_qubits
    lines = [f"// qubits: {n}"]
    for name, circ in zip(SEGMENT_NAMES, sc.segments):
        lines.append(f"// segment {name} ({len(circ)} gates)")
        if circ.global_phase:
            lines.append(f"gphase({circ.global_phase:.17g});")
        for g in circ.gates:
            if g.kind == "SWAP":
                lines.append(f"swap q[{g.target[0]}],q[{g.target[1]}];")
                continue
            ctrl = "".join(
                f"ctrl{'1' if b else '0'}(q[{q}]) " for q, b in g.controls)
            if g.angle is None:
                lines.append(f"{ctrl}z q[{g.target}];")
            else:
                lines.append(
                    f"{ctrl}{g.kind.lower()}({g.angle:.17g}) q[{g.target}];")
    return "\n".join(lines) + "\n"
