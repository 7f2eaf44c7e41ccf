"""Compile a quantum-walk step operator into controlled rotations.

Builds the walk operator of the 8-star graph, decomposes it, merges
mergeable gates, and verifies the circuit by dense evaluation.
"""

import numpy as np

from csdopt import (decompose, dtqw_step, evaluate, reduce_circuit,
                    star_graph)

graph = star_graph(8)
walk = dtqw_step(graph)
print(f"8-star walk operator: {walk.shape[0]}x{walk.shape[0]}, "
      f"{np.count_nonzero(walk)} nonzero entries")

circuit = decompose(walk, branch="real")
print(f"raw decomposition: {len(circuit)} gates")

reduced = reduce_circuit(circuit)
print(f"after gate merging: {len(reduced)} gates")
kinds = {}
for gate in reduced.gates:
    kinds[gate.kind] = kinds.get(gate.kind, 0) + 1
print(f"gate kinds: {kinds}")

rebuilt = evaluate(reduced)
print(f"max |circuit - operator| = {np.abs(rebuilt - walk).max():.2e}")

print("\nfirst five gates:")
for gate in reduced.gates[:5]:
    print(f"  {gate.kind} on qubit {gate.target}, angle={gate.angle}, "
          f"controls={gate.controls}")
