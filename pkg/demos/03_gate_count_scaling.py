"""Gate-count scaling of the decomposition.

A dense n-qubit complex unitary costs exactly 4^n - 1 one-parameter
gates under this compiler's convention; real orthogonal matrices cost
roughly half that.  Structured matrices (Fourier transforms, walk
operators) come in under the dense ceiling because equal and zero
rotation angles drop out.
"""

import numpy as np

from csdopt import csd_gate_count, qft_matrix, random_orthogonal, random_unitary

rng = np.random.default_rng(0)

print(f"{'n':>2} {'dense complex':>14} {'4^n - 1':>8} {'dense real':>11} "
      f"{'QFT':>6}")
for n in range(1, 6):
    dim = 2 ** n
    dense_c = csd_gate_count(random_unitary(dim, rng), "complex")
    dense_r = csd_gate_count(random_orthogonal(dim, rng), "real")
    qft = csd_gate_count(qft_matrix(dim), "complex")
    print(f"{n:>2} {dense_c:>14} {4**n - 1:>8} {dense_r:>11} {qft:>6}")

print("\nsparsity pays: zeroing structure cuts the count")
from csdopt import dtqw_step, star_graph
walk = dtqw_step(star_graph(8))
print(f"8-star walk (16x16, sparse): {csd_gate_count(walk, 'real')} gates vs "
      f"{csd_gate_count(random_orthogonal(16, rng), 'real')} for dense 16x16")
