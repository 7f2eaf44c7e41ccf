"""csdopt: compile unitary matrices into circuits of controlled rotations.

The compiler lowers a unitary U through recursive cosine-sine
decomposition, then searches over qubit permutations Q and general
permutations P so that implementing U as Q^T P^T U' P Q needs fewer gates
than decomposing U directly.
"""

from .benchgen import (Graph, cayley_tree, dtqw_step, qft_matrix,
                       random_orthogonal, random_orthogonal_sparse,
                       random_unitary, sparse_orthogonal_fixture, star_graph)
from .circuit import (Circuit, Gate, SegmentedCircuit, evaluate,
                      export_gatelist, export_qasm_like, parse_gatelist,
                      qubit_perm_to_swap_circuit, reduce_circuit)
from .csd import (CsdBlocks, CsdEngine, LeafDecomposition, csd_gate_count,
                  csd_step, decompose, leaf_decomposition)
from .errors import (CsdoptError, DisconnectedGraph, InfeasiblePattern,
                     InvalidPermutation, NotUnitary, NumericalBreakdown,
                     ParseError, RealBranchComplexInput, ShapeError, TooLarge)
from .linalg import (expand_to_power_of_two, invert_permutation, is_unitary,
                     matrix_to_perm_list, perm_list_to_matrix,
                     qubit_perm_to_full_perm, swap_gate_count)
from .optimizer import (AnnealConfig, CostBreakdown, SearchResult,
                        SearchState, WorkerError, anneal,
                        build_segmented_circuit, cost, parallel_search,
                        select_qubit_permutation)

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig", "Circuit", "CostBreakdown", "CsdBlocks", "CsdEngine",
    "CsdoptError", "DisconnectedGraph", "Gate", "Graph", "InfeasiblePattern",
    "InvalidPermutation", "LeafDecomposition", "NotUnitary",
    "NumericalBreakdown", "ParseError", "RealBranchComplexInput",
    "SearchResult", "SearchState", "SegmentedCircuit", "ShapeError",
    "TooLarge", "WorkerError", "anneal", "build_segmented_circuit", "cayley_tree", "cost",
    "csd_gate_count", "csd_step", "decompose", "dtqw_step", "evaluate",
    "expand_to_power_of_two", "export_gatelist", "export_qasm_like",
    "invert_permutation", "is_unitary", "leaf_decomposition",
    "matrix_to_perm_list", "parallel_search", "parse_gatelist",
    "perm_list_to_matrix", "qft_matrix", "qubit_perm_to_full_perm",
    "qubit_perm_to_swap_circuit", "random_orthogonal",
    "random_orthogonal_sparse", "random_unitary", "reduce_circuit",
    "select_qubit_permutation", "sparse_orthogonal_fixture", "star_graph",
    "swap_gate_count",
]
