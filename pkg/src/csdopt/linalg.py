"""Permutation calculus, unitarity checks, and power-of-two expansion.

Conventions used throughout the package:

* Permutation lists are 1-based: a permutation ``p`` of ``{1..m}`` maps
  position ``i`` to ``p[i-1]``, and corresponds to the matrix
  ``P[i, j] = 1 iff p[i] == j`` (1-based indices).
* Qubit 1 is the most significant bit of a basis-state index, so basis
  state ``i`` (0-based) assigns qubit ``j`` the bit ``(i >> (n - j)) & 1``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidPermutation, NotUnitary, ShapeError

UNITARY_TOL = 1e-10


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    """True iff ``max |M M^dag - I| <= tol``. Raises ShapeError if non-square."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return unitarity_deviation(m) <= tol


def unitarity_deviation(matrix: np.ndarray) -> float:
    m = np.asarray(matrix)
    d = m @ m.conj().T - np.eye(m.shape[0])
    return float(np.abs(d).max())


def assert_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    dev = unitarity_deviation(m)
    if dev > tol:
        raise NotUnitary(dev, tol)
    return m


def validate_permutation(perm: Sequence[int]) -> np.ndarray:
    """Check that ``perm`` is a 1-based bijection; return it 0-based."""
    p = np.asarray(perm, dtype=np.intp)
    m = len(p)
    if m == 0:
        raise InvalidPermutation("empty permutation")
    seen = np.zeros(m, dtype=bool)
    for v in p:
        if v < 1 or v > m:
            raise InvalidPermutation(f"index {v} out of range 1..{m}")
        if seen[v - 1]:
            raise InvalidPermutation(f"duplicate index {v}")
        seen[v - 1] = True
    return p - 1


def invert_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    """Inverse of a 1-based permutation list."""
    p0 = validate_permutation(perm)
    inv = np.empty_like(p0)
    inv[p0] = np.arange(len(p0))
    return tuple(int(v) + 1 for v in inv)


def compose_permutations(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Composition r with r[i] = q[p[i]] (apply ``p`` first), 1-based."""
    p0 = validate_permutation(p)
    q0 = validate_permutation(q)
    if len(p0) != len(q0):
        raise InvalidPermutation("length mismatch")
    return tuple(int(v) + 1 for v in q0[p0])


def perm_list_to_matrix(perm: Sequence[int]) -> np.ndarray:
    """Dense matrix P with P[i, j] = 1 iff perm maps i to j (1-based)."""
    p0 = validate_permutation(perm)
    m = len(p0)
    out = np.zeros((m, m))
    out[np.arange(m), p0] = 1.0
    return out


def matrix_to_perm_list(matrix: np.ndarray) -> tuple[int, ...]:
    """Inverse of :func:`perm_list_to_matrix`."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    ones = np.abs(m - 1.0) < 1e-12
    zeros = np.abs(m) < 1e-12
    if not np.all(ones | zeros) or not np.all(ones.sum(axis=1) == 1) \
            or not np.all(ones.sum(axis=0) == 1):
        raise InvalidPermutation("matrix is not a permutation matrix")
    return tuple(int(j) + 1 for j in np.argmax(ones, axis=1))


def apply_permutation_similarity(matrix: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Compute P M P^T without materialising P (gather on rows and columns)."""
    p0 = validate_permutation(perm)
    m = np.asarray(matrix)
    if m.shape[0] != len(p0):
        raise ShapeError("permutation length does not match matrix dimension")
    return m[np.ix_(p0, p0)]


def qubit_perm_to_full_perm(q: Sequence[int]) -> tuple[int, ...]:
    """Lift an n-wire qubit permutation to a 2^n-element permutation list.

    Wire ``j`` of the output label carries the bit that wire ``q[j]`` held in
    the input label (qubit 1 = most significant bit).  Under this gather
    convention lifting reverses composition order:
    lift(q1 . q2) = lift(q2) . lift(q1).
    """
    q0 = validate_permutation(q)
    n = len(q0)
    m = 1 << n
    shifts_src = n - 1 - q0            # bit position of source wire
    out = np.zeros(m, dtype=np.intp)
    for j in range(n):
        bit = (np.arange(m) >> shifts_src[j]) & 1
        out |= bit << (n - 1 - j)
    return tuple(int(v) + 1 for v in out)


def permutation_cycles(perm: Sequence[int]) -> list[list[int]]:
    """Cycle decomposition (1-based values), fixed points included."""
    p0 = validate_permutation(perm)
    seen = np.zeros(len(p0), dtype=bool)
    cycles = []
    for i in range(len(p0)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = p0[j]
        cycles.append(cyc)
    return cycles


def swap_gate_count(q: Sequence[int]) -> int:
    """Minimal number of swap gates realising a qubit permutation.

    Equals n minus the number of cycles (fixed points count as cycles), so
    it is 0 for the identity and at most n - 1.
    """
    return len(q) - len(permutation_cycles(q))


def expand_to_power_of_two(matrix: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    """Pad a unitary to the next power-of-two dimension with an identity block.

    Returns the input unchanged when its dimension already is a power of two.
    """
    m = assert_unitary(matrix, tol)
    dim = m.shape[0]
    full = 1 << max(dim - 1, 0).bit_length() if dim > 1 else 1
    if full == dim:
        return m
    out = np.eye(full, dtype=m.dtype)
    out[:dim, :dim] = m
    return out
