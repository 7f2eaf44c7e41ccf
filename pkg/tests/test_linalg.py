import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csdopt.benchgen import qft_matrix
from csdopt.errors import InvalidPermutation, NotUnitary, ShapeError
from csdopt.linalg import (compose_permutations, expand_to_power_of_two,
                           invert_permutation, is_unitary,
                           matrix_to_perm_list, perm_list_to_matrix,
                           permutation_cycles, qubit_perm_to_full_perm,
                           swap_gate_count, unitarity_deviation)


def random_perm(rng, m):
    return tuple(int(v) + 1 for v in rng.permutation(m))


class TestPermListToMatrix:
    def test_worked_example(self):
        # {2,1,4,3} -> rows (0100),(1000),(0001),(0010)
        expected = np.array([
            [0, 1, 0, 0],
            [1, 0, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
        ], dtype=float)
        assert np.array_equal(perm_list_to_matrix((2, 1, 4, 3)), expected)

    def test_identity(self):
        assert np.array_equal(perm_list_to_matrix((1, 2, 3)), np.eye(3))

    def test_definition_entry_by_entry(self):
        # independent oracle: P[i,j] = 1 iff p[i] == j, built elementwise
        p = (3, 1, 2)
        P = perm_list_to_matrix(p)
        for i in range(3):
            for j in range(3):
                assert P[i, j] == (1.0 if p[i] == j + 1 else 0.0)

    @pytest.mark.parametrize("bad", [(1, 1, 3), (0, 1, 2), (1, 2, 4), ()])
    def test_invalid(self, bad):
        with pytest.raises(InvalidPermutation):
            perm_list_to_matrix(bad)

    def test_round_trip_random(self):
        rng = np.random.default_rng(0)
        for m in (2, 3, 8, 64, 256):
            p = random_perm(rng, m)
            assert matrix_to_perm_list(perm_list_to_matrix(p)) == p

    def test_matrix_to_perm_list_rejects_non_permutation(self):
        with pytest.raises(InvalidPermutation):
            matrix_to_perm_list(np.ones((2, 2)))
        with pytest.raises(ShapeError):
            matrix_to_perm_list(np.ones((2, 3)))

    def test_inverse_is_transpose(self):
        rng = np.random.default_rng(1)
        p = random_perm(rng, 16)
        P = perm_list_to_matrix(p)
        assert np.array_equal(P @ P.T, np.eye(16))
        assert matrix_to_perm_list(P.T) == invert_permutation(p)


class TestQubitPermToFullPerm:
    def test_identity(self):
        for n in (1, 2, 3, 5):
            assert qubit_perm_to_full_perm(tuple(range(1, n + 1))) == \
                tuple(range(1, 2 ** n + 1))

    def test_two_qubit_swap(self):
        assert qubit_perm_to_full_perm((2, 1)) == (1, 3, 2, 4)

    def test_three_cycle_against_bit_relabelling(self):
        # brute force: wire j of the new label takes the bit wire q[j] had
        q = (3, 1, 2)
        n = 3
        got = qubit_perm_to_full_perm(q)
        for i in range(8):
            bits = [(i >> (n - 1 - j)) & 1 for j in range(n)]
            new_bits = [bits[q[j] - 1] for j in range(n)]
            v = 0
            for b in new_bits:
                v = (v << 1) | b
            assert got[i] == v + 1

    def test_homomorphism(self):
        # lifting respects composition; the bit-gather convention reverses
        # the order of the factors
        rng = np.random.default_rng(7)
        for n in (2, 3, 4, 6):
            for _ in range(5):
                q1 = random_perm(rng, n)
                q2 = random_perm(rng, n)
                lifted = qubit_perm_to_full_perm(compose_permutations(q1, q2))
                composed = compose_permutations(
                    qubit_perm_to_full_perm(q2), qubit_perm_to_full_perm(q1))
                assert lifted == composed

    def test_invalid(self):
        with pytest.raises(InvalidPermutation):
            qubit_perm_to_full_perm((1, 1))


class TestSwapGateCount:
    def test_identity(self):
        assert swap_gate_count((1, 2, 3, 4)) == 0

    def test_three_cycle(self):
        assert swap_gate_count((3, 1, 2)) == 2

    def test_two_transpositions(self):
        # verify by composing the two swaps and comparing matrices
        q = (2, 1, 4, 3)
        assert swap_gate_count(q) == 2
        s1 = perm_list_to_matrix((2, 1, 3, 4))
        s2 = perm_list_to_matrix((1, 2, 4, 3))
        assert np.array_equal(s1 @ s2, perm_list_to_matrix(q))

    def test_transpose_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            q = random_perm(rng, 6)
            assert swap_gate_count(q) == swap_gate_count(invert_permutation(q))

    @given(st.permutations(list(range(1, 7))))
    @settings(max_examples=60, deadline=None)
    def test_bounds(self, q):
        q = tuple(q)
        n = len(q)
        s = swap_gate_count(q)
        assert 0 <= s <= n - 1
        single_cycle = len(permutation_cycles(q)) == 1
        assert (s == n - 1) == single_cycle


class TestExpandToPowerOfTwo:
    def test_walk_dimension(self):
        rng = np.random.default_rng(5)
        q, _ = np.linalg.qr(rng.standard_normal((42, 42)))
        out = expand_to_power_of_two(q)
        assert out.shape == (64, 64)
        assert np.array_equal(out[:42, :42], q)

    def test_power_of_two_unchanged(self):
        u = np.eye(8)
        assert expand_to_power_of_two(u) is u

    def test_identity_padding(self):
        assert np.array_equal(expand_to_power_of_two(np.eye(3)), np.eye(4))

    def test_preserves_unitarity_and_fixes_padding(self):
        rng = np.random.default_rng(6)
        q, _ = np.linalg.qr(rng.standard_normal((5, 5)) +
                            1j * rng.standard_normal((5, 5)))
        out = expand_to_power_of_two(q)
        assert unitarity_deviation(out) < 1e-12
        for i in range(5, 8):
            e = np.zeros(8)
            e[i] = 1.0
            assert np.array_equal(out @ e, e)

    def test_rejects_non_unitary(self):
        with pytest.raises(NotUnitary):
            expand_to_power_of_two(np.ones((3, 3)))


class TestIsUnitary:
    def test_identity(self):
        assert is_unitary(np.eye(4), 1e-10)

    def test_qft(self):
        assert is_unitary(qft_matrix(8), 1e-10)

    def test_constructed_violation(self):
        m = np.eye(4)
        m[0, 0] = 2.0
        assert not is_unitary(m, 1e-10)

    def test_non_square(self):
        with pytest.raises(ShapeError):
            is_unitary(np.ones((2, 3)))
