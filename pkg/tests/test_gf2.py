from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import binm, oracle_rank
from indexcoding import gf2
from indexcoding.gf2 import Permutation

SEED = 20240611


def bin_matrices(max_rows: int = 6, max_cols: int = 6):
    shapes = st.tuples(st.integers(1, max_rows), st.integers(1, max_cols))
    return shapes.flatmap(lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


class TestRank:
    def test_identity(self) -> None:
        assert gf2.rank(gf2.identity(3)) == 3

    def test_equal_rows(self) -> None:
        assert gf2.rank(np.ones((2, 2), dtype=np.uint8)) == 1

    def test_component_completion(self) -> None:
        assert gf2.rank(binm("ex5_f1.bin")) == 3

    @given(bin_matrices())
    def test_matches_oracle(self, m: np.ndarray) -> None:
        assert gf2.rank(m) == oracle_rank(m)
        assert gf2.rank(m) <= min(m.shape)

    def test_invariant_under_permutations(self) -> None:
        rng = np.random.default_rng(SEED)
        for _ in range(200):
            m = rng.integers(0, 2, size=(6, 6), dtype=np.uint8)
            p = Permutation(tuple(rng.permutation(6)))
            q = Permutation(tuple(rng.permutation(6)))
            pm = gf2.apply_perm(gf2.apply_perm(m, p, "rows"), q, "cols")
            assert gf2.rank(pm) == gf2.rank(m)

    def test_rejects_non_binary(self) -> None:
        with pytest.raises(ValueError):
            gf2.rank(np.array([[2, 0]]))


class TestRref:
    @given(bin_matrices())
    def test_pivots_are_unit_columns(self, m: np.ndarray) -> None:
        r, pivots = gf2.rref(m)
        assert pivots == sorted(pivots)
        for i, c in enumerate(pivots):
            col = np.zeros(m.shape[0], dtype=np.uint8)
            col[i] = 1
            assert np.array_equal(r[:, c], col)
        assert not r[len(pivots):].any()


class TestSolveLeft:
    def test_identity(self) -> None:
        d = gf2.solve_left(gf2.identity(2), [0], [1])
        assert d.tolist() == [1, 0]

    def test_forced_contradiction(self) -> None:
        assert gf2.solve_left(np.array([[1, 1]], dtype=np.uint8), [0], [1]) is None

    def test_receiver_of_extended_code(self) -> None:
        g = binm("ex5_encoder.bin")
        ones, zeros = [4], [2, 3, 6, 7, 8]
        d = gf2.solve_left(g, ones, zeros)
        assert d is not None
        found = any(
            all(((np.array(v) @ g) % 2)[c] == 1 for c in ones)
            and not ((np.array(v) @ g) % 2)[zeros].any()
            for v in itertools.product((0, 1), repeat=g.shape[0])
        )
        assert found

    def test_index_out_of_range(self) -> None:
        with pytest.raises(IndexError):
            gf2.solve_left(gf2.identity(2), [5], [])

    def test_overlap_rejected(self) -> None:
        with pytest.raises(ValueError):
            gf2.solve_left(gf2.identity(2), [0], [0])

    @settings(max_examples=150)
    @given(bin_matrices(5, 5), st.data())
    def test_solution_satisfies_pattern_and_matches_search(self, g: np.ndarray, data) -> None:
        cols = list(range(g.shape[1]))
        labels = data.draw(st.lists(st.sampled_from(["1", "0", "*"]), min_size=len(cols), max_size=len(cols)))
        ones = [c for c, s in zip(cols, labels) if s == "1"]
        zeros = [c for c, s in zip(cols, labels) if s == "0"]
        d = gf2.solve_left(g, ones, zeros)
        feasible = False
        for v in itertools.product((0, 1), repeat=g.shape[0]):
            p = (np.array(v) @ g) % 2
            if all(p[c] == 1 for c in ones) and not p[zeros].any():
                feasible = True
                break
        assert (d is not None) == feasible
        if d is not None:
            p = gf2.matmul(d[None, :], g)[0]
            assert all(p[c] == 1 for c in ones) and not p[zeros].any()


class TestRowSpace:
    def test_trivial(self) -> None:
        assert gf2.row_space_contains(gf2.identity(2), [1, 1])
        assert not gf2.row_space_contains(np.array([[1, 0]], dtype=np.uint8), [0, 1])

    def test_dependent_row_of_completion(self) -> None:
        f = binm("ex5_f1.bin")
        assert gf2.row_space_contains(f[:3], f[3])

    def test_dimension_mismatch(self) -> None:
        with pytest.raises(ValueError):
            gf2.row_space_contains(gf2.identity(2), [1, 0, 1])

    @given(bin_matrices(5, 5), st.data())
    def test_agrees_with_rank(self, m: np.ndarray, data) -> None:
        v = np.array(data.draw(st.lists(st.integers(0, 1), min_size=m.shape[1], max_size=m.shape[1])), dtype=np.uint8)
        expected = oracle_rank(np.vstack([m, v])) == oracle_rank(m)
        assert gf2.row_space_contains(m, v) == expected


class TestIndependentRows:
    @given(bin_matrices())
    def test_greedy_basis(self, m: np.ndarray) -> None:
        idx = gf2.independent_rows(m)
        assert idx == sorted(idx)
        assert len(idx) == gf2.rank(m)
        assert gf2.rank(m[idx]) == len(idx)


class TestPermutation:
    def test_identity_unchanged(self) -> None:
        m = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
        assert np.array_equal(gf2.apply_perm(m, Permutation.identity(2), "rows"), m)

    def test_swap(self) -> None:
        out = gf2.apply_perm(gf2.identity(2), Permutation((1, 0)), "rows")
        assert out.tolist() == [[0, 1], [1, 0]]

    def test_inverse_law(self) -> None:
        rng = np.random.default_rng(SEED)
        for _ in range(100):
            n = int(rng.integers(1, 7))
            m = rng.integers(0, 2, size=(n, 4), dtype=np.uint8)
            p = Permutation(tuple(rng.permutation(n)))
            back = gf2.apply_perm(gf2.apply_perm(m, p, "rows"), p.inverse(), "rows")
            assert np.array_equal(back, m)

    def test_matrix_and_compose(self) -> None:
        rng = np.random.default_rng(SEED + 1)
        for _ in range(50):
            p = Permutation(tuple(rng.permutation(5)))
            q = Permutation(tuple(rng.permutation(5)))
            m = rng.integers(0, 2, size=(5, 3), dtype=np.uint8)
            assert np.array_equal(gf2.matmul(p.matrix(), m), gf2.apply_perm(m, p, "rows"))
            two = gf2.apply_perm(gf2.apply_perm(m, p, "rows"), q, "rows")
            assert np.array_equal(gf2.apply_perm(m, p.compose(q), "rows"), two)

    def test_invalid(self) -> None:
        with pytest.raises(ValueError):
            Permutation((0, 0))
        with pytest.raises(ValueError):
            gf2.apply_perm(gf2.identity(3), Permutation.identity(2), "rows")


class TestBlocks:
    def test_single_block(self) -> None:
        b = np.array([[1]], dtype=np.uint8)
        assert np.array_equal(gf2.assemble_blocks([[b]], [1], [1]), b)

    def test_round_trip(self) -> None:
        rng = np.random.default_rng(SEED)
        for _ in range(100):
            heights = [int(h) for h in rng.integers(1, 4, size=int(rng.integers(1, 4)))]
            widths = [int(w) for w in rng.integers(1, 4, size=int(rng.integers(1, 4)))]
            blocks = [[rng.integers(0, 2, size=(h, w), dtype=np.uint8) for w in widths] for h in heights]
            m = gf2.assemble_blocks(blocks, heights, widths)
            for i, j in itertools.product(range(len(heights)), range(len(widths))):
                assert np.array_equal(gf2.extract_block(m, heights, widths, i, j), blocks[i][j])

    def test_mismatch_names_block(self) -> None:
        blocks = [[gf2.zeros(1, 1), gf2.zeros(2, 1)]]
        with pytest.raises(ValueError, match=r"\(1,2\)"):
            gf2.assemble_blocks(blocks, [1], [1, 1])
