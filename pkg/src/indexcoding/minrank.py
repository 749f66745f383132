"""Exact minrank, upper-triangulability, and decoder search.

``exact_minrank`` is exhaustive: it walks every completion of the fitting
matrix, pruning subtrees that already reach the best rank found so far.
Pruning never discards a completion that could beat or lexicographically
precede the reported witness, so the result equals a full enumeration.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gf2
from .gf2 import Permutation
from .problem import ONE, UNKNOWN, ZERO, TriMatrix, completes

DEFAULT_MAX_UNKNOWNS = 24


class TooManyUnknowns(ValueError):
    def __init__(self, count: int, cap: int):
        self.count, self.cap = count, cap
        super().__init__(f"{count} unknown entries exceed the cap of {cap}")


@dataclass(frozen=True)
class MinrankResult:
    value: int
    witness: np.ndarray


@dataclass(frozen=True)
class TriangulableWitness:
    """Square submatrix ``(row_indices, col_indices)`` plus the permutations
    that make it upper-triangular with a unit diagonal.

    ``row_perm``/``col_perm`` act on the positions of the selected submatrix.
    Indices are 0-based.
    """

    row_indices: tuple[int, ...]
    col_indices: tuple[int, ...]
    row_perm: Permutation
    col_perm: Permutation

    @property
    def size(self) -> int:
        return len(self.row_indices)

    def one_based(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(i + 1 for i in self.row_indices), tuple(j + 1 for j in self.col_indices)

    def arranged(self, fm: TriMatrix) -> np.ndarray:
        """The selected submatrix of ``fm`` with both permutations applied."""
        sub = fm.submatrix(self.row_indices, self.col_indices).cells
        return gf2.apply_perm(gf2.apply_perm(sub, self.row_perm, "rows"), self.col_perm, "cols")

    def certify(self, fm: TriMatrix) -> bool:
        a = self.arranged(fm)
        p = a.shape[0]
        return bool(np.all(np.diag(a) == ONE) and np.all(a[np.tril_indices(p, -1)] == ZERO))


# Minrank --------------------------------------------------------------------


def _row_candidates(row: np.ndarray) -> list[int]:
    """All completions of one row as bitmasks, in lexicographic order (0 before 1)."""
    m = len(row)
    base = 0
    for j, v in enumerate(row):
        if v == ONE:
            base |= 1 << (m - 1 - j)
    unknown_bits = [1 << (m - 1 - j) for j, v in enumerate(row) if v == UNKNOWN]
    out = []
    for assignment in itertools.product((0, 1), repeat=len(unknown_bits)):
        v = base
        for b, bit in zip(assignment, unknown_bits):
            if b:
                v |= bit
        out.append(v)
    return out


def _reduce(v: int, basis: dict[int, int]) -> int:
    while v:
        top = v.bit_length() - 1
        b = basis.get(top)
        if b is None:
            return v
        v ^= b
    return 0


def exact_minrank(fm: TriMatrix, max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> MinrankResult:
    """Minimum GF(2) rank over all completions of ``fm``.

    The witness is the lexicographically first minimizing completion, with
    unknowns ordered row-major and 0 tried before 1.
    """
    if fm.n_unknowns > max_unknowns:
        raise TooManyUnknowns(fm.n_unknowns, max_unknowns)
    rows = [_row_candidates(r) for r in fm.cells]
    n = len(rows)
    best = [min(fm.n_rows, fm.n_cols) + 1]
    best_choice: list[int] = []
    choice = [0] * n
    basis: dict[int, int] = {}

    def dfs(i: int, r: int) -> None:
        if r >= best[0]:
            return
        if i == n:
            best[0] = r
            best_choice[:] = choice
            return
        for v in rows[i]:
            choice[i] = v
            red = _reduce(v, basis)
            if red:
                top = red.bit_length() - 1
                basis[top] = red
                dfs(i + 1, r + 1)
                del basis[top]
            else:
                dfs(i + 1, r)

    dfs(0, 0)
    m = fm.n_cols
    witness = np.array(
        [[(v >> (m - 1 - j)) & 1 for j in range(m)] for v in best_choice], dtype=np.uint8
    )
    return MinrankResult(best[0], witness)


# Upper-triangulability ---------------------------------------------------------


def _triangulate(cells: np.ndarray) -> tuple[list[int], list[int]] | None:
    """Backtracking search for a diagonal ordering; returns (row order, col order)."""
    p = cells.shape[0]
    # column -> rows with a non-zero entry in that column
    support = [frozenset(np.nonzero(cells[:, c] != ZERO)[0].tolist()) for c in range(p)]
    ones = [frozenset(np.nonzero(cells[:, c] == ONE)[0].tolist()) for c in range(p)]

    @lru_cache(maxsize=None)
    def search(rows: frozenset[int], cols: frozenset[int]) -> tuple[tuple[int, int], ...] | None:
        if not rows:
            return ()
        for c in sorted(cols):
            live = support[c] & rows
            if len(live) == 1 and live <= ones[c]:
                (r,) = live
                rest = search(rows - {r}, cols - {c})
                if rest is not None:
                    return ((r, c),) + rest
        return None

    found = search(frozenset(range(p)), frozenset(range(p)))
    if found is None:
        return None
    return [r for r, _ in found], [c for _, c in found]


def is_upper_triangulable(
    fm: TriMatrix,
    rows: Sequence[int] | None = None,
    cols: Sequence[int] | None = None,
) -> TriangulableWitness | None:
    """Witness that ``fm`` (or its ``rows x cols`` submatrix) is upper-triangulable.

    Each step picks a column whose remaining entries are all 0 except a single
    1 and makes that (row, column) the next diagonal position; columns are
    tried in ascending order with full backtracking.
    """
    rows = tuple(range(fm.n_rows)) if rows is None else tuple(sorted(rows))
    cols = tuple(range(fm.n_cols)) if cols is None else tuple(sorted(cols))
    if len(rows) != len(cols):
        raise ValueError(f"submatrix {len(rows)}x{len(cols)} is not square")
    found = _triangulate(fm.submatrix(rows, cols).cells)
    if found is None:
        return None
    row_order, col_order = found
    w = TriangulableWitness(rows, cols, Permutation(tuple(row_order)), Permutation(tuple(col_order)))
    assert w.certify(fm)
    return w


def enumerate_triangulable_submatrices(fm: TriMatrix) -> list[TriangulableWitness]:
    """Every upper-triangulable square submatrix of ``fm``.

    Ordered by descending size, then row indices, then column indices.
    A triangulable submatrix pairs each row with the column of its diagonal 1,
    so only column sets matching the rows' demanded columns are tried when
    every row carries a single 1.
    """
    n, m = fm.shape
    out = []
    for size in range(min(n, m), 0, -1):
        for rows in itertools.combinations(range(n), size):
            for cols in _candidate_cols(fm, rows, size):
                w = is_upper_triangulable(fm, rows, cols)
                if w is not None:
                    out.append(w)
    return out


def _candidate_cols(fm: TriMatrix, rows: tuple[int, ...], size: int):
    ones = [np.nonzero(fm.cells[r] == ONE)[0] for r in rows]
    if all(len(o) == 1 for o in ones):
        cols = {int(o[0]) for o in ones}
        return [tuple(sorted(cols))] if len(cols) == size else []
    return itertools.combinations(range(fm.n_cols), size)


# Decoding ------------------------------------------------------------------------


def find_decoding_matrix(g, fm: TriMatrix, *, diagnostics: dict | None = None) -> np.ndarray | None:
    """A decoder ``D`` with ``D @ g`` completing ``fm``, or ``None``.

    Row ``i`` of ``D`` is ``solve_left(g, {f(i)}, zeros of row i)``.  When no
    decoder exists and ``diagnostics`` is given, ``diagnostics["receiver"]``
    is set to the 0-based index of the first receiver that cannot decode.
    """
    g = gf2.as_bin(g, name="encoder")
    if g.shape[1] != fm.n_cols:
        raise ValueError(f"encoder has {g.shape[1]} columns, fitting matrix has {fm.n_cols}")
    rows = []
    for i, want in enumerate(fm.demands()):
        zeros = np.nonzero(fm.cells[i] == ZERO)[0].tolist()
        d = gf2.solve_left(g, [want], zeros)
        if d is None:
            if diagnostics is not None:
                diagnostics["receiver"] = i
            return None
        rows.append(d)
    d = np.array(rows, dtype=np.uint8)
    assert completes(gf2.matmul(d, g), fm)
    return d


_CHUNK = 1 << 15


def _message_batches(m: int, trials: int | None, seed: int):
    if trials is None:
        total = 1 << m
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            yield ((idx[None, :] >> np.arange(m)[:, None]) & 1).astype(np.uint8)
        return
    rng = np.random.default_rng(seed)
    for start in range(0, trials, _CHUNK):
        yield rng.integers(0, 2, size=(m, min(_CHUNK, trials - start)), dtype=np.uint8)


def simulate_decoding(
    g, d, fm: TriMatrix, trials: int | None = None, seed: int = 0, *, diagnostics: dict | None = None
) -> bool:
    """Run the broadcast for many message vectors and check every receiver.

    ``trials=None`` means all ``2**m`` message vectors, otherwise ``trials``
    vectors drawn uniformly with ``seed``.  Receiver ``i`` forms
    ``row_i(d) . (g x)`` and cancels the side-information terms
    ``sum_{k known} (d g)[i, k] x_k`` before comparing with its wanted message.
    """
    g = gf2.as_bin(g, name="encoder")
    d = gf2.as_bin(d, name="decoder")
    if g.shape[1] != fm.n_cols or d.shape != (fm.n_rows, g.shape[0]):
        raise ValueError(
            f"shapes do not fit: encoder {g.shape}, decoder {d.shape}, fitting matrix {fm.shape}"
        )
    side_coeffs = gf2.matmul(d, g) & (fm.cells == UNKNOWN).astype(np.uint8)
    demands = fm.demands()
    for x in _message_batches(fm.n_cols, trials, seed):
        received = gf2.matmul(d, gf2.matmul(g, x))
        decoded = received ^ gf2.matmul(side_coeffs, x)
        bad = np.nonzero(np.any(decoded != x[demands], axis=1))[0]
        if bad.size:
            if diagnostics is not None:
                diagnostics["receiver"] = int(bad[0])
            return False
    return True
