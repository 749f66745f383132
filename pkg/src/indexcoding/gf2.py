"""Dense GF(2) linear algebra on numpy ``uint8`` arrays.

Every binary matrix in the package is a 2-D ``uint8`` array with entries in
{0, 1}.  Addition is XOR and multiplication is AND, so row reduction only ever
XORs rows together.  Pivots are always chosen leftmost-first, which keeps
elimination (and every witness derived from it) deterministic.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Permutation",
    "as_bin",
    "identity",
    "zeros",
    "matmul",
    "rref",
    "rank",
    "solve_left",
    "row_space_contains",
    "independent_rows",
    "apply_perm",
    "assemble_blocks",
    "extract_block",
    "block_offsets",
]


def as_bin(m, *, name: str = "matrix") -> np.ndarray:
    """Validate ``m`` as a binary matrix and return it as a ``uint8`` array."""
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column")
    if a.dtype != np.uint8:
        if not np.all((a == 0) | (a == 1)):
            raise ValueError(f"{name} has entries outside {{0, 1}}")
        a = a.astype(np.uint8)
    elif a.max(initial=0) > 1:
        raise ValueError(f"{name} has entries outside {{0, 1}}")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.uint8)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.uint8)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over GF(2)."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return ((a.astype(np.int64) @ b.astype(np.int64)) & 1).astype(np.uint8)


def rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2).

    Returns the reduced matrix and the list of pivot columns (one per nonzero
    row, ascending).  Pivot search scans columns left to right and takes the
    first row at or below the current pivot row with a 1.
    """
    r = np.array(m, dtype=np.uint8, copy=True)
    n_rows, n_cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        hits = np.nonzero(r[row:, col])[0]
        if hits.size == 0:
            continue
        p = row + int(hits[0])
        if p != row:
            r[[row, p]] = r[[p, row]]
        others = np.nonzero(r[:, col])[0]
        for o in others:
            if o != row:
                r[o] ^= r[row]
        pivots.append(col)
        row += 1
    return r, pivots


def rank(m) -> int:
    """GF(2) rank of ``m``; a matrix with no rows has rank 0."""
    a = np.asarray(m)
    if a.ndim == 2 and a.shape[0] == 0:
        return 0
    _, pivots = rref(as_bin(m))
    return len(pivots)


def solve_left(g, ones: Iterable[int], zeros: Iterable[int]) -> np.ndarray | None:
    """Find a row vector ``d`` such that ``d @ g`` is 1 on ``ones`` and 0 on ``zeros``.

    Columns outside ``ones | zeros`` are unconstrained.  Returns ``None`` when
    no such ``d`` exists.  Free variables are set to 0 after leftmost-pivot
    elimination, so the answer is reproducible.
    """
    g = as_bin(g, name="g")
    ones, zeros = sorted(set(ones)), sorted(set(zeros))
    if set(ones) & set(zeros):
        raise ValueError("ones and zeros must be disjoint")
    n_cols = g.shape[1]
    for c in ones + zeros:
        if not 0 <= c < n_cols:
            raise IndexError(f"column index {c} out of range for {n_cols} columns")
    cols = sorted(ones + zeros)
    want = np.array([1 if c in set(ones) else 0 for c in cols], dtype=np.uint8)
    # One equation per constrained column: sum_k d_k g[k, c] = want_c.
    system = np.concatenate([g[:, cols].T, want[:, None]], axis=1)
    reduced, pivots = rref(system)
    r = g.shape[0]
    if r in pivots:
        return None
    d = np.zeros(r, dtype=np.uint8)
    for i, p in enumerate(pivots):
        d[p] = reduced[i, r]
    return d


def row_space_contains(m, v) -> bool:
    """True iff ``v`` lies in the row space of ``m``."""
    m = as_bin(m)
    v = np.asarray(v, dtype=np.uint8).reshape(-1)
    if v.shape[0] != m.shape[1]:
        raise ValueError(f"vector of length {v.shape[0]} vs {m.shape[1]} columns")
    ones = np.nonzero(v)[0].tolist()
    zeros = np.nonzero(v == 0)[0].tolist()
    return solve_left(m, ones, zeros) is not None


def independent_rows(m) -> list[int]:
    """Indices of the greedily chosen independent rows of ``m`` (scan top to bottom)."""
    m = as_bin(m)
    basis: dict[int, int] = {}
    chosen = []
    for i, row in enumerate(m):
        v = int("".join(map(str, row.tolist())), 2)
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                chosen.append(i)
                break
            v ^= basis[top]
    return chosen


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``range(size)`` stored as an index map.

    ``mapping[k]`` is the source index placed at position ``k`` when the
    permutation is applied, i.e. ``apply_perm(m, p, "rows")`` equals
    ``m[list(p.mapping)]``.
    """

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapping", tuple(int(i) for i in self.mapping))
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"not a permutation: {self.mapping}")

    @classmethod
    def identity(cls, size: int) -> Permutation:
        return cls(tuple(range(size)))

    @property
    def size(self) -> int:
        return len(self.mapping)

    def inverse(self) -> Permutation:
        inv = [0] * self.size
        for pos, src in enumerate(self.mapping):
            inv[src] = pos
        return Permutation(tuple(inv))

    def compose(self, other: Permutation) -> Permutation:
        """Permutation equivalent to applying ``self`` first and then ``other``."""
        if other.size != self.size:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.mapping[k] for k in other.mapping))

    def matrix(self) -> np.ndarray:
        """Row-permutation matrix ``P`` with ``P @ m == apply_perm(m, self, 'rows')``."""
        p = zeros(self.size, self.size)
        p[np.arange(self.size), list(self.mapping)] = 1
        return p


def apply_perm(m: np.ndarray, p: Permutation, axis: str = "rows") -> np.ndarray:
    """Reorder rows or columns of ``m`` by ``p``.  Works for any 2-D array."""
    if axis not in ("rows", "cols"):
        raise ValueError(f"axis must be 'rows' or 'cols', got {axis!r}")
    length = m.shape[0] if axis == "rows" else m.shape[1]
    if p.size != length:
        raise ValueError(f"permutation of size {p.size} applied to {axis} of length {length}")
    idx = list(p.mapping)
    return m[idx] if axis == "rows" else m[:, idx]


def block_offsets(sizes: Sequence[int]) -> list[int]:
    out = [0]
    for s in sizes:
        out.append(out[-1] + int(s))
    return out


def assemble_blocks(
    blocks: Sequence[Sequence[np.ndarray]],
    row_heights: Sequence[int],
    col_widths: Sequence[int],
) -> np.ndarray:
    """Concatenate a grid of blocks; block ``(i, j)`` must be ``row_heights[i] x col_widths[j]``."""
    if len(blocks) != len(row_heights):
        raise ValueError(f"{len(blocks)} block-rows given, layout has {len(row_heights)}")
    for i, brow in enumerate(blocks):
        if len(brow) != len(col_widths):
            raise ValueError(f"block-row {i + 1} has {len(brow)} blocks, layout has {len(col_widths)}")
        for j, b in enumerate(brow):
            if b.shape != (row_heights[i], col_widths[j]):
                raise ValueError(
                    f"block ({i + 1},{j + 1}) has shape {b.shape}, "
                    f"expected {(row_heights[i], col_widths[j])}"
                )
    return np.block([[np.asarray(b) for b in brow] for brow in blocks])


def extract_block(
    m: np.ndarray,
    row_heights: Sequence[int],
    col_widths: Sequence[int],
    i: int,
    j: int,
) -> np.ndarray:
    """Copy of block ``(i, j)`` (0-based) of ``m`` under the given layout."""
    if not 0 <= i < len(row_heights) or not 0 <= j < len(col_widths):
        raise IndexError(f"block ({i}, {j}) out of range")
    ro, co = block_offsets(row_heights), block_offsets(col_widths)
    if ro[-1] != m.shape[0] or co[-1] != m.shape[1]:
        raise ValueError(f"layout {ro[-1]}x{co[-1]} does not match matrix {m.shape}")
    return m[ro[i] : ro[i + 1], co[j] : co[j + 1]].copy()
