"""Jointly extended problems built from a base problem and component problems.

Each entry of the base fitting matrix becomes a block of the extended one:
an ``x`` becomes an all-``x`` block, a ``1`` in column ``j`` becomes the
fitting matrix of component ``j``, and a ``0`` becomes an all-zero block.
Block-row ``i`` is as tall as the component demanded by base row ``i``;
block-column ``j`` is as wide as component ``j`` has messages.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gf2
from .problem import ONE, UNKNOWN, ZERO, ParseError, TriMatrix, read_tri


@dataclass(frozen=True)
class BlockLayout:
    base_rows: int
    base_cols: int
    row_heights: tuple[int, ...]
    col_widths: tuple[int, ...]
    demand_of_blockrow: tuple[int, ...]
    ones_per_col: tuple[int, ...]

    @property
    def n_rows(self) -> int:
        return sum(self.row_heights)

    @property
    def n_cols(self) -> int:
        return sum(self.col_widths)

    def row_offsets(self) -> list[int]:
        return gf2.block_offsets(self.row_heights)

    def col_offsets(self) -> list[int]:
        return gf2.block_offsets(self.col_widths)

    def row_slice(self, i: int) -> slice:
        off = self.row_offsets()
        return slice(off[i], off[i + 1])

    def col_slice(self, j: int) -> slice:
        off = self.col_offsets()
        return slice(off[j], off[j + 1])


@dataclass(frozen=True)
class ExtensionSpec:
    base: TriMatrix
    components: tuple[TriMatrix, ...]
    layout: BlockLayout

    @classmethod
    def of(cls, base: TriMatrix, components: Sequence[TriMatrix]) -> ExtensionSpec:
        return cls(base, tuple(components), make_layout(base, components))

    @property
    def fitting(self) -> TriMatrix:
        return build_extension(self.base, self.components)[0]


def make_layout(base: TriMatrix, components: Sequence[TriMatrix]) -> BlockLayout:
    n_b, m_b = base.shape
    if len(components) != m_b:
        raise ValueError(f"base has {m_b} columns but {len(components)} components were given")
    demands = []
    for i, row in enumerate(base.cells):
        hits = np.nonzero(row == ONE)[0]
        if hits.size != 1:
            raise ValueError(f"base row {i + 1} has {hits.size} ones, expected exactly one")
        demands.append(int(hits[0]))
    ones = tuple(int(np.count_nonzero(base.cells[:, j] == ONE)) for j in range(m_b))
    if 0 in ones:
        raise ValueError(f"base column {ones.index(0) + 1} is not demanded by any base row")
    return BlockLayout(
        base_rows=n_b,
        base_cols=m_b,
        row_heights=tuple(components[j].n_rows for j in demands),
        col_widths=tuple(c.n_cols for c in components),
        demand_of_blockrow=tuple(demands),
        ones_per_col=ones,
    )


def build_extension(base: TriMatrix, components: Sequence[TriMatrix]) -> tuple[TriMatrix, BlockLayout]:
    """Fitting matrix of the joint extension together with its block layout."""
    layout = make_layout(base, components)
    blocks = []
    for i in range(layout.base_rows):
        h = layout.row_heights[i]
        brow = []
        for j, comp in enumerate(components):
            v = base.cells[i, j]
            if v == ONE:
                brow.append(comp.cells)
            else:
                brow.append(np.full((h, comp.n_cols), UNKNOWN if v == UNKNOWN else ZERO, dtype=np.int8))
        blocks.append(brow)
    cells = gf2.assemble_blocks(blocks, layout.row_heights, layout.col_widths)
    return TriMatrix(cells), layout


def recognize_extension(fm: TriMatrix, base: TriMatrix, components: Sequence[TriMatrix]) -> bool:
    """True iff ``fm`` is exactly the extension of ``base`` by ``components``."""
    try:
        built, _ = build_extension(base, components)
    except ValueError:
        return False
    return built == fm


def block_view(m, layout: BlockLayout, i: int, j: int, row_heights: Sequence[int] | None = None):
    """Copy of block ``(i, j)`` (0-based) of a fitting matrix or binary matrix.

    ``row_heights`` overrides the layout's block-row heights, e.g. for an
    encoder whose block-rows follow its own row counts.
    """
    heights = layout.row_heights if row_heights is None else tuple(row_heights)
    if isinstance(m, TriMatrix):
        return TriMatrix(gf2.extract_block(m.cells, heights, layout.col_widths, i, j))
    return gf2.extract_block(np.asarray(m), heights, layout.col_widths, i, j)


# Manifest ---------------------------------------------------------------------


def parse_manifest(text: str, root: Path = Path(".")) -> tuple[Path, list[Path]]:
    """Parse ``base=<path>`` followed by ``component=<path>`` lines.

    Relative paths resolve against ``root`` (normally the manifest's folder).
    """
    base, comps = None, []
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not val:
            raise ParseError(f"expected key=value, got {line!r}", line=ln)
        if key == "base":
            if base is not None:
                raise ParseError("duplicate 'base' entry", line=ln)
            if comps:
                raise ParseError("'base' must precede 'component' entries", line=ln)
            base = root / val
        elif key == "component":
            comps.append(root / val)
        else:
            raise ParseError(f"unknown key {key!r}", line=ln)
    if base is None:
        raise ParseError("manifest has no 'base' entry")
    if not comps:
        raise ParseError("manifest has no 'component' entries")
    return base, comps


def load_manifest(path: str | Path) -> ExtensionSpec:
    path = Path(path)
    base, comps = parse_manifest(path.read_text(encoding="utf-8"), path.parent)
    return ExtensionSpec.of(read_tri(base), [read_tri(c) for c in comps])
