"""Groupcast index coding problems and their fitting matrices.

A problem has ``m`` messages and an ordered list of receivers; receiver ``i``
wants one message and knows a set of others.  Its fitting matrix has one row
per receiver and one column per message: ``1`` at the wanted message, ``x`` at
each known message and ``0`` elsewhere.

Indices are 0-based in the Python API.  Text formats and printed output are
1-based.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gf2 import as_bin

ZERO, ONE, UNKNOWN = 0, 1, 2
_SYMBOL = {ZERO: "0", ONE: "1", UNKNOWN: "x"}
_VALUE = {v: k for k, v in _SYMBOL.items()}


class ParseError(ValueError):
    """Malformed matrix or problem text.  ``line``/``column`` are 1-based."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class TriMatrix:
    """Immutable matrix over {0, 1, x}.

    ``cells`` is an ``int8`` array holding ``ZERO``, ``ONE`` or ``UNKNOWN``.
    """

    __slots__ = ("_cells",)

    def __init__(self, cells):
        a = np.array(cells, dtype=np.int8, copy=True)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"TriMatrix needs a non-empty 2-D grid, got shape {a.shape}")
        if not np.all((a >= ZERO) & (a <= UNKNOWN)):
            raise ValueError("TriMatrix entries must be ZERO, ONE or UNKNOWN")
        a.setflags(write=False)
        self._cells = a

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> TriMatrix:
        """Build from strings such as ``"1x0"``; spaces are ignored."""
        return cls([[_VALUE[ch] for ch in r.replace(" ", "")] for r in rows])

    @classmethod
    def filled(cls, rows: int, cols: int, value: int) -> TriMatrix:
        return cls(np.full((rows, cols), value, dtype=np.int8))

    @property
    def cells(self) -> np.ndarray:
        return self._cells

    @property
    def shape(self) -> tuple[int, int]:
        return self._cells.shape

    @property
    def n_rows(self) -> int:
        return self._cells.shape[0]

    @property
    def n_cols(self) -> int:
        return self._cells.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._cells, other._cells))

    def __hash__(self) -> int:
        return hash((self.shape, self._cells.tobytes()))

    def __repr__(self) -> str:
        return f"TriMatrix({self.to_text().split()!r})"

    def __str__(self) -> str:
        return self.to_text()

    def to_text(self) -> str:
        return "".join("".join(_SYMBOL[int(v)] for v in row) + "\n" for row in self._cells)

    def unknown_positions(self) -> list[tuple[int, int]]:
        """Row-major list of ``(row, col)`` positions holding ``x``."""
        rs, cs = np.nonzero(self._cells == UNKNOWN)
        return list(zip(rs.tolist(), cs.tolist()))

    @property
    def n_unknowns(self) -> int:
        return int(np.count_nonzero(self._cells == UNKNOWN))

    def fixed_part(self) -> np.ndarray:
        """The completion that sets every ``x`` to 0."""
        return (self._cells == ONE).astype(np.uint8)

    def complete(self, bits: Sequence[int]) -> np.ndarray:
        """Completion assigning ``bits[k]`` to the ``k``-th unknown in row-major order."""
        out = self.fixed_part()
        pos = self.unknown_positions()
        if len(bits) != len(pos):
            raise ValueError(f"{len(bits)} values for {len(pos)} unknowns")
        for (r, c), b in zip(pos, bits):
            out[r, c] = b
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> TriMatrix:
        return TriMatrix(self._cells[np.ix_(list(rows), list(cols))])

    def demands(self) -> list[int]:
        """Column of the single ``1`` in each row; raises if a row has zero or several."""
        out = []
        for i, row in enumerate(self._cells):
            hits = np.nonzero(row == ONE)[0]
            if hits.size != 1:
                raise ParseError(f"row has {hits.size} ones, expected exactly one", line=i + 1)
            out.append(int(hits[0]))
        return out


@dataclass(frozen=True)
class Receiver:
    wants: int
    knows: frozenset[int]


@dataclass(frozen=True)
class ProblemInstance:
    """A normalized groupcast problem: every receiver wants exactly one message."""

    num_messages: int
    receivers: tuple[Receiver, ...]

    def __post_init__(self) -> None:
        m = self.num_messages
        if m < 1:
            raise ValueError("a problem needs at least one message")
        if not self.receivers:
            raise ValueError("a problem needs at least one receiver")
        wanted = set()
        for i, r in enumerate(self.receivers, 1):
            if not 0 <= r.wants < m:
                raise ValueError(f"receiver {i} wants message {r.wants + 1}, outside 1..{m}")
            bad = [k + 1 for k in r.knows if not 0 <= k < m]
            if bad:
                raise ValueError(f"receiver {i} knows messages {bad} outside 1..{m}")
            if r.wants in r.knows:
                raise ValueError(f"receiver {i} wants message {r.wants + 1} it already knows")
            wanted.add(r.wants)
        missing = sorted(set(range(m)) - wanted)
        if missing:
            raise ValueError(f"messages {[k + 1 for k in missing]} are not demanded by any receiver")

    @property
    def num_receivers(self) -> int:
        return len(self.receivers)

    def demand_map(self) -> list[int]:
        return [r.wants for r in self.receivers]


def normalize(
    num_messages: int, receivers: Iterable[tuple[Iterable[int], Iterable[int]]]
) -> ProblemInstance:
    """Split multi-demand receivers into one receiver per wanted message.

    ``receivers`` yields ``(wants, knows)`` pairs of 0-based index collections.
    Output keeps the original receiver order, then ascending demand index.
    """
    out = []
    for i, (wants, knows) in enumerate(receivers, 1):
        wants, knows = sorted(set(wants)), frozenset(knows)
        if not wants:
            raise ValueError(f"receiver {i} wants nothing")
        clash = [w + 1 for w in wants if w in knows]
        if clash:
            raise ValueError(f"receiver {i} wants messages {clash} it already knows")
        out.extend(Receiver(w, knows) for w in wants)
    return ProblemInstance(num_messages, tuple(out))


def fitting_matrix(p: ProblemInstance) -> TriMatrix:
    cells = np.zeros((p.num_receivers, p.num_messages), dtype=np.int8)
    for i, r in enumerate(p.receivers):
        for k in r.knows:
            cells[i, k] = UNKNOWN
        cells[i, r.wants] = ONE
    return TriMatrix(cells)


def problem_of(fm: TriMatrix) -> ProblemInstance:
    """Inverse of :func:`fitting_matrix`."""
    demands = fm.demands()
    receivers = tuple(
        Receiver(w, frozenset(np.nonzero(row == UNKNOWN)[0].tolist()))
        for w, row in zip(demands, fm.cells)
    )
    return ProblemInstance(fm.n_cols, receivers)


def completes(f, fm: TriMatrix) -> bool:
    """True iff binary ``f`` agrees with ``fm`` on every known entry."""
    f = as_bin(f)
    if f.shape != fm.shape:
        raise ValueError(f"shape {f.shape} does not match fitting matrix {fm.shape}")
    known = fm.cells != UNKNOWN
    return bool(np.array_equal(f[known], fm.cells[known]))


# Text formats --------------------------------------------------------------


def _parse_grid(text: str, alphabet: str) -> list[list[str]]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty input")
    rows = []
    width = None
    for ln, line in enumerate(lines, 1):
        line = line.rstrip("\r")
        if not line.strip():
            raise ParseError("blank line", line=ln)
        row = []
        for col, ch in enumerate(line, 1):
            if ch == " ":
                continue
            if ch not in alphabet:
                raise ParseError(f"illegal character {ch!r}", line=ln, column=col)
            row.append(ch)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"row has {len(row)} entries, expected {width}", line=ln)
        rows.append(row)
    return rows


def parse_tri(text: str) -> TriMatrix:
    return TriMatrix([[_VALUE[ch] for ch in row] for row in _parse_grid(text, "01x")])


def emit_tri(fm: TriMatrix) -> str:
    return fm.to_text()


def parse_bin(text: str) -> np.ndarray:
    return np.array([[int(ch) for ch in row] for row in _parse_grid(text, "01")], dtype=np.uint8)


def emit_bin(m) -> str:
    m = as_bin(m)
    return "".join("".join(str(int(v)) for v in row) + "\n" for row in m)


def parse_problem(text: str) -> ProblemInstance:
    """Parse ``m=<int>`` followed by ``wants=<list> knows=<list>`` lines (1-based).

    ``wants`` may list several messages; such receivers are normalized.
    """
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty input")
    first_ln, first = lines[0]
    if not first.startswith("m="):
        raise ParseError("expected 'm=<int>'", line=first_ln, column=1)
    try:
        m = int(first[2:])
    except ValueError:
        raise ParseError(f"bad message count {first[2:]!r}", line=first_ln, column=3) from None

    def ints(field: str, ln: int) -> list[int]:
        if not field:
            return []
        try:
            return [int(v) - 1 for v in field.split(",")]
        except ValueError:
            raise ParseError(f"bad index list {field!r}", line=ln) from None

    receivers = []
    for ln, line in lines[1:]:
        fields = dict.fromkeys(("wants", "knows"), None)
        for part in line.split():
            key, sep, val = part.partition("=")
            if not sep or key not in fields:
                raise ParseError(f"unexpected field {part!r}", line=ln)
            fields[key] = val
        if fields["wants"] is None:
            raise ParseError("missing 'wants='", line=ln)
        receivers.append((ints(fields["wants"], ln), ints(fields["knows"] or "", ln)))
    try:
        return normalize(m, receivers)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def emit_problem(p: ProblemInstance) -> str:
    out = [f"m={p.num_messages}"]
    for r in p.receivers:
        knows = ",".join(str(k + 1) for k in sorted(r.knows))
        out.append(f"wants={r.wants + 1} knows={knows}")
    return "\n".join(out) + "\n"


def read_tri(path: str | Path) -> TriMatrix:
    return parse_tri(Path(path).read_text(encoding="utf-8"))


def read_bin(path: str | Path) -> np.ndarray:
    return parse_bin(Path(path).read_text(encoding="utf-8"))
