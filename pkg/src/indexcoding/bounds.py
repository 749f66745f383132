"""Bounds on the minrank of a jointly extended problem, and codes that meet them.

``lower_bound`` maximizes the summed component minranks over the
upper-triangulable submatrices of the base.  ``lemma2_construct`` completes
the extended fitting matrix from completions of the base and of every
component, giving a code whose length is the summed ranks of the top
components.  ``theorem1_check`` decides when the two bounds meet, and
``theorem2_cycle`` builds an optimal code when the base is a directed cycle.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import gf2
from .extension import ExtensionSpec
from .gf2 import Permutation
from .minrank import (
    DEFAULT_MAX_UNKNOWNS,
    TooManyUnknowns,
    TriangulableWitness,
    enumerate_triangulable_submatrices,
)
from .problem import ONE, UNKNOWN, ZERO, TriMatrix, completes


class ConditionError(ValueError):
    """A construction precondition does not hold.

    ``condition`` is ``"i"`` (witness/rank ordering) or ``"ii"`` (base
    completion rank and independence).
    """

    def __init__(self, condition: str, message: str):
        self.condition = condition
        super().__init__(f"condition ({condition}) failed: {message}")


class InternalInvariantError(RuntimeError):
    """A post-check failed; indicates a bug rather than bad input."""


@dataclass(frozen=True)
class BoundReport:
    value: int
    witness: TriangulableWitness
    per_column_minranks: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Lemma2Inputs:
    """Completions of the base and of every component, plus the witness.

    The internal row and column renaming is derived from these by
    :func:`lemma2_construct` and is not supplied by the caller.
    """

    base_completion: np.ndarray
    component_completions: tuple[np.ndarray, ...]
    witness: TriangulableWitness


@dataclass(frozen=True)
class ConstructionResult:
    """An encoder for the extended problem.

    ``blockrow_heights`` lists how many encoder rows each block-row
    contributes, in encoder order.
    """

    encoder: np.ndarray
    codelength: int
    blockrow_heights: tuple[int, ...]
    full_completion: np.ndarray | None = None


def _check_minranks(spec: ExtensionSpec, minranks: Sequence[int]) -> list[int]:
    if len(minranks) != spec.layout.base_cols:
        raise ValueError(f"{len(minranks)} minranks given for {spec.layout.base_cols} components")
    return [int(v) for v in minranks]


def _is_top_set(cols: Sequence[int], ranks: Sequence[int]) -> bool:
    """True iff some non-increasing ordering of ``ranks`` lists ``cols`` first."""
    inside = [ranks[c] for c in cols]
    outside = [ranks[c] for c in range(len(ranks)) if c not in set(cols)]
    return not outside or min(inside) >= max(outside)


# Lower bound ---------------------------------------------------------------------


def lower_bound(spec: ExtensionSpec, component_minranks: Sequence[int]) -> BoundReport:
    """Largest summed component minrank over upper-triangulable base submatrices.

    Ties go to the smallest witness, then to the lexicographically first
    column set, then row set.
    """
    ranks = _check_minranks(spec, component_minranks)
    best = None
    best_key = None
    for w in enumerate_triangulable_submatrices(spec.base):
        value = sum(ranks[c] for c in w.col_indices)
        key = (-value, w.size, w.col_indices, w.row_indices)
        if best_key is None or key < best_key:
            best, best_key = w, key
    assert best is not None  # every base row has a One, so 1x1 witnesses exist
    return BoundReport(
        value=-best_key[0],
        witness=best,
        per_column_minranks=tuple((c, ranks[c]) for c in best.col_indices),
    )


# Lemma 2 construction ----------------------------------------------------------


def _coefficients(basis: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Matrix ``P`` with ``P @ basis == rows``; ``basis`` must have independent rows."""
    out = np.zeros((rows.shape[0], basis.shape[0]), dtype=np.uint8)
    for k, v in enumerate(rows):
        c = gf2.solve_left(basis, np.nonzero(v)[0].tolist(), np.nonzero(v == 0)[0].tolist())
        if c is None:
            raise InternalInvariantError("row outside the span of the independent prefix")
        out[k] = c
    return out


def _independent_first(f: np.ndarray) -> Permutation:
    ind = gf2.independent_rows(f)
    rest = [k for k in range(f.shape[0]) if k not in set(ind)]
    return Permutation(tuple(ind + rest))


def _pad_rows(m: np.ndarray, height: int) -> np.ndarray:
    if m.shape[0] >= height:
        return m[:height]
    return np.vstack([m, gf2.zeros(height - m.shape[0], m.shape[1])])


def check_lemma2_inputs(spec: ExtensionSpec, inputs: Lemma2Inputs) -> list[int]:
    """Validate the inputs and return the component completion ranks."""
    base, comps = spec.base, spec.components
    fb = gf2.as_bin(inputs.base_completion, name="base completion")
    if len(inputs.component_completions) != len(comps):
        raise ValueError(
            f"{len(inputs.component_completions)} component completions for {len(comps)} components"
        )
    for j, (f, c) in enumerate(zip(inputs.component_completions, comps), 1):
        f = gf2.as_bin(f, name=f"completion {j}")
        if f.shape != c.shape or not completes(f, c):
            raise ValueError(f"completion {j} does not complete component {j}")
    if fb.shape != base.shape or not completes(fb, base):
        raise ValueError("base completion does not complete the base fitting matrix")
    ranks = [gf2.rank(f) for f in inputs.component_completions]

    w = inputs.witness
    if w is None:
        raise ConditionError("i", "no upper-triangulable witness was supplied")
    if max(w.row_indices) >= base.n_rows or max(w.col_indices) >= base.n_cols:
        raise ValueError("witness indices fall outside the base")
    if not w.certify(base):
        raise ConditionError("i", "witness is not an upper-triangulable submatrix of the base")
    if not _is_top_set(w.col_indices, ranks):
        cols = sorted(c + 1 for c in w.col_indices)
        raise ConditionError("i", f"columns {cols} do not carry the largest component ranks")

    r_b = gf2.rank(fb)
    if r_b != w.size:
        raise ConditionError("ii", f"base completion has rank {r_b}, witness has size {w.size}")
    if gf2.rank(fb[list(w.row_indices)]) != w.size:
        raise ConditionError("ii", "witness rows of the base completion are dependent")
    return ranks


def lemma2_construct(spec: ExtensionSpec, inputs: Lemma2Inputs) -> ConstructionResult:
    """Complete the extended fitting matrix and extract an encoder from it.

    The work happens in renamed coordinates: each component's independent
    rows come first, witness base rows come first in the order of their
    demanded columns, and base columns are sorted by non-increasing rank
    (ties by index, witness columns first).  The renaming is undone before
    returning.  Encoder rows are grouped by witness base row, ascending.
    """
    ranks = check_lemma2_inputs(spec, inputs)
    base, layout = spec.base, spec.layout
    n_b, m_b = base.shape
    w = inputs.witness
    r_b = w.size
    fb = gf2.as_bin(inputs.base_completion)
    demands = list(layout.demand_of_blockrow)

    # Component renaming and P^(j).
    comp_perm = [_independent_first(gf2.as_bin(f)) for f in inputs.component_completions]
    comp_f = [
        gf2.apply_perm(gf2.as_bin(f), p, "rows") for f, p in zip(inputs.component_completions, comp_perm)
    ]
    comp_p = [_coefficients(f[:r], f[r:]) for f, r in zip(comp_f, ranks)]

    # Base renaming: t orders columns, s lists witness rows by demanded column.
    wcols = set(w.col_indices)
    order = lambda c: (-ranks[c], c)  # noqa: E731
    t = sorted(wcols, key=order) + sorted(set(range(m_b)) - wcols, key=order)
    row_of_demand = {demands[r]: r for r in w.row_indices}
    s = [row_of_demand[c] for c in t[:r_b]]
    row_perm = Permutation(tuple(s + [i for i in range(n_b) if i not in set(s)]))
    col_perm = Permutation(tuple(t))
    fbp = gf2.apply_perm(gf2.apply_perm(fb, row_perm, "rows"), col_perm, "cols")
    if gf2.rank(fbp[:r_b]) != r_b:
        raise InternalInvariantError("renamed witness rows are dependent")
    p_b = _coefficients(fbp[:r_b], fbp[r_b:])

    # Quantities in renamed coordinates.
    rk = [ranks[t[j]] for j in range(m_b)]
    fk = [comp_f[t[j]] for j in range(m_b)]
    pos_of = {c: j for j, c in enumerate(t)}
    dem = [pos_of[demands[row_perm.mapping[i]]] for i in range(n_b)]

    def hat(j: int, height: int) -> np.ndarray:
        # first rows of F^(j) when it has enough rank, otherwise zero-padded
        return _pad_rows(fk[j][: min(height, rk[j])], height)

    tops, blockrows = [], []
    for i in range(n_b):
        rho = rk[dem[i]]
        if i < r_b:
            coeff = fbp[i]
        else:
            coeff = gf2.matmul(p_b[i - r_b][None, :], fbp[:r_b])[0]
        top = np.hstack([hat(j, rho) * coeff[j] for j in range(m_b)])
        rest = gf2.matmul(comp_p[t[dem[i]]], top)
        tops.append(top)
        blockrows.append(np.vstack([top, rest]))

    # Undo the renaming.
    inv_cols = col_perm.inverse()
    widths = [layout.col_widths[c] for c in t]

    def restore_cols(m: np.ndarray) -> np.ndarray:
        blocks = np.split(m, np.cumsum(widths)[:-1], axis=1)
        return np.hstack([blocks[k] for k in inv_cols.mapping])

    full_rows = [None] * n_b
    for i in range(n_b):
        orig = row_perm.mapping[i]
        within = comp_perm[demands[orig]].inverse()
        full_rows[orig] = gf2.apply_perm(restore_cols(blockrows[i]), within, "rows")
    full = np.vstack(full_rows)

    by_row = sorted(range(r_b), key=lambda i: s[i])
    encoder = np.vstack([restore_cols(tops[i]) for i in by_row])
    heights = tuple(tops[i].shape[0] for i in by_row)
    codelength = sum(rk[:r_b])

    if not completes(full, spec.fitting):
        raise InternalInvariantError("constructed matrix does not complete the extended problem")
    enc_rank = gf2.rank(encoder)
    if enc_rank != codelength:
        raise InternalInvariantError(f"encoder rank {enc_rank} differs from codelength {codelength}")
    if gf2.rank(np.vstack([encoder, full])) != enc_rank:
        raise InternalInvariantError("completion has rows outside the encoder's row space")
    return ConstructionResult(encoder, codelength, heights, full)


# Theorem 1 ---------------------------------------------------------------------


def _base_completions(base: TriMatrix, max_unknowns: int):
    if base.n_unknowns > max_unknowns:
        raise TooManyUnknowns(base.n_unknowns, max_unknowns)
    for bits in itertools.product((0, 1), repeat=base.n_unknowns):
        yield base.complete(bits)


def theorem1_certificate(
    spec: ExtensionSpec,
    component_minranks: Sequence[int],
    max_unknowns: int = DEFAULT_MAX_UNKNOWNS,
) -> tuple[TriangulableWitness, np.ndarray] | None:
    """A witness and base completion meeting both optimality conditions, or ``None``.

    Candidate witnesses attain the lower bound and cover a top-rank column
    set; they are tried smallest first, then by column and row indices.  Base
    completions are scanned in lexicographic order of the unknowns.
    """
    ranks = _check_minranks(spec, component_minranks)
    base = spec.base
    if base.n_unknowns > max_unknowns:
        raise TooManyUnknowns(base.n_unknowns, max_unknowns)
    witnesses = enumerate_triangulable_submatrices(base)
    best = max(sum(ranks[c] for c in w.col_indices) for w in witnesses)
    candidates = [
        w
        for w in witnesses
        if sum(ranks[c] for c in w.col_indices) == best and _is_top_set(w.col_indices, ranks)
    ]
    candidates.sort(key=lambda w: (w.size, w.col_indices, w.row_indices))
    for w in candidates:
        for fb in _base_completions(base, max_unknowns):
            if gf2.rank(fb) == w.size and gf2.rank(fb[list(w.row_indices)]) == w.size:
                return w, fb
    return None


def theorem1_check(
    spec: ExtensionSpec,
    component_minranks: Sequence[int],
    max_unknowns: int = DEFAULT_MAX_UNKNOWNS,
) -> int | None:
    """Certified minrank of the extended problem when both conditions hold."""
    cert = theorem1_certificate(spec, component_minranks, max_unknowns)
    if cert is None:
        return None
    w, _ = cert
    return sum(int(component_minranks[c]) for c in w.col_indices)


# Cyclic base -------------------------------------------------------------------


def cycle_successor(base: TriMatrix) -> list[int] | None:
    """``succ[a]`` for a base that is a single directed cycle, else ``None``.

    The receiver wanting message ``a`` must know exactly message ``succ[a]``,
    and following ``succ`` must visit every message once.
    """
    n, m = base.shape
    if n != m or m < 2:
        return None
    succ = [-1] * m
    for row in base.cells:
        ones = np.nonzero(row == ONE)[0]
        xs = np.nonzero(row == UNKNOWN)[0]
        if ones.size != 1 or xs.size != 1 or np.count_nonzero(row == ZERO) != m - 2:
            return None
        a = int(ones[0])
        if succ[a] != -1:
            return None
        succ[a] = int(xs[0])
    seen, a = set(), 0
    while a not in seen:
        seen.add(a)
        a = succ[a]
    return succ if len(seen) == m and a == 0 else None


def cyclic_base_code(base: TriMatrix, minranks: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic encoder and decoder for a cycle base.

    The cycle is read starting just after the component of smallest minrank
    (lowest index on ties), so that component is the one decoded from the
    sum of all code symbols.
    """
    succ = cycle_successor(base)
    if succ is None:
        raise ValueError("base problem is not a directed cycle")
    m = len(succ)
    ind_min = min(range(m), key=lambda c: (minranks[c], c))
    order = [succ[ind_min]]
    while len(order) < m:
        order.append(succ[order[-1]])
    g = gf2.zeros(m - 1, m)
    for k in range(m - 1):
        g[k, order[k]] = g[k, order[k + 1]] = 1
    d = gf2.zeros(m, m - 1)
    pos = {c: k for k, c in enumerate(order)}
    for i, a in enumerate(base.demands()):
        if pos[a] == m - 1:
            d[i, :] = 1
        else:
            d[i, pos[a]] = 1
    return g, d


def theorem2_cycle(
    spec: ExtensionSpec,
    component_minranks: Sequence[int],
    optimal_component_codes: Sequence[np.ndarray],
) -> ConstructionResult:
    """Optimal code when the base is a directed cycle and component codes are optimal."""
    from .constructor import Algo1Inputs, run_algorithm1

    ranks = _check_minranks(spec, component_minranks)
    codes = [gf2.as_bin(g, name=f"component code {j + 1}") for j, g in enumerate(optimal_component_codes)]
    if len(codes) != len(ranks):
        raise ValueError(f"{len(codes)} component codes for {len(ranks)} components")
    for j, (g, r, c) in enumerate(zip(codes, ranks, spec.components), 1):
        if g.shape != (r, c.n_cols) or gf2.rank(g) != r:
            raise ValueError(f"component code {j} must be a full-rank {r}x{c.n_cols} matrix")
    g_b, d_b = cyclic_base_code(spec.base, ranks)
    result, _ = run_algorithm1(Algo1Inputs(tuple(codes), g_b, d_b, spec.base))
    target = sum(ranks) - min(ranks)
    if result.codelength != target:
        raise InternalInvariantError(f"codelength {result.codelength} differs from {target}")
    lb = lower_bound(spec, ranks).value
    if lb != target:
        raise InternalInvariantError(f"lower bound {lb} differs from codelength {target}")
    return result


__all__ = [
    "BoundReport",
    "ConditionError",
    "ConstructionResult",
    "InternalInvariantError",
    "Lemma2Inputs",
    "check_lemma2_inputs",
    "cycle_successor",
    "cyclic_base_code",
    "lemma2_construct",
    "lower_bound",
    "theorem1_certificate",
    "theorem1_check",
    "theorem2_cycle",
]
