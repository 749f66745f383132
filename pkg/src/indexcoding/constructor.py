"""Build a code for a jointly extended problem from codes of its parts.

:func:`run_algorithm1` takes a full-rank encoder per component, a full-rank
base encoder ``G^B`` with a decoder ``D^B``, and the base fitting matrix.
Row ``a`` of ``G^B`` becomes block-row ``a`` of ``G^E``.  Block ``(a, j)`` is
``G^B[a, j]`` times the component encoder ``G^(j)``, truncated or zero-padded
to the block-row height ``rhat[a]``.  Components are handled in
non-increasing order of code length.  Each pass fills the block-rows that
decode the current component and records which block-rows also feed the
zero blocks of those receivers, so that later heights are large enough.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .bounds import ConstructionResult
from .extension import ExtensionSpec
from .gf2 import Permutation
from .minrank import find_decoding_matrix, simulate_decoding
from .problem import ONE, ZERO, TriMatrix, completes


class PreconditionError(ValueError):
    """Inputs violate a stated requirement of the construction."""


def default_sigma(ranks: Sequence[int]) -> Permutation:
    """Components by non-increasing rank, ties by ascending index."""
    return Permutation(tuple(sorted(range(len(ranks)), key=lambda j: (-ranks[j], j))))


@dataclass(frozen=True)
class Algo1Inputs:
    """Validated inputs.  ``sigma.mapping[t]`` is the component handled in pass ``t``."""

    component_encoders: tuple[np.ndarray, ...]
    base_encoder: np.ndarray
    base_decoder: np.ndarray
    base_fitting: TriMatrix
    sigma: Permutation | None = None

    def __post_init__(self) -> None:
        gs = tuple(gf2.as_bin(g, name=f"encoder {j}") for j, g in enumerate(self.component_encoders, 1))
        g_b = gf2.as_bin(self.base_encoder, name="base encoder")
        d_b = gf2.as_bin(self.base_decoder, name="base decoder")
        fm = self.base_fitting
        n_b, m_b = fm.shape
        if len(gs) != m_b:
            raise PreconditionError(f"{len(gs)} component encoders for {m_b} base messages")
        if g_b.shape[1] != m_b:
            raise PreconditionError(f"base encoder has {g_b.shape[1]} columns, base has {m_b}")
        if d_b.shape != (n_b, g_b.shape[0]):
            raise PreconditionError(f"base decoder must be {n_b}x{g_b.shape[0]}, got {d_b.shape}")
        for j, g in enumerate(gs, 1):
            if gf2.rank(g) != g.shape[0]:
                raise PreconditionError(f"encoder {j} is not full rank")
        if gf2.rank(g_b) != g_b.shape[0]:
            raise PreconditionError("base encoder is not full rank")
        if not completes(gf2.matmul(d_b, g_b), fm):
            raise PreconditionError("base decoder times base encoder does not complete the base")
        ranks = [g.shape[0] for g in gs]
        sigma = default_sigma(ranks) if self.sigma is None else self.sigma
        if sigma.size != m_b:
            raise PreconditionError(f"sigma has size {sigma.size}, expected {m_b}")
        seq = [ranks[j] for j in sigma.mapping]
        if any(a < b for a, b in zip(seq, seq[1:])):
            raise PreconditionError(f"sigma does not order code lengths non-increasingly: {seq}")
        object.__setattr__(self, "component_encoders", gs)
        object.__setattr__(self, "base_encoder", g_b)
        object.__setattr__(self, "base_decoder", d_b)
        object.__setattr__(self, "sigma", sigma)

    @property
    def ranks(self) -> list[int]:
        return [g.shape[0] for g in self.component_encoders]


@dataclass
class IterationRecord:
    """One pass of the main loop.  All indices are 0-based."""

    t: int
    component: int
    U: list[int]
    A: list[int]
    psi_before: list[int]
    psi_after: list[int]
    V: dict[int, list[int]]
    Y: list[tuple[int, int, list[int]]]
    B: dict[int, list[int]]
    rhat: dict[int, int]
    leftover: list[int] = field(default_factory=list)
    empty_max: list[int] = field(default_factory=list)


@dataclass
class Algo1Trace:
    records: list[IterationRecord] = field(default_factory=list)

    def to_text(self) -> str:
        """One line per pass, 1-based, with fields t, U, A, Psi, B, rhat."""

        def fmt(xs) -> str:
            return "{" + ",".join(str(x + 1) for x in xs) + "}"

        lines = []
        for r in self.records:
            b = ",".join(f"{j + 1}:{fmt(v)}" for j, v in sorted(r.B.items()) if v)
            rh = ",".join(f"{a + 1}:{h}" for a, h in sorted(r.rhat.items()))
            line = (
                f"t={r.t + 1} U={fmt(r.U)} A={fmt(r.A)} "
                f"Psi={fmt(r.psi_before)}->{fmt(r.psi_after)} B={{{b}}} rhat={{{rh}}}"
            )
            if r.leftover:
                line += f" leftover={fmt(r.leftover)}"
            if r.empty_max:
                line += f" empty_max={fmt(r.empty_max)}"
            lines.append(line)
        return "\n".join(lines) + ("\n" if lines else "")


def _fit_height(g: np.ndarray, height: int) -> np.ndarray:
    """First ``height`` rows of ``g``, or ``g`` over zero rows."""
    if height < g.shape[0]:
        return g[:height]
    return np.vstack([g, gf2.zeros(height - g.shape[0], g.shape[1])])


def run_algorithm1(inputs: Algo1Inputs) -> tuple[ConstructionResult, Algo1Trace]:
    """Construct ``G^E`` and a pass-by-pass trace.

    Contribution sets are collected from block-rows that were unfilled at the
    start of the pass.  A leftover block-row found in no contribution set gets
    the smallest component code length and is flagged in the trace.
    """
    gs, g_b, d_b = inputs.component_encoders, inputs.base_encoder, inputs.base_decoder
    fm = inputs.base_fitting.cells
    sigma = inputs.sigma.mapping
    r = inputs.ranks
    n_b, m_b = fm.shape
    r_b = g_b.shape[0]
    # c[u, k, j] = D^B[u, k] * G^B[k, j]
    c = (d_b[:, :, None] & g_b[None, :, :]).astype(bool)

    psi = list(range(r_b))
    rhat: dict[int, int] = {}
    rows: dict[int, np.ndarray] = {}
    b_sets: dict[tuple[int, int], set[int]] = {}
    trace = Algo1Trace()

    def fill(a: int, height: int) -> None:
        rhat[a] = height
        rows[a] = np.hstack([_fit_height(gs[j], height) * g_b[a, j] for j in range(m_b)])

    t = 0
    while psi:
        st = sigma[t]
        U = [u for u in range(n_b) if fm[u, st] == ONE]
        A = sorted({k for u in U for k in psi if c[u, k, st]})
        assigned = {}
        for a in A:
            prior = [r[k] for (tp, k), s in b_sets.items() if tp < t and a in s]
            fill(a, max([r[st]] + prior))
            assigned[a] = rhat[a]
        psi_before = psi
        psi = [k for k in psi if k not in set(A)]

        V, Y = {}, []
        for u in U:
            V[u] = [v for v in range(m_b) if fm[u, v] == ZERO]
            for v in V[u]:
                y = [k for k in psi_before if c[u, k, v]]
                Y.append((u, v, y))
                target = v if r[v] < r[st] else st
                b_sets.setdefault((t, target), set()).update(y)

        leftover, empty = [], []
        if t == m_b - 1 and psi:
            leftover = list(psi)
            for a in leftover:
                pool = [r[k] for (_, k), s in b_sets.items() if a in s]
                if not pool:
                    empty.append(a)
                fill(a, max(pool) if pool else r[sigma[m_b - 1]])
                assigned[a] = rhat[a]
            psi = []

        trace.records.append(
            IterationRecord(
                t=t,
                component=st,
                U=U,
                A=A,
                psi_before=list(psi_before),
                psi_after=list(psi),
                V=V,
                Y=Y,
                B={k: sorted(s) for (tp, k), s in b_sets.items() if tp == t},
                rhat=assigned,
                leftover=leftover,
                empty_max=empty,
            )
        )
        t += 1

    order = sorted(rows)
    encoder = np.vstack([rows[a] for a in order])
    heights = tuple(rhat[a] for a in order)
    return ConstructionResult(encoder, int(encoder.shape[0]), heights), trace


def build_decoder_DE(
    inputs: Algo1Inputs,
    component_decoders: Sequence[np.ndarray],
    result: ConstructionResult,
    spec: ExtensionSpec,
) -> np.ndarray:
    """Decoder ``D^E`` paired with the output of :func:`run_algorithm1`.

    Block ``(i, j)`` is ``D^B[i, j]`` times the decoder of the component that
    base receiver ``i`` wants, cut or zero-padded to ``rhat[j]`` columns.
    """
    gs, d_b = inputs.component_encoders, inputs.base_decoder
    if len(component_decoders) != len(gs):
        raise PreconditionError(f"{len(component_decoders)} decoders for {len(gs)} components")
    ds = []
    for j, (d, g, comp) in enumerate(zip(component_decoders, gs, spec.components), 1):
        d = gf2.as_bin(d, name=f"decoder {j}")
        if d.shape != (comp.n_rows, g.shape[0]) or not completes(gf2.matmul(d, g), comp):
            raise PreconditionError(f"decoder {j} does not decode component {j}")
        ds.append(d)
    r_hat = result.blockrow_heights
    demands = spec.base.demands()
    blocks = []
    for i, f in enumerate(demands):
        d = ds[f]
        brow = []
        for k, h in enumerate(r_hat):
            piece = d[:, :h] if d.shape[1] > h else np.hstack([d, gf2.zeros(d.shape[0], h - d.shape[1])])
            brow.append(piece * d_b[i, k])
        blocks.append(brow)
    d_e = gf2.assemble_blocks(blocks, [ds[f].shape[0] for f in demands], r_hat)
    if not completes(gf2.matmul(d_e, result.encoder), spec.fitting):
        raise PreconditionError("assembled decoder does not complete the extended problem")
    return d_e


@dataclass(frozen=True)
class Verdict:
    """Outcome of checking an encoder against an extended problem.

    ``failing_receiver`` is 0-based.  ``method`` is ``"exhaustive"`` or
    ``"sampled"`` when the simulation ran, ``"decoder"`` when no decoder exists.
    """

    valid: bool
    decoder: np.ndarray | None
    failing_receiver: int | None
    method: str


def verify_extended_code(
    g,
    spec: ExtensionSpec | TriMatrix,
    *,
    seed: int = 0,
    exhaustive_threshold: int = 20,
    trials: int = 100_000,
) -> Verdict:
    """Find a decoder for ``g`` and simulate broadcasts to confirm it.

    All ``2**m`` message vectors are tried when ``m <= exhaustive_threshold``,
    otherwise ``trials`` seeded random vectors.
    """
    fm = spec.fitting if isinstance(spec, ExtensionSpec) else spec
    g = gf2.as_bin(g, name="encoder")
    if g.shape[1] != fm.n_cols:
        raise ValueError(f"encoder has {g.shape[1]} columns, problem has {fm.n_cols} messages")
    diag: dict = {}
    d = find_decoding_matrix(g, fm, diagnostics=diag)
    if d is None:
        return Verdict(False, None, diag["receiver"], "decoder")
    exhaustive = fm.n_cols <= exhaustive_threshold
    ok = simulate_decoding(
        g, d, fm, trials=None if exhaustive else trials, seed=seed, diagnostics=diag
    )
    method = "exhaustive" if exhaustive else "sampled"
    return Verdict(ok, d if ok else None, None if ok else diag["receiver"], method)
