from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
import pytest

from indexcoding import gf2
from indexcoding.bounds import ConditionError, Lemma2Inputs, check_lemma2_inputs
from indexcoding.extension import ExtensionSpec, load_manifest
from indexcoding.minrank import enumerate_triangulable_submatrices
from indexcoding.problem import ONE, UNKNOWN, ZERO, TriMatrix, read_bin, read_tri

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fx(name: str) -> Path:
    return FIXTURES / name


def tri(name: str) -> TriMatrix:
    return read_tri(fx(name))


def binm(name: str) -> np.ndarray:
    return read_bin(fx(name))


def spec_of(example: int) -> ExtensionSpec:
    return load_manifest(fx(f"ex{example}.manifest"))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


# Independent oracles ---------------------------------------------------------------


def oracle_rank(m) -> int:
    """Rank via integer bitmasks; shares no code with the package."""
    rows = [int("".join(str(int(v)) for v in r), 2) for r in np.asarray(m)]
    rank = 0
    while rows:
        pivot = max(rows)
        rows.remove(pivot)
        if pivot == 0:
            break
        rank += 1
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
    return rank


def all_completions(fm: TriMatrix):
    pos = list(zip(*np.nonzero(fm.cells == UNKNOWN)))
    base = (fm.cells == ONE).astype(np.uint8)
    for bits in itertools.product((0, 1), repeat=len(pos)):
        f = base.copy()
        for (r, c), b in zip(pos, bits):
            f[r, c] = b
        yield f


def oracle_minrank(fm: TriMatrix) -> int:
    return min(oracle_rank(f) for f in all_completions(fm))


def oracle_triangulable(cells: np.ndarray) -> bool:
    """Try every row and column permutation pair."""
    p = cells.shape[0]
    for rp in itertools.permutations(range(p)):
        a = cells[list(rp)]
        for cp in itertools.permutations(range(p)):
            b = a[:, list(cp)]
            if np.all(np.diag(b) == ONE) and np.all(b[np.tril_indices(p, -1)] == ZERO):
                return True
    return False


def oracle_decoder_exists(g: np.ndarray, fm: TriMatrix) -> bool:
    """Search every row vector d for every receiver."""
    r = g.shape[0]
    cands = [np.array(v, dtype=np.int64) for v in itertools.product((0, 1), repeat=r)]
    prods = [(d @ g.astype(np.int64)) % 2 for d in cands]
    for i, row in enumerate(fm.cells):
        want = int(np.nonzero(row == ONE)[0][0])
        zeros = np.nonzero(row == ZERO)[0]
        if not any(p[want] == 1 and not p[zeros].any() for p in prods):
            return False
    return True


# Random instances ------------------------------------------------------------------


def random_fitting(rng: np.random.Generator, n: int, m: int, p_unknown: float = 0.4) -> TriMatrix:
    """Random fitting matrix with one One per row and every column demanded (n >= m)."""
    demands = list(rng.permutation(m)) + list(rng.integers(0, m, size=n - m))
    demands = [int(demands[k]) for k in rng.permutation(n)]
    cells = np.where(rng.random((n, m)) < p_unknown, UNKNOWN, ZERO).astype(np.int8)
    for i, d in enumerate(demands):
        cells[i, d] = ONE
    return TriMatrix(cells)


def random_spec(
    rng: np.random.Generator,
    max_base: int = 4,
    max_comp: int = 3,
    p_base: float = 0.4,
    p_comp: float = 0.4,
) -> ExtensionSpec:
    m_b = int(rng.integers(1, max_base + 1))
    n_b = int(rng.integers(m_b, max_base + 1))
    base = random_fitting(rng, n_b, m_b, p_base)
    comps = []
    for _ in range(m_b):
        m = int(rng.integers(1, max_comp + 1))
        n = int(rng.integers(m, max_comp + 1))
        comps.append(random_fitting(rng, n, m, p_comp))
    return ExtensionSpec.of(base, comps)


def random_completion(rng: np.random.Generator, fm: TriMatrix) -> np.ndarray:
    f = (fm.cells == ONE).astype(np.uint8)
    unk = fm.cells == UNKNOWN
    f[unk] = rng.integers(0, 2, size=int(unk.sum()), dtype=np.uint8)
    return f


def basis_of(f: np.ndarray) -> np.ndarray:
    return f[gf2.independent_rows(f)]


def find_lemma2_inputs(spec: ExtensionSpec, comps) -> Lemma2Inputs | None:
    """First (witness, base completion) pair that passes the input checks."""
    comps = tuple(comps)
    for w in enumerate_triangulable_submatrices(spec.base):
        for fb in all_completions(spec.base):
            inputs = Lemma2Inputs(fb, comps, w)
            try:
                check_lemma2_inputs(spec, inputs)
            except ConditionError:
                continue
            return inputs
    return None
