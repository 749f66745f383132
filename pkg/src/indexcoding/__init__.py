"""Groupcast index coding over GF(2): minrank, joint extensions, bounds and code construction."""

from __future__ import annotations

from .bounds import (
    BoundReport,
    ConditionError,
    ConstructionResult,
    Lemma2Inputs,
    lemma2_construct,
    lower_bound,
    theorem1_certificate,
    theorem1_check,
    theorem2_cycle,
)
from .constructor import (
    Algo1Inputs,
    Algo1Trace,
    PreconditionError,
    build_decoder_DE,
    run_algorithm1,
    verify_extended_code,
)
from .extension import BlockLayout, ExtensionSpec, build_extension, load_manifest, recognize_extension
from .gf2 import Permutation, rank
from .minrank import (
    MinrankResult,
    TooManyUnknowns,
    TriangulableWitness,
    enumerate_triangulable_submatrices,
    exact_minrank,
    find_decoding_matrix,
    is_upper_triangulable,
    simulate_decoding,
)
from .problem import ProblemInstance, TriMatrix, fitting_matrix, parse_bin, parse_tri, read_bin, read_tri

__version__ = "0.1.0"
