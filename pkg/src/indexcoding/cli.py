"""Command-line interface.

Exit codes: 0 success, 1 parse/IO or bad arguments, 2 unknown-entry cap
exceeded, 3 construction precondition failed, 4 verification failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import gf2
from .bounds import (
    ConditionError,
    Lemma2Inputs,
    check_lemma2_inputs,
    lemma2_construct,
    lower_bound,
    theorem1_certificate,
    theorem1_check,
    theorem2_cycle,
)
from .constructor import (
    Algo1Inputs,
    PreconditionError,
    build_decoder_DE,
    run_algorithm1,
    verify_extended_code,
)
from .extension import ExtensionSpec, build_extension, load_manifest
from .gf2 import Permutation
from .minrank import (
    DEFAULT_MAX_UNKNOWNS,
    TooManyUnknowns,
    enumerate_triangulable_submatrices,
    exact_minrank,
    find_decoding_matrix,
    is_upper_triangulable,
)
from .problem import ParseError, emit_bin, emit_tri, read_bin, read_tri

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_CONDITION, EXIT_INVALID = 0, 1, 2, 3, 4
HARD_MAX_UNKNOWNS = 30
HARD_MAX_EXHAUSTIVE = 24


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "cap exceeded" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class Output:
    """Collects report fields and renders them as text or key=value lines."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.items: list[tuple[str, str, str]] = []

    def add(self, key: str, value, label: str | None = None) -> None:
        self.items.append((key, str(value), label or key))

    def matrix(self, key: str, m, label: str | None = None) -> None:
        text = emit_tri(m) if hasattr(m, "cells") else emit_bin(m)
        self.items.append((key, text, label or key))

    def block(self, key: str, text: str, label: str | None = None) -> None:
        self.items.append((key, text if text.endswith("\n") else text + "\n", label or key))

    def render(self) -> str:
        out = []
        for key, value, label in self.items:
            if "\n" in value:
                if self.fmt == "machine":
                    out.append(f"{key}={';'.join(value.rstrip(chr(10)).split(chr(10)))}")
                else:
                    out.append(f"{label}:")
                    out.append(value.rstrip("\n"))
            elif self.fmt == "machine":
                out.append(f"{key}={value}")
            else:
                out.append(f"{label} = {value}")
        return "\n".join(out) + "\n"


def _set(xs) -> str:
    return "{" + ",".join(str(x + 1) for x in xs) + "}"


def _ints(text: str, name: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects a comma-separated list of integers") from None


def _paths(text: str) -> list[Path]:
    return [Path(p) for p in text.split(",") if p.strip()]


def _load_problem(path: str):
    """A tri-valued matrix file, or a manifest (by ``.manifest`` suffix)."""
    if str(path).endswith(".manifest"):
        return load_manifest(path)
    return read_tri(path)


def _minranks(args, spec: ExtensionSpec) -> list[int]:
    if args.minranks:
        ranks = _ints(args.minranks, "minranks")
        if len(ranks) != len(spec.components):
            raise UsageError(f"--minranks has {len(ranks)} entries, manifest has {len(spec.components)} components")
        return ranks
    return [exact_minrank(c, args.max_unknowns).value for c in spec.components]


# Commands --------------------------------------------------------------------


def cmd_minrank(args, out: Output) -> int:
    fm = read_tri(args.matrix)
    res = exact_minrank(fm, args.max_unknowns)
    out.add("minrank", res.value)
    out.matrix("witness", res.witness)
    return EXIT_OK


def cmd_triangulable(args, out: Output) -> int:
    fm = read_tri(args.matrix)
    if args.enumerate:
        ws = enumerate_triangulable_submatrices(fm)
        out.add("count", len(ws))
        for w in ws:
            out.add("submatrix", f"size={w.size} rows={_set(w.row_indices)} cols={_set(w.col_indices)}")
        return EXIT_OK
    if fm.n_rows != fm.n_cols:
        raise UsageError(f"matrix is {fm.n_rows}x{fm.n_cols}; use --enumerate for non-square input")
    w = is_upper_triangulable(fm)
    out.add("triangulable", "yes" if w else "no")
    if w:
        out.add("row_order", ",".join(str(w.row_indices[k] + 1) for k in w.row_perm.mapping))
        out.add("col_order", ",".join(str(w.col_indices[k] + 1) for k in w.col_perm.mapping))
    return EXIT_OK


def cmd_extend(args, out: Output) -> int:
    spec = load_manifest(args.manifest)
    fm, layout = build_extension(spec.base, spec.components)
    if args.output:
        Path(args.output).write_text(emit_tri(fm), encoding="utf-8")
    out.add("n_E", layout.n_rows)
    out.add("m_E", layout.n_cols)
    out.add("row_heights", ",".join(map(str, layout.row_heights)))
    out.add("col_widths", ",".join(map(str, layout.col_widths)))
    if not args.output:
        out.matrix("fitting", fm)
    return EXIT_OK


def cmd_lower_bound(args, out: Output) -> int:
    spec = load_manifest(args.manifest)
    ranks = _minranks(args, spec)
    rep = lower_bound(spec, ranks)
    out.add("minranks", ",".join(map(str, ranks)))
    out.add("lower_bound", rep.value, "lower bound")
    out.add("rows", _set(rep.witness.row_indices))
    out.add("cols", _set(rep.witness.col_indices))
    return EXIT_OK


def _lemma2_inputs(args, spec: ExtensionSpec) -> Lemma2Inputs:
    if args.completions:
        comps = tuple(read_bin(p) for p in _paths(args.completions))
    else:
        comps = tuple(exact_minrank(c, args.max_unknowns).witness for c in spec.components)
    ranks = [gf2.rank(f) for f in comps]
    if not args.base_completion:
        cert = theorem1_certificate(spec, ranks, args.max_unknowns)
        if cert is None:
            raise ConditionError("ii", "no base completion meets the witness conditions")
        w, fb = cert
        return Lemma2Inputs(fb, comps, w)
    fb = read_bin(args.base_completion)
    if args.witness_rows or args.witness_cols:
        rows = [i - 1 for i in _ints(args.witness_rows or "", "witness-rows")]
        cols = [j - 1 for j in _ints(args.witness_cols or "", "witness-cols")]
        if len(rows) != len(cols) or not rows:
            raise UsageError("--witness-rows and --witness-cols must list the same number of indices")
        w = is_upper_triangulable(spec.base, rows, cols)
        if w is None:
            raise ConditionError("i", "the given submatrix is not upper-triangulable")
        return Lemma2Inputs(fb, comps, w)
    first_error = None
    witnesses = enumerate_triangulable_submatrices(spec.base)
    witnesses.sort(key=lambda w: (-sum(ranks[c] for c in w.col_indices), w.size, w.col_indices, w.row_indices))
    for w in witnesses:
        inputs = Lemma2Inputs(fb, comps, w)
        try:
            check_lemma2_inputs(spec, inputs)
            return inputs
        except ConditionError as exc:
            first_error = first_error or exc
    raise first_error


def cmd_construct(args, out: Output) -> int:
    spec = load_manifest(args.manifest)
    decoder = None
    trace = None
    if args.mode == "lemma2":
        inputs = _lemma2_inputs(args, spec)
        result = lemma2_construct(spec, inputs)
        ranks = _minranks(args, spec)
    elif args.mode == "algo1":
        if not (args.codes and args.base_code and args.base_decoder):
            raise UsageError("algo1 needs --codes, --base-code and --base-decoder")
        codes = tuple(read_bin(p) for p in _paths(args.codes))
        sigma = None
        if args.sigma:
            sigma = Permutation(tuple(v - 1 for v in _ints(args.sigma, "sigma")))
        a_in = Algo1Inputs(codes, read_bin(args.base_code), read_bin(args.base_decoder), spec.base, sigma)
        result, trace = run_algorithm1(a_in)
        ds = []
        for j, (g, c) in enumerate(zip(a_in.component_encoders, spec.components), 1):
            d = find_decoding_matrix(g, c) if g.shape[1] == c.n_cols else None
            if d is None:
                raise PreconditionError(f"code {j} is not a valid code for component {j}")
            ds.append(d)
        decoder = build_decoder_DE(a_in, ds, result, spec)
        ranks = _minranks(args, spec)
    else:
        if not args.codes:
            raise UsageError("cycle needs --codes")
        codes = [read_bin(p) for p in _paths(args.codes)]
        ranks = _minranks(args, spec)
        try:
            result = theorem2_cycle(spec, ranks, codes)
        except ValueError as exc:
            if isinstance(exc, (ParseError, TooManyUnknowns)):
                raise
            raise PreconditionError(str(exc)) from None

    verdict = verify_extended_code(
        result.encoder, spec, seed=args.seed, exhaustive_threshold=args.exhaustive_threshold
    )
    if decoder is None:
        decoder = verdict.decoder
    lb = lower_bound(spec, ranks).value
    optimal = result.codelength == lb
    if not optimal:
        try:
            optimal = theorem1_check(spec, ranks, args.max_unknowns) == result.codelength
        except TooManyUnknowns:
            optimal = False

    if args.output:
        Path(args.output).write_text(emit_bin(result.encoder), encoding="utf-8")
    if args.decoder_output and decoder is not None:
        Path(args.decoder_output).write_text(emit_bin(decoder), encoding="utf-8")
    out.add("mode", args.mode)
    out.add("codelength", result.codelength)
    out.add("blockrow_heights", ",".join(map(str, result.blockrow_heights)))
    out.add("lower_bound", lb, "lower bound")
    out.add("valid", "yes" if verdict.valid else "no")
    out.add("verdict", "OPTIMAL" if optimal else "UNKNOWN")
    if trace is not None and args.trace:
        out.block("trace", trace.to_text())
    if not args.output:
        out.matrix("encoder", result.encoder)
    return EXIT_OK if verdict.valid else EXIT_INVALID


def cmd_verify(args, out: Output) -> int:
    g = read_bin(args.encoder)
    problem = _load_problem(args.fitting)
    fm = problem.fitting if isinstance(problem, ExtensionSpec) else problem
    if g.shape[1] != fm.n_cols:
        raise UsageError(f"encoder has {g.shape[1]} columns, fitting matrix has {fm.n_cols}")
    v = verify_extended_code(g, fm, seed=args.seed, exhaustive_threshold=args.exhaustive_threshold)
    if v.valid:
        out.add("result", "VALID")
        out.add("method", v.method)
        out.matrix("decoder", v.decoder)
        return EXIT_OK
    out.add("result", "INVALID")
    out.add("receiver", v.failing_receiver + 1)
    return EXIT_INVALID


# Wiring -----------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--max-unknowns", type=int, default=DEFAULT_MAX_UNKNOWNS,
                   help=f"cap on unknown entries for exhaustive search (<= {HARD_MAX_UNKNOWNS})")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled decoding checks")
    p.add_argument("--exhaustive-threshold", type=int, default=20,
                   help=f"simulate every message vector up to this many messages (<= {HARD_MAX_EXHAUSTIVE})")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--minranks", help="component minranks, comma-separated (skips exact search)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="indexcoding", description="Groupcast index coding tools over GF(2).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("minrank", parents=[common], help="exact minrank of a fitting matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_minrank)

    p = sub.add_parser("triangulable", parents=[common], help="upper-triangulability test")
    p.add_argument("matrix")
    p.add_argument("--enumerate", action="store_true", help="list every triangulable square submatrix")
    p.set_defaults(func=cmd_triangulable)

    p = sub.add_parser("extend", parents=[common], help="build the extended fitting matrix")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", help="write the fitting matrix here")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("lower-bound", parents=[common], help="lower bound on the extended minrank")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_lower_bound)

    p = sub.add_parser("construct", parents=[common], help="build an encoder for the extended problem")
    p.add_argument("manifest")
    p.add_argument("--mode", choices=("lemma2", "algo1", "cycle"), required=True)
    p.add_argument("--completions", help="lemma2: component completion files, comma-separated")
    p.add_argument("--base-completion", help="lemma2: base completion file")
    p.add_argument("--witness-rows", help="lemma2: 1-based base rows of the witness")
    p.add_argument("--witness-cols", help="lemma2: 1-based base columns of the witness")
    p.add_argument("--codes", help="algo1/cycle: component encoder files, comma-separated")
    p.add_argument("--base-code", help="algo1: base encoder file")
    p.add_argument("--base-decoder", help="algo1: base decoder file")
    p.add_argument("--sigma", help="algo1: 1-based component order, comma-separated")
    p.add_argument("--trace", action="store_true", help="algo1: include the pass-by-pass trace")
    p.add_argument("-o", "--output", help="write the encoder here")
    p.add_argument("--decoder-output", help="write a decoder here")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="check an encoder against a problem")
    p.add_argument("encoder")
    p.add_argument("fitting", help="fitting matrix file, or a .manifest")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0 <= args.max_unknowns <= HARD_MAX_UNKNOWNS:
        parser.error(f"--max-unknowns must be between 0 and {HARD_MAX_UNKNOWNS}")
    if not 0 <= args.exhaustive_threshold <= HARD_MAX_EXHAUSTIVE:
        parser.error(f"--exhaustive-threshold must be between 0 and {HARD_MAX_EXHAUSTIVE}")
    out = Output(args.format)
    try:
        code = args.func(args, out)
    except TooManyUnknowns as exc:
        print(f"error: {exc}; raise --max-unknowns (cap {HARD_MAX_UNKNOWNS}) or use bounds", file=sys.stderr)
        return EXIT_CAP
    except ConditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except PreconditionError as exc:
        print(f"error: precondition failed: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except (ParseError, UsageError, OSError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(out.render())
    return code


if __name__ == "__main__":
    raise SystemExit(main())
