from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest

from conftest import binm, fx
from indexcoding.cli import main
from indexcoding.problem import read_bin, read_tri


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def ex8_algo1_args() -> list[str]:
    codes = ",".join(str(fx(f"ex8_g{j}.bin")) for j in range(1, 6))
    return [
        "construct", fx("ex8.manifest"), "--mode", "algo1", "--codes", codes,
        "--base-code", fx("ex8_gb.bin"), "--base-decoder", fx("ex8_db.bin"),
    ]


class TestMinrank:
    def test_text(self, capsys) -> None:
        code, out, _ = run(capsys, "minrank", fx("ex1_c1.tri"))
        assert code == 0
        assert out == "minrank = 3\nwitness:\n1100\n0110\n0011\n1001\n"

    def test_machine(self, capsys) -> None:
        code, out, _ = run(capsys, "minrank", fx("ex1_c1.tri"), "--format", "machine")
        assert code == 0
        assert out == "minrank=3\nwitness=1100;0110;0011;1001\n"

    def test_cap_exceeded(self, capsys, tmp_path) -> None:
        p = tmp_path / "wide.tri"
        p.write_text("1" + "x" * 25 + "\n")
        code, _, err = run(capsys, "minrank", p)
        assert code == 2
        assert "25" in err

    def test_parse_error(self, capsys, tmp_path) -> None:
        p = tmp_path / "bad.tri"
        p.write_text("1x\n0z\n")
        code, _, err = run(capsys, "minrank", p)
        assert code == 1
        assert "line 2" in err

    def test_missing_file(self, capsys, tmp_path) -> None:
        code, _, _ = run(capsys, "minrank", tmp_path / "none.tri")
        assert code == 1


class TestTriangulable:
    def test_square(self, capsys, tmp_path) -> None:
        p = tmp_path / "t.tri"
        p.write_text("x1\n10\n")
        code, out, _ = run(capsys, "triangulable", p)
        assert code == 0
        assert out.startswith("triangulable = yes\n")

    def test_not_triangulable(self, capsys, tmp_path) -> None:
        p = tmp_path / "t.tri"
        p.write_text("1x\nx1\n")
        code, out, _ = run(capsys, "triangulable", p)
        assert code == 0 and out == "triangulable = no\n"

    def test_non_square_needs_enumerate(self, capsys) -> None:
        code, _, err = run(capsys, "triangulable", fx("ex2_base.tri"))
        assert code == 1 and "--enumerate" in err

    def test_enumerate(self, capsys) -> None:
        code, out, _ = run(capsys, "triangulable", fx("ex6_base.tri"), "--enumerate")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "count = 15"
        assert lines[1] == "submatrix = size=3 rows={1,2,3} cols={1,2,3}"


class TestExtend:
    def test_writes_matrix(self, capsys, tmp_path) -> None:
        dest = tmp_path / "e.tri"
        code, out, _ = run(capsys, "extend", fx("ex6.manifest"), "-o", dest)
        assert code == 0
        assert "n_E = 14" in out and "m_E = 11" in out
        assert read_tri(dest) == read_tri(fx("ex6_ext.tri"))

    def test_bad_manifest(self, capsys, tmp_path) -> None:
        p = tmp_path / "m.manifest"
        p.write_text("component=a.tri\n")
        code, _, _ = run(capsys, "extend", p)
        assert code == 1


class TestLowerBound:
    def test_given_minranks(self, capsys) -> None:
        code, out, _ = run(capsys, "lower-bound", fx("ex6.manifest"), "--minranks", "4,3,2,2")
        assert code == 0
        assert out == "minranks = 4,3,2,2\nlower bound = 9\nrows = {1,2,3}\ncols = {1,2,3}\n"

    def test_computed_minranks(self, capsys) -> None:
        code, out, _ = run(capsys, "lower-bound", fx("ex1.manifest"))
        assert code == 0
        assert "minranks = 3,1,2\n" in out and "lower bound = 5\n" in out

    def test_wrong_count(self, capsys) -> None:
        code, _, _ = run(capsys, "lower-bound", fx("ex6.manifest"), "--minranks", "4,3")
        assert code == 1


class TestConstruct:
    def test_algo1_with_trace(self, capsys, tmp_path) -> None:
        enc, dec = tmp_path / "g.bin", tmp_path / "d.bin"
        code, out, _ = run(capsys, *ex8_algo1_args(), "--trace", "-o", enc, "--decoder-output", dec)
        assert code == 0
        assert "codelength = 7\n" in out and "verdict = OPTIMAL\n" in out
        assert "t=1 U={1} A={3} Psi={1,2,3}->{1,2} B={4:{1,3}} rhat={3:3}\n" in out
        assert np.array_equal(read_bin(enc), binm("ex8_encoder.bin"))
        assert read_bin(dec).shape == (13, 7)

    def test_lemma2_explicit(self, capsys) -> None:
        comps = ",".join(str(fx(f"ex6_f{j}.bin")) for j in range(1, 5))
        code, out, _ = run(
            capsys, "construct", fx("ex6.manifest"), "--mode", "lemma2", "--completions", comps,
            "--base-completion", fx("ex6_fb.bin"), "--witness-rows", "1,2,3", "--witness-cols", "1,2,3",
        )
        assert code == 0
        assert "codelength = 9\n" in out and "verdict = OPTIMAL\n" in out

    def test_lemma2_automatic(self, capsys) -> None:
        code, out, _ = run(capsys, "construct", fx("ex7.manifest"), "--mode", "lemma2")
        assert code == 0
        assert "codelength = 5\n" in out

    def test_lemma2_condition_failure(self, capsys) -> None:
        comps = ",".join(str(fx(f"ex7_f{j}.bin")) for j in range(1, 5))
        code, _, err = run(
            capsys, "construct", fx("ex7.manifest"), "--mode", "lemma2", "--completions", comps,
            "--base-completion", fx("ex7_fb.bin"), "--witness-rows", "1,2", "--witness-cols", "1,2",
        )
        assert code == 3
        assert "condition (i)" in err

    def test_cycle(self, capsys) -> None:
        codes = ",".join(str(fx(f"ex9_g{j}.bin")) for j in (1, 2, 3))
        code, out, _ = run(capsys, "construct", fx("ex9.manifest"), "--mode", "cycle", "--codes", codes)
        assert code == 0
        assert "codelength = 3\n" in out

    def test_cycle_on_non_cycle(self, capsys) -> None:
        codes = ",".join(str(fx(f"ex8_g{j}.bin")) for j in range(1, 6))
        code, _, _ = run(capsys, "construct", fx("ex8.manifest"), "--mode", "cycle", "--codes", codes)
        assert code == 3

    def test_algo1_bad_sigma(self, capsys) -> None:
        code, _, _ = run(capsys, *ex8_algo1_args(), "--sigma", "5,4,3,2,1")
        assert code == 3

    def test_machine_format(self, capsys) -> None:
        code, out, _ = run(capsys, *ex8_algo1_args(), "--format", "machine")
        assert code == 0
        assert "codelength=7\n" in out and "blockrow_heights=2,2,3\n" in out


class TestVerify:
    def test_valid(self, capsys) -> None:
        code, out, _ = run(capsys, "verify", fx("ex9_encoder.bin"), fx("ex9.manifest"))
        assert code == 0
        assert out.startswith("result = VALID\nmethod = exhaustive\n")

    def test_flipped_bit(self, capsys, tmp_path) -> None:
        g = binm("ex8_encoder.bin").copy()
        g[0, 4] ^= 1
        p = tmp_path / "g.bin"
        p.write_text("".join("".join(map(str, r)) + "\n" for r in g))
        code, out, _ = run(capsys, "verify", p, fx("ex8_ext.tri"))
        assert code == 4
        assert "result = INVALID\n" in out and "receiver = " in out

    def test_plain_fitting_file(self, capsys) -> None:
        code, _, _ = run(capsys, "verify", fx("ex5_encoder.bin"), fx("ex1_ext.tri"))
        assert code == 0

    def test_threshold_cap(self, capsys) -> None:
        with pytest.raises(SystemExit) as info:
            main(["verify", str(fx("ex5_encoder.bin")), str(fx("ex1_ext.tri")), "--exhaustive-threshold", "40"])
        assert info.value.code == 1


class TestEntryPoints:
    def test_unknown_subcommand(self, capsys) -> None:
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == 1

    def test_module_invocation(self) -> None:
        proc = subprocess.run(
            [sys.executable, "-m", "indexcoding", "minrank", str(fx("ex1_c2.tri"))],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("minrank = 1\n")
