"""cli: exit codes, stdout/stderr separation, determinism."""
from __future__ import annotations

import pytest

from qvl import fixtures_dir
from qvl.cli import run


@pytest.fixture(scope="module")
def fx():
    return fixtures_dir()


def _paths(fx, *names):
    return [str(fx / n) for n in names]


def _verify_args(fx, asm="crane.asm", extra=()):
    return ["verify", "--requirements", str(fx / "crane.psa"),
            "--design", str(fx / asm),
            "--ontology", *_paths(fx, "rules.kb", "geom.kb", "feat.kb"), *extra]


class TestVerify:
    def test_satisfied_crane_exits_zero(self, fx, capsys):
        assert run(_verify_args(fx)) == 0
        out, err = capsys.readouterr()
        assert "SATISFIED geom:isParallelWith(cad:leg1,cad:leg2)" in out
        assert err == ""

    def test_missing_required_option_exits_two(self, fx, capsys):
        code = run(["verify", "--requirements", str(fx / "crane.psa")])
        assert code == 2
        out, err = capsys.readouterr()
        assert out == ""
        assert "usage" in err

    def test_violated_crane_exits_one_with_missing_premise(self, fx, capsys):
        code = run(_verify_args(fx, asm="crane-bad.asm", extra=["--format", "machine"]))
        assert code == 1
        out, _ = capsys.readouterr()
        assert "VIOLATED\tgeom:isParallelWith(cad:leg1,cad:leg2)" in out
        assert "geom:isParallelWith(cad:a1,cad:a2)" in out

    def test_explain_flag_prints_proofs(self, fx, capsys):
        assert run(_verify_args(fx, extra=["--explain"])) == 0
        out, _ = capsys.readouterr()
        assert "[rule rules:parallel_axes]" in out

    def test_explicit_root_selects_closure(self, fx, capsys):
        assert run(_verify_args(fx, extra=["--root", "rules"])) == 0
        capsys.readouterr()
        # geom alone cannot verify the requirement: the design vocabulary
        # and bridging rules are gone, so the obligation is violated
        assert run(_verify_args(fx, extra=["--root", "geom:geom"])) == 1
        capsys.readouterr()

    def test_unknown_root_exits_two(self, fx, capsys):
        assert run(_verify_args(fx, extra=["--root", "nope"])) == 2
        _, err = capsys.readouterr()
        assert "error:" in err

    def test_identical_invocations_are_byte_identical(self, fx, capsys):
        run(_verify_args(fx, extra=["--explain"]))
        first = capsys.readouterr().out
        run(_verify_args(fx, extra=["--explain"]))
        second = capsys.readouterr().out
        assert first == second

    def test_parse_error_exits_two_on_stderr(self, fx, tmp_path, capsys):
        bad = tmp_path / "broken.asm"
        bad.write_text("assembly oops { part p { axis } }")
        args = _verify_args(fx)
        args[args.index(str(fx / "crane.asm"))] = str(bad)
        assert run(args) == 2
        out, err = capsys.readouterr()
        assert out == ""
        assert "broken.asm" in err

    def test_missing_file_exits_two(self, fx, capsys):
        args = _verify_args(fx)
        args[args.index(str(fx / "crane.asm"))] = "/nonexistent.asm"
        assert run(args) == 2
        _, err = capsys.readouterr()
        assert "cannot read" in err


class TestMaterialize:
    def test_fact_listing_is_sorted_and_deterministic(self, fx, capsys):
        args = ["materialize", "--ontology", *_paths(fx, "rules.kb", "geom.kb", "feat.kb"),
                "--abox", str(fx / "crane.asm")]
        assert run(args) == 0
        first = capsys.readouterr().out
        assert "geom:isParallelWith(cad:leg1,cad:leg2)" in first
        # canonical order: class memberships first, alphabetically
        assert first.splitlines()[0] == "feat:Angle(cad:ac1_ang)"
        assert run(args) == 0
        assert capsys.readouterr().out == first

    def test_without_abox_only_ontology_assertions(self, fx, capsys):
        assert run(["materialize", "--ontology",
                    *_paths(fx, "rules.kb", "geom.kb", "feat.kb")]) == 0
        out, _ = capsys.readouterr()
        assert out == ""  # the bundled modules assert no individuals


class TestExplain:
    def test_proof_printed_for_derived_fact(self, fx, capsys):
        args = ["explain", "--ontology", *_paths(fx, "rules.kb", "geom.kb", "feat.kb"),
                "--abox", str(fx / "crane.asm"),
                "--fact", "geom:isParallelWith(cad:leg1,cad:leg2)"]
        assert run(args) == 0
        out, _ = capsys.readouterr()
        assert "[asserted]" in out and "rules:parallel_axes" in out

    def test_not_derived_exits_one(self, fx, capsys):
        args = ["explain", "--ontology", *_paths(fx, "rules.kb", "geom.kb", "feat.kb"),
                "--abox", str(fx / "crane.asm"),
                "--fact", "geom:isParallelWith(cad:leg1,cad:frameBase)"]
        assert run(args) == 1
        out, _ = capsys.readouterr()
        assert "not derived" in out


class TestTrace:
    def test_up_and_down(self, fx, capsys):
        assert run(["trace", "--project", str(fx / "crane.proj"),
                    "--fragment", "S5#S17", "--up"]) == 0
        assert capsys.readouterr().out == "S4#S13\nS3#S3\n"
        assert run(["trace", "--project", str(fx / "crane.proj"),
                    "--fragment", "S4#S13", "--down"]) == 0
        assert capsys.readouterr().out == "S5#S17\nS5#S19\n"

    def test_unknown_fragment_exits_two(self, fx, capsys):
        assert run(["trace", "--project", str(fx / "crane.proj"),
                    "--fragment", "S9#S1", "--up"]) == 2
        capsys.readouterr()

    def test_direction_is_required(self, fx, capsys):
        assert run(["trace", "--project", str(fx / "crane.proj"),
                    "--fragment", "S5#S17"]) == 2
        capsys.readouterr()


class TestCheck:
    def test_all_fixture_files_pass(self, fx, capsys):
        files = _paths(fx, "geom.kb", "feat.kb", "rules.kb", "crane.asm",
                       "crane-bad.asm", "winch.asm", "crane.psa", "winch.psa",
                       "crane.proj")
        assert run(["check", *files]) == 0
        out, err = capsys.readouterr()
        assert out.count("OK ") == len(files)
        assert err == ""

    def test_broken_file_exits_two_but_checks_the_rest(self, fx, tmp_path, capsys):
        bad = tmp_path / "bad.kb"
        bad.write_text("spec x { class }")
        assert run(["check", str(bad), str(fx / "geom.kb")]) == 2
        out, err = capsys.readouterr()
        assert "error:" in err
        assert "OK" in out and "geom.kb" in out

    def test_warnings_go_to_stderr(self, tmp_path, capsys):
        psa = tmp_path / "loose.psa"
        psa.write_text('sketch "s.png"\nrequire geom:isParallelWith(a, b)')
        assert run(["check", str(psa)]) == 0
        out, err = capsys.readouterr()
        assert "OK" in out
        assert "warning" in err

    def test_unknown_extension_exits_two(self, tmp_path, capsys):
        other = tmp_path / "readme.txt"
        other.write_text("hello")
        assert run(["check", str(other)]) == 2
        capsys.readouterr()
