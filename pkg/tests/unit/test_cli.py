"""
Unit tests for the command line.

Tests cover:
- Exit codes for each failure class
- The kneser subcommand output
- build-piece / assemble followed by verify
"""

import json
import os
import sys

import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from recforge import cli
from recforge.cli import (
    EXIT_CHECK,
    EXIT_INVALID,
    EXIT_IO,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_RESOURCE,
    build_parser,
    kneser_row,
    main,
)
from recforge.errors import ParameterError, RecforgeError


class TestParser:
    """Test argument parsing."""

    def test_caps_flags(self) -> None:
        """Should map the limit flags onto Caps field names."""
        args = build_parser().parse_args(["build-piece", "--k", "1", "--delta", "1/4", "--max-d", "8", "--budget", "5"])
        assert args.max_dimension == 8
        assert args.node_budget == 5
        assert args.strategy == "auto"
        assert args.modulus == 1

    def test_verify_defaults_to_strict(self) -> None:
        """Should be strict unless --lenient is given."""
        assert build_parser().parse_args(["verify", "x.json"]).strict is True
        assert build_parser().parse_args(["verify", "x.json", "--lenient"]).strict is False

    @pytest.mark.parametrize("argv", [[], ["kneser", "--n", "x"], ["build-piece", "--delta", "1/4"]])
    def test_usage_errors_exit_invalid(self, argv) -> None:
        """Should exit with 1, not argparse's 2, on usage errors."""
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == EXIT_INVALID


class TestKneser:
    """Test the kneser subcommand."""

    def test_petersen(self, capsys) -> None:
        """Should report chi(KG(5, 2)) = 3 as a match."""
        assert main(["kneser", "--n", "5", "--r", "2"]) == EXIT_OK
        assert "chi=3 formula=3 MATCH" in capsys.readouterr().out

    def test_no_edges(self, capsys) -> None:
        """Should short-circuit edgeless Kneser graphs."""
        assert main(["kneser", "--n", "3", "--r", "2"]) == EXIT_OK
        assert "chi=1 no-edges" in capsys.readouterr().out

    def test_budget_exhausted(self, capsys) -> None:
        """Should exit 2 with bounds when the solver budget runs out."""
        assert main(["kneser", "--n", "9", "--r", "3", "--budget", "0"]) == EXIT_RESOURCE
        assert "INEXACT" in capsys.readouterr().out

    def test_large_kneser_zero_budget(self) -> None:
        """Should report bounds only for KG(12, 5) without a budget."""
        assert main(["kneser", "--n", "12", "--r", "5", "--budget", "0"]) == EXIT_RESOURCE

    def test_missing_arguments(self) -> None:
        """Should need --n and --r without --sweep."""
        assert main(["kneser", "--n", "5"]) == EXIT_INVALID

    def test_sweep(self, capsys) -> None:
        """Should tabulate every small (n, r)."""
        assert main(["kneser", "--sweep", "6"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "MATCH" in out
        assert "MISMATCH" not in out

    def test_row(self) -> None:
        """Should fill the table row."""
        row = kneser_row(5, 2, None)
        assert (row["vertices"], row["edges"], row["chi"], row["formula"]) == (10, 15, 3, 3)


class TestBuildAndVerify:
    """Test build-piece, assemble and verify."""

    def test_build_piece_then_verify(self, tmp_path, capsys) -> None:
        """Should build a checked piece that verifies again from disk."""
        path = tmp_path / "piece.json"
        argv = ["build-piece", "--k", "1", "--delta", "1/4", "--strategy", "circle", "-o", str(path)]
        assert main(argv) == EXIT_OK
        document = json.loads(path.read_text(encoding="utf-8"))
        assert document["certificate"]["S"] == [6, 7]
        assert all(check["passed"] for check in document["checks"])
        assert main(["verify", str(path)]) == EXIT_OK
        assert "OK:" in capsys.readouterr().out

    def test_build_piece_default_route(self, tmp_path) -> None:
        """Should copy a Kneser edge when no strategy is given."""
        path = tmp_path / "edge.json"
        assert main(["build-piece", "--k", "1", "--delta", "1/4", "-o", str(path)]) == EXIT_OK
        document = json.loads(path.read_text(encoding="utf-8"))
        assert document["certificate"]["S"] == [509]
        assert main(["verify", str(path)]) == EXIT_OK

    def test_assemble_one_round(self, tmp_path) -> None:
        """Should emit the base round for K = 1."""
        path = tmp_path / "base.json"
        assert main(["assemble", "--delta", "1/4", "--K", "1", "-o", str(path)]) == EXIT_OK
        certificate = json.loads(path.read_text(encoding="utf-8"))["certificate"]
        assert certificate["S"] == [1]
        assert certificate["witness"]["m"] == 3
        assert certificate["complete"] is True

    def test_tampered_document(self, tmp_path, capsys) -> None:
        """Should exit 5 and name the failing check."""
        path = tmp_path / "base.json"
        assert main(["assemble", "--delta", "1/4", "--K", "1", "-o", str(path)]) == EXIT_OK
        document = json.loads(path.read_text(encoding="utf-8"))
        document["certificate"]["witness"]["B"] = [0, 1]
        path.write_text(json.dumps(document), encoding="utf-8")
        capsys.readouterr()
        assert main(["verify", str(path)]) == EXIT_CHECK
        assert "B∩(B+S)=∅" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "argv",
        [
            ["build-piece", "--k", "1", "--delta", "3/5"],
            ["build-piece", "--k", "1", "--delta", "1/4", "--modulus", "3"],
            ["build-piece", "--k", "1", "--delta", "1/4", "--E", "primes"],
            ["assemble", "--delta", "1/4", "--K", "0"],
            ["assemble", "--delta", "1/2", "--K", "1"],
        ],
    )
    def test_invalid_input(self, argv) -> None:
        """Should exit 1 on bad parameters."""
        assert main(argv) == EXIT_INVALID

    def test_dimension_cap(self, tmp_path, capsys) -> None:
        """Should exit 2 and name the stage when no dimension fits under --max-d."""
        path = tmp_path / "none.json"
        assert main(["build-piece", "--k", "9", "--delta", "0.49", "--max-d", "12", "-o", str(path)]) == EXIT_RESOURCE
        assert "FAILED stage=dimension" in capsys.readouterr().err
        assert not path.exists()

    def test_empty_document(self, tmp_path) -> None:
        """Should exit 4 on an unparseable document."""
        path = tmp_path / "empty.json"
        path.write_text("", encoding="utf-8")
        assert main(["verify", str(path)]) == EXIT_PARSE

    def test_missing_document(self, tmp_path) -> None:
        """Should exit 3 when the document cannot be read."""
        assert main(["verify", str(tmp_path / "absent.json")]) == EXIT_IO

    def test_internal_error_exits_resource(self, monkeypatch, capsys) -> None:
        """Should exit 2 when the construction raises a non-parameter error."""

        def broken(*args, **kwargs):
            raise RecforgeError("inconsistent evidence")

        monkeypatch.setattr(cli, "kriz_iterate", broken)
        assert main(["assemble", "--delta", "1/4", "--K", "2"]) == EXIT_RESOURCE
        assert "FAILED stage=assemble reason=inconsistent evidence" in capsys.readouterr().err

    def test_parameter_error_exits_invalid(self, monkeypatch) -> None:
        """Should exit 1 when the construction raises a ParameterError."""

        def broken(*args, **kwargs):
            raise ParameterError("bad modulus")

        monkeypatch.setattr(cli, "kriz_iterate", broken)
        assert main(["assemble", "--delta", "1/4", "--K", "2"]) == EXIT_INVALID


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
