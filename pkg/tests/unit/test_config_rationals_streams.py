"""
Unit tests for configuration, rational helpers and integer streams.

Tests cover:
- Environment-driven caps and per-call overrides
- Exact "p/q" parsing and formatting
- The E grammar and difference-membership oracles
"""

import os
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from recforge.config import DEFAULT_MAX_CELLS, Caps, get_max_cells, get_node_budget
from recforge.errors import ParameterError, SearchFailure
from recforge.rationals import (
    circle_norm,
    format_fraction,
    frac_mod1,
    parse_fraction,
    require_open_half,
    to_fraction,
)
from recforge.streams import finite_stream, is_power_difference, parse_stream_spec


class TestCaps:
    """Test environment getters and the Caps value."""

    def test_default_when_unset(self, monkeypatch) -> None:
        """Should fall back to the default when the variable is missing."""
        monkeypatch.delenv("RECFORGE_MAX_CELLS", raising=False)
        assert get_max_cells() == DEFAULT_MAX_CELLS

    def test_env_override(self, monkeypatch) -> None:
        """Should read RECFORGE_MAX_CELLS from the environment."""
        monkeypatch.setenv("RECFORGE_MAX_CELLS", "1024")
        assert get_max_cells() == 1024
        assert Caps.from_env().max_cells == 1024

    def test_non_integer_env_ignored(self, monkeypatch) -> None:
        """Should ignore a malformed value and keep the default."""
        monkeypatch.setenv("RECFORGE_NODE_BUDGET", "lots")
        assert get_node_budget() == Caps().node_budget

    def test_with_overrides_skips_none(self) -> None:
        """Should apply only the overrides that are set."""
        caps = Caps().with_overrides(max_dimension=12, max_cells=None)
        assert caps.max_dimension == 12
        assert caps.max_cells == DEFAULT_MAX_CELLS

    def test_with_overrides_rejects_unknown(self) -> None:
        """Should refuse caps that do not exist."""
        with pytest.raises(TypeError):
            Caps().with_overrides(colours=3)

    def test_as_dict(self) -> None:
        """Should expose every cap by name."""
        data = Caps().as_dict()
        assert set(data) == {
            "max_cells",
            "max_dimension",
            "max_modulus",
            "max_set_size",
            "node_budget",
            "horizon",
            "seed",
        }


class TestRationals:
    """Test exact rational helpers."""

    def test_parse_fraction(self) -> None:
        """Should parse 'p/q' exactly."""
        assert parse_fraction("1/4") == Fraction(1, 4)

    def test_parse_fraction_requires_slash(self) -> None:
        """Should reject plain decimals where 'p/q' is required."""
        with pytest.raises(ParameterError):
            parse_fraction("0.25")

    def test_to_fraction_float_uses_decimal_repr(self) -> None:
        """Should turn 0.45 into 9/20 rather than its binary approximation."""
        assert to_fraction(0.45) == Fraction(9, 20)

    def test_to_fraction_rejects_bool(self) -> None:
        """Should not treat booleans as numbers."""
        with pytest.raises(ParameterError):
            to_fraction(True)

    def test_format_keeps_denominator(self) -> None:
        """Should always print the denominator."""
        assert format_fraction(Fraction(3)) == "3/1"
        assert format_fraction(Fraction(2, 6)) == "1/3"

    @pytest.mark.parametrize("bad", ["0", "1/2", "3/5", "-1/8"])
    def test_require_open_half_rejects(self, bad: str) -> None:
        """Should reject densities outside (0, 1/2)."""
        with pytest.raises(ParameterError):
            require_open_half(bad)

    def test_require_open_half_accepts_decimal(self) -> None:
        """Should accept a decimal string inside the interval."""
        assert require_open_half("0.49") == Fraction(49, 100)

    def test_mod1_and_norm(self) -> None:
        """Should reduce mod 1 and measure the distance to the nearest integer."""
        assert frac_mod1(Fraction(-1, 4)) == Fraction(3, 4)
        assert circle_norm(Fraction(7, 4)) == Fraction(1, 4)
        assert circle_norm(Fraction(1, 2)) == Fraction(1, 2)

    @given(st.fractions())
    def test_norm_bounds(self, value: Fraction) -> None:
        """Should keep the circle norm within [0, 1/2]."""
        assert 0 <= circle_norm(value) <= Fraction(1, 2)


class TestStreams:
    """Test the E grammar and its oracles."""

    def test_all(self) -> None:
        """Should enumerate the non-negative integers."""
        stream = parse_stream_spec("all")
        assert stream.take(4) == [0, 1, 2, 3]
        assert stream.is_difference(12345)

    def test_arith(self) -> None:
        """Should follow a + d·n and decide differences by divisibility."""
        stream = parse_stream_spec("arith:3,5")
        assert stream.take(3) == [3, 8, 13]
        assert stream.is_difference(15)
        assert not stream.is_difference(7)
        assert stream.describe() == "arith:3,5"

    def test_powers(self) -> None:
        """Should list powers of the base."""
        assert parse_stream_spec("powers:2").take(5) == [1, 2, 4, 8, 16]

    @pytest.mark.parametrize("value,expected", [(1, True), (6, True), (7, True), (5, False), (255, True), (65280, True)])
    def test_power_difference(self, value: int, expected: bool) -> None:
        """Should recognise 2^i − 2^j exactly."""
        assert is_power_difference(value, 2) is expected

    @given(st.integers(min_value=0, max_value=30), st.integers(min_value=0, max_value=30))
    def test_power_difference_property(self, i: int, j: int) -> None:
        """Should accept every difference of two powers of three."""
        assert is_power_difference(abs(3**i - 3**j), 3)

    def test_file_stream(self, tmp_path) -> None:
        """Should read integers and skip blank lines and comments."""
        path = tmp_path / "e.txt"
        path.write_text("# squares\n1\n4\n\n9  # nine\n16\n")
        stream = parse_stream_spec(f"file:{path}")
        assert stream.take(10) == [1, 4, 9, 16]
        assert stream.is_difference(5)
        assert not stream.is_difference(2)
        assert stream.infinite

    @pytest.mark.parametrize("text", ["", "arith:1", "arith:1,0", "powers:1", "primes", "file:/no/such/file"])
    def test_bad_descriptions(self, text: str) -> None:
        """Should reject malformed descriptions."""
        with pytest.raises(ParameterError):
            parse_stream_spec(text)

    def test_congruent_filter(self) -> None:
        """Should keep only one residue class and remember its root."""
        stream = parse_stream_spec("powers:2").congruent(3, 1)
        assert stream.take(3) == [1, 4, 16]
        assert stream.root.kind == "powers"
        assert stream.infinite

    def test_common_step(self) -> None:
        """Should report the gcd of consecutive differences."""
        assert parse_stream_spec("arith:2,6").common_step() == 6
        assert finite_stream([5]).common_step() == 1

    def test_finite_stream_is_finite(self) -> None:
        """Should flag finite streams."""
        assert not finite_stream([1, 2, 3]).infinite


class TestSearchFailure:
    """Test the failure value."""

    def test_describe(self) -> None:
        """Should name the stage, reason and details."""
        failure = SearchFailure("dimension", "no d", {"max_d": 12})
        assert not failure.success
        assert failure.describe() == "dimension: no d (max_d=12)"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
