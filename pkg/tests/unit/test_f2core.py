"""
Unit tests for F2^d arithmetic and Hamming balls.

Tests cover:
- BitVector group laws and string form
- Ball cardinality, enumeration and the cell cap
- Ball difference and intersection identities, checked against plain loops
- The Hamming-ball nonrecurrence witness
"""

import os
import sys
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from recforge.errors import ParameterError, ResourceLimitError, SearchFailure
from recforge.f2core import (
    BitVector,
    F2Witness,
    HammingBallSpec,
    ball_cardinality,
    ball_difference,
    balls_intersect,
    enumerate_ball,
    f2_nonrecurrence_witness,
    hamming_weight,
)


def vectors(dim: int):
    return st.integers(min_value=0, max_value=(1 << dim) - 1).map(lambda bits: BitVector(dim, bits))


class TestBitVector:
    """Test the F2^d element type."""

    def test_from_string_orders_coordinates(self) -> None:
        """Should treat character i as coordinate i."""
        v = BitVector.from_string("100")
        assert v.bits == 1
        assert v[0] == 1 and v[2] == 0
        assert v.to_string() == "100"

    def test_rejects_bad_strings(self) -> None:
        """Should refuse anything but 0/1 characters."""
        with pytest.raises(ParameterError):
            BitVector.from_string("10a")

    def test_rejects_oversized_bits(self) -> None:
        """Should refuse bits outside the dimension."""
        with pytest.raises(ParameterError):
            BitVector(3, 8)

    def test_dimension_mismatch(self) -> None:
        """Should refuse adding vectors of different dimensions."""
        with pytest.raises(ParameterError):
            BitVector(3, 1) + BitVector(4, 1)

    @given(vectors(12), vectors(12), vectors(12))
    def test_group_laws(self, a: BitVector, b: BitVector, c: BitVector) -> None:
        """Should form an elementary abelian 2-group."""
        zero = BitVector.zero(12)
        assert a + b == b + a
        assert (a + b) + c == a + (b + c)
        assert a + zero == a
        assert a + a == zero
        assert -a == a
        assert a - b == a + b

    @given(vectors(10), vectors(10))
    def test_weight_triangle(self, a: BitVector, b: BitVector) -> None:
        """Should satisfy w(a + b) <= w(a) + w(b)."""
        assert hamming_weight(a + b) <= hamming_weight(a) + hamming_weight(b)


class TestHammingBalls:
    """Test ball sizes, enumeration and identities."""

    def test_cardinality_d10_r4(self) -> None:
        """Should count 1 + 10 + 45 + 120 + 210 vectors."""
        assert ball_cardinality(10, 4) == 386

    def test_enumeration_matches_cardinality(self) -> None:
        """Should enumerate exactly |H_r| vectors, all within radius r of the center."""
        center = BitVector.from_string("110010")
        spec = HammingBallSpec(6, 2, center)
        members = enumerate_ball(spec)
        assert len(members) == spec.cardinality == 22
        assert all(hamming_weight(center - x) <= 2 for x in members)

    def test_center_defaults_to_zero(self) -> None:
        """Should center the ball at 0 when no center is given."""
        assert HammingBallSpec(5, 1).center == BitVector.zero(5)

    def test_radius_out_of_range(self) -> None:
        """Should reject radii larger than the dimension."""
        with pytest.raises(ParameterError):
            HammingBallSpec(4, 5)

    def test_cell_cap(self) -> None:
        """Should refuse to enumerate when 2^d exceeds max_cells."""
        with pytest.raises(ResourceLimitError):
            enumerate_ball(HammingBallSpec(12, 2), max_cells=1024)

    @pytest.mark.parametrize("dim", range(1, 8))
    def test_difference_is_sum_ball(self, dim: int) -> None:
        """Should give H_a(0) − H_b(0) = H_{a+b}(0)."""
        for a, b in product(range(dim + 1), repeat=2):
            diff = ball_difference(HammingBallSpec(dim, a), HammingBallSpec(dim, b))
            assert diff == enumerate_ball(HammingBallSpec(dim, min(a + b, dim)))

    @pytest.mark.parametrize("dim", range(1, 7))
    def test_intersection_rule(self, dim: int) -> None:
        """Should intersect exactly when w(x − y) <= a + b."""
        for x_bits, y_bits in product(range(1 << dim), [0, (1 << dim) - 1]):
            x, y = BitVector(dim, x_bits), BitVector(dim, y_bits)
            for a, b in product(range(dim + 1), repeat=2):
                expected = hamming_weight(x - y) <= a + b
                assert balls_intersect(HammingBallSpec(dim, a, x), HammingBallSpec(dim, b, y)) is expected

    @pytest.mark.slow
    @pytest.mark.parametrize("dim", range(8, 13))
    def test_identities_large_dims(self, dim: int) -> None:
        """Should keep both identities up to dimension 12."""
        for a, b in [(0, 1), (1, 2), (2, 3), (dim // 2, dim // 2)]:
            diff = ball_difference(HammingBallSpec(dim, a), HammingBallSpec(dim, b))
            assert len(diff) == ball_cardinality(dim, min(a + b, dim))
            ones = BitVector.ones(dim)
            assert balls_intersect(HammingBallSpec(dim, a), HammingBallSpec(dim, b, ones)) is (dim <= a + b)


class TestF2Witness:
    """Test f2_nonrecurrence_witness."""

    def test_d10_k1(self) -> None:
        """Should return the radius 4 ball with 386 elements."""
        witness = f2_nonrecurrence_witness(10, 1, Fraction(1, 4))
        assert isinstance(witness, F2Witness)
        assert witness.radius == 4
        assert witness.size == 386
        assert witness.density > Fraction(1, 4)

    def test_difference_set_avoids_forbidden_ball(self) -> None:
        """Should keep A − A = H_{2 radius}(0) away from H_k(1)."""
        witness = f2_nonrecurrence_witness(10, 1, Fraction(1, 4))
        differences = HammingBallSpec(10, 2 * witness.radius)
        assert not balls_intersect(differences, witness.forbidden)

    def test_members_by_brute_force(self) -> None:
        """Should have (A − A) ∩ H_k(1) empty when checked pair by pair."""
        witness = f2_nonrecurrence_witness(7, 1, Fraction(1, 10))
        members = witness.members()
        forbidden = witness.forbidden
        assert all(not forbidden.contains(a - b) for a in members for b in members)

    def test_too_small(self) -> None:
        """Should fail when the ball is below the density threshold."""
        result = f2_nonrecurrence_witness(10, 1, Fraction(49, 100))
        assert isinstance(result, SearchFailure)
        assert result.reason == "ball too small"

    def test_even_d_k0_meets_forbidden(self) -> None:
        """Should fail when 2 radius + k reaches d."""
        result = f2_nonrecurrence_witness(4, 0, Fraction(1, 4))
        assert isinstance(result, SearchFailure)
        assert not result.success

    @pytest.mark.parametrize("args", [(10, 1, "1/2"), (0, 1, "1/4"), (10, -1, "1/4"), (4, 3, "1/4")])
    def test_invalid_input(self, args) -> None:
        """Should raise on invalid parameters."""
        with pytest.raises(ParameterError):
            f2_nonrecurrence_witness(*args)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
