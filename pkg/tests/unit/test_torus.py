"""
Unit tests for torus arithmetic, box unions and orbit scans.

Tests cover:
- TorusPoint reduction, norm and period
- Box unions: wrapping, measure, separation, union equality
- The box intersection identity for tilings of G_d, swept exhaustively in low dimension
- Pairwise disjointness of the 2^d tiles
- Lifting a nonrecurrent subset of G_d to a box union
- Choosing α for full coverage or for targets, and copying Cayley vertices along an orbit
- Copied differences landing in the thickened Hamming balls
- Equidistribution demos
"""

import os
import sys
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from recforge.errors import ParameterError, ResourceLimitError, SearchFailure
from recforge.f2core import BitVector
from recforge.streams import IntegerStream, finite_stream
from recforge.torus import (
    BoxSet,
    CopySpec,
    LiftResult,
    TorusPoint,
    box_intersection_lemma_check,
    box_separation,
    choose_alpha,
    copy_cayley_vertices,
    digit_alpha,
    empirical_box_density,
    golden_ratio_alpha,
    in_thickened_ball,
    lift_nonrecurrence,
    line_alpha,
    orbit_pattern,
    same_union,
    tilde_h_member,
    weyl_sum,
)

F = Fraction


class TestTorusPoint:
    """Test points of the torus."""

    def test_reduction_mod_one(self) -> None:
        """Should reduce coordinates into [0, 1)."""
        assert TorusPoint.of("3/2", -1, "-1/4").coords == (F(1, 2), F(0), F(3, 4))

    def test_norm_and_distance(self) -> None:
        """Should use the sup of circle distances."""
        p = TorusPoint.of("1/8", "7/8")
        assert p.norm() == F(1, 8)
        assert p.distance(TorusPoint.of("1/2", "1/2")) == F(3, 8)

    def test_period(self) -> None:
        """Should report the lcm of the denominators."""
        assert TorusPoint.of("1/4", "1/6").period == 12

    def test_from_g(self) -> None:
        """Should send x in F2^d to the half-integer point."""
        assert TorusPoint.from_g(BitVector.from_string("101")).coords == (F(1, 2), F(0), F(1, 2))

    def test_scale(self) -> None:
        """Should multiply modulo 1."""
        assert TorusPoint.of("1/3").scale(5).coords == (F(2, 3),)

    def test_dimension_mismatch(self) -> None:
        """Should refuse mixing dimensions."""
        with pytest.raises(ParameterError):
            TorusPoint.of(0) + TorusPoint.of(0, 0)


class TestBoxSet:
    """Test finite unions of closed boxes."""

    def test_wrapping_interval(self) -> None:
        """Should split an interval that wraps through 0."""
        boxes = BoxSet.from_intervals(1, [[("3/4", "1/4")]])
        assert len(boxes.boxes) == 2
        assert boxes.contains(TorusPoint.of(0))
        assert boxes.contains(TorusPoint.of("7/8"))
        assert not boxes.contains(TorusPoint.of("1/2"))

    def test_tiled_measure(self) -> None:
        """Should give |A|·(1/2 − 2ε)^d for a tiling."""
        boxes = BoxSet.tiled([0, 3], 2, F(1, 8))
        assert boxes.measure == 2 * F(1, 4) ** 2

    def test_measure_needs_disjoint(self) -> None:
        """Should refuse a plain sum over possibly overlapping boxes."""
        with pytest.raises(ParameterError):
            BoxSet.from_intervals(1, [[(0, "1/2")]]).measure

    def test_tiled_epsilon_range(self) -> None:
        """Should refuse ε outside (0, 1/4)."""
        with pytest.raises(ParameterError):
            BoxSet.tiled([0], 1, F(1, 4))

    def test_separation_fast_and_generic(self) -> None:
        """Should find the same 2ε gap with and without the tiling fast path."""
        left = BoxSet.tiled([0], 1, F(1, 8))
        right = BoxSet.tiled([1], 1, F(1, 8))
        assert box_separation(left, right) == F(1, 4)
        assert box_separation(BoxSet(1, left.boxes), BoxSet(1, right.boxes)) == F(1, 4)

    def test_separation_zero_and_empty(self) -> None:
        """Should give 0 for overlapping unions and None for empty ones."""
        a = BoxSet.from_intervals(1, [[(0, "1/2")]])
        b = BoxSet.from_intervals(1, [[("1/4", "3/4")]])
        assert box_separation(a, b) == 0
        assert box_separation(a, BoxSet(1, ())) is None

    def test_same_union(self) -> None:
        """Should compare the covered points, not the box lists."""
        whole = BoxSet.from_intervals(1, [[(0, "1/2")]])
        halves = BoxSet.from_intervals(1, [[(0, "1/4")], [("1/4", "1/2")]])
        quarter = BoxSet.from_intervals(1, [[(0, "1/4")]])
        assert same_union(whole, halves)
        assert not same_union(whole, quarter)

    def test_translate_tiling(self) -> None:
        """Should move tile w to tile w xor t under a half-integer shift."""
        boxes = BoxSet.tiled([1], 2, F(1, 8))
        moved = boxes.translate(TorusPoint.of("1/2", "1/2"))
        assert moved.tiles[1] == frozenset({2})

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(min_value=1, max_value=6).flatmap(
            lambda d: st.tuples(
                st.just(d),
                st.sets(st.integers(min_value=0, max_value=(1 << d) - 1), min_size=1, max_size=4),
                st.integers(min_value=0, max_value=(1 << d) - 1),
                st.sampled_from([F(1, 8), F(1, 16)]),
            )
        )
    )
    def test_box_intersection_identity(self, case) -> None:
        """Should satisfy A□ ∩ (A□ + t) = (A ∩ (A + t))□."""
        dim, words, shift, epsilon = case
        assert box_intersection_lemma_check(words, shift, dim, epsilon)

    @pytest.mark.parametrize("bounds", ["()", "[)", "(]"])
    def test_open_intervals_rejected(self, bounds: str) -> None:
        """Should refuse open and half-open intervals."""
        with pytest.raises(ParameterError):
            BoxSet.from_intervals(1, [[(0, "1/4")]], bounds=bounds)

    def test_unknown_bounds(self) -> None:
        """Should refuse bounds that name no interval kind."""
        with pytest.raises(ParameterError):
            BoxSet.from_intervals(1, [[(0, "1/4")]], bounds="<>")

    @pytest.mark.parametrize("dim", range(1, 9))
    def test_tiles_pairwise_disjoint(self, dim: int) -> None:
        """Should keep the 2^d tiles at ε = 1/8 pairwise apart."""
        epsilon = F(1, 8)
        tiles = [BoxSet(dim, BoxSet.tiled([w], dim, epsilon).boxes) for w in range(1 << dim)]
        for a, b in combinations(tiles, 2):
            assert a.intersection(b).boxes == ()
            assert box_separation(a, b) == 2 * epsilon
        assert BoxSet.tiled(range(1 << dim), dim, epsilon).measure == F(1, 2) ** dim


def _word_sets(dim: int, max_size: int):
    words = range(1 << dim)
    for size in range(1, max_size + 1):
        yield from combinations(words, size)


class TestBoxIntersectionSweep:
    """Test the box intersection identity over every small A and t."""

    @pytest.mark.parametrize("epsilon", [F(1, 8), F(1, 16)])
    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_all_sets_up_to_four(self, dim: int, epsilon: Fraction) -> None:
        """Should hold for every A ⊆ G_d with |A| ≤ 4 and every t."""
        for words in _word_sets(dim, 4):
            for shift in range(1 << dim):
                assert box_intersection_lemma_check(words, shift, dim, epsilon), (words, shift)

    @pytest.mark.slow
    @pytest.mark.parametrize("epsilon", [F(1, 8), F(1, 16)])
    @pytest.mark.parametrize("dim", [4, 5, 6])
    def test_all_pairs(self, dim: int, epsilon: Fraction) -> None:
        """Should hold for every A ⊆ G_d with |A| ≤ 2 and every t."""
        for words in _word_sets(dim, 2):
            for shift in range(1 << dim):
                assert box_intersection_lemma_check(words, shift, dim, epsilon), (words, shift)


class TestLift:
    """Test lift_nonrecurrence."""

    def test_ball_in_three_dims(self) -> None:
        """Should lift A = H_1(0), R = {1} in dimension 3 with inset 1/32."""
        result = lift_nonrecurrence([0, 1, 2, 4], [7], 3, F(1, 4))
        assert isinstance(result, LiftResult)
        assert result.epsilon_prime == F(1, 32)
        assert result.separation == F(1, 16)
        assert result.epsilon == F(1, 32)
        assert result.measure == F(343, 1024)
        assert result.boxes.measure == result.measure

    def test_lift_keeps_shift_clear(self) -> None:
        """Should keep B + R + V_ε away from B."""
        result = lift_nonrecurrence([0, 1, 2, 4], [7], 3, F(1, 4))
        shifted = result.boxes.translate(TorusPoint.of("1/2", "1/2", "1/2"))
        assert box_separation(result.boxes, shifted) >= result.epsilon

    def test_fixed_inset(self) -> None:
        """Should use a given inset when it is large enough."""
        result = lift_nonrecurrence([0, 1, 2, 4], [7], 3, F(1, 4), epsilon_prime=F(1, 64))
        assert result.epsilon_prime == F(1, 64)

    def test_fixed_inset_too_large(self) -> None:
        """Should fail when the given inset leaves too little measure."""
        result = lift_nonrecurrence([0, 1, 2, 4], [7], 3, F(1, 4), epsilon_prime=F(1, 8))
        assert isinstance(result, SearchFailure)

    def test_overlap_rejected(self) -> None:
        """Should raise when A meets A + R."""
        with pytest.raises(ParameterError):
            lift_nonrecurrence([0, 7], [7], 3, F(1, 4))

    def test_empty_and_small(self) -> None:
        """Should fail on empty or too sparse A."""
        assert isinstance(lift_nonrecurrence([], [7], 3, F(1, 4)), SearchFailure)
        assert isinstance(lift_nonrecurrence([0], [7], 3, F(1, 4)), SearchFailure)


class TestCopies:
    """Test ε-copies of Hamming balls."""

    def test_thickened_ball(self) -> None:
        """Should count coordinates near 0 against k."""
        point = TorusPoint.of("1/2", "1/32")
        assert in_thickened_ball(point, 1, F(1, 16))
        assert not in_thickened_ball(point, 0, F(1, 16))
        assert not in_thickened_ball(TorusPoint.of("1/4", "1/2"), 2, F(1, 16))

    def test_tilde_h_member(self) -> None:
        """Should test nα against H_k(½) + V_ε."""
        spec = CopySpec(TorusPoint.of("1/2", "1/2"), 0, F(1, 8))
        assert tilde_h_member(1, spec)
        assert not tilde_h_member(2, spec)
        assert tilde_h_member(2, CopySpec(spec.alpha, 2, F(1, 8)))

    def test_copy_spec_validation(self) -> None:
        """Should refuse non-positive ε."""
        with pytest.raises(ParameterError):
            CopySpec(TorusPoint.of(0), 0, 0)


class TestOrbits:
    """Test α search, vertex copying and orbit patterns."""

    def test_digit_alpha(self) -> None:
        """Should put 1/(step·Q^(d−j)) in coordinate j."""
        assert digit_alpha(2, 4).coords == (F(1, 16), F(1, 4))
        assert digit_alpha(1, 4, 3).coords == (F(1, 12),)

    def test_choose_alpha_covers_grid(self) -> None:
        """Should find α whose orbit hits all 16 cells, with valid witnesses."""
        choice = choose_alpha(IntegerStream("all"), 2, F(1, 4), horizon=1000)
        assert choice.q == 4
        assert len(choice.witness_hits) == 16
        for cell, n in choice.witness_hits.items():
            position = choice.alpha.scale(n).coords
            assert tuple(int(4 * x) for x in position) == cell

    def test_choose_alpha_horizon(self) -> None:
        """Should fail when the horizon has fewer elements than cells."""
        result = choose_alpha(IntegerStream("all"), 2, 4, horizon=10)
        assert isinstance(result, SearchFailure)
        assert result.stage == "choose_alpha"

    def test_choose_alpha_finite_stream(self) -> None:
        """Should refuse finite E."""
        with pytest.raises(ParameterError):
            choose_alpha(finite_stream([1, 2, 3]), 1, 2)

    def test_choose_alpha_cell_cap(self) -> None:
        """Should refuse Q^d above max_cells."""
        with pytest.raises(ResourceLimitError):
            choose_alpha(IntegerStream("all"), 3, 4, max_cells=8)

    def test_copy_vertices(self) -> None:
        """Should pick the first n with ‖nα − v‖ < ε/2."""
        target = TorusPoint.of("1/2")
        chosen = copy_cayley_vertices(IntegerStream("all"), TorusPoint.of("1/10"), [target], F(1, 5), horizon=100)
        assert chosen == {target: 5}

    def test_line_alpha(self) -> None:
        """Should weight half coordinates 1 and zero coordinates 2 over 4Q + 1."""
        assert line_alpha(TorusPoint.of("1/2", 0), 4).coords == (F(1, 17), F(2, 17))
        assert line_alpha(TorusPoint.of("1/4", 0), 4) is None
        assert line_alpha(TorusPoint.of(0, 0), 4) is None

    def test_choose_alpha_targets(self) -> None:
        """Should reach 0 and ½⃗ at Q = 256 in dimension 4 without the Q^d cap."""
        half = TorusPoint.of("1/2", "1/2", "1/2", "1/2")
        targets = [TorusPoint.from_g(BitVector.zero(4)), half]
        choice = choose_alpha(IntegerStream("all"), 4, 256, targets=targets)
        assert choice.candidate == "line"
        assert choice.alpha.coords == (F(1, 1025),) * 4
        assert len(choice.witness_hits) == 2
        for v in targets:
            n = choice.witness_hits[tuple(int(c * 256) for c in v.coords)]
            assert choice.alpha.scale(n).distance(v) < F(1, 256)

    def test_choose_alpha_targets_period_cap(self) -> None:
        """Should skip candidates whose period exceeds max_cells."""
        targets = [TorusPoint.of(0, 0), TorusPoint.of("1/2", "1/2")]
        result = choose_alpha(IntegerStream("all"), 2, 256, max_cells=100, targets=targets)
        assert isinstance(result, SearchFailure)
        assert result.details["covered"] == 0

    def test_copied_differences_in_balls(self) -> None:
        """Should put g_v − g_w in H̃(α; k, ε) exactly when v − w has at most k zero coordinates."""
        dim, epsilon = 2, F(1, 8)
        stream = IntegerStream("all")
        choice = choose_alpha(stream, dim, F(1, 16), horizon=5000)
        vertices = [TorusPoint.from_g(BitVector(dim, w)) for w in range(1 << dim)]
        chosen = copy_cayley_vertices(stream, choice.alpha, vertices, epsilon, horizon=5000)
        assert set(chosen) == set(vertices)
        for v, w in permutations(vertices, 2):
            zeros = sum(1 for c in (v - w).coords if c == 0)
            difference = chosen[v] - chosen[w]
            assert tilde_h_member(difference, CopySpec(choice.alpha, zeros, epsilon))
            if zeros:
                assert not tilde_h_member(difference, CopySpec(choice.alpha, zeros - 1, epsilon))

    def test_copy_vertices_unreached(self) -> None:
        """Should fail when no orbit point comes close."""
        result = copy_cayley_vertices(
            IntegerStream("all"), TorusPoint.of("1/2"), [TorusPoint.of("1/4")], F(1, 5), horizon=100
        )
        assert isinstance(result, SearchFailure)

    def test_orbit_pattern(self) -> None:
        """Should list n mod 4 with n/4 in [0, 1/4]."""
        period, mask = orbit_pattern(TorusPoint.of("1/4"), BoxSet.from_intervals(1, [[(0, "1/4")]]))
        assert period == 4
        assert mask.tolist() == [True, True, False, False]

    def test_orbit_pattern_cap(self) -> None:
        """Should refuse periods above max_cells."""
        with pytest.raises(ResourceLimitError):
            orbit_pattern(TorusPoint.of("1/1000"), BoxSet.from_intervals(1, [[(0, "1/4")]]), max_cells=100)


class TestEquidistribution:
    """Test the density and Weyl sum demos."""

    def test_rational_density(self) -> None:
        """Should count hits exactly for rational α."""
        boxes = BoxSet.from_intervals(1, [[(0, "1/4")]])
        assert empirical_box_density(TorusPoint.of("1/4"), boxes, 8) == F(1, 2)
        assert empirical_box_density(TorusPoint.of("1/2"), boxes, 10**6) == F(1, 2)

    def test_golden_density(self) -> None:
        """Should approach the box measure for the golden rotation."""
        boxes = BoxSet.from_intervals(1, [[(0, "1/4")]])
        density = empirical_box_density(golden_ratio_alpha(), boxes, 10**6)
        assert abs(float(density) - 0.25) < 0.005

    def test_weyl_sum(self) -> None:
        """Should vanish for h·α non-integral over a full period and equal 1 otherwise."""
        assert weyl_sum(F(1, 4), 1, 4) < 1e-9
        assert abs(weyl_sum(F(1, 4), 4, 4) - 1.0) < 1e-9
        assert weyl_sum(golden_ratio_alpha(), 1, 10**5) < 0.01

    def test_bad_n(self) -> None:
        """Should refuse N < 1."""
        with pytest.raises(ParameterError):
            weyl_sum(F(1, 4), 1, 0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
