"""
Tests for the utils module.
"""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewlift.utils import (
    bits_of,
    block_unions,
    format_mask,
    format_rational,
    full_mask,
    lowest_bit,
    mask_of,
    parse_rational,
    popcount,
    sample_unions,
    small_selections,
    unions_of_blocks,
)


class TestMasks:
    """Tests for the bitset helpers."""

    def test_mask_of_and_bits_of(self):
        """Test that masks are built from indices and read back in order."""
        mask = mask_of([2, 0, 2])
        assert mask == 0b101
        assert bits_of(mask) == [0, 2]
        assert popcount(mask) == 2

    def test_negative_point_is_rejected(self):
        """Test that negative indices raise ValueError."""
        with pytest.raises(ValueError):
            mask_of([-1])

    def test_full_mask_and_lowest_bit(self):
        """Test full masks and least members."""
        assert full_mask(3) == 0b111
        assert lowest_bit(0b1100) == 2
        with pytest.raises(ValueError):
            lowest_bit(0)

    def test_format_mask(self):
        """Test that masks render as sorted index lists."""
        assert format_mask(0b101) == "{0,2}"
        assert format_mask(0) == "{}"

    @given(st.sets(st.integers(min_value=0, max_value=30)))
    def test_bits_round_trip(self, points):
        """Test that bits_of inverts mask_of for any set of indices."""
        assert bits_of(mask_of(points)) == sorted(points)


class TestUnions:
    """Tests for the enumeration of unions of blocks."""

    def test_unions_of_blocks_enumerates_power_set(self):
        """Test that every union of three blocks is produced once."""
        unions = list(unions_of_blocks([0b1, 0b10, 0b1100]))
        assert len(unions) == 8
        assert unions[0] == 0
        assert sorted(unions) == sorted(set(unions))
        assert 0b1111 in unions

    def test_sample_unions_starts_with_bounds(self):
        """Test that sampling always yields the empty and the full union first."""
        blocks = [0b1, 0b10, 0b100]
        sample = list(sample_unions(blocks, 5, seed=3))
        assert sample[:2] == [0, 0b111]
        assert len(sample) == 7
        assert all(s & ~0b111 == 0 for s in sample)

    def test_sample_unions_is_seeded(self):
        """Test that the same seed gives the same sample."""
        blocks = [1 << i for i in range(6)]
        assert list(sample_unions(blocks, 20, seed=7)) == list(sample_unions(blocks, 20, seed=7))

    def test_block_unions_switches_to_sampling(self):
        """Test that block_unions reports whether it enumerated everything."""
        blocks = [1 << i for i in range(4)]
        sets, exhaustive = block_unions(blocks, exhaustive_cap=4, sample_count=3)
        assert exhaustive is True
        assert len(list(sets)) == 16
        sets, exhaustive = block_unions(blocks, exhaustive_cap=3, sample_count=3)
        assert exhaustive is False
        assert len(list(sets)) == 5

    def test_small_selections(self):
        """Test that small_selections stops at the requested size."""
        unions = list(small_selections([0b1, 0b10, 0b100], 1))
        assert unions == [0, 0b1, 0b10, 0b100]


class TestRationals:
    """Tests for exact rational parsing and formatting."""

    def test_parse_forms(self):
        """Test that strings, ints and Fractions are accepted."""
        assert parse_rational("1/3") == Fraction(1, 3)
        assert parse_rational(" 2/4 ") == Fraction(1, 2)
        assert parse_rational(2) == Fraction(2)
        assert parse_rational(Fraction(3, 5)) == Fraction(3, 5)

    @pytest.mark.parametrize("value", [0.5, True, None, "abc", "1/0"])
    def test_parse_rejects(self, value):
        """Test that floats, booleans and malformed strings are rejected."""
        with pytest.raises(ValueError):
            parse_rational(value)

    def test_format_rational(self):
        """Test the num/den rendering, integers included."""
        assert format_rational(Fraction(1, 2)) == "1/2"
        assert format_rational(Fraction(3)) == "3/1"
        assert parse_rational(format_rational(Fraction(-7, 9))) == Fraction(-7, 9)
