"""
Tests for the finspace module.
"""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewlift.finspace import (
    FinMeasure,
    GroundSet,
    InputError,
    MSet,
    SigmaAlg,
    completion,
    envelope,
    inner_measure,
    is_envelope,
    is_measurable,
    outer_measure,
    sigma_generate,
)
from skewlift.utils import union_of

HALF = Fraction(1, 2)


@st.composite
def measures(draw, max_size=6):
    """A measure with some zero weights on a random partition."""
    size = draw(st.integers(min_value=1, max_value=max_size))
    raw = draw(st.lists(st.integers(0, 4), min_size=size, max_size=size))
    if sum(raw) == 0:
        raw[0] = 1
    weights = tuple(Fraction(v, sum(raw)) for v in raw)
    labels = draw(st.lists(st.integers(0, size - 1), min_size=size, max_size=size))
    blocks = {}
    for point, label in enumerate(labels):
        blocks[label] = blocks.get(label, 0) | (1 << point)
    algebra = SigmaAlg(GroundSet(size), tuple(blocks.values()))
    return FinMeasure(algebra, weights)


class TestGroundSet:
    """Tests for ground sets and point sets."""

    def test_size_limits(self):
        """Test that empty and oversized ground sets are rejected."""
        with pytest.raises(InputError):
            GroundSet(0)
        with pytest.raises(InputError):
            GroundSet(17)
        assert GroundSet(17, cap=20).full == (1 << 17) - 1

    def test_check_rejects_outside_points(self):
        """Test that a mask outside the ground set carries its stray points."""
        ground = GroundSet(3)
        with pytest.raises(InputError) as exc_info:
            ground.check(0b1001)
        assert exc_info.value.witness == 0b1001

    def test_mset_operations(self):
        """Test set algebra on MSet values."""
        ground = GroundSet(4)
        a = ground.subset([0, 1])
        assert (a | [2]).members() == [0, 1, 2]
        assert (a & 0b10).members() == [1]
        assert (a - [0]).members() == [1]
        assert a.complement().members() == [2, 3]
        assert 1 in a and 3 not in a
        assert a.issubset([0, 1, 3])
        assert str(a) == "{0,1}"

    def test_mset_from_another_ground_is_rejected(self):
        """Test that sets over different ground sets do not mix."""
        with pytest.raises(InputError):
            GroundSet(3).subset([0]) | MSet(GroundSet(4), 1)


class TestSigmaAlg:
    """Tests for σ-algebras given by atoms."""

    def test_atoms_must_partition(self):
        """Test that overlapping or incomplete atoms are rejected."""
        ground = GroundSet(3)
        with pytest.raises(InputError):
            SigmaAlg(ground, (0b011, 0b110))
        with pytest.raises(InputError):
            SigmaAlg(ground, (0b001, 0b010))
        with pytest.raises(InputError):
            SigmaAlg(ground, (0, 0b111))

    def test_equality_ignores_atom_order(self):
        """Test that the same partition gives equal algebras."""
        ground = GroundSet(3)
        assert SigmaAlg(ground, (0b110, 0b001)) == SigmaAlg(ground, (0b001, 0b110))

    def test_cover_interior_and_measurability(self):
        """Test covers and interiors against the atoms {0,1} and {2}."""
        alg = SigmaAlg.from_blocks(GroundSet(3), [[0, 1], [2]])
        assert alg.cover(0b001) == 0b011
        assert alg.interior(0b101) == 0b100
        assert alg.is_measurable(0b011)
        assert not alg.is_measurable(0b001)
        assert is_measurable(alg, [2])
        assert len(list(alg.measurable_sets())) == 4
        assert alg.blocks() == [[0, 1], [2]]
        assert str(alg) == "{{0,1},{2}}"

    def test_coarsens_and_join(self):
        """Test refinement order and joins."""
        ground = GroundSet(4)
        coarse = SigmaAlg.from_blocks(ground, [[0, 1], [2, 3]])
        other = SigmaAlg.from_blocks(ground, [[0, 2], [1, 3]])
        assert SigmaAlg.trivial(ground).coarsens(coarse)
        assert coarse.coarsens(SigmaAlg.discrete(ground))
        assert not coarse.coarsens(other)
        assert coarse.join(other) == SigmaAlg.discrete(ground)


class TestSigmaGenerate:
    """Tests for sigma_generate."""

    def test_empty_family_gives_single_atom(self):
        """Test that no generators give the trivial algebra."""
        ground = GroundSet(3)
        assert sigma_generate(ground, []) == SigmaAlg.trivial(ground)

    def test_one_generator(self):
        """Test that {0} on three points gives {{0},{1,2}}."""
        ground = GroundSet(3)
        assert sigma_generate(ground, [[0]]).blocks() == [[0], [1, 2]]

    def test_overlapping_generators(self):
        """Test that {0,1} and {1,2} on four points separate every point."""
        ground = GroundSet(4)
        alg = sigma_generate(ground, [[0, 1], [1, 2]])
        assert alg.blocks() == [[0], [1], [2], [3]]

    @given(st.integers(1, 6).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=4))
    ))
    def test_generators_are_measurable(self, data):
        """Test that every generator is measurable for the generated algebra."""
        size, sets = data
        alg = sigma_generate(GroundSet(size), sets)
        assert all(alg.is_measurable(s) for s in sets)
        assert len(alg) <= 2 ** len(sets)


class TestFinMeasure:
    """Tests for measures given by point weights."""

    def test_weights_must_sum_to_one(self):
        """Test that weights off the simplex are rejected."""
        with pytest.raises(InputError):
            FinMeasure.from_weights(["1/2", "1/3"])
        with pytest.raises(InputError):
            FinMeasure.from_weights(["3/2", "-1/2"])
        with pytest.raises(InputError):
            FinMeasure.from_weights(["1/2", "1/2"], SigmaAlg.discrete(GroundSet(3)))

    def test_null_and_positive_parts(self):
        """Test that null sets are the sets of zero-weight points."""
        m = FinMeasure(
            SigmaAlg.from_blocks(GroundSet(3), [[0, 1], [2]]), (HALF, HALF, Fraction(0))
        )
        assert m.null_points == 0b100
        assert m.is_null(0b100)
        assert not m.is_null(0b110)
        assert m.positive_atoms == (0b011,)
        assert m.null_atoms == (0b100,)
        assert m.positive_part(0b111) == 0b011
        assert m.measure(0b010) == HALF
        assert m.integral([Fraction(2), Fraction(4), Fraction(9)]) == 3

    def test_null_sigma(self):
        """Test that σ(null sets) keeps null atoms and merges positive ones."""
        m = FinMeasure.from_weights([HALF, HALF, 0])
        assert m.null_sigma().blocks() == [[0, 1], [2]]

    def test_restrict_needs_a_sub_algebra(self):
        """Test that restriction to a non-coarser algebra fails."""
        ground = GroundSet(2)
        m = FinMeasure(SigmaAlg.trivial(ground), (HALF, HALF))
        with pytest.raises(InputError):
            m.restrict(SigmaAlg.discrete(ground))


class TestInnerOuterEnvelopes:
    """Tests for inner/outer measures and envelopes."""

    def setup_method(self):
        self.ground = GroundSet(4)
        self.m = FinMeasure.uniform(self.ground)
        self.sub = SigmaAlg.from_blocks(self.ground, [[0, 1], [2, 3]])

    def test_inner_and_outer_measure(self):
        """Test that {0} has inner measure 0 and outer measure 1/2."""
        assert inner_measure(self.m, self.sub, [0]) == 0
        assert outer_measure(self.m, self.sub, [0]) == HALF

    def test_sub_algebra_is_checked(self):
        """Test that the sub-σ-algebra must coarsen the measure's algebra."""
        coarse = FinMeasure(self.sub, self.m.weights)
        with pytest.raises(InputError):
            inner_measure(coarse, SigmaAlg.discrete(self.ground), [0])

    def test_canonical_envelope(self):
        """Test that {0} has the envelope {0,1} in {{0,1},{2}}."""
        ground = GroundSet(3)
        m = FinMeasure.uniform(ground)
        sub = SigmaAlg.from_blocks(ground, [[0, 1], [2]])
        assert envelope(m, sub, [0]) == 0b011

    def test_envelope_with_null_atom(self):
        """Test envelopes of {1,2} and {1} when {2} is a null atom."""
        ground = GroundSet(3)
        m = FinMeasure.from_weights([HALF, HALF, 0])
        sub = SigmaAlg.from_blocks(ground, [[2], [0, 1]])
        assert envelope(m, sub, [1, 2]) == 0b111
        assert envelope(m, sub, [1]) == 0b011
        assert envelope(m, sub, [1], mode="maximal") == 0b111
        assert is_envelope(m, sub, 0b010, 0b111)
        assert not is_envelope(m, sub, 0b010, 0b010)

    def test_unknown_mode(self):
        """Test that an unknown envelope mode is rejected."""
        with pytest.raises(InputError):
            envelope(self.m, self.sub, [0], mode="largest")

    @given(measures(), st.data())
    def test_envelopes_are_envelopes(self, m, data):
        """Test that both envelope modes satisfy the envelope definition."""
        a = data.draw(st.integers(0, m.ground.full))
        for mode in ("canonical", "maximal"):
            e = envelope(m, m.algebra, a, mode)
            assert is_envelope(m, m.algebra, a, e)


class TestCompletion:
    """Tests for completion."""

    def test_null_point_splits_off(self):
        """Test that {0,1,2} with a null point 2 completes to {{0,1},{2}}."""
        ground = GroundSet(3)
        m = FinMeasure(SigmaAlg.trivial(ground), (HALF, HALF, Fraction(0)))
        assert completion(m).completed.blocks() == [[0, 1], [2]]

    def test_null_atom_shatters(self):
        """Test that the null atom {1,2} becomes singletons."""
        ground = GroundSet(3)
        m = FinMeasure(SigmaAlg.from_blocks(ground, [[0], [1, 2]]), (1, 0, 0))
        assert completion(m).completed == SigmaAlg.discrete(ground)

    @given(measures())
    def test_completion_refines(self, m):
        """Test that the completion refines the base and isolates null points."""
        complete = completion(m)
        assert m.algebra.coarsens(complete.completed)
        for point in range(m.ground.size):
            if m.weights[point] == 0:
                assert complete.completed.atom_of(point) == 1 << point
        positive = union_of(complete.measure.positive_atoms)
        assert positive == m.positive_points
        assert complete.measure.weights == m.weights
        assert complete.is_null(m.null_points)
