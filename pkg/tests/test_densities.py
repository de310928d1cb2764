"""
Tests for the densities module.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewlift.densities import (
    DensityPreconditionError,
    GeneratorSequence,
    Lifting,
    LowerDensity,
    build_admissible,
    density_table,
    equi_admissible_family,
    extend_density_L3,
    extend_to_completion,
    initial_density,
    is_admissibly_generated,
    l3_formula,
    lift_from_density,
    limit_density_e20,
    restriction_defects,
)
from skewlift.finspace import FinMeasure, GroundSet, InputError, SigmaAlg, completion
from skewlift.validators import DensityAxiomValidator, LiftingAxiomValidator

HALF = Fraction(1, 2)


@pytest.fixture
def three_points():
    """Z = {0,1,2} with weights (1/2, 1/2, 0)."""
    return FinMeasure.from_weights([HALF, HALF, 0])


@pytest.fixture
def tau_zero(three_points):
    """τ_0 on 𝔠 = {{0,1},{2}}."""
    return initial_density(three_points)


@pytest.fixture
def extended(tau_zero):
    """The extension of τ_0 by M = {0} with M1 = {0,1}, M2 = Z."""
    return extend_density_L3(tau_zero, 0b001, 0b011, 0b111)


class TestLowerDensity:
    """Tests for the class-form density."""

    def test_initial_density(self, tau_zero):
        """Test that τ_0 lives on σ(null sets) and keeps only full-measure sets."""
        assert tau_zero.algebra.blocks() == [[0, 1], [2]]
        assert tau_zero.classes == (0b011, 0b011, 0b011)
        assert tau_zero(0b011) == 0b111
        assert tau_zero(0b100) == 0
        assert tau_zero.is_lifting

    def test_classes_must_be_unions_of_positive_atoms(self, three_points):
        """Test that a class touching a null point is rejected."""
        with pytest.raises(InputError):
            LowerDensity(three_points, (0b001, 0b010, 0b100))

    def test_positive_atom_is_its_own_class(self, three_points):
        """Test that a positive point must have its atom as class."""
        with pytest.raises(InputError):
            LowerDensity(three_points, (0b011, 0b010, 0b010))

    def test_classes_constant_on_atoms(self):
        """Test that two points of one null atom share a class."""
        ground = GroundSet(3)
        m = FinMeasure(
            SigmaAlg.from_blocks(ground, [[0], [1, 2]]),
            (HALF, Fraction(1, 4), Fraction(1, 4)),
        )
        with pytest.raises(InputError):
            LowerDensity(m, (0b001, 0b110, 0b001))

    def test_lifting_needs_single_atoms(self, three_points):
        """Test that Lifting rejects a class of two atoms that a density accepts."""
        assert not LowerDensity(three_points, (0b001, 0b010, 0b011)).is_lifting
        with pytest.raises(InputError):
            Lifting(three_points, (0b001, 0b010, 0b011))
        assert Lifting(three_points, (0b001, 0b010, 0b010)).is_lifting

    def test_apply_and_table(self, extended):
        """Test the MSet view and the class table."""
        assert extended.apply([1, 2]).members() == [1, 2]
        assert density_table(extended) == {0: [0], 1: [1], 2: [1]}


class TestExtension:
    """Tests for the one-generator extension."""

    def test_extension_values(self, extended):
        """Test the classes and values of the extended density."""
        assert extended.classes == (0b001, 0b010, 0b010)
        assert extended(0b001) == 0b001
        assert extended(0b110) == 0b110
        assert extended(0b101) == 0b001
        assert extended.algebra == SigmaAlg.discrete(GroundSet(3))

    def test_extension_restricts(self, tau_zero, extended):
        """Test that the extension agrees with τ_0 on its domain."""
        assert restriction_defects(extended, tau_zero) == []

    @pytest.mark.parametrize(
        "g, h, expected",
        [
            (0b011, 0b000, 0b001),
            (0b000, 0b111, 0b110),
            (0b011, 0b100, 0b001),
            (0b011, 0b111, 0b111),
        ],
    )
    def test_formula_matches_classes(self, tau_zero, extended, g, h, expected):
        """Test the literal formula for the representation (G ∩ M) ∪ (H ∩ M^c)."""
        e = (g & 0b001) | (h & 0b110)
        assert l3_formula(tau_zero, 0b001, 0b011, 0b111, g, h) == expected
        assert extended(e) == expected

    def test_measurable_generator_is_a_no_op(self, tau_zero):
        """Test that extending by a set already in 𝔠 returns the density."""
        assert extend_density_L3(tau_zero, 0b011, 0b011, 0b100) is tau_zero

    def test_null_atom_outside_domain(self):
        """Test that a new null atom is a precondition failure."""
        ground = GroundSet(3)
        m = FinMeasure(SigmaAlg.trivial(ground), (HALF, HALF, Fraction(0)))
        delta = LowerDensity(m, (0b111, 0b111, 0b111))
        with pytest.raises(DensityPreconditionError) as exc_info:
            extend_density_L3(delta, 0b100, 0b111, 0b111)
        assert exc_info.value.witness == 0b100

    def test_envelopes_are_checked(self, tau_zero):
        """Test that M1 must be a 𝔠-envelope of M."""
        with pytest.raises(InputError):
            extend_density_L3(tau_zero, 0b001, 0b001, 0b111)
        with pytest.raises(InputError):
            extend_density_L3(tau_zero, 0b001, 0b011, 0b110)

    def test_from_set_function(self, extended):
        """Test that the classes are recovered from the set function."""
        recovered = LowerDensity.from_set_function(extended.measure, extended)
        assert recovered.classes == extended.classes


class TestAdmissible:
    """Tests for admissible densities and their liftings."""

    def test_single_generator(self, three_points):
        """Test that the generator {0} rebuilds the extension from τ_0."""
        tau, state = build_admissible(three_points, [0b001])
        assert tau.classes == (0b001, 0b010, 0b010)
        assert state.stages[1].envelopes == (0b011, 0b111)
        assert state.stages[1].changed
        assert len(state.densities()) == 2

    def test_redundant_generator_is_skipped(self, three_points):
        """Test that a generator measurable at its stage is recorded as skipped."""
        _, state = build_admissible(three_points, [0b001, 0b010])
        assert state.generators.skipped == (False, True)
        assert state.generators.retained == [0b001]
        assert any("skipped=redundant" in line for line in state.trace_lines())

    def test_generators_must_reach_target(self, three_points):
        """Test that generators of a coarser algebra are rejected."""
        with pytest.raises(InputError):
            build_admissible(three_points, [0b011])

    def test_no_generators(self, three_points):
        """Test that an empty list returns τ_0."""
        tau, state = build_admissible(FinMeasure(three_points.null_sigma(),
                                                 three_points.weights), [])
        assert tau.classes == (0b011, 0b011, 0b011)
        assert len(state.stages) == 1

    def test_lifting_of_the_extension(self, extended):
        """Test that the lowest-atom lifting sends {1} to {1,2} and {0,2} to {0}."""
        pi = lift_from_density(extended)
        assert pi(0b010) == 0b110
        assert pi(0b101) == 0b001
        assert is_admissibly_generated(pi, extended)
        errors, _ = LiftingAxiomValidator().validate_lifting(pi.measure, pi)
        assert errors == []

    def test_lift_modes(self, three_points):
        """Test the lowest and highest choices of class atoms."""
        delta = LowerDensity(three_points, (0b001, 0b010, 0b011))
        assert lift_from_density(delta).classes == (0b001, 0b010, 0b001)
        assert lift_from_density(delta, mode="highest").classes == (0b001, 0b010, 0b010)
        with pytest.raises(InputError):
            lift_from_density(delta, mode="middle")

    def test_foreign_lifting_is_not_admissible(self, extended):
        """Test that a lifting choosing outside the density class is refused."""
        other = Lifting(extended.measure, (0b001, 0b010, 0b001))
        assert not is_admissibly_generated(other, extended)

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.integers(0, 3), min_size=2, max_size=5).filter(lambda w: sum(w) > 0),
        st.data(),
    )
    def test_admissible_chains_satisfy_the_axioms(self, raw, data):
        """Test that every stage is a density restricting to the previous one."""
        size = len(raw)
        m = FinMeasure.from_weights([Fraction(v, sum(raw)) for v in raw])
        extra = data.draw(st.lists(st.integers(0, (1 << size) - 1), max_size=3))
        gens = extra + [1 << i for i in range(size - 1)]
        tau, state = build_admissible(m, gens)
        validator = DensityAxiomValidator()
        for previous, stage in zip(state.stages, state.stages[1:]):
            errors, _ = validator.validate_density(stage.density.measure, stage.density)
            assert errors == []
            assert restriction_defects(stage.density, previous.density) == []
        pi = lift_from_density(tau)
        errors, _ = LiftingAxiomValidator().validate_lifting(pi.measure, pi)
        assert errors == []
        assert is_admissibly_generated(pi, tau)


class TestLimitFormula:
    """Tests for the countable-cofinality limit formula."""

    def test_limit_equals_tail_density(self, three_points, tau_zero, extended):
        """Test that an eventually constant chain gives its tail density."""
        stages = [tau_zero, extended, extended]
        for b in range(8):
            assert limit_density_e20(stages, three_points, b) == extended(b)

    def test_stages_must_increase(self, three_points, tau_zero, extended):
        """Test that a decreasing chain is rejected."""
        with pytest.raises(InputError):
            limit_density_e20([extended, tau_zero], three_points, 0b011)
        with pytest.raises(InputError):
            limit_density_e20([], three_points, 0)

    def test_set_must_be_measurable_at_the_end(self, three_points, tau_zero):
        """Test that B outside the last algebra is rejected."""
        with pytest.raises(InputError):
            limit_density_e20([tau_zero], three_points, 0b001)


class TestEquiAdmissibleFamily:
    """Tests for the per-y families."""

    def test_diagonal_family(self, diagonal):
        """Test that each τ_y keeps the point carrying S_y."""
        family = diagonal.family()
        assert len(family) == 2
        assert family[0].classes == (0b001, 0b001, 0b001)
        assert family[1].classes == (0b010, 0b010, 0b010)
        assert family.stage_count == 3
        assert family.stage_algebra(1).blocks() == [[0], [1, 2]]
        assert family.w_envelopes == ((0b111, 0b111), (0b110, 0b111))
        with pytest.raises(KeyError):
            family[2]

    def test_uniform_family(self, uniform):
        """Test that the uniform sections give the identity lifting."""
        family = uniform.family()
        assert family[0].classes == (0b01, 0b10)
        assert family.stage(0, 0).classes == (0b11, 0b11)

    def test_generators_must_generate(self, uniform):
        """Test that generators of another algebra are rejected."""
        with pytest.raises(InputError):
            equi_admissible_family(uniform.dis, uniform.c, GeneratorSequence(()))

    def test_family_is_cached(self, diagonal):
        """Test that the instance builds each family once."""
        assert diagonal.family() is diagonal.family()


class TestCompletionExtension:
    """Tests for extend_to_completion."""

    def test_extension_keeps_positive_parts(self):
        """Test that the classes survive on the completed space."""
        ground = GroundSet(3)
        m = FinMeasure(SigmaAlg.from_blocks(ground, [[0, 1], [2]]), (HALF, 0, HALF))
        delta = LowerDensity(m, (0b011, 0b011, 0b100))
        extended = extend_to_completion(delta, completion(m))
        assert extended.algebra == SigmaAlg.discrete(ground)
        assert extended.classes == (0b001, 0b001, 0b100)

    def test_weights_must_agree(self, three_points, tau_zero):
        """Test that another measure on the completion is refused."""
        other = FinMeasure.from_weights([0, HALF, HALF])
        with pytest.raises(DensityPreconditionError):
            extend_to_completion(tau_zero, completion(other))
