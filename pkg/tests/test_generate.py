"""
Tests for the generate module.
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewlift.finspace import sigma_generate
from skewlift.generate import PROCESS_KINDS, Instance, InstanceGenerator
from skewlift.process import is_nil_measurable
from skewlift.product import (
    check_disintegration,
    contained_in_all,
    inner_regularity_defects,
    marginal_defects,
)
from skewlift.schemas import InstanceSpec, WorkbenchConfig


class TestInstanceGenerator:
    """Test the InstanceGenerator class."""

    def setup_method(self):
        self.generator = InstanceGenerator()

    def test_initialization(self):
        """Test that the generator keeps its configuration."""
        config = WorkbenchConfig(ground_cap=8)
        assert InstanceGenerator(config).config is config
        assert self.generator.config.ground_cap == 16

    def test_generate_from_spec(self):
        """Test that an instance carries its spec and seed-derived name."""
        spec = InstanceSpec(seed=7, size_x=4, size_y=3)
        instance = self.generator.generate(spec)

        assert isinstance(instance, Instance)
        assert instance.spec == spec
        assert instance.name == "seed-7"
        assert instance.space.nx == 4
        assert instance.space.ny == 3

    def test_generate_from_dict(self):
        """Test that a plain dictionary is validated into a spec."""
        instance = self.generator.generate({"seed": 3, "size_x": 2, "size_y": 2})
        assert instance.spec.seed == 3

    def test_invalid_dict(self):
        """Test that an invalid dictionary is rejected."""
        with pytest.raises(ValueError):
            self.generator.generate({"seed": -1})

    def test_reproducible(self):
        """Test that one seed gives one instance."""
        spec = InstanceSpec(seed=11, null_rate=0.4, coarse_a_rate=0.5)
        first = self.generator.generate(spec)
        second = self.generator.generate(spec)

        assert first.skew == second.skew
        assert first.c == second.c
        assert first.gens == second.gens

    def test_no_null_points_without_null_rate(self):
        """Test that a zero null rate keeps every weight positive."""
        instance = self.generator.generate(InstanceSpec(seed=5, size_x=4, size_y=3))
        assert all(w > 0 for w in instance.space.p.weights)
        assert all(w > 0 for w in instance.space.q.weights)

    def test_full_b_coarsening(self):
        """Test that coarse_b_rate=1 without Q-null points makes 𝔅 trivial."""
        instance = self.generator.generate(InstanceSpec(seed=2, coarse_b_rate=1.0))
        assert len(instance.space.q.algebra.atoms) == 1

    def test_gens_length(self):
        """Test that random generators come before the atoms of 𝔠."""
        instance = self.generator.generate(InstanceSpec(seed=4, gens_length=2))
        assert len(instance.gens) == 2 + len(instance.c.atoms) - 1
        assert sigma_generate(instance.c.ground, instance.gens.sets) == instance.c

    @settings(max_examples=25, deadline=None)
    @given(
        seed=st.integers(0, 10_000),
        null_rate=st.sampled_from([0.0, 0.3, 0.7]),
        coarse_a_rate=st.sampled_from([0.0, 0.5]),
        coarse_b_rate=st.sampled_from([0.0, 0.5]),
    )
    def test_generated_instances_are_consistent(
        self, seed, null_rate, coarse_a_rate, coarse_b_rate
    ):
        """Test that every generated instance satisfies the construction hypotheses."""
        instance = self.generator.generate(InstanceSpec(
            seed=seed, size_x=3, size_y=2, null_rate=null_rate,
            coarse_a_rate=coarse_a_rate, coarse_b_rate=coarse_b_rate,
        ))

        assert marginal_defects(instance.skew) == []
        assert check_disintegration(instance.dis) == []
        assert contained_in_all(instance.c, instance.dis)
        assert inner_regularity_defects(instance.skew, instance.dis, instance.c) == []


class TestProcesses:
    """Test random process generation."""

    def setup_method(self):
        self.generator = InstanceGenerator()

    @pytest.mark.parametrize("kind", PROCESS_KINDS)
    def test_kinds(self, generated, kind):
        """Test that every kind builds a process on the instance space."""
        xi = self.generator.process(generated, kind, seed=1)
        assert xi.space == generated.space
        assert xi.raw == (kind == "raw")

    def test_cell_process_is_nil_measurable(self, generated):
        """Test that a cell-constant process is never obstructed."""
        xi = self.generator.process(generated, "cell", seed=3)
        assert is_nil_measurable(xi, generated.skew, generated.dis)

    def test_nil_process_is_nil_measurable(self, generated):
        """Test that changes on nil blocks keep nil measurability."""
        xi = self.generator.process(generated, "nil", seed=3)
        assert is_nil_measurable(xi, generated.skew, generated.dis)

    def test_unknown_kind(self, generated):
        """Test that an unknown kind is rejected."""
        with pytest.raises(ValueError) as exc_info:
            self.generator.process(generated, "wild")
        assert "unknown process kind 'wild'" in str(exc_info.value)
