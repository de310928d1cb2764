"""
Tests for the checks module.
"""
from unittest.mock import patch

import pytest

from skewlift.checks import (
    CHECK_ORDER,
    CheckPlanner,
    campaign_specs,
    run_campaign,
    run_checks,
)
from skewlift.densities import GeneratorSequence
from skewlift.finspace import InputError, SigmaAlg
from skewlift.generate import Instance
from skewlift.instance_loader import InstanceLoader
from skewlift.process import Process
from skewlift.product import PreconditionError
from skewlift.reports import CampaignReport
from skewlift.schemas import InstanceSpec, WorkbenchConfig

CORRUPTED = {
    "name": "corrupted",
    "X": {"weights": ["1/2", "1/2", "0"]},
    "Y": {"weights": ["1/2", "1/2"]},
    "R": [["1/4", "1/4"], ["0", "1/2"], ["0", "0"]],
}


def _statuses(records):
    return {record.check: record.status for record in records}


class TestCheckPlanner:
    """Tests for the CheckPlanner class."""

    def setup_method(self):
        self.planner = CheckPlanner()

    def test_parse(self):
        """Test check name parsing."""
        assert CheckPlanner.parse(None) == list(CHECK_ORDER)
        assert CheckPlanner.parse(["all"]) == list(CHECK_ORDER)
        assert CheckPlanner.parse(["t2", " ", "fubini"]) == ["t2", "fubini"]

    def test_parse_unknown(self):
        """Test that an unknown check name is rejected."""
        with pytest.raises(ValueError) as exc_info:
            CheckPlanner.parse(["t9"])
        assert "unknown checks ['t9']" in str(exc_info.value)

    def test_plan_adds_dependencies(self):
        """Test that dependencies are planned before their dependents."""
        assert self.planner.plan(["t3"]) == ["t2", "p3", "t3"]
        assert self.planner.plan(["process", "fubini"]) == [
            "fubini", "t2", "p3", "t3", "process",
        ]
        assert self.planner.plan() == list(CHECK_ORDER)

    def test_upstream(self):
        """Test the ancestors of a check in run order."""
        assert self.planner.upstream("c1") == ["t2", "p3", "t3"]
        assert self.planner.upstream("fubini") == []

    def test_cycle(self):
        """Test that cyclic dependencies are reported."""
        planner = CheckPlanner({"t2": ["p3"], "p3": ["t2"]})
        with pytest.raises(ValueError) as exc_info:
            planner.plan(["t2"])
        assert "cycle" in str(exc_info.value)


class TestRunChecks:
    """Tests for run_checks on the hand-built instances."""

    @pytest.mark.parametrize("fixture", ["diagonal", "uniform"])
    def test_all_checks_pass(self, request, fixture):
        """Test that every check passes on the closed-form instances."""
        instance = request.getfixturevalue(fixture)
        records = run_checks(instance)

        assert [record.check for record in records] == list(CHECK_ORDER)
        assert CampaignReport(records).passed
        assert all(record.status == "pass" for record in records)
        assert all(record.seed is None for record in records)

    def test_details(self, diagonal):
        """Test the details written by the liftings checks."""
        records = {record.check: record for record in run_checks(diagonal, ["t3"])}

        assert records["t2"].details["stages"] == "3"
        assert records["p3"].details["saturation_steps"] == "0"
        assert records["t3"].details["oracle"] == "exists"

    def test_trace(self, uniform):
        """Test that tracing records the stage recursion."""
        records = run_checks(uniform, ["t2"], trace=True)
        assert records[0].trace[0] == "𝔓_0 cells: []"

    def test_trace_lists_phi_classes(self, uniform):
        """Test that tracing ends with the class table of φ."""
        records = run_checks(uniform, ["t2"], trace=True)
        assert records[0].trace[-1] == "φ classes: {0: [0, 2], 1: [1, 3], 2: [0, 2], 3: [1, 3]}"

    def test_fubini_adds_small_unions_above_the_cap(self, diagonal):
        """Test that sets of at most three atoms join a sampled fubini check."""
        config = WorkbenchConfig(exhaustive_cap=0, sample_count=1)
        records = run_checks(diagonal, ["fubini"], config=config)

        assert records[0].status == "pass"
        assert records[0].details["exhaustive"] == "no"
        assert int(records[0].details["small_sets"]) > 0

    def test_fubini_small_unions_only_when_sampled(self, diagonal):
        """Test that an exhaustive fubini check adds nothing."""
        records = run_checks(diagonal, ["fubini"])
        assert records[0].details["small_sets"] == "0"

    def test_obstructed_process(self, uniform):
        """Test that a process without a version is a consistent verdict, not a failure."""
        uniform.process = Process.from_sections(uniform.space, [[1, 0], [0, 1]])
        records = run_checks(uniform, ["process"])
        process = records[-1]

        assert process.check == "process"
        assert process.status == "pass"
        assert process.details["given"] == "no-version"

    def test_corrupted_marginals(self):
        """Test that a skew product with a wrong Y-marginal fails the fubini check."""
        instance = InstanceLoader().load(CORRUPTED)
        records = run_checks(instance, ["fubini"])

        assert records[0].status == "fail"
        assert records[0].witnesses[0] == "Y-marginal on {0}: 1/4 != 1/2"

    def test_precondition_skips_downstream(self, diagonal):
        """Test that a trivial 𝔠 skips φ and everything built on it."""
        trivial = SigmaAlg.trivial(diagonal.space.p.ground)
        instance = Instance(diagonal.skew, diagonal.dis, trivial, GeneratorSequence(()))
        records = run_checks(instance, ["t3"])

        assert _statuses(records) == {"t2": "skip", "p3": "skip", "t3": "skip"}
        assert records[0].details["reason"].startswith("InnerRegularityError:")
        assert records[1].details["reason"] == "upstream check t2 did not pass"
        assert records[2].details["reason"] == "upstream check t2 did not pass"

    def test_failure_skips_downstream(self, diagonal):
        """Test that a failing check blocks its dependents."""
        with patch.dict("skewlift.checks.CHECKS", {"t2": lambda ctx, record: ["boom"]}):
            records = run_checks(diagonal, ["t3"])

        assert _statuses(records) == {"t2": "fail", "p3": "skip", "t3": "skip"}
        assert records[0].witnesses == ["boom"]
        assert records[0].details["failures"] == "1"

    def test_precondition_error_is_a_skip(self, diagonal):
        """Test that a precondition error is recorded as a skip."""
        def check(ctx, record):
            raise PreconditionError("outside the hypotheses")

        with patch.dict("skewlift.checks.CHECKS", {"fubini": check}):
            records = run_checks(diagonal, ["fubini"])

        assert records[0].status == "skip"
        assert records[0].details["reason"] == "PreconditionError: outside the hypotheses"

    def test_input_error_is_a_failure(self, diagonal):
        """Test that any other input error fails with its witness."""
        def check(ctx, record):
            raise InputError("bad", witness=3)

        with patch.dict("skewlift.checks.CHECKS", {"fubini": check}):
            records = run_checks(diagonal, ["fubini"])

        assert records[0].status == "fail"
        assert records[0].witnesses == ["InputError: bad (witness 3)"]


class TestCampaign:
    """Tests for seeded campaigns."""

    def test_campaign_specs(self):
        """Test that specs get consecutive seeds."""
        specs = campaign_specs(InstanceSpec(seed=5, size_x=2), 3)
        assert [spec.seed for spec in specs] == [5, 6, 7]
        assert all(spec.size_x == 2 for spec in specs)

    def test_campaign_specs_count(self):
        """Test that an empty campaign is rejected."""
        with pytest.raises(ValueError):
            campaign_specs(InstanceSpec(), 0)

    def test_run_campaign(self):
        """Test a small fubini campaign."""
        report = run_campaign(campaign_specs(InstanceSpec(null_rate=0.3), 3), ["fubini"])

        assert report.passed
        assert report.instances == ["seed-0", "seed-1", "seed-2"]
        assert [record.seed for record in report.records] == [0, 1, 2]

    def test_campaign_with_null_points_and_coarsening(self):
        """Test that a campaign with null points and coarse algebras neither fails nor skips."""
        base = InstanceSpec(
            size_x=4, size_y=3, null_rate=0.4, coarse_b_rate=0.5, coarse_a_rate=0.3
        )
        report = run_campaign(
            campaign_specs(base, 12), ["t2", "p3", "t3", "c1", "t4", "process"]
        )

        assert report.failures == []
        assert [record for record in report.records if record.status == "skip"] == []
        assert {record.check for record in report.records} == {
            "t2", "p3", "t3", "c1", "t4", "process"
        }

    def test_jobs_do_not_change_the_report(self):
        """Test that a process pool renders the same report as a serial run."""
        specs = campaign_specs(InstanceSpec(seed=3), 3)
        serial = run_campaign(specs, ["fubini"], jobs=1)
        parallel = run_campaign(specs, ["fubini"], jobs=2)

        assert serial.render() == parallel.render()

    def test_unknown_check(self):
        """Test that a campaign validates its check names first."""
        with pytest.raises(ValueError):
            run_campaign(campaign_specs(InstanceSpec(), 1), ["nope"])
