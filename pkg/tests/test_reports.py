"""
Tests for the reports module.
"""
import pytest

from skewlift.reports import HEADER, CampaignReport, CheckRecord


@pytest.fixture
def records():
    return [
        CheckRecord(
            check="fubini",
            instance="seed-3",
            status="pass",
            seed=3,
            details={"checked": "16", "exhaustive": "yes"},
        ),
        CheckRecord(
            check="t2",
            instance="seed-3",
            status="fail",
            seed=3,
            details={"failures": "1"},
            witnesses=["stage 1 does not restrict\nto stage 0"],
            trace=["stage 0: σ(𝔓_0)"],
        ),
        CheckRecord(
            check="p3",
            instance="seed-3",
            status="skip",
            seed=3,
            details={"reason": "upstream check t2 did not pass"},
        ),
        CheckRecord(check="fubini", instance="diagonal", status="pass"),
    ]


class TestCheckRecord:
    """Tests for the CheckRecord class."""

    def test_unknown_status(self):
        """Test that only pass, fail and skip are accepted."""
        with pytest.raises(ValueError):
            CheckRecord(check="t2", instance="x", status="maybe")

    def test_lines(self, records):
        """Test the key=value layout."""
        assert records[0].lines() == [
            "check=fubini",
            "instance=seed-3",
            "seed=3",
            "status=pass",
            "checked=16",
            "exhaustive=yes",
        ]
        assert records[3].lines() == ["check=fubini", "instance=diagonal", "status=pass"]

    def test_multiline_values_are_joined(self, records):
        """Test that a witness with a newline stays on one line."""
        assert "witness=stage 1 does not restrict | to stage 0" in records[1].lines()

    def test_traces_and_timing(self, records):
        """Test the optional trace and elapsed lines."""
        record = records[1]
        record.elapsed = 0.25
        assert "trace=stage 0: σ(𝔓_0)" in record.lines()
        assert not any(line.startswith("trace=") for line in record.lines(traces=False))
        assert record.lines(timing=True)[-1] == "elapsed=0.250000"

    def test_from_lines(self):
        """Test that repeated keys collect into lists."""
        record = CheckRecord.from_lines([
            "check=t3",
            "instance=seed-1",
            "seed=1",
            "status=fail",
            "oracle=exists",
            "witness=first",
            "witness=second",
            "elapsed=1.5",
        ])
        assert record.seed == 1
        assert record.details == {"oracle": "exists"}
        assert record.witnesses == ["first", "second"]
        assert record.elapsed == 1.5

    def test_from_lines_errors(self):
        """Test malformed record blocks."""
        with pytest.raises(ValueError) as exc_info:
            CheckRecord.from_lines(["check=t3", "no separator"])
        assert "without '='" in str(exc_info.value)
        with pytest.raises(ValueError) as exc_info:
            CheckRecord.from_lines(["check=t3", "instance=x"])
        assert "misses the key" in str(exc_info.value)


class TestCampaignReport:
    """Tests for the CampaignReport class."""

    def test_render(self, records):
        """Test the header, blocks and totals of a rendered report."""
        text = CampaignReport(records).render()

        assert text.startswith(HEADER + "\n\ncheck=fubini\n")
        assert text.endswith(
            "# total check=fubini pass=2 fail=0 skip=0\n\n"
            "# total check=t2 pass=0 fail=1 skip=0\n\n"
            "# total check=p3 pass=0 fail=0 skip=1\n"
        )

    def test_parse_round_trip(self, records):
        """Test that a rendered report parses back to the same records."""
        records[1].witnesses = ["stage 1 does not restrict"]
        report = CampaignReport(records)
        assert CampaignReport.parse(report.render()).records == records

    def test_render_is_deterministic_without_timing(self, records):
        """Test that elapsed times only appear on request."""
        records[0].elapsed = 0.1
        report = CampaignReport(records)
        assert "elapsed=" not in report.render()
        assert "elapsed=0.100000" in report.render(timing=True)

    def test_counts_and_instances(self, records):
        """Test the per-check tallies and instance names."""
        report = CampaignReport(records)
        assert report.instances == ["seed-3", "diagonal"]
        assert report.counts()["fubini"] == {"pass": 2, "fail": 0, "skip": 0}
        assert not report.passed
        assert [r.check for r in report.failures] == ["t2"]

    def test_summary_passed(self, records):
        """Test the summary of a clean run."""
        report = CampaignReport([records[0], records[3]])
        summary = report.summary()
        assert summary.startswith("✅ All checks passed (2 records, 2 instances)")
        assert "  fubini: 2 passed, 0 failed, 0 skipped" in summary

    def test_summary_failed(self, records):
        """Test that failures name the seed to reproduce them."""
        summary = CampaignReport(records).summary()
        assert summary.startswith("❌ CHECKS FAILED (1 failures in 4 records):")
        assert "    ❌ t2 on seed-3 (reproduce with --seed 3)" in summary
        assert "    ⚠️  p3 on seed-3 skipped: upstream check t2 did not pass" in summary

    def test_to_dataframe(self, records):
        """Test the per-record table."""
        df = CampaignReport(records).to_dataframe()
        assert list(df.columns[:6]) == [
            "instance", "seed", "check", "status", "witnesses", "first_witness",
        ]
        assert len(df) == 4
        assert df.loc[1, "witnesses"] == 1
        assert df.loc[0, "checked"] == "16"
        assert "elapsed" not in df.columns

    def test_totals(self, records):
        """Test the per-check totals table."""
        totals = CampaignReport(records).totals()
        assert list(totals.columns) == ["check", "pass", "fail", "skip"]
        assert totals.set_index("check").loc["fubini", "pass"] == 2

    def test_parse_empty(self):
        """Test that a header-only report has no records."""
        assert CampaignReport.parse(HEADER + "\n").records == []
