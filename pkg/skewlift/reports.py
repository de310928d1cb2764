"""
Check records and campaign reports.

A report is a list of records, one per (instance, check), rendered as
blocks of ``key=value`` lines separated by blank lines:

    check=fubini
    instance=seed-3
    seed=3
    status=pass
    checked=4096
    exhaustive=yes

``witness`` and ``trace`` keys may repeat. Timing is left out unless asked
for, so two runs of the same campaign render to the same bytes.
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd

STATUSES = ("pass", "fail", "skip")
REPEATED_KEYS = ("witness", "trace")
HEADER = "# skewlift report"


def _one_line(value: object) -> str:
    return " | ".join(str(value).splitlines())


@dataclass
class CheckRecord:
    """The outcome of one check on one instance."""

    check: str
    instance: str
    status: str
    seed: Optional[int] = None
    details: Dict[str, str] = field(default_factory=dict)
    witnesses: List[str] = field(default_factory=list)
    trace: List[str] = field(default_factory=list)
    elapsed: Optional[float] = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status '{self.status}', expected one of {STATUSES}")

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def lines(self, timing: bool = False, traces: bool = True) -> List[str]:
        lines = [f"check={self.check}", f"instance={self.instance}"]
        if self.seed is not None:
            lines.append(f"seed={self.seed}")
        lines.append(f"status={self.status}")
        lines.extend(f"{key}={_one_line(value)}" for key, value in self.details.items())
        lines.extend(f"witness={_one_line(w)}" for w in self.witnesses)
        if traces:
            lines.extend(f"trace={_one_line(t)}" for t in self.trace)
        if timing and self.elapsed is not None:
            lines.append(f"elapsed={self.elapsed:.6f}")
        return lines

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "CheckRecord":
        values: Dict[str, str] = OrderedDict()
        repeated: Dict[str, List[str]] = {key: [] for key in REPEATED_KEYS}
        for line in lines:
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"report line without '=': {line!r}")
            if key in repeated:
                repeated[key].append(value)
            else:
                values[key] = value
        try:
            check = values.pop("check")
            instance = values.pop("instance")
            status = values.pop("status")
        except KeyError as e:
            raise ValueError(f"report record misses the key {e}")
        seed = values.pop("seed", None)
        elapsed = values.pop("elapsed", None)
        return cls(
            check=check,
            instance=instance,
            status=status,
            seed=int(seed) if seed is not None else None,
            details=dict(values),
            witnesses=repeated["witness"],
            trace=repeated["trace"],
            elapsed=float(elapsed) if elapsed is not None else None,
        )


@dataclass
class CampaignReport:
    """All records of a verify or campaign run, in execution order."""

    records: List[CheckRecord] = field(default_factory=list)

    def extend(self, records: Iterable[CheckRecord]) -> None:
        self.records.extend(records)

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records)

    @property
    def failures(self) -> List[CheckRecord]:
        return [record for record in self.records if record.status == "fail"]

    @property
    def instances(self) -> List[str]:
        return list(dict.fromkeys(record.instance for record in self.records))

    def counts(self) -> Dict[str, Dict[str, int]]:
        """check -> {status: count}, checks in first-seen order."""
        counts: Dict[str, Dict[str, int]] = OrderedDict()
        for record in self.records:
            row = counts.setdefault(record.check, {status: 0 for status in STATUSES})
            row[record.status] += 1
        return counts

    def render(self, timing: bool = False, traces: bool = True) -> str:
        blocks = [HEADER]
        blocks.extend(
            "\n".join(record.lines(timing=timing, traces=traces)) for record in self.records
        )
        for check, row in self.counts().items():
            tally = " ".join(f"{status}={row[status]}" for status in STATUSES)
            blocks.append(f"# total check={check} {tally}")
        return "\n\n".join(blocks) + "\n"

    @classmethod
    def parse(cls, text: str) -> "CampaignReport":
        """Read a rendered report back; comment lines are ignored."""
        report = cls()
        block: List[str] = []
        for raw in text.splitlines() + [""]:
            line = raw.rstrip("\n")
            if line.startswith("#"):
                continue
            if line.strip():
                block.append(line)
                continue
            if block:
                report.records.append(CheckRecord.from_lines(block))
                block = []
        return report

    def summary(self) -> str:
        """The ✅/❌ block printed at the end of a run."""
        counts = self.counts()
        lines = []
        if self.passed:
            lines.append(
                f"✅ All checks passed ({len(self.records)} records, "
                f"{len(self.instances)} instances)"
            )
        else:
            lines.append(
                f"❌ CHECKS FAILED ({len(self.failures)} failures in "
                f"{len(self.records)} records):\n"
            )
        for check, row in counts.items():
            lines.append(
                f"  {check}: {row['pass']} passed, {row['fail']} failed, {row['skip']} skipped"
            )
        for record in self.failures:
            seed = f" (reproduce with --seed {record.seed})" if record.seed is not None else ""
            lines.append(f"    ❌ {record.check} on {record.instance}{seed}")
            for witness in record.witnesses[:3]:
                lines.append(f"       {witness}")
        skipped = [r for r in self.records if r.status == "skip"]
        for record in skipped[:5]:
            reason = record.details.get("reason", "")
            lines.append(f"    ⚠️  {record.check} on {record.instance} skipped: {reason}")
        return "\n".join(lines)

    def to_dataframe(self, timing: bool = False) -> pd.DataFrame:
        """One row per record; details become columns."""
        rows = []
        for record in self.records:
            row: Dict[str, object] = {
                "instance": record.instance,
                "seed": record.seed,
                "check": record.check,
                "status": record.status,
                "witnesses": len(record.witnesses),
                "first_witness": record.witnesses[0] if record.witnesses else "",
            }
            row.update(record.details)
            if timing:
                row["elapsed"] = record.elapsed
            rows.append(row)
        return pd.DataFrame(rows)

    def totals(self) -> pd.DataFrame:
        """Per-check pass/fail/skip counts."""
        rows: List[Tuple[str, int, int, int]] = [
            (check, row["pass"], row["fail"], row["skip"])
            for check, row in self.counts().items()
        ]
        return pd.DataFrame(rows, columns=["check", "pass", "fail", "skip"])
