"""Parsing of the harness CSV report schema."""

from __future__ import annotations

import csv
from dataclasses import dataclass

EXPECTED_HEADER = ["experiment", "n", "metric", "value", "stderr", "R", "seed", "flag"]

# metrics that are per-run diagnostics, not distance/bound series
DIAGNOSTIC_METRICS = {"vhat_n", "vhat", "mc_floor", "tail_trunc"}


class MalformedReport(ValueError):
    """The CSV does not match the harness report contract."""


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    n: int
    metric: str
    value: float
    stderr: float
    R: int
    seed: int
    flag: str


@dataclass
class ReportFrame:
    """Rows of one or more harness reports; unknown flags are preserved."""

    rows: list

    @classmethod
    def read(cls, path) -> "ReportFrame":
        rows = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise MalformedReport(f"{path}: empty file") from None
            if header != EXPECTED_HEADER:
                raise MalformedReport(
                    f"{path}: header {header!r} does not match the report schema")
            for lineno, rec in enumerate(reader, start=2):
                if not rec:
                    continue
                if len(rec) != len(EXPECTED_HEADER):
                    raise MalformedReport(f"{path}:{lineno}: wrong column count")
                try:
                    rows.append(ReportRow(
                        experiment=rec[0], n=int(rec[1]), metric=rec[2],
                        value=float(rec[3]), stderr=float(rec[4]),
                        R=int(rec[5]), seed=int(rec[6]), flag=rec[7]))
                except ValueError as exc:
                    raise MalformedReport(f"{path}:{lineno}: {exc}") from exc
        return cls(rows)

    def metrics(self):
        return sorted({r.metric for r in self.rows
                       if r.metric not in DIAGNOSTIC_METRICS})

    def series(self, metric: str):
        """(n, value, stderr, flag) tuples for one metric, ordered by n."""
        pts = [(r.n, r.value, r.stderr, r.flag)
               for r in self.rows if r.metric == metric]
        return sorted(pts)
