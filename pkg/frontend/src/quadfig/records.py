"""Sweep CSV parsing and the shared aggregation definition.

The CSV header below is the harness's public result schema; this module is
deliberately ignorant of how the records were produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CSV_HEADER = "method,N,rep,seed,squared_error,wall_time_ms,status"


class SchemaError(Exception):
    """Input does not conform to the sweep CSV schema."""


@dataclass(frozen=True)
class SweepRecord:
    method: str
    N: int
    rep: int
    seed: int
    squared_error: float
    wall_time_ms: float
    status: str


def read_records(text: str) -> list[SweepRecord]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise SchemaError(f"first line must be {CSV_HEADER!r}")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 7:
            raise SchemaError(f"expected 7 fields, got {len(parts)}: {ln!r}")
        try:
            out.append(
                SweepRecord(
                    method=parts[0],
                    N=int(parts[1]),
                    rep=int(parts[2]),
                    seed=int(parts[3]),
                    squared_error=float(parts[4]),
                    wall_time_ms=float(parts[5]),
                    status=parts[6],
                )
            )
        except ValueError as exc:
            raise SchemaError(f"unparseable row {ln!r}: {exc}") from exc
    return out


def read_records_file(path: str) -> list[SweepRecord]:
    with open(path) as fh:
        return read_records(fh.read())


def aggregate(records) -> list[tuple[str, int, float, float, float]]:
    """Per (method, N): mean and quartiles of the ok-status squared errors.

    Methods keep first-appearance order, sizes ascend.  Matches the harness's
    own `aggregate` output number for number.
    """
    groups: dict[tuple[str, int], list[float]] = {}
    order: list[str] = []
    for r in records:
        if r.status != "ok":
            continue
        if r.method not in order:
            order.append(r.method)
        groups.setdefault((r.method, r.N), []).append(r.squared_error)
    if not order:
        raise SchemaError("no methods with successful records")
    out = []
    for method in order:
        for n in sorted(n for (m, n) in groups if m == method):
            vals = np.array(groups[(method, n)])
            out.append(
                (
                    method,
                    n,
                    float(np.mean(vals)),
                    float(np.quantile(vals, 0.25)),
                    float(np.quantile(vals, 0.75)),
                )
            )
    return out


def read_aggregation(text: str) -> list[tuple[str, int, float, float, float]]:
    """Parse an aggregation CSV (`method,N,mean,q25,q75`)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "method,N,mean,q25,q75":
        raise SchemaError("first line must be 'method,N,mean,q25,q75'")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise SchemaError(f"expected 5 fields, got {len(parts)}: {ln!r}")
        try:
            out.append((parts[0], int(parts[1]), float(parts[2]), float(parts[3]), float(parts[4])))
        except ValueError as exc:
            raise SchemaError(f"unparseable row {ln!r}: {exc}") from exc
    return out
