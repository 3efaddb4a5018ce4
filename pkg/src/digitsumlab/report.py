"""Report envelopes, canonical JSON, CSV tables and golden fixtures."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .digits import digit_sum, format_number

FIXTURES_ENV = "DIGITSUMLAB_FIXTURES"


def canonical_json(obj: Any) -> str:
    """Sorted keys, fixed separators, no trailing whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def checksum(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass
class ReportEnvelope:
    command: str
    config: dict
    payload: Any
    wall_clock: float = 0.0
    version: str = __version__

    def canonical(self) -> dict:
        """Everything that must be reproducible from the config (no timing)."""
        body = {"command": self.command, "config": self.config,
                "payload": self.payload, "version": self.version}
        body["sha256"] = checksum(body)
        return body

    def to_json(self) -> dict:
        out = self.canonical()
        out["wall_clock_s"] = round(self.wall_clock, 3)
        return out

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json() if timing else self.canonical(), sort_keys=True, indent=2)


# -- tables -----------------------------------------------------------------------

@dataclass
class TableRows:
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()

    def to_text(self) -> str:
        widths = [max(len(str(x)) for x in col) for col in zip(self.header, *self.rows)]
        lines = ["  ".join(str(x).rjust(w) for x, w in zip(r, widths))
                 for r in [self.header, *self.rows]]
        return "\n".join(lines) + "\n"

    def to_json(self) -> list[dict]:
        return [dict(zip(self.header, r)) for r in self.rows]


def solution_rows(by_k: dict[int, Sequence[int]]) -> TableRows:
    """``k, base10, base2`` rows, ordered by k then n."""
    t = TableRows(["k", "base10", "base2"])
    for k in sorted(by_k):
        for n in sorted(by_k[k]):
            t.rows.append([k, n, format_number(n, 2)])
    return t


def deficiency_rows(table: Iterable) -> TableRows:
    t = TableRows(["base10", "base2", "s", "s2"])
    for row in table:
        t.rows.append([row.u, format_number(row.u, 2), row.s_u, row.s_u2])
    return t


def sumdigits_line(n: int, q: int) -> str:
    return f"{n} {format_number(n, q)} s={digit_sum(n, q)} s²={digit_sum(n * n, q)}"


# -- fixtures -----------------------------------------------------------------------

def fixtures_dir() -> Path:
    env = os.environ.get(FIXTURES_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("digitsumlab") / "fixtures"))


def read_fixture(name: str) -> str:
    return (fixtures_dir() / name).read_text()


def read_csv_fixture(name: str) -> TableRows:
    rows = list(csv.reader(io.StringIO(read_fixture(name))))
    return TableRows(rows[0], rows[1:])


def golden_solutions(k: int) -> list[int] | None:
    """Reference solutions for ``k`` (fixtures table1 and table2), or ``None`` past k=8."""
    name = "table2.csv" if k == 8 else "table1.csv" if 1 <= k <= 7 else None
    if name is None:
        return None
    t = read_csv_fixture(name)
    return [int(r[1]) for r in t.rows if int(r[0]) == k]


def compare_csv(produced: TableRows, name: str) -> bool:
    """Bytewise comparison of canonical CSV text against a fixture."""
    return produced.to_csv() == read_fixture(name)
