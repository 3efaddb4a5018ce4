"""Brute-force searches over integers with a fixed digit sum.

Everything here is exhaustive: nothing is skipped without checking it, and
every result states the digit-length bound it is complete for.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .digits import DomainError, check_base, digit_sum, split_add


@dataclass(frozen=True)
class EnumSpec:
    q: int = 2
    k: int = 1
    max_len: int = 32
    coprime: bool = True  # only n with q not dividing n

    def __post_init__(self) -> None:
        check_base(self.q)
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if self.max_len < 1:
            raise DomainError(f"max_len must be >= 1, got {self.max_len}")


def _same_popcount_below(count: int, width: int) -> Iterator[int]:
    """All ``m < 2**width`` with ``count`` set bits, increasing (Gosper's hack)."""
    if count == 0:
        yield 0
        return
    if count > width:
        return
    m = (1 << count) - 1
    limit = 1 << width
    while m < limit:
        yield m
        c = m & -m
        r = m + c
        m = (((r ^ m) >> 2) // c) | r


def _fixed_sum_words(q: int, k: int, length: int, coprime: bool) -> Iterator[int]:
    """Integers of exactly ``length`` base-q digits with digit sum ``k``, increasing."""
    top = q - 1

    def rec(prefix: int, remaining: int, positions: int) -> Iterator[int]:
        if positions == 0:
            if remaining == 0:
                yield prefix
            return
        low = 1 if (coprime and positions == 1) else 0
        for d in range(low, min(top, remaining) + 1):
            rest = remaining - d
            if rest > top * (positions - 1):
                continue
            if coprime and positions > 1 and rest == 0:
                continue  # last digit would be zero
            yield from rec(prefix * q + d, rest, positions - 1)

    for lead in range(1, min(top, k) + 1):
        rest = k - lead
        if length == 1:
            if rest == 0 and not (coprime and lead % q == 0):
                yield lead
            continue
        if rest > top * (length - 1):
            continue
        if coprime and rest == 0:
            continue
        yield from rec(lead, rest, length - 1)


def _words_of_length(spec: EnumSpec, length: int) -> Iterator[int]:
    q, k = spec.q, spec.k
    if q != 2:
        yield from _fixed_sum_words(q, k, length, spec.coprime)
        return
    if length == 1:
        if k == 1:
            yield 1
        return
    high = 1 << (length - 1)
    if spec.coprime:
        # top bit and bit 0 fixed; k-2 free bits among the length-2 in between
        if k < 2:
            return
        for m in _same_popcount_below(k - 2, length - 2):
            yield high | (m << 1) | 1
    else:
        if k < 1:
            return
        for m in _same_popcount_below(k - 1, length - 1):
            yield high | m


def enumerate_fixed_digit_sum(spec: EnumSpec) -> Iterator[int]:
    """Every ``n`` with ``s_q(n) == k`` and at most ``max_len`` digits, increasing."""
    for length in range(1, spec.max_len + 1):
        yield from _words_of_length(spec, length)


def _equal_square_of_length(spec: EnumSpec, length: int) -> list[int]:
    q, k = spec.q, spec.k
    if q == 2:
        return [n for n in _words_of_length(spec, length) if (n * n).bit_count() == k]
    return [n for n in _words_of_length(spec, length) if digit_sum(n * n, q) == k]


def solutions_equal_square(spec: EnumSpec, threads: int = 1) -> list[int]:
    """Sorted ``n`` from :func:`enumerate_fixed_digit_sum` with ``s_q(n**2) == k``.

    Work is split by digit length; with ``threads > 1`` the lengths are
    scanned in worker processes and merged back in increasing order.
    """
    lengths = range(1, spec.max_len + 1)
    if threads <= 1:
        parts = [_equal_square_of_length(spec, L) for L in lengths]
    else:
        # longest lengths carry almost all the work; submit them first
        order = sorted(lengths, reverse=True)
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = {L: pool.submit(_equal_square_of_length, spec, L) for L in order}
            parts = [futures[L].result() for L in lengths]
    return [n for part in parts for n in part]


def default_threads() -> int:
    return os.cpu_count() or 1


# -- density -------------------------------------------------------------------

_CHUNK = 1 << 20


def _density_chunk(lo: int, hi: int) -> int:
    n = np.arange(lo, hi, dtype=np.uint64)
    return int(np.count_nonzero(np.bitwise_count(n) == np.bitwise_count(n * n)))


def density_count(N: int) -> int:
    """``#{1 <= n < N : s_2(n**2) == s_2(n)}``; ``n = 0`` is not counted."""
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    if N > 1 << 32:
        # n**2 would overflow uint64
        return sum(1 for n in range(1, N) if (n * n).bit_count() == n.bit_count())
    return sum(_density_chunk(lo, min(lo + _CHUNK, N)) for lo in range(1, N, _CHUNK))


@dataclass
class DensityReport:
    points: list[tuple[int, int]]
    beta_hat: float | None
    residual: float | None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "points": [[N, c] for N, c in self.points],
            "beta_hat": None if self.beta_hat is None else round(self.beta_hat, 6),
            "residual": None if self.residual is None else round(self.residual, 6),
            "note": self.note,
        }


def fit_exponent(points: Sequence[tuple[int, int]]) -> tuple[float | None, float | None]:
    """Least-squares slope of log2(count) on log2(N) and the RMS residual."""
    if len(points) < 2:
        return None, None
    xs = [math.log2(N) for N, _ in points]
    ys = [math.log2(c) for _, c in points]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    icpt = my - slope * mx
    rms = math.sqrt(sum((y - (icpt + slope * x)) ** 2 for x, y in zip(xs, ys)) / len(xs))
    return slope, rms


def density_scan(exponents: Sequence[int]) -> DensityReport:
    """Count at ``N = 2**e`` for each exponent and fit the growth exponent.

    The scan is a single pass up to the largest ``N``; counts at smaller
    sample points are read off along the way.
    """
    exps = list(exponents)
    if not exps:
        raise DomainError("need at least one exponent")
    if exps != sorted(exps) or len(set(exps)) != len(exps):
        raise DomainError("exponents must be strictly ascending")
    if exps[0] < 1 or exps[-1] > 32:
        raise DomainError("exponents must lie in [1, 32]")
    points = []
    total, lo = 0, 1
    for e in exps:
        hi = 1 << e
        while lo < hi:
            step = min(lo + _CHUNK, hi)
            total += _density_chunk(lo, step)
            lo = step
        points.append((hi, total))
    beta, res = fit_exponent(points)
    note = "insufficient points" if beta is None else ""
    return DensityReport(points, beta, res, note)


# -- deficient integers --------------------------------------------------------

@dataclass(frozen=True, order=True)
class DeficiencyRow:
    s_u: int
    s_u2: int
    u: int

    def __post_init__(self) -> None:
        if self.s_u2 >= self.s_u:
            raise DomainError(f"{self.u} is not deficient ({self.s_u}, {self.s_u2})")


@dataclass
class DeficiencyTable:
    """Rows sorted by ``(s(u), s(u^2), u)`` plus the bounds they are complete for."""

    rows: list[DeficiencyRow]
    max_s: int
    max_s2: int
    max_len: int

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def covers(self, s: int, s2: int) -> bool:
        return s <= self.max_s and s2 <= self.max_s2

    def with_sum(self, s: int, max_s2: int) -> list[DeficiencyRow]:
        return [r for r in self.rows if r.s_u == s and r.s_u2 <= max_s2]


def deficient_search(max_s: int, max_s2: int, max_len: int) -> DeficiencyTable:
    """Odd ``u`` of at most ``max_len`` bits with ``2 <= s(u) <= max_s``,
    ``s(u^2) < s(u)`` and ``s(u^2) <= max_s2``."""
    if max_s < 2:
        raise DomainError("max_s must be >= 2")
    rows = []
    for s in range(2, max_s + 1):
        for u in enumerate_fixed_digit_sum(EnumSpec(2, s, max_len, True)):
            s2 = (u * u).bit_count()
            if s2 < s and s2 <= max_s2:
                rows.append(DeficiencyRow(s, s2, u))
    rows.sort()
    return DeficiencyTable(rows, max_s, max_s2, max_len)


# -- Section-5 style contradiction replay ---------------------------------------

@dataclass
class Candidate:
    v: int
    source: str  # "deficient", "balanced" or "excess"
    s_v2: int
    s_uv: int
    total: int
    ok: bool


@dataclass
class ReplayCase:
    u: int
    s_u: int
    s_u2: int
    need_s_v: int
    max_s_v2: int
    candidates: list[Candidate] = field(default_factory=list)
    note: str = ""


@dataclass
class ReplayReport:
    k: int
    verdict: str  # "no pair exists", "pairs found" or "inconclusive"
    cases: list[ReplayCase]
    survivors: list[tuple[int, int]]
    max_len: int
    complete: bool  # False when some candidate class was only searched up to max_len
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "verdict": self.verdict,
            "max_len": self.max_len,
            "complete_beyond_bound": self.complete,
            "reason": self.reason,
            "survivors": [list(p) for p in self.survivors],
            "cases": [
                {
                    "u": c.u,
                    "s_u": c.s_u,
                    "s_u2": c.s_u2,
                    "need_s_v": c.need_s_v,
                    "max_s_v2": c.max_s_v2,
                    "note": c.note,
                    "candidates": [
                        {"v": d.v, "source": d.source, "s_v2": d.s_v2,
                         "s_uv": d.s_uv, "total": d.total, "ok": d.ok}
                        for d in c.candidates
                    ],
                }
                for c in self.cases
            ],
        }


def replay_contradiction(k: int, table: DeficiencyTable) -> ReplayReport:
    """Search for ``(u, v)`` with ``s(u)+s(v) = s(u^2)+s(v^2)+s(uv) = k``.

    Every digit sum is computed; nothing about the outcome is assumed.
    ``u`` ranges over deficient rows of ``table`` (one side of any pair must be
    deficient).  Since ``s(uv) >= 2``, the partner needs ``s(v) = k - s(u)``
    and ``s(v^2) <= k - s(u^2) - 2``.  Partners come from three classes:

    * deficient ``v`` (``s(v^2) < s(v)``): read from ``table``;
    * balanced ``v`` (``s(v^2) = s(v)``): the finite equal-square sets;
    * excess ``v`` (``s(v) < s(v^2)``): only needed when the bound allows it,
      searched exhaustively up to ``table.max_len`` bits.
    """
    if k < 4:
        raise DomainError("k must be >= 4")
    if not table.covers(k - 2, k - 4):
        return ReplayReport(
            k, "inconclusive", [], [], table.max_len, False,
            f"table bounds (s<={table.max_s}, s2<={table.max_s2}) do not cover "
            f"the required s(u)<={k - 2}, s(u^2)<={k - 4}",
        )
    cases = []
    survivors = []
    complete = True
    for row in table:
        if not (2 <= row.s_u <= k - 2 and 2 <= row.s_u2 <= k - 4):
            continue
        u = row.u
        t = k - row.s_u
        b = k - row.s_u2 - 2
        case = ReplayCase(u, row.s_u, row.s_u2, t, b)
        pool: list[tuple[int, str]] = []
        for r in table.with_sum(t, min(b, t - 1)):
            pool.append((r.u, "deficient"))
        if t <= b:
            for v in solutions_equal_square(EnumSpec(2, t, table.max_len, True)):
                pool.append((v, "balanced"))
        if t < b:
            if t == 2 and table.max_len > u.bit_length():
                # v = 2^a + 1 with 2^a > u: s(uv) = s(u*2^a + u) = 2 s(u), so
                # the total s(u^2) + 3 + 2 s(u) already exceeds k = s(u) + 2
                case.note = "excess partners closed beyond the bound by splitting"
                a = u.bit_length()
                assert split_add(u, u, a) == 2 * row.s_u
                assert row.s_u2 + 3 + 2 * row.s_u > k
            else:
                complete = False
                case.note = f"excess partners searched up to {table.max_len} bits"
            for v in enumerate_fixed_digit_sum(EnumSpec(2, t, table.max_len, True)):
                if t < (v * v).bit_count() <= b:
                    pool.append((v, "excess"))
        for v, source in sorted(pool):
            s_v2 = (v * v).bit_count()
            s_uv = (u * v).bit_count()
            total = row.s_u2 + s_v2 + s_uv
            ok = total == k
            case.candidates.append(Candidate(v, source, s_v2, s_uv, total, ok))
            if ok:
                survivors.append((u, v))
        cases.append(case)
    verdict = "pairs found" if survivors else "no pair exists"
    return ReplayReport(k, verdict, cases, survivors, table.max_len, complete)
