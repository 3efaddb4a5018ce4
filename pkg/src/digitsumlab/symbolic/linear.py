"""Integer linear forms over the unknown exponents r2..rk and constraints on them.

A form over ``k`` bits is a tuple ``(c, a2, ..., ak)`` standing for
``c + a2*r2 + ... + ak*rk``; ``r1`` is fixed at 0 and never appears.

The ordering chain ``1 <= r2 < r3 < ... < rk`` is built into every
constraint system through the gap coordinates

    d2 = r2 - 1,   d_i = r_i - r_{i-1} - 1   (i >= 3),

which are exactly the nonnegative integers.  The map between ``r`` and ``d``
is unimodular, so integer points correspond one to one.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


class LinearForm(tuple):
    """``(constant, a2, ..., ak)``; hashable, compares as a plain tuple."""

    __slots__ = ()

    def __new__(cls, values: Iterable[int]):
        return super().__new__(cls, values)

    @classmethod
    def const(cls, c: int, nvars: int) -> "LinearForm":
        return cls((c,) + (0,) * nvars)

    @classmethod
    def var(cls, i: int, nvars: int, coeff: int = 1) -> "LinearForm":
        """The form ``coeff * r_i`` (``i >= 2``); ``r1`` is the constant 0."""
        out = [0] * (nvars + 1)
        if i >= 2:
            out[i - 1] = coeff
        return cls(out)

    @property
    def constant(self) -> int:
        return self[0]

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self[1:])

    @property
    def nvars(self) -> int:
        return len(self) - 1

    def __add__(self, other):
        if isinstance(other, int):
            return LinearForm((self[0] + other,) + tuple(self[1:]))
        return LinearForm(a + b for a, b in zip(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return LinearForm((self[0] - other,) + tuple(self[1:]))
        return LinearForm(a - b for a, b in zip(self, other))

    def __neg__(self):
        return LinearForm(-a for a in self)

    def scale(self, m: int) -> "LinearForm":
        return LinearForm(m * a for a in self)

    def evaluate(self, r: Sequence[int]) -> int:
        """Value at ``r = (r2, ..., rk)``."""
        return self[0] + sum(a * x for a, x in zip(self[1:], r))

    def is_constant(self) -> bool:
        return not any(self[1:])

    def __repr__(self) -> str:
        return f"LinearForm({format_form(self)!r})"

    def __str__(self) -> str:
        return format_form(self)

    def to_gap(self) -> tuple[int, ...]:
        """Rewrite in gap coordinates: ``(c', b2, ..., bk)`` with
        ``b_j = sum_{i >= j} a_i`` and ``c' = c + sum_i a_i * (i - 1)``."""
        return to_gap(self)


def to_gap(form: Sequence[int]) -> tuple[int, ...]:
    n = len(form) - 1
    c = form[0]
    suffix = [0] * n
    acc = 0
    for j in range(n - 1, -1, -1):
        a = form[j + 1]
        acc += a
        suffix[j] = acc
        c += a * (j + 1)  # variable r_{j+2} sits at j+1 under the chain minimum
    return (c, *suffix)


def gap_to_r(d: Sequence[int]) -> tuple[int, ...]:
    """Exponents ``(r2, ..., rk)`` from gaps ``(d2, ..., dk)``."""
    r, prev = [], 0
    for x in d:
        prev = prev + 1 + x
        r.append(prev)
    return tuple(r)


def r_to_gap(r: Sequence[int]) -> tuple[int, ...]:
    out, prev = [], 0
    for x in r:
        out.append(x - prev - 1)
        prev = x
    return tuple(out)


# -- text syntax ---------------------------------------------------------------

def _side(c: int, terms: list[tuple[int, int]]) -> str:
    parts = []
    if c:
        parts.append(str(c))
    for i, a in terms:
        parts.append(f"r{i}" if a == 1 else f"{a}*r{i}")
    return " + ".join(parts) if parts else "0"


def format_form(form: Sequence[int]) -> str:
    c = form[0]
    out = []
    for i, a in enumerate(form[1:], start=2):
        if a:
            if not out:
                out.append(("-" if a < 0 else "") + (f"r{i}" if abs(a) == 1 else f"{abs(a)}*r{i}"))
            else:
                out.append(("- " if a < 0 else "+ ") + (f"r{i}" if abs(a) == 1 else f"{abs(a)}*r{i}"))
    if c or not out:
        if not out:
            out.append(str(c))
        else:
            out.append(("- " if c < 0 else "+ ") + str(abs(c)))
    return " ".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)\s*\*\s*r(\d+)|(\d+)?r(\d+)|(\d+)|([+-]))")


def parse_form(text: str, nvars: int) -> LinearForm:
    """Parse ``"2*r3 + 1 - r2"`` style text; ``r1`` parses as the constant 0."""
    out = [0] * (nvars + 1)
    pos, sign, expect_term = 0, 1, True
    text = text.strip()
    if text == "0":
        return LinearForm(out)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse linear form {text!r} at {pos}")
        pos = m.end()
        if m.group(6):
            sign = sign * (-1 if m.group(6) == "-" else 1)
            expect_term = True
            continue
        if not expect_term:
            raise ValueError(f"missing operator in {text!r}")
        if m.group(2) or m.group(4):
            coeff = int(m.group(1) or m.group(3) or 1)
            idx = int(m.group(2) or m.group(4))
            if idx < 1 or idx > nvars + 1:
                raise ValueError(f"variable r{idx} out of range for k={nvars + 1}")
            if idx >= 2:
                out[idx - 1] += sign * coeff
        else:
            out[0] += sign * int(m.group(5))
        sign, expect_term = 1, False
    return LinearForm(out)


# -- constraints ---------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """``expr >= 0`` (``op == ">="``) or ``expr == 0`` (``op == "="``).

    Constructed through :func:`make_constraint`, which divides out the
    coefficient gcd and rounds the constant so that the integer solutions are
    unchanged (``2*r2 >= 3`` becomes ``r2 >= 2``).
    """

    expr: LinearForm
    op: str

    def holds(self, r: Sequence[int]) -> bool:
        v = self.expr.evaluate(r)
        return v == 0 if self.op == "=" else v >= 0

    def __str__(self) -> str:
        e = self.expr
        if self.op == "=":
            # lead with the largest coefficient, made positive
            best = max(range(1, len(e)), key=lambda i: (abs(e[i]), -i), default=None)
            if best is not None and e[best] < 0:
                e = -e
        pos = [(i + 1, a) for i, a in enumerate(e[1:], start=1) if a > 0]
        neg = [(i + 1, -a) for i, a in enumerate(e[1:], start=1) if a < 0]
        c = e[0]
        lhs = _side(max(-c, 0), neg)
        rhs = _side(max(c, 0), pos)
        if self.op == "=":
            return f"{rhs} = {lhs}"
        return f"{lhs} <= {rhs}"


class Contradiction(Exception):
    """A constraint with no integer solutions (e.g. ``2*r2 = 3``)."""


def make_constraint(expr: Sequence[int], op: str) -> Constraint | None:
    """Normalized constraint, ``None`` when trivially true.

    Raises :class:`Contradiction` when it has no integer solution on its own.
    """
    expr = LinearForm(expr)
    if op not in (">=", "="):
        raise ValueError(op)
    g = 0
    for a in expr[1:]:
        g = gcd(g, a)
    c = expr[0]
    if g == 0:
        if (op == "=" and c != 0) or (op == ">=" and c < 0):
            raise Contradiction(f"{c} {op} 0")
        return None
    if op == "=":
        if c % g:
            raise Contradiction(f"{format_form(expr)} = 0 has no integer solution")
        return Constraint(LinearForm(a // g for a in expr), "=")
    # sum a_i r_i + c >= 0  ->  sum (a_i/g) r_i + floor(c/g) >= 0
    return Constraint(LinearForm((c // g,) + tuple(a // g for a in expr[1:])), ">=")


_REL = re.compile(r"(<=|>=|=|<|>)")


def parse_constraint(text: str, nvars: int) -> Constraint | None:
    parts = _REL.split(text)
    if len(parts) != 3:
        raise ValueError(f"expected exactly one relation in {text!r}")
    lhs, rel, rhs = parse_form(parts[0], nvars), parts[1], parse_form(parts[2], nvars)
    if rel == "=":
        return make_constraint(rhs - lhs, "=")
    if rel == "<=":
        return make_constraint(rhs - lhs, ">=")
    if rel == ">=":
        return make_constraint(lhs - rhs, ">=")
    if rel == "<":
        return make_constraint(rhs - lhs - 1, ">=")
    return make_constraint(lhs - rhs - 1, ">=")


@dataclass(frozen=True)
class ConstraintSystem:
    """Constraints over ``r2..rk`` on top of the implicit ordering chain."""

    k: int
    constraints: tuple[Constraint, ...] = ()

    @property
    def nvars(self) -> int:
        return self.k - 1

    def add(self, c: Constraint | None) -> "ConstraintSystem":
        if c is None or c in self.constraints:
            return self
        return ConstraintSystem(self.k, self.constraints + (c,))

    def holds(self, r: Sequence[int]) -> bool:
        if len(r) != self.nvars:
            return False
        prev = 0
        for x in r:
            if x < prev + 1:
                return False
            prev = x
        return all(c.holds(r) for c in self.constraints)

    def gap_rows(self) -> list[tuple[tuple[int, ...], int]]:
        """Rows ``(a, b)`` meaning ``a . d <= b`` in gap coordinates."""
        rows = []
        for c in self.constraints:
            g = to_gap(c.expr)
            # g0 + b.d >= 0  ->  -b.d <= g0
            rows.append((tuple(-x for x in g[1:]), g[0]))
            if c.op == "=":
                rows.append((tuple(g[1:]), -g[0]))
        return rows

    def lines(self) -> list[str]:
        return [str(c) for c in self.constraints]

    @classmethod
    def from_lines(cls, k: int, lines: Iterable[str]) -> "ConstraintSystem":
        cs = cls(k)
        for line in lines:
            cs = cs.add(parse_constraint(line, k - 1))
        return cs
