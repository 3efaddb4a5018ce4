"""Exact base-q digit arithmetic on Python integers.

Digit words are always most significant digit first.  Nothing in here uses
floating point; every quantity is an exact ``int``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class DomainError(ValueError):
    """Raised when an argument violates an operation's precondition."""


def check_base(q: int) -> int:
    if not isinstance(q, int) or q < 2:
        raise DomainError(f"base must be an integer >= 2, got {q!r}")
    return q


def check_nat(n: int, name: str = "n") -> int:
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"{name} must be a nonnegative integer, got {n!r}")
    return n


def digit_sum(n: int, q: int = 2) -> int:
    """Sum of the base-``q`` digits of ``n`` (popcount when ``q == 2``)."""
    check_nat(n)
    check_base(q)
    if q == 2:
        return n.bit_count()
    if q & (q - 1) == 0:
        # power-of-two radix: peel fixed-width bit groups
        w = q.bit_length() - 1
        mask = q - 1
        total = 0
        while n:
            total += n & mask
            n >>= w
        return total
    total = 0
    while n:
        n, d = divmod(n, q)
        total += d
    return total


def digit_len(n: int, q: int = 2) -> int:
    """Number of base-``q`` digits of ``n``; ``digit_len(0) == 1``."""
    check_nat(n)
    check_base(q)
    if n == 0:
        return 1
    if q == 2:
        return n.bit_length()
    length = 0
    while n:
        n //= q
        length += 1
    return length


@dataclass(frozen=True)
class DigitWord:
    """Canonical base-``q`` expansion, most significant digit first."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        check_base(self.base)
        if not self.digits:
            raise DomainError("a digit word needs at least one digit")
        for d in self.digits:
            if not (isinstance(d, int) and 0 <= d < self.base):
                raise DomainError(f"digit {d!r} out of range for base {self.base}")
        if len(self.digits) > 1 and self.digits[0] == 0:
            raise DomainError("leading zero in non-canonical digit word")

    def __len__(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return format_word(self)

    @property
    def value(self) -> int:
        return from_digits(self)


def to_digits(n: int, q: int = 2) -> DigitWord:
    check_nat(n)
    check_base(q)
    if n == 0:
        return DigitWord(q, (0,))
    if q == 2:
        return DigitWord(2, tuple(int(c) for c in bin(n)[2:]))
    out = []
    while n:
        n, d = divmod(n, q)
        out.append(d)
    return DigitWord(q, tuple(reversed(out)))


def from_digits(word: DigitWord | Sequence[int], q: int | None = None) -> int:
    """Inverse of :func:`to_digits`.

    Accepts a :class:`DigitWord` or a plain digit sequence plus ``q``; plain
    sequences are validated as canonical words.
    """
    if not isinstance(word, DigitWord):
        if q is None:
            raise DomainError("base required for a bare digit sequence")
        word = DigitWord(q, tuple(word))
    q = word.base
    if q == 2:
        return int("".join(map(str, word.digits)), 2)
    n = 0
    for d in word.digits:
        n = n * q + d
    return n


def split_add(a: int, b: int, k: int, q: int = 2) -> int:
    """Digit sum of ``a*q**k + b`` when ``b`` fits below ``q**k``.

    The result equals ``digit_sum(a) + digit_sum(b)``; both sides are
    computed and compared.
    """
    _check_split(a, b, k, q)
    direct = digit_sum(a * q**k + b, q)
    assert direct == digit_sum(a, q) + digit_sum(b, q)
    return direct


def split_sub(a: int, b: int, k: int, q: int = 2) -> int:
    """Digit sum of ``a*q**k - b``, checked against
    ``s(a-1) + (q-1)*k - s(b-1)``."""
    _check_split(a, b, k, q)
    direct = digit_sum(a * q**k - b, q)
    assert direct == digit_sum(a - 1, q) + (q - 1) * k - digit_sum(b - 1, q)
    return direct


def _check_split(a: int, b: int, k: int, q: int) -> None:
    check_base(q)
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if not isinstance(a, int) or a < 1:
        raise DomainError(f"a must be >= 1, got {a!r}")
    if not isinstance(b, int) or not 1 <= b < q**k:
        raise DomainError(f"need 1 <= b < q**k, got b={b!r}, q**k={q**k}")


def concat_with_gap(u: int, v: int, j: int, q: int = 2) -> int:
    """``u * q**j + v``: the word of ``u`` followed by ``v`` padded to ``j`` digits."""
    check_nat(u, "u")
    check_nat(v, "v")
    check_base(q)
    if not isinstance(j, int) or j < 0:
        raise DomainError(f"gap must be a nonnegative integer, got {j!r}")
    if v >= q**j:
        raise DomainError(f"v={v} does not fit in {j} base-{q} digits")
    return u * q**j + v


def min_noninterfering_gap(u: int, v: int, q: int = 2) -> int:
    """Smallest shift ``j`` from which ``v**2``, ``2uv*q**j`` and
    ``u**2*q**(2j)`` land in disjoint digit ranges.

    For every ``j`` at or above the returned value,
    ``s(u*q**j + v) = s(u) + s(v)`` and
    ``s((u*q**j + v)**2) = s(u**2) + s(2uv) + s(v**2)``.
    In base 2, ``s(2uv) == s(uv)``, so the cross term can be read either way.
    """
    if u < 1 or v < 1:
        raise DomainError("u and v must be positive")
    return max(2 * digit_len(v, q), digit_len(2 * u * v, q))


# -- text syntax -------------------------------------------------------------

_RUN = re.compile(r"^(\d+)\^(\d+)$")


def format_word(word: DigitWord) -> str:
    if word.base <= 10:
        return "".join(str(d) for d in word.digits)
    return ".".join(str(d) for d in word.digits)


def format_number(n: int, q: int = 2) -> str:
    return format_word(to_digits(n, q))


def parse_word(text: str, q: int = 2) -> DigitWord:
    """Parse digit-word text such as ``"1101111 0^8 1101111"``.

    Whitespace separates chunks.  A chunk ``d^k`` repeats digit ``d`` k times;
    for ``q > 10`` plain chunks are dot-separated decimal digits.  The result
    is canonicalized (leading zeros stripped).
    """
    check_base(q)
    digits: list[int] = []
    for chunk in text.split():
        m = _RUN.match(chunk)
        if m:
            digits.extend([int(m.group(1))] * int(m.group(2)))
        elif q <= 10:
            if not chunk.isdigit():
                raise DomainError(f"bad digit chunk {chunk!r}")
            digits.extend(int(c) for c in chunk)
        else:
            try:
                digits.extend(int(c) for c in chunk.split("."))
            except ValueError:
                raise DomainError(f"bad digit chunk {chunk!r}") from None
    if not digits:
        raise DomainError("empty digit word")
    for d in digits:
        if not 0 <= d < q:
            raise DomainError(f"digit {d} out of range for base {q}")
    while len(digits) > 1 and digits[0] == 0:
        digits.pop(0)
    return DigitWord(q, tuple(digits))


def block_word(blocks: Iterable[tuple[int, int]], q: int = 2) -> int:
    """Integer whose base-``q`` word is the concatenation of ``(digit, count)`` runs."""
    n = 0
    for d, count in blocks:
        if not 0 <= d < q:
            raise DomainError(f"digit {d} out of range for base {q}")
        for _ in range(count):
            n = n * q + d
    return n
