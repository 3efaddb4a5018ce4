"""Constructions of integers with ``s_q(n) = s_q(n^2) = k`` and related witnesses.

Every constructor checks its output by squaring it; the closed forms only
choose the parameters.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from typing import Sequence

from .digits import (
    DomainError,
    block_word,
    check_base,
    concat_with_gap,
    digit_len,
    digit_sum,
    min_noninterfering_gap,
)


class CaseNotCovered(DomainError):
    pass


class CongruenceError(DomainError):
    """``k(k-1)`` is not divisible by ``q-1``: no solutions with ``q`` not dividing n can exist."""


class NoParameters(DomainError):
    pass


# -- concatenation pairs ------------------------------------------------------------

@dataclass(frozen=True)
class ConcatPair:
    """``u, v`` with ``s(u)+s(v) = s(u^2)+s(2uv)+s(v^2) = k`` in base ``q``."""

    u: int
    v: int
    q: int = 2
    k: int = 0

    def __post_init__(self) -> None:
        check_base(self.q)
        if self.u < 1 or self.v < 1:
            raise DomainError("u and v must be positive")
        lhs = digit_sum(self.u, self.q) + digit_sum(self.v, self.q)
        rhs = (digit_sum(self.u**2, self.q) + digit_sum(2 * self.u * self.v, self.q)
               + digit_sum(self.v**2, self.q))
        if lhs != rhs or lhs != self.k:
            raise DomainError(
                f"({self.u}, {self.v}) is not a pair for k={self.k}: "
                f"s(u)+s(v)={lhs}, s(u^2)+s(2uv)+s(v^2)={rhs}"
            )

    @property
    def min_gap(self) -> int:
        return min_noninterfering_gap(self.u, self.v, self.q)

    def member(self, gap: int, strict: bool = True) -> int:
        return concat_family(self, gap, strict)


def concat_family(pair: ConcatPair, gap: int, strict: bool = True) -> int:
    """``n = u*q**gap + v``, checked to satisfy ``s(n) = s(n^2) = k``.

    Gaps below the block-disjointness threshold are refused unless
    ``strict=False``, in which case the result stands only on the direct check.
    """
    if strict and gap < pair.min_gap:
        raise DomainError(f"gap {gap} below the noninterference threshold {pair.min_gap}")
    n = concat_with_gap(pair.u, pair.v, gap, pair.q)
    s, s2 = digit_sum(n, pair.q), digit_sum(n * n, pair.q)
    if s != pair.k or s2 != pair.k:
        raise DomainError(f"gap {gap}: s(n)={s}, s(n^2)={s2}, expected {pair.k}")
    return n


def zero_run(pair: ConcatPair, gap: int) -> int:
    """Number of zeros written between ``u`` and ``v`` at shift ``gap``."""
    return gap - digit_len(pair.v, pair.q)


# -- base 2: blocks 1^k 0 1^n ---------------------------------------------------------

def ones_block(k: int, n: int) -> int:
    """``(1^k 0 1^n)_2``."""
    return block_word([(1, k), (0, 1), (1, n)], 2)


@dataclass(frozen=True)
class Base2FamilyParams:
    k1: int
    n1: int
    k2: int
    n2: int

    def __post_init__(self) -> None:
        if min(self.k1, self.n1, self.k2, self.n2) < 1:
            raise DomainError("block lengths must be positive")
        if not (self.n1 >= self.k1 + 2 and self.n2 >= self.k2 + 2 and self.n1 >= self.n2):
            raise DomainError(f"need n1 >= k1+2, n2 >= k2+2, n1 >= n2: {self}")

    @property
    def u(self) -> int:
        return ones_block(self.k1, self.n1)

    @property
    def v(self) -> int:
        return ones_block(self.k2, self.n2)

    @property
    def k(self) -> int:
        return self.k1 + self.n1 + self.k2 + self.n2


def lemma42_case(p: Base2FamilyParams) -> int | None:
    """Which closed form for ``s(uv)`` applies (1, 2, 3) or ``None``.

    The closed forms are derived with ``k1 >= k2``; outside that they are not
    claimed.  Case 3 also needs ``n1 <= n2 + k + 1``: past that the term
    ``2^n1`` lands inside the run of ones starting at bit ``n2 + k + 1``.
    """
    if p.k1 < p.k2:
        return None
    if p.n1 == p.n2 + p.k2 + 1:
        if p.n2 == p.k1 + 1:
            return 1
        if p.n2 > p.k1 + 1:
            return 2
    if p.k1 == p.k2 and p.n2 < p.n1 <= p.n2 + p.k2 + 1:
        return 3
    return None


def lemma42_sums(p: Base2FamilyParams, verify: bool = False) -> tuple[int, int, int]:
    """``(s(u^2), s(v^2), s(uv))`` from the block lengths alone."""
    case = lemma42_case(p)
    if case is None:
        raise CaseNotCovered(f"no closed form for s(uv) at {p}")
    s_uv = {1: p.k1 + 2, 2: p.n2 + 1, 3: p.n1 + 1}[case]
    out = (p.n1, p.n2, s_uv)
    if verify:
        u, v = p.u, p.v
        direct = ((u * u).bit_count(), (v * v).bit_count(), (u * v).bit_count())
        if direct != out:
            raise AssertionError(f"closed form {out} != direct {direct} at {p}")
    return out


def single_block_square_sum(k: int, n: int) -> int:
    """``s_2(U^2)`` for ``U = (1^k 0 1^n)_2`` with ``n >= k+2``: equals ``n``."""
    if n < k + 2:
        raise DomainError("need n >= k + 2")
    return n


# Explicit pairs quoted for sums not reached by the parametric families.
EXPLICIT_PAIRS = {
    13: (0b10111, 0b10110111111),
    17: (0b111011111, 0b10110111111),
    21: (0b11110111111, 0b111101111111),
}
K12_WORD = 0b1101111  # 111
OPEN_CASES = frozenset({9, 10, 11, 14, 15})


def theorem5_params(s: int) -> tuple[str, Base2FamilyParams] | None:
    """Block parameters of the first parametric family reaching ``s``."""
    if s % 6 == 0 and s >= 12:
        k = s // 6
        return "6k", Base2FamilyParams(k, 2 * k, k, 2 * k)
    if s % 3 == 1 and s >= 16:
        k1 = (s - 7) // 3
        return "3k+1", Base2FamilyParams(k1, k1 + 4, 2, k1 + 1)
    if s % 3 == 2 and s >= 20:
        k1 = (s - 11) // 3
        return "3k+2", Base2FamilyParams(k1, k1 + 6, 3, k1 + 2)
    if s % 3 == 0 and s >= 27:
        k1 = (s - 15) // 3
        return "3k", Base2FamilyParams(k1, k1 + 8, 4, k1 + 3)
    return None


def theorem5_pair(s: int) -> ConcatPair | str:
    """A verified base-2 pair for ``s``, or ``"finite"`` / ``"open"``.

    Quoted explicit words come first, then the 6k, 3k+1, 3k+2 and 3k block
    families.
    """
    if s < 1:
        raise DomainError("s must be >= 1")
    if s <= 8:
        return "finite"
    if s in OPEN_CASES:
        return "open"
    if s == 12:
        return ConcatPair(K12_WORD, K12_WORD, 2, 12)
    if s in EXPLICIT_PAIRS:
        u, v = EXPLICIT_PAIRS[s]
        return ConcatPair(u, v, 2, s)
    found = theorem5_params(s)
    if found is None:
        raise NoParameters(f"no construction for s={s}")
    _, p = found
    return ConcatPair(p.u, p.v, 2, s)


# -- base q >= 3 ------------------------------------------------------------------------

def _check_qe(q: int, e: int) -> None:
    check_base(q)
    if q < 3:
        raise DomainError("base q >= 3 required")
    if not 1 <= e <= q - 1:
        raise DomainError(f"need 1 <= e <= q-1, got e={e}")


def theorem6_f(q: int, e: int) -> int:
    _check_qe(q, e)
    s = lambda x: digit_sum(x, q)  # noqa: E731
    return s((q - e) ** 2) + s(2 * (q - 1) * (q - e)) - s(2 * (q - e) - 1)


def theorem6_g(q: int, e: int) -> int:
    _check_qe(q, e)
    s = lambda x: digit_sum(x, q)  # noqa: E731
    return (s(2 * (q - e)) + s(2 * (q - 1)) + s(2 * (q - 1) * (q - e))
            + s(2 * (q - 1) ** 2 - (q - e) - 1) - 1)


def theorem6_g_w2(q: int, e: int) -> int:
    """Constant part of ``s_q(w_2)``, the low half of ``2uv``.

    Writing ``X = 2((q-1)^2-(q-e))`` for the leading coefficient, the borrow
    against ``-2q^B`` leaves ``X-1 = 2(q-1)^2 - 2(q-e) - 1`` in the top digits.
    :func:`theorem6_g` uses ``(q-1)^2 - (q-e) - 1`` there instead, which does
    not match direct computation; the solver uses this version.
    """
    _check_qe(q, e)
    s = lambda x: digit_sum(x, q)  # noqa: E731
    return (s(2 * (q - e)) + s(2 * (q - 1)) + s(2 * (q - 1) * (q - e))
            + s(2 * (q - 1) ** 2 - 2 * (q - e) - 1) - 1)


def top_block(q: int, k: int, n: int, e: int | None = None) -> int:
    """``((q-1)^k 0 (q-1)^n e)_q``; no trailing digit when ``e`` is None."""
    blocks = [(q - 1, k), (0, 1), (q - 1, n)]
    if e is not None:
        blocks.append((e, 1))
    return block_word(blocks, q)


def lemma61_sums(q: int, k: int, n: int, e: int, verify: bool = False) -> tuple[int, int]:
    """``(s(u), s(u^2))`` for ``u = ((q-1)^k 0 (q-1)^n e)_q`` from the closed forms.

    Covers ``0 <= e <= q-2``.  ``e = q-1`` is accepted only with
    ``verify=True`` since the closed form is then an extrapolation.
    """
    check_base(q)
    if q < 3:
        raise DomainError("base q >= 3 required")
    if k < 2 or n < k + 2 or not 0 <= e <= q - 1:
        raise DomainError(f"hypothesis violated: k={k}, n={n}, e={e}")
    if e == q - 1 and not verify:
        raise DomainError("e = q-1 lies outside the closed form; pass verify=True")
    f = digit_sum((q - e) ** 2, q) + digit_sum(2 * (q - 1) * (q - e), q) \
        - digit_sum(2 * (q - e) - 1, q)
    out = ((q - 1) * (n + k) + e, (q - 1) * (n + 1) + f)
    if verify:
        u = top_block(q, k, n, e)
        direct = (digit_sum(u, q), digit_sum(u * u, q))
        if direct != out:
            raise AssertionError(f"closed form {out} != direct {direct} (q={q}, k={k}, n={n}, e={e})")
    return out


@dataclass(frozen=True)
class BaseQFamilyParams:
    q: int
    e: int
    k1: int
    n1: int
    k2: int
    n2: int
    alpha: int

    @property
    def u(self) -> int:
        return top_block(self.q, self.k1, self.n1)

    @property
    def v(self) -> int:
        return top_block(self.q, self.k2, self.n2, self.e)

    @property
    def k(self) -> int:
        return (self.q - 1) * (2 * self.k1 + 3 * self.k2 - self.alpha) + self.e

    @property
    def min_gap(self) -> int:
        return min_noninterfering_gap(self.u, self.v, self.q)

    def violations(self) -> list[str]:
        """Names of the parameter conditions that fail (empty when all hold)."""
        q, e, k1, n1, k2, n2, a = (self.q, self.e, self.k1, self.n1, self.k2,
                                   self.n2, self.alpha)
        bad = []
        if k1 != n2:
            bad.append("k1 = n2")
        if k1 < k2 + 2:
            bad.append("k1 >= k2 + 2")
        if n1 != 2 * k2 - a:
            bad.append("n1 = 2 k2 - alpha")
        if not 2 <= k1 + 1:
            bad.append("2 <= k1 + 1")
        if not 2 <= (2 * k2 - a) - (k1 + 1):
            bad.append("2 <= n1 - (k1 + 1)")
        if not 3 <= k1 - k2 + 2 + a:
            bad.append("3 <= k1 - k2 + 2 + alpha")
        if not 1 <= k2 - a - 1:
            bad.append("1 <= k2 - alpha - 1")
        if not 0 <= a <= 15:
            bad.append("0 <= alpha <= 15")
        if a * (q - 1) != theorem6_f(q, e) + theorem6_g_w2(q, e) - e + 2:
            bad.append("alpha (q-1) = f + g - e + 2")
        return bad

    def member(self, gap: int) -> int:
        if gap < self.min_gap:
            raise DomainError(f"gap {gap} below the noninterference threshold {self.min_gap}")
        n = concat_with_gap(self.u, self.v, gap, self.q)
        s, s2 = digit_sum(n, self.q), digit_sum(n * n, self.q)
        if s != self.k or s2 != self.k:
            raise DomainError(f"gap {gap}: s(n)={s}, s(n^2)={s2}, expected {self.k}")
        return n

    def to_json(self) -> dict:
        out = asdict(self)
        out["min_gap"] = self.min_gap
        return out


def theorem6_alpha(q: int, e: int) -> int | None:
    num = theorem6_f(q, e) + theorem6_g_w2(q, e) - e + 2
    if num % (q - 1):
        return None
    return num // (q - 1)


def theorem6_solve(q: int, k: int) -> BaseQFamilyParams:
    """Block parameters for an infinite family with ``s_q(n) = s_q(n^2) = k``.

    The trailing digit is the ``e`` in ``1..q-1`` congruent to ``k`` mod
    ``q-1`` (``e = q-1`` covers ``k = 0 mod q-1``).  Among admissible
    ``(k2, k1)`` the smallest ``k2 >= 17`` and then the smallest ``k1`` is
    taken.
    """
    check_base(q)
    if q < 3:
        raise DomainError("base q >= 3 required")
    if k < 94 * (q - 1):
        raise DomainError(f"need k >= 94(q-1) = {94 * (q - 1)}, got {k}")
    if (k * (k - 1)) % (q - 1):
        raise CongruenceError(f"k(k-1) = {k * (k - 1)} is not divisible by q-1 = {q - 1}")
    e = k % (q - 1) or (q - 1)
    alpha = theorem6_alpha(q, e)
    if alpha is None or not 0 <= alpha <= 15:
        raise NoParameters(f"alpha not an integer in [0, 15] for q={q}, e={e}")
    target, rem = divmod(k - e, q - 1)  # = 2 k1 + 3 k2 - alpha
    assert rem == 0
    k2 = 17
    while 5 * k2 + 4 <= target + alpha:
        lo, hi = k2 + 2, 2 * k2 - alpha - 3  # k1 >= k2 + 2 and n1 - (k1 + 1) >= 2
        twice_k1 = target + alpha - 3 * k2
        if twice_k1 % 2 == 0 and lo <= twice_k1 // 2 <= hi:
            k1 = twice_k1 // 2
            p = BaseQFamilyParams(q, e, k1, 2 * k2 - alpha, k2, k1, alpha)
            bad = p.violations()
            if bad:
                raise NoParameters(f"constructed parameters violate {bad}")
            return p
        k2 += 1
    raise NoParameters(f"no (k1, k2) for q={q}, k={k}")


# -- witnesses t_m(q^k) --------------------------------------------------------------

@dataclass(frozen=True)
class WitnessParams:
    q: int
    l: int  # noqa: E741
    r: int
    h: int = 2
    k: int = 0

    @property
    def m(self) -> int:
        return self.q**self.l - self.r


def tm_coeffs(m: int) -> list[int]:
    """Coefficients of ``m x^4 + m x^3 - x^2 + m x + m``, lowest degree first."""
    return [m, m, -1, m, m]


def poly_pow(c: Sequence[int], h: int) -> list[int]:
    out = [1]
    for _ in range(h):
        nxt = [0] * (len(out) + len(c) - 1)
        for i, a in enumerate(out):
            if a:
                for j, b in enumerate(c):
                    nxt[i + j] += a * b
        out = nxt
    return out


def poly_eval(c: Sequence[int], x: int) -> int:
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _check_witness(p: WitnessParams) -> None:
    check_base(p.q)
    if p.l < 1 or p.h < 1:
        raise DomainError("l and h must be positive")
    if p.r < 1 or p.r % p.q == 0:
        raise DomainError(f"need r >= 1 and q not dividing r, got r={p.r}")
    if p.m < 3:
        raise DomainError(f"m = q^l - r = {p.m} must be >= 3")


def tm_witness(p: WitnessParams) -> int:
    """``t_m(q^k)``, with its digit sum checked against
    ``(q-1)k + s(m-1) + 3 s(m)``."""
    _check_witness(p)
    if p.q**p.k <= p.m:
        raise DomainError(f"need q^k > m: {p.q}^{p.k} <= {p.m}")
    n = poly_eval(tm_coeffs(p.m), p.q**p.k)
    expect = (p.q - 1) * p.k + digit_sum(p.m - 1, p.q) + 3 * digit_sum(p.m, p.q)
    got = digit_sum(n, p.q)
    if got != expect:
        raise AssertionError(f"s(t_m(q^k)) = {got}, formula gives {expect} at {p}")
    return n


def scan_start(q: int, l: int, r: int, h: int) -> int:  # noqa: E741
    """Smallest ``k`` with ``q^k`` above every coefficient of ``t_m(x)^h``
    (and above ``m``); from there on the digit sum of ``t_m(q^k)^h`` no
    longer depends on ``k``."""
    m = q**l - r
    coeffs = poly_pow(tm_coeffs(m), h)
    if min(coeffs) <= 0:
        raise DomainError(f"t_m(x)^{h} has a nonpositive coefficient for m={m}")
    top = max(max(coeffs), m)
    k = 1
    while q**k <= top:
        k += 1
    return k


def find_equal_k(q: int, l: int, r: int, h: int, k_max: int) -> int | None:  # noqa: E741
    """First ``k`` in ``[scan_start, k_max]`` with
    ``|s(t_m(q^k)^h) - s(t_m(q^k))| <= (q-1)/2``, or ``None``."""
    if h < 2:
        raise DomainError("h must be >= 2")
    _check_witness(WitnessParams(q, l, r, h, 1))
    m = q**l - r
    c = tm_coeffs(m)
    for k in range(scan_start(q, l, r, h), k_max + 1):
        n = poly_eval(c, q**k)
        diff = digit_sum(n**h, q) - digit_sum(n, q)
        if 2 * abs(diff) <= q - 1:
            return k
    return None


def default_k_max(l: int) -> int:  # noqa: E741
    return -(-5 * l // 2) + 2


# -- sharpness of the (q-1)/2 bound ------------------------------------------------------

@dataclass
class SharpnessReport:
    q: int
    a: int
    samples: int
    seed: int
    residues: list[int]

    @property
    def holds(self) -> bool:
        return self.residues == [self.a]


def bound_sharpness_check(q: int, a: int, samples: int, seed: int = 0) -> SharpnessReport:
    """Residues of ``s(p(n)) - s(n)`` mod ``q-1`` for ``p(x) = (q-1)x^2 + x + a``."""
    check_base(q)
    if q < 3 or not 0 <= a <= q - 2:
        raise DomainError("need q >= 3 and 0 <= a <= q-2")
    rng = random.Random(seed)
    seen = set()
    for _ in range(samples):
        n = rng.randrange(1, 10**40)
        p = (q - 1) * n * n + n + a
        seen.add((digit_sum(p, q) - digit_sum(n, q)) % (q - 1))
    return SharpnessReport(q, a, samples, seed, sorted(seen))
