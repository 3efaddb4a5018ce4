"""Randomized property suites, 10^4 cases each."""
from __future__ import annotations

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from digitsumlab.digits import (
    concat_with_gap,
    digit_len,
    digit_sum,
    from_digits,
    min_noninterfering_gap,
    split_add,
    split_sub,
    to_digits,
)
from digitsumlab.enumeration import density_count
from digitsumlab.families import (
    Base2FamilyParams,
    WitnessParams,
    lemma42_case,
    lemma42_sums,
    lemma61_sums,
    tm_witness,
)

CASES = settings(max_examples=10_000, deadline=None,
                 suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])

bases = st.integers(2, 16)
naturals = st.integers(0, 10**60)


@st.composite
def split_inputs(draw):
    q = draw(bases)
    k = draw(st.integers(1, 60))
    a = draw(st.integers(1, 10**40))
    b = draw(st.integers(1, q**k - 1))
    return a, b, k, q


@CASES
@given(split_inputs())
def test_split_add_identity(args):
    a, b, k, q = args
    assert split_add(a, b, k, q) == digit_sum(a, q) + digit_sum(b, q)


@CASES
@given(split_inputs())
def test_split_sub_identity(args):
    a, b, k, q = args
    assert split_sub(a, b, k, q) == digit_sum(a - 1, q) + (q - 1) * k - digit_sum(b - 1, q)


@CASES
@given(naturals, bases)
def test_congruence_mod_q_minus_one(n, q):
    assert (digit_sum(n, q) - n) % (q - 1) == 0


@CASES
@given(naturals, bases)
def test_digits_round_trip(n, q):
    w = to_digits(n, q)
    assert w.value == n == from_digits(w.digits, q)
    assert len(w.digits) == digit_len(n, q)


@CASES
@given(st.integers(1, 10**12), st.integers(1, 10**12), bases, st.integers(0, 6))
def test_concat_noninterference(u, v, q, extra):
    j = min_noninterfering_gap(u, v, q) + extra
    n = concat_with_gap(u, v, j, q)
    assert digit_sum(n, q) == digit_sum(u, q) + digit_sum(v, q)
    assert digit_sum(n * n, q) == (digit_sum(u * u, q) + digit_sum(2 * u * v, q)
                                   + digit_sum(v * v, q))


LEMMA42_GRID = [
    Base2FamilyParams(k1, n1, k2, n2)
    for k1 in range(2, 7) for k2 in range(2, 7)
    for n1 in range(k1 + 2, k1 + 9) for n2 in range(k2 + 2, k2 + 9)
    if n1 >= n2
]
LEMMA42_COVERED = [p for p in LEMMA42_GRID if lemma42_case(p) is not None]


def test_lemma42_full_grid():
    assert len(LEMMA42_COVERED) > 20
    for p in LEMMA42_COVERED:
        lemma42_sums(p, verify=True)


@CASES
@given(st.sampled_from(LEMMA42_COVERED))
def test_lemma42_sampled(p):
    u, v = p.u, p.v
    assert lemma42_sums(p) == ((u * u).bit_count(), (v * v).bit_count(), (u * v).bit_count())


@st.composite
def lemma61_inputs(draw):
    q = draw(st.integers(3, 16))
    k = draw(st.integers(2, 12))
    n = draw(st.integers(k + 2, k + 14))
    e = draw(st.integers(0, q - 2))
    return q, k, n, e


@CASES
@given(lemma61_inputs())
def test_lemma61_closed_form(args):
    q, k, n, e = args
    lemma61_sums(q, k, n, e, verify=True)


@st.composite
def witness_inputs(draw):
    q = draw(st.integers(2, 10))
    l = draw(st.integers(1 if q >= 4 else 2, 6))  # noqa: E741
    r = draw(st.integers(1, q**l - 3))
    assume(r % q != 0)
    m = q**l - r
    k = draw(st.integers(digit_len(m, q), digit_len(m, q) + 12))
    assume(q**k > m)
    return WitnessParams(q, l, r, 2, k)


@CASES
@given(witness_inputs())
def test_tm_witness_formula(p):
    n = tm_witness(p)
    m = p.m
    assert digit_sum(n, p.q) == (p.q - 1) * p.k + digit_sum(m - 1, p.q) + 3 * digit_sum(m, p.q)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 3000))
def test_density_monotone_and_doubling(N):
    assert density_count(N) <= density_count(N + 1)
    assert density_count(2 * N) >= density_count(N)
