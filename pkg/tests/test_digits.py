from __future__ import annotations

import pytest

from digitsumlab.digits import (
    DigitWord,
    DomainError,
    block_word,
    concat_with_gap,
    digit_len,
    digit_sum,
    format_number,
    from_digits,
    min_noninterfering_gap,
    parse_word,
    split_add,
    split_sub,
    to_digits,
)


@pytest.mark.parametrize("n,q,expected", [
    (0, 10, 0),
    (7, 2, 3),
    (33839, 2, 7),
    (91, 2, 5),
    (8281, 2, 5),
    (4999, 10, 31),
    (255, 16, 30),
    (80, 3, 8),
])
def test_digit_sum_values(n, q, expected):
    assert digit_sum(n, q) == expected


def test_digit_sum_power_of_two_radix_matches_divmod():
    for q in (4, 8, 16, 64):
        for n in range(0, 5000, 7):
            m, total = n, 0
            while m:
                m, d = divmod(m, q)
                total += d
            assert digit_sum(n, q) == total


def test_digit_sum_big_square_is_exact():
    n = 10**100 + 12345
    assert digit_sum(n * n, 10) == sum(int(c) for c in str(n * n))


def test_digit_sum_rejects_bad_input():
    with pytest.raises(DomainError):
        digit_sum(-1)
    with pytest.raises(DomainError):
        digit_sum(5, 1)


def test_digit_len():
    assert digit_len(0) == 1
    assert digit_len(1058, 2) == 11
    assert digit_len(999, 10) == 3
    assert digit_len(1000, 10) == 4


def test_to_digits_examples():
    assert to_digits(111, 2).digits == (1, 1, 0, 1, 1, 1, 1)
    assert from_digits([1, 0, 1], 2) == 5
    assert to_digits(4999, 10).digits == (4, 9, 9, 9)
    assert to_digits(0, 7).digits == (0,)


def test_digit_word_rejects_noncanonical():
    with pytest.raises(DomainError):
        DigitWord(2, (0, 1))
    with pytest.raises(DomainError):
        DigitWord(3, (1, 3))
    with pytest.raises(DomainError):
        from_digits([1, 2], 2)
    with pytest.raises(DomainError):
        from_digits([1, 0])


def test_word_value_property():
    assert to_digits(23575, 2).value == 23575


@pytest.mark.parametrize("a,b,k,q,expected", [
    (5, 3, 2, 2, 4),
    (1, 23, 2, 10, 6),
    (23, 23, 11, 2, 8),
])
def test_split_add(a, b, k, q, expected):
    assert split_add(a, b, k, q) == expected


@pytest.mark.parametrize("a,b,k,q,expected", [
    (1, 1, 3, 2, 3),
    (5, 1, 3, 10, 31),
    (2, 3, 4, 2, 4),
])
def test_split_sub(a, b, k, q, expected):
    assert split_sub(a, b, k, q) == expected


@pytest.mark.parametrize("a,b,k", [(1, 4, 2), (0, 1, 2), (1, 0, 2), (1, 1, 0)])
def test_split_preconditions(a, b, k):
    with pytest.raises(DomainError):
        split_add(a, b, k, 2)
    with pytest.raises(DomainError):
        split_sub(a, b, k, 2)


def test_concat_with_gap():
    assert concat_with_gap(23, 23, 10, 2) == 23575
    assert concat_with_gap(1, 0, 5, 2) == 32
    assert concat_with_gap(111, 111, 13, 2) == 909423
    with pytest.raises(DomainError):
        concat_with_gap(1, 8, 3, 2)


def test_min_noninterfering_gap():
    assert min_noninterfering_gap(23, 23, 2) == 11
    assert min_noninterfering_gap(1, 1, 2) == 2
    # below the threshold the blocks interfere, at it they split
    below = concat_with_gap(23, 23, 10)
    at = concat_with_gap(23, 23, 11)
    assert digit_sum(below * below) == 8
    assert digit_sum(at * at) == 9 == 3 + 3 + 3


def test_format_and_parse():
    assert format_number(91, 2) == "1011011"
    assert format_number(0, 7) == "0"
    assert format_number(255, 16) == "15.15"
    assert parse_word("1101111 0^8 1101111", 2).value == (111 << 15) + 111
    assert parse_word("0^3 1 2", 3).digits == (1, 2)
    assert parse_word("15.0 3", 16).value == 15 * 256 + 3
    with pytest.raises(DomainError):
        parse_word("12", 2)
    with pytest.raises(DomainError):
        parse_word("", 2)
    with pytest.raises(DomainError):
        parse_word("1x", 2)


def test_block_word():
    assert block_word([(1, 2), (0, 1), (1, 4)], 2) == 111
    assert block_word([(2, 3)], 3) == 26
    with pytest.raises(DomainError):
        block_word([(2, 1)], 2)
