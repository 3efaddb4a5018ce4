"""Exact rational linear programming over ``x >= 0``.

Two independent routes:

* :func:`lp_max` is a dense two-phase simplex on ``gmpy2.mpq`` rationals
  with Bland's rule (no cycling).  The search engine uses it.
* :func:`fm_feasible` / :func:`fm_range` are Fourier-Motzkin elimination on
  :class:`fractions.Fraction`.  They are exponential in the worst case and
  serve as a cross-check.

Systems are lists of rows ``(a, b)`` meaning ``a . x <= b``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq as Q

Row = tuple[Sequence[int], int]

INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
OPTIMAL = "optimal"


def _pivot(T: list[list], basis: list[int], r: int, col: int) -> None:
    row = T[r]
    p = row[col]
    if p != 1:
        row = [v / p for v in row]
        T[r] = row
    for i, other in enumerate(T):
        if i != r:
            f = other[col]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]
    basis[r] = col


def _simplex(T, basis, banned: int | None) -> str:
    """Maximize the objective held in the last row of ``T`` (stored as -c)."""
    m = len(T) - 1
    ncols = len(T[m]) - 1
    while True:
        obj = T[m]
        col = next((j for j in range(ncols) if obj[j] < 0 and j != banned), None)
        if col is None:
            return OPTIMAL
        best, r = None, None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                    best, r = ratio, i
        if r is None:
            return UNBOUNDED
        _pivot(T, basis, r, col)


def _phase1(rows: Sequence[Row], n: int):
    """Feasible tableau (without objective row) and basis, or ``None``.

    Columns are ``x`` (n), one slack per row, then the artificial variable,
    then the right-hand side.  The artificial column must never re-enter.
    """
    m = len(rows)
    art = n + m
    zero, one = Q(0), Q(1)
    T = []
    for i, (a, b) in enumerate(rows):
        row = [Q(v) for v in a] + [zero] * (m + 1) + [Q(b)]
        row[n + i] = one
        row[art] = -one
        T.append(row)
    basis = [n + i for i in range(m)]
    if m and min(b for _, b in rows) < 0:
        obj = [zero] * (n + m + 2)
        obj[art] = one  # maximize -x0
        T.append(obj)
        r = min(range(m), key=lambda i: (T[i][-1], i))
        _pivot(T, basis, r, art)
        _simplex(T, basis, None)
        if T[m][-1] < 0:
            return None
        if art in basis:
            r = basis.index(art)
            col = next((j for j in range(art) if T[r][j] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)
        T.pop()
    return T, basis


def _optimize(T, basis, c: Sequence[int], n: int):
    m = len(T)
    art = n + m
    obj = [Q(-v) for v in c] + [Q(0)] * (m + 2)
    for i, bvar in enumerate(basis):
        f = obj[bvar]
        if f:
            obj = [a - f * b for a, b in zip(obj, T[i])]
    T = T + [obj]
    basis = list(basis)
    if _simplex(T, basis, art) == UNBOUNDED:
        return UNBOUNDED, None, None
    x = [Q(0)] * n
    for i, bvar in enumerate(basis):
        if bvar < n:
            x[bvar] = T[i][-1]
    return OPTIMAL, T[m][-1], x


def lp_max(rows: Sequence[Row], c: Sequence[int], n: int):
    """Maximize ``c . x`` subject to ``rows`` and ``x >= 0``.

    Returns ``(status, value, x)`` with exact rationals; ``value`` and ``x``
    are only meaningful when ``status == "optimal"``.
    """
    if n == 0:
        ok = all(b >= 0 for _, b in rows)
        return (OPTIMAL, Q(0), []) if ok else (INFEASIBLE, None, None)
    start = _phase1(rows, n)
    if start is None:
        return INFEASIBLE, None, None
    T, basis = start
    return _optimize(T, basis, c, n)


def lp_feasible(rows: Sequence[Row], n: int) -> bool:
    if n == 0:
        return all(b >= 0 for _, b in rows)
    return _phase1(rows, n) is not None


def lp_range(rows: Sequence[Row], c: Sequence[int], n: int):
    """``(lo, hi)`` of ``c . x``; ``None`` for an infeasible system and
    ``None`` entries for unbounded directions."""
    if n == 0:
        return (Q(0), Q(0)) if all(b >= 0 for _, b in rows) else None
    start = _phase1(rows, n)
    if start is None:
        return None
    T, basis = start
    st_hi, hi, _ = _optimize(T, basis, c, n)
    st_lo, lo, _ = _optimize(T, basis, [-v for v in c], n)
    return (None if st_lo == UNBOUNDED else -lo, None if st_hi == UNBOUNDED else hi)


# -- Fourier-Motzkin -------------------------------------------------------------
# Rows carry the set of original rows they combine; after eliminating j
# variables a row built from more than j + 1 originals is redundant
# (Chernikov's rule) and is dropped.

def _normalize(a, b):
    # scale so the first nonzero coefficient has magnitude 1, for deduplication
    piv = next((abs(v) for v in a if v != 0), None)
    if piv is None:
        return a, b
    return tuple(v / piv for v in a), b / piv


def _eliminate(rows, j, eliminated):
    pos, neg, keep = [], [], {}
    for a, b, hist in rows:
        if a[j] > 0:
            pos.append((a, b, hist))
        elif a[j] < 0:
            neg.append((a, b, hist))
        else:
            keep.setdefault(_normalize(a, b), hist)
    for ap, bp, hp in pos:
        for an, bn, hn in neg:
            hist = hp | hn
            if len(hist) > eliminated + 1:
                continue
            fp, fn = -an[j], ap[j]
            a = tuple(fp * x + fn * y for x, y in zip(ap, an))
            key = _normalize(a, fp * bp + fn * bn)
            if key not in keep or len(hist) < len(keep[key]):
                keep[key] = hist
    return [(a, b, h) for (a, b), h in keep.items()]


def _fm_system(rows: Sequence[Row], n: int, width: int):
    out = []
    for i, (a, b) in enumerate(rows):
        a = tuple(Fraction(v) for v in a) + (Fraction(0),) * (width - len(a))
        out.append((a, Fraction(b), frozenset([i])))
    for j in range(n):
        e = [Fraction(0)] * width
        e[j] = Fraction(-1)
        out.append((tuple(e), Fraction(0), frozenset([len(rows) + j])))  # x_j >= 0
    return out


def fm_feasible(rows: Sequence[Row], n: int) -> bool:
    sys_ = _fm_system(rows, n, n)
    for j in range(n):
        sys_ = _eliminate(sys_, j, j + 1)
        if any(b < 0 and not any(a) for a, b, _ in sys_):
            return False
    return all(b >= 0 for a, b, _ in sys_)


def fm_range(rows: Sequence[Row], c: Sequence[int], n: int):
    """Range of ``c . x`` by projecting onto a new variable ``t = c . x``."""
    ext = [(tuple(a) + (0,), b) for a, b in rows]
    ext.append((tuple(c) + (-1,), 0))  # c.x - t <= 0
    ext.append((tuple(-v for v in c) + (1,), 0))  # t - c.x <= 0
    sys_ = _fm_system(ext, n, n + 1)
    for j in range(n):
        sys_ = _eliminate(sys_, j, j + 1)
    lo, hi = None, None
    for a, b, _ in sys_:
        t = a[n]
        if t > 0:
            v = b / t
            hi = v if hi is None else min(hi, v)
        elif t < 0:
            v = b / t
            lo = v if lo is None else max(lo, v)
        elif b < 0:
            return None
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi
