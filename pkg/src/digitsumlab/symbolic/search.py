"""Case analysis over the exponents of ``n = 2^0 + 2^r2 + ... + 2^rk``.

``n^2`` is the sum of the powers ``2^(2 r_i)`` and ``2^(r_i + r_j + 1)``
(``i < j``).  The engine adds these up column by column, smallest exponent
first, without knowing the ``r_i``: whenever it cannot tell which pending
exponent is smallest, or whether two coincide, it splits into cases, each
recorded as a linear constraint.  A column holding ``m`` equal powers
contributes bit ``m % 2`` and carries ``m // 2`` one position up.

A branch dies when its constraints have no rational solution or when it has
already produced more one-bits than the predicate allows.  At a leaf all of
``n^2`` has been written out; its constraint region either is bounded (its
integer points are listed) or contains a ray, which is an infinite family.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from ..digits import DomainError
from .linear import (
    Constraint,
    ConstraintSystem,
    Contradiction,
    LinearForm,
    format_form,
    gap_to_r,
    make_constraint,
    parse_form,
    to_gap,
)
from .lp import INFEASIBLE, UNBOUNDED, lp_feasible, lp_max, lp_range

Form = tuple  # (const, a2, ..., ak)


# -- predicates -------------------------------------------------------------------

@dataclass(frozen=True)
class Predicate:
    """Condition on ``s_2(n^2)``: ``"eq"`` (= k), ``"lt"`` (< k) or ``"le"`` (<= bound)."""

    kind: str = "eq"
    bound: int | None = None

    @classmethod
    def parse(cls, text: str) -> "Predicate":
        text = text.strip()
        if text in ("eq", "lt"):
            return cls(text)
        if text.startswith("le:"):
            return cls("le", int(text[3:]))
        raise DomainError(f"unknown predicate {text!r}; use eq, lt or le:<b>")

    def max_ones(self, k: int) -> int:
        if self.kind == "eq":
            return k
        if self.kind == "lt":
            return k - 1
        return self.bound

    def accepts(self, ones: int, k: int) -> bool:
        if self.kind == "eq":
            return ones == k
        if self.kind == "lt":
            return ones < k
        return ones <= self.bound

    def __str__(self) -> str:
        return self.kind if self.kind != "le" else f"le:{self.bound}"


# -- nodes ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchNode:
    k: int
    pending: tuple[tuple[Form, int], ...]  # sorted (exponent form, multiplicity)
    constraints: tuple[Constraint, ...]
    ones: int
    trace: tuple[str, ...] = ()  # relations assumed on the way down
    depth: int = 0

    @property
    def weight(self) -> int:
        return sum(m for _, m in self.pending)

    @property
    def system(self) -> ConstraintSystem:
        return ConstraintSystem(self.k, self.constraints)

    def rows(self):
        return self.system.gap_rows()

    def to_json(self) -> dict:
        return {
            "pending": [[format_form(f), m] for f, m in self.pending],
            "constraints": [str(c) for c in self.constraints],
            "ones": self.ones,
            "trace": list(self.trace),
            "depth": self.depth,
        }

    @classmethod
    def from_json(cls, k: int, data: dict) -> "SearchNode":
        nv = k - 1
        pending = tuple(sorted((tuple(parse_form(f, nv)), m) for f, m in data["pending"]))
        system = ConstraintSystem.from_lines(k, data["constraints"])
        return cls(k, pending, system.constraints, data["ones"], tuple(data["trace"]),
                   data.get("depth", 0))


def square_exponent_terms(k: int) -> list[tuple[LinearForm, int]]:
    """Exponents of ``n^2`` for ``n`` with ``k`` one-bits, ``r1 = 0`` substituted."""
    if k < 1:
        raise DomainError("k must be >= 1")
    nv = k - 1
    r = [LinearForm.const(0, nv)] + [LinearForm.var(i, nv) for i in range(2, k + 1)]
    terms: dict[LinearForm, int] = {}
    for i in range(k):
        f = r[i].scale(2)
        terms[f] = terms.get(f, 0) + 1
    for i in range(k):
        for j in range(i + 1, k):
            f = r[i] + r[j] + 1
            terms[f] = terms.get(f, 0) + 1
    return sorted(terms.items())


def root_node(k: int) -> SearchNode:
    pending = tuple((tuple(f), m) for f, m in square_exponent_terms(k))
    return SearchNode(k, pending, (), 0)


# -- one column step ------------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _chain_less(a: Form, b: Form) -> bool:
    """``a < b`` for every r satisfying the ordering chain alone."""
    g = to_gap(tuple(x - y for x, y in zip(b, a)))
    return g[0] >= 1 and all(x >= 0 for x in g[1:])


@dataclass
class StepStats:
    lp_calls: int = 0
    infeasible: int = 0


def _relations(D: Form, rows, nv: int, stats: StepStats):
    """Feasible relations of ``D`` to 0 among ``>``, ``=``, ``<`` and the
    constraint needed for each; ``None`` when ``rows`` itself is infeasible."""
    g = to_gap(D)
    c0, b = g[0], g[1:]
    if all(x >= 0 for x in b):
        if c0 >= 1:
            return [(">", None)]
        if not any(b):
            return [("=" if c0 == 0 else "<", None)]
    elif all(x <= 0 for x in b):
        if c0 <= -1:
            return [("<", None)]
    stats.lp_calls += 1
    rng = lp_range(rows, b, nv)
    if rng is None:
        return None
    lo, hi = rng
    lo = None if lo is None else c0 + lo
    hi = None if hi is None else c0 + hi
    out = []
    if hi is None or hi >= 1:
        implied = lo is not None and lo >= 1
        out.append((">", None if implied else (tuple(D), -1, ">=")))
    if (lo is None or lo <= 0) and (hi is None or hi >= 0):
        implied = lo == 0 and hi == 0
        out.append(("=", None if implied else (tuple(D), 0, "=")))
    if lo is None or lo <= -1:
        implied = hi is not None and hi <= -1
        out.append(("<", None if implied else (tuple(-x for x in D), -1, ">=")))
    return out


def _with(constraints, rows, spec):
    """Add constraint ``spec = (expr, shift, op)``; ``None`` if contradictory."""
    if spec is None:
        return constraints, rows
    expr, shift, op = spec
    try:
        c = make_constraint((expr[0] + shift,) + tuple(expr[1:]), op)
    except Contradiction:
        return None
    if c is None or c in constraints:
        return constraints, rows
    extra = ConstraintSystem(0, (c,)).gap_rows()
    return constraints + (c,), rows + extra


def resolve_min_step(node: SearchNode, stats: StepStats | None = None) -> list[SearchNode]:
    """Split on which pending exponents are smallest and consume that column."""
    if not node.pending:
        raise DomainError("node has no pending terms")
    stats = stats or StepStats()
    nv = node.k - 1
    forms = [f for f, _ in node.pending]
    mult = dict(node.pending)
    cands = [f for f in forms if not any(_chain_less(g, f) for g in forms if g != f)]
    # tournament: (constraints, rows, current minimum, tied group, decisions)
    states = [(node.constraints, node.rows(), cands[0], [cands[0]], [])]
    for g in cands[1:]:
        nxt = []
        for cons, rows, m, group, log in states:
            D = tuple(x - y for x, y in zip(g, m))
            rel = _relations(D, rows, nv, stats)
            if rel is None:
                stats.infeasible += 1
                continue
            for kind, spec in rel:
                added = _with(cons, rows, spec)
                if added is None:
                    stats.infeasible += 1
                    continue
                cons2, rows2 = added
                log2 = log if spec is None else log + [f"{format_form(g)} {kind} {format_form(m)}"]
                if kind == ">":
                    nxt.append((cons2, rows2, m, group, log2))
                elif kind == "=":
                    nxt.append((cons2, rows2, m, group + [g], log2))
                else:
                    nxt.append((cons2, rows2, g, [g], log2))
        states = nxt
    children = []
    for cons, rows, m, group, log in states:
        total = sum(mult[f] for f in group)
        rest = {f: c for f, c in mult.items() if f not in group}
        if total // 2:
            up = (m[0] + 1,) + tuple(m[1:])
            rest[up] = rest.get(up, 0) + total // 2
        children.append(SearchNode(
            node.k,
            tuple(sorted(rest.items())),
            cons,
            node.ones + total % 2,
            node.trace + tuple(log),
            node.depth + 1,
        ))
    return children


# -- leaves -----------------------------------------------------------------------------

def _substitute(rows, values: Sequence[int]):
    """Fix the first ``len(values)`` gap variables."""
    j = len(values)
    out = []
    for a, b in rows:
        out.append((tuple(a[j:]), b - sum(x * v for x, v in zip(a[:j], values))))
    return out


def _integer_points(rows, nv: int, extra_limit: int | None = None) -> Iterator[tuple[int, ...]]:
    """Integer gap vectors of a bounded system, lexicographic order."""

    def rec(prefix: list[int]) -> Iterator[tuple[int, ...]]:
        j = len(prefix)
        sub = _substitute(rows, prefix)
        if j == nv:
            if all(b >= 0 for _, b in sub):
                yield tuple(prefix)
            return
        width = nv - j
        unit = [1] + [0] * (width - 1)
        rng = lp_range(sub, unit, width)
        if rng is None:
            return
        lo, hi = rng
        if hi is None:
            raise DomainError("unbounded system passed to integer enumeration")
        for v in range(math.ceil(lo), math.floor(hi) + 1):
            yield from rec(prefix + [v])

    if nv == 0:
        if all(b >= 0 for _, b in rows):
            yield ()
        return
    yield from rec([])


def feasible(system: ConstraintSystem) -> bool:
    """Rational feasibility of ``system`` together with the ordering chain.

    ``False`` means no rational point exists, so no integer point either.
    """
    return lp_feasible(system.gap_rows(), system.nvars)


def n_from_r(r: Sequence[int]) -> int:
    return 1 + sum(1 << x for x in r)


def enumerate_leaf_solutions(system: ConstraintSystem, k: int | None = None) -> list[int]:
    """All ``n = 1 + sum 2^r_i`` over integer points of a bounded system, sorted."""
    k = system.k if k is None else k
    nv = k - 1
    rows = system.gap_rows()
    if nv and lp_max(rows, [1] * nv, nv)[0] == UNBOUNDED:
        raise DomainError("constraint system is unbounded")
    if nv and lp_max(rows, [0] * nv, nv)[0] == INFEASIBLE:
        return []
    return sorted(n_from_r(gap_to_r(d)) for d in _integer_points(rows, nv))


@dataclass
class Family:
    constraints: list[str]
    base_r: tuple[int, ...]
    direction: tuple[int, ...]  # added to r per unit of the free parameter
    samples: list[int]
    trace: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "constraints": self.constraints,
            "base_r": list(self.base_r),
            "direction": list(self.direction),
            "samples": [str(n) for n in self.samples],
            "samples_bin": [bin(n)[2:] for n in self.samples],
        }


def _ray(rows, nv: int) -> tuple[int, ...]:
    cone = [(a, 0) for a, _ in rows] + [((1,) * nv, 1)]
    status, _, x = lp_max(cone, [1] * nv, nv)
    assert status != INFEASIBLE and status != UNBOUNDED
    den = 1
    for v in x:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ray = [int(v * den) for v in x]
    g = 0
    for v in ray:
        g = math.gcd(g, v)
    return tuple(v // g for v in ray)


def _family(node: SearchNode, rows, nv: int, pred: Predicate, box: int) -> Family | None:
    status, lo, _ = lp_max(rows, [-1] * nv, nv)
    base = math.ceil(-lo)
    for size in range(base, base + box + 1):
        boxed = rows + [((1,) * nv, size)]
        point = next(_integer_points(boxed, nv), None)
        if point is not None:
            break
    else:
        return None
    ray = _ray(rows, nv)
    samples = []
    for t in range(3):
        d = tuple(p + t * v for p, v in zip(point, ray))
        n = n_from_r(gap_to_r(d))
        if n.bit_count() != node.k or not pred.accepts((n * n).bit_count(), node.k):
            raise AssertionError(f"family instantiation {n} failed verification")
        samples.append(n)
    r0 = gap_to_r(point)
    dr, acc = [], 0
    for v in ray:
        acc += v
        dr.append(acc)
    return Family([str(c) for c in node.constraints], r0, tuple(dr), samples, node.trace)


# -- driver ----------------------------------------------------------------------------

@dataclass
class SearchStats:
    nodes: int = 0
    leaves: int = 0
    pruned_ones: int = 0
    infeasible: int = 0
    lp_calls: int = 0
    max_depth: int = 0
    seconds: float = 0.0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.leaves += other.leaves
        self.pruned_ones += other.pruned_ones
        self.infeasible += other.infeasible
        self.lp_calls += other.lp_calls
        self.max_depth = max(self.max_depth, other.max_depth)

    def to_json(self) -> dict:
        return {
            "nodes": self.nodes,
            "leaves": self.leaves,
            "pruned_ones": self.pruned_ones,
            "infeasible": self.infeasible,
            "lp_calls": self.lp_calls,
            "max_depth": self.max_depth,
        }


@dataclass
class SearchOutcome:
    """``kind`` is ``"complete_finite"``, ``"family_found"`` or ``"resource_limit"``."""

    kind: str
    k: int
    predicate: str
    solutions: list[int]
    families: list[Family] = field(default_factory=list)
    stats: SearchStats = field(default_factory=SearchStats)
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "predicate": self.predicate,
            "solutions": self.solutions,
            "families": [f.to_json() for f in self.families],
            "stats": self.stats.to_json(),
            "reason": self.reason,
        }


@dataclass
class Limits:
    max_nodes: int | None = None
    max_seconds: float | None = None
    family_box: int = 64


class _Run:
    """DFS state; ``stack`` is what a checkpoint stores."""

    def __init__(self, k: int, pred: Predicate, stack: list[SearchNode]):
        self.k = k
        self.pred = pred
        self.stack = stack
        self.solutions: set[int] = set()
        self.families: list[Family] = []
        self.unresolved: list[SearchNode] = []
        self.stats = SearchStats()

    def step(self) -> None:
        node = self.stack.pop()
        st = self.stats
        st.nodes += 1
        st.max_depth = max(st.max_depth, node.depth)
        if not node.pending:
            self._leaf(node)
            return
        ss = StepStats()
        children = resolve_min_step(node, ss)
        st.lp_calls += ss.lp_calls
        st.infeasible += ss.infeasible
        cap = self.pred.max_ones(self.k)
        keep = []
        for ch in children:
            if ch.ones > cap:
                st.pruned_ones += 1
            else:
                keep.append(ch)
        self.stack.extend(reversed(keep))

    def _leaf(self, node: SearchNode, family_box: int = 64) -> None:
        self.stats.leaves += 1
        if not self.pred.accepts(node.ones, self.k):
            return
        nv = self.k - 1
        rows = node.rows()
        if nv and lp_max(rows, [1] * nv, nv)[0] == UNBOUNDED:
            fam = _family(node, rows, nv, self.pred, family_box)
            if fam is None:
                self.unresolved.append(node)
            else:
                self.families.append(fam)
            return
        for d in _integer_points(rows, nv):
            n = n_from_r(gap_to_r(d))
            if n.bit_count() != self.k or not self.pred.accepts((n * n).bit_count(), self.k):
                raise AssertionError(f"leaf point {n} failed verification")
            self.solutions.add(n)

    def outcome(self, reason: str = "") -> SearchOutcome:
        sols = sorted(self.solutions)
        if self.stack or self.unresolved:
            why = reason or f"{len(self.unresolved)} unbounded leaves without integer points found"
            return SearchOutcome("resource_limit", self.k, str(self.pred), sols,
                                 self.families, self.stats, why)
        if self.families:
            return SearchOutcome("family_found", self.k, str(self.pred), sols,
                                 self.families, self.stats)
        return SearchOutcome("complete_finite", self.k, str(self.pred), sols, [], self.stats)


def _drive(run: _Run, limits: Limits, checkpoint: str | None, every: int) -> str:
    start = time.monotonic()
    reason = ""
    while run.stack:
        if limits.max_nodes is not None and run.stats.nodes >= limits.max_nodes:
            reason = f"node budget {limits.max_nodes} exhausted"
            break
        if limits.max_seconds is not None and time.monotonic() - start > limits.max_seconds:
            reason = f"time budget {limits.max_seconds}s exhausted"
            break
        run.step()
        if checkpoint and every and run.stats.nodes % every == 0:
            save_checkpoint(checkpoint, run)
    run.stats.seconds += time.monotonic() - start
    return reason


def run_search(
    k: int,
    predicate: Predicate | str = "eq",
    limits: Limits | None = None,
    checkpoint: str | None = None,
    resume: bool = False,
    checkpoint_every: int = 5000,
    threads: int = 1,
) -> SearchOutcome:
    """Run the case analysis for ``k`` one-bits to completion or budget.

    With ``resume=True`` the DFS stack, solutions and statistics are read back
    from ``checkpoint``.  A checkpoint is always written when the budget runs
    out, so an interrupted search can be continued.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    pred = Predicate.parse(predicate) if isinstance(predicate, str) else predicate
    limits = limits or Limits()
    if resume:
        if not checkpoint:
            raise DomainError("resume needs a checkpoint path")
        run = load_checkpoint(checkpoint)
        if run.k != k or str(run.pred) != str(pred):
            raise DomainError("checkpoint was written for a different search")
    else:
        run = _Run(k, pred, [root_node(k)])
    if threads > 1:
        return _parallel(run, limits, threads, checkpoint)
    reason = _drive(run, limits, checkpoint, checkpoint_every)
    if checkpoint and (run.stack or reason):
        save_checkpoint(checkpoint, run)
    return run.outcome(reason)


# -- parallel -------------------------------------------------------------------------

def _subtree(k: int, pred: str, node_json: dict, limits: Limits):
    run = _Run(k, Predicate.parse(pred), [SearchNode.from_json(k, node_json)])
    reason = _drive(run, limits, None, 0)
    return (sorted(run.solutions), [f for f in run.families],
            [n.to_json() for n in run.unresolved],
            [n.to_json() for n in run.stack], run.stats, reason)


def _parallel(run: _Run, limits: Limits, threads: int, checkpoint: str | None) -> SearchOutcome:
    # expand breadth-first until there is enough independent work
    while run.stack and len(run.stack) < 8 * threads:
        frontier = run.stack
        run.stack = []
        for node in frontier:
            run.stack.append(node)
            run.step()
            # step() pops the node it expands
    frontier = list(run.stack)
    run.stack = []
    sub_limits = Limits(
        None if limits.max_nodes is None else max(1, limits.max_nodes // max(1, len(frontier))),
        limits.max_seconds,
        limits.family_box,
    )
    reasons = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(_subtree, run.k, str(run.pred), n.to_json(), sub_limits)
                for n in frontier]
        for fut in futs:
            sols, fams, unres, rest, stats, reason = fut.result()
            run.solutions.update(sols)
            run.families.extend(fams)
            run.unresolved.extend(SearchNode.from_json(run.k, u) for u in unres)
            run.stack.extend(SearchNode.from_json(run.k, s) for s in rest)
            run.stats.merge(stats)
            if reason:
                reasons.append(reason)
    if checkpoint and run.stack:
        save_checkpoint(checkpoint, run)
    return run.outcome(reasons[0] if reasons else "")


# -- checkpoints ------------------------------------------------------------------------

def save_checkpoint(path: str, run: _Run) -> None:
    """Line-delimited JSON: a header, then one pending search node per line
    (bottom of the DFS stack first)."""
    header = {
        "k": run.k,
        "predicate": str(run.pred),
        "solutions": sorted(run.solutions),
        "families": [f.to_json() | {"trace": list(f.trace)} for f in run.families],
        "unresolved": [n.to_json() for n in run.unresolved],
        "stats": run.stats.to_json(),
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for node in run.stack:
            fh.write(json.dumps(node.to_json(), sort_keys=True) + "\n")

    os.replace(tmp, path)


def load_checkpoint(path: str) -> _Run:
    with open(path) as fh:
        header = json.loads(fh.readline())
        k = header["k"]
        stack = [SearchNode.from_json(k, json.loads(line)) for line in fh if line.strip()]
    run = _Run(k, Predicate.parse(header["predicate"]), stack)
    run.solutions = set(header["solutions"])
    run.families = [
        Family(f["constraints"], tuple(f["base_r"]), tuple(f["direction"]),
               [int(s) for s in f["samples"]], tuple(f.get("trace", ())))
        for f in header["families"]
    ]
    run.unresolved = [SearchNode.from_json(k, u) for u in header["unresolved"]]
    st = header["stats"]
    run.stats = SearchStats(st["nodes"], st["leaves"], st["pruned_ones"], st["infeasible"],
                            st["lp_calls"], st["max_depth"])
    return run


# -- audit export -------------------------------------------------------------------------

def case_tree(k: int, predicate: Predicate | str = "eq", max_nodes: int = 10000) -> dict:
    """Nested record of every split, for small ``k``.

    Each child lists the relations decided at its split, the column it
    consumed and the bit it wrote; leaves carry their outcome.
    """
    pred = Predicate.parse(predicate) if isinstance(predicate, str) else predicate
    budget = [max_nodes]

    def visit(node: SearchNode) -> dict:
        budget[0] -= 1
        if budget[0] < 0:
            return {"outcome": "truncated"}
        if not node.pending:
            if not pred.accepts(node.ones, k):
                return {"outcome": "rejected", "ones": node.ones}
            run = _Run(k, pred, [])
            run._leaf(node)
            if run.families:
                return {"outcome": "family", "family": run.families[0].to_json()}
            if run.unresolved:
                return {"outcome": "unresolved"}
            return {"outcome": "solutions", "solutions": sorted(run.solutions)}
        kids = []
        for ch in resolve_min_step(node):
            rec = {"added": [str(c) for c in ch.constraints[len(node.constraints):]],
                   "ones": ch.ones}
            if ch.ones > pred.max_ones(k):
                rec["outcome"] = "pruned"
            else:
                rec.update(visit(ch))
            kids.append(rec)
        return {"pending": [[format_form(f), m] for f, m in node.pending], "children": kids}

    return {"k": k, "predicate": str(pred), "root": visit(root_node(k))}
