"""Command-line front end.

Exit codes: 0 success, 2 resource limit (inconclusive), 3 precondition
error, 4 fixture mismatch.
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from typing import Callable, Sequence

from . import __version__
from .digits import (
    DomainError,
    digit_sum,
    format_number,
    min_noninterfering_gap,
    split_add,
    split_sub,
)
from .enumeration import (
    EnumSpec,
    deficient_search,
    default_threads,
    density_scan,
    replay_contradiction,
    solutions_equal_square,
)
from .families import (
    default_k_max,
    find_equal_k,
    theorem5_pair,
    theorem6_solve,
    tm_coeffs,
    poly_eval,
)
from .report import (
    ReportEnvelope,
    TableRows,
    compare_csv,
    deficiency_rows,
    golden_solutions,
    solution_rows,
    sumdigits_line,
)
from .symbolic.search import Limits, run_search

EXIT_OK, EXIT_LIMIT, EXIT_PRECONDITION, EXIT_MISMATCH = 0, 2, 3, 4
MAX_DENSITY_EXPONENT = 26


def _config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "format")}


def _emit(args, payload, table: TableRows | None = None, text: str | None = None,
          started: float = 0.0) -> None:
    fmt = args.format
    if fmt == "csv" and table is not None:
        sys.stdout.write(table.to_csv())
    elif fmt == "text" and (text is not None or table is not None):
        sys.stdout.write(text if text is not None else table.to_text())
    else:
        env = ReportEnvelope(args.command, _config(args), payload, time.time() - started)
        sys.stdout.write(env.dumps() + "\n")


def cmd_sumdigits(args) -> int:
    q = args.base
    if args.n < 0:
        raise DomainError("n must be >= 0")
    line = sumdigits_line(args.n, q)
    payload = {"n": args.n, "word": format_number(args.n, q),
               "s": digit_sum(args.n, q), "s2": digit_sum(args.n * args.n, q)}
    if args.format == "json":
        _emit(args, payload)
    else:
        print(line)
    return EXIT_OK


def cmd_table(args) -> int:
    t0 = time.time()
    ks = args.k or [1, 2, 3, 4, 5, 6, 7]
    by_k = {k: solutions_equal_square(EnumSpec(2, k, args.max_len), args.threads) for k in ks}
    table = solution_rows(by_k)
    status = EXIT_OK
    if args.check:
        for k, sols in by_k.items():
            gold = golden_solutions(k)
            if gold is not None and args.max_len >= 32 and gold != sols:
                print(f"fixture mismatch at k={k}", file=sys.stderr)
                status = EXIT_MISMATCH
    payload = {"max_len": args.max_len, "rows": table.to_json()}
    _emit(args, payload, table, started=t0)
    if args.format != "json":
        print(f"# complete for n < 2^{args.max_len}", file=sys.stderr)
    return status


def cmd_table3(args) -> int:
    t0 = time.time()
    table = deficient_search(args.max_s, args.max_s2, args.max_len)
    rows = deficiency_rows(table)
    status = EXIT_OK
    if args.check and not compare_csv(rows, "table3.csv"):
        print("fixture mismatch: table3.csv", file=sys.stderr)
        status = EXIT_MISMATCH
    payload = {"max_s": args.max_s, "max_s2": args.max_s2, "max_len": args.max_len,
               "rows": rows.to_json()}
    _emit(args, payload, rows, started=t0)
    return status


def cmd_replay(args) -> int:
    t0 = time.time()
    k = args.k[0] if args.k else 8
    table = deficient_search(max(k - 2, 2), max(k - 4, 1), args.max_len)
    report = replay_contradiction(k, table)
    lines = [f"k={k}: {report.verdict}"]
    for c in report.cases:
        parts = [f"v={d.v} ({d.source}) total={d.total}" for d in c.candidates]
        lines.append(f"  u={c.u} s={c.s_u} s2={c.s_u2}: " + ("; ".join(parts) or "no candidates"))
    _emit(args, report.to_json(), text="\n".join(lines) + "\n", started=t0)
    return EXIT_OK if report.verdict != "inconclusive" else EXIT_LIMIT


def cmd_search(args) -> int:
    t0 = time.time()
    k = args.k[0] if args.k else 5
    limits = Limits(args.budget_nodes, args.budget_secs)
    out = run_search(k, args.predicate, limits, args.checkpoint, args.resume,
                     threads=args.threads)
    text = f"k={k} {out.kind} solutions={out.solutions}"
    if out.families:
        text += f" families={len(out.families)}"
    if out.reason:
        text += f" ({out.reason})"
    _emit(args, out.to_json(), text=text + "\n", started=t0)
    return EXIT_LIMIT if out.kind == "resource_limit" else EXIT_OK


def cmd_family(args) -> int:
    t0 = time.time()
    q = args.base
    s = args.k[0] if args.k else 12
    if q == 2:
        pair = theorem5_pair(s)
        if isinstance(pair, str):
            print(pair)
            return EXIT_PRECONDITION
        gaps = args.gaps or [pair.min_gap + i for i in range(3)]
        members = [(g, pair.member(g, strict=False)) for g in gaps]
        spec = {"q": 2, "k": s, "u": pair.u, "v": pair.v, "min_gap": pair.min_gap}
    else:
        params = theorem6_solve(q, s)
        gaps = args.gaps or [params.min_gap + i for i in range(3)]
        members = [(g, params.member(g)) for g in gaps]
        spec = params.to_json()
    text = "".join(f"{format_number(n, q)}\n" for _, n in members)
    payload = {"family": spec,
               "members": [{"gap": g, "n": str(n), "word": format_number(n, q)} for g, n in members]}
    _emit(args, payload, text=text, started=t0)
    return EXIT_OK


def cmd_density(args) -> int:
    t0 = time.time()
    exps = args.exponents or list(range(14, 23))
    if max(exps) > MAX_DENSITY_EXPONENT:
        raise DomainError(f"exponents must be <= {MAX_DENSITY_EXPONENT}")
    rep = density_scan(exps)
    table = TableRows(["N", "count"], [list(p) for p in rep.points])
    _emit(args, rep.to_json(), table if args.format != "json" else None, started=t0)
    return EXIT_OK


def cmd_witness(args) -> int:
    t0 = time.time()
    q, r, h = args.base, args.r, args.h
    rows = TableRows(["l", "k", "s", "s2"])
    for l in args.l:  # noqa: E741
        k_max = args.k_max if args.k_max is not None else default_k_max(l)
        k = find_equal_k(q, l, r, h, k_max)
        if k is None:
            rows.rows.append([l, "none", "-", "-"])
            continue
        n = poly_eval(tm_coeffs(q**l - r), q**k)
        rows.rows.append([l, k, digit_sum(n, q), digit_sum(n**h, q)])
    _emit(args, {"q": q, "r": r, "h": h, "rows": rows.to_json()}, rows, started=t0)
    return EXIT_OK


def cmd_verify_splits(args) -> int:
    t0 = time.time()
    rng = random.Random(args.seed)
    q = args.base
    fails = {"split_add": 0, "split_sub": 0, "congruence": 0, "concat": 0}
    for _ in range(args.samples):
        k = rng.randint(1, 40)
        a, b = rng.randint(1, q**30), rng.randint(1, q**k - 1)
        try:
            split_add(a, b, k, q)
        except AssertionError:
            fails["split_add"] += 1
        try:
            split_sub(a, b, k, q)
        except AssertionError:
            fails["split_sub"] += 1
        n = rng.randint(0, q**40)
        if q > 2 and (digit_sum(n, q) - n) % (q - 1):
            fails["congruence"] += 1
        u, v = rng.randint(1, q**8), rng.randint(1, q**8)
        j = min_noninterfering_gap(u, v, q) + rng.randint(0, 5)
        n = u * q**j + v
        if digit_sum(n * n, q) != digit_sum(u * u, q) + digit_sum(2 * u * v, q) + digit_sum(v * v, q):
            fails["concat"] += 1
    payload = {"base": q, "samples": args.samples, "seed": args.seed, "failures": fails}
    text = "".join(f"{name}: {n} failures\n" for name, n in fails.items())
    _emit(args, payload, text=text, started=t0)
    return EXIT_OK if not any(fails.values()) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="digitsumlab", description="Experiments on s_q(n) and s_q(n^2).")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", type=int, default=2)
    common.add_argument("--k", type=int, nargs="+")
    common.add_argument("--max-len", type=int, help="digit-length bound (default depends on the command)")
    common.add_argument("--budget-nodes", type=int)
    common.add_argument("--budget-secs", type=float)
    common.add_argument("--checkpoint")
    common.add_argument("--format", choices=["csv", "json", "text"], default="text")
    common.add_argument("--threads", type=int, default=default_threads())
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("sumdigits", cmd_sumdigits, "digit sums of n and n^2")
    sp.add_argument("n", type=int)
    sp = add("table", cmd_table, "odd n with s(n^2) = s(n) = k")
    sp.add_argument("--check", action="store_true", help="compare against the golden tables")
    sp = add("table3", cmd_table3, "deficient u with s(u^2) < s(u)")
    sp.add_argument("--max-s", type=int, default=8)
    sp.add_argument("--max-s2", type=int, default=6)
    sp.add_argument("--check", action="store_true")
    add("replay", cmd_replay, "rule out concatenation pairs for k")
    sp = add("search", cmd_search, "symbolic carry search")
    sp.add_argument("--predicate", default="eq")
    sp.add_argument("--resume", action="store_true")
    sp = add("family", cmd_family, "verified members of an infinite family")
    sp.add_argument("--gaps", type=int, nargs="+")
    sp = add("density", cmd_density, "count n < 2^e with s(n^2) = s(n)")
    sp.add_argument("--exponents", type=int, nargs="+")
    sp = add("witness", cmd_witness, "scan k for t_m(q^k) with equal digit sums")
    sp.add_argument("--l", type=int, nargs="+", default=list(range(8, 17)))
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--h", type=int, default=2)
    sp.add_argument("--k-max", type=int)
    sp = add("verify-splits", cmd_verify_splits, "randomized identity checks")
    sp.add_argument("--samples", type=int, default=10000)
    return p


DEFAULT_MAX_LEN = {"table3": 17, "replay": 17}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_len is None:
        args.max_len = DEFAULT_MAX_LEN.get(args.command, 32)
    try:
        return args.func(args)
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
