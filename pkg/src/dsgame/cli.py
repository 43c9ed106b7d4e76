"""``dsg`` command-line interface.

Exit codes: 0 completed, 2 usage error, 3 input (file/parse/validation)
error, 4 unsupported configuration.  Satisficing answers are printed, never
encoded in the exit status.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import UnsupportedDiscountError, format_rational, parse_rational
from .bench import CSV_COLUMNS, builtin_suite, default_jobs, directory_suite, run_suite
from .comparator import AlphabetError, Relation, build, dump, size_bound
from .game import (
    GameParseError,
    GameValidationError,
    Owner,
    gen_lower_bound,
    gen_random,
    gen_robustness,
    gen_scalable,
    parse_game,
    serialize_game,
)
from .product import comp_satisfice, format_strategy
from .temporal import TemporalInputError, parse_dpa, parse_labeling, satisfice_with_goal
from .vi import vi_optimize, vi_satisfice

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_UNSUPPORTED = 4

REPORT_KEYS = (
    "command",
    "method",
    "answer",
    "W",
    "holds",
    "iterations",
    "k_max",
    "decided_by",
    "product_states",
    "product_edges",
    "comparator_states",
    "size_bound",
    "digits_n",
    "digits_m",
    "millis",
)


class InputError(Exception):
    pass


class Unsupported(Exception):
    pass


def _report(argv, method, **fields):
    rep = dict.fromkeys(REPORT_KEYS)
    rep["command"] = " ".join(argv)
    rep["method"] = method
    rep.update(fields)
    return rep


def _emit(rep, as_json, lines):
    if as_json:
        print(json.dumps(rep, sort_keys=False))
    else:
        for line in lines:
            print(line)


def _load_game(path):
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read game file {path}: {e.strerror or e}")
    try:
        return parse_game(data)
    except (GameParseError, GameValidationError) as e:
        raise InputError(f"{path}: {e}")
    except UnicodeDecodeError:
        raise InputError(f"{path}: not UTF-8 text")


def _read_text(path, what):
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {what} file {path}: {e.strerror or e}")


def _rational(text):
    try:
        return parse_rational(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _ms(t0):
    return round((time.perf_counter() - t0) * 1000, 3)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_optimize(args, argv):
    g = _load_game(args.game)
    t0 = time.perf_counter()
    r = vi_optimize(g)
    W = format_rational(r.W)
    rep = _report(
        argv, "VI_OPT", answer=W, W=W, iterations=r.iterations_used,
        k_max=r.budget.k_max, millis=_ms(t0),
    )
    _emit(rep, args.json, [
        f"W = {W}",
        f"iterations = {r.iterations_used}",
        f"k_max = {r.budget.k_max}",
    ])
    return EXIT_OK


def _sat_flags(p):
    p.add_argument("--threshold", required=True, type=_rational, help="threshold v as P/Q or N")
    p.add_argument("--relation", required=True, choices=[r.value for r in Relation])
    p.add_argument("--player", required=True, choices=[o.value for o in Owner])


def cmd_satisfice(args, argv):
    g = _load_game(args.game)
    rel, player, v = Relation(args.relation), Owner(args.player), args.threshold
    t0 = time.perf_counter()
    if args.method == "vi":
        r = vi_satisfice(g, v, rel, player)
        ans = "YES" if r.holds else "NO"
        rep = _report(
            argv, "VI_SAT", answer=ans, holds=r.holds, iterations=r.iterations_used,
            k_max=r.k_max, decided_by=r.decided_by.value, millis=_ms(t0),
        )
        lines = [ans, f"iterations = {r.iterations_used}", f"decided_by = {r.decided_by.value}"]
    else:
        if not g.discount.is_integer:
            raise Unsupported(
                f"the comparator method needs an integer discount factor (got "
                f"{g.discount}); use --method vi"
            )
        r = comp_satisfice(g, v, rel, player)
        ans = "YES" if r.holds else "NO"
        rep = _report(
            argv, "COMP_SAT", answer=ans, holds=r.holds, product_states=r.product_states,
            product_edges=r.product_edges, comparator_states=r.comparator_states,
            millis=_ms(t0),
        )
        lines = [
            ans,
            f"product_states = {r.product_states}",
            f"product_edges = {r.product_edges}",
        ]
        if args.strategy_out and r.holds:
            Path(args.strategy_out).write_text(format_strategy(r.arena, r.strategy, r.comparator))
    if args.strategy_out and args.method == "vi":
        print("note: --strategy-out is only produced by --method comparator", file=sys.stderr)
    _emit(rep, args.json, lines)
    return EXIT_OK


def cmd_comparator(args, argv):
    if args.discount.denominator != 1:
        raise Unsupported(
            f"comparators exist only for integer discount factors, got "
            f"{format_rational(args.discount)}"
        )
    d = args.discount.numerator
    if d < 2:
        raise InputError("discount factor must exceed 1")
    t0 = time.perf_counter()
    c = build(args.mu, d, args.threshold, Relation(args.relation))
    bound = size_bound(c)
    assert c.n_states <= bound
    digits = c.threshold
    if args.dump:
        Path(args.dump).write_text(dump(c))
    rep = _report(argv, "COMP", answer=str(c.n_states), comparator_states=c.n_states, millis=_ms(t0))
    rep["size_bound"] = format_rational(bound)
    rep["digits_n"] = digits.n
    rep["digits_m"] = digits.m
    _emit(rep, args.json, [
        f"states = {c.n_states}",
        f"size_bound = {format_rational(bound)}",
        f"kind = {c.kind.value}",
        f"n = {digits.n}",
        f"m = {digits.m}",
    ])
    return EXIT_OK


def cmd_gen(args, argv):
    try:
        if args.family == "random":
            g = gen_random(args.states, args.mu, args.branching, args.seed)
        elif args.family == "lowerbound":
            g = gen_lower_bound(args.n)
        elif args.family == "scalable":
            g = gen_scalable(args.i)
        else:
            g = gen_robustness(seed=args.seed)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    data = serialize_game(g)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())
    return EXIT_OK


def cmd_bench(args, argv):
    suite = args.suite
    try:
        if suite.startswith("builtin:") or suite in ("scaling", "robustness", "equivalence"):
            tasks = builtin_suite(suite.split(":", 1)[-1])
        elif Path(suite).is_dir():
            tasks = directory_suite(suite, args.threshold, Relation(args.relation), Owner(args.player))
        else:
            raise InputError(f"suite {suite!r} is neither a builtin suite nor a directory")
    except (GameParseError, GameValidationError) as e:
        raise InputError(str(e))
    except ValueError as e:
        raise InputError(str(e))
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(CSV_COLUMNS)
        run_suite(tasks, args.timeout, args.jobs, sink=w)
    finally:
        if args.csv:
            out.close()
    return EXIT_OK


def cmd_temporal(args, argv):
    g = _load_game(args.game)
    try:
        lab = parse_labeling(_read_text(args.labels, "label"), g.n_states)
        dpa = parse_dpa(_read_text(args.dpa, "automaton"))
    except TemporalInputError as e:
        raise InputError(str(e))
    if not g.discount.is_integer:
        raise Unsupported(
            f"temporal satisficing needs an integer discount factor, got {g.discount}"
        )
    t0 = time.perf_counter()
    try:
        r = satisfice_with_goal(g, lab, dpa, args.threshold, Relation(args.relation), Owner(args.player))
    except TemporalInputError as e:
        raise InputError(str(e))
    ans = "YES" if r.holds else "NO"
    rep = _report(
        argv, "TEMPORAL", answer=ans, holds=r.holds, product_states=r.product_states,
        product_edges=r.product_edges, comparator_states=r.comparator_states, millis=_ms(t0),
    )
    _emit(rep, args.json, [ans, f"parity_states = {r.product_states}", f"parity_edges = {r.product_edges}"])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dsg",
        description="Exact solvers for two-player discounted-sum games.",
        epilog=(
            "Canonical satisficing pairs are min with leq/lt and max with geq/gt; other "
            "pairs are answered too.  Strict relations hold only when the optimal cost "
            "is strictly on the right side of the threshold."
        ),
    )
    ap.add_argument("--version", action="version", version=f"dsg {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="compute the optimal cost by value iteration")
    p.add_argument("game")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("satisfice", help="decide whether a player can force cost rel v")
    p.add_argument("game")
    _sat_flags(p)
    p.add_argument("--method", choices=["vi", "comparator"], default="comparator")
    p.add_argument("--strategy-out", help="write the winning strategy here (comparator method)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_satisfice)

    p = sub.add_parser("comparator", help="build and dump a comparator automaton")
    p.add_argument("--mu", required=True, type=_positive_int)
    p.add_argument("--discount", required=True, type=_rational)
    p.add_argument("--threshold", required=True, type=_rational)
    p.add_argument("--relation", required=True, choices=[r.value for r in Relation])
    p.add_argument("--dump")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_comparator)

    p = sub.add_parser("gen", help="write a generated game")
    p.add_argument("family", choices=["random", "lowerbound", "scalable", "robustness"])
    p.add_argument("--states", type=_positive_int, default=8)
    p.add_argument("--mu", type=_positive_int, default=4)
    p.add_argument("--branching", type=_positive_int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--i", type=_positive_int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    p.add_argument("--suite", required=True, help="builtin:scaling|robustness|equivalence or a directory of *.game files")
    p.add_argument("--timeout", type=float, default=60.0, help="per-instance seconds")
    p.add_argument("--csv")
    p.add_argument("--jobs", type=_positive_int, default=default_jobs())
    p.add_argument("--threshold", type=_rational, default=Fraction(0), help="threshold for directory suites")
    p.add_argument("--relation", choices=[r.value for r in Relation], default="leq")
    p.add_argument("--player", choices=[o.value for o in Owner], default="min")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("temporal", help="satisficing together with a parity-automaton goal")
    p.add_argument("game")
    p.add_argument("--labels", required=True)
    p.add_argument("--dpa", required=True)
    _sat_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_temporal)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args, ["dsg"] + argv)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (Unsupported, UnsupportedDiscountError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except AlphabetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
