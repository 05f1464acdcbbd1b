"""Command-line driver.

Subcommands: parse, eval, translate, difftest.  Exit codes: 0 for
true/satisfiable/success, 1 for false/unsatisfiable, 2 for usage or parse
errors, 3 when a budget was exceeded.
"""

from __future__ import annotations

import argparse
import sys

from .adqbf_eval import eval_adqbf
from .errors import BudgetExceeded, ParseError, WorkbenchError
from .formulas import so2_free_symbols, team_free_vars
from .generate import GenConfig
from .difftest import DRIVERS, difftest
from .parser import LOGICS, load_gdas, load_kripke, load_team, parse
from .passes import PASS_TABLE, run_pass
from .printer import print_value
from .so2_eval import check_sat, is_true
from .team_eval import eval_minc, eval_team, is_true_sentence_team
from .teams import Team

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _cmd_parse(args) -> int:
    value = parse(args.logic, _read(args.file))
    print(print_value(value))
    return EXIT_TRUE


def _cmd_eval(args) -> int:
    value = parse(args.logic, _read(args.file))
    gdas = load_gdas(_read(args.gda)) if args.gda else None
    if args.logic == "so2":
        if so2_free_symbols(value):
            result = check_sat(value)
        else:
            result = is_true(value)
    elif args.logic == "prop":
        result = check_sat(_prop_as_so2(value))
    elif args.logic == "adqbf":
        result = eval_adqbf(value)
    elif args.logic == "team":
        if args.team:
            team = load_team(_read(args.team))
            result = eval_team(value, team, gdas)
        elif team_free_vars(value):
            print(
                "error: open team formula needs --team", file=sys.stderr
            )
            return EXIT_USAGE
        else:
            result = is_true_sentence_team(value, gdas)
    elif args.logic == "modal":
        if not args.model:
            print("error: modal evaluation needs --model", file=sys.stderr)
            return EXIT_USAGE
        model, team = load_kripke(_read(args.model))
        result = eval_minc(value, model, team)
    else:
        print(f"error: no evaluator for {args.logic}", file=sys.stderr)
        return EXIT_USAGE
    print("true" if result else "false")
    return EXIT_TRUE if result else EXIT_FALSE


def _prop_as_so2(value):
    from .formulas import (
        Apply,
        Conj,
        FuncSymbol,
        Neg,
        PropAnd,
        PropLit,
        PropNeg,
        PropOr,
        so2_disj,
    )

    def conv(phi):
        if isinstance(phi, PropLit):
            atom = Apply(FuncSymbol(phi.var, 0))
            return atom if phi.positive else Neg(atom)
        if isinstance(phi, PropNeg):
            return Neg(conv(phi.sub))
        if isinstance(phi, PropAnd):
            return Conj(conv(phi.lhs), conv(phi.rhs))
        if isinstance(phi, PropOr):
            return so2_disj(conv(phi.lhs), conv(phi.rhs))
        raise TypeError(f"not a PropFormula: {phi!r}")

    return conv(value)


def _cmd_translate(args) -> int:
    spec = PASS_TABLE[args.pass_name]
    value = parse(spec.source, _read(args.file))
    kwargs = {}
    if args.gda:
        kwargs["gdas"] = load_gdas(_read(args.gda))
        if args.pass_name != "team-to-so2":
            kwargs.pop("gdas")
    out, report = run_pass(args.pass_name, value, **kwargs)
    print(print_value(out))
    if args.report:
        print(
            f"# {report.name}: {report.input_nodes} -> {report.output_nodes} nodes, "
            f"fresh {list(report.fresh_symbols)}, within bound: {report.within_bound}",
            file=sys.stderr,
        )
    return EXIT_TRUE


def _cmd_difftest(args) -> int:
    cfg = GenConfig(seed=args.seed, size=args.size)
    report = difftest(args.pass_name, cfg, seeds=args.seeds)
    print(report.format())
    return EXIT_TRUE if report.failed == 0 else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="tlwb",
        description="Workbench for quantified propositional logics",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula and print it back")
    p.add_argument("--logic", choices=LOGICS, required=True)
    p.add_argument("file")
    p.set_defaults(fn=_cmd_parse)

    e = sub.add_parser("eval", help="evaluate a formula or instance")
    e.add_argument("--logic", choices=LOGICS, required=True)
    e.add_argument("--team", help="team file for team-logic evaluation")
    e.add_argument("--model", help="Kripke model file for modal evaluation")
    e.add_argument("--gda", help="generalized-atom definition file")
    e.add_argument("file")
    e.set_defaults(fn=_cmd_eval)

    t = sub.add_parser("translate", help="run a translation pass")
    t.add_argument("--pass", dest="pass_name", choices=sorted(PASS_TABLE), required=True)
    t.add_argument("--gda", help="generalized-atom definition file")
    t.add_argument("--report", action="store_true", help="print the size report")
    t.add_argument("file")
    t.set_defaults(fn=_cmd_translate)

    d = sub.add_parser("difftest", help="differential-test a pass")
    d.add_argument("--pass", dest="pass_name", choices=sorted(DRIVERS), required=True)
    d.add_argument("--seeds", type=int, default=100)
    d.add_argument("--seed", type=int, default=0, help="first seed")
    d.add_argument("--size", type=int, default=6)
    d.set_defaults(fn=_cmd_difftest)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ParseError as exc:
        span = f" at {exc.span.begin}..{exc.span.end}" if exc.span else ""
        print(f"parse error{span}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
