"""Differential testing of translation passes against their oracles.

For each registered pass: generate an input from the seed, run the pass,
evaluate both sides with the brute-force oracles, and compare.  Instances
whose oracle evaluation would exceed its budget count as skipped, never as
failures.  A size-bound violation of the pass report is a failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .adqbf_eval import eval_adqbf
from .budget import StepBudget
from .errors import BudgetExceeded
from .formulas import (
    AdqbfInstance,
    BlockKind,
    So2Formula,
    TeamFormula,
    classify_fragment,
    so2_free_symbols,
    team_all_vars,
    team_free_vars,
)
from .generate import (
    GenConfig,
    gen_adqbf,
    gen_pd,
    gen_qplinc_prenex,
    gen_so2_closed,
    gen_team,
)
from .passes import (
    PASS_TABLE,
    canonical_tree_model,
    run_pass,
)
from .printer import print_value
from .so2_eval import (
    all_tables,
    check_interpretation,
    enumeration_cost,
    eval_so2,
    is_true,
)
from .team_eval import (
    TableContext,
    eval_minc,
    eval_team,
    is_true_sentence_team,
    team_from_code,
    team_satisfiable,
)
from .teams import char_table
import itertools

SO2_COST_GATE = 40_000_000
SO2_STEP_BUDGET = 8_000_000


@dataclass
class DiffReport:
    pass_name: str
    total: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    first_failure: Optional[tuple[int, str, str]] = None  # seed, input, output

    def record_pass(self):
        self.total += 1
        self.passed += 1

    def record_skip(self):
        self.total += 1
        self.skipped += 1

    def record_fail(self, seed: int, inp, out):
        self.total += 1
        self.failed += 1
        if self.first_failure is None:
            out_text = print_value(out) if out is not None else "<no output>"
            self.first_failure = (seed, print_value(inp), out_text)

    def format(self) -> str:
        lines = [
            f"pass {self.pass_name}: {self.passed}/{self.total} ok, "
            f"{self.failed} failed, {self.skipped} skipped (budget)"
        ]
        if self.first_failure:
            seed, inp, out = self.first_failure
            lines.append(f"  first failing seed: {seed}")
            lines.append(f"  input:  {inp}")
            lines.append(f"  output: {out}")
        return "\n".join(lines)


def _so2_equivalent(lhs: So2Formula, rhs: So2Formula) -> bool:
    """Equal valuation under every interpretation of the free symbols."""
    frees = sorted(
        so2_free_symbols(lhs) | so2_free_symbols(rhs),
        key=lambda s: (s.name, s.arity),
    )
    weight = sum(1 << s.arity for s in frees)
    if weight > 16:
        raise BudgetExceeded("interpretation space too large")
    if max(enumeration_cost(lhs), enumeration_cost(rhs)) > SO2_COST_GATE:
        raise BudgetExceeded("evaluation cost gate")
    spaces = [list(all_tables(s.arity)) for s in frees]
    for combo in itertools.product(*spaces):
        interp = dict(zip(frees, combo))
        b1 = StepBudget(SO2_STEP_BUDGET)
        b2 = StepBudget(SO2_STEP_BUDGET)
        if eval_so2(lhs, interp, b1) != eval_so2(rhs, interp, b2):
            return False
    return True


def _gated_is_true(phi: So2Formula) -> bool:
    if enumeration_cost(phi) > SO2_COST_GATE:
        raise BudgetExceeded("evaluation cost gate")
    return is_true(phi, StepBudget(SO2_STEP_BUDGET))


def _team_equivalent(lhs: TeamFormula, rhs: TeamFormula, extra: tuple[str, ...] = ()) -> bool:
    """Equal satisfaction on every team over the shared free variables."""
    domain = tuple(sorted(team_free_vars(lhs) | team_free_vars(rhs) | set(extra)))
    if len(domain) > 4:
        raise BudgetExceeded("team domain too large for exhaustive comparison")
    ctx = TableContext()
    for code in range(1 << (1 << len(domain))):
        team = team_from_code(code, domain)
        if eval_team(lhs, team, ctx=ctx) != eval_team(rhs, team, ctx=ctx):
            return False
    return True


# ---------------------------------------------------------------------------
# per-pass drivers: generate input, check the oracle contract
# ---------------------------------------------------------------------------


def _drive_simplify(rng: random.Random, size: int):
    phi = gen_so2_closed(rng, size, n_proper=1, max_arity=2, complex_args=True)
    out, report = run_pass("simplify", phi)
    from .formulas import is_simple

    ok = is_simple(out) and _so2_equivalent(phi, out)
    return phi, out, ok and report.within_bound


def _drive_prenex_unique(rng: random.Random, size: int):
    phi = gen_so2_closed(rng, size, n_proper=1, max_arity=2)
    out, report = run_pass("prenex-unique", phi)
    from .formulas import has_unique_args, is_prenex, is_simple

    shape = is_simple(out) and is_prenex(out) and has_unique_args(out)
    ok = shape and _gated_is_true(phi) == _gated_is_true(out)
    return phi, out, ok and report.within_bound


def _drive_so2u_to_adqbf(rng: random.Random, size: int):
    from .passes import to_prenex_unique

    phi = to_prenex_unique(gen_so2_closed(rng, size, n_proper=1, max_arity=2))
    out, report = run_pass("so2u-to-adqbf", phi)
    ok = _gated_is_true(phi) == eval_adqbf(out)
    return phi, out, ok and report.within_bound


def _drive_collapse(rng: random.Random, size: int):
    inst = gen_adqbf(rng, matrix_size=size, force_last_union=True)
    out, report = run_pass("collapse", inst)
    ok = eval_adqbf(inst) == eval_adqbf(out)
    if len(inst.blocks) >= 2:
        ok = ok and classify_fragment(out).level == classify_fragment(inst).level - 1
    return inst, out, ok and report.within_bound


def _drive_adqbf_to_qptl_dep(rng: random.Random, size: int):
    inst = gen_adqbf(rng, matrix_size=size)
    out, report = run_pass("adqbf-to-qptl-dep", inst)
    ok = eval_adqbf(inst) == is_true_sentence_team(out)
    return inst, out, ok and report.within_bound


def _drive_qptl_to_ptl_dep(rng: random.Random, size: int):
    inst = gen_adqbf(rng, matrix_size=size)
    out, report = run_pass("qptl-to-ptl-dep", inst)
    ok = eval_adqbf(inst) == team_satisfiable(out)
    return inst, out, ok and report.within_bound


def _drive_dep_to_unary(rng: random.Random, size: int):
    phi = gen_pd(rng, ["p1", "p2", "p3"], size)
    out, report = run_pass("dep-to-unary", phi)
    extra = tuple(team_all_vars(out) - team_all_vars(phi))
    ok = _team_equivalent(phi, out, extra)
    return phi, out, ok and report.within_bound


def _drive_unary_dep_elim(rng: random.Random, size: int):
    from .passes import dep_to_unary

    phi = dep_to_unary(gen_pd(rng, ["p1", "p2"], size))
    out, report = run_pass("unary-dep-elim", phi)
    ok = _team_equivalent(phi, out)
    return phi, out, ok and report.within_bound


def _drive_qplinc_to_minc(rng: random.Random, size: int):
    n = rng.randint(1, 3)
    phi = gen_qplinc_prenex(rng, n, max(2, size // 2))
    out, report = run_pass("qplinc-to-minc", phi)
    model = canonical_tree_model([f"p{i}" for i in range(1, n + 1)])
    ok = is_true_sentence_team(phi) == eval_minc(out, model, {"w"})
    return phi, out, ok and report.within_bound


def _drive_pd_validity_wrapper(rng: random.Random, size: int):
    from .team_eval import team_valid

    phi = gen_pd(rng, ["p1", "p2", "p3"], size)
    out, report = run_pass("pd-validity-wrapper", phi)
    ok = team_valid(phi) == is_true_sentence_team(out)
    return phi, out, ok and report.within_bound


def _drive_team_to_so2(rng: random.Random, size: int):
    phi = gen_team(
        rng, ["p1", "p2"], min(size, 5),
        {"sim": 0.5, "dep": 1.0, "inc": 1.0, "gda": 0.0,
         "exists": 0.5, "forall": 0.5},
    )
    p_vars = ("p1", "p2")
    out, report = run_pass("team-to-so2", phi, p_vars=p_vars)
    if enumeration_cost(out) > SO2_COST_GATE:
        raise BudgetExceeded("evaluation cost gate")
    (fsym,) = so2_free_symbols(out)
    ctx = TableContext()
    for code in range(16):
        team = team_from_code(code, p_vars)
        lhs = eval_team(phi, team, ctx=ctx)
        rhs = eval_so2(out, {fsym: char_table(team, p_vars)}, StepBudget(SO2_STEP_BUDGET))
        if lhs != (rhs == 1):
            return phi, out, False
    return phi, out, report.within_bound


def _drive_close_sentence(rng: random.Random, size: int):
    from .passes import team_to_so2

    phi = gen_team(
        rng, ["p1", "p2"], min(size, 4),
        {"sim": 0.5, "dep": 1.0, "inc": 0.5, "gda": 0.0,
         "exists": 0.3, "forall": 0.3},
    )
    p_vars = ("p1", "p2")
    psi = team_to_so2(phi, p_vars)
    out, report = run_pass("close-sentence", psi, p_vars=p_vars)
    if enumeration_cost(out) > SO2_COST_GATE:
        raise BudgetExceeded("evaluation cost gate")
    ctx = TableContext()
    some_nonempty = any(
        eval_team(phi, team_from_code(code, p_vars), ctx=ctx)
        for code in range(1, 16)
    )
    ok = _gated_is_true(out) == some_nonempty
    return psi, out, ok and report.within_bound


DRIVERS: dict[str, Callable] = {
    "simplify": _drive_simplify,
    "prenex-unique": _drive_prenex_unique,
    "so2u-to-adqbf": _drive_so2u_to_adqbf,
    "collapse": _drive_collapse,
    "adqbf-to-qptl-dep": _drive_adqbf_to_qptl_dep,
    "qptl-to-ptl-dep": _drive_qptl_to_ptl_dep,
    "dep-to-unary": _drive_dep_to_unary,
    "unary-dep-elim": _drive_unary_dep_elim,
    "qplinc-to-minc": _drive_qplinc_to_minc,
    "pd-validity-wrapper": _drive_pd_validity_wrapper,
    "team-to-so2": _drive_team_to_so2,
    "close-sentence": _drive_close_sentence,
}


def difftest(pass_name: str, cfg: GenConfig, seeds: int = 100) -> DiffReport:
    """Run the pass against its oracle for seeds consecutive seeds."""
    if pass_name not in DRIVERS:
        raise ValueError(
            f"unknown pass {pass_name!r}; choose from {sorted(DRIVERS)}"
        )
    driver = DRIVERS[pass_name]
    report = DiffReport(pass_name)
    for seed in range(cfg.seed, cfg.seed + seeds):
        rng = random.Random(seed)
        try:
            inp, out, ok = driver(rng, cfg.size)
        except BudgetExceeded:
            report.record_skip()
            continue
        if ok:
            report.record_pass()
        else:
            report.record_fail(seed, inp, out)
    return report
