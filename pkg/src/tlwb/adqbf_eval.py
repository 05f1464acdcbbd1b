"""Truth evaluation for DQBF and ADQBF instances.

Blocks are processed left to right: an existential block existentially
guesses one Skolem table per variable, a union block branches universally
over the same space, and at the end every assignment of the universal
prefix extended with the Skolem values must satisfy the matrix.

Constraint sets are read in the canonical (sorted) variable order when
indexing tables, matching the shared big-endian table convention.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Mapping, Optional

from .budget import StepBudget
from .errors import BudgetExceeded, NotExistential
from .formulas import (
    AdqbfInstance,
    Block,
    BlockKind,
    eval_prop_row,
)
from .so2_eval import BoolTable, all_tables

DEFAULT_SKOLEM_CAP = 16

SkolemBinding = Mapping[str, BoolTable]


def canonical_tuple(deps: frozenset[str]) -> tuple[str, ...]:
    return tuple(sorted(deps))


def enumerate_bindings(
    block: Block,
    constraints: Mapping[str, frozenset[str]],
    cap: int = DEFAULT_SKOLEM_CAP,
) -> Iterator[SkolemBinding]:
    """All Skolem-table combinations for one block, lexicographic order."""
    weight = sum(1 << len(constraints[v]) for v in block.vars)
    if weight > cap:
        raise BudgetExceeded(f"Skolem space weight {weight} exceeds cap {cap}")
    spaces = [list(all_tables(len(constraints[v]))) for v in block.vars]
    for combo in itertools.product(*spaces):
        yield dict(zip(block.vars, combo))


def eval_adqbf(
    inst: AdqbfInstance,
    cap: int = DEFAULT_SKOLEM_CAP,
    budget: Optional[StepBudget] = None,
) -> bool:
    """Alternating Skolem-function semantics of the instance."""
    constraints = dict(inst.constraints)
    weight = sum(1 << len(d) for _, d in inst.constraints)
    if weight > cap:
        raise BudgetExceeded(f"Skolem space weight {weight} exceeds cap {cap}")
    if budget is None:
        budget = StepBudget()

    universals = inst.universals
    dep_tuples = {v: canonical_tuple(d) for v, d in inst.constraints}

    def matrix_holds(binding: dict[str, BoolTable]) -> bool:
        for bits in itertools.product((0, 1), repeat=len(universals)):
            budget.tick()
            row = dict(zip(universals, bits))
            for q, tbl in binding.items():
                row[q] = tbl.value(tuple(row[p] for p in dep_tuples[q]))
            if not eval_prop_row(inst.matrix, row):
                return False
        return True

    def go(i: int, binding: dict[str, BoolTable]) -> bool:
        if i == len(inst.blocks):
            return matrix_holds(binding)
        block = inst.blocks[i]
        existential = block.kind == BlockKind.EXISTS
        for extra in enumerate_bindings(block, constraints, cap):
            budget.tick()
            v = go(i + 1, {**binding, **extra})
            if existential and v:
                return True
            if not existential and not v:
                return False
        return not existential

    return go(0, {})


def eval_dqbf(
    inst: AdqbfInstance,
    cap: int = DEFAULT_SKOLEM_CAP,
    budget: Optional[StepBudget] = None,
) -> bool:
    """Plain DQBF truth; requires a single existential block."""
    if any(b.kind == BlockKind.UNION for b in inst.blocks):
        raise NotExistential("instance has a union block")
    if len(inst.blocks) != 1:
        raise NotExistential("DQBF requires exactly one existential block")
    return eval_adqbf(inst, cap, budget)
