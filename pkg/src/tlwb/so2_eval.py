"""Ground-truth evaluator for second-order propositional formulae.

Evaluation follows the defining recursion directly: conjunction is product,
negation is 1 - v, application looks the argument tuple up in the bound
table, and an existential function quantifier enumerates all 2^(2^arity)
tables and takes the maximum.  Truth, validity and satisfiability are
decided by exhaustive interpretation enumeration under a budget cap.

Table-index convention, shared by every module: the entry for an argument
tuple is found by reading the tuple as a big-endian binary number.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

import numpy as np

from .budget import StepBudget
from .errors import (
    ArityMismatch,
    BudgetExceeded,
    NotASentence,
    UnboundSymbol,
)
from .formulas import (
    Apply,
    Conj,
    ExistsF,
    FuncSymbol,
    Neg,
    So2Formula,
    is_quantifier_free,
    is_simple,
    so2_free_symbols,
    strip_prefix,
)

DEFAULT_SYMBOL_CAP = 16


@dataclass(frozen=True)
class BoolTable:
    """Explicit truth table of an n-ary Boolean function."""

    arity: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != 1 << self.arity:
            raise ArityMismatch(
                f"table of arity {self.arity} needs {1 << self.arity} entries"
            )
        if any(e not in (0, 1) for e in self.entries):
            raise ValueError("table entries must be bits")

    def value(self, args: tuple[int, ...]) -> int:
        idx = 0
        for b in args:
            idx = (idx << 1) | b
        return self.entries[idx]

    @staticmethod
    def constant(bit: int) -> "BoolTable":
        return BoolTable(0, (bit,))


Interpretation = Mapping[FuncSymbol, BoolTable]


_table_cache: dict[int, tuple[BoolTable, ...]] = {}


def all_tables(arity: int) -> Iterator[BoolTable]:
    """All tables of the given arity, lexicographic over entry bit-vectors.

    Tables of arity up to 3 are interned, so repeated enumerations share
    objects.
    """
    if arity <= 3:
        cached = _table_cache.get(arity)
        if cached is None:
            cached = tuple(
                BoolTable(arity, bits)
                for bits in itertools.product((0, 1), repeat=1 << arity)
            )
            _table_cache[arity] = cached
        return iter(cached)
    return (
        BoolTable(arity, bits)
        for bits in itertools.product((0, 1), repeat=1 << arity)
    )


def enumeration_cost(phi: So2Formula) -> int:
    """Multiplicative upper bound on evaluation visits.

    Existential enumeration multiplies by the table-space size; used to
    skip hopeless brute-force evaluations before they start.  The bound is
    capped to keep the arithmetic small.
    """
    cap = 1 << 62
    if isinstance(phi, Apply):
        return 1 + len(phi.args)
    if isinstance(phi, Neg):
        return 1 + enumeration_cost(phi.sub)
    if isinstance(phi, Conj):
        return min(cap, 1 + enumeration_cost(phi.lhs) + enumeration_cost(phi.rhs))
    if isinstance(phi, ExistsF):
        space = 1 << (1 << min(phi.sym.arity, 5))
        return min(cap, 1 + space * enumeration_cost(phi.body))
    raise TypeError(f"not an So2Formula: {phi!r}")


def check_interpretation(interp: Interpretation) -> None:
    for sym, tbl in interp.items():
        if sym.arity != tbl.arity:
            raise ArityMismatch(f"{sym} bound to a table of arity {tbl.arity}")


def eval_so2(
    phi: So2Formula,
    interp: Interpretation,
    budget: Optional[StepBudget] = None,
) -> int:
    """Valuation of phi in the interpretation; every free symbol must be bound."""
    check_interpretation(interp)
    missing = [s for s in so2_free_symbols(phi) if s not in interp]
    if missing:
        raise UnboundSymbol(f"no binding for {sorted(str(s) for s in missing)}")
    if budget is None:
        budget = StepBudget()
    return _eval(phi, dict(interp), budget, {}, {})


def _eval(
    phi: So2Formula, interp: dict, budget: StepBudget, memo: dict, frees: dict
) -> int:
    budget.tick()
    if isinstance(phi, Apply):
        tbl = interp[phi.sym]
        if not phi.args:
            return tbl.entries[0]
        args = tuple(_eval(a, interp, budget, memo, frees) for a in phi.args)
        return tbl.value(args)
    if isinstance(phi, Neg):
        return 1 - _eval(phi.sub, interp, budget, memo, frees)
    if isinstance(phi, Conj):
        if _eval(phi.lhs, interp, budget, memo, frees) == 0:
            return 0
        return _eval(phi.rhs, interp, budget, memo, frees)
    if isinstance(phi, ExistsF):
        # quantifier nodes are memoized on the bindings of their free symbols
        node_frees = frees.get(id(phi))
        if node_frees is None:
            node_frees = sorted(
                so2_free_symbols(phi), key=lambda s: (s.name, s.arity)
            )
            frees[id(phi)] = node_frees
        key = (id(phi), tuple(interp[s] for s in node_frees))
        hit = memo.get(key)
        if hit is not None:
            return hit
        sym = phi.sym
        shadowed = interp.get(sym)
        budget.require(1 << (1 << sym.arity))
        result = 0
        for tbl in all_tables(sym.arity):
            interp[sym] = tbl
            if _eval(phi.body, interp, budget, memo, frees) == 1:
                result = 1
                break
        if shadowed is None:
            interp.pop(sym, None)
        else:
            interp[sym] = shadowed
        memo[key] = result
        return result
    raise TypeError(f"not an So2Formula: {phi!r}")


def is_true(phi: So2Formula, budget: Optional[StepBudget] = None) -> bool:
    """Truth of a sentence: no free symbols and valid."""
    if so2_free_symbols(phi):
        raise NotASentence("is_true requires a closed formula")
    fast = _prenex_truth(phi, budget)
    if fast is not None:
        return fast
    return eval_so2(phi, {}, budget) == 1


def _interp_space(
    symbols: list[FuncSymbol], cap: int
) -> Iterator[dict]:
    weight = sum(1 << s.arity for s in symbols)
    if weight > cap:
        raise BudgetExceeded(
            f"interpretation space weight {weight} exceeds cap {cap}"
        )
    streams = [all_tables(s.arity) for s in symbols]
    for combo in itertools.product(*[list(st) for st in streams]):
        yield dict(zip(symbols, combo))


def check_valid(
    phi: So2Formula,
    cap: int = DEFAULT_SYMBOL_CAP,
    budget: Optional[StepBudget] = None,
) -> bool:
    """Valid iff the valuation is 1 under every interpretation of the frees."""
    symbols = sorted(so2_free_symbols(phi), key=lambda s: (s.name, s.arity))
    shared = budget if budget is not None else StepBudget()
    for interp in _interp_space(symbols, cap):
        if eval_so2(phi, interp, shared) == 0:
            return False
    return True


def check_sat(
    phi: So2Formula,
    cap: int = DEFAULT_SYMBOL_CAP,
    budget: Optional[StepBudget] = None,
) -> bool:
    """Satisfiable iff some interpretation of the frees gives valuation 1."""
    symbols = sorted(so2_free_symbols(phi), key=lambda s: (s.name, s.arity))
    shared = budget if budget is not None else StepBudget()
    for interp in _interp_space(symbols, cap):
        if eval_so2(phi, interp, shared) == 1:
            return True
    return False


# ---------------------------------------------------------------------------
# fast path for prenex simple sentences
# ---------------------------------------------------------------------------
#
# The translation pipeline mostly evaluates prenex simple sentences, whose
# propositional tail can be evaluated bit-parallel: each quantifier-free
# subformula becomes a vector over all assignments to the propositional
# prefix, and propositional quantifiers fold that vector in halves.  The
# generic recursion above stays the reference; this path is cross-checked
# against it in the test suite.

PRENEX_PROP_CAP = 14


def _prenex_truth(phi: So2Formula, budget: Optional[StepBudget]) -> Optional[bool]:
    prefix, matrix = strip_prefix(phi)
    if not prefix or not is_quantifier_free(matrix) or not is_simple(phi):
        return None
    fn_prefix = [(k, s) for k, s in prefix if s.arity > 0]
    prop_prefix = [(k, s) for k, s in prefix if s.arity == 0]
    # function quantifiers must precede propositional ones
    if prefix != fn_prefix + prop_prefix:
        return None
    m = len(prop_prefix)
    if m > PRENEX_PROP_CAP:
        return None
    if budget is None:
        budget = StepBudget()

    prop_syms = [s for _, s in prop_prefix]
    prop_index = {s: i for i, s in enumerate(prop_syms)}
    n_assign = 1 << m
    # column i of the assignment matrix: value of prop i per assignment,
    # big-endian so that the innermost quantifier folds the fastest bit
    cols = [
        ((np.arange(n_assign) >> (m - 1 - i)) & 1).astype(bool)
        for i in range(m)
    ]

    fn_syms = [s for _, s in fn_prefix]
    tables: dict[FuncSymbol, np.ndarray] = {}

    # per-occurrence argument index vectors (args are propositions)
    def matrix_vec(f: So2Formula) -> np.ndarray:
        budget.tick()
        if isinstance(f, Apply):
            if f.sym.arity == 0:
                # closed prenex input: every proposition is prefix-bound
                return cols[prop_index[f.sym]]
            idx = np.zeros(n_assign, dtype=np.int64)
            for a in f.args:
                bit = cols[prop_index[a.sym]]  # simple: args are props
                idx = (idx << 1) | bit
            return tables[f.sym][idx]
        if isinstance(f, Neg):
            return ~matrix_vec(f.sub)
        if isinstance(f, Conj):
            return matrix_vec(f.lhs) & matrix_vec(f.rhs)
        raise TypeError(f"unexpected node in matrix: {f!r}")

    def fold_props(vec: np.ndarray) -> bool:
        for kind, _ in reversed(prop_prefix):
            half = vec.reshape(-1, 2)
            vec = half[:, 0] | half[:, 1] if kind == "E" else half[:, 0] & half[:, 1]
        return bool(vec[0])

    def go(i: int) -> bool:
        if i == len(fn_syms):
            budget.tick(n_assign)
            return fold_props(matrix_vec(matrix))
        kind, sym = fn_prefix[i]
        budget.require(1 << (1 << sym.arity))
        for tbl in itertools.product((False, True), repeat=1 << sym.arity):
            tables[sym] = np.array(tbl, dtype=bool)
            v = go(i + 1)
            if kind == "E" and v:
                return True
            if kind == "A" and not v:
                return False
        return kind != "E"

    # applications of prop-prefix symbols shadowing function symbols would
    # confuse the column lookup; prenex inputs from the passes never do this,
    # bail out to the generic path if names collide
    names = [s.name for _, s in prefix]
    if len(set(names)) != len(names):
        return None
    return go(0)
