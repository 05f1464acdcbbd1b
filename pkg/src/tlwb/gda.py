"""Generalized dependence atoms: extensions, defining formulae, agreement.

An n-ary generalized atom is a set of n-ary Boolean relations; a team
satisfies it when the relation its rows project to is a member.  An atom may
instead (or additionally) carry a second-order defining formula phi(f) with
one free function symbol of the atom's arity: the atom holds on a team when
phi(f) holds with f bound to the characteristic table of the projected
relation.  Extensions are stored explicitly only up to arity 3.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import (
    ArityMismatch,
    BudgetExceeded,
    DefinitionMismatch,
    UnknownFamily,
)
from .formulas import (
    Apply,
    Conj,
    ExistsF,
    FuncSymbol,
    So2Formula,
    so2_conj_all,
    so2_forall,
    so2_free_symbols,
    so2_iff,
    so2_implies,
    so2_var,
)
from .so2_eval import BoolTable, eval_so2
from .teams import Relation, Team, char_table

MAX_EXTENSION_ARITY = 3


def def_symbol(arity: int) -> FuncSymbol:
    """The reserved free symbol of defining formulae."""
    return FuncSymbol("f", arity)


@dataclass(frozen=True)
class Gda:
    name: str
    arity: int
    extension: Optional[frozenset[Relation]] = None
    definition: Optional[So2Formula] = None

    def __post_init__(self):
        if self.extension is None and self.definition is None:
            raise ValueError(f"atom {self.name}: extension or definition required")
        if self.extension is not None:
            if self.arity > MAX_EXTENSION_ARITY:
                raise BudgetExceeded(
                    f"explicit extensions are limited to arity {MAX_EXTENSION_ARITY}"
                )
            for rel in self.extension:
                if rel.arity != self.arity:
                    raise ArityMismatch(
                        f"atom {self.name}: member relation of arity {rel.arity}"
                    )
        if self.definition is not None:
            frees = so2_free_symbols(self.definition)
            if frees != frozenset([def_symbol(self.arity)]):
                raise ValueError(
                    f"atom {self.name}: definition must have exactly the free "
                    f"symbol f/{self.arity}"
                )


def _definition_holds(gda: Gda, table: BoolTable) -> bool:
    return eval_so2(gda.definition, {def_symbol(gda.arity): table}) == 1


def gda_holds(gda: Gda, team: Team, args: Iterable[str]) -> bool:
    """Membership of rel(X, args) in the atom; both paths must agree."""
    args = tuple(args)
    if len(args) != gda.arity:
        raise ArityMismatch(
            f"atom {gda.name}/{gda.arity} applied to {len(args)} arguments"
        )
    table = char_table(team, args)
    by_ext = by_def = None
    if gda.extension is not None:
        rel = Relation(
            gda.arity,
            frozenset(
                bits
                for bits in itertools.product((0, 1), repeat=gda.arity)
                if table.value(bits) == 1
            ),
        )
        by_ext = rel in gda.extension
    if gda.definition is not None:
        by_def = _definition_holds(gda, table)
    if by_ext is not None and by_def is not None and by_ext != by_def:
        raise DefinitionMismatch(
            f"atom {gda.name}: extension and definition disagree on {table}"
        )
    return by_ext if by_ext is not None else bool(by_def)


_member_cache: dict[Gda, np.ndarray] = {}


def gda_member_codes(gda: Gda) -> np.ndarray:
    """Membership per relation code (bit t set iff tuple with value t present).

    Used by the tabled team evaluator; mirrors gda_holds including the
    extension/definition agreement check.
    """
    hit = _member_cache.get(gda)
    if hit is not None:
        return hit
    n = gda.arity
    if n > 4:
        raise BudgetExceeded("tabled membership is limited to arity 4")
    size = 1 << (1 << n)
    out = np.zeros(size, dtype=bool)
    ext_codes = None
    if gda.extension is not None:
        ext_codes = set()
        for rel in gda.extension:
            code = 0
            for bits in rel.tuples:
                v = 0
                for b in bits:
                    v = (v << 1) | b
                code |= 1 << v
            ext_codes.add(code)
    for code in range(size):
        entries = tuple((code >> i) & 1 for i in range(1 << n))
        by_ext = by_def = None
        if ext_codes is not None:
            by_ext = code in ext_codes
        if gda.definition is not None:
            by_def = _definition_holds(gda, BoolTable(n, entries))
        if by_ext is not None and by_def is not None and by_ext != by_def:
            raise DefinitionMismatch(
                f"atom {gda.name}: extension and definition disagree"
            )
        out[code] = by_ext if by_ext is not None else bool(by_def)
    _member_cache[gda] = out
    return out


def check_agreement(gda: Gda) -> bool:
    """Extension membership equals the definitional test on every relation."""
    if gda.arity > MAX_EXTENSION_ARITY:
        raise BudgetExceeded(
            f"agreement check is exhaustive only up to arity {MAX_EXTENSION_ARITY}"
        )
    if gda.extension is None or gda.definition is None:
        raise ValueError("agreement check needs both representations")
    ext_rels = gda.extension
    for bits in itertools.product((0, 1), repeat=1 << gda.arity):
        table = BoolTable(gda.arity, bits)
        rel = Relation(
            gda.arity,
            frozenset(
                t
                for t in itertools.product((0, 1), repeat=gda.arity)
                if table.value(t) == 1
            ),
        )
        if (rel in ext_rels) != _definition_holds(gda, table):
            return False
    return True


# ---------------------------------------------------------------------------
# built-in families
# ---------------------------------------------------------------------------


def _all_relations(arity: int) -> Iterable[Relation]:
    tuples = list(itertools.product((0, 1), repeat=arity))
    for picks in itertools.product((False, True), repeat=len(tuples)):
        yield Relation(
            arity, frozenset(t for t, keep in zip(tuples, picks) if keep)
        )


def dep_family_formula(n: int) -> So2Formula:
    """f is the graph of a team where the last column depends on the rest.

    For arguments x1..xn, y1..yn:
    (f(x) & f(y) & AND_{i<n} xi<->yi) -> (xn<->yn), universally closed.
    """
    if n < 1:
        raise ValueError("dependence atoms have arity >= 1")
    f = def_symbol(n)
    xs = [so2_var(f"x{i}") for i in range(1, n + 1)]
    ys = [so2_var(f"y{i}") for i in range(1, n + 1)]
    premise = [Apply(f, tuple(xs)), Apply(f, tuple(ys))]
    premise += [so2_iff(xs[i], ys[i]) for i in range(n - 1)]
    body = so2_implies(so2_conj_all(premise), so2_iff(xs[-1], ys[-1]))
    for v in reversed([*xs, *ys]):
        body = so2_forall(v.sym, body)
    return body


def constancy_family_formula(n: int) -> So2Formula:
    """At most one tuple is present: (f(x) & f(y)) -> x = y pointwise."""
    if n < 1:
        raise ValueError("constancy atoms have arity >= 1")
    f = def_symbol(n)
    xs = [so2_var(f"x{i}") for i in range(1, n + 1)]
    ys = [so2_var(f"y{i}") for i in range(1, n + 1)]
    eqs = so2_conj_all([so2_iff(x, y) for x, y in zip(xs, ys)])
    body = so2_implies(Conj(Apply(f, tuple(xs)), Apply(f, tuple(ys))), eqs)
    for v in reversed([*xs, *ys]):
        body = so2_forall(v.sym, body)
    return body


def inclusion_family_formula(n: int) -> So2Formula:
    """2n-ary inclusion: every present left half reoccurs as a right half."""
    if n < 1:
        raise ValueError("inclusion atoms have width >= 1")
    f = def_symbol(2 * n)
    xs = [so2_var(f"x{i}") for i in range(1, 2 * n + 1)]
    us = [so2_var(f"u{i}") for i in range(1, 2 * n + 1)]
    match = so2_conj_all([so2_iff(xs[i], us[n + i]) for i in range(n)])
    body = so2_conj_all([Apply(f, tuple(us)), match])
    for u in reversed(us):
        body = ExistsF(u.sym, body)
    body = so2_implies(Apply(f, tuple(xs)), body)
    for x in reversed(xs):
        body = so2_forall(x.sym, body)
    return body


def _functional(rel: Relation) -> bool:
    seen: dict[tuple, int] = {}
    for t in rel.tuples:
        key = t[:-1]
        if key in seen and seen[key] != t[-1]:
            return False
        seen[key] = t[-1]
    return True


def builtin_dep(n: int) -> Gda:
    """The n-ary dependence atom, with both representations when small."""
    extension = None
    if n <= MAX_EXTENSION_ARITY:
        extension = frozenset(r for r in _all_relations(n) if _functional(r))
    return Gda(f"dep{n}", n, extension, dep_family_formula(n))


def builtin_constancy(n: int) -> Gda:
    extension = None
    if n <= MAX_EXTENSION_ARITY:
        extension = frozenset(
            r for r in _all_relations(n) if len(r.tuples) <= 1
        )
    return Gda(f"const{n}", n, extension, constancy_family_formula(n))


def builtin_inclusion(n: int) -> Gda:
    """Width-n inclusion as a 2n-ary atom over (left, right) halves."""
    extension = None
    if 2 * n <= MAX_EXTENSION_ARITY:
        extension = frozenset(
            r
            for r in _all_relations(2 * n)
            if all(
                any(t[:n] == u[n:] for u in r.tuples) for t in r.tuples
            )
        )
    return Gda(f"inc{n}", 2 * n, extension, inclusion_family_formula(n))


FAMILIES: dict[str, Callable[[int], So2Formula]] = {
    "dep": dep_family_formula,
    "constancy": constancy_family_formula,
    "inclusion": inclusion_family_formula,
}


def translatable_family(name: str) -> Callable[[int], So2Formula]:
    """The defining-formula emitter of a built-in family."""
    try:
        return FAMILIES[name]
    except KeyError:
        raise UnknownFamily(f"no built-in family named {name!r}") from None
