"""ASTs for the five logics and their structural utilities.

Five formula families live here:

* second-order propositional formulae (``So2Formula``) with the four-node
  core ``Conj | Neg | ExistsF | Apply``; all derived connectives desugar
  into that core at construction time,
* quantifier-free classical formulae (``PropFormula``),
* alternating dependency-quantified instances (``AdqbfInstance``),
* team formulae (``TeamFormula``) with strong negation, split disjunction,
  quantifiers and dependence/inclusion/generalized atoms,
* modal team formulae (``ModalFormula``) for the inclusion-logic target.

Plus the structural operations every other module leans on: free variables,
negation normal form, fragment classification, and strong-negation degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Union

from .errors import ArityError, DuplicateQuantifiedVariable, InvalidInstance

# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

# Proposition variables are plain strings; arity-0 function symbols play the
# same role on the second-order side and share the identifier space.


@dataclass(frozen=True)
class FuncSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ArityError(f"negative arity for {self.name}")

    def __str__(self):
        return f"{self.name}/{self.arity}"


# ---------------------------------------------------------------------------
# second-order propositional formulae
# ---------------------------------------------------------------------------


class So2Formula:
    """Base class of the four-node second-order core."""

    __slots__ = ()


@dataclass(frozen=True)
class Apply(So2Formula):
    sym: FuncSymbol
    args: tuple[So2Formula, ...] = ()

    def __post_init__(self):
        if len(self.args) != self.sym.arity:
            raise ArityError(
                f"{self.sym} applied to {len(self.args)} arguments"
            )


@dataclass(frozen=True)
class Neg(So2Formula):
    sub: So2Formula


@dataclass(frozen=True)
class Conj(So2Formula):
    lhs: So2Formula
    rhs: So2Formula


@dataclass(frozen=True)
class ExistsF(So2Formula):
    sym: FuncSymbol
    body: So2Formula


def so2_var(name: str) -> Apply:
    """An arity-0 application, i.e. a propositional variable."""
    return Apply(FuncSymbol(name, 0))


def so2_disj(lhs: So2Formula, rhs: So2Formula) -> So2Formula:
    return Neg(Conj(Neg(lhs), Neg(rhs)))


def so2_implies(lhs: So2Formula, rhs: So2Formula) -> So2Formula:
    return Neg(Conj(lhs, Neg(rhs)))


def so2_iff(lhs: So2Formula, rhs: So2Formula) -> So2Formula:
    return Conj(so2_implies(lhs, rhs), so2_implies(rhs, lhs))


def so2_forall(sym: FuncSymbol, body: So2Formula) -> So2Formula:
    return Neg(ExistsF(sym, Neg(body)))


def so2_conj_all(parts: Iterable[So2Formula]) -> So2Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction has no representation")
    out = parts[0]
    for p in parts[1:]:
        out = Conj(out, p)
    return out


def match_forall(phi: So2Formula):
    """Return (symbol, body) if phi is the canonical -E sym. -body pattern."""
    if (
        isinstance(phi, Neg)
        and isinstance(phi.sub, ExistsF)
        and isinstance(phi.sub.body, Neg)
    ):
        return phi.sub.sym, phi.sub.body.sub
    return None


def so2_free_symbols(phi: So2Formula) -> frozenset[FuncSymbol]:
    """Function symbols with at least one unbound occurrence."""

    def walk(f: So2Formula, bound: frozenset[FuncSymbol]) -> frozenset:
        if isinstance(f, Apply):
            out = frozenset() if f.sym in bound else frozenset([f.sym])
            for a in f.args:
                out |= walk(a, bound)
            return out
        if isinstance(f, Neg):
            return walk(f.sub, bound)
        if isinstance(f, Conj):
            return walk(f.lhs, bound) | walk(f.rhs, bound)
        if isinstance(f, ExistsF):
            return walk(f.body, bound | {f.sym})
        raise TypeError(f"not an So2Formula: {f!r}")

    return walk(phi, frozenset())


def so2_all_symbols(phi: So2Formula) -> frozenset[FuncSymbol]:
    """Every symbol occurring in phi, bound or free."""
    out: set[FuncSymbol] = set()

    def walk(f):
        if isinstance(f, Apply):
            out.add(f.sym)
            for a in f.args:
                walk(a)
        elif isinstance(f, Neg):
            walk(f.sub)
        elif isinstance(f, Conj):
            walk(f.lhs)
            walk(f.rhs)
        elif isinstance(f, ExistsF):
            out.add(f.sym)
            walk(f.body)

    walk(phi)
    return frozenset(out)


def so2_node_count(phi: So2Formula) -> int:
    if isinstance(phi, Apply):
        return 1 + sum(so2_node_count(a) for a in phi.args)
    if isinstance(phi, Neg):
        return 1 + so2_node_count(phi.sub)
    if isinstance(phi, Conj):
        return 1 + so2_node_count(phi.lhs) + so2_node_count(phi.rhs)
    if isinstance(phi, ExistsF):
        return 1 + so2_node_count(phi.body)
    raise TypeError(f"not an So2Formula: {phi!r}")


def so2_nnf(phi: So2Formula) -> So2Formula:
    """Push negations to applications, reading -E f. - as a universal."""
    if isinstance(phi, Apply):
        return phi
    if isinstance(phi, Conj):
        return Conj(so2_nnf(phi.lhs), so2_nnf(phi.rhs))
    if isinstance(phi, ExistsF):
        return ExistsF(phi.sym, so2_nnf(phi.body))
    if isinstance(phi, Neg):
        sub = phi.sub
        if isinstance(sub, Apply):
            return phi
        if isinstance(sub, Neg):
            return so2_nnf(sub.sub)
        if isinstance(sub, Conj):
            return so2_disj(so2_nnf(Neg(sub.lhs)), so2_nnf(Neg(sub.rhs)))
        if isinstance(sub, ExistsF):
            return so2_forall(sub.sym, so2_nnf(Neg(sub.body)))
    raise TypeError(f"not an So2Formula: {phi!r}")


def so2_is_nnf(phi: So2Formula) -> bool:
    """True when every negation is atomic or part of a disj/forall pattern."""
    if isinstance(phi, Apply):
        return True
    if isinstance(phi, Conj):
        return so2_is_nnf(phi.lhs) and so2_is_nnf(phi.rhs)
    if isinstance(phi, ExistsF):
        return so2_is_nnf(phi.body)
    if isinstance(phi, Neg):
        sub = phi.sub
        if isinstance(sub, Apply):
            return True
        fa = match_forall(phi)
        if fa is not None:
            return so2_is_nnf(fa[1])
        # disjunction pattern -( -a & -b )
        if isinstance(sub, Conj) and isinstance(sub.lhs, Neg) and isinstance(sub.rhs, Neg):
            return so2_is_nnf(sub.lhs.sub) and so2_is_nnf(sub.rhs.sub)
        return False
    return False


def is_simple(phi: So2Formula) -> bool:
    """Functions take only propositions (arity-0 applications) as arguments."""
    if isinstance(phi, Apply):
        return all(
            isinstance(a, Apply) and a.sym.arity == 0 for a in phi.args
        )
    if isinstance(phi, Neg):
        return is_simple(phi.sub)
    if isinstance(phi, Conj):
        return is_simple(phi.lhs) and is_simple(phi.rhs)
    if isinstance(phi, ExistsF):
        return is_simple(phi.body)
    raise TypeError(f"not an So2Formula: {phi!r}")


def strip_prefix(phi: So2Formula) -> tuple[list[tuple[str, FuncSymbol]], So2Formula]:
    """Peel leading quantifiers; entries are ("E"|"A", symbol)."""
    prefix: list[tuple[str, FuncSymbol]] = []
    while True:
        if isinstance(phi, ExistsF):
            prefix.append(("E", phi.sym))
            phi = phi.body
            continue
        fa = match_forall(phi)
        if fa is not None:
            prefix.append(("A", fa[0]))
            phi = fa[1]
            continue
        return prefix, phi


def is_quantifier_free(phi: So2Formula) -> bool:
    if isinstance(phi, Apply):
        return all(is_quantifier_free(a) for a in phi.args)
    if isinstance(phi, Neg):
        return is_quantifier_free(phi.sub)
    if isinstance(phi, Conj):
        return is_quantifier_free(phi.lhs) and is_quantifier_free(phi.rhs)
    if isinstance(phi, ExistsF):
        return False
    raise TypeError(f"not an So2Formula: {phi!r}")


def is_prenex(phi: So2Formula) -> bool:
    """Prenex in the strict sense: all quantifiers lead, proper ones first."""
    prefix, matrix = strip_prefix(phi)
    if not is_quantifier_free(matrix):
        return False
    seen_prop = False
    for _, sym in prefix:
        if sym.arity == 0:
            seen_prop = True
        elif seen_prop:
            return False
    return True


def has_unique_args(phi: So2Formula) -> bool:
    """Each proper symbol occurs with exactly one fixed argument tuple."""
    tuples: dict[FuncSymbol, tuple] = {}

    def walk(f) -> bool:
        if isinstance(f, Apply):
            if f.sym.arity > 0:
                if f.sym in tuples and tuples[f.sym] != f.args:
                    return False
                tuples[f.sym] = f.args
            return all(walk(a) for a in f.args)
        if isinstance(f, Neg):
            return walk(f.sub)
        if isinstance(f, Conj):
            return walk(f.lhs) and walk(f.rhs)
        if isinstance(f, ExistsF):
            return walk(f.body)
        raise TypeError(f"not an So2Formula: {f!r}")

    return walk(phi)


def is_eso2(phi: So2Formula) -> bool:
    """No proper-function quantifier under an odd number of negations."""

    def walk(f, parity: int) -> bool:
        if isinstance(f, Apply):
            return True
        if isinstance(f, Neg):
            return walk(f.sub, parity ^ 1)
        if isinstance(f, Conj):
            return walk(f.lhs, parity) and walk(f.rhs, parity)
        if isinstance(f, ExistsF):
            if f.sym.arity > 0 and parity == 1:
                return False
            return walk(f.body, parity)
        raise TypeError(f"not an So2Formula: {f!r}")

    return walk(phi, 0)


# ---------------------------------------------------------------------------
# quantifier-free classical formulae
# ---------------------------------------------------------------------------


class PropFormula:
    __slots__ = ()


@dataclass(frozen=True)
class PropLit(PropFormula):
    var: str
    positive: bool = True


@dataclass(frozen=True)
class PropNeg(PropFormula):
    sub: PropFormula


@dataclass(frozen=True)
class PropAnd(PropFormula):
    lhs: PropFormula
    rhs: PropFormula


@dataclass(frozen=True)
class PropOr(PropFormula):
    lhs: PropFormula
    rhs: PropFormula


def prop_implies(lhs: PropFormula, rhs: PropFormula) -> PropFormula:
    return PropOr(prop_neg(lhs), rhs)


def prop_iff(lhs: PropFormula, rhs: PropFormula) -> PropFormula:
    return PropOr(PropAnd(lhs, rhs), PropAnd(prop_neg(lhs), prop_neg(rhs)))


def prop_neg(phi: PropFormula) -> PropFormula:
    if isinstance(phi, PropLit):
        return PropLit(phi.var, not phi.positive)
    return PropNeg(phi)


def prop_vars(phi: PropFormula) -> frozenset[str]:
    if isinstance(phi, PropLit):
        return frozenset([phi.var])
    if isinstance(phi, PropNeg):
        return prop_vars(phi.sub)
    if isinstance(phi, (PropAnd, PropOr)):
        return prop_vars(phi.lhs) | prop_vars(phi.rhs)
    raise TypeError(f"not a PropFormula: {phi!r}")


def prop_node_count(phi: PropFormula) -> int:
    if isinstance(phi, PropLit):
        return 1
    if isinstance(phi, PropNeg):
        return 1 + prop_node_count(phi.sub)
    if isinstance(phi, (PropAnd, PropOr)):
        return 1 + prop_node_count(phi.lhs) + prop_node_count(phi.rhs)
    raise TypeError(f"not a PropFormula: {phi!r}")


def prop_nnf(phi: PropFormula) -> PropFormula:
    """Equivalent formula with negation only inside literals."""
    if isinstance(phi, PropLit):
        return phi
    if isinstance(phi, PropAnd):
        return PropAnd(prop_nnf(phi.lhs), prop_nnf(phi.rhs))
    if isinstance(phi, PropOr):
        return PropOr(prop_nnf(phi.lhs), prop_nnf(phi.rhs))
    if isinstance(phi, PropNeg):
        sub = phi.sub
        if isinstance(sub, PropLit):
            return PropLit(sub.var, not sub.positive)
        if isinstance(sub, PropNeg):
            return prop_nnf(sub.sub)
        if isinstance(sub, PropAnd):
            return PropOr(prop_nnf(PropNeg(sub.lhs)), prop_nnf(PropNeg(sub.rhs)))
        if isinstance(sub, PropOr):
            return PropAnd(prop_nnf(PropNeg(sub.lhs)), prop_nnf(PropNeg(sub.rhs)))
    raise TypeError(f"not a PropFormula: {phi!r}")


def eval_prop_row(phi: PropFormula, row: Mapping[str, int]) -> int:
    """Classical evaluation of a quantifier-free formula on one assignment."""
    if isinstance(phi, PropLit):
        v = row[phi.var]
        return v if phi.positive else 1 - v
    if isinstance(phi, PropNeg):
        return 1 - eval_prop_row(phi.sub, row)
    if isinstance(phi, PropAnd):
        return eval_prop_row(phi.lhs, row) and eval_prop_row(phi.rhs, row)
    if isinstance(phi, PropOr):
        return eval_prop_row(phi.lhs, row) or eval_prop_row(phi.rhs, row)
    raise TypeError(f"not a PropFormula: {phi!r}")


# ---------------------------------------------------------------------------
# alternating dependency-quantified instances
# ---------------------------------------------------------------------------


class BlockKind(Enum):
    EXISTS = "E"
    UNION = "U"


@dataclass(frozen=True)
class Block:
    kind: BlockKind
    vars: tuple[str, ...]


@dataclass(frozen=True)
class AdqbfInstance:
    """A simple alternating qBf with its constraint tuple.

    ``constraints`` stores one (variable, dependency set) pair per block
    variable, in quantification order.
    """

    universals: tuple[str, ...]
    blocks: tuple[Block, ...]
    matrix: PropFormula
    constraints: tuple[tuple[str, frozenset[str]], ...]

    def __post_init__(self):
        block_vars = [v for b in self.blocks for v in b.vars]
        quantified = list(self.universals) + block_vars
        if len(set(quantified)) != len(quantified):
            raise DuplicateQuantifiedVariable(
                f"repeated quantified variable in {quantified}"
            )
        for a, b in zip(self.blocks, self.blocks[1:]):
            if a.kind == b.kind:
                raise InvalidInstance("adjacent blocks of equal kind")
        uset = set(self.universals)
        cvars = [v for v, _ in self.constraints]
        if cvars != block_vars:
            raise InvalidInstance(
                "constraint domain must list exactly the block variables "
                "in quantification order"
            )
        for v, deps in self.constraints:
            if not deps <= uset:
                raise InvalidInstance(
                    f"constraint of {v} mentions non-universal variables"
                )
        if not prop_vars(self.matrix) <= set(quantified):
            raise InvalidInstance("matrix mentions undeclared variables")

    def constraint_of(self, var: str) -> frozenset[str]:
        for v, deps in self.constraints:
            if v == var:
                return deps
        raise KeyError(var)

    @property
    def block_vars(self) -> tuple[str, ...]:
        return tuple(v for b in self.blocks for v in b.vars)


def make_instance(
    universals: Iterable[str],
    blocks: Iterable[tuple[BlockKind, Iterable[str]]],
    matrix: PropFormula,
    constraints: Mapping[str, Iterable[str]],
) -> AdqbfInstance:
    """Convenience constructor taking loose containers."""
    blks = tuple(Block(k, tuple(vs)) for k, vs in blocks)
    order = [v for b in blks for v in b.vars]
    ctuple = tuple((v, frozenset(constraints[v])) for v in order)
    return AdqbfInstance(tuple(universals), blks, matrix, ctuple)


class FragmentKind(Enum):
    SIGMA = "sigma"
    PI = "pi"


@dataclass(frozen=True)
class FragmentClass:
    kind: FragmentKind
    level: int


def classify_fragment(inst: AdqbfInstance) -> FragmentClass:
    """Sigma iff the first block is existential; level = number of blocks.

    A zero-block instance counts as Sigma_1 with an empty existential block.
    """
    if not inst.blocks:
        return FragmentClass(FragmentKind.SIGMA, 1)
    first = inst.blocks[0].kind
    kind = FragmentKind.SIGMA if first == BlockKind.EXISTS else FragmentKind.PI
    return FragmentClass(kind, len(inst.blocks))


# ---------------------------------------------------------------------------
# team formulae
# ---------------------------------------------------------------------------


class TeamFormula:
    __slots__ = ()


@dataclass(frozen=True)
class TLit(TeamFormula):
    var: str
    positive: bool = True


@dataclass(frozen=True)
class TAnd(TeamFormula):
    lhs: TeamFormula
    rhs: TeamFormula


@dataclass(frozen=True)
class TOr(TeamFormula):
    """Split disjunction: X = Y u Z with overlap allowed."""

    lhs: TeamFormula
    rhs: TeamFormula


@dataclass(frozen=True)
class TNeg(TeamFormula):
    """Strong (contradictory) negation, written ~ in concrete syntax."""

    sub: TeamFormula


@dataclass(frozen=True)
class TExists(TeamFormula):
    var: str
    body: TeamFormula


@dataclass(frozen=True)
class TForall(TeamFormula):
    var: str
    body: TeamFormula


@dataclass(frozen=True)
class DepAtom(TeamFormula):
    antecedents: tuple[str, ...]
    consequent: str


@dataclass(frozen=True)
class IncAtom(TeamFormula):
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __post_init__(self):
        if len(self.lhs) != len(self.rhs):
            raise ArityError("inclusion atom sides differ in length")


@dataclass(frozen=True)
class GdaAtom(TeamFormula):
    name: str
    args: tuple[str, ...]


def t_union(var: str, body: TeamFormula) -> TeamFormula:
    """The union quantifier, always stored as its ~E var. ~ desugaring."""
    return TNeg(TExists(var, TNeg(body)))


def t_conj_all(parts: Iterable[TeamFormula]) -> TeamFormula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction has no representation")
    out = parts[0]
    for p in parts[1:]:
        out = TAnd(out, p)
    return out


def t_disj_all(parts: Iterable[TeamFormula]) -> TeamFormula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction has no representation")
    out = parts[0]
    for p in parts[1:]:
        out = TOr(out, p)
    return out


def team_free_vars(phi: TeamFormula) -> frozenset[str]:
    if isinstance(phi, TLit):
        return frozenset([phi.var])
    if isinstance(phi, (TAnd, TOr)):
        return team_free_vars(phi.lhs) | team_free_vars(phi.rhs)
    if isinstance(phi, TNeg):
        return team_free_vars(phi.sub)
    if isinstance(phi, (TExists, TForall)):
        return team_free_vars(phi.body) - {phi.var}
    if isinstance(phi, DepAtom):
        return frozenset(phi.antecedents) | {phi.consequent}
    if isinstance(phi, IncAtom):
        return frozenset(phi.lhs) | frozenset(phi.rhs)
    if isinstance(phi, GdaAtom):
        return frozenset(phi.args)
    raise TypeError(f"not a TeamFormula: {phi!r}")


def team_all_vars(phi: TeamFormula) -> frozenset[str]:
    """Every proposition symbol occurring in phi, bound or free."""
    if isinstance(phi, (TExists, TForall)):
        return team_all_vars(phi.body) | {phi.var}
    if isinstance(phi, (TAnd, TOr)):
        return team_all_vars(phi.lhs) | team_all_vars(phi.rhs)
    if isinstance(phi, TNeg):
        return team_all_vars(phi.sub)
    return team_free_vars(phi)


def team_node_count(phi: TeamFormula) -> int:
    if isinstance(phi, (TLit, DepAtom, IncAtom, GdaAtom)):
        return 1
    if isinstance(phi, (TAnd, TOr)):
        return 1 + team_node_count(phi.lhs) + team_node_count(phi.rhs)
    if isinstance(phi, TNeg):
        return 1 + team_node_count(phi.sub)
    if isinstance(phi, (TExists, TForall)):
        return 1 + team_node_count(phi.body)
    raise TypeError(f"not a TeamFormula: {phi!r}")


def sim_degree(phi: TeamFormula) -> int:
    """Maximal nesting depth of strong negation."""
    if isinstance(phi, (TLit, DepAtom, IncAtom, GdaAtom)):
        return 0
    if isinstance(phi, (TAnd, TOr)):
        return max(sim_degree(phi.lhs), sim_degree(phi.rhs))
    if isinstance(phi, TNeg):
        return sim_degree(phi.sub) + 1
    if isinstance(phi, (TExists, TForall)):
        return sim_degree(phi.body)
    raise TypeError(f"not a TeamFormula: {phi!r}")


def prop_to_team(phi: PropFormula) -> TeamFormula:
    """Embed a classical matrix into team syntax via negation normal form."""
    phi = prop_nnf(phi)

    def conv(f: PropFormula) -> TeamFormula:
        if isinstance(f, PropLit):
            return TLit(f.var, f.positive)
        if isinstance(f, PropAnd):
            return TAnd(conv(f.lhs), conv(f.rhs))
        if isinstance(f, PropOr):
            return TOr(conv(f.lhs), conv(f.rhs))
        raise TypeError(f"negation normal form should be literal-only: {f!r}")

    return conv(phi)


FRAG_QPL = "qpl"
FRAG_QPD = "qpd"
FRAG_QPLINC = "qplinc"


def team_fragment_ok(phi: TeamFormula, fragment: str) -> bool:
    """Membership of phi in the named syntactic fragment.

    qpl: no strong negation and no atoms; qpd additionally allows dependence
    atoms; qplinc allows inclusion atoms instead.
    """
    if isinstance(phi, TLit):
        return True
    if isinstance(phi, (TAnd, TOr)):
        return team_fragment_ok(phi.lhs, fragment) and team_fragment_ok(
            phi.rhs, fragment
        )
    if isinstance(phi, (TExists, TForall)):
        return team_fragment_ok(phi.body, fragment)
    if isinstance(phi, TNeg):
        return False
    if isinstance(phi, DepAtom):
        return fragment == FRAG_QPD
    if isinstance(phi, IncAtom):
        return fragment == FRAG_QPLINC
    if isinstance(phi, GdaAtom):
        return False
    raise TypeError(f"not a TeamFormula: {phi!r}")


# ---------------------------------------------------------------------------
# modal team formulae
# ---------------------------------------------------------------------------


class ModalFormula:
    __slots__ = ()


@dataclass(frozen=True)
class MLit(ModalFormula):
    var: str
    positive: bool = True


@dataclass(frozen=True)
class MAnd(ModalFormula):
    lhs: ModalFormula
    rhs: ModalFormula


@dataclass(frozen=True)
class MOr(ModalFormula):
    lhs: ModalFormula
    rhs: ModalFormula


@dataclass(frozen=True)
class MDiamond(ModalFormula):
    sub: ModalFormula


@dataclass(frozen=True)
class MBox(ModalFormula):
    sub: ModalFormula


@dataclass(frozen=True)
class MInc(ModalFormula):
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __post_init__(self):
        if len(self.lhs) != len(self.rhs):
            raise ArityError("inclusion atom sides differ in length")


def modal_node_count(phi: ModalFormula) -> int:
    if isinstance(phi, (MLit, MInc)):
        return 1
    if isinstance(phi, (MAnd, MOr)):
        return 1 + modal_node_count(phi.lhs) + modal_node_count(phi.rhs)
    if isinstance(phi, (MDiamond, MBox)):
        return 1 + modal_node_count(phi.sub)
    raise TypeError(f"not a ModalFormula: {phi!r}")


def modal_inc_free(phi: ModalFormula) -> bool:
    if isinstance(phi, MLit):
        return True
    if isinstance(phi, MInc):
        return False
    if isinstance(phi, (MAnd, MOr)):
        return modal_inc_free(phi.lhs) and modal_inc_free(phi.rhs)
    if isinstance(phi, (MDiamond, MBox)):
        return modal_inc_free(phi.sub)
    raise TypeError(f"not a ModalFormula: {phi!r}")


# ---------------------------------------------------------------------------
# generic free-variable entry point
# ---------------------------------------------------------------------------


def free_vars(phi: Union[So2Formula, TeamFormula]):
    """Free symbols of a second-order or team formula."""
    if isinstance(phi, So2Formula):
        return so2_free_symbols(phi)
    if isinstance(phi, TeamFormula):
        return team_free_vars(phi)
    raise TypeError(f"free_vars undefined for {type(phi).__name__}")


# ---------------------------------------------------------------------------
# fresh names
# ---------------------------------------------------------------------------


def fresh_name(base: str, used: Iterable[str]) -> str:
    """base#k with the smallest k avoiding every used name.

    The # separator never appears in generated identifiers' base part, and
    the counter scan makes the result fresh even when inputs already carry
    #-suffixed names from earlier passes.
    """
    used = set(used)
    stem = base.split("#", 1)[0] or "v"
    k = 0
    while f"{stem}#{k}" in used:
        k += 1
    return f"{stem}#{k}"


def fresh_names(base: str, count: int, used: Iterable[str]) -> list[str]:
    used = set(used)
    out = []
    for _ in range(count):
        n = fresh_name(base, used)
        used.add(n)
        out.append(n)
    return out
