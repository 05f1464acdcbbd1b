"""Concrete-syntax parsers for the five logics plus the data-file loaders.

Grammar summary (one token set for all logics):

* connectives ``&``, ``|``, ``->`` (right assoc), ``<->``; classical
  negation ``-``; strong negation ``~``; modalities ``<>`` and ``[]``
* quantifiers ``E v.``, ``A v.``, ``U v.``; second-order binders may
  declare an arity inline as ``E f/2.``
* atoms ``dep(p1,...,pn; q)`` (the semicolon separates the consequent),
  ``inc(p1,...,pn ; q1,...,qn)``, ``gda:name(p1,...,pn)``
* an ADQBF instance is ``A p1 p2 ; E q1{p1} U q2{} ; matrix``

Unary operators bind tightest, then ``&``, ``|``, ``->``, ``<->``.
``#`` starts a line comment in data files; in formulae it may occur inside
generated identifiers (pass-introduced fresh symbols), never leading.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import (
    ArityError,
    DuplicateQuantifiedVariable,
    ParseError,
)
from .formulas import (
    AdqbfInstance,
    Apply,
    Block,
    BlockKind,
    Conj,
    DepAtom,
    ExistsF,
    FuncSymbol,
    GdaAtom,
    IncAtom,
    MAnd,
    MBox,
    MDiamond,
    MInc,
    MLit,
    ModalFormula,
    MOr,
    Neg,
    PropAnd,
    PropFormula,
    PropLit,
    PropNeg,
    PropOr,
    So2Formula,
    TAnd,
    TeamFormula,
    TExists,
    TForall,
    TLit,
    TNeg,
    TOr,
    prop_iff,
    prop_implies,
    so2_forall,
    so2_iff,
    so2_implies,
    t_union,
)
from .gda import Gda, def_symbol
from .teams import KripkeModel, Relation, Team


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    begin: int
    end: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.begin, self.end)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<arrow>->)
  | (?P<dia><>)
  | (?P<box>\[\])
  | (?P<id>[A-Za-z0-9_][A-Za-z0-9_\#]*)
  | (?P<punct>[(){},;./&|~:-])
    """,
    re.VERBOSE,
)

_PUNCT_KINDS = {
    "(": "lp", ")": "rp", "{": "lb", "}": "rb", ",": "comma", ";": "semi",
    ".": "dot", "/": "slash", "&": "amp", "|": "pipe", "~": "tilde",
    ":": "colon", "-": "dash",
}


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1)
            )
        kind = m.lastgroup
        if kind != "ws":
            if kind == "punct":
                kind = _PUNCT_KINDS[m.group()]
            tokens.append(Token(kind, m.group(), m.start(), m.end()))
        pos = m.end()
    tokens.append(Token("eof", "", len(text), len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {kind!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.span)

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    def finish(self, value):
        if not self.at_end():
            self.fail("trailing input after formula")
        return value

    # quantifier lookahead: ID in EAU, then ID, optional /arity, then dot
    def at_quantifier(self, letters: str) -> bool:
        t0 = self.peek()
        if t0.kind != "id" or t0.text not in letters:
            return False
        t1 = self.peek(1)
        if t1.kind != "id":
            return False
        t2 = self.peek(2)
        if t2.kind == "dot":
            return True
        return t2.kind == "slash" and self.peek(3).kind == "id" and self.peek(4).kind == "dot"


# ---------------------------------------------------------------------------
# second-order formulae
# ---------------------------------------------------------------------------


class _So2Parser(_Parser):
    def __init__(self, text: str):
        super().__init__(text)
        self.scopes: list[FuncSymbol] = []
        self.free_arities: dict[str, int] = {}

    def parse(self) -> So2Formula:
        return self.finish(self.iff())

    def iff(self) -> So2Formula:
        out = self.implies()
        while self.peek().kind == "iff":
            self.next()
            out = so2_iff(out, self.implies())
        return out

    def implies(self) -> So2Formula:
        lhs = self.disj()
        if self.peek().kind == "arrow":
            self.next()
            return so2_implies(lhs, self.implies())
        return lhs

    def disj(self) -> So2Formula:
        out = self.conj()
        while self.peek().kind == "pipe":
            self.next()
            out = Neg(Conj(Neg(out), Neg(self.conj())))
        return out

    def conj(self) -> So2Formula:
        out = self.unary()
        while self.peek().kind == "amp":
            self.next()
            out = Conj(out, self.unary())
        return out

    def unary(self) -> So2Formula:
        tok = self.peek()
        if tok.kind == "dash":
            self.next()
            return Neg(self.unary())
        if self.at_quantifier("EA"):
            kind = self.next().text
            name = self.expect("id").text
            arity = 0
            if self.peek().kind == "slash":
                self.next()
                arity_tok = self.expect("id")
                if not arity_tok.text.isdigit():
                    raise ParseError("arity must be a number", arity_tok.span)
                arity = int(arity_tok.text)
            self.expect("dot")
            sym = FuncSymbol(name, arity)
            self.scopes.append(sym)
            body = self.unary()
            self.scopes.pop()
            return ExistsF(sym, body) if kind == "E" else so2_forall(sym, body)
        return self.atom()

    def atom(self) -> So2Formula:
        tok = self.peek()
        if tok.kind == "lp":
            self.next()
            out = self.iff()
            self.expect("rp")
            return out
        if tok.kind == "id":
            self.next()
            args: list[So2Formula] = []
            if self.peek().kind == "lp":
                self.next()
                if self.peek().kind != "rp":
                    args.append(self.iff())
                    while self.peek().kind == "comma":
                        self.next()
                        args.append(self.iff())
                self.expect("rp")
            arity = len(args)
            name = tok.text
            for sym in reversed(self.scopes):
                if sym.name == name:
                    if sym.arity != arity:
                        raise ArityError(
                            f"{name} is bound with arity {sym.arity}, "
                            f"applied to {arity} arguments"
                        )
                    return Apply(sym, tuple(args))
            seen = self.free_arities.setdefault(name, arity)
            if seen != arity:
                raise ArityError(
                    f"free symbol {name} used with arities {seen} and {arity}"
                )
            return Apply(FuncSymbol(name, arity), tuple(args))
        self.fail("expected a formula")


# ---------------------------------------------------------------------------
# quantifier-free classical formulae
# ---------------------------------------------------------------------------


class _PropParser(_Parser):
    def parse(self) -> PropFormula:
        return self.finish(self.iff())

    def iff(self) -> PropFormula:
        out = self.implies()
        while self.peek().kind == "iff":
            self.next()
            out = prop_iff(out, self.implies())
        return out

    def implies(self) -> PropFormula:
        lhs = self.disj()
        if self.peek().kind == "arrow":
            self.next()
            return prop_implies(lhs, self.implies())
        return lhs

    def disj(self) -> PropFormula:
        out = self.conj()
        while self.peek().kind == "pipe":
            self.next()
            out = PropOr(out, self.conj())
        return out

    def conj(self) -> PropFormula:
        out = self.unary()
        while self.peek().kind == "amp":
            self.next()
            out = PropAnd(out, self.unary())
        return out

    def unary(self) -> PropFormula:
        tok = self.peek()
        if tok.kind == "dash":
            self.next()
            sub = self.unary()
            if isinstance(sub, PropLit):
                return PropLit(sub.var, not sub.positive)
            return PropNeg(sub)
        if tok.kind == "lp":
            self.next()
            out = self.iff()
            self.expect("rp")
            return out
        if tok.kind == "id":
            self.next()
            return PropLit(tok.text)
        self.fail("expected a formula")


# ---------------------------------------------------------------------------
# team formulae
# ---------------------------------------------------------------------------


class _TeamParser(_Parser):
    def parse(self) -> TeamFormula:
        return self.finish(self.disj())

    def disj(self) -> TeamFormula:
        out = self.conj()
        while self.peek().kind == "pipe":
            self.next()
            out = TOr(out, self.conj())
        return out

    def conj(self) -> TeamFormula:
        out = self.unary()
        while self.peek().kind == "amp":
            self.next()
            out = TAnd(out, self.unary())
        return out

    def unary(self) -> TeamFormula:
        tok = self.peek()
        if tok.kind == "tilde":
            self.next()
            return TNeg(self.unary())
        if tok.kind == "dash":
            self.next()
            var = self.expect("id")
            return TLit(var.text, False)
        if self.at_quantifier("EAU"):
            kind = self.next().text
            var = self.expect("id").text
            self.expect("dot")
            body = self.unary()
            if kind == "E":
                return TExists(var, body)
            if kind == "A":
                return TForall(var, body)
            return t_union(var, body)
        return self.atom()

    def var_list(self) -> list[str]:
        out = [self.expect("id").text]
        while self.peek().kind == "comma":
            self.next()
            out.append(self.expect("id").text)
        return out

    def atom(self) -> TeamFormula:
        tok = self.peek()
        if tok.kind == "lp":
            self.next()
            out = self.disj()
            self.expect("rp")
            return out
        if tok.kind == "id" and tok.text == "dep" and self.peek(1).kind == "lp":
            self.next()
            self.next()
            before: list[str] = []
            if self.peek().kind == "id":
                before = self.var_list()
            if self.peek().kind == "semi":
                # canonical form: antecedents ; consequent
                self.next()
                consequent = self.expect("id").text
                self.expect("rp")
                return DepAtom(tuple(before), consequent)
            self.expect("rp")
            if not before:
                self.fail("dep() needs at least a consequent")
            # paper-style comma form: the last variable is the consequent
            return DepAtom(tuple(before[:-1]), before[-1])
        if tok.kind == "id" and tok.text == "inc" and self.peek(1).kind == "lp":
            self.next()
            self.next()
            lhs: list[str] = []
            if self.peek().kind == "id":
                lhs = self.var_list()
            self.expect("semi")
            rhs: list[str] = []
            if self.peek().kind == "id":
                rhs = self.var_list()
            self.expect("rp")
            if len(lhs) != len(rhs):
                self.fail("inclusion atom sides must have equal length")
            return IncAtom(tuple(lhs), tuple(rhs))
        if tok.kind == "id" and tok.text == "gda" and self.peek(1).kind == "colon":
            self.next()
            self.next()
            name = self.expect("id").text
            self.expect("lp")
            args = self.var_list() if self.peek().kind == "id" else []
            self.expect("rp")
            return GdaAtom(name, tuple(args))
        if tok.kind == "id":
            self.next()
            return TLit(tok.text)
        self.fail("expected a formula")


# ---------------------------------------------------------------------------
# modal formulae
# ---------------------------------------------------------------------------


class _ModalParser(_Parser):
    def parse(self) -> ModalFormula:
        return self.finish(self.disj())

    def disj(self) -> ModalFormula:
        out = self.conj()
        while self.peek().kind == "pipe":
            self.next()
            out = MOr(out, self.conj())
        return out

    def conj(self) -> ModalFormula:
        out = self.unary()
        while self.peek().kind == "amp":
            self.next()
            out = MAnd(out, self.unary())
        return out

    def unary(self) -> ModalFormula:
        tok = self.peek()
        if tok.kind == "dia":
            self.next()
            return MDiamond(self.unary())
        if tok.kind == "box":
            self.next()
            return MBox(self.unary())
        if tok.kind == "dash":
            self.next()
            var = self.expect("id")
            return MLit(var.text, False)
        return self.atom()

    def var_list(self) -> list[str]:
        out = [self.expect("id").text]
        while self.peek().kind == "comma":
            self.next()
            out.append(self.expect("id").text)
        return out

    def atom(self) -> ModalFormula:
        tok = self.peek()
        if tok.kind == "lp":
            self.next()
            out = self.disj()
            self.expect("rp")
            return out
        if tok.kind == "id" and tok.text == "inc" and self.peek(1).kind == "lp":
            self.next()
            self.next()
            lhs = self.var_list() if self.peek().kind == "id" else []
            self.expect("semi")
            rhs = self.var_list() if self.peek().kind == "id" else []
            self.expect("rp")
            if len(lhs) != len(rhs):
                self.fail("inclusion atom sides must have equal length")
            return MInc(tuple(lhs), tuple(rhs))
        if tok.kind == "id":
            self.next()
            return MLit(tok.text)
        self.fail("expected a formula")


# ---------------------------------------------------------------------------
# ADQBF instances
# ---------------------------------------------------------------------------


class _AdqbfParser(_Parser):
    """``A p1 p2 ; E q1{p1} U q2{} ; matrix``.

    A new block starts at an ``E``/``U`` letter not followed by ``{``;
    block variables are ``name{deps}`` units.
    """

    def _at_block_kind(self) -> bool:
        t = self.peek()
        return (
            t.kind == "id"
            and t.text in ("E", "U")
            and self.peek(1).kind != "lb"
        )

    def parse(self) -> AdqbfInstance:
        t = self.expect("id")
        if t.text != "A":
            raise ParseError(
                "instance must start with the universal prefix 'A'", t.span
            )
        universals = []
        while self.peek().kind == "id":
            universals.append(self.next().text)
        self.expect("semi")
        blocks: list[tuple[BlockKind, list[str]]] = []
        constraints: dict[str, frozenset[str]] = {}
        while self._at_block_kind():
            kind = BlockKind.EXISTS if self.next().text == "E" else BlockKind.UNION
            vars_: list[str] = []
            while self.peek().kind == "id" and self.peek(1).kind == "lb":
                name = self.next().text
                self.expect("lb")
                deps = []
                if self.peek().kind == "id":
                    deps.append(self.next().text)
                    while self.peek().kind == "comma":
                        self.next()
                        deps.append(self.expect("id").text)
                self.expect("rb")
                vars_.append(name)
                constraints[name] = frozenset(deps)
            blocks.append((kind, vars_))
        self.expect("semi")
        matrix_parser = _PropParser.__new__(_PropParser)
        matrix_parser.text = self.text
        matrix_parser.tokens = self.tokens
        matrix_parser.pos = self.pos
        matrix = matrix_parser.iff()
        self.pos = matrix_parser.pos
        if not self.at_end():
            self.fail("trailing input after matrix")
        order = [v for _, vs in blocks for v in vs]
        try:
            return AdqbfInstance(
                tuple(universals),
                tuple(Block(k, tuple(vs)) for k, vs in blocks),
                matrix,
                tuple((v, constraints[v]) for v in order),
            )
        except (ParseError, DuplicateQuantifiedVariable, ArityError):
            raise
        except Exception as exc:
            raise ParseError(str(exc), SourceSpan(0, len(self.text))) from exc


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

LOGICS = ("so2", "prop", "adqbf", "team", "modal")


def parse(logic: str, text: str):
    """Parse text in the named logic; parse errors carry a source span."""
    text = _strip_comments(text)
    if logic == "so2":
        return _So2Parser(text).parse()
    if logic == "prop":
        return _PropParser(text).parse()
    if logic == "team":
        return _TeamParser(text).parse()
    if logic == "modal":
        return _ModalParser(text).parse()
    if logic == "adqbf":
        return _AdqbfParser(text).parse()
    raise ValueError(f"unknown logic {logic!r}; choose from {LOGICS}")


def _strip_comments(text: str) -> str:
    lines = []
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            continue
        lines.append(line)
    return "\n".join(lines) if lines else text


# ---------------------------------------------------------------------------
# data files
# ---------------------------------------------------------------------------


def _data_lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        out.append(stripped)
    return out


def load_team(text: str) -> Team:
    """First line: variable names; then one row of bits per line."""
    lines = _data_lines(text)
    if not lines:
        raise ParseError("team file is empty", SourceSpan(0, 0))
    domain = tuple(lines[0].split())
    rows = []
    for line in lines[1:]:
        bits = line.replace(" ", "")
        if len(bits) != len(domain) or any(c not in "01" for c in bits):
            raise ParseError(
                f"row {line!r} does not fit domain of {len(domain)} variables",
                SourceSpan(0, len(line)),
            )
        row = tuple(int(c) for c in bits)
        if row in rows:
            raise ParseError(f"duplicate row {line!r}", SourceSpan(0, len(line)))
        rows.append(row)
    return Team(domain, frozenset(rows))


def load_kripke(text: str) -> tuple[KripkeModel, frozenset[str]]:
    """Lines worlds:/edge:/val:/team:; returns the model and the team."""
    worlds: list[str] = []
    edges: list[tuple[str, str]] = []
    valuation: dict[str, set[str]] = {}
    team: set[str] = set()
    for line in _data_lines(text):
        key, _, rest = line.partition(":")
        parts = rest.split()
        key = key.strip()
        if key == "worlds":
            worlds.extend(parts)
        elif key == "edge":
            if len(parts) != 2:
                raise ParseError(f"edge needs two worlds: {line!r}", SourceSpan(0, 0))
            edges.append((parts[0], parts[1]))
        elif key == "val":
            if not parts:
                raise ParseError(f"val needs a world: {line!r}", SourceSpan(0, 0))
            valuation.setdefault(parts[0], set()).update(parts[1:])
        elif key == "team":
            team.update(parts)
        else:
            raise ParseError(f"unknown line {line!r}", SourceSpan(0, 0))
    for w in worlds:
        valuation.setdefault(w, set())
    model = KripkeModel.of(worlds, edges, valuation)
    return model, frozenset(team)


def load_gdas(text: str) -> dict[str, Gda]:
    """Blocks of `gda <name> <arity>` followed by rel: lines or a def: line."""
    registry: dict[str, Gda] = {}
    name: Optional[str] = None
    arity = 0
    rels: list[Relation] = []
    definition = None

    def flush():
        nonlocal name, rels, definition
        if name is None:
            return
        registry[name] = Gda(
            name,
            arity,
            frozenset(rels) if rels else None,
            definition,
        )
        name, rels, definition = None, [], None

    for line in _data_lines(text):
        if line.startswith("gda "):
            flush()
            parts = line.split()
            if len(parts) != 3 or not parts[2].isdigit():
                raise ParseError(f"bad atom header {line!r}", SourceSpan(0, 0))
            name, arity = parts[1], int(parts[2])
        elif line.startswith("rel:"):
            if name is None:
                raise ParseError("rel: before any gda header", SourceSpan(0, 0))
            tuples = []
            for word in line[4:].split():
                if len(word) != arity or any(c not in "01" for c in word):
                    raise ParseError(
                        f"tuple {word!r} does not have arity {arity}",
                        SourceSpan(0, 0),
                    )
                tuples.append(tuple(int(c) for c in word))
            rels.append(Relation(arity, frozenset(tuples)))
        elif line.startswith("def:"):
            if name is None:
                raise ParseError("def: before any gda header", SourceSpan(0, 0))
            formula = parse("so2", line[4:])
            definition = formula
        else:
            raise ParseError(f"unknown line {line!r}", SourceSpan(0, 0))
    flush()
    return registry
