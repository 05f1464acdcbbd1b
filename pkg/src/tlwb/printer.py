"""Canonical printers; parse(print(v)) is structurally v.

Binary connectives print fully parenthesized, binder bodies are
parenthesized unless atomic, core second-order formulae print without
reconstructing derived connectives.
"""

from __future__ import annotations

from .formulas import (
    AdqbfInstance,
    Apply,
    BlockKind,
    Conj,
    DepAtom,
    ExistsF,
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
)


def print_so2(phi: So2Formula) -> str:
    if isinstance(phi, Apply):
        if not phi.args:
            return phi.sym.name
        inner = ", ".join(print_so2(a) for a in phi.args)
        return f"{phi.sym.name}({inner})"
    if isinstance(phi, Neg):
        return "-" + _so2_tight(phi.sub)
    if isinstance(phi, Conj):
        return f"({print_so2(phi.lhs)} & {print_so2(phi.rhs)})"
    if isinstance(phi, ExistsF):
        sym = phi.sym
        binder = f"E {sym.name}." if sym.arity == 0 else f"E {sym.name}/{sym.arity}."
        return f"{binder} {_so2_tight(phi.body)}"
    raise TypeError(f"not an So2Formula: {phi!r}")


def _so2_tight(phi: So2Formula) -> str:
    if isinstance(phi, Conj):
        return print_so2(phi)  # already parenthesized
    if isinstance(phi, (Apply, Neg, ExistsF)):
        return print_so2(phi)
    raise TypeError(f"not an So2Formula: {phi!r}")


def print_prop(phi: PropFormula) -> str:
    if isinstance(phi, PropLit):
        return phi.var if phi.positive else "-" + phi.var
    if isinstance(phi, PropNeg):
        return "-" + _prop_tight(phi.sub)
    if isinstance(phi, PropAnd):
        return f"({print_prop(phi.lhs)} & {print_prop(phi.rhs)})"
    if isinstance(phi, PropOr):
        return f"({print_prop(phi.lhs)} | {print_prop(phi.rhs)})"
    raise TypeError(f"not a PropFormula: {phi!r}")


def _prop_tight(phi: PropFormula) -> str:
    if isinstance(phi, PropLit) and not phi.positive:
        return "(" + print_prop(phi) + ")"
    return print_prop(phi)


def print_team(phi: TeamFormula) -> str:
    if isinstance(phi, TLit):
        return phi.var if phi.positive else "-" + phi.var
    if isinstance(phi, TAnd):
        return f"({print_team(phi.lhs)} & {print_team(phi.rhs)})"
    if isinstance(phi, TOr):
        return f"({print_team(phi.lhs)} | {print_team(phi.rhs)})"
    if isinstance(phi, TNeg):
        return "~" + _team_tight(phi.sub)
    if isinstance(phi, TExists):
        return f"E {phi.var}. {_team_tight(phi.body)}"
    if isinstance(phi, TForall):
        return f"A {phi.var}. {_team_tight(phi.body)}"
    if isinstance(phi, DepAtom):
        if phi.antecedents:
            return f"dep({', '.join(phi.antecedents)}; {phi.consequent})"
        return f"dep({phi.consequent})"
    if isinstance(phi, IncAtom):
        return f"inc({', '.join(phi.lhs)}; {', '.join(phi.rhs)})"
    if isinstance(phi, GdaAtom):
        return f"gda:{phi.name}({', '.join(phi.args)})"
    raise TypeError(f"not a TeamFormula: {phi!r}")


def _team_tight(phi: TeamFormula) -> str:
    if isinstance(phi, TLit) and not phi.positive:
        return "(" + print_team(phi) + ")"
    return print_team(phi)


def print_modal(phi: ModalFormula) -> str:
    if isinstance(phi, MLit):
        return phi.var if phi.positive else "-" + phi.var
    if isinstance(phi, MAnd):
        return f"({print_modal(phi.lhs)} & {print_modal(phi.rhs)})"
    if isinstance(phi, MOr):
        return f"({print_modal(phi.lhs)} | {print_modal(phi.rhs)})"
    if isinstance(phi, MDiamond):
        return "<>" + _modal_tight(phi.sub)
    if isinstance(phi, MBox):
        return "[]" + _modal_tight(phi.sub)
    if isinstance(phi, MInc):
        return f"inc({', '.join(phi.lhs)}; {', '.join(phi.rhs)})"
    raise TypeError(f"not a ModalFormula: {phi!r}")


def _modal_tight(phi: ModalFormula) -> str:
    if isinstance(phi, MLit) and not phi.positive:
        return "(" + print_modal(phi) + ")"
    return print_modal(phi)


def print_adqbf(inst: AdqbfInstance) -> str:
    parts = ["A"]
    parts.extend(inst.universals)
    parts.append(";")
    for block in inst.blocks:
        parts.append("E" if block.kind == BlockKind.EXISTS else "U")
        for v in block.vars:
            deps = ",".join(sorted(inst.constraint_of(v)))
            parts.append(f"{v}{{{deps}}}")
    parts.append(";")
    parts.append(print_prop(inst.matrix))
    return " ".join(parts)


def print_value(value) -> str:
    """Print any workbench value in its canonical concrete syntax."""
    if isinstance(value, So2Formula):
        return print_so2(value)
    if isinstance(value, TeamFormula):
        return print_team(value)
    if isinstance(value, ModalFormula):
        return print_modal(value)
    if isinstance(value, AdqbfInstance):
        return print_adqbf(value)
    if isinstance(value, PropFormula):
        return print_prop(value)
    raise TypeError(f"no printer for {type(value).__name__}")
