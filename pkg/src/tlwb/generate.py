"""Seeded random generators and small exhaustive enumerators.

Identical configurations produce identical values; every generator draws
exclusively from its own ``random.Random(seed)`` stream.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

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
    Neg,
    PropAnd,
    PropFormula,
    PropLit,
    PropOr,
    So2Formula,
    TAnd,
    TeamFormula,
    TExists,
    TForall,
    TLit,
    TNeg,
    TOr,
    make_instance,
    so2_forall,
    so2_var,
)

DEFAULT_WEIGHTS = (
    ("lit", 4.0),
    ("and", 2.0),
    ("or", 2.0),
    ("sim", 1.0),
    ("exists", 1.0),
    ("forall", 1.0),
    ("dep", 1.0),
    ("inc", 0.0),
    ("gda", 0.0),
)


@dataclass(frozen=True)
class GenConfig:
    """Reproducible generator configuration."""

    seed: int
    size: int = 8
    n_vars: int = 3
    logic: str = "team"
    weights: tuple[tuple[str, float], ...] = DEFAULT_WEIGHTS

    def weight_map(self) -> dict[str, float]:
        return dict(self.weights)


def generate(cfg: GenConfig):
    """A well-formed value of the configured logic kind."""
    rng = random.Random(cfg.seed)
    vars_ = [f"p{i}" for i in range(1, cfg.n_vars + 1)]
    if cfg.logic == "prop":
        return gen_prop(rng, vars_, cfg.size)
    if cfg.logic == "team":
        return gen_team(rng, vars_, cfg.size, cfg.weight_map())
    if cfg.logic == "so2":
        return gen_so2_closed(rng, cfg.size)
    if cfg.logic == "adqbf":
        return gen_adqbf(rng, n_universals=min(cfg.n_vars, 2), matrix_size=cfg.size)
    raise ValueError(f"no generator for logic {cfg.logic!r}")


# ---------------------------------------------------------------------------
# classical matrices
# ---------------------------------------------------------------------------


def gen_prop(rng: random.Random, vars_: Sequence[str], size: int) -> PropFormula:
    if size <= 1 or rng.random() < 0.3:
        return PropLit(rng.choice(vars_), rng.random() < 0.5)
    op = rng.choice(["and", "or", "neg"])
    if op == "neg":
        sub = gen_prop(rng, vars_, size - 1)
        if isinstance(sub, PropLit):
            return PropLit(sub.var, not sub.positive)
        from .formulas import PropNeg

        return PropNeg(sub)
    split = rng.randint(1, size - 2) if size > 2 else 1
    lhs = gen_prop(rng, vars_, split)
    rhs = gen_prop(rng, vars_, size - 1 - split)
    return PropAnd(lhs, rhs) if op == "and" else PropOr(lhs, rhs)


# ---------------------------------------------------------------------------
# team formulae
# ---------------------------------------------------------------------------


def gen_team(
    rng: random.Random,
    vars_: Sequence[str],
    size: int,
    weights: Optional[dict[str, float]] = None,
    gda_names: Sequence[tuple[str, int]] = (),
) -> TeamFormula:
    w = dict(DEFAULT_WEIGHTS)
    if weights:
        w.update(weights)

    def pick(options: list[str]) -> str:
        weights_ = [max(w.get(o, 0.0), 0.0) for o in options]
        if sum(weights_) <= 0:
            return "lit"
        return rng.choices(options, weights=weights_)[0]

    def leaf() -> TeamFormula:
        options = ["lit"]
        if w.get("dep", 0) > 0:
            options.append("dep")
        if w.get("inc", 0) > 0:
            options.append("inc")
        if w.get("gda", 0) > 0 and gda_names:
            options.append("gda")
        kind = pick(options)
        if kind == "dep":
            n_ants = rng.randint(0, min(2, len(vars_) - 1))
            ants = tuple(rng.sample(list(vars_), n_ants))
            return DepAtom(ants, rng.choice(vars_))
        if kind == "inc":
            width = rng.randint(1, min(2, len(vars_)))
            return IncAtom(
                tuple(rng.choices(list(vars_), k=width)),
                tuple(rng.choices(list(vars_), k=width)),
            )
        if kind == "gda":
            name, arity = rng.choice(list(gda_names))
            return GdaAtom(name, tuple(rng.choices(list(vars_), k=arity)))
        return TLit(rng.choice(vars_), rng.random() < 0.5)

    def build(budget: int) -> TeamFormula:
        if budget <= 1:
            return leaf()
        kind = pick(["lit", "and", "or", "sim", "exists", "forall"])
        if kind == "lit":
            return leaf()
        if kind == "sim":
            return TNeg(build(budget - 1))
        if kind == "exists":
            return TExists(rng.choice(vars_), build(budget - 1))
        if kind == "forall":
            return TForall(rng.choice(vars_), build(budget - 1))
        split = rng.randint(1, budget - 2) if budget > 2 else 1
        lhs = build(split)
        rhs = build(budget - 1 - split)
        return TAnd(lhs, rhs) if kind == "and" else TOr(lhs, rhs)

    return build(size)


def gen_qpd(rng: random.Random, vars_: Sequence[str], size: int) -> TeamFormula:
    """Quantified dependence fragment: no strong negation, no inclusion."""
    return gen_team(
        rng, vars_, size, {"sim": 0.0, "inc": 0.0, "gda": 0.0, "dep": 2.0}
    )


def gen_qplinc(rng: random.Random, vars_: Sequence[str], size: int) -> TeamFormula:
    """Quantified inclusion fragment: no strong negation, no dependence."""
    return gen_team(
        rng, vars_, size, {"sim": 0.0, "dep": 0.0, "gda": 0.0, "inc": 2.0}
    )


def gen_qpl(rng: random.Random, vars_: Sequence[str], size: int) -> TeamFormula:
    """Flat fragment: literals, connectives and quantifiers only."""
    return gen_team(
        rng, vars_, size, {"sim": 0.0, "dep": 0.0, "inc": 0.0, "gda": 0.0}
    )


def gen_pd(rng: random.Random, vars_: Sequence[str], size: int) -> TeamFormula:
    """Quantifier-free dependence fragment."""
    return gen_team(
        rng,
        vars_,
        size,
        {
            "sim": 0.0,
            "inc": 0.0,
            "gda": 0.0,
            "dep": 2.0,
            "exists": 0.0,
            "forall": 0.0,
        },
    )


def gen_qplinc_prenex(
    rng: random.Random, n_quant: int, matrix_size: int
) -> TeamFormula:
    """Prenex inclusion-logic sentence with n_quant leading quantifiers."""
    vars_ = [f"p{i}" for i in range(1, n_quant + 1)]
    if not vars_:
        vars_ = ["p1"]
    matrix = gen_team(
        rng,
        vars_,
        matrix_size,
        {
            "sim": 0.0,
            "dep": 0.0,
            "gda": 0.0,
            "inc": 2.0,
            "exists": 0.0,
            "forall": 0.0,
        },
    )
    out = matrix
    for v in reversed(vars_[:n_quant]):
        out = TExists(v, out) if rng.random() < 0.5 else TForall(v, out)
    return out


# ---------------------------------------------------------------------------
# second-order formulae
# ---------------------------------------------------------------------------


def gen_so2_closed(
    rng: random.Random,
    size: int,
    n_proper: int = 2,
    max_arity: int = 2,
    n_props: int = 2,
    complex_args: bool = False,
) -> So2Formula:
    """Closed formula quantifying a few proper symbols and propositions."""
    proper = [
        FuncSymbol(f"f{i}", rng.randint(1, max_arity)) for i in range(1, n_proper + 1)
    ]
    props = [FuncSymbol(f"x{i}", 0) for i in range(1, n_props + 1)]

    def matrix(budget: int) -> So2Formula:
        if budget <= 1 or rng.random() < 0.3:
            if proper and rng.random() < 0.6:
                f = rng.choice(proper)
                if complex_args and budget > 2 and rng.random() < 0.5:
                    args = tuple(
                        matrix(max(1, (budget - 1) // f.arity)) for _ in range(f.arity)
                    )
                else:
                    args = tuple(Apply(rng.choice(props)) for _ in range(f.arity))
                return Apply(f, args)
            return Apply(rng.choice(props))
        op = rng.choice(["conj", "neg", "conj", "neg"])
        if op == "neg":
            return Neg(matrix(budget - 1))
        split = rng.randint(1, budget - 2) if budget > 2 else 1
        return Conj(matrix(split), matrix(budget - 1 - split))

    body = matrix(size)
    binders: list[tuple[str, FuncSymbol]] = []
    binders.extend(("E" if rng.random() < 0.6 else "A", f) for f in proper)
    binders.extend(("E" if rng.random() < 0.5 else "A", x) for x in props)
    rng.shuffle(binders)
    out = body
    for kind, sym in reversed(binders):
        out = ExistsF(sym, out) if kind == "E" else so2_forall(sym, out)
    return out


def gen_swap_shape(
    rng: random.Random, max_arity: int = 2, body_size: int = 6
) -> tuple[So2Formula, FuncSymbol, FuncSymbol, str]:
    """A formula of one of the two quantifier-exchange shapes.

    Returns (formula, x, f, kind) with kind "AE" for Ax Ef and "EA" for
    Ex Af.  The body mentions only x and f, so the sentence is closed.
    """
    x = FuncSymbol("x", 0)
    f = FuncSymbol("f", rng.randint(1, max_arity))

    def body(budget: int) -> So2Formula:
        if budget <= 1 or rng.random() < 0.35:
            if rng.random() < 0.6:
                args = tuple(Apply(x) for _ in range(f.arity))
                return Apply(f, args)
            return Apply(x)
        if rng.random() < 0.5:
            return Neg(body(budget - 1))
        split = rng.randint(1, budget - 2) if budget > 2 else 1
        return Conj(body(split), body(budget - 1 - split))

    inner = body(body_size)
    if rng.random() < 0.5:
        return so2_forall(x, ExistsF(f, inner)), x, f, "AE"
    return ExistsF(x, so2_forall(f, inner)), x, f, "EA"


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------


def gen_adqbf(
    rng: random.Random,
    n_universals: int = 2,
    max_block_vars: int = 2,
    matrix_size: int = 5,
    force_last_union: bool = False,
) -> AdqbfInstance:
    universals = [f"p{i}" for i in range(1, n_universals + 1)]
    n_bvars = rng.randint(1, max_block_vars)
    bvars = [f"q{i}" for i in range(1, n_bvars + 1)]
    blocks: list[tuple[BlockKind, list[str]]] = []
    kind = rng.choice([BlockKind.EXISTS, BlockKind.UNION])
    i = 0
    while i < n_bvars:
        take = rng.randint(1, n_bvars - i)
        blocks.append((kind, bvars[i : i + take]))
        kind = BlockKind.UNION if kind == BlockKind.EXISTS else BlockKind.EXISTS
        i += take
    if force_last_union and blocks[-1][0] != BlockKind.UNION:
        if len(blocks[-1][1]) > 1:
            moved = blocks[-1][1].pop()
            blocks.append((BlockKind.UNION, [moved]))
        else:
            blocks[-1] = (BlockKind.UNION, blocks[-1][1])
            for j in range(len(blocks) - 2, -1, -1):
                want = (
                    BlockKind.EXISTS
                    if blocks[j + 1][0] == BlockKind.UNION
                    else BlockKind.UNION
                )
                blocks[j] = (want, blocks[j][1])
    constraints = {
        v: set(rng.sample(universals, rng.randint(0, len(universals))))
        for v in bvars
    }
    matrix = gen_prop(rng, universals + bvars, matrix_size)
    return make_instance(universals, [(k, vs) for k, vs in blocks], matrix, constraints)


# ---------------------------------------------------------------------------
# exhaustive enumerators (canonical variable introduction order)
# ---------------------------------------------------------------------------


def enum_qpl_formulas(max_nodes: int, vars_: Sequence[str]) -> Iterator[TeamFormula]:
    """All flat-fragment formulas up to the node bound, exhaustively."""
    vars_ = list(vars_)
    leaves: list[TeamFormula] = []
    for v in vars_:
        leaves.append(TLit(v, True))
        leaves.append(TLit(v, False))
    by_size: dict[int, list[TeamFormula]] = {1: leaves}
    yield from leaves
    for k in range(2, max_nodes + 1):
        out: list[TeamFormula] = []
        for phi in by_size[k - 1]:
            for v in vars_:
                out.append(TExists(v, phi))
                out.append(TForall(v, phi))
        for i in range(1, k - 1):
            j = k - 1 - i
            for lhs in by_size[i]:
                for rhs in by_size[j]:
                    out.append(TAnd(lhs, rhs))
                    out.append(TOr(lhs, rhs))
        by_size[k] = out
        yield from out


def enum_prop_matrices(
    max_nodes: int, vars_: Sequence[str]
) -> Iterator[PropFormula]:
    """All classical matrices up to the node bound over exactly these names."""
    vars_ = list(vars_)
    leaves: list[PropFormula] = []
    for v in vars_:
        leaves.append(PropLit(v, True))
        leaves.append(PropLit(v, False))
    by_size: dict[int, list[PropFormula]] = {1: leaves}
    yield from leaves
    for k in range(2, max_nodes + 1):
        out: list[PropFormula] = []
        for i in range(1, k - 1):
            j = k - 1 - i
            for lhs in by_size[i]:
                for rhs in by_size[j]:
                    out.append(PropAnd(lhs, rhs))
                    out.append(PropOr(lhs, rhs))
        by_size[k] = out
        yield from out
