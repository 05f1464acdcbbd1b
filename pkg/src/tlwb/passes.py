"""Formula-to-formula constructions as deterministic compiler passes.

Every pass is a pure function; fresh symbols use the name#counter scheme
with counters chosen past anything already present, so no pass can capture
a variable.  ``run_pass`` wraps any registered pass with a size report that
asserts its polynomial output bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .errors import (
    EmptyUniversalPrefix,
    EmptyVarList,
    FreeVarOutsideDomain,
    LastBlockNotUnion,
    NotASentence,
    NotClosed,
    NotNormalized,
    NotPrenex,
    ShapeMismatch,
    SymbolClash,
    UndefinableGda,
    UnexpectedFreeSymbols,
    WrongFragment,
)
from .formulas import (
    AdqbfInstance,
    Apply,
    Block,
    BlockKind,
    Conj,
    DepAtom,
    ExistsF,
    FragmentClass,
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
    classify_fragment,
    fresh_name,
    fresh_names,
    is_prenex,
    is_quantifier_free,
    is_simple,
    has_unique_args,
    match_forall,
    modal_node_count,
    prop_node_count,
    prop_to_team,
    prop_vars,
    so2_all_symbols,
    so2_conj_all,
    so2_disj,
    so2_forall,
    so2_free_symbols,
    so2_iff,
    so2_implies,
    so2_nnf,
    so2_node_count,
    so2_var,
    t_conj_all,
    t_disj_all,
    t_union,
    team_all_vars,
    team_fragment_ok,
    team_free_vars,
    team_node_count,
    FRAG_QPD,
    FRAG_QPLINC,
)
from .gda import Gda, dep_family_formula, def_symbol, inclusion_family_formula
from .teams import KripkeModel

# ---------------------------------------------------------------------------
# shared second-order helpers
# ---------------------------------------------------------------------------


def _subst_symbol(phi: So2Formula, old: FuncSymbol, new: FuncSymbol) -> So2Formula:
    """Rename every application of old to new (arities must match)."""
    if isinstance(phi, Apply):
        args = tuple(_subst_symbol(a, old, new) for a in phi.args)
        return Apply(new if phi.sym == old else phi.sym, args)
    if isinstance(phi, Neg):
        return Neg(_subst_symbol(phi.sub, old, new))
    if isinstance(phi, Conj):
        return Conj(_subst_symbol(phi.lhs, old, new), _subst_symbol(phi.rhs, old, new))
    if isinstance(phi, ExistsF):
        if phi.sym == old:
            return phi  # shadowed below this binder
        return ExistsF(phi.sym, _subst_symbol(phi.body, old, new))
    raise TypeError(f"not an So2Formula: {phi!r}")


def _binds(phi: So2Formula, sym: FuncSymbol) -> bool:
    if isinstance(phi, Apply):
        return any(_binds(a, sym) for a in phi.args)
    if isinstance(phi, Neg):
        return _binds(phi.sub, sym)
    if isinstance(phi, Conj):
        return _binds(phi.lhs, sym) or _binds(phi.rhs, sym)
    if isinstance(phi, ExistsF):
        return phi.sym == sym or _binds(phi.body, sym)
    raise TypeError(f"not an So2Formula: {phi!r}")


def _tuple_iff(xs: Sequence[So2Formula], ys: Sequence[So2Formula]) -> So2Formula:
    return so2_conj_all([so2_iff(x, y) for x, y in zip(xs, ys)])


def _used_names(phi: So2Formula) -> set[str]:
    return {s.name for s in so2_all_symbols(phi)}


# ---------------------------------------------------------------------------
# swap_quantifier (quantifier exchange with one extra argument)
# ---------------------------------------------------------------------------


def swap_quantifier(
    phi: So2Formula, x: FuncSymbol, f: FuncSymbol
) -> So2Formula:
    """Exchange an adjacent propositional/function quantifier pair.

    Ax Ef body becomes Ef' Ax body' and Ex Af body becomes Af' Ex body',
    where f' takes x as an extra first argument and body' rewrites every
    f(ys) to f'(x, ys).
    """
    if x.arity != 0:
        raise ShapeMismatch(f"{x} is not a propositional symbol")
    fa = match_forall(phi)
    if fa is not None and fa[0] == x and isinstance(fa[1], ExistsF) and fa[1].sym == f:
        body = fa[1].body
        mode = "AE"
    elif isinstance(phi, ExistsF) and phi.sym == x:
        inner = match_forall(phi.body)
        if inner is None or inner[0] != f:
            raise ShapeMismatch("expected Ex Af body")
        body = inner[1]
        mode = "EA"
    else:
        raise ShapeMismatch("expected Ax Ef body or Ex Af body")
    if _binds(body, x) or _binds(body, f):
        raise SymbolClash(f"{x.name} or {f.name} is requantified in the body")
    fp = FuncSymbol(fresh_name(f.name, _used_names(phi)), f.arity + 1)
    new_body = _bump_applications(body, f, fp, x)
    if mode == "AE":
        return ExistsF(fp, so2_forall(x, new_body))
    return so2_forall(fp, ExistsF(x, new_body))


def _bump_applications(
    phi: So2Formula, f: FuncSymbol, fp: FuncSymbol, x: FuncSymbol
) -> So2Formula:
    if isinstance(phi, Apply):
        args = tuple(_bump_applications(a, f, fp, x) for a in phi.args)
        if phi.sym == f:
            return Apply(fp, (Apply(x),) + args)
        return Apply(phi.sym, args)
    if isinstance(phi, Neg):
        return Neg(_bump_applications(phi.sub, f, fp, x))
    if isinstance(phi, Conj):
        return Conj(
            _bump_applications(phi.lhs, f, fp, x),
            _bump_applications(phi.rhs, f, fp, x),
        )
    if isinstance(phi, ExistsF):
        return ExistsF(phi.sym, _bump_applications(phi.body, f, fp, x))
    raise TypeError(f"not an So2Formula: {phi!r}")


# ---------------------------------------------------------------------------
# simplify_applications
# ---------------------------------------------------------------------------


def simplify_applications(phi: So2Formula) -> So2Formula:
    """Flatten nested applications so functions take only propositions.

    Each complex argument psi of an application is pulled out through a
    fresh proposition b via Ab((b <-> psi) -> f(..., b, ...)).
    """
    used = _used_names(phi)

    def is_prop(a: So2Formula) -> bool:
        return isinstance(a, Apply) and a.sym.arity == 0

    def simp(f: So2Formula) -> So2Formula:
        if isinstance(f, Apply):
            args = [simp(a) for a in f.args]
            while not all(is_prop(a) for a in args):
                i = next(j for j, a in enumerate(args) if not is_prop(a))
                b = FuncSymbol(fresh_name("b", used), 0)
                used.add(b.name)
                inner = Apply(f.sym, tuple(args[:i] + [Apply(b)] + args[i + 1:]))
                return so2_forall(
                    b, so2_implies(so2_iff(Apply(b), args[i]), simp(inner))
                )
            return Apply(f.sym, tuple(args))
        if isinstance(f, Neg):
            return Neg(simp(f.sub))
        if isinstance(f, Conj):
            return Conj(simp(f.lhs), simp(f.rhs))
        if isinstance(f, ExistsF):
            return ExistsF(f.sym, simp(f.body))
        raise TypeError(f"not an So2Formula: {f!r}")

    return simp(phi)


# ---------------------------------------------------------------------------
# prenexing with the quantifier exchange
# ---------------------------------------------------------------------------

Prefix = list[tuple[str, FuncSymbol]]


def _dual(kind: str) -> str:
    return "A" if kind == "E" else "E"


def _prenex_ir(phi: So2Formula, used: set[str]) -> tuple[Prefix, So2Formula]:
    """Pull all quantifiers to the front with capture-avoiding renaming.

    Requires a simple formula (no quantifiers inside application arguments).
    """
    if isinstance(phi, Apply):
        return [], phi
    if isinstance(phi, Neg):
        p, m = _prenex_ir(phi.sub, used)
        return [(_dual(k), s) for k, s in p], Neg(m)
    if isinstance(phi, ExistsF):
        p, m = _prenex_ir(phi.body, used)
        sym = phi.sym
        if any(s == sym for _, s in p):
            # vacuous outer binder shadowed along the whole body
            sym = FuncSymbol(fresh_name(sym.name, used), sym.arity)
            used.add(sym.name)
        return [("E", sym)] + p, m
    if isinstance(phi, Conj):
        lp, lm = _prenex_ir(phi.lhs, used)
        rp, rm = _prenex_ir(phi.rhs, used)
        rfree = so2_free_symbols(rm) - {s for _, s in rp}
        lp2: Prefix = []
        for k, s in lp:
            if s in rfree:
                s2 = FuncSymbol(fresh_name(s.name, used), s.arity)
                used.add(s2.name)
                lm = _subst_symbol(lm, s, s2)
                lp2.append((k, s2))
            else:
                lp2.append((k, s))
        lfree = so2_free_symbols(lm) - {s for _, s in lp2}
        lbound = {s for _, s in lp2}
        rp2: Prefix = []
        for k, s in rp:
            if s in lfree or s in lbound:
                s2 = FuncSymbol(fresh_name(s.name, used), s.arity)
                used.add(s2.name)
                rm = _subst_symbol(rm, s, s2)
                rp2.append((k, s2))
            else:
                rp2.append((k, s))
        return lp2 + rp2, Conj(lm, rm)
    raise TypeError(f"not an So2Formula: {phi!r}")


def _reorder_functions_first(
    prefix: Prefix, matrix: So2Formula, used: set[str]
) -> tuple[Prefix, So2Formula]:
    """Bubble proper-function quantifiers left past propositional ones.

    Same-kind neighbours commute; opposite kinds exchange via the extra-
    argument construction.  The leftmost applicable pair is always taken.
    """
    prefix = list(prefix)
    while True:
        pos = None
        for i in range(len(prefix) - 1):
            if prefix[i][1].arity == 0 and prefix[i + 1][1].arity > 0:
                pos = i
                break
        if pos is None:
            return prefix, matrix
        (kx, x), (kf, f) = prefix[pos], prefix[pos + 1]
        if kx == kf:
            prefix[pos], prefix[pos + 1] = prefix[pos + 1], prefix[pos]
            continue
        fp = FuncSymbol(fresh_name(f.name, used), f.arity + 1)
        used.add(fp.name)
        matrix = _bump_applications(matrix, f, fp, x)
        prefix[pos], prefix[pos + 1] = (kf, fp), (kx, x)


def _occurrence_tuples(matrix: So2Formula, f: FuncSymbol) -> list[tuple]:
    """Distinct argument tuples of f in first-occurrence order."""
    seen: list[tuple] = []

    def walk(m):
        if isinstance(m, Apply):
            if m.sym == f and m.args not in seen:
                seen.append(m.args)
            for a in m.args:
                walk(a)
        elif isinstance(m, Neg):
            walk(m.sub)
        elif isinstance(m, Conj):
            walk(m.lhs)
            walk(m.rhs)
        elif isinstance(m, ExistsF):
            walk(m.body)

    walk(matrix)
    return seen


def _subst_tuple_apps(
    matrix: So2Formula, f: FuncSymbol, mapping: Mapping[tuple, Apply]
) -> So2Formula:
    if isinstance(matrix, Apply):
        if matrix.sym == f:
            return mapping[matrix.args]
        return Apply(
            matrix.sym, tuple(_subst_tuple_apps(a, f, mapping) for a in matrix.args)
        )
    if isinstance(matrix, Neg):
        return Neg(_subst_tuple_apps(matrix.sub, f, mapping))
    if isinstance(matrix, Conj):
        return Conj(
            _subst_tuple_apps(matrix.lhs, f, mapping),
            _subst_tuple_apps(matrix.rhs, f, mapping),
        )
    raise TypeError(f"unexpected node in matrix: {matrix!r}")


def _split_unique(
    prefix: Prefix, matrix: So2Formula, used: set[str]
) -> tuple[Prefix, So2Formula]:
    """Split each proper symbol until it has one fixed argument tuple.

    An existential f with tuples x1..xn becomes Ef1..Efn with fresh
    universally quantified tuples y1..yn, a chain asserting the fi agree,
    and an argument-matching guard around the matrix.  Universal symbols
    split dually (existential witness tuples).
    """
    i = 0
    prefix = list(prefix)
    while i < len(prefix):
        kind, f = prefix[i]
        if f.arity == 0:
            i += 1
            continue
        tuples = _occurrence_tuples(matrix, f)
        if len(tuples) <= 1:
            i += 1
            continue
        n = len(tuples)
        parts = [
            FuncSymbol(nm, f.arity)
            for nm in fresh_names(f.name, n, used)
        ]
        used.update(p.name for p in parts)
        ys: list[list[Apply]] = []
        for j in range(n):
            names = fresh_names("y", f.arity, used)
            used.update(names)
            ys.append([so2_var(nm) for nm in names])
        mapping = {
            tuples[j]: Apply(parts[j], tuple(ys[j])) for j in range(n)
        }
        theta = _subst_tuple_apps(matrix, f, mapping)
        chain = [
            so2_implies(
                _tuple_iff(ys[j], ys[j + 1]),
                so2_iff(Apply(parts[j], tuple(ys[j])), Apply(parts[j + 1], tuple(ys[j + 1]))),
            )
            for j in range(n - 1)
        ]
        psi1 = so2_conj_all(chain)
        args_match = so2_conj_all(
            [_tuple_iff(list(tuples[j]), ys[j]) for j in range(n)]
        )
        if kind == "E":
            matrix = Conj(psi1, so2_implies(args_match, theta))
            fresh_kind = "A"
        else:
            matrix = so2_implies(psi1, Conj(args_match, theta))
            fresh_kind = "E"
        prefix[i : i + 1] = [(kind, p) for p in parts]
        for row in ys:
            prefix.extend((fresh_kind, v.sym) for v in row)
        i += n
    return prefix, matrix


def _rebuild(prefix: Prefix, matrix: So2Formula) -> So2Formula:
    out = matrix
    for kind, sym in reversed(prefix):
        out = ExistsF(sym, out) if kind == "E" else so2_forall(sym, out)
    return out


def to_prenex_unique(phi: So2Formula) -> So2Formula:
    """Simple prenex unique-argument form of a closed formula."""
    if so2_free_symbols(phi):
        raise NotClosed("prenex-unique normalization requires a sentence")
    used = _used_names(phi)
    simple = simplify_applications(phi)
    used |= _used_names(simple)
    prefix, matrix = _prenex_ir(simple, used)
    prefix, matrix = _reorder_functions_first(prefix, matrix, used)
    prefix, matrix = _split_unique(prefix, matrix, used)
    return _rebuild(prefix, matrix)


# ---------------------------------------------------------------------------
# prenex simple unique sentences -> ADQBF
# ---------------------------------------------------------------------------


def so2u_to_adqbf(phi: So2Formula) -> AdqbfInstance:
    """Compile a simple prenex unique-argument sentence to an instance.

    Universal propositions become the universal prefix, proper-function
    groups become alternating blocks constrained by their unique argument
    tuples, and existential propositions join the final existential block
    with the universals quantified before them as constraint.  Functions
    whose tuple mentions an existential proposition are rerouted through
    fresh universally quantified mirror propositions first.
    """
    if so2_free_symbols(phi):
        raise NotNormalized("input must be a sentence")
    if not (is_simple(phi) and is_prenex(phi) and has_unique_args(phi)):
        raise NotNormalized("input must be simple, prenex, unique-argument")
    used = _used_names(phi)
    prefix, matrix = _prenex_ir(phi, set(used))

    # distinct variable names across the whole prefix
    names_seen: set[str] = set()
    renamed: Prefix = []
    for kind, sym in prefix:
        if sym.name in names_seen:
            sym2 = FuncSymbol(fresh_name(sym.name, used), sym.arity)
            used.add(sym2.name)
            matrix = _subst_symbol(matrix, sym, sym2)
            sym = sym2
        names_seen.add(sym.name)
        renamed.append((kind, sym))
    prefix = renamed

    fn_entries = [(k, s) for k, s in prefix if s.arity > 0]
    prop_entries = [(k, s) for k, s in prefix if s.arity == 0]
    if prefix != fn_entries + prop_entries:
        raise NotNormalized("proper functions must be quantified before propositions")

    if fn_entries and fn_entries[-1][0] == "A":
        dummy = FuncSymbol(fresh_name("d", used), 1)
        used.add(dummy.name)
        fn_entries.append(("E", dummy))

    universal_props = [s.name for k, s in prop_entries if k == "A"]
    exist_props = [s.name for k, s in prop_entries if k == "E"]

    matrix = so2_nnf(matrix)

    # reroute functions whose tuple mentions an existential proposition
    universal_set = set(universal_props)
    for _, f in fn_entries:
        tuples = _occurrence_tuples(matrix, f)
        if not tuples:
            continue
        (args,) = tuples
        arg_names = [a.sym.name for a in args]
        if all(n in universal_set for n in arg_names):
            continue
        mirror = fresh_names("r", f.arity, used)
        used.update(mirror)
        universal_props.extend(mirror)
        universal_set.update(mirror)
        rvars = [so2_var(n) for n in mirror]
        guard = _tuple_iff(list(args), rvars)
        new_app = Apply(f, tuple(rvars))

        def reroute(m: So2Formula) -> So2Formula:
            if isinstance(m, Neg) and isinstance(m.sub, Apply) and m.sub.sym == f:
                return so2_implies(guard, Neg(new_app))
            if isinstance(m, Apply):
                if m.sym == f:
                    return so2_implies(guard, new_app)
                return m
            if isinstance(m, Neg):
                return Neg(reroute(m.sub))
            if isinstance(m, Conj):
                return Conj(reroute(m.lhs), reroute(m.rhs))
            raise TypeError(f"unexpected node in matrix: {m!r}")

        matrix = reroute(matrix)

    # constraints
    constraints: dict[str, frozenset[str]] = {}
    for _, f in fn_entries:
        tuples = _occurrence_tuples(matrix, f)
        if tuples:
            constraints[f.name] = frozenset(a.sym.name for a in tuples[0])
        else:
            constraints[f.name] = frozenset()
    preceding: list[str] = []
    q_constraints: dict[str, frozenset[str]] = {}
    for k, s in prop_entries:
        if k == "A":
            preceding.append(s.name)
        else:
            q_constraints[s.name] = frozenset(preceding)
    constraints.update(q_constraints)

    # blocks: group consecutive equal-kind functions, merge tail with props
    blocks: list[tuple[BlockKind, list[str]]] = []
    for k, s in fn_entries:
        kind = BlockKind.EXISTS if k == "E" else BlockKind.UNION
        if blocks and blocks[-1][0] == kind:
            blocks[-1][1].append(s.name)
        else:
            blocks.append((kind, [s.name]))
    if exist_props:
        if blocks and blocks[-1][0] == BlockKind.EXISTS:
            blocks[-1][1].extend(exist_props)
        else:
            blocks.append((BlockKind.EXISTS, list(exist_props)))

    # matrix: substitute applications by their variables
    fn_syms = {s for _, s in fn_entries}

    def conv(m: So2Formula) -> PropFormula:
        if isinstance(m, Apply):
            return PropLit(m.sym.name)
        if isinstance(m, Neg):
            sub = conv(m.sub)
            if isinstance(sub, PropLit):
                return PropLit(sub.var, not sub.positive)
            return PropNeg(sub)
        if isinstance(m, Conj):
            return PropAnd(conv(m.lhs), conv(m.rhs))
        raise TypeError(f"unexpected node in matrix: {m!r}")

    prop_matrix = conv(matrix)

    order = [v for _, vs in blocks for v in vs]
    ctuple = tuple((v, constraints[v]) for v in order)
    return AdqbfInstance(
        tuple(universal_props),
        tuple(Block(k, tuple(vs)) for k, vs in blocks),
        prop_matrix,
        ctuple,
    )


# ---------------------------------------------------------------------------
# collapse of a trailing union block
# ---------------------------------------------------------------------------


def collapse_last_universal_block(inst: AdqbfInstance) -> AdqbfInstance:
    """Move the last union block's variables into the universal prefix."""
    if not inst.blocks or inst.blocks[-1].kind != BlockKind.UNION:
        raise LastBlockNotUnion("final block must be a union block")
    last = inst.blocks[-1]
    dropped = set(last.vars)
    return AdqbfInstance(
        inst.universals + last.vars,
        inst.blocks[:-1],
        inst.matrix,
        tuple((v, d) for v, d in inst.constraints if v not in dropped),
    )


# ---------------------------------------------------------------------------
# ADQBF -> quantified team logic with dependence atoms
# ---------------------------------------------------------------------------


def _dep_atom_for(inst: AdqbfInstance, var: str) -> DepAtom:
    return DepAtom(tuple(sorted(inst.constraint_of(var))), var)


def adqbf_to_qptl_dep(inst: AdqbfInstance) -> TeamFormula:
    """The dependence-atom reading of an instance as a quantified sentence.

    Union-quantified variables' dependence atoms sit inside the strongly
    negated escape disjunct together with the nonemptiness guard, the
    existential ones guard the matrix disjunct.
    """
    if not inst.universals:
        raise EmptyUniversalPrefix("translation needs a universal variable")
    p1 = inst.universals[0]
    union_deps = []
    exists_deps = []
    for block in inst.blocks:
        for v in block.vars:
            atom = _dep_atom_for(inst, v)
            (union_deps if block.kind == BlockKind.UNION else exists_deps).append(atom)
    nonempty = TNeg(TAnd(TLit(p1), TLit(p1, False)))
    left_core = t_conj_all([nonempty, *union_deps]) if union_deps else nonempty
    left = TNeg(left_core)
    theta = prop_to_team(inst.matrix)
    right = t_conj_all([*exists_deps, theta])
    body: TeamFormula = TOr(left, right)
    for block in reversed(inst.blocks):
        for v in reversed(block.vars):
            if block.kind == BlockKind.EXISTS:
                body = TExists(v, body)
            else:
                body = t_union(v, body)
    for p in reversed(inst.universals):
        body = TForall(p, body)
    return body


def build_max(vars: Sequence[str]) -> TeamFormula:
    """A team satisfies this iff it realizes every assignment of vars."""
    if not vars:
        raise EmptyVarList("max() needs at least one variable")
    return TNeg(t_disj_all([DepAtom((), v) for v in vars]))


def qptl_dep_to_ptl_dep(inst: AdqbfInstance) -> TeamFormula:
    """Quantifier elimination into quantifier-free team logic.

    Output is max(all variables) conjoined with the left-to-right
    elimination of the block variables; truth of the instance corresponds
    to satisfiability of the output.
    """
    seq: list[tuple[BlockKind, str]] = [
        (b.kind, v) for b in inst.blocks for v in b.vars
    ]
    all_vars = list(inst.universals) + [v for _, v in seq]
    if not all_vars:
        raise EmptyVarList("instance quantifies no variables")

    def elim(i: int) -> TeamFormula:
        if i == len(seq):
            return prop_to_team(inst.matrix)
        kind, v = seq[i]
        atom = _dep_atom_for(inst, v)
        if kind == BlockKind.EXISTS:
            return TOr(atom, TAnd(atom, elim(i + 1)))
        return TNeg(TOr(atom, TAnd(atom, TNeg(elim(i + 1)))))

    return TAnd(build_max(all_vars), elim(0))


# ---------------------------------------------------------------------------
# dependence atoms via unary atoms, and unary atoms away
# ---------------------------------------------------------------------------


def dep_to_unary(phi: TeamFormula, r: Optional[str] = None) -> TeamFormula:
    """Rewrite every dependence atom with antecedents into unary-atom form.

    One shared fresh variable r joins the evaluation domain; the gadget is
    ~((r | -r) | (AND_i dep(p_i) & ~dep(q))).  Unary atoms are left for
    unary_dep_elim.
    """
    vars_all = team_all_vars(phi)
    if r is None:
        r = fresh_name("r", vars_all)
    elif r in vars_all:
        raise SymbolClash(f"{r} occurs in the input")

    def rw(f: TeamFormula) -> TeamFormula:
        if isinstance(f, DepAtom) and f.antecedents:
            tautology = TOr(TLit(r), TLit(r, False))
            consts = t_conj_all([DepAtom((), p) for p in f.antecedents])
            return TNeg(TOr(tautology, TAnd(consts, TNeg(DepAtom((), f.consequent)))))
        if isinstance(f, (TLit, DepAtom, IncAtom, GdaAtom)):
            return f
        if isinstance(f, TAnd):
            return TAnd(rw(f.lhs), rw(f.rhs))
        if isinstance(f, TOr):
            return TOr(rw(f.lhs), rw(f.rhs))
        if isinstance(f, TNeg):
            return TNeg(rw(f.sub))
        if isinstance(f, TExists):
            return TExists(f.var, rw(f.body))
        if isinstance(f, TForall):
            return TForall(f.var, rw(f.body))
        raise TypeError(f"not a TeamFormula: {f!r}")

    return rw(phi)


def unary_dep_elim(phi: TeamFormula) -> TeamFormula:
    """Replace each unary dep(p) with ~(~p & ~-p)."""
    if isinstance(phi, DepAtom) and not phi.antecedents:
        q = phi.consequent
        return TNeg(TAnd(TNeg(TLit(q)), TNeg(TLit(q, False))))
    if isinstance(phi, (TLit, DepAtom, IncAtom, GdaAtom)):
        return phi
    if isinstance(phi, TAnd):
        return TAnd(unary_dep_elim(phi.lhs), unary_dep_elim(phi.rhs))
    if isinstance(phi, TOr):
        return TOr(unary_dep_elim(phi.lhs), unary_dep_elim(phi.rhs))
    if isinstance(phi, TNeg):
        return TNeg(unary_dep_elim(phi.sub))
    if isinstance(phi, TExists):
        return TExists(phi.var, unary_dep_elim(phi.body))
    if isinstance(phi, TForall):
        return TForall(phi.var, unary_dep_elim(phi.body))
    raise TypeError(f"not a TeamFormula: {phi!r}")


def adqbf_to_qptl(inst: AdqbfInstance) -> TeamFormula:
    """Atom-free sentence: dep translation, unary gadgets, shared r bound
    by an outermost universal quantifier when the gadgets introduced it."""
    dep_sentence = adqbf_to_qptl_dep(inst)
    r = fresh_name("r", team_all_vars(dep_sentence))
    unary = dep_to_unary(dep_sentence, r)
    atom_free = unary_dep_elim(unary)
    if r in team_free_vars(atom_free):
        atom_free = TForall(r, atom_free)
    return atom_free


# ---------------------------------------------------------------------------
# prenex inclusion sentences -> modal inclusion logic
# ---------------------------------------------------------------------------


def _branch(p: str) -> ModalFormula:
    return MAnd(MDiamond(MLit(p)), MDiamond(MLit(p, False)))


def _store(p: str) -> ModalFormula:
    return MOr(
        MAnd(MLit(p), MBox(MLit(p))),
        MAnd(MLit(p, False), MBox(MLit(p, False))),
    )


def _m_conj_all(parts: Sequence[ModalFormula]) -> ModalFormula:
    out = parts[0]
    for p in parts[1:]:
        out = MAnd(out, p)
    return out


def tree_formula(vars: Sequence[str]) -> ModalFormula:
    """Forces a complete binary assignment tree over vars below the root."""
    if not vars:
        raise EmptyVarList("tree() needs at least one variable")
    parts: list[ModalFormula] = [_branch(vars[0])]
    for i in range(1, len(vars)):
        level: ModalFormula = _m_conj_all(
            [_branch(vars[i])] + [_store(vars[j]) for j in range(i)]
        )
        for _ in range(i):
            level = MBox(level)
        parts.append(level)
    return _m_conj_all(parts)


def qplinc_to_minc(phi: TeamFormula) -> ModalFormula:
    """Replace quantifiers by modalities under a forced assignment tree."""
    prefix: list[tuple[str, str]] = []
    body = phi
    while isinstance(body, (TExists, TForall)):
        prefix.append(("E" if isinstance(body, TExists) else "A", body.var))
        body = body.body
    names = [v for _, v in prefix]
    if len(set(names)) != len(names):
        raise NotPrenex("prefix variables must be distinct")
    if not team_fragment_ok(body, FRAG_QPLINC):
        raise NotPrenex("matrix must be quantifier-free inclusion logic")
    if team_free_vars(phi):
        raise NotASentence("translation requires a sentence")

    def conv(f: TeamFormula) -> ModalFormula:
        if isinstance(f, TLit):
            return MLit(f.var, f.positive)
        if isinstance(f, TAnd):
            return MAnd(conv(f.lhs), conv(f.rhs))
        if isinstance(f, TOr):
            return MOr(conv(f.lhs), conv(f.rhs))
        if isinstance(f, IncAtom):
            return MInc(f.lhs, f.rhs)
        raise NotPrenex(f"matrix contains {type(f).__name__}")

    out = conv(body)
    for kind, _ in reversed(prefix):
        out = MDiamond(out) if kind == "E" else MBox(out)
    if not prefix:
        return out
    return MAnd(tree_formula(names), out)


TREE_MODEL_CAP = 4


def canonical_tree_model(
    vars, *, unfixed_value: int = 0, cap: int = TREE_MODEL_CAP
) -> KripkeModel:
    """The complete binary assignment tree as a Kripke model.

    Worlds are the partial assignments fixing a prefix of vars; edges extend
    by one variable both ways; variables not yet fixed at a world take
    unfixed_value.  Root world is "w".
    """
    if isinstance(vars, int):
        vars = [f"p{i}" for i in range(1, vars + 1)]
    vars = list(vars)
    n = len(vars)
    if n > cap:
        from .errors import BudgetExceeded

        raise BudgetExceeded(f"tree depth {n} exceeds cap {cap}")
    worlds = []
    edges = []
    valuation = {}
    for depth in range(n + 1):
        for bits in _all_bitstrings(depth):
            w = "w" + bits
            worlds.append(w)
            val = set()
            for j, v in enumerate(vars):
                if j < depth:
                    if bits[j] == "1":
                        val.add(v)
                elif unfixed_value:
                    val.add(v)
            valuation[w] = val
            if depth < n:
                edges.append((w, w + "0"))
                edges.append((w, w + "1"))
    return KripkeModel.of(worlds, edges, valuation)


def _all_bitstrings(n: int) -> list[str]:
    if n == 0:
        return [""]
    return [b + c for b in _all_bitstrings(n - 1) for c in "01"]


# ---------------------------------------------------------------------------
# validity wrapper for quantifier-free dependence formulae
# ---------------------------------------------------------------------------


def pd_validity_wrapper(phi: TeamFormula) -> TeamFormula:
    """Universally close a quantifier-free dependence formula.

    Validity of the input equals truth of the closed sentence, by downward
    closure of the fragment.
    """
    if not team_fragment_ok(phi, FRAG_QPD):
        raise WrongFragment("input must be quantifier-free dependence logic")
    if _has_team_quantifier(phi):
        raise WrongFragment("input must be quantifier-free")
    out = phi
    for p in reversed(sorted(team_all_vars(phi))):
        out = TForall(p, out)
    return out


def _has_team_quantifier(phi: TeamFormula) -> bool:
    if isinstance(phi, (TExists, TForall)):
        return True
    if isinstance(phi, (TAnd, TOr)):
        return _has_team_quantifier(phi.lhs) or _has_team_quantifier(phi.rhs)
    if isinstance(phi, TNeg):
        return _has_team_quantifier(phi.sub)
    return False


# ---------------------------------------------------------------------------
# team logic -> second-order logic over characteristic functions
# ---------------------------------------------------------------------------


class _FreshPool:
    def __init__(self, used: set[str]):
        self.used = set(used)

    def prop(self, base: str) -> str:
        n = fresh_name(base, self.used)
        self.used.add(n)
        return n

    def props(self, base: str, count: int) -> list[str]:
        return [self.prop(base) for _ in range(count)]

    def func(self, base: str, arity: int) -> FuncSymbol:
        return FuncSymbol(self.prop(base), arity)


def _rename_bound_team_vars(phi: TeamFormula, pool: _FreshPool, taken: set[str]) -> TeamFormula:
    """Alpha-rename quantifiers so no bound variable clashes with taken names."""

    def go(f: TeamFormula, env: dict[str, str]) -> TeamFormula:
        if isinstance(f, TLit):
            return TLit(env.get(f.var, f.var), f.positive)
        if isinstance(f, TAnd):
            return TAnd(go(f.lhs, env), go(f.rhs, env))
        if isinstance(f, TOr):
            return TOr(go(f.lhs, env), go(f.rhs, env))
        if isinstance(f, TNeg):
            return TNeg(go(f.sub, env))
        if isinstance(f, (TExists, TForall)):
            v2 = pool.prop(f.var) if f.var in taken else f.var
            if v2 != f.var:
                env = {**env, f.var: v2}
            else:
                env = {k: w for k, w in env.items() if k != f.var}
            taken.add(v2)
            body = go(f.body, env)
            return TExists(v2, body) if isinstance(f, TExists) else TForall(v2, body)
        if isinstance(f, DepAtom):
            return DepAtom(tuple(env.get(a, a) for a in f.antecedents), env.get(f.consequent, f.consequent))
        if isinstance(f, IncAtom):
            return IncAtom(tuple(env.get(a, a) for a in f.lhs), tuple(env.get(a, a) for a in f.rhs))
        if isinstance(f, GdaAtom):
            return GdaAtom(f.name, tuple(env.get(a, a) for a in f.args))
        raise TypeError(f"not a TeamFormula: {f!r}")

    return go(phi, {})


def team_to_so2(
    phi: TeamFormula,
    p_vars: Sequence[str],
    gdas: Optional[Mapping[str, Gda]] = None,
    f: Optional[FuncSymbol] = None,
) -> So2Formula:
    """Compile to a second-order formula over the team's characteristic
    function: a team X over p_vars satisfies phi exactly when the output
    holds with f bound to the characteristic table of X on p_vars.

    Strong-negation-free inputs with existentially definable atoms compile
    into the existential fragment.
    """
    p_vars = tuple(p_vars)
    gdas = dict(gdas or {})
    if not team_free_vars(phi) <= set(p_vars):
        raise FreeVarOutsideDomain(
            f"free variables {sorted(team_free_vars(phi) - set(p_vars))} "
            f"not in {p_vars}"
        )
    used = set(team_all_vars(phi)) | set(p_vars)
    for g in gdas.values():
        if g.definition is not None:
            used |= {s.name for s in so2_all_symbols(g.definition)}
    if f is None:
        f = FuncSymbol(fresh_name("f", used), len(p_vars))
    elif f.name in set(p_vars) or f.arity != len(p_vars):
        raise SymbolClash(f"{f} unusable as the team symbol over {p_vars}")
    used.add(f.name)
    pool = _FreshPool(used)
    phi = _rename_bound_team_vars(phi, pool, set(p_vars) | {f.name})

    def translate(node: TeamFormula, fsym: FuncSymbol, tup: tuple[str, ...]) -> So2Formula:
        pv = [so2_var(v) for v in tup]

        def forall_tuple(vars_: Sequence[str], body: So2Formula) -> So2Formula:
            for v in reversed(list(vars_)):
                body = so2_forall(FuncSymbol(v, 0), body)
            return body

        def exists_tuple(vars_: Sequence[str], body: So2Formula) -> So2Formula:
            for v in reversed(list(vars_)):
                body = ExistsF(FuncSymbol(v, 0), body)
            return body

        if isinstance(node, TLit):
            lit = so2_var(node.var) if node.positive else Neg(so2_var(node.var))
            return forall_tuple(tup, so2_implies(Apply(fsym, tuple(pv)), lit))
        if isinstance(node, TAnd):
            return Conj(translate(node.lhs, fsym, tup), translate(node.rhs, fsym, tup))
        if isinstance(node, TNeg):
            return Neg(translate(node.sub, fsym, tup))
        if isinstance(node, TOr):
            f0 = pool.func(fsym.name, fsym.arity)
            f1 = pool.func(fsym.name, fsym.arity)
            qs = pool.props("q", len(tup))
            qv = [so2_var(v) for v in qs]
            sub0 = translate(node.lhs, f0, tup)
            sub1 = translate(node.rhs, f1, tup)
            cover = forall_tuple(
                tup,
                so2_implies(
                    Apply(fsym, tuple(pv)),
                    so2_disj(Apply(f0, tuple(pv)), Apply(f1, tuple(pv))),
                ),
            )
            within = forall_tuple(
                qs,
                so2_implies(
                    so2_disj(Apply(f0, tuple(qv)), Apply(f1, tuple(qv))),
                    Apply(fsym, tuple(qv)),
                ),
            )
            return ExistsF(f0, ExistsF(f1, so2_conj_all([sub0, sub1, cover, within])))
        if isinstance(node, (TForall, TExists)):
            g = pool.func("g", fsym.arity + 1)
            tup2 = tup + (node.var,)
            sub = translate(node.body, g, tup2)
            pprime = pool.prop("p")
            forward_body = so2_implies(
                Apply(fsym, tuple(pv)), Apply(g, tuple(pv) + (so2_var(pprime),))
            )
            if isinstance(node, TForall):
                forward = forall_tuple(list(tup) + [pprime], forward_body)
            else:
                forward = forall_tuple(tup, ExistsF(FuncSymbol(pprime, 0), forward_body))
            qs = pool.props("q", len(tup))
            qprime = pool.prop("q")
            qv = [so2_var(v) for v in qs]
            back = forall_tuple(
                qs + [qprime],
                so2_implies(
                    Apply(g, tuple(qv) + (so2_var(qprime),)), Apply(fsym, tuple(qv))
                ),
            )
            return ExistsF(g, so2_conj_all([sub, forward, back]))
        if isinstance(node, (DepAtom, IncAtom, GdaAtom)):
            if isinstance(node, DepAtom):
                args = node.antecedents + (node.consequent,)
                definition = dep_family_formula(len(args))
                defsym = def_symbol(len(args))
            elif isinstance(node, IncAtom):
                args = node.lhs + node.rhs
                definition = inclusion_family_formula(len(node.lhs))
                defsym = def_symbol(len(args))
            else:
                args = node.args
                gda = gdas.get(node.name)
                if gda is None or gda.definition is None:
                    raise UndefinableGda(
                        f"atom {node.name!r} has no defining formula"
                    )
                definition = gda.definition
                defsym = def_symbol(gda.arity)
            g = pool.func("g", len(args))
            psi_g = _subst_symbol(definition, defsym, g)
            rest = [v for v in tup if v not in set(args)]
            av = [so2_var(a) for a in args]
            proj_fwd = forall_tuple(
                tup, so2_implies(Apply(fsym, tuple(pv)), Apply(g, tuple(av)))
            )
            proj_back = forall_tuple(
                args,
                exists_tuple(
                    rest,
                    so2_implies(Apply(g, tuple(av)), Apply(fsym, tuple(pv))),
                ),
            )
            return ExistsF(g, so2_conj_all([psi_g, proj_fwd, proj_back]))
        raise TypeError(f"not a TeamFormula: {node!r}")

    return translate(phi, f, p_vars)


def close_sentence(
    psi: So2Formula, p_vars: Optional[Sequence[str]] = None
) -> So2Formula:
    """Ef Ep (f(p) & psi(f)): true iff some nonempty team satisfies the
    original team formula."""
    frees = so2_free_symbols(psi)
    if len(frees) != 1:
        raise UnexpectedFreeSymbols(
            f"expected exactly one free symbol, found {sorted(str(s) for s in frees)}"
        )
    (f,) = frees
    if p_vars is None:
        used = _used_names(psi)
        p_vars = fresh_names("p", f.arity, used)
    p_vars = list(p_vars)
    if len(p_vars) != f.arity:
        raise UnexpectedFreeSymbols(
            f"{f} needs {f.arity} variables, got {len(p_vars)}"
        )
    body = Conj(Apply(f, tuple(so2_var(v) for v in p_vars)), psi)
    for v in reversed(p_vars):
        body = ExistsF(FuncSymbol(v, 0), body)
    return ExistsF(f, body)


# ---------------------------------------------------------------------------
# pass registry with size reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PassReport:
    name: str
    input_nodes: int
    output_nodes: int
    fresh_symbols: tuple[str, ...]
    fragment_before: Optional[FragmentClass]
    fragment_after: Optional[FragmentClass]
    bound: tuple[float, int]
    within_bound: bool


def _count(value) -> int:
    if isinstance(value, So2Formula):
        return so2_node_count(value)
    if isinstance(value, TeamFormula):
        return team_node_count(value)
    if isinstance(value, ModalFormula):
        return modal_node_count(value)
    if isinstance(value, AdqbfInstance):
        return (
            len(value.universals)
            + len(value.block_vars)
            + prop_node_count(value.matrix)
        )
    if isinstance(value, PropFormula):
        return prop_node_count(value)
    raise TypeError(f"no node count for {type(value).__name__}")


def _names_of(value) -> set[str]:
    if isinstance(value, So2Formula):
        return {s.name for s in so2_all_symbols(value)}
    if isinstance(value, TeamFormula):
        return set(team_all_vars(value))
    if isinstance(value, ModalFormula):
        return set()
    if isinstance(value, AdqbfInstance):
        return set(value.universals) | set(value.block_vars)
    return set()


@dataclass(frozen=True)
class PassSpec:
    name: str
    fn: Callable
    source: str  # input logic kind
    target: str
    bound: tuple[float, int]


PASS_TABLE: dict[str, PassSpec] = {}


def _register(name, fn, source, target, bound):
    PASS_TABLE[name] = PassSpec(name, fn, source, target, bound)


_register("simplify", simplify_applications, "so2", "so2", (8.0, 2))
_register("prenex-unique", to_prenex_unique, "so2", "so2", (20.0, 2))
_register("so2u-to-adqbf", so2u_to_adqbf, "so2", "adqbf", (12.0, 2))
_register("collapse", collapse_last_universal_block, "adqbf", "adqbf", (2.0, 1))
_register("adqbf-to-qptl-dep", adqbf_to_qptl_dep, "adqbf", "team", (10.0, 1))
_register("qptl-to-ptl-dep", qptl_dep_to_ptl_dep, "adqbf", "team", (12.0, 1))
_register("dep-to-unary", dep_to_unary, "team", "team", (14.0, 1))
_register("unary-dep-elim", unary_dep_elim, "team", "team", (8.0, 1))
_register("qplinc-to-minc", qplinc_to_minc, "team", "modal", (10.0, 2))
_register("pd-validity-wrapper", pd_validity_wrapper, "team", "team", (4.0, 1))
_register("team-to-so2", _team_to_so2_entry := (lambda phi, **kw: team_to_so2(
    phi, kw.get("p_vars") or tuple(sorted(team_free_vars(phi))), kw.get("gdas")
)), "team", "so2", (80.0, 2))
_register("close-sentence", close_sentence, "so2", "so2", (6.0, 1))


def run_pass(name: str, value, **kwargs) -> tuple[object, PassReport]:
    """Run a registered pass and report its size behaviour."""
    spec = PASS_TABLE[name]
    before_frag = classify_fragment(value) if isinstance(value, AdqbfInstance) else None
    in_nodes = _count(value)
    in_names = _names_of(value)
    out = spec.fn(value, **kwargs)
    after_frag = classify_fragment(out) if isinstance(out, AdqbfInstance) else None
    out_nodes = _count(out)
    fresh = tuple(sorted(_names_of(out) - in_names))
    c, d = spec.bound
    within = out_nodes <= c * max(in_nodes, 2) ** d
    report = PassReport(
        name,
        in_nodes,
        out_nodes,
        fresh,
        before_frag,
        after_frag,
        spec.bound,
        within,
    )
    return out, report
