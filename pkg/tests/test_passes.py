"""Per-pass contracts: the worked examples, shape errors, and freshness."""

import itertools
import random

import pytest

from tlwb.adqbf_eval import eval_adqbf
from tlwb.budget import StepBudget
from tlwb.errors import (
    EmptyUniversalPrefix,
    EmptyVarList,
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
from tlwb.formulas import (
    AdqbfInstance,
    Apply,
    BlockKind,
    Conj,
    DepAtom,
    ExistsF,
    FragmentKind,
    FuncSymbol,
    GdaAtom,
    IncAtom,
    Neg,
    PropLit,
    TAnd,
    TExists,
    TForall,
    TLit,
    TNeg,
    TOr,
    classify_fragment,
    has_unique_args,
    is_prenex,
    is_simple,
    make_instance,
    prop_iff,
    so2_forall,
    so2_free_symbols,
    so2_iff,
    so2_var,
    team_all_vars,
    team_free_vars,
)
from tlwb.generate import gen_adqbf, gen_pd, gen_so2_closed
from tlwb.passes import (
    adqbf_to_qptl,
    adqbf_to_qptl_dep,
    build_max,
    canonical_tree_model,
    close_sentence,
    collapse_last_universal_block,
    dep_to_unary,
    pd_validity_wrapper,
    qplinc_to_minc,
    qptl_dep_to_ptl_dep,
    run_pass,
    simplify_applications,
    so2u_to_adqbf,
    swap_quantifier,
    team_to_so2,
    to_prenex_unique,
    tree_formula,
    unary_dep_elim,
)
from tlwb.so2_eval import eval_so2, is_true
from tlwb.team_eval import (
    TableContext,
    eval_minc,
    eval_team,
    is_true_sentence_team,
    team_from_code,
    team_satisfiable,
    team_valid,
)
from tlwb.teams import all_assignments


class TestSwapQuantifier:
    def test_example_shape(self):
        x, f = FuncSymbol("x", 0), FuncSymbol("f", 1)
        phi = so2_forall(x, ExistsF(f, so2_iff(Apply(f, (Apply(x),)), Apply(x))))
        out = swap_quantifier(phi, x, f)
        assert isinstance(out, ExistsF) and out.sym.arity == 2
        # f'(x, x) appears in the body
        found = []

        def walk(n):
            if isinstance(n, Apply):
                if n.sym.arity == 2:
                    found.append(n)
                for a in n.args:
                    walk(a)
            elif isinstance(n, Neg):
                walk(n.sub)
            elif isinstance(n, Conj):
                walk(n.lhs)
                walk(n.rhs)
            elif isinstance(n, ExistsF):
                walk(n.body)

        walk(out)
        assert found and all(a.args[0] == Apply(x) for a in found)
        assert is_true(phi) == is_true(out)

    def test_shape_mismatch(self):
        x, f = FuncSymbol("x", 0), FuncSymbol("f", 1)
        with pytest.raises(ShapeMismatch):
            swap_quantifier(ExistsF(f, Apply(x)), x, f)

    def test_rebinding_rejected(self):
        x, f = FuncSymbol("x", 0), FuncSymbol("f", 1)
        phi = so2_forall(x, ExistsF(f, ExistsF(f, Apply(f, (Apply(x),)))))
        with pytest.raises(SymbolClash):
            swap_quantifier(phi, x, f)


class TestSimplify:
    def test_nested_application(self):
        f, g = FuncSymbol("f", 1), FuncSymbol("g", 1)
        x = so2_var("x")
        phi = Apply(f, (Apply(g, (x,)),))
        out = simplify_applications(phi)
        assert is_simple(out)
        # Ab((b <-> g(x)) -> f(b))
        assert isinstance(out, Neg)

    def test_already_simple_unchanged(self):
        f = FuncSymbol("f", 1)
        phi = Apply(f, (so2_var("x"),))
        assert simplify_applications(phi) == phi

    def test_doubly_nested_equivalent(self):
        f, g, h = FuncSymbol("f", 1), FuncSymbol("g", 1), FuncSymbol("h", 1)
        x = so2_var("x")
        phi = Apply(f, (Apply(g, (Apply(h, (x,)),)),))
        out = simplify_applications(phi)
        assert is_simple(out)
        from tlwb.so2_eval import all_tables

        frees = sorted(so2_free_symbols(phi), key=lambda s: s.name)
        for combo in itertools.product(*[list(all_tables(s.arity)) for s in frees]):
            interp = dict(zip(frees, combo))
            assert eval_so2(phi, interp) == eval_so2(out, interp)


class TestPrenexUnique:
    def test_requires_closed(self):
        f = FuncSymbol("f", 1)
        with pytest.raises(NotClosed):
            to_prenex_unique(ExistsF(f, Apply(f, (so2_var("x"),))))

    def test_single_tuple_no_split(self):
        f, x = FuncSymbol("f", 1), FuncSymbol("x", 0)
        app = Apply(f, (Apply(x),))
        phi = ExistsF(f, so2_forall(x, Conj(app, app)))
        out = to_prenex_unique(phi)
        assert is_simple(out) and is_prenex(out) and has_unique_args(out)
        # no second copy of f introduced
        assert len({s for s in _symbols(out) if s.arity == 1}) == 1

    def test_split_two_tuples(self):
        f, x, y = FuncSymbol("f", 1), FuncSymbol("x", 0), FuncSymbol("y", 0)
        phi = ExistsF(
            f,
            so2_forall(
                x,
                so2_forall(
                    y,
                    so2_iff(Apply(f, (Apply(x),)), Neg(Apply(f, (Apply(y),)))),
                ),
            ),
        )
        out = to_prenex_unique(phi)
        assert is_simple(out) and is_prenex(out) and has_unique_args(out)
        assert is_true(phi) == is_true(out) == False

    def test_seeded_preserves_truth(self):
        checked = 0
        for seed in range(60):
            rng = random.Random(seed)
            phi = gen_so2_closed(rng, rng.randint(3, 7), n_proper=1, max_arity=2)
            out = to_prenex_unique(phi)
            assert is_simple(out) and is_prenex(out) and has_unique_args(out)
            from tlwb.so2_eval import enumeration_cost

            if enumeration_cost(out) > 20_000_000:
                continue
            assert is_true(phi) == is_true(out), seed
            checked += 1
        assert checked >= 40


def _symbols(phi):
    from tlwb.formulas import so2_all_symbols

    return so2_all_symbols(phi)


class TestSo2uToAdqbf:
    def test_example_negation_instance(self):
        g, h, x = FuncSymbol("g", 1), FuncSymbol("h", 1), FuncSymbol("x", 0)
        phi = so2_forall(
            g,
            ExistsF(
                h,
                so2_forall(
                    x,
                    so2_iff(Apply(h, (Apply(x),)), Neg(Apply(g, (Apply(x),)))),
                ),
            ),
        )
        inst = so2u_to_adqbf(phi)
        assert inst.universals == ("x",)
        assert [b.kind for b in inst.blocks] == [BlockKind.UNION, BlockKind.EXISTS]
        assert inst.constraint_of("g") == {"x"}
        assert inst.constraint_of("h") == {"x"}
        assert eval_adqbf(inst) is True

    def test_pure_propositional(self):
        p, q = FuncSymbol("p", 0), FuncSymbol("q", 0)
        phi = so2_forall(p, ExistsF(q, so2_iff(Apply(q), Apply(p))))
        inst = so2u_to_adqbf(phi)
        assert inst.universals == ("p",)
        assert len(inst.blocks) == 1 and inst.blocks[0].kind == BlockKind.EXISTS
        assert inst.constraint_of("q") == {"p"}
        assert eval_adqbf(inst) is True

    def test_not_normalized_rejected(self):
        f = FuncSymbol("f", 1)
        g = FuncSymbol("g", 1)
        phi = ExistsF(f, Apply(f, (Apply(g, (so2_var("x"),)),)))
        with pytest.raises(NotNormalized):
            so2u_to_adqbf(phi)

    def test_seeded_truth_preserved(self):
        from tlwb.budget import StepBudget
        from tlwb.errors import BudgetExceeded
        from tlwb.so2_eval import enumeration_cost

        checked = 0
        for seed in range(80):
            rng = random.Random(seed)
            phi = to_prenex_unique(
                gen_so2_closed(rng, rng.randint(3, 6), n_proper=1, max_arity=2)
            )
            if enumeration_cost(phi) > 20_000_000:
                continue
            inst = so2u_to_adqbf(phi)
            try:
                truth = eval_adqbf(inst)
            except BudgetExceeded:
                continue
            assert is_true(phi) == truth, seed
            checked += 1
        assert checked >= 50


class TestCollapse:
    def test_display_example(self):
        inst = make_instance(
            ["p"],
            [(BlockKind.EXISTS, ["q"]), (BlockKind.UNION, ["r"])],
            prop_iff(PropLit("q"), PropLit("r")),
            {"q": {"p"}, "r": {"p"}},
        )
        out = collapse_last_universal_block(inst)
        assert out.universals == ("p", "r")
        assert [b.kind for b in out.blocks] == [BlockKind.EXISTS]
        assert out.constraint_of("q") == {"p"}
        assert classify_fragment(out).level == classify_fragment(inst).level - 1
        assert eval_adqbf(inst) == eval_adqbf(out)

    def test_empty_union_block(self):
        inst = make_instance(
            ["p"],
            [(BlockKind.EXISTS, ["q"]), (BlockKind.UNION, [])],
            PropLit("q"),
            {"q": set()},
        )
        out = collapse_last_universal_block(inst)
        assert out.universals == ("p",)
        assert len(out.blocks) == 1

    def test_rejects_exists_tail(self):
        inst = make_instance(
            ["p"], [(BlockKind.EXISTS, ["q"])], PropLit("q"), {"q": set()}
        )
        with pytest.raises(LastBlockNotUnion):
            collapse_last_universal_block(inst)


class TestAdqbfToQptlDep:
    def test_pure_dqbf_shape(self):
        inst = make_instance(
            ["p"],
            [(BlockKind.EXISTS, ["q"])],
            prop_iff(PropLit("q"), PropLit("p")),
            {"q": {"p"}},
        )
        out = adqbf_to_qptl_dep(inst)
        # Ap Eq ( ~[~(p & -p)] | [dep(p;q) & theta] )
        assert isinstance(out, TForall) and isinstance(out.body, TExists)
        body = out.body.body
        assert isinstance(body, TOr)
        assert isinstance(body.lhs, TNeg)
        assert isinstance(body.rhs, TAnd) and body.rhs.lhs == DepAtom(("p",), "q")
        assert is_true_sentence_team(out) == eval_adqbf(inst) is True

    def test_union_dep_in_guard(self):
        inst = make_instance(
            ["x"],
            [(BlockKind.UNION, ["y"]), (BlockKind.EXISTS, ["z"])],
            prop_iff(PropLit("y", False), PropLit("z")),
            {"y": {"x"}, "z": {"x"}},
        )
        out = adqbf_to_qptl_dep(inst)
        body = out
        while isinstance(body, (TForall, TExists, TNeg)):
            body = body.body if not isinstance(body, TNeg) else body.sub
        assert is_true_sentence_team(out) == eval_adqbf(inst) is True

    def test_requires_universal(self):
        inst = make_instance(
            [], [(BlockKind.EXISTS, ["q"])], PropLit("q"), {"q": set()}
        )
        with pytest.raises(EmptyUniversalPrefix):
            adqbf_to_qptl_dep(inst)

    def test_seeded_truth(self):
        for seed in range(100):
            rng = random.Random(seed)
            inst = gen_adqbf(rng, n_universals=rng.randint(1, 2), matrix_size=4)
            out = adqbf_to_qptl_dep(inst)
            assert eval_adqbf(inst) == is_true_sentence_team(out), seed


class TestBuildMax:
    def test_unary(self):
        phi = build_max(["p"])
        assert phi == TNeg(DepAtom((), "p"))
        # holds iff the team realizes both values of p
        assert eval_team(phi, all_assignments(("p",)))
        assert not eval_team(phi, team_from_code(1, ("p",)))

    def test_full_team(self):
        assert eval_team(build_max(["p", "q"]), all_assignments(("p", "q")))

    def test_characterization_exhaustive(self):
        phi = build_max(["p", "q"])
        for code in range(16):
            team = team_from_code(code, ("p", "q"))
            expected = len(team.rows) == 4
            assert eval_team(phi, team) == expected, code

    def test_empty_rejected(self):
        with pytest.raises(EmptyVarList):
            build_max([])


class TestQuantifierElimination:
    def test_display_shape(self):
        inst = make_instance(
            ["p"],
            [(BlockKind.EXISTS, ["q"])],
            prop_iff(PropLit("q"), PropLit("p")),
            {"q": {"p"}},
        )
        out = qptl_dep_to_ptl_dep(inst)
        assert isinstance(out, TAnd)
        assert out.lhs == build_max(["p", "q"])
        elim = out.rhs
        assert isinstance(elim, TOr) and elim.lhs == DepAtom(("p",), "q")
        assert isinstance(elim.rhs, TAnd) and elim.rhs.lhs == DepAtom(("p",), "q")
        assert team_satisfiable(out) == eval_adqbf(inst) is True

    def test_union_layer_shape(self):
        inst = make_instance(
            ["p"],
            [(BlockKind.UNION, ["q"])],
            PropLit("q"),
            {"q": set()},
        )
        out = qptl_dep_to_ptl_dep(inst)
        elim = out.rhs
        assert isinstance(elim, TNeg) and isinstance(elim.sub, TOr)
        assert team_satisfiable(out) == eval_adqbf(inst) is False

    def test_seeded_satisfiability(self):
        for seed in range(100):
            rng = random.Random(seed)
            inst = gen_adqbf(rng, n_universals=rng.randint(1, 2), matrix_size=4)
            out = qptl_dep_to_ptl_dep(inst)
            assert eval_adqbf(inst) == team_satisfiable(out), seed


class TestDepRewrites:
    def test_unary_elim_display(self):
        out = unary_dep_elim(DepAtom((), "q"))
        assert out == TNeg(TAnd(TNeg(TLit("q")), TNeg(TLit("q", False))))

    def test_no_atoms_unchanged(self):
        phi = TOr(TLit("p"), TLit("q", False))
        assert dep_to_unary(phi) == phi
        assert unary_dep_elim(phi) == phi

    def test_binary_gadget_exhaustive(self):
        atom = DepAtom(("p",), "q")
        gadget = dep_to_unary(atom, "r")
        assert team_free_vars(gadget) == {"p", "q", "r"}
        for code in range(256):
            team = team_from_code(code, ("p", "q", "r"))
            assert eval_team(atom, team) == eval_team(gadget, team), code

    def test_unary_elim_exhaustive(self):
        atom = DepAtom((), "q")
        gadget = unary_dep_elim(atom)
        for code in range(16):
            team = team_from_code(code, ("q", "r"))
            assert eval_team(atom, team) == eval_team(gadget, team), code

    def test_symbol_clash(self):
        with pytest.raises(SymbolClash):
            dep_to_unary(DepAtom(("p",), "q"), "p")

    def test_atom_free_sentence(self):
        from tlwb.budget import StepBudget
        from tlwb.errors import BudgetExceeded

        checked = 0
        for seed in range(40):
            rng = random.Random(seed)
            inst = gen_adqbf(rng, n_universals=rng.randint(1, 2), matrix_size=3)
            out = adqbf_to_qptl(inst)

            def no_atoms(f):
                if isinstance(f, (DepAtom, IncAtom, GdaAtom)):
                    return False
                if isinstance(f, (TAnd, TOr)):
                    return no_atoms(f.lhs) and no_atoms(f.rhs)
                if isinstance(f, TNeg):
                    return no_atoms(f.sub)
                if isinstance(f, (TExists, TForall)):
                    return no_atoms(f.body)
                return True

            assert no_atoms(out), seed
            # five-variable images fall to the naive engine, whose budget
            # caps the desk-scale check; within-budget seeds must agree
            try:
                truth = is_true_sentence_team(out, budget=StepBudget(200_000))
            except BudgetExceeded:
                continue
            assert eval_adqbf(inst) == truth, seed
            checked += 1
        assert checked >= 20


class TestQplincToMinc:
    def test_n1_display(self):
        phi = TExists("p1", IncAtom(("p1",), ("p1",)))
        out = qplinc_to_minc(phi)
        from tlwb.formulas import MAnd, MDiamond, MInc, MLit

        assert out == MAnd(
            MAnd(MDiamond(MLit("p1")), MDiamond(MLit("p1", False))),
            MDiamond(MInc(("p1",), ("p1",))),
        )

    def test_tree_two_levels(self):
        from tlwb.formulas import MAnd, MBox

        t = tree_formula(["p1", "p2"])
        assert isinstance(t, MAnd)
        assert isinstance(t.rhs, MBox)

    def test_not_prenex_rejected(self):
        with pytest.raises(NotPrenex):
            qplinc_to_minc(TExists("p", TExists("p", TLit("p"))))
        with pytest.raises(NotPrenex):
            qplinc_to_minc(TExists("p", TNeg(TLit("p"))))

    def test_tree_satisfied_at_root(self):
        for n in range(1, 5):
            model = canonical_tree_model(n)
            assert eval_minc(tree_formula([f"p{i}" for i in range(1, n + 1)]), model, {"w"})

    def test_model_shape(self):
        m0 = canonical_tree_model(0)
        assert len(m0.worlds) == 1 and not m0.edges
        m1 = canonical_tree_model(1)
        assert len(m1.worlds) == 3 and len(m1.edges) == 2
        m3 = canonical_tree_model(3)
        assert len(m3.worlds) == 15

    def test_unfixed_valuation_immaterial(self):
        phi = TForall("p1", TExists("p2", IncAtom(("p1",), ("p2",))))
        out = qplinc_to_minc(phi)
        for unfixed in (0, 1):
            model = canonical_tree_model(["p1", "p2"], unfixed_value=unfixed)
            assert eval_minc(out, model, {"w"}) == is_true_sentence_team(phi)


class TestPdValidityWrapper:
    def test_dep_atom_wrapper_false(self):
        out = pd_validity_wrapper(DepAtom(("p",), "q"))
        assert out == TForall("p", TForall("q", DepAtom(("p",), "q")))
        assert not is_true_sentence_team(out)

    def test_tautology_true(self):
        out = pd_validity_wrapper(TOr(TLit("p"), TLit("p", False)))
        assert is_true_sentence_team(out)

    def test_fragment_enforced(self):
        with pytest.raises(WrongFragment):
            pd_validity_wrapper(TNeg(TLit("p")))
        with pytest.raises(WrongFragment):
            pd_validity_wrapper(TExists("p", TLit("p")))

    def test_seeded_matches_validity(self):
        for seed in range(120):
            rng = random.Random(seed)
            phi = gen_pd(rng, ["p1", "p2", "p3"], rng.randint(1, 5))
            out = pd_validity_wrapper(phi)
            assert is_true_sentence_team(out) == team_valid(phi), seed


class TestTeamToSo2:
    def test_literal_case_shape(self):
        psi = team_to_so2(TLit("p"), ("p",))
        (fsym,) = so2_free_symbols(psi)
        assert fsym.arity == 1

    def test_strong_negation_is_classical_negation(self):
        psi = team_to_so2(TNeg(TLit("p")), ("p",))
        assert isinstance(psi, Neg)

    def test_undefinable_gda(self):
        from tlwb.gda import Gda
        from tlwb.teams import Relation

        ext_only = Gda("e", 1, frozenset({Relation(1, frozenset())}), None)
        with pytest.raises(UndefinableGda):
            team_to_so2(GdaAtom("e", ("p",)), ("p",), {"e": ext_only})

    def test_symbol_clash(self):
        with pytest.raises(SymbolClash):
            team_to_so2(TLit("p"), ("p",), f=FuncSymbol("p", 1))


class TestCloseSentence:
    def test_needs_exactly_one_free(self):
        with pytest.raises(UnexpectedFreeSymbols):
            close_sentence(Conj(so2_var("a"), so2_var("b")))

    def test_closes(self):
        psi = team_to_so2(TLit("p"), ("p",))
        out = close_sentence(psi, ("p",))
        assert not so2_free_symbols(out)
        assert is_true(out)


class TestRunPass:
    def test_report_fields(self):
        inst = make_instance(
            ["p"],
            [(BlockKind.EXISTS, ["q"]), (BlockKind.UNION, ["r"])],
            PropLit("q"),
            {"q": {"p"}, "r": set()},
        )
        out, report = run_pass("collapse", inst)
        assert report.name == "collapse"
        assert report.fragment_before.level == 2
        assert report.fragment_after.level == 1
        assert report.within_bound

    def test_freshness_no_capture(self):
        for seed in range(60):
            rng = random.Random(seed)
            inst = gen_adqbf(rng, n_universals=2, matrix_size=4)
            out, report = run_pass("adqbf-to-qptl-dep", inst)
            for fresh in report.fresh_symbols:
                assert fresh not in set(inst.universals) | set(inst.block_vars)
