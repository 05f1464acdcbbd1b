import itertools

import pytest

from tlwb.errors import ArityMismatch, BudgetExceeded, DefinitionMismatch, UnknownFamily
from tlwb.formulas import so2_node_count
from tlwb.gda import (
    Gda,
    builtin_constancy,
    builtin_dep,
    builtin_inclusion,
    check_agreement,
    dep_family_formula,
    gda_holds,
    translatable_family,
)
from tlwb.team_eval import team_from_code
from tlwb.teams import Relation, Team, all_assignments


class TestDepAtomFamily:
    def test_unary_is_constancy(self):
        dep1 = builtin_dep(1)
        assert gda_holds(dep1, Team.of(("p",), [(1,)]), ("p",))
        assert not gda_holds(dep1, all_assignments(("p",)), ("p",))

    def test_functional_membership(self):
        dep2 = builtin_dep(2)
        assert Relation(2, frozenset({(0, 0), (1, 1)})) in dep2.extension
        assert Relation(2, frozenset({(0, 0), (0, 1)})) not in dep2.extension

    def test_empty_relation_always_member(self):
        for n in range(1, 4):
            assert Relation(n, frozenset()) in builtin_dep(n).extension

    def test_empty_team_vacuous(self):
        assert gda_holds(builtin_dep(2), Team.empty(("p", "q")), ("p", "q"))

    def test_full_two_variable_team_fails(self):
        assert not gda_holds(builtin_dep(2), all_assignments(("p", "q")), ("p", "q"))


class TestAgreement:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_builtin_dep(self, n):
        assert check_agreement(builtin_dep(n))

    def test_builtin_constancy(self):
        assert check_agreement(builtin_constancy(1))
        assert check_agreement(builtin_constancy(2))

    def test_builtin_inclusion(self):
        assert check_agreement(builtin_inclusion(1))

    def test_corrupted_extension_detected(self):
        dep1 = builtin_dep(1)
        # full binary relation is not functional for arity 1 (both values)
        corrupted = Gda(
            "bad",
            1,
            dep1.extension | {Relation(1, frozenset({(0,), (1,)}))},
            dep1.definition,
        )
        assert not check_agreement(corrupted)

    def test_mismatch_raises_on_evaluation(self):
        dep1 = builtin_dep(1)
        corrupted = Gda(
            "bad",
            1,
            frozenset({Relation(1, frozenset({(0,), (1,)}))}),
            dep1.definition,
        )
        with pytest.raises(DefinitionMismatch):
            gda_holds(corrupted, all_assignments(("p",)), ("p",))

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            check_agreement(Gda("big", 4, None, dep_family_formula(4)))


class TestCustomAtoms:
    def test_parity_atom(self):
        even = Gda(
            "even",
            2,
            frozenset(
                Relation(2, frozenset(rel))
                for r in range(0, 5, 2)
                for rel in itertools.combinations(
                    list(itertools.product((0, 1), repeat=2)), r
                )
            ),
            None,
        )
        team = Team.of(("p", "q"), [(0, 0), (1, 1)])
        assert gda_holds(even, team, ("p", "q"))
        assert not gda_holds(even, Team.of(("p", "q"), [(0, 0)]), ("p", "q"))

    def test_arity_checked(self):
        with pytest.raises(ArityMismatch):
            gda_holds(builtin_dep(2), all_assignments(("p",)), ("p",))


class TestFamilies:
    def test_dep_family_structure(self):
        # arity 3: universally closed implication over x1..x3, y1..y3
        phi = translatable_family("dep")(3)
        assert so2_node_count(phi) > 0
        from tlwb.formulas import so2_free_symbols, FuncSymbol

        assert so2_free_symbols(phi) == {FuncSymbol("f", 3)}

    def test_unknown_family(self):
        with pytest.raises(UnknownFamily):
            translatable_family("zzz")

    def test_sizes_grow_linearly(self):
        # node counts for n = 1..8 fit a linear bound c*n
        sizes = [so2_node_count(dep_family_formula(n)) for n in range(1, 9)]
        assert all(b > a for a, b in zip(sizes, sizes[1:]))
        c = max(size / n for n, size in enumerate(sizes, start=1))
        assert sizes[-1] <= c * 8
        # emission is fast enough to time at this scale
        import time

        t0 = time.time()
        translatable_family("dep")(8)
        assert time.time() - t0 < 0.1

    def test_inclusion_family_agrees_with_atom(self):
        from tlwb.formulas import IncAtom
        from tlwb.team_eval import eval_team
        from tlwb.teams import char_table
        from tlwb.so2_eval import eval_so2
        from tlwb.gda import def_symbol

        phi = translatable_family("inclusion")(1)
        for code in range(16):
            team = team_from_code(code, ("p", "q"))
            lhs = eval_team(IncAtom(("p",), ("q",)), team)
            rhs = eval_so2(phi, {def_symbol(2): char_table(team, ("p", "q"))})
            assert lhs == (rhs == 1), code
