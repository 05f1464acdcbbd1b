"""Lax team semantics: defining-clause examples, laws, and the agreement
of the naive reference recursion with the tabled engine."""

import itertools
import random

import pytest

from tlwb.errors import (
    FreeVarOutsideDomain,
    NotASentence,
    NotFlatFragment,
    UnknownGda,
)
from tlwb.formulas import (
    DepAtom,
    GdaAtom,
    IncAtom,
    MAnd,
    MBox,
    MDiamond,
    MInc,
    MLit,
    MOr,
    TAnd,
    TExists,
    TForall,
    TLit,
    TNeg,
    TOr,
)
from tlwb.gda import Gda, builtin_dep
from tlwb.generate import gen_qpd, gen_qpl, gen_qplinc, gen_team
from tlwb.team_eval import (
    TableContext,
    check_flatness,
    eval_minc,
    eval_qpl_row,
    eval_team,
    is_true_sentence_team,
    team_from_code,
    team_satisfiable,
    team_truth_table,
    team_valid,
)
from tlwb.teams import KripkeModel, Relation, Team, all_assignments


class TestDefiningClauses:
    def test_empty_team_satisfies_literal(self):
        assert eval_team(TLit("p"), Team.empty(("p",)))

    def test_full_team_fails_dependence(self):
        assert not eval_team(DepAtom(("p",), "q"), all_assignments(("p", "q")))

    def test_singleton_satisfies_constancy(self):
        assert eval_team(DepAtom((), "q"), Team.of(("q",), [(1,)]))

    def test_inclusion_brute(self):
        team = Team.of(("p", "q"), [(0, 0), (1, 1)])
        atom = IncAtom(("p",), ("q",))
        # brute-force check of the forall-exists condition
        rows = list(team.rows)
        expected = all(
            any(s[0] == t[1] for t in rows) for s in rows
        )
        assert eval_team(atom, team) is expected is True

    def test_dep_then_flip_sentence(self):
        body = TAnd(
            DepAtom(("p",), "q"),
            TOr(TAnd(TLit("q"), TLit("p", False)), TAnd(TLit("q", False), TLit("p"))),
        )
        sent = TForall("p", TExists("q", body))
        assert is_true_sentence_team(sent)

    def test_split_by_value(self):
        sent = TForall("p", TOr(TLit("p"), TLit("p", False)))
        assert is_true_sentence_team(sent)

    def test_contradiction_only_empty(self):
        # E p (p & -p): every choice makes a nonempty team that fails
        sent = TExists("p", TAnd(TLit("p"), TLit("p", False)))
        assert not is_true_sentence_team(sent)

    def test_free_variable_outside_domain(self):
        with pytest.raises(FreeVarOutsideDomain):
            eval_team(TNeg(TAnd(TLit("z"), TLit("z", False))), Team.unit())

    def test_unknown_gda(self):
        with pytest.raises(UnknownGda):
            eval_team(GdaAtom("nope", ("p",)), all_assignments(("p",)))

    def test_sentence_requires_closed(self):
        with pytest.raises(NotASentence):
            is_true_sentence_team(TLit("p"))


def _enum_formulas(max_nodes, vars_, leaves, quantify=True):
    by_size = {1: list(leaves)}
    yield from by_size[1]
    for k in range(2, max_nodes + 1):
        out = []
        for phi in by_size[k - 1]:
            out.append(TNeg(phi))
            if quantify:
                for v in vars_:
                    out.append(TExists(v, phi))
                    out.append(TForall(v, phi))
        for i in range(1, k - 1):
            for lhs in by_size[i]:
                for rhs in by_size[k - 1 - i]:
                    out.append(TAnd(lhs, rhs))
                    out.append(TOr(lhs, rhs))
        by_size[k] = out
        yield from out


class TestNaiveTableAgreement:
    def test_exhaustive_small(self):
        vars_ = ("p", "q")
        leaves = [
            TLit("p"),
            TLit("q", False),
            DepAtom((), "q"),
            DepAtom(("p",), "q"),
            IncAtom(("p",), ("q",)),
        ]
        checked = 0
        ctx = TableContext()
        for phi in _enum_formulas(4, vars_, leaves):
            for code in range(16):
                team = team_from_code(code, vars_)
                naive = eval_team(phi, team, mode="naive")
                table = eval_team(phi, team, mode="table", ctx=ctx)
                assert naive == table, (phi, code)
                checked += 1
        assert checked > 10_000

    def test_seeded_larger(self):
        gdas = {"dep2": builtin_dep(2)}
        for seed in range(120):
            rng = random.Random(seed)
            phi = gen_team(
                rng,
                ["p", "q"],
                rng.randint(4, 7),
                {"inc": 1.0, "gda": 1.0},
                gda_names=[("dep2", 2)],
            )
            code = random.Random(seed + 10_000).randrange(16)
            team = team_from_code(code, ("p", "q"))
            assert eval_team(phi, team, gdas, mode="naive") == eval_team(
                phi, team, gdas, mode="table"
            ), (seed, phi)


class TestLaws:
    def test_flatness_seeded(self):
        for seed in range(300):
            rng = random.Random(seed)
            phi = gen_qpl(rng, ["p", "q", "r"], rng.randint(1, 6))
            code = random.Random(seed + 5_000).randrange(256)
            team = team_from_code(code, ("p", "q", "r"))
            assert check_flatness(phi, team), (seed, phi)

    def test_check_flatness_rejects_atoms(self):
        with pytest.raises(NotFlatFragment):
            check_flatness(DepAtom((), "p"), all_assignments(("p",)))

    def test_downward_closure_seeded(self):
        for seed in range(120):
            rng = random.Random(seed)
            phi = gen_qpd(rng, ["p", "q"], rng.randint(1, 5))
            table = team_truth_table(phi, ("p", "q"))
            for code in range(16):
                if not table[code]:
                    continue
                for sub in range(16):
                    if sub & code == sub:
                        assert table[sub], (seed, phi, code, sub)

    def test_union_closure_seeded(self):
        for seed in range(120):
            rng = random.Random(seed)
            phi = gen_qplinc(rng, ["p", "q"], rng.randint(1, 5))
            table = team_truth_table(phi, ("p", "q"))
            sat = [c for c in range(16) if table[c]]
            for a in sat:
                for b in sat:
                    assert table[a | b], (seed, phi, a, b)

    def test_empty_team_property(self):
        for seed in range(150):
            rng = random.Random(seed)
            phi = gen_team(rng, ["p", "q"], rng.randint(1, 6), {"sim": 0.0, "inc": 1.0})
            assert eval_team(phi, Team.empty(("p", "q")))

    def test_strong_negation_involution(self):
        for seed in range(100):
            rng = random.Random(seed)
            phi = gen_team(rng, ["p", "q"], rng.randint(1, 5), {"inc": 0.5})
            code = random.Random(seed + 1).randrange(16)
            team = team_from_code(code, ("p", "q"))
            assert eval_team(TNeg(TNeg(phi)), team) == eval_team(phi, team)

    def test_gda_agrees_with_native_dep(self):
        gdas = {"dep2": builtin_dep(2), "dep3": builtin_dep(3)}
        for code in range(256):
            team = team_from_code(code, ("p", "q", "r"))
            assert eval_team(GdaAtom("dep2", ("p", "q")), team, gdas) == eval_team(
                DepAtom(("p",), "q"), team
            )
            assert eval_team(GdaAtom("dep3", ("p", "q", "r")), team, gdas) == eval_team(
                DepAtom(("p", "q"), "r"), team
            )


class TestDecisionProcedures:
    def test_dep_sat_not_valid(self):
        atom = DepAtom(("p",), "q")
        assert team_satisfiable(atom)
        assert not team_valid(atom)

    def test_contradiction_unsat(self):
        assert not team_satisfiable(TAnd(TLit("p"), TLit("p", False)))

    def test_sim_contradiction_sat(self):
        # any nonempty team works; exhaustive over the 3 nonempty teams
        phi = TNeg(TAnd(TLit("p"), TLit("p", False)))
        assert team_satisfiable(phi)
        for code in range(1, 4):
            assert eval_team(phi, team_from_code(code, ("p",)))

    def test_modes_agree(self):
        phi = TOr(DepAtom((), "p"), DepAtom((), "q"))
        assert team_satisfiable(phi, mode="table") == team_satisfiable(phi, mode="naive")
        assert team_valid(phi, mode="table") == team_valid(phi, mode="naive")


class TestMinc:
    def _chain(self):
        return KripkeModel.of(
            ["w", "v"], [("w", "v")], {"v": {"p"}}
        )

    def test_empty_team_vacuous(self):
        m = self._chain()
        assert eval_minc(MLit("p"), m, frozenset())

    def test_no_successors(self):
        m = KripkeModel.of(["w"], [], {"w": {"p"}})
        assert eval_minc(MBox(MLit("p")), m, {"w"})
        assert not eval_minc(MDiamond(MLit("p")), m, {"w"})

    def test_single_choice_diamond(self):
        assert eval_minc(MDiamond(MLit("p")), self._chain(), {"w"})

    def test_inc_atom(self):
        m = KripkeModel.of(["a", "b"], [], {"a": {"p"}, "b": {"q"}})
        assert eval_minc(MInc(("p",), ("q",)), m, {"a", "b"})
        assert not eval_minc(MInc(("p",), ("q",)), m, {"a"})

    def test_unknown_world(self):
        from tlwb.errors import UnknownWorld

        with pytest.raises(UnknownWorld):
            eval_minc(MLit("p"), self._chain(), {"zzz"})

    def test_flatness_of_inc_free(self):
        # team satisfaction of inclusion-free formulas is rowwise; compare
        # the generic clauses (flat path disabled) against per-world truth
        from tlwb.passes import canonical_tree_model

        model = canonical_tree_model(["p1", "p2"])
        shapes = [
            MLit("p1"),
            MAnd(MDiamond(MLit("p1")), MDiamond(MLit("p1", False))),
            MOr(MBox(MLit("p2")), MLit("p1")),
            MDiamond(MOr(MLit("p1"), MLit("p2", False))),
        ]
        worlds = sorted(model.worlds)
        for phi in shapes:
            for k in range(0, len(worlds), 2):
                team = frozenset(worlds[: k + 1])
                slow = eval_minc(phi, model, team, use_flatness=False)
                rowwise = all(
                    eval_minc(phi, model, frozenset([w]), use_flatness=False)
                    for w in team
                )
                fast = eval_minc(phi, model, team, use_flatness=True)
                assert slow == rowwise == fast, (phi, team)
