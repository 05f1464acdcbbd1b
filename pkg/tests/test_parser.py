import random

import pytest

from tlwb.errors import ArityError, ParseError
from tlwb.formulas import (
    Apply,
    BlockKind,
    DepAtom,
    ExistsF,
    FuncSymbol,
    Neg,
    TNeg,
    so2_forall,
    so2_iff,
)
from tlwb.gda import builtin_dep, check_agreement
from tlwb.generate import GenConfig, gen_adqbf, gen_prop, gen_so2_closed, gen_team, generate
from tlwb.parser import load_gdas, load_kripke, load_team, parse, tokenize
from tlwb.printer import print_value
from tlwb.teams import Team


class TestExamples:
    def test_so2_example(self):
        phi = parse("so2", "E f/1. A x. (f(x) <-> -x)")
        f, x = FuncSymbol("f", 1), FuncSymbol("x", 0)
        expected = ExistsF(
            f, so2_forall(x, so2_iff(Apply(f, (Apply(x),)), Neg(Apply(x))))
        )
        assert phi == expected

    def test_adqbf_example(self):
        inst = parse("adqbf", "A x ; U y{x} E z{x} ; (-y <-> z)")
        assert inst.universals == ("x",)
        assert [b.kind for b in inst.blocks] == [BlockKind.UNION, BlockKind.EXISTS]
        assert inst.constraint_of("y") == {"x"}

    def test_team_strong_negation_over_dep(self):
        phi = parse("team", "~ dep(p, q)")
        assert phi == TNeg(DepAtom(("p",), "q"))

    def test_errors_carry_spans(self):
        with pytest.raises(ParseError) as exc:
            parse("so2", "E f/1. (f(x) &")
        assert exc.value.span is not None

    def test_arity_conflict(self):
        with pytest.raises(ArityError):
            parse("so2", "f(x) & f(x, y)")

    def test_arity_conflict_against_binder(self):
        with pytest.raises(ArityError):
            parse("so2", "E f/1. f(x, y)")

    def test_duplicate_instance_variable(self):
        from tlwb.errors import DuplicateQuantifiedVariable

        with pytest.raises(DuplicateQuantifiedVariable):
            parse("adqbf", "A p ; E p{} ; p")


class TestRoundTrips:
    @pytest.mark.parametrize("logic", ["so2", "prop", "team", "adqbf"])
    def test_seeded_round_trips(self, logic):
        for seed in range(300):
            rng = random.Random(seed)
            if logic == "so2":
                value = gen_so2_closed(rng, rng.randint(2, 8))
            elif logic == "prop":
                value = gen_prop(rng, ["p", "q", "r"], rng.randint(1, 8))
            elif logic == "team":
                value = gen_team(rng, ["p", "q", "r"], rng.randint(1, 8), {"inc": 1.0})
            else:
                value = gen_adqbf(rng, n_universals=rng.randint(1, 3), matrix_size=5)
            printed = print_value(value)
            assert parse(logic, printed) == value, (logic, seed, printed)

    def test_modal_round_trips(self):
        from tlwb.passes import qplinc_to_minc
        from tlwb.generate import gen_qplinc_prenex

        for seed in range(120):
            rng = random.Random(seed)
            phi = gen_qplinc_prenex(rng, rng.randint(1, 3), 4)
            value = qplinc_to_minc(phi)
            assert parse("modal", print_value(value)) == value, seed


class TestTotality:
    def test_random_bytes_never_crash(self):
        rng = random.Random(0)
        alphabet = "EAU pqr fg01(){};,.&|<->-~[]#/:xyz\n\t"
        for _ in range(3000):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 30)))
            for logic in ("so2", "prop", "team", "modal", "adqbf"):
                try:
                    parse(logic, text)
                except ParseError:
                    pass
                except (ArityError,) as exc:
                    pass
                except Exception as exc:  # pragma: no cover
                    from tlwb.errors import WorkbenchError

                    assert isinstance(exc, WorkbenchError), (text, logic, exc)

    def test_unexpected_character(self):
        with pytest.raises(ParseError):
            tokenize("p $ q")


class TestFiles:
    def test_team_file(self):
        team = load_team("# comment\np q\n0 1\n10\n")
        assert team == Team.of(("p", "q"), [(0, 1), (1, 0)])

    def test_duplicate_row_rejected(self):
        with pytest.raises(ParseError):
            load_team("p\n0\n0\n")

    def test_row_width_checked(self):
        with pytest.raises(ParseError):
            load_team("p q\n011\n")

    def test_kripke_file(self):
        model, team = load_kripke(
            "worlds: a b\nedge: a b\nval: b p q\nteam: a\n"
        )
        assert model.successors("a") == ("b",)
        assert model.props_at("b") == {"p", "q"}
        assert team == {"a"}

    def test_gda_file_extension(self):
        reg = load_gdas("gda tiny 1\nrel:\nrel: 0 1\n")
        gda = reg["tiny"]
        assert gda.arity == 1 and len(gda.extension) == 2

    def test_gda_file_definition(self):
        text = (
            "gda mydep 2\n"
            "def: A x1. A x2. A y1. A y2. "
            "((f(x1, x2) & f(y1, y2) & (x1 <-> y1)) -> (x2 <-> y2))\n"
        )
        reg = load_gdas(text)
        gda = reg["mydep"]
        assert gda.definition is not None
        merged = type(gda)(
            gda.name, gda.arity, builtin_dep(2).extension, gda.definition
        )
        assert check_agreement(merged)


def test_generate_dispatch_round_trip():
    for logic in ("so2", "prop", "team", "adqbf"):
        cfg = GenConfig(seed=5, size=6, logic=logic)
        v1, v2 = generate(cfg), generate(cfg)
        assert v1 == v2
        assert parse(logic, print_value(v1)) == v1
