import random

from tlwb.formulas import (
    BlockKind,
    DepAtom,
    GdaAtom,
    IncAtom,
    TAnd,
    TeamFormula,
    TExists,
    TForall,
    TLit,
    TNeg,
    TOr,
    team_node_count,
)
from tlwb.generate import (
    GenConfig,
    enum_prop_matrices,
    enum_qpl_formulas,
    gen_adqbf,
    gen_qpl,
    gen_swap_shape,
    gen_team,
    generate,
)


def test_determinism():
    cfg = GenConfig(seed=0, size=5, logic="so2")
    assert generate(cfg) == generate(cfg)
    assert generate(GenConfig(seed=1, size=5, logic="so2")) != generate(
        GenConfig(seed=2, size=5, logic="so2")
    )


def test_instances_satisfy_invariants():
    for seed in range(1, 101):
        rng = random.Random(seed)
        inst = gen_adqbf(rng, n_universals=2, matrix_size=5)
        # construction validates: alternation, constraints, declared vars
        for a, b in zip(inst.blocks, inst.blocks[1:]):
            assert a.kind != b.kind
        for v, deps in inst.constraints:
            assert deps <= set(inst.universals)


def test_force_last_union():
    for seed in range(60):
        rng = random.Random(seed)
        inst = gen_adqbf(rng, force_last_union=True)
        assert inst.blocks[-1].kind == BlockKind.UNION


def _atoms(phi):
    if isinstance(phi, (DepAtom, IncAtom, GdaAtom)):
        yield phi
    elif isinstance(phi, (TAnd, TOr)):
        yield from _atoms(phi.lhs)
        yield from _atoms(phi.rhs)
    elif isinstance(phi, TNeg):
        yield from _atoms(phi.sub)
    elif isinstance(phi, (TExists, TForall)):
        yield from _atoms(phi.body)


def test_atom_mix_respected():
    for seed in range(80):
        rng = random.Random(seed)
        phi = gen_team(rng, ["p", "q"], 8, {"dep": 1.0, "inc": 0.0})
        assert not any(isinstance(a, IncAtom) for a in _atoms(phi))
        rng = random.Random(seed)
        phi = gen_qpl(rng, ["p", "q"], 8)
        assert not list(_atoms(phi))
        assert not _has_sim(phi)


def _has_sim(phi):
    if isinstance(phi, TNeg):
        return True
    if isinstance(phi, (TAnd, TOr)):
        return _has_sim(phi.lhs) or _has_sim(phi.rhs)
    if isinstance(phi, (TExists, TForall)):
        return _has_sim(phi.body)
    return False


def test_swap_shapes_closed():
    from tlwb.formulas import so2_free_symbols

    for seed in range(60):
        rng = random.Random(seed)
        phi, x, f, kind = gen_swap_shape(rng)
        assert not so2_free_symbols(phi)
        assert kind in ("AE", "EA")


def test_enum_prop_matrices_counts():
    # literals for 1 variable: 2; sizes beyond: binary combinations only
    out = list(enum_prop_matrices(3, ["p"]))
    assert len(out) == 2 + 2 * 2 * 2


def test_enum_qpl_covers_all_small():
    out = list(enum_qpl_formulas(2, ["p"]))
    # size 1: p, -p; size 2: E/A over each
    assert TLit("p") in out and TLit("p", False) in out
    assert TExists("p", TLit("p")) in out and TForall("p", TLit("p", False)) in out
    assert all(team_node_count(phi) <= 2 for phi in out)
