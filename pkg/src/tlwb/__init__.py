"""tlwb: a workbench for quantified propositional logics.

Parses, evaluates, and translates between second-order propositional
logic, (alternating) dependency-quantified Boolean formulae, and
team-semantics logics with dependence, inclusion, and generalized atoms,
with exhaustive desk-scale oracles checking that every translation
preserves truth.
"""

from .formulas import (
    AdqbfInstance,
    Apply,
    Block,
    BlockKind,
    Conj,
    DepAtom,
    ExistsF,
    FragmentClass,
    FragmentKind,
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
    free_vars,
    make_instance,
    sim_degree,
    so2_nnf,
)
from .so2_eval import BoolTable, check_sat, check_valid, eval_so2, is_true
from .adqbf_eval import enumerate_bindings, eval_adqbf, eval_dqbf
from .teams import (
    KripkeModel,
    Relation,
    Team,
    all_assignments,
    char_table,
    duplicate,
    rel_of,
    supplement,
)
from .team_eval import (
    check_flatness,
    eval_minc,
    eval_team,
    is_true_sentence_team,
    team_satisfiable,
    team_truth_table,
    team_valid,
)
from .gda import Gda, builtin_dep, check_agreement, gda_holds, translatable_family
from .passes import (
    PassReport,
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
    unary_dep_elim,
)
from .parser import load_gdas, load_kripke, load_team, parse
from .printer import print_value
from .generate import GenConfig, generate
from .difftest import DiffReport, difftest

__version__ = "0.1.0"
