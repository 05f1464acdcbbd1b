"""Lax team-semantics evaluation for team formulae and modal inclusion logic.

Two exact engines compute the same satisfaction relation:

* ``mode="naive"`` is the textbook recursion: split disjunction tries all
  3^|X| ordered subteam pairs, an existential quantifier tries all 3^|X|
  supplementing functions, strong negation complements.  It is the
  reference implementation and the one property tests validate directly.

* ``mode="table"`` computes, bottom-up, the full satisfaction table of every
  subformula over all teams of its evaluation domain (feasible up to four
  variables: 2^16 teams).  Split disjunction becomes a subset-lattice
  union convolution, quantifiers become projection images.  The two engines
  are cross-checked exhaustively in the test suite.

``mode="auto"`` picks the table engine whenever the variable universe fits,
and falls back to the naive engine (with its work budget) otherwise.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Optional

import numpy as np

from .budget import StepBudget
from .errors import (
    BudgetExceeded,
    FreeVarOutsideDomain,
    NotASentence,
    NotFlatFragment,
    UnknownGda,
    UnknownWorld,
)
from .formulas import (
    DepAtom,
    FRAG_QPL,
    GdaAtom,
    IncAtom,
    MAnd,
    MBox,
    MDiamond,
    MInc,
    MLit,
    ModalFormula,
    MOr,
    TAnd,
    TeamFormula,
    TExists,
    TForall,
    TLit,
    TNeg,
    TOr,
    modal_inc_free,
    team_all_vars,
    team_fragment_ok,
    team_free_vars,
)
from .gda import Gda, gda_holds, gda_member_codes
from .teams import KripkeModel, Team, duplicate, supplement

TABLE_CAP = 4
SAT_DOMAIN_CAP = 4
NAIVE_ENUM_CAP = 600_000

Registry = Mapping[str, Gda]


def _registry(gdas: Optional[Registry]) -> dict[str, Gda]:
    return dict(gdas) if gdas else {}


def _check_entry(phi: TeamFormula, team: Team, gdas: Registry) -> None:
    missing = team_free_vars(phi) - set(team.domain)
    if missing:
        raise FreeVarOutsideDomain(f"{sorted(missing)} not in team domain")
    for name in _gda_names(phi):
        if name not in gdas:
            raise UnknownGda(f"no generalized atom named {name!r}")


def _gda_names(phi: TeamFormula) -> frozenset[str]:
    if isinstance(phi, GdaAtom):
        return frozenset([phi.name])
    if isinstance(phi, (TAnd, TOr)):
        return _gda_names(phi.lhs) | _gda_names(phi.rhs)
    if isinstance(phi, TNeg):
        return _gda_names(phi.sub)
    if isinstance(phi, (TExists, TForall)):
        return _gda_names(phi.body)
    return frozenset()


# ---------------------------------------------------------------------------
# naive reference engine
# ---------------------------------------------------------------------------


def _naive(
    phi: TeamFormula,
    team: Team,
    gdas: dict[str, Gda],
    budget: StepBudget,
    memo: dict,
) -> bool:
    key = (phi, team)
    hit = memo.get(key)
    if hit is not None:
        return hit
    budget.tick()
    result = _naive_raw(phi, team, gdas, budget, memo)
    memo[key] = result
    return result


def _naive_raw(phi, team, gdas, budget, memo) -> bool:
    if isinstance(phi, TLit):
        i = team.domain.index(phi.var)
        want = 1 if phi.positive else 0
        return all(row[i] == want for row in team.rows)
    if isinstance(phi, TAnd):
        return _naive(phi.lhs, team, gdas, budget, memo) and _naive(
            phi.rhs, team, gdas, budget, memo
        )
    if isinstance(phi, TNeg):
        return not _naive(phi.sub, team, gdas, budget, memo)
    if isinstance(phi, TOr):
        rows = team.sorted_rows()
        k = len(rows)
        if 3**k > NAIVE_ENUM_CAP:
            raise BudgetExceeded(f"split over {k} rows exceeds enumeration cap")
        budget.require(3**k)
        for digits in itertools.product((0, 1, 2), repeat=k):
            budget.tick()
            left = frozenset(r for r, d in zip(rows, digits) if d != 1)
            right = frozenset(r for r, d in zip(rows, digits) if d != 0)
            if _naive(phi.lhs, Team(team.domain, left), gdas, budget, memo) and _naive(
                phi.rhs, Team(team.domain, right), gdas, budget, memo
            ):
                return True
        return False
    if isinstance(phi, TExists):
        rows = team.sorted_rows()
        k = len(rows)
        if 3**k > NAIVE_ENUM_CAP:
            raise BudgetExceeded(f"supplement over {k} rows exceeds enumeration cap")
        budget.require(3**k)
        options = ((0,), (1,), (0, 1))
        for combo in itertools.product(options, repeat=k):
            budget.tick()
            choice = dict(zip(rows, combo))
            supplemented = supplement(team, choice, phi.var)
            if _naive(phi.body, supplemented, gdas, budget, memo):
                return True
        return False
    if isinstance(phi, TForall):
        return _naive(phi.body, duplicate(team, phi.var), gdas, budget, memo)
    if isinstance(phi, DepAtom):
        ant = [team.domain.index(a) for a in phi.antecedents]
        con = team.domain.index(phi.consequent)
        seen: dict[tuple, int] = {}
        for row in team.rows:
            key = tuple(row[i] for i in ant)
            if key in seen and seen[key] != row[con]:
                return False
            seen[key] = row[con]
        return True
    if isinstance(phi, IncAtom):
        li = [team.domain.index(v) for v in phi.lhs]
        ri = [team.domain.index(v) for v in phi.rhs]
        rhs_values = {tuple(row[i] for i in ri) for row in team.rows}
        return all(tuple(row[i] for i in li) in rhs_values for row in team.rows)
    if isinstance(phi, GdaAtom):
        return gda_holds(gdas[phi.name], team, phi.args)
    raise TypeError(f"not a TeamFormula: {phi!r}")


# ---------------------------------------------------------------------------
# table engine
# ---------------------------------------------------------------------------


class TableContext:
    """Caches satisfaction tables per (subformula, evaluation domain).

    Sharing a context across many evaluations of structurally overlapping
    formulae (as the differential harness does) lets common subformulae be
    tabled once.
    """

    def __init__(self, gdas: Optional[Registry] = None):
        self.gdas = _registry(gdas)
        self.tables: dict = {}
        self.zetas: dict = {}
        self.aux: dict = {}

    # -- per-domain machinery ------------------------------------------------

    def masks(self, d: tuple[str, ...]) -> np.ndarray:
        key = ("masks", d)
        if key not in self.aux:
            nt = 1 << (1 << len(d))
            self.aux[key] = np.arange(nt, dtype=np.int64)
        return self.aux[key]

    @staticmethod
    def row_bit(d: tuple[str, ...], r: int, var: str) -> int:
        j = d.index(var)
        return (r >> (len(d) - 1 - j)) & 1

    def row_project(self, dfrom: tuple[str, ...], dto: tuple[str, ...]) -> list[int]:
        """Row-code map from domain dfrom onto subdomain dto."""
        key = ("rowproj", dfrom, dto)
        if key not in self.aux:
            out = []
            for r in range(1 << len(dfrom)):
                c = 0
                for v in dto:
                    c = (c << 1) | self.row_bit(dfrom, r, v)
                out.append(c)
            self.aux[key] = out
        return self.aux[key]

    def team_project_codes(
        self, dfrom: tuple[str, ...], dto: tuple[str, ...]
    ) -> np.ndarray:
        """For every team code over dfrom, its projection's code over dto."""
        key = ("teamproj", dfrom, dto)
        if key not in self.aux:
            rp = self.row_project(dfrom, dto)
            masks = self.masks(dfrom)
            pc = np.zeros(len(masks), dtype=np.int64)
            for r in range(1 << len(dfrom)):
                pc |= np.where((masks >> r) & 1 == 1, 1 << rp[r], 0)
            self.aux[key] = pc
        return self.aux[key]

    def dup_codes(self, d: tuple[str, ...], var: str) -> tuple[tuple[str, ...], np.ndarray]:
        """Team-code map of the duplicating operation X[{0,1}/var]."""
        key = ("dup", d, var)
        if key not in self.aux:
            d2 = tuple(sorted(set(d) | {var}))
            pair = []
            for r in range(1 << len(d)):
                exts = []
                for b in (0, 1):
                    c = 0
                    for v in d2:
                        bit = b if v == var else self.row_bit(d, r, v)
                        c = (c << 1) | bit
                    exts.append(c)
                pair.append((1 << exts[0]) | (1 << exts[1]))
            masks = self.masks(d)
            dc = np.zeros(len(masks), dtype=np.int64)
            for r in range(1 << len(d)):
                dc |= np.where((masks >> r) & 1 == 1, pair[r], 0)
            self.aux[key] = (d2, dc)
        return self.aux[key]

    # -- zeta / moebius over the subset lattice of rows ----------------------

    @staticmethod
    def _zeta(arr: np.ndarray, nbits: int) -> np.ndarray:
        a = arr.copy()
        for i in range(nbits):
            a = a.reshape(-1, 2, 1 << i)
            a[:, 1, :] += a[:, 0, :]
            a = a.reshape(-1)
        return a

    @staticmethod
    def _moebius(arr: np.ndarray, nbits: int) -> np.ndarray:
        a = arr.copy()
        for i in range(nbits):
            a = a.reshape(-1, 2, 1 << i)
            a[:, 1, :] -= a[:, 0, :]
            a = a.reshape(-1)
        return a

    def zeta_of(self, node: TeamFormula, d: tuple[str, ...]) -> np.ndarray:
        key = (node, d)
        if key not in self.zetas:
            t = self.table(node, d).astype(np.int64)
            self.zetas[key] = self._zeta(t, 1 << len(d))
        return self.zetas[key]

    # -- tables ---------------------------------------------------------------

    def table(self, phi: TeamFormula, d: tuple[str, ...]) -> np.ndarray:
        key = (phi, d)
        hit = self.tables.get(key)
        if hit is not None:
            return hit
        t = self._build(phi, d)
        self.tables[key] = t
        return t

    def _build(self, phi: TeamFormula, d: tuple[str, ...]) -> np.ndarray:
        masks = self.masks(d)
        nr = 1 << len(d)
        if isinstance(phi, TLit):
            if phi.var not in d:
                raise FreeVarOutsideDomain(f"{phi.var} not in team domain")
            want = 1 if phi.positive else 0
            allowed = 0
            for r in range(nr):
                if self.row_bit(d, r, phi.var) == want:
                    allowed |= 1 << r
            return (masks & ~allowed) == 0
        if isinstance(phi, TAnd):
            return self.table(phi.lhs, d) & self.table(phi.rhs, d)
        if isinstance(phi, TNeg):
            return ~self.table(phi.sub, d)
        if isinstance(phi, TOr):
            counts = self._moebius(
                self.zeta_of(phi.lhs, d) * self.zeta_of(phi.rhs, d), nr
            )
            return counts > 0
        if isinstance(phi, TExists):
            d2 = tuple(sorted(set(d) | {phi.var}))
            d0 = tuple(v for v in d if v != phi.var)
            t2 = self.table(phi.body, d2)
            pc2 = self.team_project_codes(d2, d0)
            ok = np.zeros(1 << (1 << len(d0)), dtype=bool)
            sat = np.flatnonzero(t2)
            if len(sat):
                ok[np.unique(pc2[sat])] = True
            pc = self.team_project_codes(d, d0)
            return ok[pc]
        if isinstance(phi, TForall):
            d2, dc = self.dup_codes(d, phi.var)
            t2 = self.table(phi.body, d2)
            return t2[dc]
        if isinstance(phi, DepAtom):
            for v in (*phi.antecedents, phi.consequent):
                if v not in d:
                    raise FreeVarOutsideDomain(f"{v} not in team domain")
            t = np.ones(len(masks), dtype=bool)
            for r1 in range(nr):
                for r2 in range(r1 + 1, nr):
                    agree = all(
                        self.row_bit(d, r1, a) == self.row_bit(d, r2, a)
                        for a in phi.antecedents
                    )
                    differ = self.row_bit(d, r1, phi.consequent) != self.row_bit(
                        d, r2, phi.consequent
                    )
                    if agree and differ:
                        pm = (1 << r1) | (1 << r2)
                        t &= (masks & pm) != pm
            return t
        if isinstance(phi, IncAtom):
            for v in (*phi.lhs, *phi.rhs):
                if v not in d:
                    raise FreeVarOutsideDomain(f"{v} not in team domain")
            lc = self._arg_bitsets(d, phi.lhs, masks, nr)
            rc = self._arg_bitsets(d, phi.rhs, masks, nr)
            return (lc & ~rc) == 0
        if isinstance(phi, GdaAtom):
            gda = self.gdas.get(phi.name)
            if gda is None:
                raise UnknownGda(f"no generalized atom named {phi.name!r}")
            for v in phi.args:
                if v not in d:
                    raise FreeVarOutsideDomain(f"{v} not in team domain")
            member = gda_member_codes(gda)
            rel = self._arg_bitsets(d, phi.args, masks, nr)
            return member[rel]
        raise TypeError(f"not a TeamFormula: {phi!r}")

    def _arg_bitsets(self, d, args, masks, nr) -> np.ndarray:
        """Per team code, the bitset of argument-tuple codes realized in it."""
        codes = []
        for r in range(nr):
            c = 0
            for v in args:
                c = (c << 1) | self.row_bit(d, r, v)
            codes.append(c)
        acc = np.zeros(len(masks), dtype=np.int64)
        for r in range(nr):
            acc |= np.where((masks >> r) & 1 == 1, 1 << codes[r], 0)
        return acc


def team_code(team: Team, d: tuple[str, ...]) -> int:
    """Bitmask encoding of a team over the sorted domain d."""
    order = [team.domain.index(v) for v in d]
    m = 0
    for row in team.rows:
        c = 0
        for i in order:
            c = (c << 1) | row[i]
        m |= 1 << c
    return m


def team_from_code(code: int, d: tuple[str, ...]) -> Team:
    rows = []
    for r in range(1 << len(d)):
        if (code >> r) & 1:
            bits = tuple((r >> (len(d) - 1 - j)) & 1 for j in range(len(d)))
            rows.append(bits)
    return Team(d, frozenset(rows))


def team_truth_table(
    phi: TeamFormula,
    domain: tuple[str, ...],
    gdas: Optional[Registry] = None,
    ctx: Optional[TableContext] = None,
) -> np.ndarray:
    """Satisfaction over every team of the (sorted) domain, by team code."""
    d = tuple(sorted(domain))
    universe = set(d) | team_all_vars(phi)
    if len(universe) > TABLE_CAP:
        raise BudgetExceeded(
            f"tabled evaluation needs |universe| <= {TABLE_CAP}, got {len(universe)}"
        )
    if ctx is None:
        ctx = TableContext(gdas)
    elif gdas:
        ctx.gdas.update(gdas)
    missing = team_free_vars(phi) - set(d)
    if missing:
        raise FreeVarOutsideDomain(f"{sorted(missing)} not in team domain")
    return ctx.table(phi, d)


# ---------------------------------------------------------------------------
# public evaluation entry points
# ---------------------------------------------------------------------------


def eval_team(
    phi: TeamFormula,
    team: Team,
    gdas: Optional[Registry] = None,
    *,
    mode: str = "auto",
    budget: Optional[StepBudget] = None,
    ctx: Optional[TableContext] = None,
) -> bool:
    """Lax team-semantics satisfaction X |= phi."""
    reg = _registry(gdas)
    if ctx is not None:
        reg = {**ctx.gdas, **reg}
    _check_entry(phi, team, reg)
    if mode == "auto":
        universe = set(team.domain) | team_all_vars(phi)
        mode = "table" if len(universe) <= TABLE_CAP else "naive"
    if mode == "table":
        d = tuple(sorted(team.domain))
        table = team_truth_table(phi, d, reg, ctx)
        return bool(table[team_code(team, d)])
    if mode == "naive":
        if budget is None:
            budget = StepBudget()
        return _naive(phi, team, reg, budget, {})
    raise ValueError(f"unknown mode {mode!r}")


def is_true_sentence_team(
    phi: TeamFormula,
    gdas: Optional[Registry] = None,
    *,
    mode: str = "auto",
    budget: Optional[StepBudget] = None,
    ctx: Optional[TableContext] = None,
) -> bool:
    """A sentence is true when the team of just the empty assignment satisfies it."""
    if team_free_vars(phi):
        raise NotASentence(
            f"free variables {sorted(team_free_vars(phi))} in sentence position"
        )
    return eval_team(phi, Team.unit(), gdas, mode=mode, budget=budget, ctx=ctx)


def eval_qpl_row(phi: TeamFormula, row: Mapping[str, int]) -> bool:
    """Classical single-assignment semantics of the flat fragment."""
    if isinstance(phi, TLit):
        v = row[phi.var]
        return v == 1 if phi.positive else v == 0
    if isinstance(phi, TAnd):
        return eval_qpl_row(phi.lhs, row) and eval_qpl_row(phi.rhs, row)
    if isinstance(phi, TOr):
        return eval_qpl_row(phi.lhs, row) or eval_qpl_row(phi.rhs, row)
    if isinstance(phi, TExists):
        return any(eval_qpl_row(phi.body, {**row, phi.var: b}) for b in (0, 1))
    if isinstance(phi, TForall):
        return all(eval_qpl_row(phi.body, {**row, phi.var: b}) for b in (0, 1))
    raise NotFlatFragment(f"{type(phi).__name__} is outside the flat fragment")


def check_flatness(
    phi: TeamFormula,
    team: Team,
    *,
    mode: str = "auto",
    budget: Optional[StepBudget] = None,
) -> bool:
    """Whether team satisfaction equals rowwise classical satisfaction."""
    if not team_fragment_ok(phi, FRAG_QPL):
        raise NotFlatFragment("formula has strong negation or atoms")
    lhs = eval_team(phi, team, mode=mode, budget=budget)
    rhs = all(eval_qpl_row(phi, row) for row in team.assignments())
    return lhs == rhs


def team_satisfiable(
    phi: TeamFormula,
    gdas: Optional[Registry] = None,
    *,
    cap: int = SAT_DOMAIN_CAP,
    mode: str = "auto",
    budget: Optional[StepBudget] = None,
    ctx: Optional[TableContext] = None,
) -> bool:
    """Some nonempty team over domain Fr(phi) satisfies phi."""
    fr = tuple(sorted(team_free_vars(phi)))
    if len(fr) > cap:
        raise BudgetExceeded(f"{len(fr)} free variables exceed cap {cap}")
    reg = _registry(gdas)
    if ctx is not None:
        reg = {**ctx.gdas, **reg}
    universe = set(fr) | team_all_vars(phi)
    if mode == "table" or (mode == "auto" and len(universe) <= TABLE_CAP):
        table = team_truth_table(phi, fr, reg, ctx)
        return bool(table[1:].any())
    for code in range(1, 1 << (1 << len(fr))):
        if eval_team(phi, team_from_code(code, fr), reg, mode="naive", budget=budget):
            return True
    return False


def team_valid(
    phi: TeamFormula,
    gdas: Optional[Registry] = None,
    *,
    cap: int = SAT_DOMAIN_CAP,
    mode: str = "auto",
    budget: Optional[StepBudget] = None,
    ctx: Optional[TableContext] = None,
) -> bool:
    """Every team over domain Fr(phi), the empty team included, satisfies phi."""
    fr = tuple(sorted(team_free_vars(phi)))
    if len(fr) > cap:
        raise BudgetExceeded(f"{len(fr)} free variables exceed cap {cap}")
    reg = _registry(gdas)
    if ctx is not None:
        reg = {**ctx.gdas, **reg}
    universe = set(fr) | team_all_vars(phi)
    if mode == "table" or (mode == "auto" and len(universe) <= TABLE_CAP):
        table = team_truth_table(phi, fr, reg, ctx)
        return bool(table.all())
    return all(
        eval_team(phi, team_from_code(code, fr), reg, mode="naive", budget=budget)
        for code in range(1 << (1 << len(fr)))
    )


# ---------------------------------------------------------------------------
# modal team semantics
# ---------------------------------------------------------------------------


def eval_minc(
    phi: ModalFormula,
    model: KripkeModel,
    team: frozenset[str] | set[str],
    *,
    use_flatness: bool = True,
    budget: Optional[StepBudget] = None,
) -> bool:
    """Lax modal team semantics on an explicit Kripke model.

    Diamond picks a nonempty successor set per world and takes the union;
    box takes the full successor image.  Inclusion-free subformulae are
    flat and, unless disabled, are evaluated rowwise.
    """
    team = frozenset(team)
    unknown = team - model.worlds
    if unknown:
        raise UnknownWorld(f"{sorted(unknown)} not in the model")
    if budget is None:
        budget = StepBudget()
    memo: dict = {}
    flat_memo: dict = {}

    def flat_world(f: ModalFormula, w: str) -> bool:
        key = (f, w)
        hit = flat_memo.get(key)
        if hit is not None:
            return hit
        budget.tick()
        if isinstance(f, MLit):
            v = f.var in model.props_at(w)
            out = v if f.positive else not v
        elif isinstance(f, MAnd):
            out = flat_world(f.lhs, w) and flat_world(f.rhs, w)
        elif isinstance(f, MOr):
            out = flat_world(f.lhs, w) or flat_world(f.rhs, w)
        elif isinstance(f, MDiamond):
            out = any(flat_world(f.sub, v) for v in model.successors(w))
        elif isinstance(f, MBox):
            out = all(flat_world(f.sub, v) for v in model.successors(w))
        else:
            raise TypeError(f"not inclusion-free: {f!r}")
        flat_memo[key] = out
        return out

    def go(f: ModalFormula, t: frozenset[str]) -> bool:
        key = (f, t)
        hit = memo.get(key)
        if hit is not None:
            return hit
        budget.tick()
        out = go_raw(f, t)
        memo[key] = out
        return out

    def go_raw(f: ModalFormula, t: frozenset[str]) -> bool:
        if use_flatness and modal_inc_free(f):
            return all(flat_world(f, w) for w in t)
        if isinstance(f, MLit):
            if f.positive:
                return all(f.var in model.props_at(w) for w in t)
            return all(f.var not in model.props_at(w) for w in t)
        if isinstance(f, MAnd):
            return go(f.lhs, t) and go(f.rhs, t)
        if isinstance(f, MOr):
            worlds = sorted(t)
            k = len(worlds)
            if 3**k > NAIVE_ENUM_CAP:
                raise BudgetExceeded(f"split over {k} worlds exceeds enumeration cap")
            budget.require(3**k)
            for digits in itertools.product((0, 1, 2), repeat=k):
                budget.tick()
                left = frozenset(w for w, dg in zip(worlds, digits) if dg != 1)
                right = frozenset(w for w, dg in zip(worlds, digits) if dg != 0)
                if go(f.lhs, left) and go(f.rhs, right):
                    return True
            return False
        if isinstance(f, MDiamond):
            worlds = sorted(t)
            option_sets = []
            for w in worlds:
                succ = model.successors(w)
                if not succ:
                    return False
                subsets = [
                    frozenset(c)
                    for size in range(1, len(succ) + 1)
                    for c in itertools.combinations(succ, size)
                ]
                option_sets.append(subsets)
            total = 1
            for s in option_sets:
                total *= len(s)
            budget.require(max(total, 1))
            for combo in itertools.product(*option_sets):
                budget.tick()
                image: frozenset[str] = frozenset().union(*combo) if combo else frozenset()
                if go(f.sub, image):
                    return True
            return False
        if isinstance(f, MBox):
            image = frozenset(v for w in t for v in model.successors(w))
            return go(f.sub, image)
        if isinstance(f, MInc):
            vals = {
                w: tuple(1 if p in model.props_at(w) else 0 for p in f.lhs + f.rhs)
                for w in t
            }
            n = len(f.lhs)
            rhs_vals = {vals[w][n:] for w in t}
            return all(vals[w][:n] in rhs_vals for w in t)
        raise TypeError(f"not a ModalFormula: {f!r}")

    return go(phi, team)
