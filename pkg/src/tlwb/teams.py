"""Teams, supplementing/duplicating operations, and Kripke models.

A team is a finite set of Boolean assignments over a shared, ordered
variable domain.  Rows are stored as bit tuples aligned with the domain.
The empty team (no rows) and the unit team (empty domain, one empty row)
are distinct values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    BudgetExceeded,
    FreeVarOutsideDomain,
    IncompleteChoice,
    UnknownWorld,
)
from .so2_eval import BoolTable

DEFAULT_DOMAIN_CAP = 5

Row = tuple[int, ...]


@dataclass(frozen=True)
class Team:
    domain: tuple[str, ...]
    rows: frozenset[Row]

    def __post_init__(self):
        if len(set(self.domain)) != len(self.domain):
            raise ValueError(f"repeated variable in domain {self.domain}")
        for row in self.rows:
            if len(row) != len(self.domain):
                raise ValueError(f"row {row} does not fit domain {self.domain}")
            if any(b not in (0, 1) for b in row):
                raise ValueError(f"row {row} has non-bit entries")

    @staticmethod
    def unit() -> "Team":
        return Team((), frozenset([()]))

    @staticmethod
    def empty(domain: Iterable[str] = ()) -> "Team":
        return Team(tuple(domain), frozenset())

    @staticmethod
    def of(domain: Iterable[str], rows: Iterable[Iterable[int]]) -> "Team":
        return Team(tuple(domain), frozenset(tuple(r) for r in rows))

    def assignments(self) -> list[dict[str, int]]:
        """Rows as dicts, sorted for deterministic iteration."""
        return [dict(zip(self.domain, row)) for row in sorted(self.rows)]

    def sorted_rows(self) -> list[Row]:
        return sorted(self.rows)

    def project(self, vars: tuple[str, ...]) -> "Team":
        idx = [self.domain.index(v) for v in vars]
        return Team(
            tuple(vars),
            frozenset(tuple(row[i] for i in idx) for row in self.rows),
        )

    def __len__(self):
        return len(self.rows)


def all_assignments(domain: Iterable[str], cap: int = DEFAULT_DOMAIN_CAP) -> Team:
    """The full team 2^D; refuses domains beyond the cap."""
    domain = tuple(domain)
    if len(domain) > cap:
        raise BudgetExceeded(f"domain of {len(domain)} variables exceeds cap {cap}")
    rows = frozenset(itertools.product((0, 1), repeat=len(domain)))
    return Team(domain, rows)


def _extend_row(domain: tuple[str, ...], row: Row, var: str, bit: int) -> tuple[tuple[str, ...], Row]:
    if var in domain:
        i = domain.index(var)
        return domain, row[:i] + (bit,) + row[i + 1:]
    return domain + (var,), row + (bit,)


def supplement(team: Team, choice: Mapping[Row, Iterable[int]], var: str) -> Team:
    """X[F/var] for a supplementing function F given per row."""
    new_domain = team.domain if var in team.domain else team.domain + (var,)
    rows = set()
    for row in team.rows:
        if row not in choice:
            raise IncompleteChoice(f"no choice for row {row}")
        values = set(choice[row])
        if not values or not values <= {0, 1}:
            raise IncompleteChoice(f"choice for row {row} must be a nonempty subset of {{0,1}}")
        for b in sorted(values):
            rows.add(_extend_row(team.domain, row, var, b)[1])
    return Team(new_domain, frozenset(rows))


def duplicate(team: Team, var: str) -> Team:
    """X[{0,1}/var], the duplicating team."""
    new_domain = team.domain if var in team.domain else team.domain + (var,)
    rows = set()
    for row in team.rows:
        for b in (0, 1):
            rows.add(_extend_row(team.domain, row, var, b)[1])
    return Team(new_domain, frozenset(rows))


@dataclass(frozen=True)
class Relation:
    arity: int
    tuples: frozenset[tuple[int, ...]]

    def __post_init__(self):
        for t in self.tuples:
            if len(t) != self.arity:
                raise ValueError(f"tuple {t} does not have arity {self.arity}")


def rel_of(team: Team, args: Iterable[str]) -> Relation:
    """rel(X, args): the set of row projections onto the argument tuple."""
    args = tuple(args)
    missing = set(args) - set(team.domain)
    if missing:
        raise FreeVarOutsideDomain(f"{sorted(missing)} not in team domain")
    idx = [team.domain.index(a) for a in args]
    return Relation(
        len(args),
        frozenset(tuple(row[i] for i in idx) for row in team.rows),
    )


def char_table(team: Team, args: Iterable[str]) -> BoolTable:
    """Characteristic function of rel(X, args) as a big-endian table."""
    args = tuple(args)
    rel = rel_of(team, args)
    n = len(args)
    entries = []
    for bits in itertools.product((0, 1), repeat=n):
        entries.append(1 if bits in rel.tuples else 0)
    return BoolTable(n, tuple(entries))


# ---------------------------------------------------------------------------
# Kripke models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KripkeModel:
    worlds: frozenset[str]
    edges: frozenset[tuple[str, str]]
    valuation: tuple[tuple[str, frozenset[str]], ...]

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.worlds or b not in self.worlds:
                raise UnknownWorld(f"edge ({a},{b}) references unknown worlds")
        for w, _ in self.valuation:
            if w not in self.worlds:
                raise UnknownWorld(f"valuation references unknown world {w}")

    @staticmethod
    def of(
        worlds: Iterable[str],
        edges: Iterable[tuple[str, str]],
        valuation: Mapping[str, Iterable[str]],
    ) -> "KripkeModel":
        return KripkeModel(
            frozenset(worlds),
            frozenset(edges),
            tuple(sorted((w, frozenset(ps)) for w, ps in valuation.items())),
        )

    def props_at(self, world: str) -> frozenset[str]:
        for w, ps in self.valuation:
            if w == world:
                return ps
        return frozenset()

    def successors(self, world: str) -> tuple[str, ...]:
        return tuple(sorted(b for a, b in self.edges if a == world))
