"""Comparing traces: fluent cases, feasibility, valuations, matchings.

Two fluents compare through their most specific concepts:

* ``eq`` - equivalent concepts;
* ``g1`` - the first is strictly more general than the second;
* ``g2`` - the second is strictly more general than the first;
* ``in`` - neither subsumes the other.

A pair of traces is feasible when every fluent of one side relates
(eq/g1/g2) to some fluent of the other.  Feasible pairs get a valuation
``(x0, x1, x2, x3)``: counts of eq/g1/g2 pairs in a best one-to-one fluent
pairing, and the size difference of the traces.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .derivation import DerivedBranch
from .errors import InfeasiblePairError
from .fluents import Fluent, sorted_fluents
from .taxonomy import Taxonomy


class FluentCase(str, enum.Enum):
    EQ = "eq"
    G1 = "g1"
    G2 = "g2"
    IN = "in"


def compare_fluents(t: Taxonomy, f1: Fluent, f2: Fluent) -> FluentCase:
    c1, c2 = t.msc(f1), t.msc(f2)
    below = t.concept_subsumes(c1, c2)  # f2 under f1
    above = t.concept_subsumes(c2, c1)  # f1 under f2
    if below and above:
        return FluentCase.EQ
    if below:
        return FluentCase.G1
    if above:
        return FluentCase.G2
    return FluentCase.IN


def case_matrix(t: Taxonomy, T1: Sequence[Fluent], T2: Sequence[Fluent]) -> list[list[FluentCase]]:
    return [[compare_fluents(t, a, b) for b in T2] for a in T1]


def is_feasible(t: Taxonomy, T1: Iterable[Fluent], T2: Iterable[Fluent]) -> bool:
    A, B = sorted_fluents(T1), sorted_fluents(T2)
    m = case_matrix(t, A, B)
    left = all(any(c is not FluentCase.IN for c in row) for row in m)
    right = all(any(m[i][j] is not FluentCase.IN for i in range(len(A))) for j in range(len(B)))
    return left or right


class Valuation(NamedTuple):
    x0: int
    x1: int
    x2: int
    x3: int

    @property
    def total(self) -> int:
        return self.x0 + self.x1 + self.x2 + self.x3


def similarity(v: Valuation) -> Fraction:
    """f = (x0 + max(x1, x2)) / sum; the all-zero tuple scores 1."""
    if v.total == 0:
        return Fraction(1)
    return Fraction(v.x0 + max(v.x1, v.x2), v.total)


def tie_break(v: Valuation) -> Fraction:
    """g = x0 / sum; the all-zero tuple scores 1."""
    if v.total == 0:
        return Fraction(1)
    return Fraction(v.x0, v.total)


def fluent_pairing(
    t: Taxonomy, T1: Iterable[Fluent], T2: Iterable[Fluent]
) -> list[tuple[Fluent, Fluent, FluentCase]]:
    """A one-to-one pairing of related fluents.

    Maximises the number of pairs, then the number of eq pairs, then
    max(#g1, #g2).  Solved as two weighted assignment problems, one
    favouring g1 and one favouring g2.
    """
    A, B = sorted_fluents(T1), sorted_fluents(T2)
    if not A or not B:
        return []
    m = case_matrix(t, A, B)
    n = max(len(A), len(B))
    w_pair, w_eq = (n + 1) ** 2, n + 1
    best: list[tuple[int, int]] | None = None
    best_key = None
    for favoured in (FluentCase.G1, FluentCase.G2):
        w = np.zeros((len(A), len(B)))
        for i, row in enumerate(m):
            for j, c in enumerate(row):
                if c is FluentCase.EQ:
                    w[i, j] = w_pair + w_eq
                elif c is not FluentCase.IN:
                    w[i, j] = w_pair + (1 if c is favoured else 0)
        rows, cols = linear_sum_assignment(w, maximize=True)
        pairs = [(i, j) for i, j in zip(rows, cols) if w[i, j] > 0]
        counts = [sum(1 for i, j in pairs if m[i][j] is c) for c in (FluentCase.G1, FluentCase.G2)]
        eqs = sum(1 for i, j in pairs if m[i][j] is FluentCase.EQ)
        key = (len(pairs), eqs, max(counts))
        if best_key is None or key > best_key:
            best, best_key = pairs, key
    return [(A[i], B[j], m[i][j]) for i, j in sorted(best)]


def valuate(t: Taxonomy, T1: Iterable[Fluent], T2: Iterable[Fluent]) -> Valuation:
    T1, T2 = frozenset(T1), frozenset(T2)
    if not is_feasible(t, T1, T2):
        raise InfeasiblePairError("traces do not form a feasible pair")
    pairs = fluent_pairing(t, T1, T2)
    count = {c: 0 for c in FluentCase}
    for _, _, c in pairs:
        count[c] += 1
    return Valuation(count[FluentCase.EQ], count[FluentCase.G1], count[FluentCase.G2], abs(len(T1) - len(T2)))


@dataclass(frozen=True)
class Cell:
    i: int
    j: int
    feasible: bool
    valuation: Valuation | None

    @property
    def f(self) -> Fraction | None:
        return None if self.valuation is None else similarity(self.valuation)

    @property
    def g(self) -> Fraction | None:
        return None if self.valuation is None else tie_break(self.valuation)


def comparison_table(t: Taxonomy, P1: Sequence[DerivedBranch], P2: Sequence[DerivedBranch]) -> list[list[Cell]]:
    table = []
    for i, a in enumerate(P1):
        row = []
        for j, b in enumerate(P2):
            if is_feasible(t, a.trace, b.trace):
                row.append(Cell(i, j, True, valuate(t, a.trace, b.trace)))
            else:
                row.append(Cell(i, j, False, None))
        table.append(row)
    return table


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]  # 0-based (index in P1, index in P2)
    scores: tuple[Fraction, ...]
    total: Fraction
    total_g: Fraction


def best_matching(
    t: Taxonomy,
    P1: Sequence[DerivedBranch],
    P2: Sequence[DerivedBranch],
    table: list[list[Cell]] | None = None,
) -> Matching | None:
    """Exact search for the matching maximising sum f, then sum g.

    Remaining ties go to the lexicographically least sorted pair list.
    Returns None when the smaller branch set cannot be covered by
    feasible pairs.
    """
    if table is None:
        table = comparison_table(t, P1, P2)
    flipped = len(P1) > len(P2)
    n_rows, n_cols = (len(P2), len(P1)) if flipped else (len(P1), len(P2))

    def cell(r: int, c: int) -> Cell:
        return table[c][r] if flipped else table[r][c]

    options = [
        [(c, cell(r, c).f, cell(r, c).g) for c in range(n_cols) if cell(r, c).feasible]
        for r in range(n_rows)
    ]
    if any(not opts for opts in options):
        return None
    # optimistic bounds for the rows not yet assigned
    ub_f = [Fraction(0)] * (n_rows + 1)
    ub_g = [Fraction(0)] * (n_rows + 1)
    for r in range(n_rows - 1, -1, -1):
        ub_f[r] = ub_f[r + 1] + max(o[1] for o in options[r])
        ub_g[r] = ub_g[r + 1] + max(o[2] for o in options[r])

    best: dict = {"key": None, "pairs": None}
    chosen: list[tuple[int, Fraction, Fraction]] = []
    used: set[int] = set()

    def as_pairs() -> tuple[tuple[int, int], ...]:
        pairs = [((c, r) if flipped else (r, c)) for r, (c, _, _) in enumerate(chosen)]
        return tuple(sorted(pairs))

    def search(r: int, f_acc: Fraction, g_acc: Fraction) -> None:
        if best["key"] is not None:
            bf, bg = best["key"]
            if f_acc + ub_f[r] < bf or (f_acc + ub_f[r] == bf and g_acc + ub_g[r] < bg):
                return
        if r == n_rows:
            pairs = as_pairs()
            key = (f_acc, g_acc)
            if best["key"] is None or key > best["key"] or (key == best["key"] and pairs < best["pairs"]):
                best["key"], best["pairs"] = key, pairs
            return
        for c, f, g in options[r]:
            if c in used:
                continue
            used.add(c)
            chosen.append((c, f, g))
            search(r + 1, f_acc + f, g_acc + g)
            chosen.pop()
            used.discard(c)

    search(0, Fraction(0), Fraction(0))
    if best["key"] is None:
        return None
    pairs = best["pairs"]
    scores = tuple(table[i][j].f for i, j in pairs)
    return Matching(pairs, scores, best["key"][0], best["key"][1])
