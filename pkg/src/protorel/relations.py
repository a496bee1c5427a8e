"""Branch relations and protocol classification.

Branch level: equivalence and specialization are bijections between
traces (eq edges, resp. ``msc(a) <= msc(b)`` edges).  Prefix, suffix,
infix and complement-to-infix compare against traces of pruned or
re-rooted sub-branches; sub-branches produced by ``change_init`` are
re-derived from the empty fluent set.

Protocol level: branch maps are lifted to a label ``[flavor][structure][R]``
such as ``ECR``; the metric-optimal matching is tried first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import permutations
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .branching import branch_name, derive_all
from .comparison import Cell, Matching, Valuation, best_matching, comparison_table, similarity, tie_break
from .derivation import DerivedBranch, derive
from .fluents import Fluent, sorted_fluents
from .protocol import Protocol, change_init
from .taxonomy import Taxonomy

EXHAUSTIVE_LIMIT = 6


class BranchKind(str, enum.Enum):
    EQUIVALENT = "Equivalent"
    SPECIALIZATION = "Specialization"
    PREFIX = "Prefix"
    SPECIALIZED_PREFIX = "SpecializedPrefix"
    SUFFIX = "Suffix"
    SPECIALIZED_SUFFIX = "SpecializedSuffix"
    INFIX = "Infix"
    SPECIALIZED_INFIX = "SpecializedInfix"
    COMPLEMENT_TO_INFIX = "ComplementToInfix"
    SPECIALIZED_COMPLEMENT_TO_INFIX = "SpecializedComplementToInfix"
    NONE = "None"


# (structure letter, equivalence-flavour kind, specialization-flavour kind)
LADDER = (
    (None, BranchKind.EQUIVALENT, BranchKind.SPECIALIZATION),
    ("P", BranchKind.PREFIX, BranchKind.SPECIALIZED_PREFIX),
    ("S", BranchKind.SUFFIX, BranchKind.SPECIALIZED_SUFFIX),
    ("I", BranchKind.INFIX, BranchKind.SPECIALIZED_INFIX),
    ("C", BranchKind.COMPLEMENT_TO_INFIX, BranchKind.SPECIALIZED_COMPLEMENT_TO_INFIX),
)
SEARCH_ORDER = tuple(k for _, eq, sp in LADDER for k in (eq, sp))
SPECIALIZED = frozenset(sp for _, _, sp in LADDER)
_BASE = {sp: eq for _, eq, sp in LADDER} | {eq: eq for _, eq, _ in LADDER}


@dataclass(frozen=True)
class BranchRelation:
    """Strongest relation found, with the state indices that realise it.

    Witness layout: ``()`` for (specialized) equivalence; ``(k,)`` for
    prefix/suffix; ``(k, j)`` for infix (re-root at ``k``, prune at
    ``j``); ``(k, j, m)`` for complement-to-infix (split the left branch
    at ``k``; its head is a prefix of the right branch at ``j`` and its
    tail a suffix from ``m``).
    """

    kind: BranchKind
    witness: tuple[int, ...] = ()


@dataclass(frozen=True)
class RelationLabel:
    flavor: str  # "E" | "Z"
    structure: str | None = None  # None | "P" | "S" | "I" | "C"
    restricted: bool = False

    def __str__(self) -> str:
        return self.flavor + (self.structure or "") + ("R" if self.restricted else "")


def _bijective(t: Taxonomy, T1: Iterable[Fluent], T2: Iterable[Fluent], specialize: bool) -> bool:
    A, B = sorted_fluents(T1), sorted_fluents(T2)
    if len(A) != len(B):
        return False
    if not A:
        return True
    ca, cb = [t.msc(f) for f in A], [t.msc(f) for f in B]
    w = np.zeros((len(A), len(B)))
    for i, a in enumerate(ca):
        for j, b in enumerate(cb):
            ok = t.concept_subsumes(b, a) if specialize else t.concept_equivalent(a, b)
            w[i, j] = 1.0 if ok else 0.0
    rows, cols = linear_sum_assignment(w, maximize=True)
    return int(w[rows, cols].sum()) == len(A)


def traces_equivalent(t: Taxonomy, T1: Iterable[Fluent], T2: Iterable[Fluent]) -> bool:
    return _bijective(t, T1, T2, specialize=False)


def traces_specialize(t: Taxonomy, T1: Iterable[Fluent], T2: Iterable[Fluent]) -> bool:
    """True iff some bijection maps each fluent of T1 to one subsuming it."""
    return _bijective(t, T1, T2, specialize=True)


def branch_equivalent(t: Taxonomy, A: DerivedBranch, B: DerivedBranch) -> bool:
    return traces_equivalent(t, A.trace, B.trace)


def branch_specializes(t: Taxonomy, A: DerivedBranch, B: DerivedBranch) -> bool:
    return traces_specialize(t, A.trace, B.trace)


class Relator:
    """Decides branch relations, caching re-rooted sub-branch derivations."""

    def __init__(self, t: Taxonomy):
        self.t = t
        self._suffixes: dict[Any, list[DerivedBranch]] = {}
        self._holds: dict[Any, tuple[int, ...] | None] = {}

    def suffixes(self, D: DerivedBranch) -> list[DerivedBranch]:
        """Derivations of ``change_init(D, k)`` from the empty set, k = 0..n."""
        key = D.branch
        if key not in self._suffixes:
            self._suffixes[key] = [derive(self.t, change_init(D.branch, k)) for k in range(len(D.branch) + 1)]
        return self._suffixes[key]

    def _match(self, T1: frozenset, T2: frozenset, special: bool) -> bool:
        return _bijective(self.t, T1, T2, special)

    def _prefix_at(self, T: frozenset, B: DerivedBranch, special: bool) -> int | None:
        for k, G in enumerate(B.state_fluents):
            if self._match(T, G, special):
                return k
        return None

    def _suffix_at(self, T: frozenset, B: DerivedBranch, special: bool) -> int | None:
        for k, S in enumerate(self.suffixes(B)):
            if self._match(T, S.trace, special):
                return k
        return None

    def holds(self, A: DerivedBranch, B: DerivedBranch, kind: BranchKind) -> tuple[int, ...] | None:
        """Witness indices when ``A kind B`` holds, else None."""
        key = (A.branch, B.branch, kind)
        if key not in self._holds:
            self._holds[key] = self._decide(A, B, kind)
        return self._holds[key]

    def _decide(self, A: DerivedBranch, B: DerivedBranch, kind: BranchKind) -> tuple[int, ...] | None:
        special = kind in SPECIALIZED
        base = _BASE[kind]
        if base is BranchKind.EQUIVALENT:
            return () if self._match(A.trace, B.trace, special) else None
        if base is BranchKind.PREFIX:
            k = self._prefix_at(A.trace, B, special)
            return None if k is None else (k,)
        if base is BranchKind.SUFFIX:
            k = self._suffix_at(A.trace, B, special)
            return None if k is None else (k,)
        if base is BranchKind.INFIX:
            for k, S in enumerate(self.suffixes(B)):
                j = self._prefix_at(A.trace, S, special)
                if j is not None:
                    return (k, j)
            return None
        # complement to infix: split A at k
        tails = self.suffixes(A)
        for k in range(len(A.branch) + 1):
            j = self._prefix_at(A.state_fluents[k], B, special)
            if j is None:
                continue
            m = self._suffix_at(tails[k].trace, B, special)
            if m is not None:
                return (k, j, m)
        return None

    def relation(self, A: DerivedBranch, B: DerivedBranch) -> BranchRelation:
        for kind in SEARCH_ORDER:
            w = self.holds(A, B, kind)
            if w is not None:
                return BranchRelation(kind, w)
        return BranchRelation(BranchKind.NONE)

    def lift(self, pairs: Sequence[tuple[DerivedBranch, DerivedBranch]]) -> tuple[str, str | None] | None:
        """Least general (flavor, structure) satisfied by every pair."""
        for flavor, column in (("E", 1), ("Z", 2)):
            for rung in LADDER:
                kind = rung[column]
                if all(self.holds(a, b, kind) is not None for a, b in pairs):
                    return flavor, rung[0]
        return None


def branch_relation(t: Taxonomy, A: DerivedBranch, B: DerivedBranch) -> BranchRelation:
    return Relator(t).relation(A, B)


def _rank(lifted: tuple[str, str | None]) -> int:
    structures = [r[0] for r in LADDER]
    return (0 if lifted[0] == "E" else len(structures)) + structures.index(lifted[1])


@dataclass
class PairReport:
    i: int
    j: int
    relation: BranchRelation
    valuation: Valuation | None

    def to_json(self) -> dict[str, Any]:
        v = self.valuation
        return {
            "left": branch_name(1, self.i),
            "right": branch_name(2, self.j),
            "relation": self.relation.kind.value,
            "witness": list(self.relation.witness),
            "valuation": None if v is None else list(v),
            "f": None if v is None else str(similarity(v)),
            "g": None if v is None else str(tie_break(v)),
        }


@dataclass
class Classification:
    left: Protocol
    right: Protocol
    left_branches: list[DerivedBranch]
    right_branches: list[DerivedBranch]
    table: list[list[Cell]]
    matching: Matching | None
    label: RelationLabel | None
    path: str | None  # "matching" | "exhaustive" | None
    pairs: tuple[tuple[int, int], ...] = ()
    per_pair: list[PairReport] = field(default_factory=list)

    @property
    def related(self) -> bool:
        return self.label is not None

    def label_text(self) -> str | None:
        if self.label is None:
            return None
        return f"{self.left.id}[{self.label}]{self.right.id}"

    def infeasible_cells(self) -> list[tuple[int, int]]:
        return [(c.i, c.j) for row in self.table for c in row if not c.feasible]


def classify(t: Taxonomy, P1: Protocol, P2: Protocol, exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> Classification:
    """Relate P1 (left operand) to P2.

    The best matching is lifted first.  When the right side has at most
    ``exhaustive_limit`` branches, every injective branch map is searched
    as well and the least general label wins; ``path`` records whether the
    optimal matching already reached it (``"matching"``) or only another
    map did (``"exhaustive"``).
    """
    D1, D2 = derive_all(t, P1), derive_all(t, P2)
    table = comparison_table(t, D1, D2)
    matching = best_matching(t, D1, D2, table)
    rel = Relator(t)
    result = Classification(P1, P2, D1, D2, table, matching, None, None)
    if len(D1) > len(D2):
        # the left operand must map injectively into the right one
        if matching is not None:
            result.pairs = matching.pairs
            result.per_pair = _reports(rel, D1, D2, table, matching.pairs)
        return result
    restricted = len(D1) < len(D2)

    best: tuple[tuple[str, str | None], tuple[tuple[int, int], ...], str] | None = None
    if matching is not None:
        result.pairs = matching.pairs
        lifted = rel.lift([(D1[i], D2[j]) for i, j in matching.pairs])
        if lifted is not None:
            best = (lifted, matching.pairs, "matching")

    if len(D2) <= exhaustive_limit and (best is None or _rank(best[0]) > 0):
        for perm in permutations(range(len(D2)), len(D1)):
            pairs = tuple(enumerate(perm))
            lifted = rel.lift([(D1[i], D2[j]) for i, j in pairs])
            if lifted is not None and (best is None or _rank(lifted) < _rank(best[0])):
                best = (lifted, pairs, "exhaustive")
                if _rank(lifted) == 0:
                    break

    if best is not None:
        (flavor, structure), result.pairs, result.path = best
        result.label = RelationLabel(flavor, structure, restricted)
    result.per_pair = _reports(rel, D1, D2, table, result.pairs)
    return result


def _reports(rel: Relator, D1, D2, table, pairs) -> list[PairReport]:
    return [PairReport(i, j, rel.relation(D1[i], D2[j]), table[i][j].valuation) for i, j in pairs]
