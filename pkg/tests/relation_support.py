"""Helpers shared by the relation tests and the acceptance suite."""

from __future__ import annotations

import random

from protorel import (
    ActInstance,
    Protocol,
    ProtocolError,
    Taxonomy,
    classify,
    derive,
    enumerate_branches,
    protocol_from_branches,
)
from protorel.protocol import change_init, prune
from protorel.relations import SPECIALIZED, BranchKind, _BASE, _rank, traces_equivalent, traces_specialize

STRUCTURE_OPS = ("E", "R", "P", "S", "I", "C")


def recheck(t: Taxonomy, A, B, kind: BranchKind, witness: tuple[int, ...]) -> bool:
    """Re-derive a reported relation from its witness, without the Relator."""
    match = traces_specialize if kind in SPECIALIZED else traces_equivalent
    a, b = A.branch, B.branch
    base = _BASE[kind]
    if base is BranchKind.EQUIVALENT:
        return witness == () and match(t, A.trace, B.trace)
    if base is BranchKind.PREFIX:
        (k,) = witness
        return match(t, A.trace, derive(t, prune(b, k)).trace)
    if base is BranchKind.SUFFIX:
        (k,) = witness
        return match(t, A.trace, derive(t, change_init(b, k)).trace)
    if base is BranchKind.INFIX:
        k, j = witness
        return match(t, A.trace, derive(t, prune(change_init(b, k), j)).trace)
    k, j, m = witness
    return match(t, derive(t, prune(a, k)).trace, derive(t, prune(b, j)).trace) and match(
        t, derive(t, change_init(a, k)).trace, derive(t, change_init(b, m)).trace
    )


def cut(rng: random.Random, acts: list[ActInstance], op: str) -> list[ActInstance]:
    """A sub-sequence of ``acts`` of the shape named by ``op``."""
    n = len(acts)
    if op in ("E", "R"):
        return list(acts)
    if op == "P":
        return acts[: rng.randint(1, n)]
    if op == "S":
        return acts[rng.randint(0, n - 1):]
    if op == "I":
        i = rng.randint(0, n - 1)
        return acts[i: rng.randint(i + 1, n)]
    i = rng.randint(0, n)
    return acts[:i] + acts[rng.randint(i, n):]


def derived_protocol(rng: random.Random, t: Taxonomy, q: Protocol, op: str, pid: str) -> Protocol | None:
    """Apply ``op`` to every branch of ``q`` (and drop one branch for R)."""
    branches = [b.acts for b in enumerate_branches(q)]
    if op == "R":
        if len(branches) < 2:
            return None
        branches.pop(rng.randrange(len(branches)))
    new = [cut(rng, acts, op) for acts in branches]
    new = [b for b in new if b]
    if not new:
        return None
    try:
        return protocol_from_branches(pid, new, t)
    except ProtocolError:
        return None


def at_most_as_general(outer, inner) -> bool:
    """True when label ``outer`` is no more general than ``inner``."""
    if outer is None:
        return False
    return outer.restricted <= inner.restricted and _rank((outer.flavor, outer.structure)) <= _rank(
        (inner.flavor, inner.structure)
    )


def r_commutes(t: Taxonomy, p: Protocol, q: Protocol, label_text: str) -> bool:
    """Check both factorisations of ``P[XR]Q`` through explicit middle protocols.

    ``M1`` keeps only Q's matched branches (P[X]M1, M1[ER]Q); ``M2`` is P
    plus Q's unmatched branches (P[ER]M2, M2[X]Q).
    """
    c = classify(t, p, q)
    if str(c.label) != label_text:
        return False
    x = label_text[:-1]
    q_acts = [d.branch.acts for d in c.right_branches]
    used = {j for _, j in c.pairs}
    m1 = protocol_from_branches("M1", [q_acts[j] for _, j in c.pairs], t)
    m2 = protocol_from_branches("M2", [d.branch.acts for d in c.left_branches] + [
        acts for j, acts in enumerate(q_acts) if j not in used
    ], t)
    labels = [classify(t, a, b).label for a, b in ((p, m1), (m1, q), (p, m2), (m2, q))]
    return [str(lab) for lab in labels] == [x, "ER", "ER", x]
