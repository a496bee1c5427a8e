"""Separation of a protocol into its branches."""

from __future__ import annotations

from .derivation import DerivedBranch, derive
from .protocol import Branch, Protocol, Transition
from .taxonomy import Taxonomy


def enumerate_branches(p: Protocol) -> list[Branch]:
    """Every transition sequence from the initial state to a final state.

    Depth-first, visiting successors by (target name, act class), so the
    output is ordered lexicographically by the state names along each
    path.  A final state with outgoing transitions both closes a branch
    and continues into longer ones.
    """
    out: list[Branch] = []
    stack: list[tuple[str, tuple[Transition, ...]]] = [(p.initial, ())]
    while stack:
        state, path = stack.pop()
        if state in p.finals:
            out.append(Branch(p.id, p.initial, path))
        for tr in reversed(p.outgoing(state)):
            stack.append((tr.target, path + (tr,)))
    return out


def derive_all(t: Taxonomy, p: Protocol) -> list[DerivedBranch]:
    return [derive(t, b) for b in enumerate_branches(p)]


def branch_name(side: int, index: int) -> str:
    """1-based public handle, e.g. ``B1.2``."""
    return f"B{side}.{index + 1}"
