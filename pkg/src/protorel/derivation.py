"""Fluent derivation along transitions and branches.

One step ``G : <(s, act, s')> |- G'``:

1. instantiate the act's effect templates into initiated/terminated sets
   (an act that both initiates and terminates a fluent leaves it holding);
2. close under the commitment rules until nothing changes:

   * discharge: a base commitment ``C(x, y, p)`` in force is terminated
     when its debtor ``x`` sends an act that initiates ``p``;
   * activation: a conditional commitment ``CC(x, y, c, p)`` in force
     whose condition ``c`` holds is terminated and ``C(x, y, p)`` is
     initiated;

3. ``G' = (G - terminated) | initiated``.

Rule firings override the act's own initiations, so a conditional
commitment created and triggered in the same step never survives it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .fluents import Commitment, ConditionalCommitment, Fluent, fluent_set_to_json, sorted_fluents
from .protocol import ActInstance, Branch, Transition
from .taxonomy import Taxonomy

EMPTY: frozenset = frozenset()


def act_effects(t: Taxonomy, act: ActInstance) -> tuple[frozenset, frozenset]:
    """Instantiate every effective template of ``act.act_class``."""
    bindings = act.bindings()
    initiated: set[Fluent] = set()
    terminated: set[Fluent] = set()
    for template in t.effects(act.act_class):
        fluent = template.pattern.instantiate(bindings)
        (initiated if template.kind == "initiates" else terminated).add(fluent)
    return frozenset(initiated), frozenset(terminated)


def step_effects(t: Taxonomy, G: Iterable[Fluent], act: ActInstance) -> tuple[frozenset, frozenset]:
    """Net (initiated, terminated) sets of one transition after rule closure."""
    G = frozenset(G)
    act_init, act_term = act_effects(t, act)
    init = set(act_init)
    term = set(act_term) - init
    while True:
        current = (G - term) | init
        fired = False
        for f in sorted(current, key=str):
            if isinstance(f, Commitment) and f.debtor == act.sender and f.proposition in init:
                term.add(f)
                init.discard(f)
                fired = True
            elif isinstance(f, ConditionalCommitment) and f.trigger in current:
                term.add(f)
                init.discard(f)
                base = Commitment(f.debtor, f.creditor, f.proposition)
                init.add(base)
                term.discard(base)
                fired = True
            if fired:
                break
        if not fired:
            return frozenset(init), frozenset(term)


def apply_transition(t: Taxonomy, G: Iterable[Fluent], step: Transition | ActInstance) -> frozenset:
    act = step.act if isinstance(step, Transition) else step
    G = frozenset(G)
    init, term = step_effects(t, G, act)
    return (G - term) | init


@dataclass(frozen=True)
class DerivedBranch:
    branch: Branch
    state_fluents: tuple[frozenset, ...]

    @property
    def trace(self) -> frozenset:
        return self.state_fluents[-1]

    def to_json(self) -> dict:
        return {
            "states": self.branch.states,
            "acts": [a.to_json() for a in self.branch.acts],
            "stateFluents": [
                {"state": s, "fluents": [str(f) for f in sorted_fluents(g)]}
                for s, g in zip(self.branch.states, self.state_fluents)
            ],
            "trace": [str(f) for f in sorted_fluents(self.trace)],
            "traceTerms": fluent_set_to_json(self.trace),
        }


def derive(t: Taxonomy, b: Branch, G0: Iterable[Fluent] = EMPTY) -> DerivedBranch:
    """Fold :func:`apply_transition` along ``b``, keeping every G_i."""
    sets = [frozenset(G0)]
    for tr in b.transitions:
        sets.append(apply_transition(t, sets[-1], tr))
    return DerivedBranch(b, tuple(sets))
