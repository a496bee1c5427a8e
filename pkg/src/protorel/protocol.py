"""Protocols as deterministic acyclic state-transition systems.

Transitions are labelled with act instances (act class, sender,
receiver, content term, optional in-reply-to content).  A branch is a
chain of transitions; :func:`prune` and :func:`change_init` cut a branch
at a state index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Any, Iterable, Mapping, Sequence

from .errors import Diagnostic, ProtocolError
from .taxonomy import Taxonomy

_TOP_KEYS = {"id", "states", "initial", "finals", "transitions"}
_ACT_KEYS = {"class", "sender", "receiver", "content", "inReplyToContent"}


@dataclass(frozen=True, order=True)
class ActInstance:
    act_class: str
    sender: str
    receiver: str
    content: str
    in_reply_to: str | None = None

    def bindings(self) -> dict[str, str | None]:
        return {
            "sender": self.sender,
            "receiver": self.receiver,
            "content": self.content,
            "inReplyToContent": self.in_reply_to,
        }

    def __str__(self) -> str:
        irt = f", re {self.in_reply_to}" if self.in_reply_to else ""
        return f"{self.act_class}({self.sender}->{self.receiver}: {self.content}{irt})"

    def to_json(self) -> dict[str, Any]:
        out = {"class": self.act_class, "sender": self.sender, "receiver": self.receiver, "content": self.content}
        if self.in_reply_to is not None:
            out["inReplyToContent"] = self.in_reply_to
        return out


@dataclass(frozen=True, order=True)
class Transition:
    source: str
    act: ActInstance
    target: str


@dataclass(frozen=True)
class Protocol:
    id: str
    states: tuple[str, ...]
    initial: str
    finals: frozenset[str]
    transitions: tuple[Transition, ...]

    def outgoing(self, state: str) -> list[Transition]:
        """Transitions leaving ``state`` ordered by (target name, act class)."""
        return sorted(
            (t for t in self.transitions if t.source == state),
            key=lambda t: (t.target, t.act.act_class),
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "states": list(self.states),
            "initial": self.initial,
            "finals": sorted(self.finals),
            "transitions": [
                {"from": t.source, "to": t.target, "act": t.act.to_json()} for t in self.transitions
            ],
        }


@dataclass(frozen=True)
class Branch:
    """A chain of transitions starting at ``start``.

    ``start`` is kept so that empty branches produced by :func:`prune` or
    :func:`change_init` still know where they sit.
    """

    protocol_id: str
    start: str
    transitions: tuple[Transition, ...] = ()

    def __len__(self) -> int:
        return len(self.transitions)

    @property
    def states(self) -> list[str]:
        return [self.start] + [t.target for t in self.transitions]

    @property
    def acts(self) -> list[ActInstance]:
        return [t.act for t in self.transitions]

    def __str__(self) -> str:
        return "[" + ",".join(self.states) + "]"


def prune(b: Branch, k: int) -> Branch:
    """Keep the first ``k`` transitions (cut the branch at state ``s_k``)."""
    if not 0 <= k <= len(b):
        raise IndexError(f"state index {k} out of range 0..{len(b)}")
    return Branch(b.protocol_id, b.start, b.transitions[:k])


def change_init(b: Branch, k: int) -> Branch:
    """Drop the first ``k`` transitions, making ``s_k`` the new start state."""
    if not 0 <= k <= len(b):
        raise IndexError(f"state index {k} out of range 0..{len(b)}")
    return Branch(b.protocol_id, b.states[k], b.transitions[k:])


def concat(a: Branch, b: Branch) -> Branch:
    if a.states[-1] != b.start:
        raise ValueError(f"cannot chain {a} with {b}")
    return Branch(a.protocol_id, a.start, a.transitions + b.transitions)


# -- loading / validation ---------------------------------------------------


def _parse_act(raw: Any, where: str, t: Taxonomy | None, diags: list[Diagnostic]) -> ActInstance | None:
    if not isinstance(raw, dict):
        diags.append(Diagnostic("schema", f"{where}: act must be an object"))
        return None
    extra = set(raw) - _ACT_KEYS
    missing = {"class", "sender", "receiver", "content"} - set(raw)
    if extra or missing:
        diags.append(Diagnostic("schema", f"{where}: unknown keys {sorted(extra)}, missing {sorted(missing)}"))
        return None
    fields = [raw["class"], raw["sender"], raw["receiver"], raw["content"]]
    irt = raw.get("inReplyToContent")
    if not all(isinstance(v, str) and v for v in fields) or not (irt is None or (isinstance(irt, str) and irt)):
        diags.append(Diagnostic("schema", f"{where}: act fields must be non-empty strings"))
        return None
    act = ActInstance(*fields, in_reply_to=irt)
    if t is None:
        return act
    if not t.is_act(act.act_class):
        diags.append(Diagnostic("unknown-act-class", f"{where}: {act.act_class!r} is not an act class"))
        return act
    for term in (act.content, act.in_reply_to):
        if term is not None and not t.is_fluent_class(term):
            diags.append(Diagnostic("unknown-content-class", f"{where}: content {term!r} is not a fluent class"))
    uses_reply = any("inReplyToContent" in e.pattern.roles() for e in t.effects(act.act_class))
    if uses_reply and act.in_reply_to is None:
        diags.append(Diagnostic("missing-in-reply-to", f"{where}: {act.act_class} needs inReplyToContent"))
    if not uses_reply and act.in_reply_to is not None:
        diags.append(Diagnostic("unexpected-in-reply-to", f"{where}: {act.act_class} takes no inReplyToContent"))
    return act


def validate_structure(p: Protocol) -> list[Diagnostic]:
    """Graph-level checks: determinism, acyclicity, reachability, liveness."""
    diags: list[Diagnostic] = []
    states = set(p.states)
    if not p.finals:
        diags.append(Diagnostic("no-final-state", "protocol declares no final state"))
    seen: dict[tuple[str, str], Transition] = {}
    succ: dict[str, set[str]] = {s: set() for s in states}
    for tr in p.transitions:
        key = (tr.source, tr.act.act_class)
        if key in seen:
            diags.append(
                Diagnostic("nondeterministic-transition", f"two {tr.act.act_class} transitions leave {tr.source}")
            )
        seen[key] = tr
        succ[tr.source].add(tr.target)
    try:
        # sorted inputs keep the reported cycle independent of hash seeds
        tuple(TopologicalSorter({s: sorted(succ[s]) for s in p.states}).static_order())
    except CycleError as exc:
        cyc = exc.args[1] if len(exc.args) > 1 else []
        diags.append(Diagnostic("cycle-detected", f"cycle through states {list(cyc)}"))
        return diags

    reach = {p.initial}
    stack = [p.initial]
    while stack:
        for nxt in succ[stack.pop()]:
            if nxt not in reach:
                reach.add(nxt)
                stack.append(nxt)
    for s in sorted(states - reach):
        diags.append(Diagnostic("unreachable-state", f"state {s} is not reachable from {p.initial}"))

    # states from which a final state is reachable
    pred: dict[str, set[str]] = {s: set() for s in states}
    for s, nxts in succ.items():
        for n in nxts:
            pred[n].add(s)
    live = set(p.finals)
    stack = list(p.finals)
    while stack:
        for prev in pred[stack.pop()]:
            if prev not in live:
                live.add(prev)
                stack.append(prev)
    for s in sorted(reach - live):
        diags.append(Diagnostic("dead-end-state", f"no final state reachable from {s}"))
    return diags


def load_protocol(document: str | bytes | Mapping[str, Any], t: Taxonomy | None = None) -> Protocol:
    """Parse and validate a protocol document.

    With ``t=None`` only the schema and graph structure are checked; act
    classes and content terms are checked against ``t`` otherwise.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ProtocolError([Diagnostic("schema", f"invalid JSON: {exc}")]) from None
    if not isinstance(document, Mapping):
        raise ProtocolError([Diagnostic("schema", "protocol document must be an object")])
    diags: list[Diagnostic] = []
    extra = set(document) - _TOP_KEYS
    missing = _TOP_KEYS - set(document)
    if extra or missing:
        raise ProtocolError([Diagnostic("schema", f"unknown keys {sorted(extra)}, missing {sorted(missing)}")])
    pid, states, initial, finals = document["id"], document["states"], document["initial"], document["finals"]
    if not isinstance(pid, str) or not pid:
        diags.append(Diagnostic("schema", "'id' must be a non-empty string"))
    if not isinstance(states, list) or not all(isinstance(s, str) and s for s in states):
        raise ProtocolError(diags + [Diagnostic("schema", "'states' must be a list of names")])
    if len(set(states)) != len(states):
        diags.append(Diagnostic("schema", "duplicate state names"))
    state_set = set(states)
    if initial not in state_set:
        diags.append(Diagnostic("unknown-state", f"initial state {initial!r} not declared"))
    if not isinstance(finals, list):
        raise ProtocolError(diags + [Diagnostic("schema", "'finals' must be a list")])
    for f in finals:
        if f not in state_set:
            diags.append(Diagnostic("unknown-state", f"final state {f!r} not declared"))
    transitions: list[Transition] = []
    raw_ts = document["transitions"]
    if not isinstance(raw_ts, list):
        raise ProtocolError(diags + [Diagnostic("schema", "'transitions' must be a list")])
    for i, raw in enumerate(raw_ts):
        where = f"transitions[{i}]"
        if not isinstance(raw, dict) or set(raw) != {"from", "to", "act"}:
            diags.append(Diagnostic("schema", f"{where}: needs exactly from, to, act"))
            continue
        for end in ("from", "to"):
            if raw[end] not in state_set:
                diags.append(Diagnostic("unknown-state", f"{where}: state {raw[end]!r} not declared"))
        act = _parse_act(raw["act"], where, t, diags)
        if act is not None and raw["from"] in state_set and raw["to"] in state_set:
            transitions.append(Transition(raw["from"], act, raw["to"]))
    if diags:
        raise ProtocolError(diags)
    p = Protocol(pid, tuple(states), initial, frozenset(finals), tuple(transitions))
    diags = validate_structure(p)
    if diags:
        raise ProtocolError(diags)
    return p


def protocol_from_branches(
    pid: str, branches: Sequence[Sequence[ActInstance]], t: Taxonomy | None = None
) -> Protocol:
    """Build a tree-shaped protocol whose branch set is exactly ``branches``.

    Shared act prefixes are merged; the result is validated like any loaded
    protocol.  Two branches that put different act instances of the same
    class at the same point cannot be merged deterministically and are
    rejected.
    """
    counter = iter(range(10**6))
    root = f"s{next(counter)}"
    states = [root]
    children: dict[tuple[str, str], tuple[ActInstance, str]] = {}
    transitions: list[Transition] = []
    finals: set[str] = set()
    for acts in branches:
        node = root
        for act in acts:
            key = (node, act.act_class)
            if key in children:
                existing, target = children[key]
                if existing != act:
                    raise ProtocolError(
                        [Diagnostic("nondeterministic-transition", f"conflicting {act.act_class} acts at {node}")]
                    )
                node = target
                continue
            target = f"s{next(counter)}"
            states.append(target)
            children[key] = (act, target)
            transitions.append(Transition(node, act, target))
            node = target
        finals.add(node)
    doc = Protocol(pid, tuple(states), root, frozenset(finals), tuple(transitions)).to_json()
    return load_protocol(doc, t)


def acts_of(branches: Iterable[Branch]) -> list[list[ActInstance]]:
    return [b.acts for b in branches]
