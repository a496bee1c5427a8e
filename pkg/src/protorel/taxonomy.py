"""Class hierarchy for communication acts and fluents.

A taxonomy is a flattened subsumption hierarchy with two implicit roots,
``CommunicationAct`` and ``Fluent``.  Act classes carry effect templates
(``initiates``/``terminates`` a fluent pattern) which are inherited
additively by every subclass.

Loading precomputes the equivalence clusters and the transitive
ancestor sets, so every query afterwards is a set lookup.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Any, Iterable, Mapping, Union

from .errors import Diagnostic, MscError, TaxonomyError, UnboundRoleError, UnknownClassError
from .fluents import (
    Acceptance,
    Commitment,
    ConditionalCommitment,
    Domain,
    Fluent,
    Rejection,
)

ACT_ROOT = "CommunicationAct"
FLUENT_ROOT = "Fluent"
ROLES = ("sender", "receiver", "content", "inReplyToContent")
CONSTRUCTORS = ("Acceptance", "Rejection", "Commitment", "ConditionalCommitment")

_CLASS_KEYS = {"name", "parents", "equivalentTo", "kind", "effects", "layer"}
_CONSTRUCTOR_ARGS = {
    "Acceptance": ("signatory", "addressee", "object"),
    "Rejection": ("signatory", "addressee", "object"),
    "Commitment": ("debtor", "creditor", "proposition"),
    "ConditionalCommitment": ("debtor", "creditor", "trigger", "proposition"),
}


@dataclass(frozen=True)
class FluentPattern:
    """A fluent constructor whose actor/content slots are role variables.

    ``constructor`` is one of ``"role"`` (the domain fluent named by a
    content role), ``"domain"`` (a fixed fluent class), or one of
    :data:`CONSTRUCTORS`.
    """

    constructor: str
    cls: str | None = None
    role: str | None = None
    actors: tuple[str, ...] = ()
    obj: str | None = None
    trigger: "FluentPattern | None" = None
    proposition: "FluentPattern | None" = None

    def roles(self) -> set[str]:
        used = set(self.actors)
        for r in (self.role, self.obj):
            if r is not None:
                used.add(r)
        for sub in (self.trigger, self.proposition):
            if sub is not None:
                used |= sub.roles()
        return used

    def instantiate(self, bindings: Mapping[str, str | None]) -> Fluent:
        def bind(role: str) -> str:
            value = bindings.get(role)
            if value is None:
                raise UnboundRoleError(f"template references role {role!r} which the act does not carry")
            return value

        c = self.constructor
        if c == "domain":
            return Domain(self.cls)
        if c == "role":
            return Domain(bind(self.role))
        if c == "Acceptance":
            return Acceptance(bind(self.actors[0]), bind(self.actors[1]), bind(self.obj))
        if c == "Rejection":
            return Rejection(bind(self.actors[0]), bind(self.actors[1]), bind(self.obj))
        if c == "Commitment":
            return Commitment(bind(self.actors[0]), bind(self.actors[1]), self.proposition.instantiate(bindings))
        return ConditionalCommitment(
            bind(self.actors[0]),
            bind(self.actors[1]),
            self.trigger.instantiate(bindings),
            self.proposition.instantiate(bindings),
        )

    def to_json(self) -> dict[str, Any]:
        c = self.constructor
        if c == "role":
            return {"role": self.role}
        if c == "domain":
            return {"class": self.cls}
        names = _CONSTRUCTOR_ARGS[c]
        args: dict[str, Any] = dict(zip(names, self.actors))
        if self.obj is not None:
            args["object"] = self.obj
        if self.trigger is not None:
            args["trigger"] = self.trigger.to_json()
        if self.proposition is not None:
            args["proposition"] = self.proposition.to_json()
        return {"class": c, "args": args}


@dataclass(frozen=True)
class EffectTemplate:
    kind: str  # "initiates" | "terminates"
    pattern: FluentPattern


@dataclass(frozen=True)
class ClassInfo:
    name: str
    kind: str  # "act" | "fluent"
    parents: tuple[str, ...]
    equivalent_to: tuple[str, ...] = ()
    effects: tuple[EffectTemplate, ...] = ()
    layer: str | None = None


@dataclass(frozen=True)
class CompositeConcept:
    """Most specific concept of a non-domain fluent.

    The variant and actors are compared by identity; ``parts`` holds the
    concepts of the nested object/trigger/proposition, compared by
    subsumption.
    """

    variant: str
    actors: tuple[str, ...]
    parts: tuple["Concept", ...]


Concept = Union[str, CompositeConcept]


@dataclass
class Taxonomy:
    classes: dict[str, ClassInfo]
    _cluster: dict[str, str] = field(repr=False)
    _ancestors: dict[str, frozenset[str]] = field(repr=False)
    _effects: dict[str, tuple[EffectTemplate, ...]] = field(repr=False)

    def __hash__(self) -> int:
        return id(self)

    def __eq__(self, other: object) -> bool:
        return self is other

    def __contains__(self, name: str) -> bool:
        return name in self.classes

    def _check(self, *names: str) -> None:
        for n in names:
            if n not in self.classes:
                raise UnknownClassError(n)

    def kind(self, name: str) -> str:
        self._check(name)
        return self.classes[name].kind

    def is_act(self, name: str) -> bool:
        return name in self.classes and self.classes[name].kind == "act"

    def is_fluent_class(self, name: str) -> bool:
        return name in self.classes and self.classes[name].kind == "fluent"

    def subsumes(self, general: str, specific: str) -> bool:
        self._check(general, specific)
        return general in self._ancestors[specific]

    def equivalent(self, a: str, b: str) -> bool:
        self._check(a, b)
        return self._cluster[a] == self._cluster[b]

    def ancestors(self, name: str) -> frozenset[str]:
        """Every class subsuming ``name``, itself and its equivalents included."""
        self._check(name)
        return self._ancestors[name]

    def effects(self, act_class: str) -> tuple[EffectTemplate, ...]:
        self._check(act_class)
        return self._effects.get(act_class, ())

    def msc(self, instance: Fluent | str | Iterable[str]) -> Concept:
        if isinstance(instance, str):
            return self._msc_of_classes([instance])
        if isinstance(instance, Domain):
            return self._msc_of_classes([instance.cls])
        if isinstance(instance, (Acceptance, Rejection)):
            return CompositeConcept(
                type(instance).__name__,
                (instance.signatory, instance.addressee),
                (self._msc_of_classes([instance.obj]),),
            )
        if isinstance(instance, Commitment):
            return CompositeConcept(
                "Commitment", (instance.debtor, instance.creditor), (self.msc(instance.proposition),)
            )
        if isinstance(instance, ConditionalCommitment):
            return CompositeConcept(
                "ConditionalCommitment",
                (instance.debtor, instance.creditor),
                (self.msc(instance.trigger), self.msc(instance.proposition)),
            )
        return self._msc_of_classes(list(instance))

    def _msc_of_classes(self, asserted: list[str]) -> str:
        if not asserted:
            raise MscError("no-asserted-class", "fluent carries no asserted class")
        self._check(*asserted)
        minimal = [
            c for c in asserted
            if not any(self.subsumes(c, d) and not self.equivalent(c, d) for d in asserted)
        ]
        clusters = {self._cluster[c] for c in minimal}
        if len(clusters) > 1:
            raise MscError("ambiguous-msc", f"incomparable asserted classes: {sorted(set(minimal))}")
        return min(minimal)

    def concept_subsumes(self, general: Concept, specific: Concept) -> bool:
        if isinstance(general, str) and isinstance(specific, str):
            return self.subsumes(general, specific)
        if isinstance(general, CompositeConcept) and isinstance(specific, CompositeConcept):
            return (
                general.variant == specific.variant
                and general.actors == specific.actors
                and len(general.parts) == len(specific.parts)
                and all(self.concept_subsumes(g, s) for g, s in zip(general.parts, specific.parts))
            )
        return False

    def concept_equivalent(self, a: Concept, b: Concept) -> bool:
        return self.concept_subsumes(a, b) and self.concept_subsumes(b, a)

    def to_json(self) -> dict[str, Any]:
        out = []
        for name in sorted(self.classes):
            info = self.classes[name]
            if name in (ACT_ROOT, FLUENT_ROOT):
                continue
            entry: dict[str, Any] = {
                "name": name,
                "kind": info.kind,
                "parents": list(info.parents),
                "equivalentTo": list(info.equivalent_to),
                "effects": [{"kind": e.kind, "fluent": e.pattern.to_json()} for e in info.effects],
            }
            if info.layer is not None:
                entry["layer"] = info.layer
            out.append(entry)
        return {"classes": out}


# -- loading ---------------------------------------------------------------


def _parse_pattern(
    raw: Any, where: str, names: dict[str, str], diags: list[Diagnostic], nested: bool = False
) -> FluentPattern | None:
    if not isinstance(raw, dict):
        diags.append(Diagnostic("schema", f"{where}: fluent pattern must be an object"))
        return None
    if "role" in raw:
        if set(raw) != {"role"}:
            diags.append(Diagnostic("schema", f"{where}: role pattern takes no other keys"))
            return None
        role = raw["role"]
        if role not in ROLES:
            diags.append(Diagnostic("unknown-role", f"{where}: unknown role {role!r}"))
            return None
        return FluentPattern("role", role=role)
    extra = set(raw) - {"class", "args"}
    if extra or "class" not in raw:
        diags.append(Diagnostic("schema", f"{where}: pattern needs 'class' (and optional 'args'), got {sorted(raw)}"))
        return None
    cls = raw["class"]
    args = raw.get("args", {}) or {}
    if not isinstance(args, dict):
        diags.append(Diagnostic("schema", f"{where}: args must be an object"))
        return None
    if cls not in CONSTRUCTORS:
        if names.get(cls) != "fluent":
            diags.append(Diagnostic("unknown-class", f"{where}: {cls!r} is not a fluent class"))
            return None
        if args:
            diags.append(Diagnostic("schema", f"{where}: fixed fluent class {cls!r} takes no args"))
            return None
        return FluentPattern("domain", cls=cls)
    if nested and cls in ("Commitment", "ConditionalCommitment"):
        diags.append(Diagnostic("nested-commitment", f"{where}: triggers and propositions cannot be commitments"))
        return None
    expected = _CONSTRUCTOR_ARGS[cls]
    if set(args) != set(expected):
        diags.append(Diagnostic("schema", f"{where}: {cls} expects args {list(expected)}, got {sorted(args)}"))
        return None
    ok = True
    for key in expected:
        if key in ("trigger", "proposition"):
            continue
        if args[key] not in ROLES:
            diags.append(Diagnostic("unknown-role", f"{where}: unknown role {args[key]!r} for {key}"))
            ok = False
    if not ok:
        return None
    if cls in ("Acceptance", "Rejection"):
        return FluentPattern(cls, actors=(args["signatory"], args["addressee"]), obj=args["object"])
    prop = _parse_pattern(args["proposition"], f"{where}.proposition", names, diags, nested=True)
    trig = None
    if cls == "ConditionalCommitment":
        trig = _parse_pattern(args["trigger"], f"{where}.trigger", names, diags, nested=True)
        if trig is None:
            return None
    if prop is None:
        return None
    return FluentPattern(cls, actors=(args["debtor"], args["creditor"]), trigger=trig, proposition=prop)


def _as_name_list(value: Any, where: str, diags: list[Diagnostic]) -> list[str]:
    if value is None:
        return []
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        diags.append(Diagnostic("schema", f"{where}: expected a list of class names"))
        return []
    return value


def load_taxonomy(document: str | bytes | Mapping[str, Any]) -> Taxonomy:
    """Parse and validate a taxonomy document (JSON text or decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise TaxonomyError([Diagnostic("schema", f"invalid JSON: {exc}")]) from None
    diags: list[Diagnostic] = []
    if not isinstance(document, Mapping):
        raise TaxonomyError([Diagnostic("schema", "taxonomy document must be an object")])
    unknown = set(document) - {"classes"}
    if unknown:
        diags.append(Diagnostic("schema", f"unknown top-level keys {sorted(unknown)}"))
    raw_classes = document.get("classes", [])
    if not isinstance(raw_classes, list):
        raise TaxonomyError(diags + [Diagnostic("schema", "'classes' must be a list")])

    names: dict[str, str] = {ACT_ROOT: "act", FLUENT_ROOT: "fluent"}
    entries: list[dict[str, Any]] = []
    for i, raw in enumerate(raw_classes):
        where = f"classes[{i}]"
        if not isinstance(raw, dict):
            diags.append(Diagnostic("schema", f"{where}: must be an object"))
            continue
        extra = set(raw) - _CLASS_KEYS
        if extra:
            diags.append(Diagnostic("schema", f"{where}: unknown keys {sorted(extra)}"))
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            diags.append(Diagnostic("schema", f"{where}: 'name' must be a non-empty string"))
            continue
        kind = raw.get("kind")
        if kind not in ("act", "fluent"):
            diags.append(Diagnostic("schema", f"{where} ({name}): 'kind' must be 'act' or 'fluent'"))
            continue
        if name in names or name in CONSTRUCTORS:
            diags.append(Diagnostic("duplicate-class", f"class {name!r} declared twice or reserved"))
            continue
        names[name] = kind
        entries.append(raw)

    infos: dict[str, ClassInfo] = {
        ACT_ROOT: ClassInfo(ACT_ROOT, "act", ()),
        FLUENT_ROOT: ClassInfo(FLUENT_ROOT, "fluent", ()),
    }
    for raw in entries:
        name, kind = raw["name"], raw["kind"]
        parents = _as_name_list(raw.get("parents"), name, diags)
        equivs = _as_name_list(raw.get("equivalentTo"), name, diags)
        for other in parents + equivs:
            if other not in names:
                diags.append(Diagnostic("unknown-parent", f"{name}: unknown class {other!r}"))
            elif names[other] != kind:
                diags.append(Diagnostic("kind-mismatch", f"{name} ({kind}) related to {other} ({names[other]})"))
        parents = [p for p in parents if names.get(p) == kind]
        equivs = [e for e in equivs if names.get(e) == kind]
        if not parents:
            parents = [ACT_ROOT if kind == "act" else FLUENT_ROOT]
        effects: list[EffectTemplate] = []
        raw_effects = raw.get("effects", []) or []
        if raw_effects and kind != "act":
            diags.append(Diagnostic("schema", f"{name}: only act classes carry effects"))
            raw_effects = []
        for j, eff in enumerate(raw_effects):
            where = f"{name}.effects[{j}]"
            if not isinstance(eff, dict) or set(eff) != {"kind", "fluent"}:
                diags.append(Diagnostic("schema", f"{where}: effect needs exactly 'kind' and 'fluent'"))
                continue
            if eff["kind"] not in ("initiates", "terminates"):
                diags.append(Diagnostic("schema", f"{where}: kind must be initiates|terminates"))
                continue
            pattern = _parse_pattern(eff["fluent"], where, names, diags)
            if pattern is not None:
                effects.append(EffectTemplate(eff["kind"], pattern))
        layer = raw.get("layer")
        infos[name] = ClassInfo(name, kind, tuple(parents), tuple(equivs), tuple(effects), layer)

    if diags:
        raise TaxonomyError(diags)
    return _build(infos)


def _build(infos: dict[str, ClassInfo]) -> Taxonomy:
    # union-find over declared equivalences
    rep = {n: n for n in infos}

    def find(x: str) -> str:
        while rep[x] != x:
            rep[x] = rep[rep[x]]
            x = rep[x]
        return x

    for info in infos.values():
        for other in info.equivalent_to:
            a, b = find(info.name), find(other)
            if a != b:
                rep[max(a, b)] = min(a, b)
    cluster = {n: find(n) for n in infos}

    graph: dict[str, set[str]] = {c: set() for c in sorted(set(cluster.values()))}
    for info in infos.values():
        for p in info.parents:
            if cluster[p] != cluster[info.name]:
                graph[cluster[info.name]].add(cluster[p])
    try:
        order = list(TopologicalSorter({c: sorted(ps) for c, ps in graph.items()}).static_order())
    except CycleError as exc:
        cyc = exc.args[1] if len(exc.args) > 1 else []
        raise TaxonomyError(
            [Diagnostic("cycle-in-hierarchy", f"subsumption cycle through {sorted(set(cyc))}")]
        ) from None

    members: dict[str, list[str]] = {}
    for n, c in cluster.items():
        members.setdefault(c, []).append(n)

    # parents come before children in static_order
    cluster_anc: dict[str, frozenset[str]] = {}
    for c in order:
        acc = {c}
        for p in graph[c]:
            acc |= cluster_anc[p]
        cluster_anc[c] = frozenset(acc)
    ancestors = {
        n: frozenset(m for c in cluster_anc[cluster[n]] for m in members[c]) for n in infos
    }

    effects: dict[str, tuple[EffectTemplate, ...]] = {}
    for n, info in infos.items():
        if info.kind != "act":
            continue
        # own templates first, then more specific ancestors before general ones
        others = sorted(ancestors[n] - {n}, key=lambda a: (-len(ancestors[a]), a))
        seen: list[EffectTemplate] = []
        for source in [n] + others:
            for e in infos[source].effects:
                if e not in seen:
                    seen.append(e)
        effects[n] = tuple(seen)

    return Taxonomy(classes=infos, _cluster=cluster, _ancestors=ancestors, _effects=effects)
