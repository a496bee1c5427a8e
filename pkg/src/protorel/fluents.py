"""Fluents: atoms of interaction state.

A fluent is either a domain proposition (an instance of a fluent class of
the taxonomy), an acceptance/rejection record, a base commitment
``C(debtor, creditor, p)`` or a conditional commitment
``CC(debtor, creditor, trigger, p)``.  Time points are not represented;
identity is purely structural, so frozen dataclasses give set semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Union


@dataclass(frozen=True)
class Domain:
    cls: str

    def __str__(self) -> str:
        return self.cls


@dataclass(frozen=True)
class Acceptance:
    signatory: str
    addressee: str
    obj: str

    def __str__(self) -> str:
        return f"accept({self.signatory},{self.addressee},{self.obj})"


@dataclass(frozen=True)
class Rejection:
    signatory: str
    addressee: str
    obj: str

    def __str__(self) -> str:
        return f"Rejection({self.signatory},{self.addressee},{self.obj})"


@dataclass(frozen=True)
class Commitment:
    debtor: str
    creditor: str
    proposition: "Fluent"

    def __str__(self) -> str:
        return f"C({self.debtor},{self.creditor},{self.proposition})"


@dataclass(frozen=True)
class ConditionalCommitment:
    debtor: str
    creditor: str
    trigger: "Fluent"
    proposition: "Fluent"

    def __str__(self) -> str:
        return f"CC({self.debtor},{self.creditor},{self.trigger},{self.proposition})"


Fluent = Union[Domain, Acceptance, Rejection, Commitment, ConditionalCommitment]
FluentSet = frozenset  # frozenset[Fluent]

COMMITMENT_TYPES = (Commitment, ConditionalCommitment)


def variant(f: Fluent) -> str:
    return type(f).__name__


def sorted_fluents(fluents: Iterable[Fluent]) -> list[Fluent]:
    """Deterministic ordering used for every printed or serialized fluent set."""
    return sorted(fluents, key=lambda f: (variant(f), str(f)))


def fluent_to_json(f: Fluent) -> dict[str, Any]:
    if isinstance(f, Domain):
        return {"type": "Domain", "class": f.cls}
    if isinstance(f, (Acceptance, Rejection)):
        return {"type": variant(f), "signatory": f.signatory, "addressee": f.addressee, "object": f.obj}
    if isinstance(f, Commitment):
        return {
            "type": "Commitment",
            "debtor": f.debtor,
            "creditor": f.creditor,
            "proposition": fluent_to_json(f.proposition),
        }
    return {
        "type": "ConditionalCommitment",
        "debtor": f.debtor,
        "creditor": f.creditor,
        "trigger": fluent_to_json(f.trigger),
        "proposition": fluent_to_json(f.proposition),
    }


def fluent_from_json(data: dict[str, Any]) -> Fluent:
    kind = data["type"]
    if kind == "Domain":
        return Domain(data["class"])
    if kind == "Acceptance":
        return Acceptance(data["signatory"], data["addressee"], data["object"])
    if kind == "Rejection":
        return Rejection(data["signatory"], data["addressee"], data["object"])
    if kind == "Commitment":
        return Commitment(data["debtor"], data["creditor"], fluent_from_json(data["proposition"]))
    if kind == "ConditionalCommitment":
        return ConditionalCommitment(
            data["debtor"],
            data["creditor"],
            fluent_from_json(data["trigger"]),
            fluent_from_json(data["proposition"]),
        )
    raise ValueError(f"unknown fluent type {kind!r}")


def fluent_set_to_json(fluents: Iterable[Fluent]) -> list[dict[str, Any]]:
    return [fluent_to_json(f) for f in sorted_fluents(fluents)]
