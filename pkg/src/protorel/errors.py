"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def as_dict(self) -> dict[str, str]:
        return {"code": self.code, "message": self.message}


class ValidationError(ValueError):
    """Raised when a taxonomy or protocol document fails validation.

    Carries every problem found, not only the first one, so the CLI can
    report them all as JSON lines.
    """

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(f"{d.code}: {d.message}" for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


class TaxonomyError(ValidationError):
    pass


class ProtocolError(ValidationError):
    pass


class UnknownClassError(KeyError):
    code = "unknown-class"


class MscError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class UnboundRoleError(ValueError):
    code = "unbound-role"


class InfeasiblePairError(ValueError):
    code = "infeasible-pair"
