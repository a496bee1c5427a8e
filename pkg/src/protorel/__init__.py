"""Commitment semantics of agent interaction protocols and relations between protocols."""

from .branching import branch_name, derive_all, enumerate_branches
from .comparison import (
    Cell,
    FluentCase,
    Matching,
    Valuation,
    best_matching,
    compare_fluents,
    comparison_table,
    is_feasible,
    similarity,
    tie_break,
    valuate,
)
from .derivation import DerivedBranch, apply_transition, derive, step_effects
from .errors import (
    Diagnostic,
    InfeasiblePairError,
    MscError,
    ProtocolError,
    TaxonomyError,
    UnboundRoleError,
    UnknownClassError,
    ValidationError,
)
from .fluents import Acceptance, Commitment, ConditionalCommitment, Domain, Rejection
from .protocol import ActInstance, Branch, Protocol, Transition, change_init, load_protocol, protocol_from_branches, prune
from .relations import (
    BranchKind,
    BranchRelation,
    Classification,
    RelationLabel,
    Relator,
    branch_equivalent,
    branch_relation,
    branch_specializes,
    classify,
)
from .taxonomy import Taxonomy, load_taxonomy

__all__ = [name for name in dir() if not name.startswith("_")]
