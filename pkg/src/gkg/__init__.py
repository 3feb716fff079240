"""Toolkit for grounded knowledge graphs.

Graphs here reify events, attributes and values as first-class typed
nodes and connect them with a small closed set of primitive relations.
The package covers parsing and canonical serialization, validation
against relation signatures, lifting flat subject/relation/object triples
into the grounded shape, embedding-based entity alignment, revision-aware
merging, and multilingual rendering.
"""

from .alignment import (
    DEFAULT_AMBIGUITY_BAND,
    DEFAULT_THRESHOLD,
    AlignmentConfig,
    AlignmentResult,
    EntitySignature,
    align,
    entity_signature,
    fact_slot_key,
    flat_align,
    format_alignment_tsv,
    parse_alignment_tsv,
    signature_similarity,
    slot_similarities,
)
from .canonicalize import (
    CanonReport,
    ValueConflict,
    canonicalize,
    canonicalize_document,
    hierarchy_for_rules,
    normalize_relation_name,
)
from .embedding import (
    DEFAULT_DIM,
    FileEmbeddingProvider,
    HashEmbeddingProvider,
    cosine,
    embed_flat_triple,
    embed_phrase,
    embed_token,
    normalized,
    tokenize,
)
from .errors import (
    AlignmentMismatchError,
    CycleError,
    DuplicateNodeError,
    DuplicateRuleError,
    DuplicateTypeError,
    EmptyTokenError,
    GkgError,
    GkgSyntaxError,
    IdCollisionError,
    MalformedLineError,
    NotAContinuantError,
    SignatureViolationError,
    UnknownNodeError,
    UnknownParentError,
    UnknownRoleError,
    UnknownTypeError,
    ValidationFailedError,
    VectorFileError,
)
from .formats import (
    FlatTriple,
    GkgDocument,
    parse_flat,
    parse_gkg,
    parse_rules,
    serialize_gkg,
    validate_document,
)
from .hashing import SplitMix64, fnv1a64, fnv1a64_hex
from .merge import (
    ConflictEntry,
    MergePolicy,
    MergeReport,
    UpdateEntry,
    merge,
    merge_documents,
    union_hierarchies,
)
from .model import (
    PARTICIPANT_RELATIONS,
    RELATION_SIGNATURES,
    ROOT_TYPE,
    Edge,
    GroundedGraph,
    IssueKind,
    Node,
    NodeId,
    NodeKind,
    PrimitiveRelation,
    RoleConceptDef,
    TypeHierarchy,
    ValidationIssue,
    ValidationReport,
    infer_role_labels,
    signature_allows,
    validate_graph,
)
from .multilingual import (
    FALLBACK_LANG,
    IsomorphismResult,
    LabelTable,
    LabeledView,
    check_isomorphic,
    gloss_id,
    render,
)
from .schema import (
    AttrMode,
    AttrSlot,
    Cardinality,
    ObjectSlot,
    ParticipantSlot,
    ReificationRule,
    SchemaDeclarations,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentConfig",
    "AlignmentMismatchError",
    "AlignmentResult",
    "AttrMode",
    "AttrSlot",
    "CanonReport",
    "Cardinality",
    "ConflictEntry",
    "CycleError",
    "DEFAULT_AMBIGUITY_BAND",
    "DEFAULT_DIM",
    "DEFAULT_THRESHOLD",
    "DuplicateNodeError",
    "DuplicateRuleError",
    "DuplicateTypeError",
    "Edge",
    "EmptyTokenError",
    "EntitySignature",
    "FALLBACK_LANG",
    "FileEmbeddingProvider",
    "FlatTriple",
    "GkgDocument",
    "GkgError",
    "GkgSyntaxError",
    "GroundedGraph",
    "HashEmbeddingProvider",
    "IdCollisionError",
    "IsomorphismResult",
    "IssueKind",
    "LabelTable",
    "LabeledView",
    "MalformedLineError",
    "MergePolicy",
    "MergeReport",
    "Node",
    "NodeId",
    "NodeKind",
    "NotAContinuantError",
    "ObjectSlot",
    "PARTICIPANT_RELATIONS",
    "ParticipantSlot",
    "PrimitiveRelation",
    "RELATION_SIGNATURES",
    "ROOT_TYPE",
    "ReificationRule",
    "RoleConceptDef",
    "SchemaDeclarations",
    "SignatureViolationError",
    "SplitMix64",
    "TypeHierarchy",
    "UnknownNodeError",
    "UnknownParentError",
    "UnknownRoleError",
    "UnknownTypeError",
    "UpdateEntry",
    "ValidationFailedError",
    "ValidationIssue",
    "ValidationReport",
    "ValueConflict",
    "VectorFileError",
    "align",
    "canonicalize",
    "canonicalize_document",
    "check_isomorphic",
    "cosine",
    "embed_flat_triple",
    "embed_phrase",
    "embed_token",
    "entity_signature",
    "fact_slot_key",
    "flat_align",
    "fnv1a64",
    "fnv1a64_hex",
    "format_alignment_tsv",
    "gloss_id",
    "hierarchy_for_rules",
    "infer_role_labels",
    "merge",
    "merge_documents",
    "normalize_relation_name",
    "normalized",
    "parse_alignment_tsv",
    "parse_flat",
    "parse_gkg",
    "parse_rules",
    "render",
    "serialize_gkg",
    "signature_allows",
    "signature_similarity",
    "slot_similarities",
    "tokenize",
    "union_hierarchies",
    "validate_document",
    "validate_graph",
]
