"""Reify flat triples into grounded event subgraphs.

Every mapped triple becomes (or joins) an event occurrent whose participants
and attribute instances carry what the flat relation name used to smuggle.
Node ids are derived from content (FNV-1a of labels and slot keys), so the
output graph is identical for any permutation of the input and for synonym
relation names that normalize to the same rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from .embedding import tokenize
from .errors import UnknownTypeError
from .formats import FlatTriple, GkgDocument
from .hashing import fnv1a64_hex
from .model import (
    Edge,
    GroundedGraph,
    Node,
    NodeId,
    NodeKind,
    PrimitiveRelation,
    ROOT_TYPE,
    TypeHierarchy,
)
from .multilingual import LabelTable
from .schema import (
    AttrMode,
    AttrSlot,
    Cardinality,
    ParticipantSlot,
    ReificationRule,
    SchemaDeclarations,
)

ENTITY_NAMESPACE = "ent"
EVENT_NAMESPACE = "ev"
ATTRIBUTE_NAMESPACE = "at"
VALUE_NAMESPACE = "val"


@dataclass(frozen=True, slots=True)
class ValueConflict:
    """A FUNCTIONAL slot received more than one distinct value in one run.
    Both values stay in the graph; the conflict is only flagged here."""

    event: NodeId
    attr_type: NodeId
    literals: Tuple[str, ...]


@dataclass(frozen=True)
class CanonReport:
    events_created: int = 0
    events_coalesced: int = 0
    unmapped_relations: FrozenSet[str] = frozenset()
    entity_nodes_created: int = 0
    value_conflicts: Tuple[ValueConflict, ...] = ()


def normalize_relation_name(
    label: str, rules: Sequence[ReificationRule]
) -> Optional[ReificationRule]:
    """Return the first rule whose relation name has the same token
    sequence as ``label`` after lowercasing and camelCase/underscore/space
    splitting, or None.  ``bornIn``, ``born_in`` and ``Born In`` all meet
    the same rule."""
    key = tuple(tokenize(label))
    for rule in rules:
        if tuple(tokenize(rule.rel_name)) == key:
            return rule
    return None


def canonicalize(
    triples: Iterable[FlatTriple],
    rules: Sequence[ReificationRule],
    hierarchy: TypeHierarchy,
    entity_types: Optional[Mapping[str, NodeId]] = None,
    declarations: Optional[SchemaDeclarations] = None,
) -> Tuple[GroundedGraph, CanonReport]:
    """Ground flat triples against reification rules.

    Unmapped relation names are reported, never fatal.  All types the rules
    and the entity-type map mention must already be in the hierarchy.
    """
    graph, report, _ = _canonicalize(triples, rules, hierarchy, entity_types, declarations)
    return graph, report


def canonicalize_document(
    triples: Iterable[FlatTriple],
    rules: Sequence[ReificationRule],
    declarations: Optional[SchemaDeclarations] = None,
    hierarchy: Optional[TypeHierarchy] = None,
    entity_types: Optional[Mapping[str, NodeId]] = None,
    lang: str = "en",
    source_id: str = "",
    revision: int = 0,
) -> Tuple[GkgDocument, CanonReport]:
    """Like :func:`canonicalize` but package the result as a document:
    entity labels are recorded under ``lang`` and the declarations ride
    along.  Without an explicit hierarchy one is synthesized from every
    type the rules, declarations and entity-type map mention."""
    if hierarchy is None:
        hierarchy = hierarchy_for_rules(rules, declarations, entity_types)
    graph, report, entity_labels = _canonicalize(
        triples, rules, hierarchy, entity_types, declarations
    )
    graph = GroundedGraph(graph.nodes, graph.edges, source_id, revision)
    labels = LabelTable.from_entries(
        (node_id, lang, label) for node_id, label in sorted(entity_labels.items(), key=lambda kv: str(kv[0]))
    )
    doc = GkgDocument(hierarchy, graph, labels, declarations or SchemaDeclarations.empty())
    return doc, report


def hierarchy_for_rules(
    rules: Sequence[ReificationRule],
    declarations: Optional[SchemaDeclarations] = None,
    entity_types: Optional[Mapping[str, NodeId]] = None,
) -> TypeHierarchy:
    """Root plus every type referenced by the rules, declarations and
    entity-type map, all as direct children of the root."""
    types: set = set()
    for rule in rules:
        types.update(rule.referenced_types())
    if declarations is not None:
        types.update(declarations.referenced_types())
    if entity_types:
        types.update(entity_types.values())
    return TypeHierarchy.from_edges((t, None) for t in sorted(types, key=str))


def _canonicalize(triples, rules, hierarchy, entity_types, declarations):
    entity_types = dict(entity_types or {})
    declarations = declarations or SchemaDeclarations.empty()

    for rule in rules:
        for type_id in rule.referenced_types():
            if type_id not in hierarchy:
                raise UnknownTypeError(f"rule {rule.rel_name!r} references unknown type {type_id}")
    for label, type_id in entity_types.items():
        if type_id not in hierarchy:
            raise UnknownTypeError(f"entity type for {label!r} unknown: {type_id}")
    if ROOT_TYPE not in hierarchy:
        raise UnknownTypeError(f"hierarchy lacks the root type {ROOT_TYPE}")

    nodes: dict = {t: Node(t, NodeKind.TYPE_NODE) for t in hierarchy.types}
    edges: set = set()
    entity_ids: dict = {}  # label -> NodeId
    entity_labels: dict = {}  # NodeId -> label
    events_created = 0
    events_coalesced = 0
    unmapped: set = set()
    # (event id, attr type) -> {literal: value id}; used for conflict flags.
    slot_values: dict = {}

    def ensure_entity(label: str) -> NodeId:
        nonlocal nodes
        existing = entity_ids.get(label)
        if existing is not None:
            return existing
        node_id = NodeId(ENTITY_NAMESPACE, fnv1a64_hex(label))
        entity_ids[label] = node_id
        entity_labels[node_id] = label
        nodes[node_id] = Node(
            node_id, NodeKind.CONTINUANT, inst_of=entity_types.get(label, ROOT_TYPE)
        )
        return node_id

    for triple in triples:
        rule = normalize_relation_name(triple.r, rules)
        if rule is None:
            unmapped.add(triple.r)
            continue

        subject_id = ensure_entity(triple.e1)

        if declarations.card_of(rule.event_type) is Cardinality.ONE:
            event_key = fnv1a64_hex(triple.e1)
        else:
            event_key = fnv1a64_hex(f"{triple.e1}\t{triple.e2}")
        event_id = NodeId(EVENT_NAMESPACE, f"{rule.event_type.local}#{event_key}")
        if event_id in nodes:
            events_coalesced += 1
        else:
            nodes[event_id] = Node(event_id, NodeKind.OCCURRENT, inst_of=rule.event_type)
            events_created += 1
        edges.add(Edge(event_id, rule.subject_role, subject_id))

        slot = rule.object_slot
        if isinstance(slot, ParticipantSlot):
            edges.add(Edge(event_id, slot.role, ensure_entity(triple.e2)))
            continue

        literal = triple.e2
        value_id = NodeId(VALUE_NAMESPACE, f"{slot.value_type.local}#{fnv1a64_hex(literal)}")
        if value_id not in nodes:
            nodes[value_id] = Node(
                value_id, NodeKind.VALUE_LITERAL, inst_of=slot.value_type, literal=literal
            )
        mode = declarations.mode_of(rule.event_type, slot.attr_type)
        if mode is AttrMode.FUNCTIONAL:
            attr_key = fnv1a64_hex(str(event_id))
        else:
            attr_key = fnv1a64_hex(f"{event_id}\t{literal}")
        attr_id = NodeId(ATTRIBUTE_NAMESPACE, f"{slot.attr_type.local}#{attr_key}")
        if attr_id not in nodes:
            nodes[attr_id] = Node(attr_id, NodeKind.ATTRIBUTE_INSTANCE, inst_of=slot.attr_type)
        edges.add(Edge(attr_id, PrimitiveRelation.HAS_PROP, event_id))
        edges.add(Edge(attr_id, PrimitiveRelation.HAS_VALUE, value_id))
        if mode is AttrMode.FUNCTIONAL:
            slot_values.setdefault((event_id, slot.attr_type), {})[literal] = value_id

    conflicts = tuple(
        ValueConflict(event_id, attr_type, tuple(sorted(values)))
        for (event_id, attr_type), values in sorted(
            slot_values.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))
        )
        if len(values) > 1
    )
    report = CanonReport(
        events_created=events_created,
        events_coalesced=events_coalesced,
        unmapped_relations=frozenset(unmapped),
        entity_nodes_created=len(entity_ids),
        value_conflicts=conflicts,
    )
    graph = GroundedGraph(nodes, frozenset(edges))
    return graph, report, entity_labels
