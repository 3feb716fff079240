"""Core graph model.

Nodes come in five kinds (type nodes, continuants, occurrents, attribute
instances, value literals) and edges may only carry one of the thirteen
primitive relations.  Everything else that looks like a relation in source
data must be reified into typed nodes before it enters a graph.

All values are treated as immutable; operations that "modify" a hierarchy
or a graph return a new instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import (
    CycleError,
    DuplicateNodeError,
    DuplicateTypeError,
    SignatureViolationError,
    UnknownNodeError,
    UnknownParentError,
    UnknownTypeError,
)


@dataclass(frozen=True, slots=True)
class NodeId:
    """Opaque canonical key of a node, written ``namespace:local``.

    Ids carry no linguistic content by contract; human-readable labels live
    in a label table keyed by these ids.  Comparison and ordering use the
    combined string form.
    """

    namespace: str
    local: str

    def __post_init__(self):
        combined = f"{self.namespace}:{self.local}"
        if not self.namespace or not self.local:
            raise ValueError(f"node id needs a namespace and a local part: {combined!r}")
        if not combined.isascii() or any(ch.isspace() for ch in combined):
            raise ValueError(f"node id must be ASCII without whitespace: {combined!r}")

    @classmethod
    def parse(cls, text: str) -> "NodeId":
        """Split ``namespace:local`` on the first colon."""
        namespace, sep, local = text.partition(":")
        if not sep:
            raise ValueError(f"node id must contain a colon: {text!r}")
        return cls(namespace, local)

    def __str__(self) -> str:
        return f"{self.namespace}:{self.local}"

    def __lt__(self, other: "NodeId") -> bool:
        return str(self) < str(other)


ROOT_TYPE = NodeId("core", "Entity")


class NodeKind(str, Enum):
    TYPE_NODE = "T"
    CONTINUANT = "C"
    OCCURRENT = "O"
    ATTRIBUTE_INSTANCE = "A"
    VALUE_LITERAL = "V"


class PrimitiveRelation(str, Enum):
    """The closed edge vocabulary.  Nothing else may label an edge."""

    EQ = "eq"
    IS_PART_OF = "isPartOf"
    INST = "inst"
    HAS_PROP = "hasProp"
    EXEMP = "exemp"
    DEP = "dep"
    IS_A = "isA"
    PRECEDES = "precedes"
    PARTICIPANT_IN = "participantIn"
    HAS_AGENT = "hasAgent"
    HAS_OBJECT = "hasObject"
    HAS_VALUE = "hasValue"
    REALIZES = "realizes"

    @classmethod
    def parse(cls, name: str) -> "PrimitiveRelation":
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown primitive relation: {name!r}") from None


#: Relations that attach a participant entity to an occurrent.  Only these
#: may appear as the ``via`` of a role-concept definition.
PARTICIPANT_RELATIONS = frozenset(
    {
        PrimitiveRelation.PARTICIPANT_IN,
        PrimitiveRelation.HAS_AGENT,
        PrimitiveRelation.HAS_OBJECT,
    }
)

_ALL_KINDS = tuple(NodeKind)
_ANY_PAIRS = frozenset((a, b) for a in _ALL_KINDS for b in _ALL_KINDS)
_SAME_KIND_PAIRS = frozenset((k, k) for k in _ALL_KINDS)
_NON_TYPE = tuple(k for k in _ALL_KINDS if k is not NodeKind.TYPE_NODE)
_C, _O, _A, _V, _T = (
    NodeKind.CONTINUANT,
    NodeKind.OCCURRENT,
    NodeKind.ATTRIBUTE_INSTANCE,
    NodeKind.VALUE_LITERAL,
    NodeKind.TYPE_NODE,
)

#: Admissible (subject kind, object kind) pairs per relation.  The subject
#: comes first exactly as written in an edge record, so for example a
#: participantIn edge reads "the continuant object participates in the
#: occurrent subject".
RELATION_SIGNATURES: Mapping[PrimitiveRelation, frozenset] = {
    PrimitiveRelation.EQ: _SAME_KIND_PAIRS,
    PrimitiveRelation.IS_PART_OF: frozenset({(_C, _C), (_O, _O)}),
    PrimitiveRelation.INST: frozenset((k, _T) for k in _NON_TYPE),
    PrimitiveRelation.HAS_PROP: frozenset({(_A, _C), (_A, _O)}),
    PrimitiveRelation.EXEMP: frozenset({(_C, _T), (_O, _T)}),
    PrimitiveRelation.DEP: _ANY_PAIRS,
    PrimitiveRelation.IS_A: frozenset({(_T, _T)}),
    PrimitiveRelation.PRECEDES: frozenset({(_O, _O)}),
    PrimitiveRelation.PARTICIPANT_IN: frozenset({(_O, _C)}),
    PrimitiveRelation.HAS_AGENT: frozenset({(_O, _C)}),
    PrimitiveRelation.HAS_OBJECT: frozenset({(_O, _C)}),
    PrimitiveRelation.HAS_VALUE: frozenset({(_A, _V)}),
    PrimitiveRelation.REALIZES: frozenset({(_O, _C), (_O, _A)}),
}


def signature_allows(rel: PrimitiveRelation, subject_kind: NodeKind, object_kind: NodeKind) -> bool:
    return (subject_kind, object_kind) in RELATION_SIGNATURES[rel]


@dataclass(frozen=True, slots=True)
class Node:
    """A typed node.  ``inst_of`` names the node's type; ``literal`` holds
    the raw text of a value literal and must be absent everywhere else.

    The constructor is deliberately permissive: discipline violations
    (untyped non-type nodes, stray literals) are reported by
    :func:`validate_graph` rather than made unrepresentable.
    """

    id: NodeId
    kind: NodeKind
    inst_of: Optional[NodeId] = None
    literal: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Edge:
    subject: NodeId
    relation: PrimitiveRelation
    obj: NodeId

    def sort_key(self) -> tuple:
        return (str(self.subject), self.relation.value, str(self.obj))


@dataclass(frozen=True, slots=True)
class RoleConceptDef:
    """A role concept such as Teacher: instances of ``base_type`` that stand
    in ``via`` to an occurrent of ``occurrent_type`` carry ``role_name``.

    Roles are inferred labels, never types; they must not appear in a
    hierarchy.
    """

    role_name: str
    base_type: NodeId
    via: PrimitiveRelation
    occurrent_type: NodeId

    def __post_init__(self):
        if self.via not in PARTICIPANT_RELATIONS:
            raise ValueError(f"role via must be a participant relation, got {self.via.value}")
        if not self.role_name or any(ch.isspace() for ch in self.role_name):
            raise ValueError(f"role name must be non-empty without whitespace: {self.role_name!r}")


@dataclass(frozen=True)
class TypeHierarchy:
    """A DAG of type nodes.  Multiple parents are allowed, cycles are not,
    and ``core:Entity`` is an ancestor of every other type.

    ``parents`` holds an entry for every type (empty only for the root).
    """

    types: frozenset = frozenset()
    parents: Mapping[NodeId, frozenset] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "TypeHierarchy":
        """A hierarchy with no types at all (not even the root)."""
        return cls()

    @classmethod
    def root_only(cls) -> "TypeHierarchy":
        return cls(frozenset({ROOT_TYPE}), {ROOT_TYPE: frozenset()})

    def __contains__(self, type_id: NodeId) -> bool:
        return type_id in self.types

    def add_type(self, type_id: NodeId, parent: Optional[NodeId] = None) -> "TypeHierarchy":
        """Insert one new type.  ``parent`` defaults to the root; only the
        root itself may be inserted without a parent."""
        if type_id in self.types:
            raise DuplicateTypeError(f"type already present: {type_id}")
        if parent is None and type_id != ROOT_TYPE:
            parent = ROOT_TYPE
        if parent is not None and parent not in self.types:
            raise UnknownParentError(f"unknown parent type: {parent}")
        parent_set = frozenset() if parent is None else frozenset({parent})
        new_parents = dict(self.parents)
        new_parents[type_id] = parent_set
        return TypeHierarchy(self.types | {type_id}, new_parents)

    @classmethod
    def from_edges(cls, pairs: Iterable[tuple]) -> "TypeHierarchy":
        """Batch-load (type, parent-or-None) pairs.

        Tolerant of repeats, auto-registers referenced parents, and parents
        every otherwise parentless non-root type to the root.  Raises
        :class:`CycleError` if the result would not be a DAG.
        """
        types = {ROOT_TYPE}
        parent_sets: dict = {ROOT_TYPE: set()}
        for type_id, parent in pairs:
            types.add(type_id)
            parent_sets.setdefault(type_id, set())
            if parent is None:
                continue
            types.add(parent)
            parent_sets.setdefault(parent, set())
            parent_sets[type_id].add(parent)
        for type_id in types:
            if type_id != ROOT_TYPE and not parent_sets[type_id]:
                parent_sets[type_id].add(ROOT_TYPE)

        # Kahn's algorithm over child -> parent edges to certify acyclicity.
        out_degree = {t: len(parent_sets[t]) for t in types}
        children: dict = {t: [] for t in types}
        for child, ps in parent_sets.items():
            for parent in ps:
                children[parent].append(child)
        ready = [t for t, deg in out_degree.items() if deg == 0]
        seen = 0
        while ready:
            current = ready.pop()
            seen += 1
            for child in children[current]:
                out_degree[child] -= 1
                if out_degree[child] == 0:
                    ready.append(child)
        if seen != len(types):
            raise CycleError([t for t, deg in out_degree.items() if deg > 0])

        return cls(frozenset(types), {t: frozenset(ps) for t, ps in parent_sets.items()})

    def ancestors(self, type_id: NodeId) -> frozenset:
        """All supertypes of ``type_id`` including itself."""
        if type_id not in self.types:
            raise UnknownTypeError(f"unknown type: {type_id}")
        closed: set = set()
        frontier = [type_id]
        while frontier:
            current = frontier.pop()
            if current in closed:
                continue
            closed.add(current)
            frontier.extend(self.parents.get(current, frozenset()))
        return frozenset(closed)

    def is_subtype(self, sub: NodeId, sup: NodeId) -> bool:
        """Reflexive-transitive reachability over the parent edges."""
        if sub not in self.types:
            raise UnknownTypeError(f"unknown type: {sub}")
        if sup not in self.types:
            raise UnknownTypeError(f"unknown type: {sup}")
        return sup in self.ancestors(sub)

    def sorted_types(self) -> list:
        return sorted(self.types, key=str)


@dataclass(frozen=True)
class GroundedGraph:
    """An edge-labelled graph over typed nodes.

    ``nodes`` may include the type nodes of the companion hierarchy so that
    inst/isA/exemp edges resolve inside the graph itself.  ``source_id``
    and ``revision`` identify the originating knowledge graph and its
    version for merge conflict resolution.
    """

    nodes: Mapping[NodeId, Node] = field(default_factory=dict)
    edges: frozenset = frozenset()
    source_id: str = ""
    revision: int = 0

    @classmethod
    def empty(cls, source_id: str = "", revision: int = 0) -> "GroundedGraph":
        return cls({}, frozenset(), source_id, revision)

    @classmethod
    def build(
        cls,
        nodes: Iterable[Node] = (),
        edges: Iterable = (),
        source_id: str = "",
        revision: int = 0,
    ) -> "GroundedGraph":
        """Construct a graph in one shot with the same checks as the
        incremental operations (duplicate ids, edge signatures)."""
        table: dict = {}
        for node in nodes:
            existing = table.get(node.id)
            if existing is not None and existing != node:
                raise DuplicateNodeError(f"conflicting nodes under id {node.id}")
            table[node.id] = node
        edge_set: set = set()
        for item in edges:
            edge = item if isinstance(item, Edge) else Edge(*item)
            _check_edge(table, edge.subject, edge.relation, edge.obj)
            edge_set.add(edge)
        return cls(table, frozenset(edge_set), source_id, revision)

    def node(self, node_id: NodeId) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node: {node_id}") from None

    def __contains__(self, node_id: NodeId) -> bool:
        return node_id in self.nodes

    def with_node(self, node: Node) -> "GroundedGraph":
        existing = self.nodes.get(node.id)
        if existing == node:
            return self
        if existing is not None:
            raise DuplicateNodeError(f"conflicting nodes under id {node.id}")
        new_nodes = dict(self.nodes)
        new_nodes[node.id] = node
        return GroundedGraph(new_nodes, self.edges, self.source_id, self.revision)

    def add_edge(self, subject: NodeId, relation: PrimitiveRelation, obj: NodeId) -> "GroundedGraph":
        """Return a graph that also contains the edge.  Both endpoints must
        already exist and the relation must admit their kinds.  Re-adding an
        existing edge is a no-op."""
        _check_edge(self.nodes, subject, relation, obj)
        edge = Edge(subject, relation, obj)
        if edge in self.edges:
            return self
        return GroundedGraph(self.nodes, self.edges | {edge}, self.source_id, self.revision)

    def kind_of(self, node_id: NodeId) -> NodeKind:
        return self.node(node_id).kind

    def nodes_of_kind(self, kind: NodeKind) -> Iterator[Node]:
        for node_id in sorted(self.nodes, key=str):
            node = self.nodes[node_id]
            if node.kind is kind:
                yield node

    def continuants(self) -> Iterator[Node]:
        return self.nodes_of_kind(NodeKind.CONTINUANT)

    def edges_sorted(self) -> list:
        return sorted(self.edges, key=Edge.sort_key)


def _check_edge(nodes: Mapping[NodeId, Node], subject: NodeId, relation: PrimitiveRelation, obj: NodeId) -> None:
    subject_node = nodes.get(subject)
    if subject_node is None:
        raise UnknownNodeError(f"unknown node: {subject}")
    object_node = nodes.get(obj)
    if object_node is None:
        raise UnknownNodeError(f"unknown node: {obj}")
    if not signature_allows(relation, subject_node.kind, object_node.kind):
        raise SignatureViolationError(relation, subject_node.kind, object_node.kind)


class IssueKind(str, Enum):
    DANGLING_REFERENCE = "dangling-reference"
    SIGNATURE_VIOLATION = "signature-violation"
    UNTYPED_NODE = "untyped-node"
    TYPE_NODE_TYPED = "type-node-typed"
    LITERAL_MISMATCH = "literal-mismatch"
    UNKNOWN_TYPE_TARGET = "unknown-type-target"
    HIERARCHY_MISMATCH = "hierarchy-mismatch"


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    kind: IssueKind
    context: str
    message: str

    def sort_key(self) -> tuple:
        return (self.kind.value, self.context, self.message)


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self) -> bool:
        return self.ok

    def to_tsv(self) -> str:
        return "".join(
            f"issue\t{i.kind.value}\t{i.context}\t{i.message}\n" for i in self.issues
        )


def validate_graph(graph: GroundedGraph, hierarchy: TypeHierarchy) -> ValidationReport:
    """Audit a graph against the closed relation vocabulary and the typing
    discipline.  Returns a deterministic, possibly empty report; never
    raises on content."""
    issues: list = []

    def report(kind: IssueKind, context, message: str) -> None:
        issues.append(ValidationIssue(kind, str(context), message))

    for node_id in sorted(graph.nodes, key=str):
        node = graph.nodes[node_id]
        if node.kind is NodeKind.TYPE_NODE:
            if node.inst_of is not None:
                report(IssueKind.TYPE_NODE_TYPED, node_id, "type node carries inst_of")
            if node.literal is not None:
                report(IssueKind.LITERAL_MISMATCH, node_id, "type node carries a literal")
            if node_id not in hierarchy:
                report(IssueKind.HIERARCHY_MISMATCH, node_id, "type node absent from hierarchy")
            continue
        if node.inst_of is None:
            report(IssueKind.UNTYPED_NODE, node_id, "non-type node without inst_of")
        elif node.inst_of not in hierarchy:
            report(IssueKind.UNKNOWN_TYPE_TARGET, node_id, f"inst target {node.inst_of} not in hierarchy")
        if node.kind is NodeKind.VALUE_LITERAL:
            if not node.literal:
                report(IssueKind.LITERAL_MISMATCH, node_id, "value literal without literal text")
        elif node.literal is not None:
            report(IssueKind.LITERAL_MISMATCH, node_id, "literal on a non-value node")

    for edge in graph.edges_sorted():
        subject_node = graph.nodes.get(edge.subject)
        object_node = graph.nodes.get(edge.obj)
        context = f"{edge.subject} {edge.relation.value} {edge.obj}"
        if subject_node is None:
            report(IssueKind.DANGLING_REFERENCE, context, f"missing subject {edge.subject}")
        if object_node is None:
            report(IssueKind.DANGLING_REFERENCE, context, f"missing object {edge.obj}")
        if subject_node is None or object_node is None:
            continue
        if not signature_allows(edge.relation, subject_node.kind, object_node.kind):
            report(
                IssueKind.SIGNATURE_VIOLATION,
                context,
                f"{edge.relation.value} does not admit "
                f"({subject_node.kind.name}, {object_node.kind.name})",
            )

    return ValidationReport(tuple(sorted(issues, key=ValidationIssue.sort_key)))


def infer_role_labels(
    graph: GroundedGraph,
    hierarchy: TypeHierarchy,
    defs: Sequence[RoleConceptDef],
) -> tuple:
    """Compute every (node id, role name) pair licensed by the definitions.

    A pair (x, R) holds iff x is typed by a subtype of R.base_type and some
    occurrent typed by a subtype of R.occurrent_type reaches x through
    R.via.  The graph is assumed valid.  Output is sorted by (id, role).
    """
    for role_def in defs:
        if role_def.base_type not in hierarchy:
            raise UnknownTypeError(f"role {role_def.role_name}: unknown base type {role_def.base_type}")
        if role_def.occurrent_type not in hierarchy:
            raise UnknownTypeError(
                f"role {role_def.role_name}: unknown occurrent type {role_def.occurrent_type}"
            )

    # Index participant edges once: via -> occurrent type -> participants.
    attachments: dict = {}
    for edge in graph.edges:
        if edge.relation not in PARTICIPANT_RELATIONS:
            continue
        subject = graph.nodes.get(edge.subject)
        if subject is None or subject.kind is not NodeKind.OCCURRENT or subject.inst_of is None:
            continue
        attachments.setdefault(edge.relation, []).append((subject.inst_of, edge.obj))

    pairs: set = set()
    for role_def in defs:
        for occurrent_type, participant in attachments.get(role_def.via, ()):
            if occurrent_type not in hierarchy:
                continue
            if not hierarchy.is_subtype(occurrent_type, role_def.occurrent_type):
                continue
            node = graph.nodes.get(participant)
            if node is None or node.inst_of is None or node.inst_of not in hierarchy:
                continue
            if hierarchy.is_subtype(node.inst_of, role_def.base_type):
                pairs.add((participant, role_def.role_name))

    return tuple(sorted(pairs, key=lambda pair: (str(pair[0]), pair[1])))
