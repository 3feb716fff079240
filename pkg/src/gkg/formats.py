"""Text formats: flat triples, GKG v1 documents, reification rule files.

GKG v1 is line-oriented; fields are whitespace-separated and the last
field of N and L records is greedy so labels and literals may contain
spaces.  ``#`` starts a comment line, blank lines are ignored.

Records::

    G <sourceId|-> <revision>
    T <typeId> <parentTypeId|->
    N <nodeId> <C|O|A|V> <typeId> [literal...]
    E <subjId> <rel> <objId>
    L <nodeId> <lang> <label...>
    ESSENTIAL <eventTypeId>
    CARD <eventTypeId> <ONE|MANY>
    ATTRDECL <eventTypeId> <attrTypeId> <FUNCTIONAL|MULTI>
    ROLE <roleName> BASE <typeId> VIA <rel> EVENT <typeId>

The optional ``G`` header carries the graph's source id and revision and
is omitted when both are at their defaults.  Type ids referenced by N
records or declarations but never declared with a T record are
auto-registered under the root, which is how the compact worked examples
stay parseable.

Canonical serialization emits sections in the order G, T, N, E, L,
declarations, each section sorted lexicographically, one ``\\n`` per
record, so equal documents produce byte-identical text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Mapping, Optional, Tuple

from .embedding import tokenize
from .errors import (
    CycleError,
    DuplicateRuleError,
    GkgSyntaxError,
    MalformedLineError,
    UnknownRoleError,
    ValidationFailedError,
)
from .model import (
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
    validate_graph,
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

_KIND_CODES = {
    "C": NodeKind.CONTINUANT,
    "O": NodeKind.OCCURRENT,
    "A": NodeKind.ATTRIBUTE_INSTANCE,
    "V": NodeKind.VALUE_LITERAL,
}


@dataclass(frozen=True, slots=True)
class FlatTriple:
    """One conventional KG triple: three non-empty, tab-free labels."""

    e1: str
    r: str
    e2: str

    def __post_init__(self):
        for name, value in (("e1", self.e1), ("r", self.r), ("e2", self.e2)):
            if not value:
                raise ValueError(f"flat triple field {name} is empty")
            if "\t" in value or "\n" in value or "\r" in value:
                raise ValueError(f"flat triple field {name} contains a tab or newline")


@dataclass(frozen=True)
class GkgDocument:
    """A hierarchy, a graph, display labels and schema declarations.

    On construction the graph is synchronized with the hierarchy: every
    hierarchy type gains a type node in the graph, and a graph type node
    that the hierarchy does not know is rejected.
    """

    hierarchy: TypeHierarchy
    graph: GroundedGraph
    labels: LabelTable = field(default_factory=LabelTable.empty)
    declarations: SchemaDeclarations = field(default_factory=SchemaDeclarations.empty)

    def __post_init__(self):
        nodes = dict(self.graph.nodes)
        changed = False
        for node_id, node in nodes.items():
            if node.kind is NodeKind.TYPE_NODE and node_id not in self.hierarchy:
                raise ValueError(f"graph type node {node_id} is absent from the hierarchy")
        for type_id in self.hierarchy.types:
            existing = nodes.get(type_id)
            if existing is None:
                nodes[type_id] = Node(type_id, NodeKind.TYPE_NODE)
                changed = True
            elif existing.kind is not NodeKind.TYPE_NODE:
                raise ValueError(f"node {type_id} collides with a hierarchy type")
        if changed:
            object.__setattr__(
                self,
                "graph",
                GroundedGraph(nodes, self.graph.edges, self.graph.source_id, self.graph.revision),
            )

    @classmethod
    def empty(cls) -> "GkgDocument":
        return cls(TypeHierarchy.root_only(), GroundedGraph.empty())


def validate_document(doc: GkgDocument) -> ValidationReport:
    """Graph validation plus a check that declarations only reference
    hierarchy types."""
    report = validate_graph(doc.graph, doc.hierarchy)
    extra = [
        ValidationIssue(
            IssueKind.UNKNOWN_TYPE_TARGET,
            "declarations",
            f"declared type {type_id} not in hierarchy",
        )
        for type_id in sorted(doc.declarations.referenced_types() - doc.hierarchy.types, key=str)
    ]
    if extra:
        report = ValidationReport(tuple(sorted(report.issues + tuple(extra), key=ValidationIssue.sort_key)))
    return report


def parse_flat(text: str) -> Tuple[FlatTriple, ...]:
    """Parse tab-separated triples, one per line.  Lines must have exactly
    three non-empty fields; ``#`` comments and blank lines are skipped."""
    triples = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedLineError(line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        try:
            triples.append(FlatTriple(*fields))
        except ValueError as exc:
            raise MalformedLineError(line_no, str(exc)) from None
    return tuple(triples)


def _node_id(text: str, line_no: int) -> NodeId:
    try:
        return NodeId.parse(text)
    except ValueError as exc:
        raise GkgSyntaxError(line_no, str(exc)) from None


def _relation(text: str, line_no: int) -> PrimitiveRelation:
    try:
        return PrimitiveRelation.parse(text)
    except ValueError as exc:
        raise GkgSyntaxError(line_no, str(exc)) from None


class _DeclarationCollector:
    """Accumulates declaration records shared by .gkg and rule files."""

    def __init__(self):
        self.essential: set = set()
        self.cardinality: dict = {}
        self.attr_modes: dict = {}
        self.roles: dict = {}

    def handles(self, head: str) -> bool:
        return head in ("ESSENTIAL", "CARD", "ATTRDECL", "ROLE")

    def take(self, fields: List[str], line_no: int) -> None:
        head = fields[0]
        if head == "ESSENTIAL":
            if len(fields) != 2:
                raise GkgSyntaxError(line_no, "ESSENTIAL takes exactly one type id")
            self.essential.add(_node_id(fields[1], line_no))
        elif head == "CARD":
            if len(fields) != 3:
                raise GkgSyntaxError(line_no, "CARD takes a type id and ONE|MANY")
            event_type = _node_id(fields[1], line_no)
            try:
                card = Cardinality(fields[2])
            except ValueError:
                raise GkgSyntaxError(line_no, f"bad cardinality {fields[2]!r}") from None
            if event_type in self.cardinality:
                raise GkgSyntaxError(line_no, f"duplicate CARD for {event_type}")
            self.cardinality[event_type] = card
        elif head == "ATTRDECL":
            if len(fields) != 4:
                raise GkgSyntaxError(line_no, "ATTRDECL takes two type ids and FUNCTIONAL|MULTI")
            event_type = _node_id(fields[1], line_no)
            attr_type = _node_id(fields[2], line_no)
            try:
                mode = AttrMode(fields[3])
            except ValueError:
                raise GkgSyntaxError(line_no, f"bad attribute mode {fields[3]!r}") from None
            key = (event_type, attr_type)
            if key in self.attr_modes:
                raise GkgSyntaxError(line_no, f"duplicate ATTRDECL for {event_type} / {attr_type}")
            self.attr_modes[key] = mode
        else:  # ROLE
            if len(fields) != 8 or fields[2] != "BASE" or fields[4] != "VIA" or fields[6] != "EVENT":
                raise GkgSyntaxError(line_no, "ROLE syntax: ROLE <name> BASE <type> VIA <rel> EVENT <type>")
            role_name = fields[1]
            base_type = _node_id(fields[3], line_no)
            via = _relation(fields[5], line_no)
            occurrent_type = _node_id(fields[7], line_no)
            if role_name in self.roles:
                raise GkgSyntaxError(line_no, f"duplicate ROLE {role_name!r}")
            try:
                self.roles[role_name] = RoleConceptDef(role_name, base_type, via, occurrent_type)
            except ValueError as exc:
                raise UnknownRoleError(line_no, str(exc)) from None

    def build(self) -> SchemaDeclarations:
        return SchemaDeclarations(
            essential=frozenset(self.essential),
            cardinality=dict(self.cardinality),
            attr_modes=dict(self.attr_modes),
            roles=tuple(self.roles[name] for name in sorted(self.roles)),
        )


def _content_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield line_no, line


def parse_gkg(text: str) -> GkgDocument:
    """Parse GKG v1 text into a document.

    Malformed lines raise :class:`GkgSyntaxError` with the line number;
    well-formed text whose graph breaks the typing discipline raises
    :class:`ValidationFailedError` carrying the full report.
    """
    type_pairs: list = []
    node_records: list = []  # (line_no, NodeId, NodeKind, type NodeId, literal|None)
    edge_records: list = []
    label_entries: dict = {}
    declarations = _DeclarationCollector()
    source_id = ""
    revision = 0
    saw_header = False
    seen_node_lines: dict = {}

    for line_no, line in _content_lines(text):
        fields = line.split()
        head = fields[0]
        if head == "G":
            if saw_header:
                raise GkgSyntaxError(line_no, "duplicate G header")
            if len(fields) != 3:
                raise GkgSyntaxError(line_no, "G takes a source id and a revision")
            saw_header = True
            source_id = "" if fields[1] == "-" else fields[1]
            try:
                revision = int(fields[2])
            except ValueError:
                raise GkgSyntaxError(line_no, f"bad revision {fields[2]!r}") from None
            if revision < 0:
                raise GkgSyntaxError(line_no, "revision must be non-negative")
        elif head == "T":
            if len(fields) != 3:
                raise GkgSyntaxError(line_no, "T takes a type id and a parent id or -")
            type_id = _node_id(fields[1], line_no)
            parent = None if fields[2] == "-" else _node_id(fields[2], line_no)
            type_pairs.append((type_id, parent))
        elif head == "N":
            parts = line.split(None, 4)
            if len(parts) < 4:
                raise GkgSyntaxError(line_no, "N takes a node id, a kind code and a type id")
            node_id = _node_id(parts[1], line_no)
            kind = _KIND_CODES.get(parts[2])
            if kind is None:
                raise GkgSyntaxError(line_no, f"bad node kind {parts[2]!r}")
            type_id = _node_id(parts[3], line_no)
            literal = parts[4] if len(parts) == 5 else None
            if kind is NodeKind.VALUE_LITERAL:
                if literal is None:
                    raise GkgSyntaxError(line_no, "value node needs a literal")
            elif literal is not None:
                raise GkgSyntaxError(line_no, "literal on a non-value node")
            if node_id in seen_node_lines:
                raise GkgSyntaxError(line_no, f"duplicate node {node_id}")
            seen_node_lines[node_id] = line_no
            node_records.append((line_no, node_id, kind, type_id, literal))
        elif head == "E":
            if len(fields) != 4:
                raise GkgSyntaxError(line_no, "E takes a subject, a relation and an object")
            subject = _node_id(fields[1], line_no)
            relation = _relation(fields[2], line_no)
            obj = _node_id(fields[3], line_no)
            edge_records.append(Edge(subject, relation, obj))
        elif head == "L":
            parts = line.split(None, 3)
            if len(parts) != 4:
                raise GkgSyntaxError(line_no, "L takes a node id, a language tag and a label")
            node_id = _node_id(parts[1], line_no)
            lang = parts[2]
            key = (node_id, lang)
            if key in label_entries:
                raise GkgSyntaxError(line_no, f"duplicate label for {node_id} [{lang}]")
            label_entries[key] = parts[3]
        elif declarations.handles(head):
            declarations.take(fields, line_no)
        else:
            raise GkgSyntaxError(line_no, f"unknown record {head!r}")

    schema = declarations.build()

    # Types referenced but never declared become direct children of the root.
    referenced = {record[3] for record in node_records}
    referenced.update(schema.referenced_types())
    declared = {pair[0] for pair in type_pairs}
    for type_id in sorted(referenced - declared, key=str):
        type_pairs.append((type_id, None))

    try:
        hierarchy = TypeHierarchy.from_edges(type_pairs)
    except CycleError as exc:
        issue = ValidationIssue(IssueKind.HIERARCHY_MISMATCH, "hierarchy", str(exc))
        raise ValidationFailedError(ValidationReport((issue,))) from None

    nodes: dict = {type_id: Node(type_id, NodeKind.TYPE_NODE) for type_id in hierarchy.types}
    for line_no, node_id, kind, type_id, literal in node_records:
        if node_id in nodes and nodes[node_id].kind is NodeKind.TYPE_NODE:
            raise GkgSyntaxError(line_no, f"node {node_id} collides with a declared type")
        nodes[node_id] = Node(node_id, kind, inst_of=type_id, literal=literal)

    graph = GroundedGraph(nodes, frozenset(edge_records), source_id, revision)
    labels = LabelTable(label_entries)
    doc = GkgDocument(hierarchy, graph, labels, schema)
    report = validate_document(doc)
    if not report.ok:
        raise ValidationFailedError(report)
    return doc


def serialize_gkg(doc: GkgDocument) -> str:
    """Render a document in canonical form (see the module docstring).
    Raises ValueError for documents that cannot be expressed, e.g. nodes
    without a type or whitespace in a source id."""
    lines: List[str] = []
    graph = doc.graph

    if graph.source_id or graph.revision:
        if any(ch.isspace() for ch in graph.source_id):
            raise ValueError(f"source id contains whitespace: {graph.source_id!r}")
        lines.append(f"G {graph.source_id or '-'} {graph.revision}")

    type_lines = []
    for type_id in doc.hierarchy.sorted_types():
        parents = sorted(doc.hierarchy.parents.get(type_id, frozenset()), key=str)
        if not parents:
            type_lines.append(f"T {type_id} -")
        else:
            type_lines.extend(f"T {type_id} {parent}" for parent in parents)
    lines.extend(sorted(type_lines))

    node_lines = []
    for node_id in sorted(graph.nodes, key=str):
        node = graph.nodes[node_id]
        if node.kind is NodeKind.TYPE_NODE:
            continue
        if node.inst_of is None:
            raise ValueError(f"cannot serialize untyped node {node_id}")
        record = f"N {node_id} {node.kind.value} {node.inst_of}"
        if node.kind is NodeKind.VALUE_LITERAL:
            if not node.literal:
                raise ValueError(f"cannot serialize value node {node_id} without a literal")
            record += f" {node.literal}"
        elif node.literal is not None:
            raise ValueError(f"cannot serialize literal on non-value node {node_id}")
        node_lines.append(record)
    lines.extend(sorted(node_lines))

    lines.extend(
        sorted(f"E {e.subject} {e.relation.value} {e.obj}" for e in graph.edges)
    )

    label_lines = []
    for (node_id, lang), label in doc.labels.items_sorted():
        label_lines.append(f"L {node_id} {lang} {label}")
    lines.extend(sorted(label_lines))

    decl_lines = []
    decls = doc.declarations
    decl_lines.extend(f"ESSENTIAL {type_id}" for type_id in decls.essential)
    decl_lines.extend(
        f"CARD {type_id} {card.value}" for type_id, card in decls.cardinality.items()
    )
    decl_lines.extend(
        f"ATTRDECL {event_type} {attr_type} {mode.value}"
        for (event_type, attr_type), mode in decls.attr_modes.items()
    )
    decl_lines.extend(
        f"ROLE {role.role_name} BASE {role.base_type} VIA {role.via.value} EVENT {role.occurrent_type}"
        for role in decls.roles
    )
    lines.extend(sorted(decl_lines))

    return "".join(line + "\n" for line in lines)


def parse_rules(text: str) -> Tuple[Tuple[ReificationRule, ...], SchemaDeclarations]:
    """Parse a reification rule file.

    RULE lines map a flat relation name onto an event pattern::

        RULE <rel> EVENT <type> SUBJ <role> OBJ ATTR <attrType> <valueType>
        RULE <rel> EVENT <type> SUBJ <role> OBJ PARTICIPANT <role>

    Declaration records (ESSENTIAL, CARD, ATTRDECL, ROLE) may ride along.
    Two rules whose relation names normalize to the same token sequence
    are rejected, since the second could never fire.
    """
    rules: list = []
    seen_keys: dict = {}
    declarations = _DeclarationCollector()

    for line_no, line in _content_lines(text):
        fields = line.split()
        head = fields[0]
        if head == "RULE":
            if (
                len(fields) < 8
                or fields[2] != "EVENT"
                or fields[4] != "SUBJ"
                or fields[6] != "OBJ"
            ):
                raise GkgSyntaxError(
                    line_no, "RULE syntax: RULE <rel> EVENT <type> SUBJ <role> OBJ ..."
                )
            rel_name = fields[1]
            event_type = _node_id(fields[3], line_no)
            subject_role = _relation(fields[5], line_no)
            if fields[7] == "ATTR":
                if len(fields) != 10:
                    raise GkgSyntaxError(line_no, "OBJ ATTR takes an attribute type and a value type")
                slot = AttrSlot(_node_id(fields[8], line_no), _node_id(fields[9], line_no))
            elif fields[7] == "PARTICIPANT":
                if len(fields) != 9:
                    raise GkgSyntaxError(line_no, "OBJ PARTICIPANT takes one relation")
                try:
                    slot = ParticipantSlot(_relation(fields[8], line_no))
                except ValueError as exc:
                    raise UnknownRoleError(line_no, str(exc)) from None
            else:
                raise GkgSyntaxError(line_no, f"bad object slot {fields[7]!r}")
            try:
                rule = ReificationRule(rel_name, event_type, subject_role, slot)
            except ValueError as exc:
                raise UnknownRoleError(line_no, str(exc)) from None
            key = tuple(tokenize(rel_name))
            if key in seen_keys:
                raise DuplicateRuleError(rel_name)
            seen_keys[key] = rule
            rules.append(rule)
        elif declarations.handles(head):
            declarations.take(fields, line_no)
        else:
            raise GkgSyntaxError(line_no, f"unknown record {head!r}")

    return tuple(rules), declarations.build()
