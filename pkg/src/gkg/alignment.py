"""Entity alignment over grounded graphs, plus the flat baseline.

An entity's signature is a small set of named embedding slots: its display
name, its type lineage, one slot per (essential event type, attribute
type) fact, and its inferred role names.  Similarity is a weighted mean of
per-slot cosines over the union of slot keys, so structure that one side
lacks counts against the pair instead of being ignored.

``flat_align`` scores whole flat triples against each other with the
additive phrase embedding.  It exists as the contrast baseline: renaming a
relation and changing a fact move its cosine by about the same amount.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .embedding import cosine, embed_phrase, embed_flat_triple, normalized
from .errors import GkgSyntaxError, NotAContinuantError
from .model import (
    GroundedGraph,
    NodeId,
    NodeKind,
    PARTICIPANT_RELATIONS,
    PrimitiveRelation,
    RoleConceptDef,
    TypeHierarchy,
    infer_role_labels,
)
from .multilingual import LabelTable

SLOT_NAME = "name"
SLOT_TYPE = "type"
SLOT_ROLES = "roles"
_FACT_PREFIX = "fact"

DEFAULT_THRESHOLD = 0.9
DEFAULT_AMBIGUITY_BAND = 0.02


def fact_slot_key(event_type: NodeId, attr_type: NodeId) -> str:
    return f"{_FACT_PREFIX}:{event_type}:{attr_type}"


def slot_class(key: str) -> str:
    return key.split(":", 1)[0]


@dataclass(frozen=True)
class EntitySignature:
    """Slot key -> unit vector, keys sorted."""

    slots: Mapping[str, np.ndarray]

    @classmethod
    def from_slots(cls, slots: Mapping[str, np.ndarray]) -> "EntitySignature":
        return cls({key: slots[key] for key in sorted(slots)})

    def slot_keys(self) -> Tuple[str, ...]:
        return tuple(self.slots)


@dataclass(frozen=True)
class AlignmentConfig:
    provider: object
    threshold: float = DEFAULT_THRESHOLD
    ambiguity_band: float = DEFAULT_AMBIGUITY_BAND
    weights: Mapping[str, float] = field(default_factory=dict)
    pivot_lang: str = "en"
    essential_events: frozenset = frozenset()
    role_defs: Tuple[RoleConceptDef, ...] = ()

    def __post_init__(self):
        if not (0.0 < self.threshold <= 1.0):
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.ambiguity_band < 0.0:
            raise ValueError(f"ambiguity band must be non-negative, got {self.ambiguity_band}")
        for cls_name, weight in self.weights.items():
            if weight <= 0.0:
                raise ValueError(f"weight for {cls_name!r} must be positive, got {weight}")

    def weight_for(self, cls_name: str) -> float:
        return self.weights.get(cls_name, 1.0)


@dataclass(frozen=True)
class AlignmentResult:
    matches: Tuple[Tuple[NodeId, NodeId, float], ...] = ()
    unmatched_a: Tuple[NodeId, ...] = ()
    unmatched_b: Tuple[NodeId, ...] = ()
    ambiguous: Tuple[Tuple[NodeId, Tuple[Tuple[NodeId, float], ...]], ...] = ()


class _GraphIndex:
    """Edge indexes shared by all signature computations over one graph."""

    def __init__(self, graph: GroundedGraph):
        self.graph = graph
        self.participants_by_entity: Dict[NodeId, list] = {}
        self.attrs_by_bearer: Dict[NodeId, list] = {}
        self.values_by_attr: Dict[NodeId, list] = {}
        for edge in graph.edges:
            if edge.relation in PARTICIPANT_RELATIONS:
                self.participants_by_entity.setdefault(edge.obj, []).append(edge.subject)
            elif edge.relation is PrimitiveRelation.HAS_PROP:
                self.attrs_by_bearer.setdefault(edge.obj, []).append(edge.subject)
            elif edge.relation is PrimitiveRelation.HAS_VALUE:
                self.values_by_attr.setdefault(edge.subject, []).append(edge.obj)


def entity_signature(
    graph: GroundedGraph,
    hierarchy: TypeHierarchy,
    labels: LabelTable,
    node_id: NodeId,
    config: AlignmentConfig,
) -> EntitySignature:
    """Signature of one continuant.  Name and type slots are always
    attempted; fact slots need an essential event type in the config; the
    roles slot appears only when role definitions infer something."""
    node = graph.node(node_id)
    if node.kind is not NodeKind.CONTINUANT:
        raise NotAContinuantError(f"{node_id} is a {node.kind.name}, not a continuant")
    role_names = [
        role for target, role in infer_role_labels(graph, hierarchy, config.role_defs)
        if target == node_id
    ]
    return _signature(_GraphIndex(graph), hierarchy, labels, node, config, role_names)


def _type_phrase(labels: LabelTable, type_id: NodeId, pivot_lang: str) -> str:
    label = labels.get(type_id, pivot_lang)
    return label if label is not None else type_id.local


def _signature(
    index: _GraphIndex,
    hierarchy: TypeHierarchy,
    labels: LabelTable,
    node,
    config: AlignmentConfig,
    role_names: Sequence[str],
) -> EntitySignature:
    provider = config.provider
    slots: Dict[str, np.ndarray] = {}

    name_text = labels.get(node.id, config.pivot_lang)
    if name_text is None:
        name_text = node.id.local
    slots[SLOT_NAME] = embed_phrase(provider, name_text)

    if node.inst_of is not None and node.inst_of in hierarchy:
        lineage = sorted(hierarchy.ancestors(node.inst_of), key=str)
        vectors = [
            embed_phrase(provider, _type_phrase(labels, type_id, config.pivot_lang))
            for type_id in lineage
        ]
        mean = np.add.reduce(vectors) / float(len(vectors))
        slots[SLOT_TYPE] = normalized(mean)

    graph = index.graph
    for essential in sorted(config.essential_events, key=str):
        if essential not in hierarchy:
            continue
        sums: Dict[NodeId, np.ndarray] = {}
        for event_id in index.participants_by_entity.get(node.id, ()):
            event = graph.nodes.get(event_id)
            if event is None or event.kind is not NodeKind.OCCURRENT:
                continue
            if event.inst_of is None or event.inst_of not in hierarchy:
                continue
            if not hierarchy.is_subtype(event.inst_of, essential):
                continue
            for attr_id in index.attrs_by_bearer.get(event_id, ()):
                attr = graph.nodes.get(attr_id)
                if attr is None or attr.kind is not NodeKind.ATTRIBUTE_INSTANCE or attr.inst_of is None:
                    continue
                for value_id in index.values_by_attr.get(attr_id, ()):
                    value = graph.nodes.get(value_id)
                    if value is None or not value.literal:
                        continue
                    vector = embed_phrase(provider, value.literal)
                    if not np.any(vector):
                        continue
                    if attr.inst_of in sums:
                        sums[attr.inst_of] = sums[attr.inst_of] + vector
                    else:
                        sums[attr.inst_of] = vector
        for attr_type, total in sums.items():
            slots[fact_slot_key(essential, attr_type)] = normalized(total)

    if role_names:
        total = np.zeros(provider.dim, dtype=np.float64)
        for role in sorted(set(role_names)):
            total = total + embed_phrase(provider, role)
        if np.any(total):
            slots[SLOT_ROLES] = normalized(total)

    return EntitySignature.from_slots(slots)


def signature_similarity(
    sig_a: EntitySignature, sig_b: EntitySignature, config: AlignmentConfig
) -> float:
    """Weighted mean of clamped per-slot cosines over the union of keys.
    A slot present on one side only contributes zero at full weight."""
    keys = sorted(set(sig_a.slots) | set(sig_b.slots))
    if not keys:
        return 0.0
    numerator = 0.0
    denominator = 0.0
    for key in keys:
        weight = config.weight_for(slot_class(key))
        denominator += weight
        vec_a = sig_a.slots.get(key)
        vec_b = sig_b.slots.get(key)
        if vec_a is None or vec_b is None:
            continue
        numerator += weight * max(0.0, cosine(vec_a, vec_b))
    return numerator / denominator


def slot_similarities(
    sig_a: EntitySignature, sig_b: EntitySignature
) -> Dict[str, Optional[float]]:
    """Per-slot clamped cosines over the union of keys; None marks a slot
    present on one side only.  Diagnostic companion to the scalar score."""
    result: Dict[str, Optional[float]] = {}
    for key in sorted(set(sig_a.slots) | set(sig_b.slots)):
        vec_a = sig_a.slots.get(key)
        vec_b = sig_b.slots.get(key)
        result[key] = None if vec_a is None or vec_b is None else max(0.0, cosine(vec_a, vec_b))
    return result


def align(
    graph_a: GroundedGraph,
    graph_b: GroundedGraph,
    hierarchy: TypeHierarchy,
    labels_a: LabelTable,
    labels_b: LabelTable,
    config: AlignmentConfig,
) -> AlignmentResult:
    """Greedy mutual-best one-to-one matching of continuants.

    Candidate pairs are blocked to type-compatible entities (one inst type
    a subtype of the other).  Pairs are accepted in descending score order
    at or above the threshold; a pair whose winning score beats the best
    alternative of either endpoint by less than the ambiguity band is
    recorded as ambiguous and both endpoints are withdrawn.  The match set
    is symmetric in the argument order.
    """
    index_a = _GraphIndex(graph_a)
    index_b = _GraphIndex(graph_b)
    roles_a = _roles_by_entity(graph_a, hierarchy, config)
    roles_b = _roles_by_entity(graph_b, hierarchy, config)

    conts_a = [n for n in graph_a.continuants()]
    conts_b = [n for n in graph_b.continuants()]
    sigs_a = {
        n.id: _signature(index_a, hierarchy, labels_a, n, config, roles_a.get(n.id, ()))
        for n in conts_a
    }
    sigs_b = {
        n.id: _signature(index_b, hierarchy, labels_b, n, config, roles_b.get(n.id, ()))
        for n in conts_b
    }

    def compatible(node_a, node_b) -> bool:
        ta, tb = node_a.inst_of, node_b.inst_of
        if ta is None or tb is None or ta not in hierarchy or tb not in hierarchy:
            return False
        return hierarchy.is_subtype(ta, tb) or hierarchy.is_subtype(tb, ta)

    scores: Dict[tuple, float] = {}
    cand_a: Dict[NodeId, list] = {n.id: [] for n in conts_a}
    cand_b: Dict[NodeId, list] = {n.id: [] for n in conts_b}
    for node_a in conts_a:
        for node_b in conts_b:
            if not compatible(node_a, node_b):
                continue
            score = signature_similarity(sigs_a[node_a.id], sigs_b[node_b.id], config)
            scores[(node_a.id, node_b.id)] = score
            cand_a[node_a.id].append((node_b.id, score))
            cand_b[node_b.id].append((node_a.id, score))

    ordered = sorted(
        scores.items(),
        key=lambda kv: (-kv[1], min(str(kv[0][0]), str(kv[0][1])), max(str(kv[0][0]), str(kv[0][1]))),
    )

    free_a = {n.id for n in conts_a}
    free_b = {n.id for n in conts_b}
    matches: list = []
    ambiguous: list = []

    def best_alternative(candidates, excluded, free) -> float:
        best = -math.inf
        for other_id, other_score in candidates:
            if other_id != excluded and other_id in free and other_score > best:
                best = other_score
        return best

    for (id_a, id_b), score in ordered:
        if score < config.threshold:
            break
        if id_a not in free_a or id_b not in free_b:
            continue
        margin_a = score - best_alternative(cand_a[id_a], id_b, free_b)
        margin_b = score - best_alternative(cand_b[id_b], id_a, free_a)
        if min(margin_a, margin_b) < config.ambiguity_band:
            candidates = tuple(
                sorted(cand_a[id_a], key=lambda pair: (-pair[1], str(pair[0])))
            )
            ambiguous.append((id_a, candidates))
            free_a.discard(id_a)
            free_b.discard(id_b)
        else:
            matches.append((id_a, id_b, score))
            free_a.discard(id_a)
            free_b.discard(id_b)

    matched_a = {m[0] for m in matches}
    matched_b = {m[1] for m in matches}
    ambiguous_keys = {a for a, _ in ambiguous}
    return AlignmentResult(
        matches=tuple(sorted(matches, key=lambda m: (str(m[0]), str(m[1])))),
        unmatched_a=tuple(
            n.id for n in conts_a if n.id not in matched_a and n.id not in ambiguous_keys
        ),
        unmatched_b=tuple(n.id for n in conts_b if n.id not in matched_b),
        ambiguous=tuple(sorted(ambiguous, key=lambda pair: str(pair[0]))),
    )


def _roles_by_entity(graph, hierarchy, config) -> Dict[NodeId, list]:
    if not config.role_defs:
        return {}
    by_entity: Dict[NodeId, list] = {}
    for node_id, role in infer_role_labels(graph, hierarchy, config.role_defs):
        by_entity.setdefault(node_id, []).append(role)
    return by_entity


def flat_align(
    triples_a: Sequence, triples_b: Sequence, config: AlignmentConfig
) -> Tuple[tuple, ...]:
    """Score every cross pair of flat triples by additive-embedding cosine,
    best first.  No blocking, no threshold: this is the baseline whose
    indistinguishable score bands motivate grounding."""
    vectors_a = [embed_flat_triple(config.provider, t) for t in triples_a]
    vectors_b = [embed_flat_triple(config.provider, t) for t in triples_b]
    scored = []
    for i, triple_a in enumerate(triples_a):
        for j, triple_b in enumerate(triples_b):
            scored.append((cosine(vectors_a[i], vectors_b[j]), i, j))
    scored.sort(key=lambda item: (-item[0], item[1], item[2]))
    return tuple((triples_a[i], triples_b[j], score) for score, i, j in scored)


def format_alignment_tsv(result: AlignmentResult) -> str:
    """Rows ``idA  idB  score  MATCH|AMBIG`` sorted by (idA, idB), scores
    to four decimals."""
    rows = [(str(a), str(b), score, "MATCH") for a, b, score in result.matches]
    for id_a, candidates in result.ambiguous:
        rows.extend((str(id_a), str(b), score, "AMBIG") for b, score in candidates)
    rows.sort(key=lambda row: (row[0], row[1]))
    return "".join(f"{a}\t{b}\t{score:.4f}\t{status}\n" for a, b, score, status in rows)


def parse_alignment_tsv(text: str) -> AlignmentResult:
    """Read rows written by :func:`format_alignment_tsv`.  Unmatched sides
    are not serialized, so they come back empty."""
    matches: list = []
    ambiguous: Dict[NodeId, list] = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise GkgSyntaxError(line_no, f"expected 4 tab-separated fields, got {len(fields)}")
        try:
            id_a = NodeId.parse(fields[0])
            id_b = NodeId.parse(fields[1])
        except ValueError as exc:
            raise GkgSyntaxError(line_no, str(exc)) from None
        try:
            score = float(fields[2])
        except ValueError:
            raise GkgSyntaxError(line_no, f"bad score {fields[2]!r}") from None
        status = fields[3]
        if status == "MATCH":
            matches.append((id_a, id_b, score))
        elif status == "AMBIG":
            ambiguous.setdefault(id_a, []).append((id_b, score))
        else:
            raise GkgSyntaxError(line_no, f"bad status {status!r}")
    return AlignmentResult(
        matches=tuple(sorted(matches, key=lambda m: (str(m[0]), str(m[1])))),
        ambiguous=tuple(
            (id_a, tuple(sorted(cands, key=lambda pair: (-pair[1], str(pair[0])))))
            for id_a, cands in sorted(ambiguous.items(), key=lambda kv: str(kv[0]))
        ),
    )
