"""Core domain types for process chronologies and the operations on them.

Everything here is an immutable value; operations return new chronologies
instead of mutating. Relation levels are always recomputed from the
endpoints, never trusted from input data.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

SCHEMA_VERSION = "timeflow/1"


class ObjectKind(str, Enum):
    EMAIL = "email"
    DOCUMENT = "document"
    NEWS = "news"
    REPORT = "report"
    LEGAL = "legal"
    OTHER = "other"


class EntityKind(str, Enum):
    PERSON = "person"
    ORGANIZATION = "organization"
    PLACE = "place"


class RelationType(str, Enum):
    TEMPORAL_SEMANTIC = "temporal-semantic"
    SUBJECT = "subject"
    ENTITY = "entity"
    CAUSAL = "causal"
    CORRESPONDENCE = "correspondence"
    SUCCESSION = "succession"
    REFERENCES_TO = "references-to"
    CONSISTS_OF = "consists-of"


class Level(str, Enum):
    TT = "TT"  # object <-> object
    EE = "EE"  # concept <-> concept
    TE = "TE"  # object <-> concept, either direction


class Provenance(str, Enum):
    DERIVED = "derived"
    ASSERTED = "asserted"


GROUP_A = frozenset(
    {
        RelationType.TEMPORAL_SEMANTIC,
        RelationType.SUBJECT,
        RelationType.ENTITY,
        RelationType.CAUSAL,
        RelationType.CORRESPONDENCE,
    }
)

DIRECTED_TYPES = frozenset(
    {
        RelationType.CAUSAL,
        RelationType.SUCCESSION,
        RelationType.REFERENCES_TO,
        RelationType.CONSISTS_OF,
    }
)

# Which levels each relation type may occur at.
ADMISSIBLE_LEVELS: dict[RelationType, frozenset[Level]] = {
    **{t: frozenset({Level.TT, Level.EE, Level.TE}) for t in GROUP_A},
    RelationType.SUCCESSION: frozenset({Level.TT}),
    RelationType.REFERENCES_TO: frozenset({Level.TT}),
    RelationType.CONSISTS_OF: frozenset({Level.TE}),
}


class ChronologyError(Exception):
    """Raised when an operation cannot produce a valid chronology."""


class UnknownIdError(ChronologyError):
    def __init__(self, element_id: str, context: str = ""):
        self.element_id = element_id
        msg = f"unknown id {element_id!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class MissingAnchorError(ChronologyError):
    def __init__(self, event_id: str):
        self.event_id = event_id
        super().__init__(f"event {event_id!r} has no anchor and cannot be ordered")


@dataclass(frozen=True, order=True)
class DateInterval:
    """Closed day-granularity interval; a single day has start == end."""

    start: date
    end: date

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"interval start {self.start} after end {self.end}")

    @classmethod
    def day(cls, d: date) -> "DateInterval":
        return cls(d, d)

    def intersects(self, other: "DateInterval") -> bool:
        return self.start <= other.end and other.start <= self.end

    def hull(self, other: "DateInterval") -> "DateInterval":
        return DateInterval(min(self.start, other.start), max(self.end, other.end))

    def contains(self, other: "DateInterval") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class InformationObject:
    id: str
    kind: ObjectKind
    title: str
    body: str
    created: Optional[date] = None
    sender: Optional[str] = None
    recipients: tuple[str, ...] = ()
    in_reply_to: Optional[str] = None
    reply_external: bool = False  # in_reply_to target outside the corpus
    forwarded_from: Optional[str] = None
    attachments: tuple[str, ...] = ()  # object ids or unresolved filenames
    source_path: str = ""
    content_hash: str = ""

    def correspondents(self) -> frozenset[str]:
        names = set(self.recipients)
        if self.sender:
            names.add(self.sender)
        return frozenset(names)


@dataclass(frozen=True)
class Event:
    id: str
    title: str
    description: str = ""
    anchor: Optional[DateInterval] = None
    ordinal: Optional[int] = None
    constitutive_objects: tuple[str, ...] = ()


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    entity_kind: EntityKind
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class Subject:
    id: str
    label: str
    terms: tuple[str, ...] = ()


@dataclass(frozen=True)
class TemporalExpression:
    id: str
    surface: str
    normalized: DateInterval
    source_id: str  # host object or event id
    span: tuple[int, int] = (0, 0)


Concept = Union[Event, Entity, Subject, TemporalExpression]

_CONCEPT_VARIANTS = {
    Event: "event",
    Entity: "entity",
    Subject: "subject",
    TemporalExpression: "temporal-expression",
}


@dataclass(frozen=True)
class Evidence:
    holder: str  # object or concept id the span lives in
    span: tuple[int, int]
    surface: str


@dataclass(frozen=True)
class Relation:
    id: str
    rel_type: RelationType
    source: str
    target: str
    directed: bool
    evidence: tuple[Evidence, ...] = ()
    weight: Optional[float] = None
    provenance: Provenance = Provenance.DERIVED

    def endpoints(self) -> tuple[str, str]:
        return (self.source, self.target)

    def key(self) -> tuple:
        """Dedupe key: type + endpoints, order-normalized when undirected."""
        if self.directed:
            return (self.rel_type.value, self.source, self.target)
        lo, hi = sorted((self.source, self.target))
        return (self.rel_type.value, lo, hi)


def relation_id(rel_type: RelationType, source: str, target: str, directed: bool) -> str:
    if not directed:
        source, target = sorted((source, target))
    raw = f"{rel_type.value}|{source}|{target}"
    return "rel-" + hashlib.sha256(raw.encode("utf-8")).hexdigest()[:12]


def make_relation(
    rel_type: RelationType,
    source: str,
    target: str,
    evidence: Iterable[Evidence] = (),
    weight: Optional[float] = None,
    provenance: Provenance = Provenance.DERIVED,
) -> Relation:
    directed = rel_type in DIRECTED_TYPES
    return Relation(
        id=relation_id(rel_type, source, target, directed),
        rel_type=rel_type,
        source=source,
        target=target,
        directed=directed,
        evidence=tuple(evidence),
        weight=weight,
        provenance=provenance,
    )


@dataclass(frozen=True)
class ChronologyMeta:
    name: str = "chronology"
    created: Optional[date] = None
    schema_version: str = SCHEMA_VERSION


@dataclass(frozen=True)
class Chronology:
    objects: tuple[InformationObject, ...] = ()
    concepts: tuple[Concept, ...] = ()
    relations: tuple[Relation, ...] = ()
    meta: ChronologyMeta = field(default_factory=ChronologyMeta)

    def object_ids(self) -> frozenset[str]:
        return frozenset(o.id for o in self.objects)

    def concept_ids(self) -> frozenset[str]:
        return frozenset(c.id for c in self.concepts)

    def events(self) -> list[Event]:
        return [c for c in self.concepts if isinstance(c, Event)]

    def get_object(self, object_id: str) -> InformationObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise UnknownIdError(object_id, "object")

    def get_concept(self, concept_id: str) -> Concept:
        for c in self.concepts:
            if c.id == concept_id:
                return c
        raise UnknownIdError(concept_id, "concept")

    def level_of(self, relation: Relation) -> Optional[Level]:
        """Derive the level from the endpoints; None if either is unresolved."""
        objects = self.object_ids()
        concepts = self.concept_ids()

        def side(endpoint: str) -> Optional[str]:
            if endpoint in objects:
                return "T"
            if endpoint in concepts:
                return "E"
            return None

        a, b = side(relation.source), side(relation.target)
        if a is None or b is None:
            return None
        if a == "T" and b == "T":
            return Level.TT
        if a == "E" and b == "E":
            return Level.EE
        return Level.TE


@dataclass(frozen=True)
class Perspective:
    name: str
    included_rel_types: frozenset[RelationType] = frozenset(RelationType)
    entity_filter: Optional[tuple[str, ...]] = None
    time_window: Optional[DateInterval] = None
    level_filter: Optional[frozenset[Level]] = None
    merge_groups: tuple[frozenset[str], ...] = ()


@dataclass(frozen=True)
class Violation:
    element: str
    rule: str
    message: str


def validate(chronology: Chronology) -> list[Violation]:
    """Check every structural invariant; violations are data, not failures."""
    violations: list[Violation] = []
    object_ids = chronology.object_ids()
    concept_ids = chronology.concept_ids()

    seen: set[str] = set()
    for element_id in [o.id for o in chronology.objects] + [c.id for c in chronology.concepts]:
        if element_id in seen:
            violations.append(Violation(element_id, "unique-id", f"duplicate id {element_id!r}"))
        seen.add(element_id)

    for obj in chronology.objects:
        if obj.in_reply_to == obj.id or obj.forwarded_from == obj.id:
            violations.append(
                Violation(obj.id, "no-self-link", f"object {obj.id!r} replies to or forwards itself")
            )

    consists_pairs = {
        (r.source, r.target)
        for r in chronology.relations
        if r.rel_type is RelationType.CONSISTS_OF
    }

    events = chronology.events()
    for event in events:
        if not event.constitutive_objects:
            violations.append(
                Violation(event.id, "event-nonempty", f"event {event.id!r} has no constitutive objects")
            )
        for obj_id in event.constitutive_objects:
            if obj_id not in object_ids:
                violations.append(
                    Violation(
                        event.id,
                        "constitutive-resolves",
                        f"event {event.id!r} references unknown object {obj_id!r}",
                    )
                )
            # Mirror check only when the chronology carries consists-of edges
            # at all; a perspective may legitimately hide the whole type.
            elif consists_pairs and (event.id, obj_id) not in consists_pairs:
                violations.append(
                    Violation(
                        event.id,
                        "consists-of-mirror",
                        f"event {event.id!r} lacks a consists-of relation to {obj_id!r}",
                    )
                )

    anchored = [e for e in events if e.anchor is not None]
    if events and all(e.ordinal is not None for e in events):
        expected = {e.id: i + 1 for i, e in enumerate(sorted(anchored, key=_anchor_key))}
        ordinals = sorted(e.ordinal for e in events)  # type: ignore[type-var]
        if ordinals != list(range(1, len(events) + 1)):
            violations.append(
                Violation("", "ordinal-permutation", f"ordinals {ordinals} are not 1..{len(events)}")
            )
        else:
            for event in anchored:
                if event.ordinal != expected[event.id]:
                    violations.append(
                        Violation(
                            event.id,
                            "ordinal-order",
                            f"event {event.id!r} has ordinal {event.ordinal}, anchor order says {expected[event.id]}",
                        )
                    )
    elif any(e.ordinal is not None for e in events):
        unnumbered = sorted(e.id for e in events if e.ordinal is None)
        violations.append(
            Violation(unnumbered[0], "ordinal-complete", f"events {unnumbered} lack ordinals")
        )

    for concept in chronology.concepts:
        if isinstance(concept, TemporalExpression):
            if concept.source_id not in object_ids and concept.source_id not in concept_ids:
                violations.append(
                    Violation(
                        concept.id,
                        "expression-source-resolves",
                        f"temporal expression {concept.id!r} references unknown host {concept.source_id!r}",
                    )
                )

    known = object_ids | concept_ids
    for rel in chronology.relations:
        for endpoint in rel.endpoints():
            if endpoint not in known:
                violations.append(
                    Violation(rel.id, "endpoint-resolves", f"relation {rel.id!r} references unknown {endpoint!r}")
                )
        level = chronology.level_of(rel)
        if level is not None and level not in ADMISSIBLE_LEVELS[rel.rel_type]:
            allowed = "/".join(sorted(l.value for l in ADMISSIBLE_LEVELS[rel.rel_type]))
            violations.append(
                Violation(
                    rel.id,
                    "admissible-level",
                    f"{rel.rel_type.value} admissible only at {allowed}, got {level.value}",
                )
            )
        if rel.directed != (rel.rel_type in DIRECTED_TYPES):
            violations.append(
                Violation(rel.id, "directedness", f"{rel.rel_type.value} directed flag is wrong")
            )
        if rel.weight is not None and not (0.0 <= rel.weight <= 1.0):
            violations.append(
                Violation(rel.id, "weight-range", f"weight {rel.weight} outside [0, 1]")
            )
    return violations


def _anchor_key(event: Event) -> tuple:
    assert event.anchor is not None
    return (event.anchor.start, event.id)


def renumber_events(chronology: Chronology) -> Chronology:
    """Assign ordinals 1..n by ascending anchor start, ties broken by id."""
    events = chronology.events()
    for event in events:
        if event.anchor is None:
            raise MissingAnchorError(event.id)
    order = {e.id: i + 1 for i, e in enumerate(sorted(events, key=_anchor_key))}
    concepts = tuple(
        replace(c, ordinal=order[c.id]) if isinstance(c, Event) else c for c in chronology.concepts
    )
    return replace(chronology, concepts=concepts)


def merge_events(chronology: Chronology, event_ids: Sequence[str]) -> Chronology:
    """Collapse the given events into one composite event (zoom out)."""
    if not event_ids:
        raise ChronologyError("merge_events needs at least one event id")
    ids = list(dict.fromkeys(event_ids))
    events_by_id = {e.id: e for e in chronology.events()}
    for event_id in ids:
        if event_id not in events_by_id:
            raise UnknownIdError(event_id, "event")
    if len(ids) == 1:
        return renumber_events(chronology)

    merged_ids = set(ids)
    members = [events_by_id[i] for i in sorted(ids)]
    anchor: Optional[DateInterval] = None
    for member in members:
        if member.anchor is not None:
            anchor = member.anchor if anchor is None else anchor.hull(member.anchor)
    constitutive: list[str] = []
    for member in members:
        for obj_id in member.constitutive_objects:
            if obj_id not in constitutive:
                constitutive.append(obj_id)
    composite = Event(
        id="merge-" + hashlib.sha256("+".join(sorted(ids)).encode()).hexdigest()[:12],
        title=" + ".join(m.title for m in members),
        description="\n".join(m.description for m in members if m.description),
        anchor=anchor,
        constitutive_objects=tuple(constitutive),
    )

    concepts = tuple(c for c in chronology.concepts if c.id not in merged_ids) + (composite,)

    reattached: dict[tuple, Relation] = {}
    for rel in chronology.relations:
        source = composite.id if rel.source in merged_ids else rel.source
        target = composite.id if rel.target in merged_ids else rel.target
        if source == target and rel.source != rel.target:
            continue  # edge internal to the merge group disappears
        moved = make_relation(
            rel.rel_type, source, target, rel.evidence, rel.weight, rel.provenance
        )
        prior = reattached.get(moved.key())
        if prior is not None:
            evidence = tuple(dict.fromkeys(prior.evidence + moved.evidence))
            weight = _max_weight(prior.weight, moved.weight)
            moved = replace(prior, evidence=evidence, weight=weight)
        reattached[moved.key()] = moved

    # constitutive objects of the composite keep their consists-of mirror
    for obj_id in composite.constitutive_objects:
        mirror = make_relation(RelationType.CONSISTS_OF, composite.id, obj_id)
        reattached.setdefault(mirror.key(), mirror)

    merged = replace(chronology, concepts=concepts, relations=tuple(reattached.values()))
    return renumber_events(merged)


def _max_weight(a: Optional[float], b: Optional[float]) -> Optional[float]:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def apply_perspective(chronology: Chronology, perspective: Perspective) -> Chronology:
    """Produce the situationalized chronology the perspective describes."""
    known = chronology.object_ids() | chronology.concept_ids()
    groups = perspective.merge_groups
    seen_members: set[str] = set()
    for group in groups:
        for member in group:
            if member not in known:
                raise UnknownIdError(member, f"perspective {perspective.name!r}")
            if member in seen_members:
                raise ChronologyError(f"merge groups overlap on {member!r}")
            seen_members.add(member)
    if perspective.entity_filter:
        for entity_id in perspective.entity_filter:
            if entity_id not in known:
                raise UnknownIdError(entity_id, f"perspective {perspective.name!r}")

    current = chronology
    for group in groups:
        current = merge_events(current, sorted(group))

    relations = [
        r
        for r in current.relations
        if r.rel_type in perspective.included_rel_types
        and (perspective.level_filter is None or current.level_of(r) in perspective.level_filter)
    ]

    events = current.events()
    kept_events = {
        e.id
        for e in events
        if perspective.time_window is None
        or (e.anchor is not None and perspective.time_window.intersects(e.anchor))
    }

    if perspective.entity_filter is not None:
        pinned = set(perspective.entity_filter)
        connected: set[str] = set(pinned)
        for rel in relations:
            a, b = rel.endpoints()
            if a in pinned:
                connected.add(b)
            if b in pinned:
                connected.add(a)
        kept_events &= connected
    else:
        connected = set()

    dropped_events = {e.id for e in events} - kept_events
    relations = [r for r in relations if not (set(r.endpoints()) & dropped_events)]

    still_referenced = {endpoint for r in relations for endpoint in r.endpoints()}
    constitutive_of: dict[str, set[str]] = {}
    for event in events:
        for obj_id in event.constitutive_objects:
            constitutive_of.setdefault(obj_id, set()).add(event.id)

    kept_object_ids: set[str] = set()
    for obj in current.objects:
        hosts = constitutive_of.get(obj.id, set())
        if hosts and not (hosts & kept_events) and obj.id not in still_referenced:
            continue  # exclusively owned by dropped events, now orphaned
        if (
            perspective.entity_filter is not None
            and obj.id not in connected
            and obj.id not in still_referenced
            and not (hosts & kept_events)
        ):
            continue
        kept_object_ids.add(obj.id)

    concepts = tuple(
        c
        for c in current.concepts
        if c.id not in dropped_events
        and not (isinstance(c, TemporalExpression) and c.source_id in dropped_events)
    )
    kept_ids = kept_object_ids | {c.id for c in concepts}
    relations = [r for r in relations if all(ep in kept_ids for ep in r.endpoints())]
    objects = tuple(o for o in current.objects if o.id in kept_object_ids)
    result = replace(current, objects=objects, concepts=concepts, relations=tuple(relations))
    result = renumber_events(result)
    leftover = validate(result)
    if leftover:
        raise ChronologyError(
            "perspective produced an invalid chronology: "
            + "; ".join(v.message for v in leftover)
        )
    return result
