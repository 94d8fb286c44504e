"""Derivation of the eight typed relations from objects, concepts, and metadata.

Every derivation is pure and order-independent; `finalize` computes levels,
rejects inadmissible (type, level) pairs with diagnostics, and merges
duplicates deterministically.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .extract import EntityMention, SubjectHit, TemporalMatch, entity_id, split_sentences, tfidf_cosine
from .model import (
    ADMISSIBLE_LEVELS,
    Entity,
    Event,
    Evidence,
    InformationObject,
    Provenance,
    Relation,
    RelationType,
    make_relation,
)

DEFAULT_CAUSAL_CUES = (
    "because",
    "therefore",
    "as a result",
    "led to",
    "caused",
    "consequence of",
)

CAUSAL_AUTO_ACCEPT_DAYS = 7


@dataclass
class CausalCueLexicon:
    cues: tuple[str, ...] = DEFAULT_CAUSAL_CUES

    def __post_init__(self) -> None:
        if not self.cues:
            raise ValueError("cue lexicon must not be empty")
        object.__setattr__(self, "cues", tuple(c.lower() for c in self.cues))


@dataclass(frozen=True)
class Assertion:
    rel_type: RelationType
    source: str
    target: str
    note: str = ""


def load_assertions(path: Path) -> list[Assertion]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [
        Assertion(
            rel_type=RelationType(a["type"]),
            source=a["from"],
            target=a["to"],
            note=a.get("note", ""),
        )
        for a in data.get("assertions", [])
    ]


def derive_consists_of(events: Sequence[Event]) -> list[Relation]:
    relations = []
    for event in events:
        if not event.constitutive_objects:
            raise ValueError(f"event {event.id!r} has no constitutive objects")
        for obj_id in event.constitutive_objects:
            relations.append(
                make_relation(
                    RelationType.CONSISTS_OF,
                    event.id,
                    obj_id,
                    evidence=(Evidence(event.id, (0, 0), "constitutive object"),),
                )
            )
    return relations


def derive_succession(
    objects: Sequence[InformationObject],
) -> tuple[list[Relation], list[str]]:
    """Directed edges from the original to its direct reply or forward."""
    known = {o.id for o in objects}
    relations: list[Relation] = []
    warnings: list[str] = []
    for obj in objects:
        for link, label in ((obj.in_reply_to, "in-reply-to"), (obj.forwarded_from, "forwarded-from")):
            if link is None:
                continue
            if link not in known:
                warnings.append(f"{obj.id}: {label} target {link!r} not in corpus")
                continue
            relations.append(
                make_relation(
                    RelationType.SUCCESSION,
                    link,
                    obj.id,
                    evidence=(Evidence(obj.id, (0, 0), label),),
                )
            )
    return relations, warnings


def derive_references_to(
    objects: Sequence[InformationObject],
) -> tuple[list[Relation], list[str]]:
    """Edges from referrer to referenced for attachments and verbatim title mentions."""
    by_id = {o.id: o for o in objects}
    relations: list[Relation] = []
    warnings: list[str] = []
    for obj in objects:
        for attachment in obj.attachments:
            if attachment == obj.id:
                continue
            if attachment not in by_id:
                warnings.append(f"{obj.id}: attachment {attachment!r} unresolved")
                continue
            relations.append(
                make_relation(
                    RelationType.REFERENCES_TO,
                    obj.id,
                    attachment,
                    evidence=(Evidence(obj.id, (0, 0), f"attachment {attachment}"),),
                )
            )
        for other in objects:
            if other.id == obj.id or not other.title:
                continue
            index = obj.body.find(other.title)
            if index >= 0:
                relations.append(
                    make_relation(
                        RelationType.REFERENCES_TO,
                        obj.id,
                        other.id,
                        evidence=(
                            Evidence(obj.id, (index, index + len(other.title)), other.title),
                        ),
                    )
                )
    return relations, warnings


def derive_temporal_semantic(
    expressions_by_item: dict[str, list[TemporalMatch]],
) -> list[Relation]:
    """Undirected edges between items whose normalized intervals intersect."""
    relations: list[Relation] = []
    items = sorted(expressions_by_item)
    for i, first in enumerate(items):
        for second in items[i + 1 :]:
            evidence: list[Evidence] = []
            for a in expressions_by_item[first]:
                for b in expressions_by_item[second]:
                    if a.interval.intersects(b.interval):
                        evidence.append(Evidence(first, a.span, a.surface))
                        evidence.append(Evidence(second, b.span, b.surface))
            if evidence:
                relations.append(
                    make_relation(
                        RelationType.TEMPORAL_SEMANTIC,
                        first,
                        second,
                        evidence=tuple(dict.fromkeys(evidence)),
                    )
                )
    return relations


def derive_entity_relations(
    mentions_by_item: dict[str, list[EntityMention]],
    pinned: Sequence[str] = (),
) -> tuple[list[Relation], list[Entity]]:
    """Pairwise edges over shared linked entities; star edges for pinned ones.

    Pinned entities become concept nodes and are excluded from the pairwise
    derivation (their star already expresses the sharing).
    """
    pinned_set = {p.lower() for p in pinned}
    relations: list[Relation] = []
    items = sorted(mentions_by_item)
    for i, first in enumerate(items):
        for second in items[i + 1 :]:
            evidence: list[Evidence] = []
            shared = set()
            for a in mentions_by_item[first]:
                if a.candidate or a.canonical.lower() in pinned_set:
                    continue
                for b in mentions_by_item[second]:
                    if b.candidate or b.canonical != a.canonical:
                        continue
                    shared.add(a.canonical)
                    evidence.append(Evidence(first, a.span, a.surface))
                    evidence.append(Evidence(second, b.span, b.surface))
            if shared:
                relations.append(
                    make_relation(
                        RelationType.ENTITY,
                        first,
                        second,
                        evidence=tuple(dict.fromkeys(evidence)),
                    )
                )

    concepts: list[Entity] = []
    for canonical in pinned:
        concept: Optional[Entity] = None
        for item in items:
            for mention in mentions_by_item[item]:
                if mention.candidate or mention.canonical.lower() != canonical.lower():
                    continue
                if concept is None:
                    concept = Entity(
                        id=entity_id(mention.canonical),
                        name=mention.canonical,
                        entity_kind=mention.entity_kind,
                    )
                relations.append(
                    make_relation(
                        RelationType.ENTITY,
                        concept.id,
                        item,
                        evidence=(Evidence(item, mention.span, mention.surface),),
                    )
                )
        if concept is not None:
            concepts.append(concept)
    return relations, concepts


def derive_subject_relations(
    hits_by_item: dict[str, list[SubjectHit]],
) -> list[Relation]:
    """Undirected edges between items sharing a subject label (weight 1.0)."""
    relations: list[Relation] = []
    items = sorted(hits_by_item)
    for i, first in enumerate(items):
        for second in items[i + 1 :]:
            evidence: list[Evidence] = []
            shared = {h.label for h in hits_by_item[first]} & {
                h.label for h in hits_by_item[second]
            }
            if not shared:
                continue
            for item in (first, second):
                for hit in hits_by_item[item]:
                    if hit.label in shared:
                        evidence.append(Evidence(item, hit.span, hit.surface))
            relations.append(
                make_relation(
                    RelationType.SUBJECT,
                    first,
                    second,
                    evidence=tuple(dict.fromkeys(evidence)),
                    weight=1.0,
                )
            )
    return relations


def derive_subject_relations_tfidf(
    texts_by_item: dict[str, str], threshold: float
) -> list[Relation]:
    """Undirected edges between items with TF-IDF cosine >= threshold."""
    items = sorted(texts_by_item)
    matrix = tfidf_cosine([texts_by_item[i] for i in items])
    relations = []
    for i, first in enumerate(items):
        for j in range(i + 1, len(items)):
            score = matrix[i][j]
            if score >= threshold:
                relations.append(
                    make_relation(
                        RelationType.SUBJECT,
                        first,
                        items[j],
                        weight=round(score, 12),
                    )
                )
    return relations


@dataclass(frozen=True)
class CorrespondenceItem:
    id: str
    correspondents: frozenset[str]
    threads: frozenset[str]


def correspondence_items_for_objects(
    objects: Sequence[InformationObject],
) -> list[CorrespondenceItem]:
    threads = _thread_ids(objects)
    return [
        CorrespondenceItem(o.id, o.correspondents(), frozenset({threads[o.id]}))
        for o in objects
    ]


def correspondence_items_for_events(
    events: Sequence[Event], objects: Sequence[InformationObject]
) -> list[CorrespondenceItem]:
    """Events inherit correspondents and thread membership from their objects."""
    by_id = {o.id: o for o in objects}
    threads = _thread_ids(objects)
    items = []
    for event in events:
        correspondents: set[str] = set()
        event_threads: set[str] = set()
        for obj_id in event.constitutive_objects:
            obj = by_id.get(obj_id)
            if obj is None:
                continue
            correspondents |= obj.correspondents()
            event_threads.add(threads[obj_id])
        items.append(CorrespondenceItem(event.id, frozenset(correspondents), frozenset(event_threads)))
    return items


def _thread_ids(objects: Sequence[InformationObject]) -> dict[str, str]:
    """Union-find over direct reply/forward links; thread id = smallest member id."""
    parent = {o.id: o.id for o in objects}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb))
            parent[hi] = lo

    for obj in objects:
        for link in (obj.in_reply_to, obj.forwarded_from):
            if link is not None and link in parent:
                union(obj.id, link)
    return {o.id: find(o.id) for o in objects}


def derive_correspondence(items: Sequence[CorrespondenceItem]) -> list[Relation]:
    """Edges between items that share a correspondent and a reply/forward thread."""
    relations = []
    ordered = sorted(items, key=lambda i: i.id)
    for i, first in enumerate(ordered):
        for second in ordered[i + 1 :]:
            shared = first.correspondents & second.correspondents
            if not shared or not (first.threads & second.threads):
                continue
            evidence = tuple(
                Evidence(first.id, (0, 0), name) for name in sorted(shared)
            )
            relations.append(
                make_relation(RelationType.CORRESPONDENCE, first.id, second.id, evidence=evidence)
            )
    return relations


@dataclass
class CausalDerivation:
    relations: list[Relation] = field(default_factory=list)
    proposals: list[Relation] = field(default_factory=list)


def derive_causal(
    events: Sequence[Event],
    objects: Sequence[InformationObject],
    cue_lexicon: Optional[CausalCueLexicon] = None,
    assertions: Sequence[Assertion] = (),
    auto_accept_days: int = CAUSAL_AUTO_ACCEPT_DAYS,
) -> CausalDerivation:
    """Causal edges from assertions, the reply/forward heuristic, and cue phrases."""
    cue_lexicon = cue_lexicon or CausalCueLexicon()
    out = CausalDerivation()

    for assertion in assertions:
        if assertion.rel_type is not RelationType.CAUSAL:
            continue
        out.relations.append(
            make_relation(
                RelationType.CAUSAL,
                assertion.source,
                assertion.target,
                evidence=(Evidence(assertion.source, (0, 0), assertion.note or "asserted"),),
                provenance=Provenance.ASSERTED,
            )
        )

    by_id = {o.id: o for o in objects}
    owners: dict[str, list[Event]] = {}
    for event in events:
        for obj_id in event.constitutive_objects:
            owners.setdefault(obj_id, []).append(event)

    for obj in objects:
        for link in (obj.in_reply_to, obj.forwarded_from):
            if link is None or link not in by_id:
                continue
            for later in owners.get(obj.id, ()):
                for earlier in owners.get(link, ()):
                    if earlier.id == later.id:
                        continue
                    rel = make_relation(
                        RelationType.CAUSAL,
                        earlier.id,
                        later.id,
                        evidence=(
                            Evidence(obj.id, (0, 0), f"reply/forward of {link}"),
                        ),
                    )
                    gap = _day_gap(by_id[link].created, obj.created)
                    if gap is not None and gap <= auto_accept_days:
                        out.relations.append(rel)
                    else:
                        out.proposals.append(rel)

    out.relations.extend(_cue_edges(events, objects, cue_lexicon))
    return out


def _day_gap(a: Optional[date], b: Optional[date]) -> Optional[int]:
    if a is None or b is None:
        return None
    return abs((b - a).days)


def _cue_edges(
    events: Sequence[Event],
    objects: Sequence[InformationObject],
    cue_lexicon: CausalCueLexicon,
) -> list[Relation]:
    """One earlier->later edge per sentence with a cue between two event mentions."""
    relations = []
    titled = [e for e in events if e.title]
    for obj in objects:
        lowered = obj.body.lower()
        for start, end in split_sentences(obj.body):
            sentence = lowered[start:end]
            cue_spans = [
                (start + m.start(), start + m.end())
                for cue in cue_lexicon.cues
                for m in re.finditer(re.escape(cue), sentence)
            ]
            if not cue_spans:
                continue
            mentions = []
            for event in titled:
                idx = sentence.find(event.title.lower())
                if idx >= 0:
                    mentions.append((event, (start + idx, start + idx + len(event.title))))
            for i, (ev_a, span_a) in enumerate(mentions):
                for ev_b, span_b in mentions[i + 1 :]:
                    if ev_a.id == ev_b.id:
                        continue
                    lo, hi = sorted([span_a, span_b])
                    if not any(lo[1] <= cs and ce <= hi[0] for cs, ce in cue_spans):
                        continue
                    first, second = ev_a, ev_b
                    if first.anchor and second.anchor and second.anchor.start < first.anchor.start:
                        first, second = second, first
                    relations.append(
                        make_relation(
                            RelationType.CAUSAL,
                            first.id,
                            second.id,
                            evidence=(
                                Evidence(obj.id, (start, end), obj.body[start:end].strip()),
                            ),
                        )
                    )
    return relations


@dataclass(frozen=True)
class Rejection:
    relation: Relation
    reason: str


def finalize(
    relations: Iterable[Relation],
    object_ids: Iterable[str],
    concept_ids: Iterable[str],
) -> tuple[list[Relation], list[Rejection]]:
    """Admissibility check, duplicate merge, deterministic ordering."""
    objects = set(object_ids)
    concepts = set(concept_ids)
    merged: dict[tuple, Relation] = {}
    rejected: list[Rejection] = []

    for rel in relations:
        level = _level(rel, objects, concepts)
        if level is None:
            rejected.append(Rejection(rel, "unresolved endpoint"))
            continue
        if level not in ADMISSIBLE_LEVELS[rel.rel_type]:
            allowed = "/".join(sorted(l.value for l in ADMISSIBLE_LEVELS[rel.rel_type]))
            rejected.append(
                Rejection(rel, f"{rel.rel_type.value} admissible only at {allowed}, got {level}")
            )
            continue
        prior = merged.get(rel.key())
        if prior is None:
            merged[rel.key()] = rel
        else:
            evidence = tuple(dict.fromkeys(prior.evidence + rel.evidence))
            weight = prior.weight if rel.weight is None else (
                rel.weight if prior.weight is None else max(prior.weight, rel.weight)
            )
            provenance = (
                Provenance.ASSERTED
                if Provenance.ASSERTED in (prior.provenance, rel.provenance)
                else Provenance.DERIVED
            )
            merged[rel.key()] = Relation(
                id=prior.id,
                rel_type=prior.rel_type,
                source=prior.source,
                target=prior.target,
                directed=prior.directed,
                evidence=evidence,
                weight=weight,
                provenance=provenance,
            )

    accepted = sorted(merged.values(), key=lambda r: (r.rel_type.value, r.source, r.target))
    return accepted, rejected


def _level(rel: Relation, objects: set[str], concepts: set[str]) -> Optional[str]:
    def side(endpoint: str) -> Optional[str]:
        if endpoint in objects:
            return "T"
        if endpoint in concepts:
            return "E"
        return None

    a, b = side(rel.source), side(rel.target)
    if a is None or b is None:
        return None
    from .model import Level

    if a == b == "T":
        return Level.TT
    if a == b == "E":
        return Level.EE
    return Level.TE
