"""JSON interchange for chronologies and perspectives (schema "timeflow/1").

Dates travel as "YYYY-MM-DD", intervals as {"start", "end"}. Parsing
tolerates unknown additive fields so newer producers stay readable.
"""

from __future__ import annotations

import json
from datetime import date
from typing import Any, Optional

from .model import (
    SCHEMA_VERSION,
    Chronology,
    ChronologyMeta,
    Concept,
    DateInterval,
    Entity,
    EntityKind,
    Event,
    Evidence,
    InformationObject,
    Level,
    ObjectKind,
    Perspective,
    Provenance,
    Relation,
    RelationType,
    Subject,
    TemporalExpression,
)


def _date_out(d: Optional[date]) -> Optional[str]:
    return d.isoformat() if d is not None else None


def _date_in(value: Optional[str]) -> Optional[date]:
    return date.fromisoformat(value) if value else None


def interval_to_dict(interval: Optional[DateInterval]) -> Optional[dict]:
    if interval is None:
        return None
    return {"start": interval.start.isoformat(), "end": interval.end.isoformat()}


def interval_from_dict(value: Optional[dict]) -> Optional[DateInterval]:
    if not value:
        return None
    return DateInterval(date.fromisoformat(value["start"]), date.fromisoformat(value["end"]))


def object_to_dict(obj: InformationObject) -> dict:
    return {
        "id": obj.id,
        "kind": obj.kind.value,
        "title": obj.title,
        "body": obj.body,
        "created": _date_out(obj.created),
        "sender": obj.sender,
        "recipients": list(obj.recipients),
        "in_reply_to": obj.in_reply_to,
        "reply_external": obj.reply_external,
        "forwarded_from": obj.forwarded_from,
        "attachments": list(obj.attachments),
        "source_path": obj.source_path,
        "content_hash": obj.content_hash,
    }


def object_from_dict(data: dict) -> InformationObject:
    return InformationObject(
        id=data["id"],
        kind=ObjectKind(data.get("kind", "other")),
        title=data.get("title", ""),
        body=data.get("body", ""),
        created=_date_in(data.get("created")),
        sender=data.get("sender"),
        recipients=tuple(data.get("recipients", ())),
        in_reply_to=data.get("in_reply_to"),
        reply_external=bool(data.get("reply_external", False)),
        forwarded_from=data.get("forwarded_from"),
        attachments=tuple(data.get("attachments", ())),
        source_path=data.get("source_path", ""),
        content_hash=data.get("content_hash", ""),
    )


def concept_to_dict(concept: Concept) -> dict:
    if isinstance(concept, Event):
        return {
            "id": concept.id,
            "variant": "event",
            "title": concept.title,
            "description": concept.description,
            "anchor": interval_to_dict(concept.anchor),
            "ordinal": concept.ordinal,
            "constitutive_objects": list(concept.constitutive_objects),
        }
    if isinstance(concept, Entity):
        return {
            "id": concept.id,
            "variant": "entity",
            "name": concept.name,
            "entity_kind": concept.entity_kind.value,
            "aliases": list(concept.aliases),
        }
    if isinstance(concept, Subject):
        return {
            "id": concept.id,
            "variant": "subject",
            "label": concept.label,
            "terms": list(concept.terms),
        }
    if isinstance(concept, TemporalExpression):
        return {
            "id": concept.id,
            "variant": "temporal-expression",
            "surface": concept.surface,
            "normalized": interval_to_dict(concept.normalized),
            "source_id": concept.source_id,
            "span": list(concept.span),
        }
    raise TypeError(f"not a concept: {concept!r}")


def concept_from_dict(data: dict) -> Concept:
    variant = data["variant"]
    if variant == "event":
        return Event(
            id=data["id"],
            title=data.get("title", ""),
            description=data.get("description", ""),
            anchor=interval_from_dict(data.get("anchor")),
            ordinal=data.get("ordinal"),
            constitutive_objects=tuple(data.get("constitutive_objects", ())),
        )
    if variant == "entity":
        return Entity(
            id=data["id"],
            name=data["name"],
            entity_kind=EntityKind(data["entity_kind"]),
            aliases=tuple(data.get("aliases", ())),
        )
    if variant == "subject":
        return Subject(id=data["id"], label=data["label"], terms=tuple(data.get("terms", ())))
    if variant == "temporal-expression":
        interval = interval_from_dict(data["normalized"])
        assert interval is not None
        return TemporalExpression(
            id=data["id"],
            surface=data.get("surface", ""),
            normalized=interval,
            source_id=data["source_id"],
            span=tuple(data.get("span", (0, 0))),  # type: ignore[arg-type]
        )
    raise ValueError(f"unknown concept variant {variant!r}")


def relation_to_dict(rel: Relation) -> dict:
    return {
        "id": rel.id,
        "rel_type": rel.rel_type.value,
        "from": rel.source,
        "to": rel.target,
        "directed": rel.directed,
        "evidence": [
            {"holder": e.holder, "span": list(e.span), "surface": e.surface} for e in rel.evidence
        ],
        "weight": rel.weight,
        "provenance": rel.provenance.value,
    }


def relation_from_dict(data: dict) -> Relation:
    return Relation(
        id=data["id"],
        rel_type=RelationType(data["rel_type"]),
        source=data["from"],
        target=data["to"],
        directed=bool(data["directed"]),
        evidence=tuple(
            Evidence(e["holder"], tuple(e.get("span", (0, 0))), e.get("surface", ""))
            for e in data.get("evidence", ())
        ),
        weight=data.get("weight"),
        provenance=Provenance(data.get("provenance", "derived")),
    )


def chronology_to_dict(chronology: Chronology) -> dict:
    return {
        "meta": {
            "name": chronology.meta.name,
            "created": _date_out(chronology.meta.created),
            "schema_version": chronology.meta.schema_version,
        },
        "objects": [object_to_dict(o) for o in chronology.objects],
        "concepts": [concept_to_dict(c) for c in chronology.concepts],
        "relations": [relation_to_dict(r) for r in chronology.relations],
    }


def chronology_from_dict(data: dict) -> Chronology:
    meta = data.get("meta", {})
    return Chronology(
        objects=tuple(object_from_dict(o) for o in data.get("objects", ())),
        concepts=tuple(concept_from_dict(c) for c in data.get("concepts", ())),
        relations=tuple(relation_from_dict(r) for r in data.get("relations", ())),
        meta=ChronologyMeta(
            name=meta.get("name", "chronology"),
            created=_date_in(meta.get("created")),
            schema_version=meta.get("schema_version", SCHEMA_VERSION),
        ),
    )


def perspective_to_dict(perspective: Perspective) -> dict:
    return {
        "name": perspective.name,
        "included_rel_types": sorted(t.value for t in perspective.included_rel_types),
        "entity_filter": list(perspective.entity_filter) if perspective.entity_filter else None,
        "time_window": interval_to_dict(perspective.time_window),
        "level_filter": sorted(l.value for l in perspective.level_filter)
        if perspective.level_filter is not None
        else None,
        "merge_groups": [sorted(group) for group in perspective.merge_groups],
    }


def perspective_from_dict(data: dict) -> Perspective:
    return Perspective(
        name=data["name"],
        included_rel_types=frozenset(
            RelationType(t) for t in data.get("included_rel_types", [t.value for t in RelationType])
        ),
        entity_filter=tuple(data["entity_filter"]) if data.get("entity_filter") else None,
        time_window=interval_from_dict(data.get("time_window")),
        level_filter=frozenset(Level(l) for l in data["level_filter"])
        if data.get("level_filter")
        else None,
        merge_groups=tuple(frozenset(g) for g in data.get("merge_groups", ())),
    )


def dumps(data: dict) -> str:
    """Canonical, byte-stable JSON text."""
    return json.dumps(data, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Any:
    return json.loads(text)
