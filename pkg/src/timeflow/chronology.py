"""Chronology assembly and gap analysis."""

from __future__ import annotations

from datetime import date, timedelta
from typing import Sequence

from .model import (
    Chronology,
    ChronologyError,
    ChronologyMeta,
    Concept,
    DateInterval,
    Event,
    InformationObject,
    Relation,
    RelationType,
    make_relation,
    renumber_events,
    validate,
)


class BuildError(ChronologyError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__(
            "chronology failed validation: " + "; ".join(v.message for v in violations)
        )


def build(
    objects: Sequence[InformationObject],
    concepts: Sequence[Concept],
    relations: Sequence[Relation],
    name: str = "chronology",
) -> Chronology:
    """Assemble, synthesize missing consists-of mirrors, validate, renumber."""
    existing = {
        (r.source, r.target)
        for r in relations
        if r.rel_type is RelationType.CONSISTS_OF
    }
    synthesized: list[Relation] = []
    for concept in concepts:
        if isinstance(concept, Event):
            for obj_id in concept.constitutive_objects:
                if (concept.id, obj_id) not in existing:
                    synthesized.append(
                        make_relation(RelationType.CONSISTS_OF, concept.id, obj_id)
                    )

    chronology = Chronology(
        objects=tuple(objects),
        concepts=tuple(concepts),
        relations=tuple(relations) + tuple(synthesized),
        meta=ChronologyMeta(name=name),
    )
    chronology = renumber_events(chronology)
    violations = validate(chronology)
    if violations:
        raise BuildError(violations)
    return chronology


def detect_gaps(chronology: Chronology, min_gap_days: int) -> list[DateInterval]:
    """Maximal stretches of at least min_gap_days between consecutive anchors."""
    if min_gap_days <= 0:
        raise ValueError("min_gap_days must be positive")
    anchors = sorted(
        (e.anchor for e in chronology.events() if e.anchor is not None),
        key=lambda a: (a.start, a.end),
    )
    gaps: list[DateInterval] = []
    covered_until: date | None = None
    for anchor in anchors:
        if covered_until is not None and anchor.start > covered_until:
            gap_days = (anchor.start - covered_until).days
            if gap_days >= min_gap_days:
                gaps.append(
                    DateInterval(
                        covered_until + timedelta(days=1),
                        anchor.start - timedelta(days=1),
                    )
                )
        covered_until = anchor.end if covered_until is None else max(covered_until, anchor.end)
    return gaps
