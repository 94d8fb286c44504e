"""End-to-end composition: manifest -> objects -> concepts -> relations -> chronology.

Pairwise entity, subject, and correspondence derivations run at the event
level (events inherit correspondents and thread membership from their
constitutive objects); temporal-semantic runs across objects and events
using each item's own text. Pinned entities additionally get star edges to
every object or event that mentions them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import extract, ingest, relate
from .chronology import build
from .model import Chronology, Concept, Event, Relation, RelationType, TemporalExpression


@dataclass
class PipelineResult:
    chronology: Chronology
    corpus: ingest.LoadedCorpus
    candidates: list[extract.CandidateEvent] = field(default_factory=list)
    proposals: list[Relation] = field(default_factory=list)
    rejections: list[relate.Rejection] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def event_text(event: Event) -> str:
    return event.title + ("\n" + event.description if event.description else "")


def run_pipeline(manifest: ingest.CorpusManifest, name: Optional[str] = None) -> PipelineResult:
    corpus = ingest.load_corpus(manifest)
    warnings = list(corpus.warnings)

    gazetteer = (
        extract.load_gazetteer(manifest.gazetteer_path) if manifest.gazetteer_path else None
    )
    lexicon = (
        extract.load_subject_lexicon(manifest.subjects_path) if manifest.subjects_path else None
    )
    periods = extract.load_period_table(manifest.periods_path) if manifest.periods_path else None
    annotations = (
        extract.load_annotations(manifest.annotations_path)
        if manifest.annotations_path
        else None
    )
    assertions = (
        relate.load_assertions(manifest.assertions_path) if manifest.assertions_path else []
    )

    temporal_by_object: dict[str, list[extract.TemporalMatch]] = {}
    entities_by_object: dict[str, list[extract.EntityMention]] = {}
    for obj in corpus.objects:
        matches, temporal_warnings = extract.extract_temporal(
            obj.body, reference_date=obj.created, locale=manifest.locale, period_table=periods
        )
        temporal_by_object[obj.id] = matches
        warnings.extend(f"{obj.id}: {w}" for w in temporal_warnings)
        if gazetteer is not None:
            entities_by_object[obj.id] = extract.extract_entities(obj.body, gazetteer)

    events, candidates = extract.propose_events(
        corpus.objects, annotations, temporal_by_object, entities_by_object
    )

    temporal_by_event: dict[str, list[extract.TemporalMatch]] = {}
    entities_by_event: dict[str, list[extract.EntityMention]] = {}
    subjects_by_event: dict[str, list[extract.SubjectHit]] = {}
    for event in events:
        text = event_text(event)
        reference = event.anchor.start if event.anchor else None
        matches, temporal_warnings = extract.extract_temporal(
            text, reference_date=reference, locale=manifest.locale, period_table=periods
        )
        temporal_by_event[event.id] = matches
        warnings.extend(f"{event.id}: {w}" for w in temporal_warnings)
        if gazetteer is not None:
            entities_by_event[event.id] = extract.extract_entities(text, gazetteer)
        if lexicon is not None and not lexicon.tfidf:
            subjects_by_event[event.id] = extract.extract_subjects(text, lexicon)

    relations: list[Relation] = []
    relations.extend(relate.derive_consists_of(events))

    succession, succession_warnings = relate.derive_succession(corpus.objects)
    relations.extend(succession)
    warnings.extend(succession_warnings)

    references, reference_warnings = relate.derive_references_to(corpus.objects)
    relations.extend(references)
    warnings.extend(reference_warnings)

    all_expressions = {
        **{k: v for k, v in temporal_by_object.items() if v},
        **{k: v for k, v in temporal_by_event.items() if v},
    }
    relations.extend(relate.derive_temporal_semantic(all_expressions))

    pinned = annotations.pinned_entities if annotations else []
    entity_concepts_by_id: dict[str, Concept] = {}
    if gazetteer is not None:
        event_mentions = {k: v for k, v in entities_by_event.items() if v}
        entity_relations, concepts_a = relate.derive_entity_relations(
            event_mentions, pinned=pinned
        )
        relations.extend(entity_relations)
        if pinned:
            # pinned star edges also reach objects that mention the entity
            object_mentions = {k: v for k, v in entities_by_object.items() if v}
            star_relations, concepts_b = relate.derive_entity_relations(
                object_mentions, pinned=pinned
            )
            relations.extend(
                r
                for r in star_relations
                if r.source.startswith("ent-") or r.target.startswith("ent-")
            )
            for concept in concepts_b:
                entity_concepts_by_id[concept.id] = concept
        for concept in concepts_a:
            entity_concepts_by_id[concept.id] = concept
    entity_concepts = list(entity_concepts_by_id.values())

    if lexicon is not None:
        if lexicon.tfidf:
            relations.extend(
                relate.derive_subject_relations_tfidf(
                    {e.id: event_text(e) for e in events}, lexicon.cosine_threshold
                )
            )
        else:
            relations.extend(
                relate.derive_subject_relations(
                    {k: v for k, v in subjects_by_event.items() if v}
                )
            )

    relations.extend(
        relate.derive_correspondence(
            relate.correspondence_items_for_events(events, corpus.objects)
        )
    )

    causal = relate.derive_causal(events, corpus.objects, assertions=assertions)
    relations.extend(causal.relations)

    for assertion in assertions:
        if assertion.rel_type is RelationType.CAUSAL:
            continue
        from .model import Evidence, Provenance, make_relation

        relations.append(
            make_relation(
                assertion.rel_type,
                assertion.source,
                assertion.target,
                evidence=(Evidence(assertion.source, (0, 0), assertion.note or "asserted"),),
                provenance=Provenance.ASSERTED,
            )
        )

    expression_concepts: list[TemporalExpression] = []
    for host_id, matches in sorted(all_expressions.items()):
        for index, match in enumerate(matches):
            expression_concepts.append(
                TemporalExpression(
                    id=f"tex-{host_id}-{index}",
                    surface=match.surface,
                    normalized=match.interval,
                    source_id=host_id,
                    span=match.span,
                )
            )

    concepts: list[Concept] = [*events, *entity_concepts, *expression_concepts]
    accepted, rejections = relate.finalize(
        relations,
        object_ids=[o.id for o in corpus.objects],
        concept_ids=[c.id for c in concepts],
    )

    chronology = build(
        corpus.objects, concepts, accepted, name=name or manifest.name
    )
    return PipelineResult(
        chronology=chronology,
        corpus=corpus,
        candidates=candidates,
        proposals=causal.proposals,
        rejections=rejections,
        warnings=warnings,
    )


def run_pipeline_from_path(manifest_path: Path, name: Optional[str] = None) -> PipelineResult:
    return run_pipeline(ingest.load_manifest(Path(manifest_path)), name=name)
