"""Serialization round-trips and canonical text output."""

from __future__ import annotations

import json
from dataclasses import replace
from datetime import date

from timeflow import interchange
from timeflow.model import (
    DateInterval,
    Entity,
    EntityKind,
    Evidence,
    Level,
    Perspective,
    RelationType,
    Subject,
    TemporalExpression,
    make_relation,
)

from conftest import two_event_chronology


def _rich_chronology():
    chron = two_event_chronology()
    concepts = chron.concepts + (
        Entity(id="ent-acme", name="Acme", entity_kind=EntityKind.ORGANIZATION, aliases=("ACME Corp",)),
        Subject(id="sub-fraud", label="fraud", terms=("fraud",)),
        TemporalExpression(
            id="tex-doc-a-0",
            surface="08-03-2017",
            normalized=DateInterval.day(date(2017, 3, 8)),
            source_id="doc-a",
            span=(10, 20),
        ),
    )
    relations = chron.relations + (
        make_relation(
            RelationType.ENTITY,
            "ent-acme",
            "ev-a",
            evidence=(Evidence("doc-a", (3, 7), "Acme"),),
            weight=0.75,
        ),
    )
    return replace(chron, concepts=concepts, relations=relations)


class TestChronologyRoundtrip:
    def test_lossless(self):
        chron = _rich_chronology()
        again = interchange.chronology_from_dict(interchange.chronology_to_dict(chron))
        assert again == chron

    def test_unknown_fields_are_tolerated(self):
        data = interchange.chronology_to_dict(_rich_chronology())
        data["future_field"] = {"anything": 1}
        data["objects"][0]["future_flag"] = True
        data["concepts"][0]["annotations"] = ["x"]
        data["relations"][0]["confidence_notes"] = "high"
        parsed = interchange.chronology_from_dict(data)
        assert parsed == _rich_chronology()

    def test_schema_version_is_carried(self):
        data = interchange.chronology_to_dict(_rich_chronology())
        assert data["meta"]["schema_version"] == "timeflow/1"


class TestPerspectiveRoundtrip:
    def test_lossless(self):
        perspective = Perspective(
            name="focus",
            included_rel_types=frozenset({RelationType.ENTITY, RelationType.CONSISTS_OF}),
            entity_filter=("ent-acme",),
            time_window=DateInterval(date(2019, 1, 1), date(2020, 1, 1)),
            level_filter=frozenset({Level.EE}),
            merge_groups=(frozenset({"ev-a", "ev-b"}),),
        )
        again = interchange.perspective_from_dict(
            interchange.perspective_to_dict(perspective)
        )
        assert again == perspective

    def test_missing_optionals_default_to_everything(self):
        perspective = interchange.perspective_from_dict({"name": "all"})
        assert perspective.included_rel_types == frozenset(RelationType)
        assert perspective.entity_filter is None
        assert perspective.merge_groups == ()


class TestCanonicalText:
    def test_dumps_is_stable_and_sorted(self):
        data = interchange.chronology_to_dict(_rich_chronology())
        first = interchange.dumps(data)
        second = interchange.dumps(json.loads(first))
        assert first == second
        assert first.endswith("\n")
        parsed = json.loads(first)
        assert list(parsed) == sorted(parsed)

    def test_dates_use_iso_format(self):
        data = interchange.chronology_to_dict(_rich_chronology())
        event = next(c for c in data["concepts"] if c["id"] == "ev-a")
        assert event["anchor"] == {"start": "2020-01-01", "end": "2020-01-01"}
