"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

from datetime import date
from pathlib import Path

import pytest

from timeflow.model import (
    Chronology,
    ChronologyMeta,
    DateInterval,
    Event,
    InformationObject,
    ObjectKind,
    RelationType,
    make_relation,
)

GOLDEN_MANIFEST = Path(__file__).parent.parent / "src" / "timeflow" / "data" / "golden" / "corpus.json"
GOLDEN_EXPECTED = Path(__file__).parent / "data" / "golden_expected.json"


def make_object(object_id: str, **overrides) -> InformationObject:
    defaults = dict(
        id=object_id,
        kind=ObjectKind.DOCUMENT,
        title=object_id.replace("-", " "),
        body=f"body of {object_id}",
    )
    defaults.update(overrides)
    return InformationObject(**defaults)


def make_event(event_id: str, day: date, objects: tuple[str, ...], **overrides) -> Event:
    defaults = dict(
        id=event_id,
        title=event_id.replace("-", " "),
        anchor=DateInterval.day(day),
        constitutive_objects=objects,
    )
    defaults.update(overrides)
    return Event(**defaults)


def two_event_chronology() -> Chronology:
    """Two numbered events, each holding one object, with consists-of mirrors."""
    obj_a = make_object("doc-a", created=date(2020, 1, 1))
    obj_b = make_object("doc-b", created=date(2020, 6, 1))
    ev_a = make_event("ev-a", date(2020, 1, 1), ("doc-a",), ordinal=1)
    ev_b = make_event("ev-b", date(2020, 6, 1), ("doc-b",), ordinal=2)
    relations = (
        make_relation(RelationType.CONSISTS_OF, "ev-a", "doc-a"),
        make_relation(RelationType.CONSISTS_OF, "ev-b", "doc-b"),
    )
    return Chronology(
        objects=(obj_a, obj_b),
        concepts=(ev_a, ev_b),
        relations=relations,
        meta=ChronologyMeta(name="two-events"),
    )


@pytest.fixture
def small_chronology() -> Chronology:
    return two_event_chronology()


@pytest.fixture(scope="session")
def golden_result():
    from timeflow.pipeline import run_pipeline_from_path

    return run_pipeline_from_path(GOLDEN_MANIFEST)
