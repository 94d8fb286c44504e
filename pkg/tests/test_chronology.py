"""Chronology assembly and gap detection."""

from __future__ import annotations

import random
from datetime import date, timedelta

import pytest

from timeflow.chronology import BuildError, build, detect_gaps
from timeflow.model import (
    Chronology,
    DateInterval,
    RelationType,
    make_relation,
    validate,
)

from conftest import make_event, make_object


class TestBuild:
    def test_synthesizes_missing_consists_of_mirrors(self):
        obj = make_object("doc-a")
        event = make_event("ev-a", date(2020, 1, 1), ("doc-a",))
        chron = build([obj], [event], [])
        mirrors = [
            (r.source, r.target)
            for r in chron.relations
            if r.rel_type is RelationType.CONSISTS_OF
        ]
        assert mirrors == [("ev-a", "doc-a")]
        assert chron.events()[0].ordinal == 1
        assert validate(chron) == []

    def test_existing_mirror_is_not_duplicated(self):
        obj = make_object("doc-a")
        event = make_event("ev-a", date(2020, 1, 1), ("doc-a",))
        mirror = make_relation(RelationType.CONSISTS_OF, "ev-a", "doc-a")
        chron = build([obj], [event], [mirror])
        assert len(chron.relations) == 1

    def test_invalid_input_raises_with_violations(self):
        event = make_event("ev-a", date(2020, 1, 1), ("ghost",))
        with pytest.raises(BuildError) as excinfo:
            build([], [event], [])
        assert any(v.rule == "constitutive-resolves" for v in excinfo.value.violations)


def _chronology_with_anchors(anchors: list[DateInterval]) -> Chronology:
    objects, concepts, relations = [], [], []
    for i, anchor in enumerate(anchors):
        obj = make_object(f"doc-{i}")
        event = make_event(f"ev-{i}", anchor.start, (obj.id,), anchor=anchor)
        objects.append(obj)
        concepts.append(event)
        relations.append(make_relation(RelationType.CONSISTS_OF, event.id, obj.id))
    return build(objects, concepts, relations)


def _oracle_gaps(anchors: list[DateInterval], min_days: int) -> list[DateInterval]:
    """Independent oracle: walk sorted anchors, measuring coverage jumps."""
    ordered = sorted(anchors, key=lambda a: (a.start, a.end))
    out = []
    covered = None
    for anchor in ordered:
        if covered is not None and (anchor.start - covered).days >= min_days and anchor.start > covered:
            out.append(
                DateInterval(covered + timedelta(days=1), anchor.start - timedelta(days=1))
            )
        covered = anchor.end if covered is None else max(covered, anchor.end)
    return out


class TestDetectGaps:
    def test_simple_year_gap(self):
        anchors = [
            DateInterval.day(date(2013, 4, 21)),
            DateInterval.day(date(2016, 3, 15)),
        ]
        gaps = detect_gaps(_chronology_with_anchors(anchors), 365)
        assert gaps == [DateInterval(date(2013, 4, 22), date(2016, 3, 14))]

    def test_threshold_filters_small_gaps(self):
        anchors = [
            DateInterval.day(date(2020, 1, 1)),
            DateInterval.day(date(2020, 1, 20)),
            DateInterval.day(date(2021, 6, 1)),
        ]
        gaps = detect_gaps(_chronology_with_anchors(anchors), 60)
        assert gaps == [DateInterval(date(2020, 1, 21), date(2021, 5, 31))]

    def test_overlapping_intervals_extend_coverage(self):
        anchors = [
            DateInterval(date(2020, 1, 1), date(2020, 6, 1)),
            DateInterval(date(2020, 3, 1), date(2020, 4, 1)),  # inside the first
            DateInterval.day(date(2021, 1, 1)),
        ]
        gaps = detect_gaps(_chronology_with_anchors(anchors), 30)
        assert gaps == [DateInterval(date(2020, 6, 2), date(2020, 12, 31))]

    def test_matches_pairwise_oracle_on_random_inputs(self):
        rng = random.Random(5)
        base = date(2010, 1, 1)
        for _ in range(30):
            anchors = []
            for _ in range(rng.randrange(1, 10)):
                start = base + timedelta(days=rng.randrange(0, 3000))
                anchors.append(DateInterval(start, start + timedelta(days=rng.randrange(0, 90))))
            min_days = rng.choice([30, 180, 365])
            got = detect_gaps(_chronology_with_anchors(anchors), min_days)
            assert got == _oracle_gaps(anchors, min_days)

    def test_nonpositive_threshold_rejected(self):
        with pytest.raises(ValueError):
            detect_gaps(_chronology_with_anchors([DateInterval.day(date(2020, 1, 1))]), 0)
