"""Rule-based concept extraction: temporal expressions, entities, subjects,
and candidate events.

Numeric dates default to day-month-year order; two-digit years pivot at 70
(>= 70 is 19xx, below is 20xx). All extractors are pure and deterministic
for a fixed (text, reference date, locale) triple.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Optional

from .model import DateInterval, EntityKind, Event

TWO_DIGIT_YEAR_PIVOT = 70

MONTHS = {
    name: i + 1
    for i, name in enumerate(
        [
            "january",
            "february",
            "march",
            "april",
            "may",
            "june",
            "july",
            "august",
            "september",
            "october",
            "november",
            "december",
        ]
    )
}
_MONTH_ALT = "|".join(MONTHS)

ORDINAL_WORDS = {
    "first": 1,
    "second": 2,
    "third": 3,
    "fourth": 4,
    "fifth": 5,
    "sixth": 6,
    "seventh": 7,
    "eighth": 8,
    "ninth": 9,
    "tenth": 10,
}
_ORDINAL_ALT = "|".join(ORDINAL_WORDS)

ABBREVIATIONS = {"mr", "mrs", "ms", "dr", "prof", "vs", "etc", "e.g", "i.e", "no", "art"}


@dataclass(frozen=True)
class TemporalMatch:
    surface: str
    span: tuple[int, int]
    interval: DateInterval


@dataclass
class Gazetteer:
    entries: list[tuple[str, EntityKind, tuple[str, ...]]]

    def __post_init__(self) -> None:
        names = [name for name, _, _ in self.entries]
        if len(names) != len(set(n.lower() for n in names)):
            raise ValueError("gazetteer canonical names must be unique")
        alias_owner: dict[str, str] = {}
        for name, _, aliases in self.entries:
            for alias in aliases:
                key = alias.lower()
                if alias_owner.get(key, name) != name:
                    raise ValueError(f"alias {alias!r} conflicts across gazetteer entries")
                alias_owner[key] = name


@dataclass
class SubjectLexicon:
    subjects: list[tuple[str, tuple[str, ...]]]  # (label, terms)
    tfidf: bool = False
    cosine_threshold: float = 0.5

    def __post_init__(self) -> None:
        labels = [label for label, _ in self.subjects]
        if len(labels) != len(set(labels)):
            raise ValueError("subject labels must be unique")
        if not 0.0 <= self.cosine_threshold <= 1.0:
            raise ValueError("cosine threshold outside [0, 1]")


NamedPeriodTable = dict[str, DateInterval]


def load_gazetteer(path: Path) -> Gazetteer:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return Gazetteer(
        entries=[
            (e["name"], EntityKind(e["kind"]), tuple(e.get("aliases", ())))
            for e in data["entries"]
        ]
    )


def load_subject_lexicon(path: Path) -> SubjectLexicon:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return SubjectLexicon(
        subjects=[(s["label"], tuple(s["terms"])) for s in data["subjects"]],
        tfidf=bool(data.get("tfidf", False)),
        cosine_threshold=float(data.get("cosine_threshold", 0.5)),
    )


def load_period_table(path: Path) -> NamedPeriodTable:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return {
        phrase: DateInterval(date.fromisoformat(v["start"]), date.fromisoformat(v["end"]))
        for phrase, v in data["periods"].items()
    }


def _year_from_two_digits(yy: int) -> int:
    return 1900 + yy if yy >= TWO_DIGIT_YEAR_PIVOT else 2000 + yy


def _safe_date(year: int, month: int, day: int) -> Optional[date]:
    try:
        return date(year, month, day)
    except ValueError:
        return None


def extract_temporal(
    text: str,
    reference_date: Optional[date] = None,
    locale: str = "DMY",
    period_table: Optional[NamedPeriodTable] = None,
) -> tuple[list[TemporalMatch], list[str]]:
    """All recognized temporal expressions with spans and normalized intervals.

    Returns (matches, warnings); relative and year-less forms are skipped
    with a warning when no reference date is available.
    """
    if locale not in ("DMY", "MDY"):
        raise ValueError(f"unsupported locale {locale!r}")
    warnings: list[str] = []
    candidates: list[TemporalMatch] = []

    def needs_reference(surface: str) -> bool:
        if reference_date is None:
            warnings.append(f"no reference date; skipped {surface!r}")
            return True
        return False

    def add(match: re.Match, interval: Optional[DateInterval]) -> None:
        if interval is not None:
            candidates.append(
                TemporalMatch(match.group(0), (match.start(), match.end()), interval)
            )

    for m in re.finditer(r"\b(\d{4})-(\d{2})-(\d{2})\b", text):
        d = _safe_date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
        add(m, DateInterval.day(d) if d else None)

    for m in re.finditer(r"\b(\d{1,2})[-/](\d{1,2})[-/](\d{2,4})\b", text):
        a, b, y = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if len(m.group(3)) == 3:
            continue
        year = y if y >= 100 else _year_from_two_digits(y)
        day, month = (a, b) if locale == "DMY" else (b, a)
        d = _safe_date(year, month, day)
        add(m, DateInterval.day(d) if d else None)

    for m in re.finditer(r"\b(\d{1,2})/(\d{1,2})\b(?![-/]?\d)", text):
        if needs_reference(m.group(0)):
            continue
        a, b = int(m.group(1)), int(m.group(2))
        day, month = (a, b) if locale == "DMY" else (b, a)
        assert reference_date is not None
        d = _safe_date(reference_date.year, month, day)
        add(m, DateInterval.day(d) if d else None)

    pattern = rf"\b(?:the\s+)?({_ORDINAL_ALT})\s+of\s+({_MONTH_ALT})(?:\s+(\d{{4}}))?\b"
    for m in re.finditer(pattern, text, re.IGNORECASE):
        day = ORDINAL_WORDS[m.group(1).lower()]
        month = MONTHS[m.group(2).lower()]
        if m.group(3):
            year = int(m.group(3))
        elif needs_reference(m.group(0)):
            continue
        else:
            assert reference_date is not None
            year = reference_date.year
        d = _safe_date(year, month, day)
        add(m, DateInterval.day(d) if d else None)

    pattern = rf"\b({_MONTH_ALT})\s+(\d{{1,2}})(?:,?\s+(\d{{4}}))?\b"
    for m in re.finditer(pattern, text, re.IGNORECASE):
        month = MONTHS[m.group(1).lower()]
        day = int(m.group(2))
        if day > 31:
            continue
        if m.group(3):
            year = int(m.group(3))
        elif needs_reference(m.group(0)):
            continue
        else:
            assert reference_date is not None
            year = reference_date.year
        d = _safe_date(year, month, day)
        add(m, DateInterval.day(d) if d else None)

    pattern = rf"\b(\d{{1,2}})\s+({_MONTH_ALT})(?:\s+(\d{{4}}))?\b"
    for m in re.finditer(pattern, text, re.IGNORECASE):
        day = int(m.group(1))
        month = MONTHS[m.group(2).lower()]
        if m.group(3):
            year = int(m.group(3))
        elif needs_reference(m.group(0)):
            continue
        else:
            assert reference_date is not None
            year = reference_date.year
        d = _safe_date(year, month, day)
        add(m, DateInterval.day(d) if d else None)

    for m in re.finditer(r"\b(today|tomorrow|yesterday)\b", text, re.IGNORECASE):
        if needs_reference(m.group(0)):
            continue
        assert reference_date is not None
        offset = {"today": 0, "tomorrow": 1, "yesterday": -1}[m.group(1).lower()]
        add(m, DateInterval.day(reference_date + timedelta(days=offset)))

    for m in re.finditer(r"\b(next|last)\s+week\b", text, re.IGNORECASE):
        if needs_reference(m.group(0)):
            continue
        assert reference_date is not None
        shift = 1 if m.group(1).lower() == "next" else -1
        monday = reference_date - timedelta(days=reference_date.weekday()) + timedelta(weeks=shift)
        add(m, DateInterval(monday, monday + timedelta(days=6)))

    for phrase, interval in sorted((period_table or {}).items(), key=lambda p: -len(p[0])):
        for m in re.finditer(re.escape(phrase), text, re.IGNORECASE):
            candidates.append(TemporalMatch(m.group(0), (m.start(), m.end()), interval))

    return _drop_overlaps(candidates), warnings


def _drop_overlaps(matches: list[TemporalMatch]) -> list[TemporalMatch]:
    chosen: list[TemporalMatch] = []
    for match in sorted(matches, key=lambda m: (m.span[0], -(m.span[1] - m.span[0]))):
        if all(m.span[1] <= match.span[0] or match.span[1] <= m.span[0] for m in chosen):
            chosen.append(match)
    return sorted(chosen, key=lambda m: m.span)


@dataclass(frozen=True)
class EntityMention:
    canonical: str
    entity_kind: EntityKind
    surface: str
    span: tuple[int, int]
    candidate: bool = False  # capitalized sequence outside the gazetteer


def entity_id(canonical: str) -> str:
    return "ent-" + re.sub(r"[^a-z0-9]+", "-", canonical.lower()).strip("-")


def extract_entities(text: str, gazetteer: Gazetteer) -> list[EntityMention]:
    """Longest-match gazetteer hits, plus capitalized-sequence candidates."""
    phrases: list[tuple[str, str, EntityKind]] = []
    for name, kind, aliases in gazetteer.entries:
        phrases.append((name, name, kind))
        for alias in aliases:
            phrases.append((alias, name, kind))
    phrases.sort(key=lambda p: -len(p[0]))

    mentions: list[EntityMention] = []
    taken: list[tuple[int, int]] = []

    def free(start: int, end: int) -> bool:
        return all(end <= s or e <= start for s, e in taken)

    for phrase, canonical, kind in phrases:
        pattern = r"(?<![\w])" + re.escape(phrase) + r"(?![\w])"
        for m in re.finditer(pattern, text, re.IGNORECASE):
            if free(m.start(), m.end()):
                taken.append((m.start(), m.end()))
                mentions.append(
                    EntityMention(canonical, kind, m.group(0), (m.start(), m.end()))
                )

    for m in re.finditer(r"\b([A-Z][\w'-]*(?:\s+[A-Z][\w'-]*)+)\b", text):
        if free(m.start(), m.end()):
            mentions.append(
                EntityMention(
                    m.group(0),
                    EntityKind.ORGANIZATION,
                    m.group(0),
                    (m.start(), m.end()),
                    candidate=True,
                )
            )

    return sorted(mentions, key=lambda m: m.span)


@dataclass(frozen=True)
class SubjectHit:
    label: str
    term: str
    surface: str
    span: tuple[int, int]


def extract_subjects(text: str, lexicon: SubjectLexicon) -> list[SubjectHit]:
    """Lexicon-mode subject assignment: a token matches a term it contains."""
    hits: list[SubjectHit] = []
    for m in re.finditer(r"[\w'-]+", text):
        token = m.group(0).lower()
        for label, terms in lexicon.subjects:
            for term in terms:
                if term in token:
                    hits.append(SubjectHit(label, term, m.group(0), (m.start(), m.end())))
                    break
    return hits


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in re.findall(r"[\w'-]+", text)]


def tfidf_cosine(documents: list[str]) -> list[list[float]]:
    """Pairwise cosine similarity over raw-count TF and ln(N/df) IDF vectors."""
    tokenized = [tokenize(doc) for doc in documents]
    df: Counter[str] = Counter()
    for tokens in tokenized:
        df.update(set(tokens))
    n = len(documents)
    vectors: list[dict[str, float]] = []
    for tokens in tokenized:
        tf = Counter(tokens)
        vectors.append({t: count * math.log(n / df[t]) for t, count in tf.items()})

    def cosine(a: dict[str, float], b: dict[str, float]) -> float:
        dot = sum(v * b.get(k, 0.0) for k, v in a.items())
        na = math.sqrt(sum(v * v for v in a.values()))
        nb = math.sqrt(sum(v * v for v in b.values()))
        if na == 0.0 or nb == 0.0:
            # degenerate vectors (every term everywhere); fall back to token sets
            sa, sb = set(a) or {""}, set(b) or {""}
            return 1.0 if sa == sb else 0.0
        return dot / (na * nb)

    return [[cosine(vectors[i], vectors[j]) for j in range(n)] for i in range(n)]


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Char spans of sentences; splits on ./!/? + whitespace + capital."""
    spans: list[tuple[int, int]] = []
    start = 0
    for m in re.finditer(r"[.!?](?=\s+[A-Z])", text):
        end = m.end()
        prior = text[start : m.start()]
        last_word = re.findall(r"[\w.]+$", prior)
        if last_word and last_word[0].rstrip(".").lower() in ABBREVIATIONS:
            continue
        spans.append((start, end))
        rest = text[end:]
        start = end + (len(rest) - len(rest.lstrip()))
    if start < len(text) and text[start:].strip():
        spans.append((start, len(text)))
    return spans


@dataclass
class EventAnnotations:
    events: list[Event]
    pinned_entities: list[str] = field(default_factory=list)


def load_annotations(path: Path) -> EventAnnotations:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    events = []
    for raw in data.get("events", []):
        anchor = raw.get("anchor")
        if isinstance(anchor, str):
            interval = DateInterval.day(date.fromisoformat(anchor))
        else:
            interval = DateInterval(
                date.fromisoformat(anchor["start"]), date.fromisoformat(anchor["end"])
            )
        events.append(
            Event(
                id=raw["id"],
                title=raw["title"],
                description=raw.get("description", ""),
                anchor=interval,
                constitutive_objects=tuple(raw["objects"]),
            )
        )
    return EventAnnotations(events=events, pinned_entities=data.get("pinned_entities", []))


@dataclass(frozen=True)
class CandidateEvent:
    event: Event
    sentence_span: tuple[int, int]


def propose_events(
    objects,
    annotations: Optional[EventAnnotations],
    temporal_by_object: dict[str, list[TemporalMatch]],
    entities_by_object: dict[str, list[EntityMention]],
    known_object_ids: Optional[Iterable[str]] = None,
) -> tuple[list[Event], list[CandidateEvent]]:
    """Asserted annotation events verbatim, plus quarantined heuristic candidates."""
    known = set(known_object_ids) if known_object_ids is not None else {o.id for o in objects}
    asserted: list[Event] = []
    if annotations is not None:
        for event in annotations.events:
            for obj_id in event.constitutive_objects:
                if obj_id not in known:
                    raise ValueError(
                        f"annotation event {event.id!r} references unknown object {obj_id!r}"
                    )
            asserted.append(event)

    candidates: list[CandidateEvent] = []
    for obj in objects:
        expressions = temporal_by_object.get(obj.id, [])
        mentions = [m for m in entities_by_object.get(obj.id, []) if not m.candidate]
        if not expressions or not mentions:
            continue
        for index, (start, end) in enumerate(split_sentences(obj.body)):
            in_sentence = lambda span: start <= span[0] and span[1] <= end
            sent_expr = [t for t in expressions if in_sentence(t.span)]
            sent_ents = [m for m in mentions if in_sentence(m.span)]
            if not sent_expr or not sent_ents:
                continue
            anchor = sent_expr[0].interval
            for extra in sent_expr[1:]:
                anchor = anchor.hull(extra.interval)
            candidates.append(
                CandidateEvent(
                    event=Event(
                        id=f"cand-{obj.id}-{index}",
                        title=obj.body[start:end].strip()[:80],
                        description=obj.body[start:end].strip(),
                        anchor=anchor,
                        constitutive_objects=(obj.id,),
                    ),
                    sentence_span=(start, end),
                )
            )
    return asserted, candidates
