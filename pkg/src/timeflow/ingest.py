"""Corpus ingestion: .eml messages, text/markdown documents, manifest loading.

Only the header subset needed for correspondence and succession metadata is
interpreted (From, To, Cc, Date, Subject, Message-ID, In-Reply-To,
References, attachment filenames); everything else passes into the body.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import date
from email import policy
from email.message import EmailMessage
from email.parser import BytesParser
from email.utils import getaddresses, parsedate_to_datetime
from pathlib import Path
from typing import Optional

from .model import InformationObject, ObjectKind

FORWARD_PREFIX = re.compile(r"^\s*(fwd?|fw)\s*:", re.IGNORECASE)

SHINGLE_SIZE = 8
DEFAULT_DUP_THRESHOLD = 0.9


class CorpusError(Exception):
    """Raised for manifest or corpus-level problems (missing files, duplicate ids)."""


@dataclass
class ManifestEntry:
    path: str
    id: Optional[str] = None
    kind: Optional[ObjectKind] = None
    overrides: dict = field(default_factory=dict)


@dataclass
class CorpusManifest:
    name: str
    base_dir: Path
    entries: list[ManifestEntry]
    gazetteer_path: Optional[Path] = None
    subjects_path: Optional[Path] = None
    periods_path: Optional[Path] = None
    annotations_path: Optional[Path] = None
    assertions_path: Optional[Path] = None
    attachment_map: dict[str, str] = field(default_factory=dict)
    locale: str = "DMY"


@dataclass
class ParsedEmail:
    object: InformationObject
    message_id: Optional[str] = None
    in_reply_to_message_id: Optional[str] = None
    references: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def normalize_body(text: str) -> str:
    return " ".join(text.lower().split())


def content_hash(text: str) -> str:
    return hashlib.sha256(normalize_body(text).encode("utf-8")).hexdigest()


def load_manifest(path: Path) -> CorpusManifest:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CorpusError(f"manifest not found: {path}")
    base_dir = path.parent / data.get("base_dir", ".")

    entries = []
    seen_paths: set[str] = set()
    for raw in data.get("entries", []):
        entry = ManifestEntry(
            path=raw["path"],
            id=raw.get("id"),
            kind=ObjectKind(raw["kind"]) if raw.get("kind") else None,
            overrides=raw.get("overrides", {}),
        )
        if entry.path in seen_paths:
            raise CorpusError(f"duplicate manifest path {entry.path!r}")
        seen_paths.add(entry.path)
        entries.append(entry)

    def aux(key: str) -> Optional[Path]:
        if not data.get(key):
            return None
        resolved = base_dir / data[key]
        if not resolved.exists():
            raise CorpusError(f"manifest {key} file missing: {resolved}")
        return resolved

    return CorpusManifest(
        name=data.get("name", path.stem),
        base_dir=base_dir,
        entries=entries,
        gazetteer_path=aux("gazetteer"),
        subjects_path=aux("subjects"),
        periods_path=aux("periods"),
        annotations_path=aux("annotations"),
        assertions_path=aux("assertions"),
        attachment_map=data.get("attachment_map", {}),
        locale=data.get("locale", "DMY"),
    )


def _address_names(value) -> list[str]:
    names = []
    for display, addr in getaddresses([str(value)] if value else []):
        names.append(display or addr)
    return [n for n in names if n]


def _message_body(msg: EmailMessage) -> tuple[str, list[str]]:
    """Concatenated text parts plus attachment filenames."""
    parts: list[str] = []
    attachments: list[str] = []
    for part in msg.walk():
        if part.is_multipart():
            continue
        filename = part.get_filename()
        if filename:
            attachments.append(filename)
            continue
        if part.get_content_maintype() == "text":
            parts.append(part.get_content())
    return "\n".join(p.strip("\n") for p in parts), attachments


def parse_eml(data: bytes, object_id: Optional[str] = None, source_path: str = "") -> ParsedEmail:
    msg = BytesParser(policy=policy.default).parsebytes(data)
    warnings: list[str] = []

    subject = msg.get("Subject", "") or ""
    sender_names = _address_names(msg.get("From"))
    recipient_names = _address_names(msg.get("To")) + _address_names(msg.get("Cc"))

    created: Optional[date] = None
    if msg.get("Date"):
        try:
            created = parsedate_to_datetime(msg["Date"]).date()
        except (ValueError, TypeError):
            warnings.append(f"unparseable Date header {msg['Date']!r} in {source_path or '<eml>'}")

    body, attachments = _message_body(msg)
    digest = content_hash(subject + "\n" + body)

    message_id = (msg.get("Message-ID") or "").strip() or None
    if object_id is None:
        object_id = _id_from_message_id(message_id) if message_id else f"obj-{digest[:12]}"

    in_reply_to = (msg.get("In-Reply-To") or "").strip() or None
    references = [r for r in (msg.get("References") or "").split() if r]
    is_forward = bool(FORWARD_PREFIX.search(subject))

    obj = InformationObject(
        id=object_id,
        kind=ObjectKind.EMAIL,
        title=subject,
        body=body,
        created=created,
        sender=sender_names[0] if sender_names else None,
        recipients=tuple(recipient_names),
        attachments=tuple(attachments),
        source_path=source_path,
        content_hash=digest,
    )
    return ParsedEmail(
        object=obj,
        message_id=message_id,
        in_reply_to_message_id=in_reply_to or (references[-1] if is_forward and references else None),
        references=references,
        warnings=warnings,
    )


def _id_from_message_id(message_id: str) -> str:
    return "msg-" + re.sub(r"[^a-zA-Z0-9._-]", "", message_id.strip("<>")).lower()


_META_KEYS = {"title", "date", "kind", "author"}


def parse_document(
    text: str, object_id: Optional[str] = None, source_path: str = ""
) -> tuple[InformationObject, list[str]]:
    """Parse a text/markdown document with an optional dash-delimited metadata block."""
    warnings: list[str] = []
    meta: dict[str, str] = {}
    body = text

    lines = text.split("\n")
    if lines and lines[0].strip() == "---":
        try:
            closing = next(i for i in range(1, len(lines)) if lines[i].strip() == "---")
            block = lines[1:closing]
            parsed: dict[str, str] = {}
            for line in block:
                if not line.strip():
                    continue
                if ":" not in line:
                    raise ValueError(f"metadata line without colon: {line!r}")
                key, _, value = line.partition(":")
                parsed[key.strip().lower()] = value.strip()
            meta = parsed
            body = "\n".join(lines[closing + 1 :]).lstrip("\n")
        except (StopIteration, ValueError) as exc:
            warnings.append(f"malformed metadata block in {source_path or '<doc>'}: {exc}")
            meta = {}
            body = text

    created: Optional[date] = None
    if meta.get("date"):
        try:
            created = date.fromisoformat(meta["date"])
        except ValueError:
            warnings.append(f"unparseable date {meta['date']!r} in {source_path or '<doc>'}")

    kind = ObjectKind.DOCUMENT
    if meta.get("kind"):
        try:
            kind = ObjectKind(meta["kind"])
        except ValueError:
            warnings.append(f"unknown kind {meta['kind']!r} in {source_path or '<doc>'}")

    digest = content_hash(body)
    obj = InformationObject(
        id=object_id or f"obj-{digest[:12]}",
        kind=kind,
        title=meta.get("title", Path(source_path).stem if source_path else ""),
        body=body,
        created=created,
        sender=meta.get("author"),
        source_path=source_path,
        content_hash=digest,
    )
    return obj, warnings


@dataclass
class LoadedCorpus:
    manifest: CorpusManifest
    objects: list[InformationObject]
    warnings: list[str]

    def by_id(self) -> dict[str, InformationObject]:
        return {o.id: o for o in self.objects}


def load_corpus(manifest: CorpusManifest) -> LoadedCorpus:
    """Parse every manifest entry and resolve cross references in a second pass."""
    parsed: list[tuple[ManifestEntry, InformationObject]] = []
    emails: dict[str, ParsedEmail] = {}
    warnings: list[str] = []

    for entry in sorted(manifest.entries, key=lambda e: e.path):
        path = manifest.base_dir / entry.path
        if not path.exists():
            raise CorpusError(f"corpus file missing: {path}")
        if path.suffix.lower() == ".eml":
            mail = parse_eml(path.read_bytes(), object_id=entry.id, source_path=entry.path)
            warnings.extend(mail.warnings)
            obj = mail.object
            emails[obj.id] = mail
        else:
            obj, doc_warnings = parse_document(
                path.read_text(encoding="utf-8"), object_id=entry.id, source_path=entry.path
            )
            warnings.extend(doc_warnings)
        obj = _apply_overrides(obj, entry)
        parsed.append((entry, obj))

    ids_seen: dict[str, str] = {}
    for entry, obj in parsed:
        if obj.id in ids_seen:
            raise CorpusError(
                f"duplicate object id {obj.id!r} from {ids_seen[obj.id]!r} and {entry.path!r}"
            )
        ids_seen[obj.id] = entry.path

    by_message_id = {
        mail.message_id: obj_id for obj_id, mail in emails.items() if mail.message_id
    }

    resolved: list[InformationObject] = []
    for entry, obj in parsed:
        mail = emails.get(obj.id)
        if mail is not None:
            target = by_message_id.get(mail.in_reply_to_message_id or "")
            is_forward = bool(FORWARD_PREFIX.search(obj.title))
            if mail.in_reply_to_message_id:
                if target is None:
                    obj = _replace(obj, reply_external=True)
                elif is_forward:
                    obj = _replace(obj, forwarded_from=target)
                else:
                    obj = _replace(obj, in_reply_to=target)
            mapped = tuple(
                manifest.attachment_map.get(name, name) for name in obj.attachments
            )
            for name in obj.attachments:
                if name not in manifest.attachment_map:
                    warnings.append(f"unresolved attachment {name!r} on {obj.id}")
            obj = _replace(obj, attachments=mapped)
        resolved.append(obj)

    return LoadedCorpus(manifest=manifest, objects=resolved, warnings=warnings)


def _apply_overrides(obj: InformationObject, entry: ManifestEntry) -> InformationObject:
    changes: dict = {}
    if entry.kind is not None:
        changes["kind"] = entry.kind
    overrides = entry.overrides
    if "title" in overrides:
        changes["title"] = overrides["title"]
    if "date" in overrides:
        changes["created"] = date.fromisoformat(overrides["date"])
    if "author" in overrides:
        changes["sender"] = overrides["author"]
    return _replace(obj, **changes) if changes else obj


def _replace(obj: InformationObject, **changes) -> InformationObject:
    from dataclasses import replace

    return replace(obj, **changes)


def shingles(text: str, size: int = SHINGLE_SIZE) -> frozenset[str]:
    normalized = normalize_body(text)
    if len(normalized) < size:
        return frozenset({normalized} if normalized else ())
    return frozenset(normalized[i : i + size] for i in range(len(normalized) - size + 1))


def shingle_similarity(a: str, b: str, size: int = SHINGLE_SIZE) -> float:
    sa, sb = shingles(a, size), shingles(b, size)
    if not sa and not sb:
        return 1.0
    union = len(sa | sb)
    return len(sa & sb) / union if union else 0.0


def detect_near_duplicates(
    objects: list[InformationObject], threshold: float = DEFAULT_DUP_THRESHOLD
) -> list[tuple[str, str, float]]:
    """Pairs of object ids whose 8-gram shingle Jaccard similarity >= threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    hits: list[tuple[str, str, float]] = []
    ordered = sorted(objects, key=lambda o: o.id)
    for i, first in enumerate(ordered):
        for second in ordered[i + 1 :]:
            score = shingle_similarity(first.body, second.body)
            if score >= threshold:
                hits.append((first.id, second.id, score))
    return hits
