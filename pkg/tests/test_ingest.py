"""Corpus loading: email and document parsing, cross-reference resolution,
and shingle-based near-duplicate detection."""

from __future__ import annotations

import json
import random
from datetime import date
from itertools import combinations
from pathlib import Path

import pytest

from timeflow.ingest import (
    CorpusError,
    detect_near_duplicates,
    load_corpus,
    load_manifest,
    normalize_body,
    parse_document,
    parse_eml,
    shingle_similarity,
    shingles,
)
from timeflow.model import ObjectKind

EML_ORIGINAL = b"""\
From: Sarah Palmen <s.palmen@example.org>
To: J. de Vries <j.devries@example.org>
Cc: K. Visser <k.visser@example.org>
Date: Tue, 11 Jun 2019 09:30:00 +0200
Subject: Findings memo
Message-ID: <original-1@example.org>
Content-Type: text/plain

Please find the findings attached.
"""

EML_REPLY = b"""\
From: J. de Vries <j.devries@example.org>
To: Sarah Palmen <s.palmen@example.org>
Date: Wed, 12 Jun 2019 10:00:00 +0200
Subject: Re: Findings memo
Message-ID: <reply-1@example.org>
In-Reply-To: <original-1@example.org>
Content-Type: text/plain

Thanks, received.
"""

EML_FORWARD = b"""\
From: J. de Vries <j.devries@example.org>
To: P. Janssen <p.janssen@example.org>
Date: Wed, 12 Jun 2019 11:00:00 +0200
Subject: Fwd: Findings memo
Message-ID: <fwd-1@example.org>
In-Reply-To: <original-1@example.org>
Content-Type: text/plain

Forwarding for your attention.
"""


class TestParseEml:
    def test_headers_and_body(self):
        mail = parse_eml(EML_ORIGINAL, source_path="a.eml")
        obj = mail.object
        assert obj.kind is ObjectKind.EMAIL
        assert obj.title == "Findings memo"
        assert obj.sender == "Sarah Palmen"
        assert obj.recipients == ("J. de Vries", "K. Visser")
        assert obj.created == date(2019, 6, 11)
        assert "findings attached" in obj.body
        assert mail.message_id == "<original-1@example.org>"
        assert mail.warnings == []

    def test_id_derived_from_message_id(self):
        mail = parse_eml(EML_ORIGINAL)
        assert mail.object.id == "msg-original-1example.org"

    def test_missing_message_id_falls_back_to_content_hash(self):
        stripped = EML_ORIGINAL.replace(b"Message-ID: <original-1@example.org>\n", b"")
        mail = parse_eml(stripped)
        assert mail.object.id.startswith("obj-")
        assert mail.message_id is None

    def test_unparseable_date_warns(self):
        broken = EML_ORIGINAL.replace(
            b"Date: Tue, 11 Jun 2019 09:30:00 +0200", b"Date: not a date"
        )
        mail = parse_eml(broken, source_path="bad.eml")
        assert mail.object.created is None
        assert any("Date" in w for w in mail.warnings)

    def test_multipart_attachment_names_collected(self):
        multipart = b"""\
From: a@example.org
To: b@example.org
Subject: With attachment
Message-ID: <mp-1@example.org>
Content-Type: multipart/mixed; boundary="XX"

--XX
Content-Type: text/plain

Body here.
--XX
Content-Type: application/pdf
Content-Disposition: attachment; filename="memo.pdf"

%PDF-fake
--XX--
"""
        mail = parse_eml(multipart)
        assert mail.object.attachments == ("memo.pdf",)
        assert "Body here." in mail.object.body


class TestParseDocument:
    def test_metadata_block(self):
        text = "---\ntitle: Annual Report\ndate: 2017-08-09\nkind: report\nauthor: Ombudsman\n---\n\nThe report body.\n"
        obj, warnings = parse_document(text, source_path="r.md")
        assert warnings == []
        assert obj.title == "Annual Report"
        assert obj.created == date(2017, 8, 9)
        assert obj.kind is ObjectKind.REPORT
        assert obj.sender == "Ombudsman"
        assert obj.body == "The report body.\n"

    def test_malformed_block_keeps_whole_text(self):
        text = "---\nno colon here\n---\nBody.\n"
        obj, warnings = parse_document(text, source_path="bad.md")
        assert obj.body == text
        assert any("metadata" in w for w in warnings)

    def test_plain_text_uses_filename_stem_as_title(self):
        obj, warnings = parse_document("Just text.", source_path="notes/plain.md")
        assert warnings == []
        assert obj.title == "plain"
        assert obj.kind is ObjectKind.DOCUMENT

    def test_bad_date_and_kind_warn(self):
        text = "---\ndate: sometime\nkind: mystery\n---\nBody.\n"
        obj, warnings = parse_document(text)
        assert obj.created is None
        assert obj.kind is ObjectKind.DOCUMENT
        assert len(warnings) == 2


def _write_corpus(tmp_path: Path, manifest: dict, files: dict[str, bytes]) -> Path:
    for name, content in files.items():
        target = tmp_path / name
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(content)
    manifest_path = tmp_path / "corpus.json"
    manifest_path.write_text(json.dumps(manifest), encoding="utf-8")
    return manifest_path


class TestLoadCorpus:
    def test_reply_and_forward_resolution(self, tmp_path):
        manifest = {
            "name": "mail-thread",
            "entries": [
                {"path": "original.eml"},
                {"path": "reply.eml"},
                {"path": "forward.eml"},
            ],
        }
        path = _write_corpus(
            tmp_path,
            manifest,
            {"original.eml": EML_ORIGINAL, "reply.eml": EML_REPLY, "forward.eml": EML_FORWARD},
        )
        corpus = load_corpus(load_manifest(path))
        by_id = corpus.by_id()
        original = "msg-original-1example.org"
        assert by_id["msg-reply-1example.org"].in_reply_to == original
        assert by_id["msg-reply-1example.org"].forwarded_from is None
        assert by_id["msg-fwd-1example.org"].forwarded_from == original
        assert by_id["msg-fwd-1example.org"].in_reply_to is None

    def test_reply_to_outside_corpus_is_marked_external(self, tmp_path):
        manifest = {"name": "solo", "entries": [{"path": "reply.eml"}]}
        path = _write_corpus(tmp_path, manifest, {"reply.eml": EML_REPLY})
        corpus = load_corpus(load_manifest(path))
        obj = corpus.objects[0]
        assert obj.reply_external is True
        assert obj.in_reply_to is None

    def test_attachment_map_resolution(self, tmp_path):
        multipart = EML_ORIGINAL.replace(
            b"Content-Type: text/plain\n\nPlease find the findings attached.\n",
            b'Content-Type: multipart/mixed; boundary="YY"\n\n--YY\nContent-Type: text/plain\n\nSee attachment.\n--YY\nContent-Type: application/pdf\nContent-Disposition: attachment; filename="memo.pdf"\n\nx\n--YY--\n',
        )
        manifest = {
            "name": "attach",
            "entries": [{"path": "mail.eml"}, {"path": "memo.md", "id": "memo-1"}],
            "attachment_map": {"memo.pdf": "memo-1"},
        }
        path = _write_corpus(
            tmp_path, manifest, {"mail.eml": multipart, "memo.md": b"The memo."}
        )
        corpus = load_corpus(load_manifest(path))
        mail = corpus.by_id()["msg-original-1example.org"]
        assert mail.attachments == ("memo-1",)
        assert corpus.warnings == []

    def test_unmapped_attachment_warns(self, tmp_path):
        multipart = EML_ORIGINAL.replace(
            b"Content-Type: text/plain\n\nPlease find the findings attached.\n",
            b'Content-Type: multipart/mixed; boundary="YY"\n\n--YY\nContent-Type: text/plain\n\nSee attachment.\n--YY\nContent-Type: application/pdf\nContent-Disposition: attachment; filename="lost.pdf"\n\nx\n--YY--\n',
        )
        manifest = {"name": "attach", "entries": [{"path": "mail.eml"}]}
        path = _write_corpus(tmp_path, manifest, {"mail.eml": multipart})
        corpus = load_corpus(load_manifest(path))
        assert any("lost.pdf" in w for w in corpus.warnings)

    def test_duplicate_manifest_path_rejected(self, tmp_path):
        manifest = {"name": "dup", "entries": [{"path": "a.md"}, {"path": "a.md"}]}
        path = _write_corpus(tmp_path, manifest, {"a.md": b"x"})
        with pytest.raises(CorpusError):
            load_manifest(path)

    def test_duplicate_object_ids_rejected(self, tmp_path):
        manifest = {
            "name": "dup-id",
            "entries": [{"path": "a.md", "id": "same"}, {"path": "b.md", "id": "same"}],
        }
        path = _write_corpus(tmp_path, manifest, {"a.md": b"x", "b.md": b"y"})
        with pytest.raises(CorpusError):
            load_corpus(load_manifest(path))

    def test_missing_corpus_file_rejected(self, tmp_path):
        manifest = {"name": "gone", "entries": [{"path": "nope.md"}]}
        path = _write_corpus(tmp_path, manifest, {})
        with pytest.raises(CorpusError):
            load_corpus(load_manifest(path))

    def test_missing_aux_file_rejected(self, tmp_path):
        manifest = {"name": "aux", "entries": [], "gazetteer": "missing.json"}
        path = _write_corpus(tmp_path, manifest, {})
        with pytest.raises(CorpusError):
            load_manifest(path)

    def test_manifest_overrides_apply(self, tmp_path):
        manifest = {
            "name": "ovr",
            "entries": [
                {
                    "path": "a.md",
                    "id": "doc-a",
                    "kind": "legal",
                    "overrides": {"title": "Judgement", "date": "2021-01-15"},
                }
            ],
        }
        path = _write_corpus(tmp_path, manifest, {"a.md": b"Ruling text."})
        obj = load_corpus(load_manifest(path)).objects[0]
        assert obj.kind is ObjectKind.LEGAL
        assert obj.title == "Judgement"
        assert obj.created == date(2021, 1, 15)


def _brute_force_jaccard(a: str, b: str, size: int = 8) -> float:
    """Independent oracle: sets built positionally, no shared helpers."""
    na, nb = " ".join(a.lower().split()), " ".join(b.lower().split())
    sa = {na[i : i + size] for i in range(max(len(na) - size + 1, 0))}
    sb = {nb[i : i + size] for i in range(max(len(nb) - size + 1, 0))}
    if not sa and not sb:
        return 1.0
    if not sa or not sb:
        return 0.0
    return len(sa & sb) / len(sa | sb)


class TestNearDuplicates:
    def test_similarity_matches_brute_force_oracle(self):
        rng = random.Random(99)
        words = ["benefit", "fraud", "parent", "memo", "ruling", "tax", "case", "report"]
        texts = [
            " ".join(rng.choices(words, k=rng.randrange(5, 30))) for _ in range(12)
        ]
        for a, b in combinations(texts, 2):
            assert shingle_similarity(a, b) == pytest.approx(
                _brute_force_jaccard(a, b), abs=1e-12
            )

    def test_normalization_ignores_case_and_whitespace(self):
        assert shingle_similarity("The  Memo\nText", "the memo text") == 1.0
        assert normalize_body("A  B\t\nC") == "a b c"

    def test_detection_threshold_and_symmetry(self):
        from conftest import make_object

        near_a = make_object("a", body="the benefits affair ruined thousands of families")
        near_b = make_object("b", body="The benefits affair ruined thousands of families!")
        far = make_object("c", body="completely unrelated content about gardening tips")
        pairs = detect_near_duplicates([near_a, near_b, far], threshold=0.8)
        assert [(p[0], p[1]) for p in pairs] == [("a", "b")]
        assert pairs[0][2] > 0.8

    def test_invalid_threshold_rejected(self):
        with pytest.raises(ValueError):
            detect_near_duplicates([], threshold=1.5)

    def test_short_text_collapses_to_one_shingle(self):
        assert shingles("abc") == frozenset({"abc"})
        assert shingles("") == frozenset()
        assert shingle_similarity("", "") == 1.0
