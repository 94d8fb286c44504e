"""Command-line interface: subcommand behaviour and exit codes
(0 success, 1 validation failure, 2 usage error)."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from timeflow import interchange
from timeflow.cli import main

from conftest import GOLDEN_MANIFEST, two_event_chronology


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def chronology_file(tmp_path):
    path = tmp_path / "chron.json"
    document = interchange.chronology_to_dict(two_event_chronology())
    path.write_text(interchange.dumps(document), encoding="utf-8")
    return path


class TestIngest:
    def test_reports_object_count(self, runner):
        result = runner.invoke(main, ["ingest", str(GOLDEN_MANIFEST)])
        assert result.exit_code == 0
        assert "objects: 209" in result.output

    def test_missing_manifest_is_usage_error(self, runner):
        result = runner.invoke(main, ["ingest", "/no/such/corpus.json"])
        assert result.exit_code == 2


class TestExtract:
    def test_writes_chronology_document(self, runner, tmp_path):
        out = tmp_path / "golden.json"
        result = runner.invoke(main, ["extract", str(GOLDEN_MANIFEST), "-o", str(out)])
        assert result.exit_code == 0
        document = json.loads(out.read_text(encoding="utf-8"))
        assert len(document["relations"]) == 228

    def test_stdout_by_default(self, runner, tmp_path, chronology_file):
        # a tiny manifest keeps stdout readable
        (tmp_path / "a.md").write_text("---\ntitle: A\ndate: 2020-01-01\n---\nBody a.\n")
        annotations = {
            "events": [
                {
                    "id": "ev-1",
                    "title": "Something",
                    "anchor": "2020-01-01",
                    "objects": ["doc-a"],
                }
            ]
        }
        (tmp_path / "annotations.json").write_text(json.dumps(annotations))
        manifest = {
            "name": "tiny",
            "entries": [{"path": "a.md", "id": "doc-a"}],
            "annotations": "annotations.json",
        }
        manifest_path = tmp_path / "corpus.json"
        manifest_path.write_text(json.dumps(manifest))
        result = runner.invoke(main, ["extract", str(manifest_path)])
        assert result.exit_code == 0
        assert '"schema_version": "timeflow/1"' in result.output


class TestValidate:
    def test_valid_chronology_exits_zero(self, runner, chronology_file):
        result = runner.invoke(main, ["validate", str(chronology_file)])
        assert result.exit_code == 0
        assert "ok" in result.output

    def test_violations_exit_one(self, runner, tmp_path, chronology_file):
        document = json.loads(chronology_file.read_text(encoding="utf-8"))
        document["relations"][0]["from"] = "ghost"
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(document), encoding="utf-8")
        result = runner.invoke(main, ["validate", str(bad)])
        assert result.exit_code == 1
        assert "endpoint-resolves" in result.output


class TestRender:
    def test_svg_output(self, runner, tmp_path, chronology_file):
        out = tmp_path / "diagram.svg"
        result = runner.invoke(main, ["render", str(chronology_file), "-o", str(out)])
        assert result.exit_code == 0
        assert out.read_text(encoding="utf-8").startswith("<svg")

    def test_json_output_includes_layout(self, runner, chronology_file):
        result = runner.invoke(main, ["render", str(chronology_file), "--format", "json"])
        assert result.exit_code == 0
        assert '"layout"' in result.output

    def test_unknown_format_is_usage_error(self, runner, chronology_file):
        result = runner.invoke(main, ["render", str(chronology_file), "--format", "png"])
        assert result.exit_code == 2


class TestGapsAndDedup:
    def test_gaps_listing(self, runner, chronology_file):
        result = runner.invoke(main, ["gaps", str(chronology_file), "--min-days", "30"])
        assert result.exit_code == 0
        assert "2020-01-02 .. 2020-05-31" in result.output

    def test_dedup_reports_pairs(self, runner, tmp_path):
        (tmp_path / "a.md").write_text("The benefits affair ruined thousands of families.")
        (tmp_path / "b.md").write_text("The benefits affair ruined thousands of families!")
        manifest = tmp_path / "corpus.json"
        manifest.write_text(
            json.dumps({"name": "dup", "entries": [{"path": "a.md"}, {"path": "b.md"}]})
        )
        result = runner.invoke(main, ["dedup", str(manifest), "--threshold", "0.8"])
        assert result.exit_code == 0
        assert len(result.output.strip().splitlines()) == 1


class TestServe:
    def test_bad_addr_is_usage_error(self, runner):
        result = runner.invoke(main, ["serve", "--addr", "nonsense"])
        assert result.exit_code == 2
