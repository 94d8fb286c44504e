"""Plain-directory JSON repository with optimistic (compare-and-swap) versioning.

Layout: root/{corpora,chronologies,perspectives}/<id>.json plus index.json.
A resource's version tag is the sha256 of its canonical serialization, so
equal resources always carry equal tags and unchanged saves are no-ops.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Optional

from .interchange import dumps

KINDS = ("corpora", "chronologies", "perspectives")


class StoreError(Exception):
    pass


class NotFoundError(StoreError):
    pass


class ConflictError(StoreError):
    def __init__(self, resource_id: str, expected: Optional[str], actual: Optional[str]):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"stale version tag for {resource_id!r}: expected {expected}, repository has {actual}"
        )


class CorruptError(StoreError):
    pass


def content_tag(data: dict) -> str:
    return hashlib.sha256(dumps(data).encode("utf-8")).hexdigest()


class Repository:
    def __init__(self, root: Path):
        self.root = Path(root)
        self._lock = threading.Lock()
        for kind in KINDS:
            (self.root / kind).mkdir(parents=True, exist_ok=True)
        if not self._index_path().exists():
            self._write_index({})

    def _index_path(self) -> Path:
        return self.root / "index.json"

    def _read_index(self) -> dict:
        try:
            return json.loads(self._index_path().read_text(encoding="utf-8"))
        except FileNotFoundError:
            return {}

    def _write_index(self, index: dict) -> None:
        _atomic_write(self._index_path(), dumps(index))

    def _resource_path(self, kind: str, resource_id: str) -> Path:
        if kind not in KINDS:
            raise StoreError(f"unknown resource kind {kind!r}")
        safe = resource_id.replace("/", "_")
        return self.root / kind / f"{safe}.json"

    def save(
        self,
        kind: str,
        resource_id: str,
        data: dict,
        expected_tag: Optional[str] = None,
    ) -> str:
        """Atomically persist; raises ConflictError when expected_tag is stale."""
        tag = content_tag(data)
        with self._lock:
            index = self._read_index()
            key = f"{kind}/{resource_id}"
            current = index.get(key, {}).get("tag")
            if expected_tag is not None and current != expected_tag:
                raise ConflictError(resource_id, expected_tag, current)
            if current == tag:
                return tag  # unchanged content, same tag
            path = self._resource_path(kind, resource_id)
            _atomic_write(path, dumps(data))
            index[key] = {"tag": tag, "path": str(path.relative_to(self.root))}
            self._write_index(index)
        return tag

    def load(self, kind: str, resource_id: str) -> tuple[dict, str]:
        index = self._read_index()
        key = f"{kind}/{resource_id}"
        entry = index.get(key)
        if entry is None:
            raise NotFoundError(f"no {kind} resource {resource_id!r}")
        path = self.root / entry["path"]
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFoundError(f"{kind} resource {resource_id!r} file missing")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorruptError(f"{kind}/{resource_id}: invalid JSON ({exc})")
        actual = content_tag(data)
        if actual != entry["tag"]:
            raise CorruptError(
                f"{kind}/{resource_id}: content hash {actual[:12]} does not match index tag "
                f"{entry['tag'][:12]}"
            )
        return data, entry["tag"]

    def tag_of(self, kind: str, resource_id: str) -> Optional[str]:
        return self._read_index().get(f"{kind}/{resource_id}", {}).get("tag")

    def list(self, kind: str) -> list[str]:
        prefix = f"{kind}/"
        return sorted(
            key[len(prefix) :] for key in self._read_index() if key.startswith(prefix)
        )


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
