"""Content-addressed attachment storage.

Uploaded files live outside the journal: events carry only references
(sha-256 digest ids plus display metadata). The same bytes always map
to the same id, so re-uploads are free and replay never depends on
blob-store contents.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .errors import NotFoundError, StorageError, ValidationError

MAX_ATTACHMENT_BYTES = 2 * 1024 * 1024


class AttachmentStore:
    """Blob store addressed by sha-256. With a directory the blobs are
    files on disk; without one they live in memory (test mode)."""

    def __init__(self, directory: Path | str | None = None) -> None:
        self._directory = Path(directory) if directory is not None else None
        self._memory: dict[str, bytes] = {}
        if self._directory is not None:
            try:
                self._directory.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise StorageError(f"cannot create attachment directory: {exc}")

    def put(self, content: bytes, filename: str, media_type: str | None = None) -> dict[str, str]:
        if not isinstance(content, (bytes, bytearray)):
            raise ValidationError("attachment content must be bytes")
        if len(content) == 0:
            raise ValidationError("attachment must not be empty")
        if len(content) > MAX_ATTACHMENT_BYTES:
            raise ValidationError(
                f"attachment exceeds {MAX_ATTACHMENT_BYTES} bytes ({len(content)} given)"
            )
        if not filename or not filename.strip():
            raise ValidationError("attachment filename must not be empty")
        digest = hashlib.sha256(content).hexdigest()
        if self._directory is None:
            self._memory[digest] = bytes(content)
        else:
            path = self._directory / digest
            if not path.exists():
                tmp = path.with_suffix(".tmp")
                try:
                    tmp.write_bytes(content)
                    tmp.replace(path)
                except OSError as exc:
                    raise StorageError(f"cannot store attachment: {exc}")
        return {
            "attachment_id": digest,
            "filename": filename,
            "media_type": media_type or "application/octet-stream",
        }

    def exists(self, attachment_id: str) -> bool:
        if self._directory is None:
            return attachment_id in self._memory
        return (self._directory / attachment_id).is_file()

    def get(self, attachment_id: str) -> bytes:
        if self._directory is None:
            try:
                return self._memory[attachment_id]
            except KeyError:
                raise NotFoundError(f"no such attachment {attachment_id!r}")
        path = self._directory / attachment_id
        if not path.is_file():
            raise NotFoundError(f"no such attachment {attachment_id!r}")
        try:
            return path.read_bytes()
        except OSError as exc:
            raise StorageError(f"cannot read attachment: {exc}")

    def fork(self) -> "AttachmentStore":
        """In-memory copy (for forked test services)."""
        copy = AttachmentStore(None)
        if self._directory is None:
            copy._memory = dict(self._memory)
        else:
            for path in self._directory.iterdir():
                if path.is_file() and not path.suffix:
                    copy._memory[path.name] = path.read_bytes()
        return copy
