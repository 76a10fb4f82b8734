"""Error taxonomy shared by the domain, store, API, and CLI layers.

Every error carries a stable machine `code` (used verbatim in the HTTP
error envelope) and an optional `details` mapping for structured context
such as offending ids.
"""

from __future__ import annotations

from typing import Any


class KnetError(Exception):
    """Base class for all service errors."""

    code = "error"

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details: dict[str, Any] = details

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.details:
            doc["details"] = self.details
        return doc


class ValidationError(KnetError):
    """Malformed or out-of-range input."""

    code = "validation_error"


class NotFoundError(KnetError):
    code = "not_found"


class PermissionDeniedError(KnetError):
    """Authenticated caller is not allowed to perform the action."""

    code = "permission_denied"


class AuthenticationError(KnetError):
    """Missing, invalid, or expired session. Distinct from a deny."""

    code = "authentication_required"


class ConflictError(KnetError):
    code = "conflict"


class DuplicateError(ConflictError):
    code = "duplicate"


class CapacityError(KnetError):
    """An invitation or acceptance cap would be exceeded."""

    code = "capacity_exceeded"


class EligibilityError(KnetError):
    """Target user does not qualify as a guide for the course."""

    code = "not_eligible"


class StateError(KnetError):
    """Operation is not valid in the aggregate's current state."""

    code = "state_error"


class TransitionError(StateError):
    """Illegal edge in the course lifecycle graph."""

    code = "illegal_transition"


class AlreadyMatchedError(StateError):
    code = "already_matched"


class GatingError(StateError):
    """Blocked by a workflow gate (e.g. materials before activation)."""

    code = "gating_error"


class DeadlineError(StateError):
    code = "deadline_passed"


class CompletenessError(StateError):
    """A closing step found unfinished work; details list the items."""

    code = "incomplete"


class SchemaError(KnetError):
    """Event kind unknown or payload does not match its schema."""

    code = "schema_error"


class IntegrityError(KnetError):
    """Journal gap or corruption detected during replay."""

    code = "integrity_error"


class StorageError(KnetError):
    code = "io_error"
