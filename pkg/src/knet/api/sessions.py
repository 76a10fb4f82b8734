"""Bearer-token sessions.

Sessions are authentication plumbing, not domain history: tokens are
cryptographically random, live in memory only, and are never journaled
(replaying a journal must not mint secrets). Expiry runs on the wall
clock even when the service simulates dates.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from ..errors import AuthenticationError

SESSION_TTL = timedelta(hours=24)


@dataclass
class Session:
    token: str
    user_id: str
    expires_at: datetime


class SessionStore:
    def __init__(self, ttl: timedelta = SESSION_TTL) -> None:
        self._ttl = ttl
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    @staticmethod
    def _now() -> datetime:
        return datetime.now(timezone.utc)

    def create(self, user_id: str) -> Session:
        token = secrets.token_urlsafe(32)
        session = Session(token=token, user_id=user_id, expires_at=self._now() + self._ttl)
        with self._lock:
            self._sessions[token] = session
        return session

    def resolve(self, token: str) -> str:
        """Token -> user id; touching a live session slides its expiry."""
        now = self._now()
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                raise AuthenticationError("unknown session token")
            if session.expires_at <= now:
                del self._sessions[token]
                raise AuthenticationError("session expired")
            session.expires_at = now + self._ttl
            return session.user_id

    def revoke(self, token: str) -> None:
        with self._lock:
            self._sessions.pop(token, None)
