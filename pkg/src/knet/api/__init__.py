"""HTTP facade: sessions, the role/authorization matrix, and routes."""

from .app import create_app

__all__ = ["create_app"]
