"""Durable persistence: append-only journal, snapshots, query views."""

from .journal import EventRecord, FileJournal, MemoryJournal

__all__ = ["EventRecord", "FileJournal", "MemoryJournal"]
