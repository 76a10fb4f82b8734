"""Clocks. Deadline checks go through a Clock so that fixtures dated in
the past (course and assignment dates come from real term calendars) can
be replayed: `kn scenario run` and tests drive a SimClock, production
uses the wall clock. Journal timestamps always record an instant from
the same clock."""

from __future__ import annotations

from datetime import date, datetime, time, timezone

from .errors import ValidationError


class WallClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def today(self) -> date:
        return self.now().date()


class SimClock:
    """Manually advanced clock pinned to a calendar date."""

    def __init__(self, start: date) -> None:
        self.current = start

    def now(self) -> datetime:
        wall = datetime.now(timezone.utc)
        return datetime.combine(self.current, time(hour=wall.hour, minute=wall.minute, second=wall.second), tzinfo=timezone.utc)

    def today(self) -> date:
        return self.current

    def advance_to(self, day: date) -> None:
        if day < self.current:
            raise ValidationError(f"simulated clock cannot move backwards ({self.current} -> {day})")
        self.current = day
