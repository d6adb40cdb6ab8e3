"""Clock abstraction so pipelines and tests share one notion of "now".

Prompts inject today's date and every persisted record carries timestamps;
freezing the clock makes the whole pipeline reproducible.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone


class Clock:
    def now(self) -> datetime:
        """Current UTC time."""
        return datetime.now(timezone.utc)

    def today_str(self) -> str:
        """Today's date as YYYY-MM-DD, for prompt injection."""
        return self.now().date().isoformat()


class FixedClock(Clock):
    """Clock pinned to one instant; advance() moves it explicitly."""

    def __init__(self, at: datetime):
        if at.tzinfo is None:
            at = at.replace(tzinfo=timezone.utc)
        self._now = at

    def now(self) -> datetime:
        return self._now

    def advance(self, delta: timedelta) -> datetime:
        self._now = self._now + delta
        return self._now

    def set(self, at: datetime) -> None:
        if at.tzinfo is None:
            at = at.replace(tzinfo=timezone.utc)
        self._now = at


def isoformat_utc(dt: datetime) -> str:
    """Canonical timestamp form used in all persisted records."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat()


def parse_utc(value: str) -> datetime:
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)
