"""Time source with an environment override so runs can be made reproducible."""

from __future__ import annotations

import os
from datetime import datetime, timezone

CLOCK_ENV = "INSIDEOUT_CLOCK"


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO 8601 timestamp; naive values are taken as UTC."""
    normalized = text.strip()
    if normalized.endswith(("Z", "z")):
        normalized = normalized[:-1] + "+00:00"
    moment = datetime.fromisoformat(normalized)
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment.astimezone(timezone.utc)


def format_timestamp(moment: datetime) -> str:
    return moment.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def now_utc() -> datetime:
    """Current UTC time, unless INSIDEOUT_CLOCK pins a fixed instant.

    The override makes independently produced reports byte-comparable.
    """
    pinned = os.environ.get(CLOCK_ENV)
    if pinned:
        return parse_timestamp(pinned)
    return datetime.now(timezone.utc)
