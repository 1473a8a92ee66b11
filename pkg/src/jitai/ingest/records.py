"""Sensor and notification log records plus the line-delimited parser.

One JSON record per line, tagged with a ``stream`` field. Malformed lines
land in a rejects report with file/line/reason instead of being dropped;
valid records are sorted by timestamp per user per stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from ..domain import ActivityContext, Response, SocialContext


class IngestError(ValueError):
    pass


BATTERY_STATUSES = ("Charging", "Full", "Discharging", "Not Charging")
ACTIVITY_LABELS = ("still", "tilting", "walking", "on_foot", "in_vehicle", "on_bicycle", "running")
CALL_TYPES = ("incoming", "outgoing")
CALL_STATUSES = ("missed", "complete")


def parse_rfc3339(value: str) -> datetime:
    """RFC 3339 timestamp; naive inputs are taken as UTC."""
    if not isinstance(value, str):
        raise IngestError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.replace("Z", "+00:00")
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise IngestError(f"invalid timestamp: {value!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def format_rfc3339(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.isoformat()


@dataclass(frozen=True)
class BatteryRecord:
    ts: datetime
    status: str
    level: float
    voltage_mv: float | None = None
    temperature_c: float | None = None
    power_saving: bool = False


@dataclass(frozen=True)
class ScreenRecord:
    ts: datetime
    screen_on: bool
    unlocked: bool


@dataclass(frozen=True)
class ActivitySample:
    ts: datetime
    label: str
    confidence: float


@dataclass(frozen=True)
class AppUsageRecord:
    ts: datetime
    package: str
    foreground_ms: int


@dataclass(frozen=True)
class CallRecord:
    start_ts: datetime
    end_ts: datetime
    call_type: str
    status: str
    number_hash: str


@dataclass(frozen=True)
class GpsRecord:
    ts: datetime
    lat: float
    lon: float
    alt: float | None = None


@dataclass
class NotificationEvent:
    """A delivered prompt with its (optional) response and contexts."""

    user_id: str
    notified_at: datetime
    response: Response
    responded_at: datetime | None = None
    activity_context: ActivityContext | None = None
    social_context: SocialContext | None = None
    suggested_arm: str | None = None

    @property
    def is_missed(self) -> bool:
        return self.response is Response.MISSED

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "notified_at": format_rfc3339(self.notified_at),
            "responded_at": format_rfc3339(self.responded_at) if self.responded_at else None,
            "response": self.response.value,
            "activity_context": self.activity_context.value if self.activity_context else None,
            "social_context": self.social_context.value if self.social_context else None,
            "suggested_arm": self.suggested_arm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NotificationEvent":
        return cls(
            user_id=str(d["user_id"]),
            notified_at=parse_rfc3339(d["notified_at"]),
            responded_at=parse_rfc3339(d["responded_at"]) if d.get("responded_at") else None,
            response=Response(d["response"]),
            activity_context=ActivityContext(d["activity_context"]) if d.get("activity_context") else None,
            social_context=SocialContext(d["social_context"]) if d.get("social_context") else None,
            suggested_arm=d.get("suggested_arm"),
        )


SENSOR_STREAMS = ("battery", "screen", "activity", "app_usage", "call", "gps")


@dataclass
class RejectEntry:
    file: str
    line: int
    reason: str

    def to_dict(self) -> dict:
        return {"file": self.file, "line": self.line, "reason": self.reason}


@dataclass
class EventStore:
    """Parsed, per-user, time-sorted streams; immutable after parse."""

    streams: dict[str, dict[str, list]] = field(
        default_factory=lambda: {s: {} for s in SENSOR_STREAMS}
    )
    notifications: list[NotificationEvent] = field(default_factory=list)
    rejects: list[RejectEntry] = field(default_factory=list)

    def records(self, stream: str, user_id: str) -> list:
        if stream not in self.streams:
            raise IngestError(f"unknown stream: {stream!r}")
        return self.streams[stream].get(user_id, [])

    @property
    def users(self) -> list[str]:
        ids = {u for per_user in self.streams.values() for u in per_user}
        ids.update(n.user_id for n in self.notifications)
        return sorted(ids)

    def stream_counts(self) -> dict[str, int]:
        counts = {
            s: sum(len(v) for v in per_user.values())
            for s, per_user in self.streams.items()
        }
        counts["notification"] = len(self.notifications)
        return counts


def _require(record: dict, key: str):
    if key not in record or record[key] is None:
        raise IngestError(f"missing field {key!r}")
    return record[key]


def _parse_battery(rec: dict) -> BatteryRecord:
    status = _require(rec, "status")
    if status not in BATTERY_STATUSES:
        raise IngestError(f"unknown battery status {status!r}")
    level = float(_require(rec, "level"))
    if not 0 <= level <= 100:
        raise IngestError(f"battery level {level} outside [0, 100]")
    return BatteryRecord(
        ts=parse_rfc3339(_require(rec, "ts")),
        status=status,
        level=level,
        voltage_mv=rec.get("voltage_mv"),
        temperature_c=rec.get("temperature_c"),
        power_saving=bool(rec.get("power_saving", False)),
    )


def _parse_screen(rec: dict) -> ScreenRecord:
    return ScreenRecord(
        ts=parse_rfc3339(_require(rec, "ts")),
        screen_on=bool(_require(rec, "screen_on")),
        unlocked=bool(rec.get("unlocked", False)),
    )


def _parse_activity(rec: dict) -> ActivitySample:
    label = _require(rec, "label")
    if label not in ACTIVITY_LABELS:
        raise IngestError(f"unknown activity label {label!r}")
    confidence = float(_require(rec, "confidence"))
    if not 0 <= confidence <= 100:
        raise IngestError(f"confidence {confidence} outside [0, 100]")
    return ActivitySample(ts=parse_rfc3339(_require(rec, "ts")), label=label, confidence=confidence)


def _parse_app_usage(rec: dict) -> AppUsageRecord:
    ms = int(_require(rec, "foreground_ms"))
    if ms < 0:
        raise IngestError(f"negative foreground duration: {ms}")
    return AppUsageRecord(
        ts=parse_rfc3339(_require(rec, "ts")),
        package=str(_require(rec, "package")),
        foreground_ms=ms,
    )


def _parse_call(rec: dict) -> CallRecord:
    start = parse_rfc3339(_require(rec, "start_ts"))
    end = parse_rfc3339(_require(rec, "end_ts"))
    if end < start:
        raise IngestError("call end precedes start")
    call_type = _require(rec, "call_type")
    if call_type not in CALL_TYPES:
        raise IngestError(f"unknown call type {call_type!r}")
    status = rec.get("status", "complete")
    if status not in CALL_STATUSES:
        raise IngestError(f"unknown call status {status!r}")
    return CallRecord(
        start_ts=start, end_ts=end, call_type=call_type,
        status=status, number_hash=str(rec.get("number_hash", "")),
    )


def _parse_gps(rec: dict) -> GpsRecord:
    lat = float(_require(rec, "lat"))
    lon = float(_require(rec, "lon"))
    if not (-90 <= lat <= 90 and -180 <= lon <= 180):
        raise IngestError(f"coordinates out of range: ({lat}, {lon})")
    return GpsRecord(ts=parse_rfc3339(_require(rec, "ts")), lat=lat, lon=lon, alt=rec.get("alt"))


def _parse_notification(rec: dict) -> NotificationEvent:
    event = NotificationEvent.from_dict(rec)
    if event.is_missed and event.responded_at is not None:
        raise IngestError("missed notification carries a response timestamp")
    if not event.is_missed and event.responded_at is None:
        raise IngestError("answered notification lacks a response timestamp")
    if event.responded_at is not None and event.responded_at < event.notified_at:
        raise IngestError("response precedes notification")
    return event


_PARSERS = {
    "battery": _parse_battery,
    "screen": _parse_screen,
    "activity": _parse_activity,
    "app_usage": _parse_app_usage,
    "call": _parse_call,
    "gps": _parse_gps,
}

_SORT_KEYS = {
    "battery": lambda r: r.ts,
    "screen": lambda r: r.ts,
    "activity": lambda r: r.ts,
    "app_usage": lambda r: r.ts,
    "call": lambda r: r.start_ts,
    "gps": lambda r: r.ts,
}


def parse_logs(files: Iterable[str | Path]) -> EventStore:
    """Parse line-delimited logs into a per-user, per-stream sorted store.

    Unknown stream tags, schema violations, and duplicate (user, timestamp)
    keys within a stream become reject entries; nothing is silently dropped.
    """
    store = EventStore()
    seen_keys: dict[tuple, bool] = {}
    for path in files:
        path = Path(path)
        with path.open() as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    store.rejects.append(RejectEntry(path.name, lineno, f"invalid JSON: {exc.msg}"))
                    continue
                try:
                    stream = rec.get("stream")
                    if stream == "notification":
                        event = _parse_notification(rec)
                        key = ("notification", event.user_id, event.notified_at)
                        if key in seen_keys:
                            raise IngestError("duplicate notification timestamp")
                        seen_keys[key] = True
                        store.notifications.append(event)
                        continue
                    if stream not in _PARSERS:
                        raise IngestError(f"unknown stream tag {stream!r}")
                    user_id = str(_require(rec, "user_id"))
                    parsed = _PARSERS[stream](rec)
                    key = (stream, user_id, _SORT_KEYS[stream](parsed))
                    if key in seen_keys:
                        raise IngestError(f"duplicate {stream} timestamp for user {user_id}")
                    seen_keys[key] = True
                    store.streams[stream].setdefault(user_id, []).append(parsed)
                except IngestError as exc:
                    store.rejects.append(RejectEntry(path.name, lineno, str(exc)))
    for stream, per_user in store.streams.items():
        for user_id in per_user:
            per_user[user_id].sort(key=_SORT_KEYS[stream])
    store.notifications.sort(key=lambda n: (n.user_id, n.notified_at))
    return store
