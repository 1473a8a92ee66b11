"""Join each notification to its contextual features.

Tolerances: battery, screen, and app usage use 30 minutes; activity uses a
closed 5-minute lookback window; GPS uses the nearest fix within 15 minutes
matched to named places within 50 meters; calls use interval containment.
Boundary conventions (half-open buckets, closed call intervals, earlier
record on equidistant ties) are fixed here.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Sequence
import json

from .records import (
    ActivitySample,
    AppUsageRecord,
    BatteryRecord,
    CallRecord,
    EventStore,
    GpsRecord,
    IngestError,
    NotificationEvent,
    ScreenRecord,
    format_rfc3339,
)

BATTERY_TOLERANCE = timedelta(minutes=30)
SCREEN_TOLERANCE = timedelta(minutes=30)
APP_USAGE_TOLERANCE = timedelta(minutes=30)
ACTIVITY_WINDOW = timedelta(minutes=5)
GPS_TOLERANCE = timedelta(minutes=15)
PLACE_RADIUS_METERS = 50.0

EARTH_RADIUS_METERS = 6_371_000.0


class TimeOfDay(str, Enum):
    MORNING = "morning"
    AFTERNOON = "afternoon"
    EVENING = "evening"


class WeekCat1(str, Enum):
    EARLY_WEEK = "early_week"
    MID_WEEK = "mid_week"
    WEEKEND = "weekend"


class WeekCat2(str, Enum):
    WEEKDAY = "weekday"
    WEEKEND = "weekend"


class BatteryLevelCat(str, Enum):
    CRITICAL = "critical"
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class AppCategory(str, Enum):
    OTHER = "other"
    PRODUCTIVITY_TOOLS = "productivity_tools"
    COMMUNICATION_SOCIAL = "communication_social"
    GAMES_SIMULATION = "games_simulation"
    ENTERTAINMENT_MEDIA = "entertainment_media"
    SHOPPING_FINANCE_TRAVEL = "shopping_finance_travel"
    LIFESTYLE_HEALTH = "lifestyle_health"


class LocationCategory(str, Enum):
    CAMPUS_OPEN_AREA = "campus_open_area"
    ACADEMIC_BUILDING_LAB = "academic_building_lab"
    SPORTS_REGION = "sports_region"
    CAFETERIA_EATERY = "cafeteria_eatery"
    DORMITORY_AREA = "dormitory_area"
    OUTSIDE_CAMPUS = "outside_campus"


#: raw recognized-activity labels exposed as features, after on_foot merges
#: into walking
FEATURE_ACTIVITY_LABELS = ("still", "tilting", "walking", "in_vehicle", "on_bicycle", "running")

DAY_NAMES = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")


def bucketize_time_of_day(at: datetime) -> TimeOfDay | None:
    """Half-open buckets over the prompt window: [7,12) morning, [12,16)
    afternoon, [16,20] evening; outside 07:00-20:00 there is no bucket."""
    h = at.hour + at.minute / 60.0 + at.second / 3600.0
    if 7.0 <= h < 12.0:
        return TimeOfDay.MORNING
    if 12.0 <= h < 16.0:
        return TimeOfDay.AFTERNOON
    if 16.0 <= h <= 20.0:
        return TimeOfDay.EVENING
    return None


def day_of_week(at: datetime) -> str:
    return DAY_NAMES[at.weekday()]


def week_category_1(at: datetime) -> WeekCat1:
    wd = at.weekday()
    if wd <= 1:
        return WeekCat1.EARLY_WEEK
    if wd <= 4:
        return WeekCat1.MID_WEEK
    return WeekCat1.WEEKEND


def week_category_2(at: datetime) -> WeekCat2:
    return WeekCat2.WEEKDAY if at.weekday() <= 4 else WeekCat2.WEEKEND


def bucketize_battery_level(level: float) -> BatteryLevelCat:
    """[0,10] critical, (10,20] low, (20,60] medium, (60,100] high."""
    if not 0 <= level <= 100:
        raise IngestError(f"battery level {level} outside [0, 100]")
    if level <= 10:
        return BatteryLevelCat.CRITICAL
    if level <= 20:
        return BatteryLevelCat.LOW
    if level <= 60:
        return BatteryLevelCat.MEDIUM
    return BatteryLevelCat.HIGH


def map_nearest(at: datetime, records: Sequence, tolerance: timedelta, key=lambda r: r.ts):
    """Nearest record by absolute time difference, or None past tolerance.

    Records must be sorted by ``key``; an equidistant tie keeps the earlier
    record.
    """
    if not records:
        return None
    stamps = [key(r) for r in records]
    i = bisect_left(stamps, at)
    best = None
    best_delta = None
    for j in (i - 1, i):
        if 0 <= j < len(records):
            delta = abs(stamps[j] - at)
            if best is None or delta < best_delta:
                best, best_delta = records[j], delta
    if best is None or best_delta > tolerance:
        return None
    return best


def most_recent_within(at: datetime, records: Sequence, tolerance: timedelta, key=lambda r: r.ts):
    """Latest record with key <= at and at - key <= tolerance, else None."""
    if not records:
        return None
    stamps = [key(r) for r in records]
    i = bisect_left(stamps, at)
    # bisect_left lands on the first key >= at; an exact match counts
    if i < len(records) and stamps[i] == at:
        return records[i]
    if i == 0:
        return None
    if at - stamps[i - 1] <= tolerance:
        return records[i - 1]
    return None


def activity_mode_window(
    at: datetime, samples: Sequence[ActivitySample], window: timedelta = ACTIVITY_WINDOW
) -> str | None:
    """Mode of recognized-activity labels in the closed window
    [at - window, at], with on_foot merged into walking. A modal tie goes to
    the most recent sample's label; an empty window yields None."""
    counts: dict[str, int] = {}
    latest_ts: dict[str, datetime] = {}
    lo = at - window
    for s in samples:
        if lo <= s.ts <= at:
            label = "walking" if s.label == "on_foot" else s.label
            counts[label] = counts.get(label, 0) + 1
            if label not in latest_ts or s.ts > latest_ts[label]:
                latest_ts[label] = s.ts
    if not counts:
        return None
    top = max(counts.values())
    tied = [label for label, c in counts.items() if c == top]
    if len(tied) == 1:
        return tied[0]
    return max(tied, key=lambda label: latest_ts[label])


def on_call(at: datetime, calls: Sequence[CallRecord]) -> bool:
    """True when the notification lands inside any closed call interval."""
    return any(c.start_ts <= at <= c.end_ts for c in calls)


def haversine_meters(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_METERS * math.asin(math.sqrt(a))


@dataclass(frozen=True)
class Place:
    name: str
    lat: float
    lon: float
    category: LocationCategory


@dataclass
class PlacesTable:
    """Named campus points plus the campus boundary polygon (lat, lon pairs)."""

    places: list[Place]
    campus_polygon: list[tuple[float, float]]

    @classmethod
    def load(cls, source: str | Path | dict) -> "PlacesTable":
        doc = source if isinstance(source, dict) else json.loads(Path(source).read_text())
        places = [
            Place(
                name=p["name"], lat=float(p["lat"]), lon=float(p["lon"]),
                category=LocationCategory(p["category"]),
            )
            for p in doc.get("places", [])
        ]
        polygon = [(float(lat), float(lon)) for lat, lon in doc.get("campus_polygon", [])]
        return cls(places=places, campus_polygon=polygon)

    def contains(self, lat: float, lon: float) -> bool:
        """Ray-casting point-in-polygon; adequate at campus scales."""
        poly = self.campus_polygon
        if len(poly) < 3:
            return False
        inside = False
        j = len(poly) - 1
        for i in range(len(poly)):
            yi, xi = poly[i]
            yj, xj = poly[j]
            if (yi > lat) != (yj > lat):
                x_cross = xi + (lat - yi) * (xj - xi) / (yj - yi)
                if lon < x_cross:
                    inside = not inside
            j = i
        return inside


def resolve_location(
    at: datetime,
    fixes: Sequence[GpsRecord],
    places: PlacesTable,
    radius_m: float = PLACE_RADIUS_METERS,
    tolerance: timedelta = GPS_TOLERANCE,
) -> LocationCategory | None:
    """Category of the named place nearest the closest GPS fix.

    No fix within tolerance -> None. Nearest place beyond the radius ->
    outside_campus when the fix falls outside the campus polygon, else None
    (on campus but not near any named point).
    """
    fix = map_nearest(at, fixes, tolerance)
    if fix is None:
        return None
    if not math.isfinite(fix.lat) or not math.isfinite(fix.lon):
        raise IngestError(f"malformed coordinates: ({fix.lat}, {fix.lon})")
    nearest = None
    nearest_d = None
    for place in places.places:
        d = haversine_meters(fix.lat, fix.lon, place.lat, place.lon)
        if nearest_d is None or d < nearest_d:
            nearest, nearest_d = place, d
    if nearest is not None and nearest_d <= radius_m:
        return nearest.category
    if not places.contains(fix.lat, fix.lon):
        return LocationCategory.OUTSIDE_CAMPUS
    return None


def categorize_app(package: str, catalog: dict[str, AppCategory] | None) -> AppCategory:
    """Catalog lookup with 'other' as the default bucket."""
    if not catalog:
        return AppCategory.OTHER
    return catalog.get(package, AppCategory.OTHER)


def load_app_catalog(source: str | Path | dict) -> dict[str, AppCategory]:
    doc = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    return {pkg: AppCategory(cat) for pkg, cat in doc.items()}


@dataclass
class FeatureRow:
    """One notification joined to every derivable categorical feature."""

    notification: NotificationEvent
    time_of_day: TimeOfDay | None = None
    day_of_week: str | None = None
    week_cat_1: WeekCat1 | None = None
    week_cat_2: WeekCat2 | None = None
    battery_level_cat: BatteryLevelCat | None = None
    battery_status: str | None = None
    power_saving: bool | None = None
    screen_on: bool | None = None
    unlocked: bool | None = None
    activity_label: str | None = None
    app_category: AppCategory | None = None
    on_call: bool = False
    location_category: LocationCategory | None = None

    FEATURE_NAMES = (
        "time_of_day", "day_of_week", "week_cat_1", "week_cat_2",
        "battery_level_cat", "battery_status", "power_saving",
        "screen_on", "unlocked", "activity_label", "app_category",
        "on_call", "location_category",
    )

    def feature(self, name: str):
        if name not in self.FEATURE_NAMES:
            raise IngestError(f"unknown feature: {name!r}")
        return getattr(self, name)

    def to_dict(self) -> dict:
        def plain(v):
            return v.value if isinstance(v, Enum) else v

        d = self.notification.to_dict()
        d["features"] = {name: plain(getattr(self, name)) for name in self.FEATURE_NAMES}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureRow":
        feats = d.get("features", {})
        def pick(name, enum_cls):
            v = feats.get(name)
            return enum_cls(v) if v is not None else None

        return cls(
            notification=NotificationEvent.from_dict(d),
            time_of_day=pick("time_of_day", TimeOfDay),
            day_of_week=feats.get("day_of_week"),
            week_cat_1=pick("week_cat_1", WeekCat1),
            week_cat_2=pick("week_cat_2", WeekCat2),
            battery_level_cat=pick("battery_level_cat", BatteryLevelCat),
            battery_status=feats.get("battery_status"),
            power_saving=feats.get("power_saving"),
            screen_on=feats.get("screen_on"),
            unlocked=feats.get("unlocked"),
            activity_label=feats.get("activity_label"),
            app_category=pick("app_category", AppCategory),
            on_call=bool(feats.get("on_call", False)),
            location_category=pick("location_category", LocationCategory),
        )


def derive_features(
    notification: NotificationEvent,
    store: EventStore,
    places: PlacesTable | None = None,
    app_catalog: dict[str, AppCategory] | None = None,
) -> FeatureRow:
    """Apply every joining rule at its tolerance; absent streams simply
    leave their features unset."""
    uid = notification.user_id
    at = notification.notified_at
    row = FeatureRow(
        notification=notification,
        time_of_day=bucketize_time_of_day(at),
        day_of_week=day_of_week(at),
        week_cat_1=week_category_1(at),
        week_cat_2=week_category_2(at),
    )

    battery = map_nearest(at, store.records("battery", uid), BATTERY_TOLERANCE)
    if battery is not None:
        row.battery_level_cat = bucketize_battery_level(battery.level)
        row.battery_status = battery.status
        row.power_saving = battery.power_saving

    screen = map_nearest(at, store.records("screen", uid), SCREEN_TOLERANCE)
    if screen is not None:
        row.screen_on = screen.screen_on
        row.unlocked = screen.unlocked

    row.activity_label = activity_mode_window(at, store.records("activity", uid))

    session = most_recent_within(at, store.records("app_usage", uid), APP_USAGE_TOLERANCE)
    if session is not None:
        row.app_category = categorize_app(session.package, app_catalog)

    row.on_call = on_call(at, store.records("call", uid))

    if places is not None:
        row.location_category = resolve_location(at, store.records("gps", uid), places)

    return row
