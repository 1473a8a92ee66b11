"""Passive-sensing log ingestion and notification feature derivation."""

from .records import (
    AppUsageRecord,
    BatteryRecord,
    CallRecord,
    EventStore,
    GpsRecord,
    IngestError,
    NotificationEvent,
    ScreenRecord,
    ActivitySample,
    parse_logs,
    parse_rfc3339,
)
from .features import (
    AppCategory,
    BatteryLevelCat,
    FeatureRow,
    LocationCategory,
    PlacesTable,
    TimeOfDay,
    WeekCat1,
    WeekCat2,
    activity_mode_window,
    bucketize_battery_level,
    bucketize_time_of_day,
    categorize_app,
    derive_features,
    map_nearest,
    on_call,
    resolve_location,
    week_category_1,
    week_category_2,
)

__all__ = [
    "AppUsageRecord",
    "BatteryRecord",
    "CallRecord",
    "EventStore",
    "GpsRecord",
    "IngestError",
    "NotificationEvent",
    "ScreenRecord",
    "ActivitySample",
    "parse_logs",
    "parse_rfc3339",
    "AppCategory",
    "BatteryLevelCat",
    "FeatureRow",
    "LocationCategory",
    "PlacesTable",
    "TimeOfDay",
    "WeekCat1",
    "WeekCat2",
    "activity_mode_window",
    "bucketize_battery_level",
    "bucketize_time_of_day",
    "categorize_app",
    "derive_features",
    "map_nearest",
    "on_call",
    "resolve_location",
    "week_category_1",
    "week_category_2",
]
