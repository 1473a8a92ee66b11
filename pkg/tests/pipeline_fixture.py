"""Synthetic 100-notification log with hand-declared expected features.

Each notification draws one scenario per stream; a scenario places records
at controlled offsets around the notification time and declares the feature
values those placements must produce (declared from the placement intent,
never computed by the joining code under test). Notifications sit two hours
apart so scenarios cannot bleed into each other through any tolerance.
"""

from __future__ import annotations

import math
from datetime import date, datetime, time, timedelta, timezone

N_USERS = 10
PER_USER = 10
BASE_MONDAY = date(2025, 3, 3)
#: decision slots two hours apart, 07:55 .. 19:55
SLOTS = [time(7 + 2 * k, 55) for k in range(7)]
#: expected time-of-day bucket per slot (7:55/9:55/11:55 morning,
#: 13:55/15:55 afternoon, 17:55/19:55 evening)
SLOT_TOD = ["morning", "morning", "morning", "afternoon", "afternoon", "evening", "evening"]

DAY_NAMES = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")
WEEK1 = ("early_week", "early_week", "mid_week", "mid_week", "mid_week", "weekend", "weekend")
WEEK2 = ("weekday",) * 5 + ("weekend",) * 2

M_PER_DEG_LAT = math.pi * 6_371_000.0 / 180.0

PLACES_DOC = {
    "places": [
        {"name": "north cafeteria", "lat": 23.2100, "lon": 77.2700, "category": "cafeteria_eatery"},
        {"name": "research block", "lat": 23.2200, "lon": 77.2800, "category": "academic_building_lab"},
        {"name": "stadium", "lat": 23.2300, "lon": 77.2900, "category": "sports_region"},
        {"name": "hostel 4", "lat": 23.2400, "lon": 77.3000, "category": "dormitory_area"},
        {"name": "central lawn", "lat": 23.2500, "lon": 77.3100, "category": "campus_open_area"},
    ],
    "campus_polygon": [
        [23.1900, 77.2500], [23.1900, 77.3300], [23.2600, 77.3300], [23.2600, 77.2500],
    ],
}

APP_CATALOG_DOC = {
    "com.whatsapp": "communication_social",
    "org.docs": "productivity_tools",
    "com.game": "games_simulation",
    "com.maps": "shopping_finance_travel",
    "com.netflix": "entertainment_media",
    "com.fit": "lifestyle_health",
}


def _m(minutes: float) -> timedelta:
    return timedelta(minutes=minutes)


def _lat_off(place: dict, meters: float) -> tuple[float, float]:
    return place["lat"] + meters / M_PER_DEG_LAT, place["lon"]


def _battery(ts, level, status="Discharging", ps=False):
    return {"stream": "battery", "ts": ts, "status": status, "level": level,
            "voltage_mv": 3900, "temperature_c": 30.5, "power_saving": ps}


# each scenario: (records at offsets from t, expected feature values)
BATTERY_SCENARIOS = [
    ("exact-match",
     lambda t: [_battery(t, 15)],
     {"battery_level_cat": "low", "battery_status": "Discharging", "power_saving": False}),
    ("five-min-before",
     lambda t: [_battery(t - _m(5), 5, "Charging", True)],
     {"battery_level_cat": "critical", "battery_status": "Charging", "power_saving": True}),
    ("exactly-at-tolerance",
     lambda t: [_battery(t - _m(30), 100, "Full")],
     {"battery_level_cat": "high", "battery_status": "Full", "power_saving": False}),
    ("one-past-tolerance",
     lambda t: [_battery(t + _m(31), 50)],
     {"battery_level_cat": None, "battery_status": None, "power_saving": None}),
    ("equidistant-takes-earlier",
     lambda t: [_battery(t - _m(5), 21, "Discharging"), _battery(t + _m(5), 80, "Charging")],
     {"battery_level_cat": "medium", "battery_status": "Discharging", "power_saving": False}),
    ("later-but-nearer-wins",
     lambda t: [_battery(t - _m(20), 61, "Charging"), _battery(t + _m(4), 10, "Not Charging")],
     {"battery_level_cat": "critical", "battery_status": "Not Charging", "power_saving": False}),
    ("no-records",
     lambda t: [],
     {"battery_level_cat": None, "battery_status": None, "power_saving": None}),
    ("level-twenty-is-low",
     lambda t: [_battery(t + _m(2), 20)],
     {"battery_level_cat": "low", "battery_status": "Discharging", "power_saving": False}),
]


def _screen(ts, on, unlocked):
    return {"stream": "screen", "ts": ts, "screen_on": on, "unlocked": unlocked}


SCREEN_SCENARIOS = [
    ("at-notification", lambda t: [_screen(t, True, True)],
     {"screen_on": True, "unlocked": True}),
    ("on-but-locked", lambda t: [_screen(t - _m(29), True, False)],
     {"screen_on": True, "unlocked": False}),
    ("exactly-at-tolerance", lambda t: [_screen(t + _m(30), False, False)],
     {"screen_on": False, "unlocked": False}),
    ("one-past-tolerance", lambda t: [_screen(t - _m(31), True, True)],
     {"screen_on": None, "unlocked": None}),
    ("equidistant-takes-earlier",
     lambda t: [_screen(t - _m(10), False, False), _screen(t + _m(10), True, True)],
     {"screen_on": False, "unlocked": False}),
    ("no-records", lambda t: [], {"screen_on": None, "unlocked": None}),
]


def _act(ts, label):
    return {"stream": "activity", "ts": ts, "label": label, "confidence": 87}


ACTIVITY_SCENARIOS = [
    ("clear-majority",
     lambda t: [_act(t - _m(4), "still"), _act(t - _m(3), "still"), _act(t - _m(1), "walking")],
     {"activity_label": "still"}),
    ("on-foot-merges-into-walking",
     lambda t: [_act(t - _m(4), "on_foot"), _act(t - _m(2), "walking"), _act(t - _m(1), "still")],
     {"activity_label": "walking"}),
    ("tie-takes-most-recent",
     lambda t: [_act(t - _m(3), "still"), _act(t - _m(1), "walking")],
     {"activity_label": "walking"}),
    ("tie-takes-most-recent-reversed",
     lambda t: [_act(t - _m(3), "walking"), _act(t - _m(1), "still")],
     {"activity_label": "still"}),
    ("window-start-included",
     lambda t: [_act(t - _m(5), "tilting")],
     {"activity_label": "tilting"}),
    ("just-outside-window",
     lambda t: [_act(t - _m(6), "running")],
     {"activity_label": None}),
    ("future-sample-ignored",
     lambda t: [_act(t - _m(1), "in_vehicle"), _act(t + _m(1), "running")],
     {"activity_label": "in_vehicle"}),
    ("no-records", lambda t: [], {"activity_label": None}),
]


def _app(ts, package):
    return {"stream": "app_usage", "ts": ts, "package": package, "foreground_ms": 45_000}


APP_SCENARIOS = [
    ("recent-session",
     lambda t: [_app(t - _m(10), "com.whatsapp")], {"app_category": "communication_social"}),
    ("exactly-at-tolerance",
     lambda t: [_app(t - _m(30), "org.docs")], {"app_category": "productivity_tools"}),
    ("one-past-tolerance",
     lambda t: [_app(t - _m(31), "com.game")], {"app_category": None}),
    ("only-future-session",
     lambda t: [_app(t + _m(5), "com.netflix")], {"app_category": None}),
    ("unknown-package-is-other",
     lambda t: [_app(t - _m(1), "com.vendor.widget")], {"app_category": "other"}),
    ("newest-session-wins",
     lambda t: [_app(t - _m(25), "com.game"), _app(t - _m(3), "com.maps")],
     {"app_category": "shopping_finance_travel"}),
    ("session-at-notification",
     lambda t: [_app(t, "com.fit")], {"app_category": "lifestyle_health"}),
    ("no-records", lambda t: [], {"app_category": None}),
]


def _call(start, end):
    return {"stream": "call", "start_ts": start, "end_ts": end,
            "call_type": "incoming", "status": "complete", "number_hash": "ab12"}


CALL_SCENARIOS = [
    ("covering-interval", lambda t: [_call(t - _m(2), t + _m(3))], {"on_call": True}),
    ("ends-exactly-at-t", lambda t: [_call(t - _m(5), t)], {"on_call": True}),
    ("starts-exactly-at-t", lambda t: [_call(t, t + _m(2))], {"on_call": True}),
    ("ended-before", lambda t: [_call(t - _m(10), t - _m(1))], {"on_call": False}),
    ("starts-after", lambda t: [_call(t + _m(1), t + _m(5))], {"on_call": False}),
    ("no-calls", lambda t: [], {"on_call": False}),
]


def _gps(ts, lat, lon):
    return {"stream": "gps", "ts": ts, "lat": lat, "lon": lon, "alt": 495.0}


def _gps_near(t, offset_min, place_name, meters):
    place = next(p for p in PLACES_DOC["places"] if p["name"] == place_name)
    lat, lon = _lat_off(place, meters)
    return _gps(t + _m(offset_min), lat, lon)


GPS_SCENARIOS = [
    ("ten-meters-from-cafeteria",
     lambda t: [_gps_near(t, -10, "north cafeteria", 10)],
     {"location_category": "cafeteria_eatery"}),
    ("forty-nine-meters-from-lab",
     lambda t: [_gps_near(t, -1, "research block", 49)],
     {"location_category": "academic_building_lab"}),
    ("far-from-places-inside-campus",
     lambda t: [_gps(t - _m(5), 23.2350, 77.2950)],
     {"location_category": None}),
    ("outside-campus-polygon",
     lambda t: [_gps(t - _m(5), 23.1000, 77.2000)],
     {"location_category": "outside_campus"}),
    ("stale-fix",
     lambda t: [_gps_near(t, -16, "hostel 4", 5)],
     {"location_category": None}),
    ("fix-exactly-at-tolerance",
     lambda t: [_gps_near(t, -15, "stadium", 5)],
     {"location_category": "sports_region"}),
    ("fifty-one-meters-inside-campus",
     lambda t: [_gps_near(t, -2, "central lawn", 51)],
     {"location_category": None}),
    ("no-fixes", lambda t: [], {"location_category": None}),
]

RESPONSE_CYCLE = [
    ("yes", 90.0), ("no", 30.0), ("not_feasible_now", 120.0), ("missed", None),
]

ACTIVITY_CONTEXTS = [
    "attending_lecture", "exercise", "relaxing", "in_vehicle", "cycling",
    "walking", "running", "studying", "eating", "standing",
]
SOCIAL_CONTEXTS = ["alone", "with_someone_conversing", "with_someone_not_conversing"]


def _iso(dt: datetime) -> str:
    return dt.isoformat().replace("+00:00", "Z")


def build_fixture() -> tuple[list[dict], dict[tuple[str, str], dict]]:
    """Returns (log records, expected features keyed by (user, notified_at))."""
    records: list[dict] = []
    expected: dict[tuple[str, str], dict] = {}
    i = 0
    for u in range(N_USERS):
        user_id = f"u{u:02d}"
        for j in range(PER_USER):
            day = BASE_MONDAY + timedelta(days=(u % 7) + (j // len(SLOTS)))
            slot = j % len(SLOTS)
            t = datetime.combine(day, SLOTS[slot], tzinfo=timezone.utc)
            response, delay = RESPONSE_CYCLE[i % len(RESPONSE_CYCLE)]
            notification = {
                "stream": "notification",
                "user_id": user_id,
                "notified_at": _iso(t),
                "responded_at": _iso(t + timedelta(seconds=delay)) if delay else None,
                "response": response,
                "activity_context": ACTIVITY_CONTEXTS[i % 10],
                "social_context": SOCIAL_CONTEXTS[i % 3],
                "suggested_arm": None,
            }
            records.append(notification)

            feats: dict = {
                "time_of_day": SLOT_TOD[slot],
                "day_of_week": DAY_NAMES[day.weekday()],
                "week_cat_1": WEEK1[day.weekday()],
                "week_cat_2": WEEK2[day.weekday()],
            }
            for scenarios, idx in (
                (BATTERY_SCENARIOS, i % len(BATTERY_SCENARIOS)),
                (SCREEN_SCENARIOS, i % len(SCREEN_SCENARIOS)),
                (ACTIVITY_SCENARIOS, i % len(ACTIVITY_SCENARIOS)),
                (APP_SCENARIOS, i % len(APP_SCENARIOS)),
                (CALL_SCENARIOS, i % len(CALL_SCENARIOS)),
                (GPS_SCENARIOS, i % len(GPS_SCENARIOS)),
            ):
                name, build, expect = scenarios[idx]
                for rec in build(t):
                    payload = dict(rec)
                    for ts_key in ("ts", "start_ts", "end_ts"):
                        if ts_key in payload:
                            payload[ts_key] = _iso(payload[ts_key])
                    payload["user_id"] = user_id
                    records.append(payload)
                for feat, value in expect.items():
                    feats[feat] = value
                feats.setdefault("_scenarios", []).append(name)
            expected[(user_id, notification["notified_at"])] = feats
            i += 1
    return records, expected
