"""Receptivity metrics over notification events.

Completion rate = answered / (answered + missed). Response time is the
response-minus-notification gap in seconds for answered prompts. Average
reward is the mean mapped reward over answered prompts only.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..domain import map_reward
from ..ingest.records import NotificationEvent


class MetricsError(ValueError):
    pass


def completion_rate(notifications: Sequence[NotificationEvent]) -> float:
    if not notifications:
        raise MetricsError("completion rate of an empty group is undefined")
    filled = sum(1 for n in notifications if not n.is_missed)
    return filled / len(notifications)


def completion_rate_from_counts(filled: int, missed: int) -> float:
    if filled < 0 or missed < 0 or filled + missed == 0:
        raise MetricsError(f"invalid counts: filled={filled}, missed={missed}")
    return filled / (filled + missed)


def response_times(
    notifications: Iterable[NotificationEvent],
) -> tuple[list[float], list[dict]]:
    """Seconds from prompt to answer for answered prompts.

    Missed prompts are excluded; an answer stamped before its prompt is a
    data-quality reject, returned alongside the series.
    """
    series: list[float] = []
    rejects: list[dict] = []
    for n in notifications:
        if n.is_missed or n.responded_at is None:
            continue
        delta = (n.responded_at - n.notified_at).total_seconds()
        if delta < 0:
            rejects.append(
                {
                    "user_id": n.user_id,
                    "notified_at": n.notified_at.isoformat(),
                    "reason": "response precedes notification",
                }
            )
            continue
        series.append(delta)
    return series, rejects


def average_reward(notifications: Sequence[NotificationEvent]) -> float | None:
    """Mean mapped reward over answered prompts; None when nothing was
    answered (a reward is undefined for missed prompts)."""
    rewards = [map_reward(n.response) for n in notifications if not n.is_missed]
    if not rewards:
        return None
    return sum(rewards) / len(rewards)


def per_participant_completion_rates(
    notifications: Sequence[NotificationEvent],
) -> dict[str, float]:
    by_user: dict[str, list[NotificationEvent]] = {}
    for n in notifications:
        by_user.setdefault(n.user_id, []).append(n)
    return {uid: completion_rate(group) for uid, group in sorted(by_user.items())}
