"""Per-feature receptivity reports: group metrics, the matching omnibus test
(Kruskal-Wallis for three or more groups, Mann-Whitney U for two), and Dunn
pairwise follow-ups when the omnibus is significant.

Completion rate is reported two ways, pooled over notifications and as the
mean of per-participant rates; the statistical test runs on the
per-participant rates, which form a proper sample.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

from ..domain import map_reward
from ..ingest.features import FeatureRow
from .metrics import (
    MetricsError,
    completion_rate,
    per_participant_completion_rates,
    response_times,
)
from .stats import StatTestResult, dunn_posthoc, kruskal_wallis, mann_whitney_u

DEFAULT_ALPHA = 0.05

#: metric name -> how a group's sample series is extracted
TESTED_METRICS = ("response_time_seconds", "reward", "participant_completion_rate")


class ReportError(ValueError):
    pass


def _label(value) -> str:
    if isinstance(value, Enum):
        return value.value
    return str(value)


def _group_rows(rows: Sequence[FeatureRow], feature: str) -> dict[str, list[FeatureRow]]:
    groups: dict[str, list[FeatureRow]] = {}
    for row in rows:
        value = row.feature(feature)
        if value is None:
            continue
        groups.setdefault(_label(value), []).append(row)
    if not groups:
        raise ReportError(f"feature {feature!r} is absent from every row")
    return dict(sorted(groups.items()))


def _metric_series(metric: str, rows: list[FeatureRow]) -> list[float]:
    notifs = [r.notification for r in rows]
    if metric == "response_time_seconds":
        series, _ = response_times(notifs)
        return series
    if metric == "reward":
        return [map_reward(n.response) for n in notifs if not n.is_missed]
    if metric == "participant_completion_rate":
        return list(per_participant_completion_rates(notifs).values())
    raise ReportError(f"unknown metric: {metric!r}")


def _run_tests(series_by_group: dict[str, list[float]], alpha: float) -> dict:
    """Pick the test by group count; attach Dunn pairs when the omnibus is
    significant. Groups with no observations for the metric are skipped."""
    usable = {g: s for g, s in series_by_group.items() if s}
    out: dict = {"omnibus": None, "post_hoc": [], "skipped_groups": sorted(set(series_by_group) - set(usable))}
    if len(usable) < 2:
        return out
    labels = list(usable.keys())
    samples = list(usable.values())
    if len(usable) == 2:
        out["omnibus"] = mann_whitney_u(samples[0], samples[1], labels=labels)
        return out
    omnibus = kruskal_wallis(samples, labels=labels)
    out["omnibus"] = omnibus
    if omnibus.p_value <= alpha:
        out["post_hoc"] = dunn_posthoc(samples, labels=labels)
    return out


def build_report(
    rows: Sequence[FeatureRow],
    features: Sequence[str],
    alpha: float = DEFAULT_ALPHA,
) -> dict:
    """Assemble group metrics and tests for each requested feature."""
    if not rows:
        raise ReportError("no feature rows supplied")
    report: dict = {"alpha": alpha, "n_rows": len(rows), "features": []}
    for feature in features:
        groups = _group_rows(rows, feature)
        group_stats = []
        series: dict[str, dict[str, list[float]]] = {m: {} for m in TESTED_METRICS}
        for label, grp in groups.items():
            notifs = [r.notification for r in grp]
            rates = per_participant_completion_rates(notifs)
            times, _ = response_times(notifs)
            rewards = [map_reward(n.response) for n in notifs if not n.is_missed]
            group_stats.append(
                {
                    "group": label,
                    "n": len(notifs),
                    "filled": sum(1 for n in notifs if not n.is_missed),
                    "missed": sum(1 for n in notifs if n.is_missed),
                    "completion_rate_pooled": completion_rate(notifs),
                    "completion_rate_participant_mean": sum(rates.values()) / len(rates),
                    "response_time_mean_s": sum(times) / len(times) if times else None,
                    "average_reward": sum(rewards) / len(rewards) if rewards else None,
                }
            )
            for metric in TESTED_METRICS:
                series[metric][label] = _metric_series(metric, grp)
        tests = {m: _run_tests(series[m], alpha) for m in TESTED_METRICS}
        report["features"].append(
            {
                "feature": feature,
                "groups": group_stats,
                "tests": {
                    m: {
                        "omnibus": t["omnibus"].to_dict() if t["omnibus"] else None,
                        "post_hoc": [r.to_dict() for r in t["post_hoc"]],
                        "skipped_groups": t["skipped_groups"],
                    }
                    for m, t in tests.items()
                },
            }
        )
    return report


def _fmt(x, width=10) -> str:
    if x is None:
        return "-".rjust(width)
    if isinstance(x, float):
        return f"{x:.4f}".rjust(width)
    return str(x).rjust(width)


def render_text(report: dict) -> str:
    """Plain-text tables, one block per feature."""
    lines: list[str] = []
    for fr in report["features"]:
        lines.append(f"=== feature: {fr['feature']} ===")
        header = (
            f"{'group':<28}{'n':>6}{'filled':>8}{'missed':>8}"
            f"{'cr_pool':>10}{'cr_part':>10}{'rt_mean':>10}{'reward':>10}"
        )
        lines.append(header)
        for g in fr["groups"]:
            lines.append(
                f"{g['group']:<28}{g['n']:>6}{g['filled']:>8}{g['missed']:>8}"
                + _fmt(g["completion_rate_pooled"])
                + _fmt(g["completion_rate_participant_mean"])
                + _fmt(g["response_time_mean_s"])
                + _fmt(g["average_reward"])
            )
        for metric, block in fr["tests"].items():
            omnibus = block["omnibus"]
            if omnibus is None:
                lines.append(f"  [{metric}] no test (fewer than 2 usable groups)")
                continue
            stat_name = "H" if omnibus["test"] == "kruskal_wallis" else "U"
            df = f", df={omnibus['df']}" if omnibus.get("df") is not None else ""
            lines.append(
                f"  [{metric}] {omnibus['test']}: {stat_name}={omnibus['statistic']:.4f}{df}, "
                f"p={omnibus['p_value']:.5f}"
                + (" *" if omnibus["p_value"] <= report["alpha"] else "")
            )
            for pair in block["post_hoc"]:
                flag = " *" if pair["adjusted_p"] <= report["alpha"] else ""
                lines.append(
                    f"    {pair['groups'][0]} vs {pair['groups'][1]}: z={pair['statistic']:.4f}, "
                    f"p={pair['p_value']:.5f}, adj={pair['adjusted_p']:.5f}{flag}"
                )
        lines.append("")
    return "\n".join(lines)


def report_csv_rows(report: dict) -> list[list]:
    """Flat group-by-metric matrix for external plotting."""
    rows = [[
        "feature", "group", "n", "filled", "missed",
        "completion_rate_pooled", "completion_rate_participant_mean",
        "response_time_mean_s", "average_reward",
    ]]
    for fr in report["features"]:
        for g in fr["groups"]:
            rows.append([
                fr["feature"], g["group"], g["n"], g["filled"], g["missed"],
                g["completion_rate_pooled"], g["completion_rate_participant_mean"],
                g["response_time_mean_s"], g["average_reward"],
            ])
    return rows
