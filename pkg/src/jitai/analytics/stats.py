"""Rank-based hypothesis tests with numeric tail kernels.

Everything here is self-contained: mid-rank assignment, tie corrections,
and the chi-square/normal upper tails (regularized incomplete gamma and
complementary error function). Mid-ranks make all three tests invariant
under strictly monotone transforms of the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence


class StatsError(ValueError):
    pass


class StatTestKind(str, Enum):
    KRUSKAL_WALLIS = "kruskal_wallis"
    MANN_WHITNEY_U = "mann_whitney_u"
    DUNN_PAIR = "dunn_pair"


@dataclass(frozen=True)
class StatTestResult:
    test: StatTestKind
    statistic: float
    p_value: float
    groups: tuple[str, ...]
    df: int | None = None
    adjusted_p: float | None = None

    def to_dict(self) -> dict:
        d = {
            "test": self.test.value,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "groups": list(self.groups),
        }
        if self.df is not None:
            d["df"] = self.df
        if self.adjusted_p is not None:
            d["adjusted_p"] = self.adjusted_p
        return d


# ---------------------------------------------------------------------------
# tail kernels


def _gamma_upper_regularized(a: float, x: float) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a), for a > 0, x >= 0.

    Lower series when x < a + 1, Lentz continued fraction otherwise; both
    converge to machine precision well inside the iteration cap.
    """
    if x < 0.0 or a <= 0.0:
        raise StatsError(f"invalid incomplete gamma arguments: a={a}, x={x}")
    if x == 0.0:
        return 1.0
    log_prefix = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1.0:
        # P(a, x) series: sum_{n>=0} x^n / (a (a+1) ... (a+n))
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(1000):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        p = total * math.exp(log_prefix)
        return min(max(1.0 - p, 0.0), 1.0)
    # continued fraction for Q(a, x), modified Lentz
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = h * math.exp(log_prefix)
    return min(max(q, 0.0), 1.0)


def chi_square_tail(x: float, df: int) -> float:
    """P(X >= x) for X ~ chi-square(df). At df = 2 this is exactly e^(-x/2)."""
    if df < 1:
        raise StatsError(f"df must be >= 1, got {df}")
    if not math.isfinite(x):
        raise StatsError(f"non-finite statistic: {x}")
    if x <= 0.0:
        return 1.0
    return _gamma_upper_regularized(df / 2.0, x / 2.0)


def normal_tail(x: float) -> float:
    """Upper tail P(Z >= x) of the standard normal via erfc."""
    if not math.isfinite(x):
        raise StatsError(f"non-finite statistic: {x}")
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def tail_probability(kind: str, x: float, df: int | None = None) -> float:
    if kind == "standard_normal":
        return normal_tail(x)
    if kind == "chi_square":
        if df is None:
            raise StatsError("chi_square tail requires df")
        return chi_square_tail(x, df)
    raise StatsError(f"unknown tail kind: {kind!r}")


def _two_sided_normal_p(z: float) -> float:
    return min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))


# ---------------------------------------------------------------------------
# ranking


def _midranks(pooled: Sequence[float]) -> tuple[list[float], float]:
    """Ranks (1-based, mid-rank ties) aligned with input order, plus the tie
    term sum(t^3 - t) over tie groups."""
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    tie_term = 0.0
    i = 0
    n = len(pooled)
    while i < n:
        j = i
        while j + 1 < n and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        mid = (i + j + 2) / 2.0  # average of 1-based ranks i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        t = j - i + 1
        if t > 1:
            tie_term += t**3 - t
        i = j + 1
    return ranks, tie_term


def _check_groups(groups: Sequence[Sequence[float]], labels) -> tuple[list[list[float]], tuple[str, ...]]:
    data = [list(g) for g in groups]
    if any(len(g) == 0 for g in data):
        raise StatsError("every group must be non-empty")
    if labels is None:
        labels = tuple(f"group{i + 1}" for i in range(len(data)))
    else:
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(data):
            raise StatsError("labels/groups length mismatch")
    return data, labels


def _h_statistic(groups: Sequence[Sequence[float]]) -> float:
    """Tie-corrected Kruskal-Wallis H; 0 when every value is identical."""
    sizes = [len(g) for g in groups]
    pooled = [v for g in groups for v in g]
    n = len(pooled)
    ranks, tie_term = _midranks(pooled)
    h = -3.0 * (n + 1)
    offset = 0
    for size in sizes:
        r = sum(ranks[offset : offset + size])
        h += 12.0 / (n * (n + 1)) * r * r / size
        offset += size
    correction = 1.0 - tie_term / (n**3 - n) if n > 1 else 0.0
    if correction <= 0.0:
        return 0.0
    h = h / correction
    return max(h, 0.0)  # guard tiny negative rounding on all-tied input


def kruskal_wallis(
    groups: Sequence[Sequence[float]], labels: Sequence[str] | None = None
) -> StatTestResult:
    """Omnibus rank test across three or more groups.

    H is the rank-variance statistic divided by the tie correction
    1 - sum(t^3 - t)/(N^3 - N); the p-value is the chi-square upper tail at
    k - 1 degrees of freedom.
    """
    data, labels = _check_groups(groups, labels)
    if len(data) < 3:
        raise StatsError(
            "kruskal_wallis requires >= 3 groups; use mann_whitney_u for two"
        )
    n = sum(len(g) for g in data)
    if n < 3:
        raise StatsError(f"need at least 3 observations, got {n}")
    h = _h_statistic(data)
    df = len(data) - 1
    p = 1.0 if h == 0.0 else chi_square_tail(h, df)
    return StatTestResult(
        test=StatTestKind.KRUSKAL_WALLIS, statistic=h, p_value=p, groups=labels, df=df
    )


def mann_whitney_u(
    a: Sequence[float], b: Sequence[float], labels: Sequence[str] = ("a", "b")
) -> StatTestResult:
    """Two-sided Mann-Whitney U via the normal approximation.

    U is reported for the first sample. The variance carries the tie
    correction and z gets a 0.5 continuity correction toward zero; a fully
    tied comparison yields p = 1 by convention.
    """
    data, labels = _check_groups([a, b], labels)
    x, y = data
    n1, n2 = len(x), len(y)
    n = n1 + n2
    ranks, tie_term = _midranks(x + y)
    r1 = sum(ranks[:n1])
    u = r1 - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return StatTestResult(
            test=StatTestKind.MANN_WHITNEY_U, statistic=u, p_value=1.0, groups=labels
        )
    if u > mu:
        z = (u - mu - 0.5) / math.sqrt(var)
    elif u < mu:
        z = (u - mu + 0.5) / math.sqrt(var)
    else:
        z = 0.0
    return StatTestResult(
        test=StatTestKind.MANN_WHITNEY_U,
        statistic=u,
        p_value=_two_sided_normal_p(z),
        groups=labels,
    )


def dunn_posthoc(
    groups: Sequence[Sequence[float]],
    labels: Sequence[str] | None = None,
    correction: str = "bonferroni",
) -> list[StatTestResult]:
    """All pairwise Dunn comparisons after a Kruskal-Wallis omnibus.

    z_ij = (mean rank i - mean rank j) / sqrt((N(N+1)/12 - T/(12(N-1))) *
    (1/n_i + 1/n_j)) with T = sum(t^3 - t); Bonferroni multiplies each
    two-sided p by the number of pairs, capped at 1.
    """
    if correction not in ("bonferroni", "none"):
        raise StatsError(f"unknown correction: {correction!r}")
    data, labels = _check_groups(groups, labels)
    k = len(data)
    if k < 3:
        raise StatsError("dunn_posthoc requires >= 3 groups")
    pooled = [v for g in data for v in g]
    n = len(pooled)
    ranks, tie_term = _midranks(pooled)
    mean_ranks = []
    offset = 0
    for g in data:
        mean_ranks.append(sum(ranks[offset : offset + len(g)]) / len(g))
        offset += len(g)
    base_var = n * (n + 1) / 12.0 - tie_term / (12.0 * (n - 1))
    m = k * (k - 1) // 2
    results = []
    for i in range(k):
        for j in range(i + 1, k):
            denom = base_var * (1.0 / len(data[i]) + 1.0 / len(data[j]))
            if denom <= 0.0:
                z = 0.0
            else:
                z = (mean_ranks[i] - mean_ranks[j]) / math.sqrt(denom)
            p = _two_sided_normal_p(z)
            adjusted = p if correction == "none" else min(1.0, p * m)
            results.append(
                StatTestResult(
                    test=StatTestKind.DUNN_PAIR,
                    statistic=z,
                    p_value=p,
                    adjusted_p=adjusted,
                    groups=(labels[i], labels[j]),
                )
            )
    return results
