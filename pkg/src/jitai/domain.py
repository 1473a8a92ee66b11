"""Core vocabulary: interventions, contexts, responses, rewards, and the
survey-to-prior elicitation step.

The intervention catalog and the per-context feasibility table shipped under
``jitai/data/`` drive everything downstream: arm ordering, prior Beta
parameters, and the simulator's default ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping


class Category(str, Enum):
    """The four intervention families."""

    PHYSICAL_ACTIVITY = "physical_activity"
    MENTAL_RELAXATION = "mental_relaxation"
    COGNITIVE_ACTIVITY = "cognitive_activity"
    EMOTIONAL_SOCIAL_ENGAGEMENT = "emotional_social_engagement"


class ActivityContext(str, Enum):
    ATTENDING_LECTURE = "attending_lecture"
    EXERCISE = "exercise"
    RELAXING = "relaxing"
    IN_VEHICLE = "in_vehicle"
    CYCLING = "cycling"
    WALKING = "walking"
    RUNNING = "running"
    STUDYING = "studying"
    EATING = "eating"
    STANDING = "standing"


class SocialContext(str, Enum):
    ALONE = "alone"
    WITH_SOMEONE_CONVERSING = "with_someone_conversing"
    WITH_SOMEONE_NOT_CONVERSING = "with_someone_not_conversing"


class Response(str, Enum):
    YES = "yes"
    NO = "no"
    NOT_FEASIBLE_NOW = "not_feasible_now"
    MISSED = "missed"


#: Reward mapping for answered prompts. Missed prompts carry no reward and
#: never reach the bandit update.
REWARDS: Mapping[Response, float] = {
    Response.YES: 1.0,
    Response.NOT_FEASIBLE_NOW: 0.5,
    Response.NO: 0.0,
}

PROMPT_TEXT = "Will you perform the given task at this moment?"

DEFAULT_EXCLUSION_THRESHOLD = 0.4
DEFAULT_CAP_ADJUSTMENT = 0.025
DEFAULT_SURVEY_RESPONDENTS = 19


class CatalogError(ValueError):
    """Malformed or inconsistent intervention catalog."""


class PriorError(ValueError):
    """Survey tallies or prior matrix violate their contracts."""


@dataclass(frozen=True)
class Intervention:
    id: str
    name: str
    category: Category


class InterventionCatalog:
    """Ordered collection of interventions; order defines arm ordering and
    tie-breaking everywhere downstream."""

    def __init__(self, interventions: Iterable[Intervention]):
        items = list(interventions)
        if not items:
            raise CatalogError("catalog is empty")
        seen = set()
        for it in items:
            if it.id in seen:
                raise CatalogError(f"duplicate intervention id: {it.id!r}")
            seen.add(it.id)
        self._items = items
        self._by_id = {it.id: it for it in items}

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def __contains__(self, intervention_id: str) -> bool:
        return intervention_id in self._by_id

    def get(self, intervention_id: str) -> Intervention:
        try:
            return self._by_id[intervention_id]
        except KeyError:
            raise CatalogError(f"unknown intervention id: {intervention_id!r}") from None

    @property
    def ids(self) -> list[str]:
        return [it.id for it in self._items]

    def order_index(self, intervention_id: str) -> int:
        return self.ids.index(intervention_id)


@dataclass(frozen=True)
class SurveyTally:
    """Yes/total feasibility counts for one (context, intervention) pair."""

    context: ActivityContext
    intervention_id: str
    yes: int
    total: int

    def __post_init__(self):
        if self.total <= 0:
            raise PriorError(f"total must be positive, got {self.total}")
        if not 0 <= self.yes <= self.total:
            raise PriorError(f"yes={self.yes} outside [0, total={self.total}]")


@dataclass(frozen=True)
class PriorEntry:
    """Feasibility probability for one (context, intervention) pair.

    ``probability`` is full precision after cap adjustment; ``reported``
    rounds to 3 decimals for display/export. ``excluded`` entries are never
    offered as arms.
    """

    probability: float
    excluded: bool

    @property
    def reported(self) -> float:
        return round(self.probability, 3)


class PriorMatrix:
    """Context x intervention feasibility probabilities with exclusion flags."""

    def __init__(
        self,
        entries: Mapping[tuple[ActivityContext, str], PriorEntry],
        catalog: InterventionCatalog,
        threshold: float = DEFAULT_EXCLUSION_THRESHOLD,
        cap_adjustment: float = DEFAULT_CAP_ADJUSTMENT,
    ):
        self.entries = dict(entries)
        self.catalog = catalog
        self.threshold = threshold
        self.cap_adjustment = cap_adjustment

    @property
    def contexts(self) -> list[ActivityContext]:
        return sorted({ctx for ctx, _ in self.entries}, key=list(ActivityContext).index)

    def entry(self, context: ActivityContext, intervention_id: str) -> PriorEntry:
        return self.entries[(context, intervention_id)]

    def probability(self, context: ActivityContext, intervention_id: str) -> float:
        return self.entries[(context, intervention_id)].probability

    def validate(self) -> None:
        """Check the structural invariants; raises PriorError on violation."""
        for (ctx, iid), e in self.entries.items():
            if iid not in self.catalog:
                raise PriorError(f"entry references unknown intervention {iid!r}")
            if e.excluded != (e.probability < self.threshold):
                raise PriorError(
                    f"exclusion flag inconsistent for ({ctx.value}, {iid}): "
                    f"p={e.probability}, threshold={self.threshold}"
                )
            if not e.excluded and e.probability > 1 - self.cap_adjustment + 1e-12:
                raise PriorError(
                    f"included probability above cap for ({ctx.value}, {iid}): {e.probability}"
                )
        for ctx in self.contexts:
            eligible_arms(self, ctx)  # raises when a context keeps no arm

    def to_table(self) -> dict:
        """Export as rows = interventions, columns = contexts."""
        contexts = self.contexts
        rows = []
        for it in self.catalog:
            cells = {}
            for ctx in contexts:
                e = self.entries.get((ctx, it.id))
                if e is not None:
                    cells[ctx.value] = {"p": e.reported, "excluded": e.excluded}
            rows.append({"intervention_id": it.id, "cells": cells})
        return {
            "exclusion_threshold": self.threshold,
            "cap_adjustment": self.cap_adjustment,
            "contexts": [c.value for c in contexts],
            "rows": rows,
        }


def _data_text(name: str) -> str:
    return resources.files("jitai").joinpath("data", name).read_text()


def load_catalog(source: str | Path | dict | None = None) -> InterventionCatalog:
    """Load an intervention catalog from a JSON document.

    ``source`` may be a path, an already-parsed dict, or None for the shipped
    default (the 16 interventions from the feasibility survey).
    """
    if source is None:
        doc = json.loads(_data_text("catalog.json"))
    elif isinstance(source, dict):
        doc = source
    else:
        doc = json.loads(Path(source).read_text())
    records = doc.get("interventions", []) if isinstance(doc, dict) else doc
    if not records:
        raise CatalogError("catalog document contains no interventions")
    interventions = []
    for rec in records:
        try:
            category = Category(rec["category"])
        except ValueError:
            raise CatalogError(f"unknown category: {rec.get('category')!r}") from None
        except (KeyError, TypeError):
            raise CatalogError(f"malformed catalog record: {rec!r}") from None
        interventions.append(Intervention(id=rec["id"], name=rec["name"], category=category))
    return InterventionCatalog(interventions)


def load_prior_table(
    source: str | Path | dict | None = None,
    catalog: InterventionCatalog | None = None,
) -> PriorMatrix:
    """Load a prior matrix fixture (rows = interventions, columns = contexts).

    The shipped default carries the published survey table verbatim,
    including its printed cap values; see ``elicit_priors`` for the rule that
    regenerates probabilities from raw tallies.
    """
    if source is None:
        doc = json.loads(_data_text("prior_table.json"))
    elif isinstance(source, dict):
        doc = source
    else:
        doc = json.loads(Path(source).read_text())
    catalog = catalog or load_catalog()
    entries: dict[tuple[ActivityContext, str], PriorEntry] = {}
    for row in doc["rows"]:
        iid = row["intervention_id"]
        if iid not in catalog:
            raise PriorError(f"prior table references unknown intervention {iid!r}")
        for ctx_name, cell in row["cells"].items():
            ctx = ActivityContext(ctx_name)
            entries[(ctx, iid)] = PriorEntry(
                probability=float(cell["p"]), excluded=bool(cell["excluded"])
            )
    return PriorMatrix(
        entries,
        catalog,
        threshold=float(doc.get("exclusion_threshold", DEFAULT_EXCLUSION_THRESHOLD)),
        cap_adjustment=float(doc.get("cap_adjustment", DEFAULT_CAP_ADJUSTMENT)),
    )


def load_response_counts() -> dict:
    """Shipped filled/missed notification counts per mapped sensor stream."""
    return json.loads(_data_text("response_counts.json"))


def elicit_priors(
    tallies: Iterable[SurveyTally],
    catalog: InterventionCatalog | None = None,
    threshold: float = DEFAULT_EXCLUSION_THRESHOLD,
    cap_adjustment: float = DEFAULT_CAP_ADJUSTMENT,
) -> PriorMatrix:
    """Turn survey yes/total tallies into a prior matrix.

    probability = yes/total at full precision, capped at 1 - cap_adjustment
    so that no arm starts certain; entries below ``threshold`` are flagged
    excluded. Every context present must keep at least one included arm.
    """
    catalog = catalog or load_catalog()
    entries: dict[tuple[ActivityContext, str], PriorEntry] = {}
    for t in tallies:
        key = (t.context, t.intervention_id)
        if key in entries:
            raise PriorError(
                f"duplicate tally for ({t.context.value}, {t.intervention_id})"
            )
        if t.intervention_id not in catalog:
            raise PriorError(f"tally references unknown intervention {t.intervention_id!r}")
        p = t.yes / t.total
        excluded = p < threshold
        if not excluded:
            p = min(p, 1.0 - cap_adjustment)
        entries[key] = PriorEntry(probability=p, excluded=excluded)

    contexts_seen = {ctx for ctx, _ in entries}
    for ctx in ActivityContext:
        if ctx not in contexts_seen:
            raise PriorError(f"no tallies for context {ctx.value!r}")

    matrix = PriorMatrix(entries, catalog, threshold=threshold, cap_adjustment=cap_adjustment)
    for ctx in contexts_seen:
        eligible_arms(matrix, ctx)  # raises when a context keeps no arm
    return matrix


def eligible_arms(priors: PriorMatrix, context: ActivityContext) -> list[str]:
    """Included intervention ids for a context, in catalog order."""
    if context not in priors.contexts:
        raise PriorError(f"context {context.value!r} not present in prior matrix")
    arms = [
        it.id
        for it in priors.catalog
        if (context, it.id) in priors.entries and not priors.entries[(context, it.id)].excluded
    ]
    if not arms:
        raise PriorError(f"every intervention is excluded for context {context.value!r}")
    return arms


def map_reward(response: Response) -> float | None:
    """Reward for an answered prompt; None for a missed one."""
    return REWARDS.get(response)


def reconstruct_tallies(
    priors: PriorMatrix, respondents: int = DEFAULT_SURVEY_RESPONDENTS
) -> list[SurveyTally]:
    """Rebuild per-pair survey tallies as (round(p * n), n) from a published
    probability table. Lossy where the table prints values that no n-respondent
    proportion can produce (its cap-adjusted cells); exact everywhere else.
    """
    tallies = []
    for (ctx, iid), e in sorted(
        priors.entries.items(), key=lambda kv: (kv[0][0].value, kv[0][1])
    ):
        tallies.append(
            SurveyTally(
                context=ctx,
                intervention_id=iid,
                yes=round(e.probability * respondents),
                total=respondents,
            )
        )
    return tallies
