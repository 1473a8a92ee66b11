"""Synthetic users and decision-point scheduling for policy comparison.

A simulated user is a truth table of per-(context, arm) yes-probabilities
plus a response profile. The simple profile answers Yes/No only, so a
chosen arm's expected reward equals its truth probability and regret has an
exact oracle; the ternary profile splits the yes mass with "not feasible
right now"; the with-misses profile drops prompts entirely at some rate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import time
from enum import Enum

from .domain import (
    ActivityContext,
    PriorMatrix,
    Response,
    SocialContext,
    map_reward,
)
from .policies import (
    DEFAULT_PRIOR_STRENGTH,
    BanditBank,
    PolicySpec,
)

#: Hourly prompts at minute 55 from 07:55 through 19:55 — 13 per day.
DEFAULT_SCHEDULE: tuple[time, ...] = tuple(time(hour=h, minute=55) for h in range(7, 20))


class SimulationError(ValueError):
    pass


class ProfileKind(str, Enum):
    SIMPLE = "simple"
    TERNARY = "ternary"
    WITH_MISSES = "with_misses"


@dataclass(frozen=True)
class ResponseProfile:
    kind: ProfileKind = ProfileKind.SIMPLE
    #: ternary only: share of the yes mass answered "not feasible right now"
    w_not_feasible: float = 0.0
    #: with_misses only: probability a prompt is never answered
    p_miss: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.w_not_feasible <= 1.0:
            raise SimulationError(f"w_not_feasible must be in [0,1]: {self.w_not_feasible}")
        if not 0.0 <= self.p_miss <= 1.0:
            raise SimulationError(f"p_miss must be in [0,1]: {self.p_miss}")


@dataclass
class UserModel:
    """Ground truth for a synthetic responder."""

    truth: dict[tuple[ActivityContext, str], float]
    profile: ResponseProfile
    context_weights: dict[ActivityContext, float]
    social_weights: dict[SocialContext, float]

    def best_probability(self, context: ActivityContext) -> float:
        vals = [p for (ctx, _), p in self.truth.items() if ctx is context]
        if not vals:
            raise SimulationError(f"truth table has no arms for {context.value!r}")
        return max(vals)


def _normalized(weights: dict, label: str) -> dict:
    total = sum(weights.values())
    if abs(total - 1.0) > 1e-9:
        raise SimulationError(f"{label} weights sum to {total}, expected 1")
    if any(w < 0 for w in weights.values()):
        raise SimulationError(f"{label} weights must be non-negative")
    return dict(weights)


def build_user_model(
    priors: PriorMatrix,
    profile: ResponseProfile = ResponseProfile(),
    context_weights: dict[ActivityContext, float] | None = None,
    social_weights: dict[SocialContext, float] | None = None,
    truth: dict[tuple[ActivityContext, str], float] | None = None,
) -> UserModel:
    """Default truth is the included prior probabilities themselves; a custom
    truth table may be injected as long as it covers every eligible arm."""
    if truth is None:
        truth = {
            key: e.probability for key, e in priors.entries.items() if not e.excluded
        }
    else:
        for key, e in priors.entries.items():
            if not e.excluded and key not in truth:
                raise SimulationError(f"injected truth missing eligible arm {key}")
        truth = dict(truth)
    if context_weights is None:
        contexts = priors.contexts
        context_weights = {ctx: 1.0 / len(contexts) for ctx in contexts}
    if social_weights is None:
        social_weights = {s: 1.0 / 3.0 for s in SocialContext}
    return UserModel(
        truth=truth,
        profile=profile,
        context_weights=_normalized(context_weights, "context"),
        social_weights=_normalized(social_weights, "social"),
    )


def sample_response(
    model: UserModel, context: ActivityContext, arm_id: str, rng: random.Random
) -> Response:
    """Draw one response for a suggested arm under the model's profile."""
    try:
        p_yes = model.truth[(context, arm_id)]
    except KeyError:
        raise SimulationError(f"arm {arm_id!r} not eligible in {context.value!r}") from None
    prof = model.profile
    if prof.kind is ProfileKind.WITH_MISSES:
        if rng.random() < prof.p_miss:
            return Response.MISSED
        return Response.YES if rng.random() < p_yes else Response.NO
    if prof.kind is ProfileKind.TERNARY:
        u = rng.random()
        if u < 1.0 - p_yes:
            return Response.NO
        if u < 1.0 - p_yes + p_yes * (1.0 - prof.w_not_feasible):
            return Response.YES
        return Response.NOT_FEASIBLE_NOW
    return Response.YES if rng.random() < p_yes else Response.NO


def _weighted_choice(rng: random.Random, weights: dict) -> object:
    u = rng.random()
    acc = 0.0
    last = None
    for key, w in weights.items():
        acc += w
        last = key
        if u < acc:
            return key
    return last  # guard against accumulated rounding


@dataclass(frozen=True)
class SimConfig:
    days: int
    users: int = 1
    seed: int = 0
    policy: PolicySpec = PolicySpec()
    informed_priors: bool = True
    prior_strength: float = DEFAULT_PRIOR_STRENGTH
    schedule: tuple[time, ...] = DEFAULT_SCHEDULE

    def __post_init__(self):
        if self.days <= 0 or self.users <= 0:
            raise SimulationError("days and users must be positive")
        if not self.schedule:
            raise SimulationError("schedule is empty")
        if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise SimulationError("schedule must be strictly increasing within a day")

    @property
    def total_points(self) -> int:
        return self.days * len(self.schedule) * self.users

    def to_dict(self) -> dict:
        return {
            "days": self.days,
            "users": self.users,
            "seed": self.seed,
            "policy": self.policy.to_dict(),
            "priors_mode": "informed" if self.informed_priors else "uninformed",
            "prior_strength": self.prior_strength,
            "schedule": [t.strftime("%H:%M") for t in self.schedule],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        kwargs = {
            "days": int(d["days"]),
            "users": int(d.get("users", 1)),
            "seed": int(d.get("seed", 0)),
        }
        if "policy" in d:
            kwargs["policy"] = PolicySpec.from_dict(d["policy"])
        mode = d.get("priors_mode", "informed")
        if mode not in ("informed", "uninformed"):
            raise SimulationError(f"unknown priors_mode: {mode!r}")
        kwargs["informed_priors"] = mode == "informed"
        if "prior_strength" in d:
            kwargs["prior_strength"] = float(d["prior_strength"])
        if "schedule" in d:
            kwargs["schedule"] = tuple(
                time(*map(int, s.split(":"))) for s in d["schedule"]
            )
        return cls(**kwargs)


@dataclass(frozen=True)
class DecisionRecord:
    t: int
    user: int
    context: ActivityContext
    social: SocialContext
    arm: str
    response: Response
    reward: float | None

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "user": self.user,
            "context": self.context.value,
            "social": self.social.value,
            "arm": self.arm,
            "response": self.response.value,
            "reward": self.reward,
        }


@dataclass
class TrajectorySummary:
    average_reward: float
    per_context_average: dict[ActivityContext, float]
    cumulative_regret: list[float] | None

    def to_dict(self) -> dict:
        return {
            "average_reward": self.average_reward,
            "per_context_average": {
                ctx.value: avg for ctx, avg in self.per_context_average.items()
            },
            "final_regret": self.cumulative_regret[-1] if self.cumulative_regret else None,
        }


@dataclass
class Trajectory:
    records: list[DecisionRecord]
    config: SimConfig
    summary: TrajectorySummary = field(init=False)
    _model: UserModel = None

    def __post_init__(self):
        rewards = [r.reward for r in self.records if r.reward is not None]
        avg = sum(rewards) / len(rewards) if rewards else 0.0
        per_ctx: dict[ActivityContext, list[float]] = {}
        for rec in self.records:
            if rec.reward is not None:
                per_ctx.setdefault(rec.context, []).append(rec.reward)
        regret = None
        if self._model is not None and self._model.profile.kind is ProfileKind.SIMPLE:
            regret = compute_regret_records(self.records, self._model)
        self.summary = TrajectorySummary(
            average_reward=avg,
            per_context_average={ctx: sum(v) / len(v) for ctx, v in per_ctx.items()},
            cumulative_regret=regret,
        )


def run_simulation(config: SimConfig, model: UserModel, priors: PriorMatrix) -> Trajectory:
    """Roll the configured policy over the decision-point grid.

    Per point: sample activity and social context, select an arm on that
    user's per-context bandit, sample the response, and apply the reward
    (missed prompts leave the posterior untouched). One seeded generator
    drives every draw, so trajectories are bit-reproducible.
    """
    rng = random.Random(config.seed)
    banks = [
        BanditBank(priors, strength=config.prior_strength, informed=config.informed_priors)
        for _ in range(config.users)
    ]
    records: list[DecisionRecord] = []
    t = 0
    for _day in range(config.days):
        for _slot in config.schedule:
            for user in range(config.users):
                context = _weighted_choice(rng, model.context_weights)
                social = _weighted_choice(rng, model.social_weights)
                bandit = banks[user].bandit(context)
                arm = bandit.select(config.policy, rng)
                response = sample_response(model, context, arm, rng)
                reward = map_reward(response)
                if reward is not None:
                    bandit.update(arm, reward)
                records.append(
                    DecisionRecord(
                        t=t, user=user, context=context, social=social,
                        arm=arm, response=response, reward=reward,
                    )
                )
                t += 1
    return Trajectory(records=records, config=config, _model=model)


def compute_regret_records(
    records: list[DecisionRecord], model: UserModel
) -> list[float]:
    """Cumulative oracle gap: sum over steps of (best truth in the step's
    context) - (truth of the chosen arm). Only defined for the simple
    profile, where expected reward equals the truth probability."""
    if model.profile.kind is not ProfileKind.SIMPLE:
        raise SimulationError(
            "regret is defined only for the simple response profile"
        )
    best: dict[ActivityContext, float] = {}
    curve: list[float] = []
    acc = 0.0
    for rec in records:
        if rec.context not in best:
            best[rec.context] = model.best_probability(rec.context)
        acc += best[rec.context] - model.truth[(rec.context, rec.arm)]
        curve.append(acc)
    return curve


def compute_regret(trajectory: Trajectory, model: UserModel) -> list[float]:
    return compute_regret_records(trajectory.records, model)
