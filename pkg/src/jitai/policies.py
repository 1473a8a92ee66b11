"""Bandit policies: per-context Thompson Sampling over Beta posteriors, plus
the comparison baselines (random, round-robin, epsilon-greedy and its
decaying variant).

Beta draws use the gamma-ratio construction X/(X+Y) with X ~ Gamma(a, 1),
Y ~ Gamma(b, 1) on top of ``random.Random.gammavariate``, which is pure
Python and produces the same stream on every platform for a given seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .domain import ActivityContext, PriorMatrix, eligible_arms

#: Pseudo-observation weight of an informed prior; mirrors the size of the
#: feasibility survey panel. alpha/beta are floored so both stay positive.
DEFAULT_PRIOR_STRENGTH = 19.0
MIN_PSEUDO_COUNT = 0.05


class PolicyError(ValueError):
    pass


@dataclass
class ArmPosterior:
    """Beta(alpha, beta) belief over one arm's feasibility."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise PolicyError(f"Beta parameters must be positive: ({self.alpha}, {self.beta})")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


class PolicyKind(str, Enum):
    THOMPSON = "thompson"
    EPSILON_GREEDY = "epsilon_greedy"
    DECAYING_EPSILON = "decaying_epsilon"
    RANDOM = "random"
    UNIFORM_ROUND_ROBIN = "uniform_round_robin"


@dataclass(frozen=True)
class PolicySpec:
    """A policy choice plus its exploration parameters.

    epsilon is the exploration probability for epsilon-greedy; for the
    decaying variant it is the initial value and decays as
    epsilon / (1 + decay * t) with t the per-context decision count.
    """

    kind: PolicyKind = PolicyKind.THOMPSON
    epsilon: float = 0.1
    decay: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise PolicyError(f"epsilon must be in [0,1], got {self.epsilon}")
        if self.decay < 0.0:
            raise PolicyError(f"decay must be non-negative, got {self.decay}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind in (PolicyKind.EPSILON_GREEDY, PolicyKind.DECAYING_EPSILON):
            d["epsilon"] = self.epsilon
        if self.kind is PolicyKind.DECAYING_EPSILON:
            d["decay"] = self.decay
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PolicySpec":
        return cls(
            kind=PolicyKind(d["kind"]),
            epsilon=float(d.get("epsilon", 0.1)),
            decay=float(d.get("decay", 0.01)),
        )


ArmMap = dict[str, ArmPosterior]


def init_bandit(
    priors: PriorMatrix,
    context: ActivityContext,
    strength: float = DEFAULT_PRIOR_STRENGTH,
    informed: bool = True,
) -> ArmMap:
    """Fresh posteriors for a context's eligible arms, in catalog order.

    Informed: alpha = p * strength, beta = (1-p) * strength, floored at
    MIN_PSEUDO_COUNT. Uninformed: Beta(1, 1) for every arm, i.e. all
    interventions start equally likely.
    """
    if strength <= 0:
        raise PolicyError(f"prior strength must be positive, got {strength}")
    arms = eligible_arms(priors, context)
    if not arms:
        raise PolicyError(f"no eligible arms for context {context.value!r}")
    out: ArmMap = {}
    for arm_id in arms:
        if informed:
            p = priors.probability(context, arm_id)
            out[arm_id] = ArmPosterior(
                alpha=max(p * strength, MIN_PSEUDO_COUNT),
                beta=max((1.0 - p) * strength, MIN_PSEUDO_COUNT),
            )
        else:
            out[arm_id] = ArmPosterior(alpha=1.0, beta=1.0)
    return out


def beta_draw(rng: random.Random, alpha: float, beta: float) -> float:
    """One Beta(alpha, beta) sample via the gamma-ratio construction.

    Beta(1, 1) is uniform, so a single rng.random() call suffices there;
    all other shapes take two gammavariate draws.
    """
    if alpha == 1.0 and beta == 1.0:
        return rng.random()
    x = rng.gammavariate(alpha, 1.0)
    y = rng.gammavariate(beta, 1.0)
    if x + y == 0.0:  # both draws underflowed; fall back to the mean
        return alpha / (alpha + beta)
    return x / (x + y)


def thompson_select(arms: ArmMap, rng: random.Random) -> str:
    """Draw one posterior sample per arm and return the argmax arm id.

    Arms are visited in insertion (catalog) order, and exact ties keep the
    earlier arm, so the selection sequence is reproducible for a given seed.
    """
    if not arms:
        raise PolicyError("cannot select from an empty arm map")
    best_id = None
    best_draw = -1.0
    for arm_id, post in arms.items():
        theta = beta_draw(rng, post.alpha, post.beta)
        if theta > best_draw:
            best_draw = theta
            best_id = arm_id
    return best_id


def update_posterior(arms: ArmMap, arm_id: str, reward: float) -> ArmMap:
    """Apply one response: alpha += reward, beta += 1 - reward.

    The 0.5 reward splits its unit of evidence between success and failure,
    keeping alpha + beta growth at exactly 1 per answered prompt.
    """
    if arm_id not in arms:
        raise PolicyError(f"unknown arm id: {arm_id!r}")
    if not 0.0 <= reward <= 1.0:
        raise PolicyError(f"reward must be in [0,1], got {reward}")
    post = arms[arm_id]
    post.alpha += reward
    post.beta += 1.0 - reward
    return arms


def _greedy_arm(arms: ArmMap) -> str:
    best_id = None
    best_mean = -1.0
    for arm_id, post in arms.items():
        m = post.mean
        if m > best_mean:
            best_mean = m
            best_id = arm_id
    return best_id


def baseline_select(spec: PolicySpec, arms: ArmMap, t: int, rng: random.Random) -> str:
    """Select per the non-Thompson policies.

    Random draws i.i.d. uniform over arms; uniform round-robin cycles arms
    in catalog order by decision count t; the epsilon policies explore with
    probability epsilon (decayed for the decaying variant) and otherwise
    exploit the highest posterior mean.
    """
    if not arms:
        raise PolicyError("cannot select from an empty arm map")
    ids = list(arms.keys())
    if spec.kind is PolicyKind.RANDOM:
        return ids[rng.randrange(len(ids))]
    if spec.kind is PolicyKind.UNIFORM_ROUND_ROBIN:
        return ids[t % len(ids)]
    if spec.kind is PolicyKind.EPSILON_GREEDY:
        eps = spec.epsilon
    elif spec.kind is PolicyKind.DECAYING_EPSILON:
        eps = spec.epsilon / (1.0 + spec.decay * t)
    else:
        raise PolicyError(f"baseline_select does not handle {spec.kind}")
    if eps > 0.0 and rng.random() < eps:
        return ids[rng.randrange(len(ids))]
    return _greedy_arm(arms)


def select_arm(spec: PolicySpec, arms: ArmMap, t: int, rng: random.Random) -> str:
    """Dispatch to Thompson or the requested baseline."""
    if spec.kind is PolicyKind.THOMPSON:
        return thompson_select(arms, rng)
    return baseline_select(spec, arms, t, rng)


@dataclass
class ContextBandit:
    """Arm posteriors plus the selection count for one (user, context) pair."""

    arms: ArmMap
    decision_count: int = 0

    def select(self, spec: PolicySpec, rng: random.Random) -> str:
        arm_id = select_arm(spec, self.arms, self.decision_count, rng)
        self.decision_count += 1
        return arm_id

    def update(self, arm_id: str, reward: float) -> None:
        update_posterior(self.arms, arm_id, reward)


@dataclass
class BanditBank:
    """Lazily-initialized per-context bandits for one learning scope (a user,
    or the shared pool in pooled mode)."""

    priors: PriorMatrix
    strength: float = DEFAULT_PRIOR_STRENGTH
    informed: bool = True
    bandits: dict[ActivityContext, ContextBandit] = field(default_factory=dict)

    def bandit(self, context: ActivityContext) -> ContextBandit:
        if context not in self.bandits:
            self.bandits[context] = ContextBandit(
                arms=init_bandit(self.priors, context, self.strength, self.informed)
            )
        return self.bandits[context]
