"""Engine configuration from file plus environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..policies import DEFAULT_PRIOR_STRENGTH, PolicyKind, PolicySpec

DEFAULT_PENDING_TIMEOUT_MINUTES = 60.0

BANDIT_SCOPES = ("per_user", "pooled")

#: environment variables recognized on top of the config file
ENV_PREFIX = "JITAI_"


@dataclass
class EngineConfig:
    policy: PolicySpec = field(default_factory=PolicySpec)
    informed_priors: bool = True
    prior_strength: float = DEFAULT_PRIOR_STRENGTH
    seed: int = 0
    pending_timeout_minutes: float = DEFAULT_PENDING_TIMEOUT_MINUTES
    bandit_scope: str = "per_user"
    event_log: str | None = None

    def __post_init__(self):
        if self.bandit_scope not in BANDIT_SCOPES:
            raise ValueError(f"bandit_scope must be one of {BANDIT_SCOPES}")
        if self.pending_timeout_minutes <= 0:
            raise ValueError("pending_timeout_minutes must be positive")

    def to_dict(self) -> dict:
        return {
            "policy": self.policy.to_dict(),
            "priors_mode": "informed" if self.informed_priors else "uninformed",
            "prior_strength": self.prior_strength,
            "seed": self.seed,
            "pending_timeout_minutes": self.pending_timeout_minutes,
            "bandit_scope": self.bandit_scope,
            "event_log": self.event_log,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        kwargs: dict = {}
        if "policy" in d:
            kwargs["policy"] = PolicySpec.from_dict(d["policy"])
        if "priors_mode" in d:
            mode = d["priors_mode"]
            if mode not in ("informed", "uninformed"):
                raise ValueError(f"unknown priors_mode: {mode!r}")
            kwargs["informed_priors"] = mode == "informed"
        for key in ("prior_strength", "pending_timeout_minutes"):
            if key in d:
                kwargs[key] = float(d[key])
        if "seed" in d:
            kwargs["seed"] = int(d["seed"])
        if "bandit_scope" in d:
            kwargs["bandit_scope"] = d["bandit_scope"]
        if "event_log" in d:
            kwargs["event_log"] = d["event_log"]
        return cls(**kwargs)


def load_engine_config(
    path: str | Path | None = None, env: dict | None = None
) -> EngineConfig:
    """Read the config file (if any), then apply JITAI_* overrides."""
    doc: dict = {}
    if path is not None:
        doc = json.loads(Path(path).read_text())
    env = os.environ if env is None else env

    def override(name: str):
        return env.get(ENV_PREFIX + name)

    if override("POLICY"):
        doc.setdefault("policy", {})["kind"] = PolicyKind(override("POLICY")).value
    if override("EPSILON"):
        doc.setdefault("policy", {"kind": "epsilon_greedy"})["epsilon"] = float(override("EPSILON"))
    if override("PRIORS_MODE"):
        doc["priors_mode"] = override("PRIORS_MODE")
    if override("SEED"):
        doc["seed"] = int(override("SEED"))
    if override("TIMEOUT_MINUTES"):
        doc["pending_timeout_minutes"] = float(override("TIMEOUT_MINUTES"))
    if override("BANDIT_SCOPE"):
        doc["bandit_scope"] = override("BANDIT_SCOPE")
    if override("EVENT_LOG"):
        doc["event_log"] = override("EVENT_LOG")
    return EngineConfig.from_dict(doc)
