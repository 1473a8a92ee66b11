"""Event-sourced intervention engine.

Every state change appends one event; initial priors plus the full event
log reproduce the live bandit state exactly, because replay applies the
logged arm/reward pairs in order with the same float operations as the live
path. Snapshots additionally carry the generator state so selection streams
continue across restarts.
"""

from __future__ import annotations

import json
import random
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from ..domain import (
    ActivityContext,
    InterventionCatalog,
    PriorMatrix,
    PROMPT_TEXT,
    Response,
    SocialContext,
    map_reward,
)
from ..policies import ArmPosterior, BanditBank, ContextBandit
from .config import EngineConfig

SNAPSHOT_SCHEMA_VERSION = 1

POOLED_SCOPE = "__pooled__"


class EngineError(ValueError):
    pass


class SessionNotFoundError(EngineError):
    pass


class PendingConflictError(EngineError):
    pass


class NoPendingError(EngineError):
    pass


class SnapshotError(EngineError):
    pass


def _now() -> datetime:
    return datetime.now(timezone.utc)


def _iso(dt: datetime) -> str:
    return dt.isoformat()


@dataclass
class Pending:
    suggestion_id: str
    context: ActivityContext
    social: SocialContext
    arm: str
    suggested_at: datetime


@dataclass
class Session:
    session_id: str
    user_id: str
    created_at: datetime
    pending: Pending | None = None
    #: ack of the most recently resolved suggestion, kept so a duplicate
    #: submit with the same suggestion_id is answered without a second update
    last_ack: dict | None = None


@dataclass
class Suggestion:
    suggestion_id: str
    intervention_id: str
    name: str
    prompt: str
    suggested_at: datetime

    def to_dict(self) -> dict:
        return {
            "suggestion_id": self.suggestion_id,
            "intervention_id": self.intervention_id,
            "name": self.name,
            "prompt": self.prompt,
            "suggested_at": _iso(self.suggested_at),
        }


class InterventionEngine:
    """Holds per-scope bandit banks, sessions, and the append-only log."""

    def __init__(
        self,
        catalog: InterventionCatalog,
        priors: PriorMatrix,
        config: EngineConfig | None = None,
    ):
        self.catalog = catalog
        self.priors = priors
        self.config = config or EngineConfig()
        self.rng = random.Random(self.config.seed)
        self.banks: dict[str, BanditBank] = {}
        self.sessions: dict[str, Session] = {}
        self.events: list[dict] = []
        self._seq = 0
        self._log_path = Path(self.config.event_log) if self.config.event_log else None

    # -- internals ---------------------------------------------------------

    def _scope(self, user_id: str) -> str:
        return POOLED_SCOPE if self.config.bandit_scope == "pooled" else user_id

    def _bank(self, user_id: str) -> BanditBank:
        scope = self._scope(user_id)
        if scope not in self.banks:
            self.banks[scope] = BanditBank(
                self.priors,
                strength=self.config.prior_strength,
                informed=self.config.informed_priors,
            )
        return self.banks[scope]

    def _session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise SessionNotFoundError(f"unknown session: {session_id!r}") from None

    def _append(self, event: dict, at: datetime) -> None:
        self._seq += 1
        record = {"seq": self._seq, "at": _iso(at), "seed": self.config.seed, **event}
        self.events.append(record)
        if self._log_path is not None:
            with self._log_path.open("a") as fh:
                fh.write(json.dumps(record) + "\n")

    # -- operations --------------------------------------------------------

    def create_session(self, user_id: str, now: datetime | None = None) -> Session:
        if not user_id or not isinstance(user_id, str):
            raise EngineError("user_id is required")
        now = now or _now()
        session = Session(
            session_id=uuid.uuid4().hex, user_id=user_id, created_at=now
        )
        self.sessions[session.session_id] = session
        self._bank(user_id)  # lazy init so state is visible immediately
        self._append(
            {"event": "session_created", "session_id": session.session_id, "user_id": user_id},
            now,
        )
        return session

    def submit_context(
        self,
        session_id: str,
        activity: ActivityContext,
        social: SocialContext,
        now: datetime | None = None,
    ) -> Suggestion:
        session = self._session(session_id)
        now = now or _now()
        if session.pending is not None:
            # a stale pending expires in place of blocking the next prompt
            if not self._expired(session.pending, now):
                raise PendingConflictError(
                    f"session {session_id} already has a pending suggestion"
                )
            self.expire_pending(session_id, now=now)
        bandit = self._bank(session.user_id).bandit(activity)
        arm_id = bandit.select(self.config.policy, self.rng)
        suggestion = Suggestion(
            suggestion_id=uuid.uuid4().hex,
            intervention_id=arm_id,
            name=self.catalog.get(arm_id).name,
            prompt=PROMPT_TEXT,
            suggested_at=now,
        )
        session.pending = Pending(
            suggestion_id=suggestion.suggestion_id,
            context=activity,
            social=social,
            arm=arm_id,
            suggested_at=now,
        )
        self._append(
            {
                "event": "context_submitted",
                "session_id": session_id,
                "user_id": session.user_id,
                "activity": activity.value,
                "social": social.value,
                "suggestion_id": suggestion.suggestion_id,
                "arm": arm_id,
            },
            now,
        )
        return suggestion

    def submit_response(
        self,
        session_id: str,
        response: Response,
        suggestion_id: str | None = None,
        now: datetime | None = None,
    ) -> dict:
        session = self._session(session_id)
        now = now or _now()
        if response not in (Response.YES, Response.NO, Response.NOT_FEASIBLE_NOW):
            raise EngineError(f"unknown response token: {response!r}")
        if session.pending is None:
            # duplicate submit for an already-resolved suggestion is answered
            # idempotently; anything else is a state error
            if (
                suggestion_id is not None
                and session.last_ack is not None
                and session.last_ack["suggestion_id"] == suggestion_id
            ):
                return {**session.last_ack, "idempotent": True}
            raise NoPendingError(f"session {session_id} has no pending suggestion")
        pending = session.pending
        if suggestion_id is not None and suggestion_id != pending.suggestion_id:
            raise EngineError("response references a different suggestion")
        if self._expired(pending, now):
            self.expire_pending(session_id, now=now)
            raise NoPendingError("pending suggestion expired; response rejected")
        reward = map_reward(response)
        bandit = self._bank(session.user_id).bandit(pending.context)
        bandit.update(pending.arm, reward)
        post = bandit.arms[pending.arm]
        ack = {
            "suggestion_id": pending.suggestion_id,
            "intervention_id": pending.arm,
            "response": response.value,
            "reward": reward,
            "posterior_mean": post.mean,
            "alpha": post.alpha,
            "beta": post.beta,
        }
        session.pending = None
        session.last_ack = ack
        self._append(
            {
                "event": "response_submitted",
                "session_id": session_id,
                "user_id": session.user_id,
                "activity": pending.context.value,
                "suggestion_id": pending.suggestion_id,
                "arm": pending.arm,
                "response": response.value,
                "reward": reward,
            },
            now,
        )
        return {**ack, "idempotent": False}

    def _expired(self, pending: Pending, now: datetime) -> bool:
        timeout = timedelta(minutes=self.config.pending_timeout_minutes)
        return now - pending.suggested_at > timeout

    def expire_pending(self, session_id: str, now: datetime | None = None) -> dict | None:
        """Log a missed prompt for an over-age pending; no posterior change."""
        session = self._session(session_id)
        now = now or _now()
        if session.pending is None or not self._expired(session.pending, now):
            return None
        pending = session.pending
        session.pending = None
        record = {
            "event": "pending_expired",
            "session_id": session_id,
            "user_id": session.user_id,
            "activity": pending.context.value,
            "suggestion_id": pending.suggestion_id,
            "arm": pending.arm,
            "response": Response.MISSED.value,
        }
        self._append(record, now)
        return record

    def session_state(self, session_id: str) -> dict:
        session = self._session(session_id)
        bank = self._bank(session.user_id)
        contexts = {}
        for ctx, bandit in sorted(bank.bandits.items(), key=lambda kv: kv[0].value):
            contexts[ctx.value] = {
                "decision_count": bandit.decision_count,
                "arms": [
                    {
                        "id": arm_id,
                        "name": self.catalog.get(arm_id).name,
                        "alpha": post.alpha,
                        "beta": post.beta,
                        "mean": post.mean,
                    }
                    for arm_id, post in bandit.arms.items()
                ],
            }
        pending = None
        if session.pending is not None:
            pending = {
                "suggestion_id": session.pending.suggestion_id,
                "context": session.pending.context.value,
                "social": session.pending.social.value,
                "intervention_id": session.pending.arm,
                "suggested_at": _iso(session.pending.suggested_at),
            }
        return {
            "session_id": session_id,
            "user_id": session.user_id,
            "pending": pending,
            "contexts": contexts,
        }

    # -- persistence -------------------------------------------------------

    def snapshot(self) -> dict:
        rng_version, rng_internal, rng_gauss = self.rng.getstate()
        return {
            "schema_version": SNAPSHOT_SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "seq": self._seq,
            "rng_state": {
                "version": rng_version,
                "internal": list(rng_internal),
                "gauss_next": rng_gauss,
            },
            "banks": {
                scope: {
                    ctx.value: {
                        "decision_count": bandit.decision_count,
                        "arms": [
                            {"id": a, "alpha": p.alpha, "beta": p.beta}
                            for a, p in bandit.arms.items()
                        ],
                    }
                    for ctx, bandit in bank.bandits.items()
                }
                for scope, bank in self.banks.items()
            },
            "sessions": [
                {
                    "session_id": s.session_id,
                    "user_id": s.user_id,
                    "created_at": _iso(s.created_at),
                    "pending": None
                    if s.pending is None
                    else {
                        "suggestion_id": s.pending.suggestion_id,
                        "context": s.pending.context.value,
                        "social": s.pending.social.value,
                        "arm": s.pending.arm,
                        "suggested_at": _iso(s.pending.suggested_at),
                    },
                }
                for s in self.sessions.values()
            ],
        }

    def restore(self, snapshot: dict) -> None:
        version = snapshot.get("schema_version")
        if version != SNAPSHOT_SCHEMA_VERSION:
            raise SnapshotError(
                f"snapshot schema version {version!r} != {SNAPSHOT_SCHEMA_VERSION}"
            )
        try:
            self.config = EngineConfig.from_dict(snapshot["config"])
            rng_state = snapshot["rng_state"]
            self.rng.setstate(
                (rng_state["version"], tuple(rng_state["internal"]), rng_state["gauss_next"])
            )
            self.banks = {}
            for scope, contexts in snapshot["banks"].items():
                bank = BanditBank(
                    self.priors,
                    strength=self.config.prior_strength,
                    informed=self.config.informed_priors,
                )
                for ctx_name, doc in contexts.items():
                    bank.bandits[ActivityContext(ctx_name)] = ContextBandit(
                        arms={
                            a["id"]: ArmPosterior(alpha=a["alpha"], beta=a["beta"])
                            for a in doc["arms"]
                        },
                        decision_count=int(doc["decision_count"]),
                    )
                self.banks[scope] = bank
            self.sessions = {}
            for s in snapshot["sessions"]:
                pending = None
                if s["pending"] is not None:
                    p = s["pending"]
                    pending = Pending(
                        suggestion_id=p["suggestion_id"],
                        context=ActivityContext(p["context"]),
                        social=SocialContext(p["social"]),
                        arm=p["arm"],
                        suggested_at=datetime.fromisoformat(p["suggested_at"]),
                    )
                self.sessions[s["session_id"]] = Session(
                    session_id=s["session_id"],
                    user_id=s["user_id"],
                    created_at=datetime.fromisoformat(s["created_at"]),
                    pending=pending,
                )
            self._seq = int(snapshot["seq"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SnapshotError):
                raise
            raise SnapshotError(f"corrupt snapshot: {exc}") from exc

    def replay(self, events: list[dict]) -> None:
        """Re-apply logged events. Selection is not re-run: the logged arm and
        reward drive the same posterior arithmetic as the live path, so the
        resulting parameters are byte-equal."""
        for event in events:
            kind = event.get("event")
            at = datetime.fromisoformat(event["at"])
            if kind == "session_created":
                session = Session(
                    session_id=event["session_id"],
                    user_id=event["user_id"],
                    created_at=at,
                )
                self.sessions[session.session_id] = session
                self._bank(session.user_id)
            elif kind == "context_submitted":
                session = self._session(event["session_id"])
                bandit = self._bank(event["user_id"]).bandit(
                    ActivityContext(event["activity"])
                )
                bandit.decision_count += 1
                session.pending = Pending(
                    suggestion_id=event["suggestion_id"],
                    context=ActivityContext(event["activity"]),
                    social=SocialContext(event["social"]),
                    arm=event["arm"],
                    suggested_at=at,
                )
            elif kind == "response_submitted":
                session = self._session(event["session_id"])
                bandit = self._bank(event["user_id"]).bandit(
                    ActivityContext(event["activity"])
                )
                bandit.update(event["arm"], float(event["reward"]))
                session.pending = None
            elif kind == "pending_expired":
                session = self._session(event["session_id"])
                session.pending = None
            else:
                raise EngineError(f"unknown event kind in log: {kind!r}")
            self._seq = max(self._seq, int(event["seq"]))


def read_event_log(path: str | Path) -> list[dict]:
    events = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(json.loads(line))
    return events
