"""Users, assessment sessions and their durable event log.

One assessment run ("experiment") is a session: created open, filled with
per-leaf grades (last write wins while open), then finalized, which computes
and freezes the strict aggregation result. Repeat experiments by the same
user form a trend, the record that shows whether readiness scores
actually climb between attempts.

Persistence is a newline-delimited JSON event log, append-only, fsynced
before a mutation returns. Replaying the log through the same apply path as
live mutations reconstructs the exact visible state, so crash recovery and
normal startup are the same code. A torn trailing record (crash mid-append)
is dropped (that write was never acknowledged), but corruption followed by
valid records means the file was damaged, and replay refuses it, reporting
the last good byte offset.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Optional

from .reporting import result_to_doc
from .scoring import (
    AggregateResult,
    AnswerSet,
    GradeOutOfRangeError,
    UnknownLeafError,
    aggregate,
)
from .taxonomy import FrameworkDefinition

EVENT_TYPES = ("user_created", "session_created", "answer_submitted", "session_finalized")


class StoreError(Exception):
    """Base for store lookup/state errors."""


class UnknownUserError(StoreError):
    def __init__(self, user_id: str):
        self.user_id = user_id
        super().__init__(f"no such user: {user_id}")


class UnknownFrameworkError(StoreError):
    def __init__(self, framework_id: str):
        self.framework_id = framework_id
        super().__init__(f"no such framework: {framework_id}")


class UnknownSessionError(StoreError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"no such session: {session_id}")


class SessionFinalizedError(StoreError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"session already finalized: {session_id}")


class SessionNotFinalizedError(StoreError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"session not finalized yet: {session_id}")


class DuplicateUserError(StoreError):
    def __init__(self, user_id: str):
        self.user_id = user_id
        super().__init__(f"user already exists: {user_id}")


class LogCorruptError(Exception):
    """Interior log damage; ``last_good_offset`` is where the intact prefix ends."""

    def __init__(self, message: str, last_good_offset: int):
        self.last_good_offset = last_good_offset
        super().__init__(f"{message} (last good offset: {last_good_offset})")


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    display_name: str
    created_at: str


@dataclass(frozen=True)
class SessionRecord:
    """Snapshot of a session; the store holds the mutable truth."""

    session_id: str
    user_id: str
    framework_id: str
    status: str  # "open" | "finalized"
    answers: dict[str, int]
    started_at: str
    finalized_at: Optional[str] = None
    final_result: Optional[AggregateResult] = None


@dataclass(frozen=True)
class TrendPoint:
    session_id: str
    finalized_at: str
    overall_achievement: float


@dataclass(frozen=True)
class TrendReport:
    user_id: str
    points: tuple[TrendPoint, ...]
    deltas: tuple[float, ...]


@dataclass
class _SessionState:
    session_id: str
    user_id: str
    framework_id: str
    started_at: str
    answers: dict[str, int] = field(default_factory=dict)
    finalized_at: Optional[str] = None
    final_result: Optional[AggregateResult] = None

    @property
    def finalized(self) -> bool:
        return self.finalized_at is not None

    def snapshot(self) -> SessionRecord:
        return SessionRecord(
            session_id=self.session_id,
            user_id=self.user_id,
            framework_id=self.framework_id,
            status="finalized" if self.finalized else "open",
            answers=dict(self.answers),
            started_at=self.started_at,
            finalized_at=self.finalized_at,
            final_result=self.final_result,
        )


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class EventLog:
    """Append-only JSONL file of store events."""

    def __init__(self, path: Path):
        self.path = path
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")

    def append(self, event: dict) -> None:
        """Write one event and make it durable before returning."""
        line = json.dumps(event, ensure_ascii=False, separators=(",", ":"))
        self._fh.write(line + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()

    @staticmethod
    def read_events(path: Path) -> tuple[list[dict], int]:
        """Parse the log into (events, intact_length).

        ``intact_length`` is the byte offset right after the last good record.
        A torn trailing record (crash mid-append) parses as damage at the very
        end and is simply not included; damage followed by valid records means
        the file itself was harmed, and that raises LogCorruptError.
        """
        events: list[dict] = []
        if not path.exists():
            return events, 0
        raw = path.read_bytes()
        offset = 0
        good_offset = 0
        bad_at: Optional[int] = None
        for chunk in raw.split(b"\n"):
            chunk_end = offset + len(chunk) + 1  # +1 for the newline
            if chunk:
                try:
                    event = json.loads(chunk.decode("utf-8"))
                    if not isinstance(event, dict) or event.get("event_type") not in EVENT_TYPES:
                        raise ValueError("not an event record")
                except (ValueError, UnicodeDecodeError):
                    if bad_at is None:
                        bad_at = offset
                else:
                    if bad_at is not None:
                        raise LogCorruptError(
                            f"{path}: damaged record at byte {bad_at}", last_good_offset=good_offset
                        )
                    events.append(event)
                    good_offset = min(chunk_end, len(raw))
            offset = chunk_end
        return events, good_offset


class AssessmentStore:
    """Single-writer store of users and sessions over a framework registry.

    All mutations are serialized by one lock and appended to the event log
    before they return; reads hand out immutable snapshots. Frameworks are
    registered in memory (they come from bundled data or files, not the log).
    """

    def __init__(
        self,
        data_dir: Path,
        frameworks: Iterable[FrameworkDefinition] = (),
        clock: Callable[[], datetime] = _utcnow,
    ):
        self._lock = threading.Lock()
        self._clock = clock
        self._frameworks: dict[str, FrameworkDefinition] = {}
        self._users: dict[str, UserRecord] = {}
        self._sessions: dict[str, _SessionState] = {}
        self._finalize_order: list[str] = []
        for definition in frameworks:
            self._frameworks[definition.id] = definition

        data_dir = Path(data_dir)
        log_path = data_dir / "events.log"
        events, intact_length = EventLog.read_events(log_path)
        for event in events:
            self._apply(event)
        if log_path.exists() and log_path.stat().st_size > intact_length:
            # Cut the torn tail before appending, or the next record would be
            # written onto the partial line and garble it.
            with open(log_path, "r+b") as fh:
                fh.truncate(intact_length)
        self._log = EventLog(log_path)

    # -- frameworks ---------------------------------------------------------

    def register_framework(self, definition: FrameworkDefinition) -> None:
        with self._lock:
            self._frameworks[definition.id] = definition

    def list_frameworks(self) -> list[FrameworkDefinition]:
        with self._lock:
            return list(self._frameworks.values())

    def get_framework(self, framework_id: str) -> FrameworkDefinition:
        with self._lock:
            try:
                return self._frameworks[framework_id]
            except KeyError:
                raise UnknownFrameworkError(framework_id) from None

    # -- mutations ----------------------------------------------------------

    def create_user(self, user_id: str, display_name: str) -> UserRecord:
        if not user_id:
            raise ValueError("user_id must be non-empty")
        with self._lock:
            self._commit(self._event("user_created", {"user_id": user_id, "display_name": display_name}))
            return self._users[user_id]

    def create_session(self, user_id: str, framework_id: str) -> SessionRecord:
        with self._lock:
            now = self._clock()
            session_id = f"s-{now.strftime('%Y%m%dT%H%M%S%f')}-{secrets.token_hex(3)}"
            self._commit(
                self._event(
                    "session_created",
                    {"session_id": session_id, "user_id": user_id, "framework_id": framework_id},
                    now=now,
                )
            )
            return self._sessions[session_id].snapshot()

    def submit_answer(self, session_id: str, leaf_id: str, grade: int) -> SessionRecord:
        with self._lock:
            self._commit(
                self._event(
                    "answer_submitted",
                    {"session_id": session_id, "leaf_id": leaf_id, "grade": grade},
                )
            )
            return self._sessions[session_id].snapshot()

    def finalize_session(self, session_id: str) -> SessionRecord:
        with self._lock:
            self._commit(self._event("session_finalized", {"session_id": session_id}))
            return self._sessions[session_id].snapshot()

    # -- reads --------------------------------------------------------------

    def get_user(self, user_id: str) -> UserRecord:
        with self._lock:
            try:
                return self._users[user_id]
            except KeyError:
                raise UnknownUserError(user_id) from None

    def list_users(self) -> list[UserRecord]:
        with self._lock:
            return sorted(self._users.values(), key=lambda u: u.user_id)

    def get_session(self, session_id: str) -> SessionRecord:
        with self._lock:
            return self._session_state(session_id).snapshot()

    def list_sessions(self) -> list[SessionRecord]:
        with self._lock:
            return [s.snapshot() for s in sorted(self._sessions.values(), key=lambda s: s.session_id)]

    def final_result(self, session_id: str) -> AggregateResult:
        with self._lock:
            state = self._session_state(session_id)
            if state.final_result is None:
                raise SessionNotFinalizedError(session_id)
            return state.final_result

    def trend(self, user_id: str) -> TrendReport:
        """Finalized sessions of a user in chronological order, with score deltas."""
        with self._lock:
            if user_id not in self._users:
                raise UnknownUserError(user_id)
            states = [
                self._sessions[sid]
                for sid in self._finalize_order
                if self._sessions[sid].user_id == user_id
            ]
            states.sort(key=lambda s: s.finalized_at)  # stable: ties keep log order
            points = tuple(
                TrendPoint(
                    session_id=s.session_id,
                    finalized_at=s.finalized_at,  # type: ignore[arg-type]
                    overall_achievement=s.final_result.overall_achievement,  # type: ignore[union-attr]
                )
                for s in states
            )
            deltas = tuple(
                b.overall_achievement - a.overall_achievement for a, b in zip(points, points[1:])
            )
            return TrendReport(user_id=user_id, points=points, deltas=deltas)

    def close(self) -> None:
        self._log.close()

    # -- event machinery ----------------------------------------------------

    def _event(self, event_type: str, payload: dict, now: Optional[datetime] = None) -> dict:
        timestamp = (now or self._clock()).isoformat(timespec="microseconds")
        return {"event_type": event_type, "timestamp": timestamp, "payload": payload}

    def _commit(self, event: dict) -> None:
        # Validation lives in _apply: if it raises, nothing hits the log and
        # no state changed. Only applied events are made durable.
        self._apply(event)
        self._log.append(event)

    def _apply(self, event: dict) -> None:
        """Mutate in-memory state from one event; shared by live calls and replay."""
        event_type = event["event_type"]
        timestamp = event["timestamp"]
        payload = event["payload"]

        if event_type == "user_created":
            if payload["user_id"] in self._users:
                raise DuplicateUserError(payload["user_id"])
            self._users[payload["user_id"]] = UserRecord(
                user_id=payload["user_id"],
                display_name=payload["display_name"],
                created_at=timestamp,
            )
        elif event_type == "session_created":
            if payload["user_id"] not in self._users:
                raise UnknownUserError(payload["user_id"])
            if payload["framework_id"] not in self._frameworks:
                raise UnknownFrameworkError(payload["framework_id"])
            self._sessions[payload["session_id"]] = _SessionState(
                session_id=payload["session_id"],
                user_id=payload["user_id"],
                framework_id=payload["framework_id"],
                started_at=timestamp,
            )
        elif event_type == "answer_submitted":
            self._check_submit(payload["session_id"], payload["leaf_id"], payload["grade"])
            self._sessions[payload["session_id"]].answers[payload["leaf_id"]] = payload["grade"]
        elif event_type == "session_finalized":
            state = self._session_state(payload["session_id"])
            if state.finalized:
                raise SessionFinalizedError(state.session_id)
            definition = self._frameworks[state.framework_id]
            result = aggregate(
                definition, AnswerSet(state.framework_id, dict(state.answers)), "strict"
            )
            state.finalized_at = timestamp
            state.final_result = result
            self._finalize_order.append(state.session_id)
        else:
            raise ValueError(f"unknown event type {event_type!r}")

    def _session_state(self, session_id: str) -> _SessionState:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(session_id) from None

    def _check_submit(self, session_id: str, leaf_id: str, grade: int) -> None:
        state = self._session_state(session_id)
        if state.finalized:
            raise SessionFinalizedError(session_id)
        definition = self._frameworks[state.framework_id]
        node = definition._index.get(leaf_id)
        if node is None or not node.is_leaf:
            raise UnknownLeafError(leaf_id)
        if not isinstance(grade, int) or isinstance(grade, bool) or grade not in definition.scale.values:
            raise GradeOutOfRangeError(leaf_id, grade, definition.scale)


# ---------------------------------------------------------------------------
# Plain-document forms for the HTTP service
# ---------------------------------------------------------------------------

def user_to_doc(user: UserRecord) -> dict:
    return {
        "user_id": user.user_id,
        "display_name": user.display_name,
        "created_at": user.created_at,
    }


def session_to_doc(session: SessionRecord, include_result: bool = False) -> dict:
    doc = {
        "session_id": session.session_id,
        "user_id": session.user_id,
        "framework_id": session.framework_id,
        "status": session.status,
        "answers": dict(sorted(session.answers.items())),
        "started_at": session.started_at,
        "finalized_at": session.finalized_at,
    }
    if include_result:
        doc["final_result"] = (
            None if session.final_result is None else result_to_doc(session.final_result)
        )
    return doc


def trend_to_doc(trend: TrendReport) -> dict:
    return {
        "user_id": trend.user_id,
        "points": [
            {
                "session_id": p.session_id,
                "finalized_at": p.finalized_at,
                "overall_achievement": p.overall_achievement,
            }
            for p in trend.points
        ],
        "deltas": list(trend.deltas),
    }
