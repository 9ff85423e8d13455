"""JSON-over-HTTP surface: frameworks, users, sessions, results, reports.

Every response body is rendered through the canonical serializer, so a
finalized session's /result is byte-for-byte the stored aggregation result.
Errors come back as {code, message, details?} with a status matching the
code; module exceptions map onto that closed set and stack traces never
leave the process.
"""

from __future__ import annotations

from typing import Iterable, Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import reporting
from .scoring import (
    GradeOutOfRangeError,
    IncompleteAnswersError,
    UnknownLeafError,
)
from .sessions import (
    AssessmentStore,
    DuplicateUserError,
    SessionFinalizedError,
    SessionNotFinalizedError,
    UnknownFrameworkError,
    UnknownSessionError,
    UnknownUserError,
    session_to_doc,
    trend_to_doc,
    user_to_doc,
)
from .serialize import canonical_json
from .taxonomy import FrameworkDefinition, framework_to_doc


class ApiError(Exception):
    """Error shaped for the wire; ``code`` comes from the documented closed set."""

    STATUS = {
        "invalid_request": 400,
        "invalid_grade": 400,
        "invalid_level": 400,
        "unknown_framework": 404,
        "unknown_user": 404,
        "unknown_session": 404,
        "unknown_leaf": 404,
        "user_exists": 409,
        "session_finalized": 409,
        "session_not_finalized": 409,
        "incomplete_answers": 422,
    }

    def __init__(self, code: str, message: str, details: Optional[list] = None):
        assert code in self.STATUS, f"undocumented error code {code!r}"
        self.code = code
        self.message = message
        self.details = details
        super().__init__(message)

    def to_doc(self) -> dict:
        doc: dict = {"code": self.code, "message": self.message}
        if self.details is not None:
            doc["details"] = self.details
        return doc

    @property
    def status(self) -> int:
        return self.STATUS[self.code]


def _api_error(exc: Exception) -> ApiError:
    if isinstance(exc, UnknownFrameworkError):
        return ApiError("unknown_framework", str(exc))
    if isinstance(exc, UnknownUserError):
        return ApiError("unknown_user", str(exc))
    if isinstance(exc, UnknownSessionError):
        return ApiError("unknown_session", str(exc))
    if isinstance(exc, UnknownLeafError):
        return ApiError("unknown_leaf", str(exc))
    if isinstance(exc, GradeOutOfRangeError):
        return ApiError("invalid_grade", str(exc))
    if isinstance(exc, SessionFinalizedError):
        return ApiError("session_finalized", str(exc))
    if isinstance(exc, SessionNotFinalizedError):
        return ApiError("session_not_finalized", str(exc))
    if isinstance(exc, IncompleteAnswersError):
        return ApiError("incomplete_answers", str(exc), details=list(exc.missing))
    if isinstance(exc, DuplicateUserError):
        return ApiError("user_exists", str(exc))
    raise exc


def _canonical(doc, status: int = 200) -> Response:
    return Response(
        content=canonical_json(doc),
        status_code=status,
        media_type="application/json",
    )


def _framework_summary(definition: FrameworkDefinition) -> dict:
    return {
        "id": definition.id,
        "name": definition.name,
        "version": definition.version,
        "domain_count": len(definition.domains),
        "control_count": len(definition.controls),
        "leaf_count": definition.leaf_count,
    }


def _slug(text: str) -> str:
    cleaned = "".join(c.lower() if c.isalnum() else "-" for c in text.strip())
    return "-".join(part for part in cleaned.split("-") if part)


def create_app(store: AssessmentStore, cors_origins: Iterable[str] = ("*",)) -> FastAPI:
    app = FastAPI(title="secready", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.exception_handler(ApiError)
    async def on_api_error(_req: Request, exc: ApiError) -> Response:
        return _canonical(exc.to_doc(), status=exc.status)

    @app.exception_handler(Exception)
    async def on_unexpected(_req: Request, exc: Exception) -> Response:
        # Deliberately detail-free: internals stay inside the process.
        return _canonical({"code": "internal_error", "message": "internal error"}, status=500)

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ApiError("invalid_request", "request body must be a JSON object")
        if not isinstance(body, dict):
            raise ApiError("invalid_request", "request body must be a JSON object")
        return body

    # -- frameworks ---------------------------------------------------------

    @app.get("/api/frameworks")
    def list_frameworks() -> Response:
        summaries = [_framework_summary(d) for d in store.list_frameworks()]
        summaries.sort(key=lambda s: s["id"])
        return _canonical(summaries)

    @app.get("/api/frameworks/{framework_id}")
    def get_framework(framework_id: str) -> Response:
        try:
            definition = store.get_framework(framework_id)
        except UnknownFrameworkError as exc:
            raise _api_error(exc)
        return _canonical(framework_to_doc(definition))

    # -- users and sessions --------------------------------------------------

    @app.post("/api/users")
    async def create_user(request: Request) -> Response:
        body = await _json_body(request)
        display_name = body.get("display_name")
        if not isinstance(display_name, str) or not display_name.strip():
            raise ApiError("invalid_request", "display_name (non-empty string) is required")
        user_id = body.get("user_id") or _slug(display_name)
        if not isinstance(user_id, str) or not user_id:
            raise ApiError("invalid_request", "user_id must be a non-empty string")
        try:
            user = store.create_user(user_id, display_name.strip())
            return _canonical(user_to_doc(user), status=201)
        except DuplicateUserError:
            # Login is a track record, not an account system: an existing
            # identity is fetched, not rejected.
            return _canonical(user_to_doc(store.get_user(user_id)))

    @app.post("/api/sessions")
    async def create_session(request: Request) -> Response:
        body = await _json_body(request)
        user_id = body.get("user_id")
        framework_id = body.get("framework_id")
        if not isinstance(user_id, str) or not isinstance(framework_id, str):
            raise ApiError("invalid_request", "user_id and framework_id are required")
        try:
            session = store.create_session(user_id, framework_id)
        except (UnknownUserError, UnknownFrameworkError) as exc:
            raise _api_error(exc)
        return _canonical(session_to_doc(session), status=201)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str) -> Response:
        try:
            session = store.get_session(session_id)
        except UnknownSessionError as exc:
            raise _api_error(exc)
        return _canonical(session_to_doc(session))

    @app.put("/api/sessions/{session_id}/answers/{leaf_id}")
    async def put_answer(session_id: str, leaf_id: str, request: Request) -> Response:
        body = await _json_body(request)
        if "grade" not in body:
            raise ApiError("invalid_request", "body must be {\"grade\": <integer>}")
        grade = body["grade"]
        if not isinstance(grade, int) or isinstance(grade, bool):
            raise ApiError("invalid_grade", f"grade must be an integer, got {grade!r}")
        try:
            session = store.submit_answer(session_id, leaf_id, grade)
        except (UnknownSessionError, SessionFinalizedError, UnknownLeafError, GradeOutOfRangeError) as exc:
            raise _api_error(exc)
        return _canonical(session_to_doc(session))

    @app.post("/api/sessions/{session_id}/finalize")
    def finalize(session_id: str) -> Response:
        try:
            store.finalize_session(session_id)
            result = store.final_result(session_id)
        except (UnknownSessionError, SessionFinalizedError, IncompleteAnswersError) as exc:
            raise _api_error(exc)
        return _canonical(reporting.result_to_doc(result))

    # -- reports -------------------------------------------------------------

    def _finalized_result(session_id: str):
        try:
            return store.final_result(session_id)
        except (UnknownSessionError, SessionNotFinalizedError) as exc:
            raise _api_error(exc)

    @app.get("/api/sessions/{session_id}/result")
    def get_result(session_id: str) -> Response:
        return _canonical(reporting.result_to_doc(_finalized_result(session_id)))

    @app.get("/api/sessions/{session_id}/summary")
    def get_summary(session_id: str) -> Response:
        report = reporting.summarize(_finalized_result(session_id))
        return _canonical(reporting.summary_to_doc(report))

    @app.get("/api/sessions/{session_id}/histogram")
    def get_histogram(session_id: str, level: str = "domains") -> Response:
        if level not in ("domains", "controls"):
            raise ApiError("invalid_level", "level must be 'domains' or 'controls'")
        series = reporting.histogram(_finalized_result(session_id), level)  # type: ignore[arg-type]
        return _canonical(reporting.histogram_to_doc(series))

    @app.get("/api/users/{user_id}/trend")
    def get_trend(user_id: str) -> Response:
        try:
            trend = store.trend(user_id)
        except UnknownUserError as exc:
            raise _api_error(exc)
        return _canonical(trend_to_doc(trend))

    return app
