"""Webhook intake: signature check, payload parsing and the HTTP endpoints."""

from __future__ import annotations

import hashlib
import hmac
import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any

from fastapi import BackgroundTasks, FastAPI, Request
from fastapi.responses import PlainTextResponse

from tagdebt.forge import Comment, Issue, IssueState, RepoRef, parse_timestamp

if TYPE_CHECKING:
    from tagdebt.bot import TagDebtBot

logger = logging.getLogger(__name__)

_SIGNATURE_RE = re.compile(r"^sha256=[0-9a-f]{64}$")


class GatewayError(Exception):
    def __init__(self, detail: str, kind: str = "bad_payload") -> None:
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


class EventKind(str, Enum):
    ISSUE_OPENED = "issue_opened"
    ISSUE_COMMENTED = "issue_commented"
    IGNORED = "ignored"


@dataclass(frozen=True)
class WebhookEnvelope:
    event_name: str
    payload: bytes
    signature: str = ""
    delivery_id: str = ""


@dataclass(frozen=True)
class Event:
    kind: EventKind
    repo: RepoRef | None = None
    issue: Issue | None = None
    comment: Comment | None = None
    reason: str = ""

    def __post_init__(self) -> None:
        if self.kind is EventKind.ISSUE_OPENED and (self.issue is None or self.comment is not None):
            raise ValueError("issue_opened carries an issue and no comment")
        if self.kind is EventKind.ISSUE_COMMENTED and (self.issue is None or self.comment is None):
            raise ValueError("issue_commented carries both an issue and a comment")


def sign(payload: bytes, secret: bytes) -> str:
    return "sha256=" + hmac.new(secret, payload, hashlib.sha256).hexdigest()


def verify_signature(payload: bytes, signature_header: str | None, secret: bytes) -> bool:
    if not secret:
        raise ValueError("webhook secret must be non-empty")
    if not signature_header or not _SIGNATURE_RE.match(signature_header):
        return False
    return hmac.compare_digest(sign(payload, secret), signature_header)


def _get(obj: Any, *path: str) -> Any:
    cur = obj
    for key in path:
        if not isinstance(cur, dict) or key not in cur:
            raise GatewayError(f"missing field {'.'.join(path)}")
        cur = cur[key]
    return cur


def _typed(value: Any, kind: type | tuple[type, ...], name: str) -> Any:
    if isinstance(value, bool) and kind is not bool or not isinstance(value, kind):
        raise GatewayError(f"field {name} has the wrong type")
    return value


def _parse_repo(data: dict) -> RepoRef:
    full_name = _typed(_get(data, "repository", "full_name"), str, "repository.full_name")
    branch = _typed(_get(data, "repository", "default_branch"), str, "repository.default_branch")
    try:
        return RepoRef.parse(full_name, branch)
    except ValueError as exc:
        raise GatewayError(str(exc)) from None


def _parse_issue(data: dict, repo: RepoRef) -> Issue:
    issue = _get(data, "issue")
    number = _typed(_get(issue, "number"), int, "issue.number")
    title = _typed(_get(issue, "title"), str, "issue.title")
    body = _get(issue, "body")
    if body is not None:
        _typed(body, str, "issue.body")
    labels = _typed(_get(issue, "labels"), list, "issue.labels")
    names = frozenset(_typed(_get(lbl, "name"), str, "issue.labels[].name") for lbl in labels)
    try:
        return Issue(
            repo=repo,
            number=number,
            title=title,
            body=body or "",
            labels=names,
            state=IssueState(_get(issue, "state")),
            created_at=parse_timestamp(_typed(_get(issue, "created_at"), str, "issue.created_at")),
            updated_at=parse_timestamp(_typed(_get(issue, "updated_at"), str, "issue.updated_at")),
        )
    except ValueError as exc:
        raise GatewayError(f"invalid issue: {exc}") from None


def parse_event(envelope: WebhookEnvelope, bot_login: str | None = None) -> Event:
    """Turn a delivery into an :class:`Event`.

    Issue-opened and new-comment deliveries become active events; everything else,
    including comments written by a bot, is ``ignored``.
    """
    if envelope.event_name not in ("issues", "issue_comment"):
        return Event(EventKind.IGNORED, reason=f"event {envelope.event_name!r}")
    try:
        data = json.loads(envelope.payload)
    except (UnicodeDecodeError, ValueError, RecursionError) as exc:
        raise GatewayError(f"payload is not JSON: {exc}") from None
    if not isinstance(data, dict):
        raise GatewayError("payload is not a JSON object")
    action = _typed(_get(data, "action"), str, "action")
    repo = _parse_repo(data)
    issue = _parse_issue(data, repo)

    if envelope.event_name == "issues":
        if action != "opened":
            return Event(EventKind.IGNORED, repo, reason=f"issues/{action}")
        return Event(EventKind.ISSUE_OPENED, repo, issue)

    body = _typed(_get(data, "comment", "body"), str, "comment.body")
    login = _typed(_get(data, "comment", "user", "login"), str, "comment.user.login")
    user_type = _typed(_get(data, "comment", "user", "type"), str, "comment.user.type")
    created = data["comment"].get("created_at")
    comment = Comment(
        repo=repo,
        issue_number=issue.number,
        author_login=login,
        body=body,
        author_is_bot=user_type == "Bot" or (bot_login is not None and login == bot_login),
        **({"created_at": parse_timestamp(created)} if isinstance(created, str) else {}),
    )
    if action != "created":
        return Event(EventKind.IGNORED, repo, reason=f"issue_comment/{action}")
    if "pull_request" in data["issue"]:
        return Event(EventKind.IGNORED, repo, reason="comment on a pull request")
    if comment.author_is_bot:
        return Event(EventKind.IGNORED, repo, reason="comment written by a bot")
    return Event(EventKind.ISSUE_COMMENTED, repo, issue, comment)


def create_app(bot: TagDebtBot, secret: bytes, *, bot_login: str | None = None) -> FastAPI:
    """HTTP front door: ``POST /webhook`` and ``GET /healthz``.

    Unsigned or badly signed deliveries get 401 and are never parsed. Active
    events are acknowledged with 202 and handled after the response is sent.
    """
    if not secret:
        raise ValueError("webhook secret must be non-empty")
    app = FastAPI(title="TagDebt", docs_url=None, redoc_url=None, openapi_url=None)

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.post("/webhook")
    async def webhook(request: Request, background: BackgroundTasks) -> PlainTextResponse:
        payload = await request.body()
        if not verify_signature(payload, request.headers.get("X-Hub-Signature-256"), secret):
            return PlainTextResponse("invalid signature", status_code=401)
        envelope = WebhookEnvelope(
            event_name=request.headers.get("X-GitHub-Event", ""),
            payload=payload,
            signature=request.headers.get("X-Hub-Signature-256", ""),
            delivery_id=request.headers.get("X-GitHub-Delivery", ""),
        )
        try:
            event = parse_event(envelope, bot_login)
        except GatewayError as exc:
            logger.warning("delivery %s rejected: %s", envelope.delivery_id, exc)
            return PlainTextResponse(str(exc), status_code=400)
        if event.kind is EventKind.IGNORED:
            return PlainTextResponse("ignored", status_code=200)
        background.add_task(bot.handle, event)
        return PlainTextResponse("accepted", status_code=202)

    return app
