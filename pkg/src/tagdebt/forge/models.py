"""Forge-side value types shared by every forge implementation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

_NAME_RE = re.compile(r"^[^\s/]+$")

DEFAULT_WEB_BASE = "https://github.com"


class IssueState(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class ForgeError(Exception):
    """A failed forge call. Only ``rate_limited`` and ``network`` are worth retrying."""

    KINDS = ("not_found", "permission_denied", "rate_limited", "network", "invalid_response")
    RETRYABLE = frozenset({"rate_limited", "network"})

    def __init__(self, kind: str, detail: str = "") -> None:
        if kind not in self.KINDS:
            raise ValueError(f"unknown ForgeError kind {kind!r}")
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind
        self.detail = detail

    @property
    def retryable(self) -> bool:
        return self.kind in self.RETRYABLE


@dataclass(frozen=True)
class RepoRef:
    owner: str
    name: str
    default_branch: str = "main"

    def __post_init__(self) -> None:
        for attr in ("owner", "name"):
            value = getattr(self, attr)
            if not isinstance(value, str) or not _NAME_RE.match(value):
                raise ValueError(f"invalid repository {attr}: {value!r}")
        if not self.default_branch:
            raise ValueError("default_branch must be non-empty")

    @classmethod
    def parse(cls, full_name: str, default_branch: str = "main") -> RepoRef:
        owner, sep, name = full_name.partition("/")
        if not sep:
            raise ValueError(f"expected 'owner/name', got {full_name!r}")
        return cls(owner, name, default_branch)

    @property
    def full_name(self) -> str:
        return f"{self.owner}/{self.name}"

    def __str__(self) -> str:
        return self.full_name


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp (``Z`` suffix allowed) into an aware UTC datetime."""
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Issue:
    repo: RepoRef
    number: int
    title: str
    body: str = ""
    labels: frozenset[str] = frozenset()
    state: IssueState = IssueState.OPEN
    created_at: datetime = field(default_factory=utcnow)
    updated_at: datetime | None = None

    def __post_init__(self) -> None:
        if isinstance(self.number, bool) or not isinstance(self.number, int) or self.number < 1:
            raise ValueError(f"issue number must be a positive integer, got {self.number!r}")
        object.__setattr__(self, "labels", frozenset(self.labels))
        object.__setattr__(self, "state", IssueState(self.state))
        if self.updated_at is None:
            object.__setattr__(self, "updated_at", self.created_at)
        if self.updated_at < self.created_at:
            raise ValueError("updated_at precedes created_at")

    @property
    def is_open(self) -> bool:
        return self.state is IssueState.OPEN


@dataclass(frozen=True)
class Comment:
    repo: RepoRef
    issue_number: int
    author_login: str
    body: str
    author_is_bot: bool = False
    created_at: datetime = field(default_factory=utcnow)


def issue_url(repo: RepoRef, number: int, web_base: str = DEFAULT_WEB_BASE) -> str:
    return f"{web_base.rstrip('/')}/{repo.owner}/{repo.name}/issues/{number}"
