"""Payload builders and test doubles shared across the suite."""

from __future__ import annotations

import json
import smtplib
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from tagdebt.config import DetectionSettings
from tagdebt.detection import Classification, ClassificationInput, PluginRegistry, Verdict
from tagdebt.forge import FakeForge, Issue, RepoRef, format_timestamp

T0 = datetime(2025, 3, 1, 12, 0, tzinfo=timezone.utc)
REPO = RepoRef("acme", "widgets")


def make_issue(number=1, title="Some title", body="", *, repo=REPO, labels=(), state="open", created=T0, updated=None):
    return Issue(repo, number, title, body, frozenset(labels), state, created, updated or created)


def issue_payload(issue: Issue) -> dict:
    return {
        "number": issue.number,
        "title": issue.title,
        "body": issue.body,
        "labels": [{"name": n} for n in sorted(issue.labels)],
        "state": issue.state.value,
        "created_at": format_timestamp(issue.created_at),
        "updated_at": format_timestamp(issue.updated_at),
    }


def repo_payload(repo: RepoRef = REPO) -> dict:
    return {"full_name": repo.full_name, "default_branch": repo.default_branch}


def opened_payload(issue: Issue, action: str = "opened") -> dict:
    return {"action": action, "repository": repo_payload(issue.repo), "issue": issue_payload(issue)}


def comment_payload(issue: Issue, body: str, *, login="alice", user_type="User", action="created") -> dict:
    return {
        "action": action,
        "repository": repo_payload(issue.repo),
        "issue": issue_payload(issue),
        "comment": {"body": body, "user": {"login": login, "type": user_type}, "created_at": format_timestamp(T0)},
    }


def to_bytes(payload: dict) -> bytes:
    return json.dumps(payload).encode("utf-8")


class StubDetector:
    """Returns a fixed verdict and logs each call into a (possibly shared) journal."""

    def __init__(self, name: str, verdict: Verdict, journal: list):
        self.name = name
        self.verdict = verdict
        self.journal = journal

    def classify(self, item: ClassificationInput) -> Classification:
        self.journal.append(("detect", self.name, item.text))
        return Classification(self.verdict)


def stub_registry(journal: list, **verdicts: Verdict) -> PluginRegistry:
    registry = PluginRegistry()
    for name, verdict in verdicts.items():
        registry.register(name, lambda settings, n=name, v=verdict: StubDetector(n, v, journal))
    return registry.freeze()


def seeded_forge(*issues: Issue, journal: list | None = None, config: str | None = None) -> FakeForge:
    forge = FakeForge(journal=journal)
    forge.add_repo(REPO)
    for issue in issues:
        forge.seed_issue(issue)
    if config is not None:
        forge.put_file(REPO, "Bot/config.json", config)
    return forge


# -- SMTP double ---------------------------------------------------------


@dataclass
class SmtpSession:
    host: str
    port: int
    tls: bool = False
    authenticated: bool = False
    closed: bool = False
    sent: list = field(default_factory=list)


class SmtpDouble:
    """Factory standing in for ``smtplib.SMTP``; records every session it opens."""

    def __init__(self, *, supports_tls=True, user="bot", password="secret", reject_rcpt=False, refuse_connect=False):
        self.supports_tls = supports_tls
        self.user = user
        self.password = password
        self.reject_rcpt = reject_rcpt
        self.refuse_connect = refuse_connect
        self.sessions: list[SmtpSession] = []

    @property
    def messages(self) -> list:
        return [m for s in self.sessions for m in s.sent]

    def __call__(self, host, port, timeout=None):
        if self.refuse_connect:
            raise ConnectionRefusedError("connection refused")
        session = SmtpSession(host, port)
        self.sessions.append(session)
        return _SmtpConnection(self, session)


class _SmtpConnection:
    def __init__(self, double: SmtpDouble, session: SmtpSession):
        self.double = double
        self.session = session

    def starttls(self, context=None):
        if not self.double.supports_tls:
            raise smtplib.SMTPNotSupportedError("STARTTLS extension not supported by server.")
        self.session.tls = True

    def login(self, user, password):
        if not self.session.tls:
            raise AssertionError("login attempted before TLS")
        if (user, password) != (self.double.user, self.double.password):
            raise smtplib.SMTPAuthenticationError(535, b"authentication failed")
        self.session.authenticated = True

    def send_message(self, msg, from_addr=None, to_addrs=None):
        if not self.session.tls:
            raise AssertionError("message sent in clear text")
        if self.double.reject_rcpt:
            raise smtplib.SMTPRecipientsRefused({a: (550, b"no such user") for a in to_addrs})
        self.session.sent.append(msg)
        return {}

    def quit(self):
        self.session.closed = True

    def close(self):
        self.session.closed = True


def days(n: float) -> timedelta:
    return timedelta(days=n)


def settings(type_: str = "heuristic", **params: str) -> DetectionSettings:
    return DetectionSettings(type=type_, plugin_params=dict(params))


def config_json(**sections) -> str:
    return json.dumps(sections)

