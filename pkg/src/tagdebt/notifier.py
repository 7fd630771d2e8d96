"""Email notifications: when to send, what to say, and how to deliver it.

Templates use ``/name`` placeholders. Substitution is a single regex pass, so a
substituted value that itself contains ``/label`` is never expanded again, and
``/something`` the renderer does not know is left alone.
"""

from __future__ import annotations

import logging
import os
import re
import smtplib
import ssl
import threading
from dataclasses import dataclass, field
from email.mime.text import MIMEText
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Mapping

from tagdebt.config import LINGERING_TEMPLATE_KEY, EmailSettings
from tagdebt.forge import Issue, issue_url

if TYPE_CHECKING:
    from tagdebt.lingering import LingeringReport

logger = logging.getLogger(__name__)

GENERIC_SUBJECT = "[/repository] Issue labeled /label: /issue_title"
GENERIC_BODY = (
    "TagDebt labeled an issue in /repository.\n"
    "\n"
    "Label: /label\n"
    "Issue: /issue_title\n"
    "Link:  /issue_link\n"
)
LINGERING_SUBJECT = "[/repository] /count lingering issue(s)"
LINGERING_BODY = (
    "These open issues in /repository have lingered for at least /threshold days:\n"
    "\n"
    "/issue_list\n"
)

SMTP_DOTFILE = ".tagdebt-smtp"


class NotifyError(Exception):
    KINDS = ("connect", "tls_unavailable", "auth", "send_rejected")

    def __init__(self, kind: str, detail: str = "") -> None:
        if kind not in self.KINDS:
            raise ValueError(f"unknown NotifyError kind {kind!r}")
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind
        self.detail = detail


@dataclass(frozen=True)
class RenderContext:
    label: str
    issue_link: str
    issue_title: str
    repository: str

    def __post_init__(self) -> None:
        if not re.match(r"^[a-zA-Z][a-zA-Z0-9+.-]*://\S+$", self.issue_link):
            raise ValueError(f"issue_link must be an absolute URL, got {self.issue_link!r}")

    def values(self) -> dict[str, str]:
        return {
            "label": self.label,
            "issue_link": self.issue_link,
            "issue_title": self.issue_title,
            "repository": self.repository,
        }


@dataclass(frozen=True)
class EmailMessage:
    subject: str
    body: str
    recipients: tuple[str, ...]

    def __post_init__(self) -> None:
        if "\n" in self.subject or "\r" in self.subject:
            raise ValueError("subject must be a single line")
        if not self.recipients:
            raise ValueError("a message needs at least one recipient")
        object.__setattr__(self, "recipients", tuple(self.recipients))


def substitute(template: str, values: Mapping[str, str]) -> str:
    if not values:
        return template
    names = sorted(values, key=len, reverse=True)
    pattern = re.compile("/(" + "|".join(re.escape(n) for n in names) + r")(?![A-Za-z0-9_])")
    return pattern.sub(lambda m: values[m.group(1)], template)


def render_template(template: str, ctx: RenderContext) -> str:
    return substitute(template, ctx.values())


def _single_line(text: str) -> str:
    return " ".join(text.split())


def should_notify(label: str, settings: EmailSettings) -> bool:
    return settings.send_emails and label in settings.when_to_send and bool(settings.recipients)


def prepare_label_email(
    issue: Issue, label: str, settings: EmailSettings, *, web_base: str = "https://github.com"
) -> EmailMessage | None:
    if not should_notify(label, settings):
        return None
    ctx = RenderContext(
        label=label,
        issue_link=issue_url(issue.repo, issue.number, web_base),
        issue_title=issue.title,
        repository=issue.repo.full_name,
    )
    subject = settings.subject_templates.get(label, GENERIC_SUBJECT)
    body = settings.body_templates.get(label, GENERIC_BODY)
    return EmailMessage(
        subject=_single_line(render_template(subject, ctx)),
        body=render_template(body, ctx),
        recipients=settings.recipients,
    )


def format_digest_line(number: int, title: str, days: int, link: str) -> str:
    return f"- #{number} {title} ({days} days) {link}"


def prepare_lingering_email(report: LingeringReport, settings: EmailSettings) -> EmailMessage | None:
    if not settings.send_emails or not settings.recipients or not report.items:
        return None
    values = {
        "repository": report.repo.full_name,
        "count": str(len(report.items)),
        "threshold": str(report.threshold_days),
        "issue_list": "\n".join(
            format_digest_line(i.number, i.title, i.days_lingering, i.link) for i in report.items
        ),
    }
    subject = settings.subject_templates.get(LINGERING_TEMPLATE_KEY, LINGERING_SUBJECT)
    body = settings.body_templates.get(LINGERING_TEMPLATE_KEY, LINGERING_BODY)
    return EmailMessage(
        subject=_single_line(substitute(subject, values)),
        body=substitute(body, values),
        recipients=settings.recipients,
    )


# -- delivery ------------------------------------------------------------


@dataclass(frozen=True)
class SmtpSettings:
    host: str
    port: int = 587
    username: str = ""
    password: str = field(default="", repr=False)
    sender: str = ""
    timeout: float = 30.0

    @property
    def from_address(self) -> str:
        return self.sender or self.username

    @classmethod
    def from_env(cls, dotfile: str | Path | None = SMTP_DOTFILE, env: Mapping[str, str] | None = None) -> SmtpSettings:
        """Read ``SMTP_HOST``/``SMTP_PORT``/``SMTP_USER``/``SMTP_PASS`` (and ``SMTP_FROM``).

        Lines of ``KEY=value`` in ``dotfile``, when it exists, override the environment.
        """
        values = dict(os.environ if env is None else env)
        if dotfile is not None and Path(dotfile).is_file():
            values.update(read_dotfile(dotfile))
        if not values.get("SMTP_HOST"):
            raise NotifyError("connect", "SMTP_HOST is not configured")
        return cls(
            host=values["SMTP_HOST"],
            port=int(values.get("SMTP_PORT") or 587),
            username=values.get("SMTP_USER", ""),
            password=values.get("SMTP_PASS", ""),
            sender=values.get("SMTP_FROM", ""),
        )


def read_dotfile(path: str | Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip().strip("'\"")
    return out


def to_mime(message: EmailMessage, sender: str) -> MIMEText:
    mime = MIMEText(message.body, "plain", "utf-8")
    mime["Subject"] = message.subject
    mime["From"] = sender
    mime["To"] = ", ".join(message.recipients)
    return mime


def send_email(
    message: EmailMessage,
    transport: SmtpSettings,
    *,
    smtp_factory: Callable[..., smtplib.SMTP] = smtplib.SMTP,
) -> None:
    """Deliver one message over a fresh STARTTLS session, then close it."""
    try:
        session = smtp_factory(transport.host, transport.port, timeout=transport.timeout)
    except (OSError, smtplib.SMTPException) as exc:
        raise NotifyError("connect", str(exc)) from exc
    try:
        try:
            session.starttls(context=ssl.create_default_context())
        except (smtplib.SMTPException, ssl.SSLError) as exc:
            raise NotifyError("tls_unavailable", str(exc)) from exc
        if transport.username:
            try:
                session.login(transport.username, transport.password)
            except smtplib.SMTPException as exc:
                raise NotifyError("auth", str(exc)) from exc
        try:
            session.send_message(to_mime(message, transport.from_address), transport.from_address, list(message.recipients))
        except smtplib.SMTPException as exc:
            raise NotifyError("send_rejected", str(exc)) from exc
    finally:
        try:
            session.quit()
        except (OSError, smtplib.SMTPException):
            session.close()


class SmtpMailer:
    """Callable that sends each message in its own SMTP session."""

    def __init__(self, transport: SmtpSettings, smtp_factory: Callable[..., smtplib.SMTP] = smtplib.SMTP) -> None:
        self.transport = transport
        self.smtp_factory = smtp_factory

    def __call__(self, message: EmailMessage) -> None:
        send_email(message, self.transport, smtp_factory=self.smtp_factory)


class OutboxMailer:
    """Keeps messages in memory instead of sending them (demo mode and tests)."""

    def __init__(self) -> None:
        self.sent: list[EmailMessage] = []
        self._lock = threading.Lock()

    def __call__(self, message: EmailMessage) -> None:
        with self._lock:
            self.sent.append(message)
        logger.info("outbox: %s -> %s", message.subject, ", ".join(message.recipients))
