"""Event handlers: what the bot does when an issue is opened or commented on."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Callable

from tagdebt.commands import UNKNOWN_COMMAND_REPLY, CommandKind, addresses_bot, help_text, parse_command, welcome_text
from tagdebt.config import BotConfig, ConfigError, resolve_config
from tagdebt.detection import ClassificationInput, DetectorError, PluginRegistry, Verdict, select_text
from tagdebt.detection.registry import UnknownPluginType
from tagdebt.forge import Forge, ForgeError, Issue, utcnow
from tagdebt.gateway import Event, EventKind
from tagdebt.notifier import EmailMessage, NotifyError, prepare_label_email

logger = logging.getLogger(__name__)

Mailer = Callable[[EmailMessage], None]


@dataclass(frozen=True)
class Action:
    kind: str
    detail: str | None = None

    def __str__(self) -> str:
        return f"{self.kind}({self.detail})" if self.detail else self.kind


@dataclass
class HandlerOutcome:
    actions: list[Action] = field(default_factory=list)

    def add(self, kind: str, detail: str | None = None) -> None:
        self.actions.append(Action(kind, detail))

    @property
    def kinds(self) -> list[str]:
        return [a.kind for a in self.actions]

    def __str__(self) -> str:
        return "[" + ", ".join(str(a) for a in self.actions) + "]"


class _Abort(Exception):
    """Stops a handler after an error has been recorded."""


class TagDebtBot:
    """Routes parsed events through config, commands, detection, labels and mail.

    ``mailer`` is any callable taking an :class:`EmailMessage`; ``None`` disables
    delivery entirely.
    """

    def __init__(
        self,
        forge: Forge,
        registry: PluginRegistry,
        mailer: Mailer | None = None,
        *,
        clock: Callable[[], datetime] = utcnow,
        error_comment_interval: timedelta = timedelta(hours=1),
    ) -> None:
        if not registry.frozen:
            raise ValueError("the plugin registry must be frozen before serving events")
        self.forge = forge
        self.registry = registry
        self.mailer = mailer
        self.clock = clock
        self.error_comment_interval = error_comment_interval
        self._last_error_comment: dict[tuple[str, int], datetime] = {}
        self._lock = threading.Lock()

    def handle(self, event: Event) -> HandlerOutcome:
        if event.kind is EventKind.ISSUE_OPENED:
            return self.handle_issue_opened(event)
        if event.kind is EventKind.ISSUE_COMMENTED:
            return self.handle_issue_comment(event)
        outcome = HandlerOutcome()
        outcome.add("ignored")
        return outcome

    def handle_issue_opened(self, event: Event) -> HandlerOutcome:
        issue = event.issue
        outcome = HandlerOutcome()
        try:
            config = self._config(issue, outcome)
            if config.welcome_comment:
                self._comment(issue, welcome_text(), outcome)
            if config.auto_label_on_creation:
                verdict = self._classify(issue, config, outcome)
                self._label(issue, verdict.value, outcome)
                self._notify(issue, verdict.value, config, outcome)
        except _Abort:
            pass
        return outcome

    def handle_issue_comment(self, event: Event) -> HandlerOutcome:
        issue, comment = event.issue, event.comment
        outcome = HandlerOutcome()
        if comment.author_is_bot:
            outcome.add("ignored")
            return outcome
        command = parse_command(comment.body)
        try:
            if command is None:
                if addresses_bot(comment.body):
                    self._comment(issue, UNKNOWN_COMMAND_REPLY, outcome)
                else:
                    outcome.add("ignored")
            elif command.kind is CommandKind.HELP:
                self._comment(issue, help_text(), outcome)
            elif command.kind is CommandKind.LABEL_EXPLICIT:
                config = self._config(issue, outcome)
                self._label(issue, command.explicit_label, outcome)
                self._notify(issue, command.explicit_label, config, outcome)
            else:
                config = self._config(issue, outcome)
                verdict = self._classify(issue, config, outcome)
                self._label(issue, verdict.value, outcome)
                self._notify(issue, verdict.value, config, outcome)
        except _Abort:
            pass
        return outcome

    # -- steps -----------------------------------------------------------

    def _config(self, issue: Issue, outcome: HandlerOutcome) -> BotConfig:
        try:
            return resolve_config(self.forge, issue.repo)
        except ConfigError as exc:
            outcome.add("errored", "config")
            self._error_comment(
                issue,
                f"TagDebt could not use `Bot/config.json`: {exc}. No action was taken; fix the file and try again.",
                outcome,
            )
        except ForgeError as exc:
            outcome.add("errored", "forge")
            logger.error("config fetch failed for %s: %s", issue.repo, exc)
        raise _Abort

    def _classify(self, issue: Issue, config: BotConfig, outcome: HandlerOutcome) -> Verdict:
        try:
            detector = self.registry.create(config.detection)
        except (UnknownPluginType, ValueError) as exc:
            outcome.add("errored", "config")
            self._error_comment(issue, f"TagDebt detection is misconfigured: {exc}. No label was added.", outcome)
            raise _Abort from None
        text = select_text(issue, config.detection.analyzed_part)
        try:
            return detector.classify(ClassificationInput(text, issue.repo, issue.number)).label
        except DetectorError as exc:
            outcome.add("errored", "detector")
            self._error_comment(issue, f"TagDebt could not classify this issue ({exc}). No label was added.", outcome)
            raise _Abort from None

    def _label(self, issue: Issue, label: str, outcome: HandlerOutcome) -> None:
        try:
            self.forge.add_label(issue.repo, issue.number, label)
            outcome.add("labeled", label)
            # Keep TD / non-TD mutually exclusive when a new verdict disagrees.
            if label in (Verdict.TD.value, Verdict.NON_TD.value):
                stale = Verdict(label).counterpart.value
                if stale in issue.labels:
                    self.forge.remove_label(issue.repo, issue.number, stale)
        except ForgeError as exc:
            outcome.add("errored", "forge")
            logger.error("labeling %s#%d failed: %s", issue.repo, issue.number, exc)
            raise _Abort from None

    def _notify(self, issue: Issue, label: str, config: BotConfig, outcome: HandlerOutcome) -> None:
        if self.mailer is None:
            return
        message = prepare_label_email(issue, label, config.email, web_base=self.forge.web_base)
        if message is None:
            return
        try:
            self.mailer(message)
        except NotifyError as exc:
            logger.error("mail for %s#%d failed: %s", issue.repo, issue.number, exc)
            outcome.add("errored", "notify")
            self._comment(issue, f"TagDebt added the label but could not send the notification email ({exc.kind}).", outcome, strict=False)
            return
        outcome.add("emailed")

    def _comment(self, issue: Issue, body: str, outcome: HandlerOutcome, *, strict: bool = True) -> None:
        try:
            self.forge.post_comment(issue.repo, issue.number, body)
        except ForgeError as exc:
            logger.error("commenting on %s#%d failed: %s", issue.repo, issue.number, exc)
            if strict:
                outcome.add("errored", "forge")
                raise _Abort from None
            return
        outcome.add("commented")

    def _error_comment(self, issue: Issue, body: str, outcome: HandlerOutcome) -> None:
        """Post an error explanation at most once per issue per interval."""
        key = (issue.repo.full_name, issue.number)
        now = self.clock()
        with self._lock:
            last = self._last_error_comment.get(key)
            if last is not None and now - last < self.error_comment_interval:
                return
            self._last_error_comment[key] = now
        self._comment(issue, body, outcome, strict=False)
