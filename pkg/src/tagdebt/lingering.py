"""Find open issues that have sat untouched (or unresolved) for too long.

Age is counted in whole elapsed days, rounded down, and the threshold is
inclusive: an issue exactly ``threshold_days * 24h`` old is lingering.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Callable, Iterable, Protocol

from tagdebt.config import BotConfig, LingeringMode, resolve_config
from tagdebt.forge import Forge, Issue, RepoRef, issue_url
from tagdebt.notifier import EmailMessage, prepare_lingering_email

logger = logging.getLogger(__name__)

ONE_DAY = timedelta(days=1)


@dataclass(frozen=True)
class LingeringPolicy:
    threshold_days: int
    mode: LingeringMode = LingeringMode.CREATION

    def __post_init__(self) -> None:
        if self.threshold_days < 1:
            raise ValueError("threshold_days must be >= 1")
        object.__setattr__(self, "mode", LingeringMode(self.mode))

    @classmethod
    def from_config(cls, config: BotConfig) -> LingeringPolicy:
        return cls(config.lingering.threshold_days, config.lingering.mode)


@dataclass(frozen=True)
class LingeringItem:
    number: int
    title: str
    days_lingering: int
    link: str


@dataclass(frozen=True)
class LingeringReport:
    repo: RepoRef
    generated_at: datetime
    threshold_days: int
    items: tuple[LingeringItem, ...] = ()


def reference_time(issue: Issue, mode: LingeringMode) -> datetime:
    return issue.created_at if mode is LingeringMode.CREATION else issue.updated_at


def days_since(reference: datetime, now: datetime) -> int:
    return (now - reference) // ONE_DAY


def is_lingering(issue: Issue, policy: LingeringPolicy, now: datetime) -> bool:
    return days_since(reference_time(issue, policy.mode), now) >= policy.threshold_days


def build_report(
    repo: RepoRef, issues: Iterable[Issue], policy: LingeringPolicy, now: datetime, web_base: str
) -> LingeringReport:
    items = [
        LingeringItem(
            number=issue.number,
            title=issue.title,
            days_lingering=days_since(reference_time(issue, policy.mode), now),
            link=issue_url(repo, issue.number, web_base),
        )
        for issue in issues
        if issue.is_open and is_lingering(issue, policy, now)
    ]
    items.sort(key=lambda item: (-item.days_lingering, item.number))
    return LingeringReport(repo, now, policy.threshold_days, tuple(items))


def scan_repo(forge: Forge, repo: RepoRef, config: BotConfig | None, now: datetime) -> LingeringReport:
    """Report the repo's lingering issues.

    With ``config=None`` the repository's config file is resolved first; callers
    that resolved it moments ago may pass it in to avoid a second fetch.
    """
    if config is None:
        config = resolve_config(forge, repo)
    return build_report(repo, forge.list_open_issues(repo), LingeringPolicy.from_config(config), now, forge.web_base)


class Clock(Protocol):
    def now(self) -> datetime: ...

    def sleep(self, seconds: float) -> None: ...


class SystemClock:
    def __init__(self, stop: threading.Event | None = None) -> None:
        self._stop = stop

    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def sleep(self, seconds: float) -> None:
        if self._stop is not None:
            self._stop.wait(seconds)
        else:
            time.sleep(seconds)


class FakeClock:
    """Manually advanced clock; ``sleep`` just moves time forward."""

    def __init__(self, start: datetime | None = None) -> None:
        self._now = start or datetime(2025, 1, 1, tzinfo=timezone.utc)
        self._lock = threading.Lock()

    def now(self) -> datetime:
        with self._lock:
            return self._now

    def advance(self, delta: timedelta | float) -> None:
        if not isinstance(delta, timedelta):
            delta = timedelta(seconds=delta)
        with self._lock:
            self._now += delta

    def set(self, when: datetime) -> None:
        with self._lock:
            self._now = when

    def sleep(self, seconds: float) -> None:
        self.advance(seconds)


RepoSource = Iterable[RepoRef] | Callable[[], Iterable[RepoRef]]


class LingeringScheduler:
    """Runs one scan of every installed repo per elapsed ``frequency_hours``."""

    def __init__(
        self,
        forge: Forge,
        installed_repos: RepoSource,
        clock: Clock,
        frequency_hours: int = 24,
        mailer: Callable[[EmailMessage], None] | None = None,
    ) -> None:
        if frequency_hours < 1:
            raise ValueError("frequency_hours must be >= 1")
        self.forge = forge
        self.installed_repos = installed_repos
        self.clock = clock
        self.period = timedelta(hours=frequency_hours)
        self.mailer = mailer
        self.started_at = clock.now()
        self.ticks = 0
        self.scans = 0
        self.failures: list[tuple[RepoRef, Exception]] = []

    def _repos(self) -> list[RepoRef]:
        source = self.installed_repos
        return list(source() if callable(source) else source)

    def due_ticks(self) -> int:
        return (self.clock.now() - self.started_at) // self.period - self.ticks

    def seconds_until_next(self) -> float:
        next_at = self.started_at + (self.ticks + 1) * self.period
        return max((next_at - self.clock.now()).total_seconds(), 0.0)

    def run_pending(self) -> int:
        due = self.due_ticks()
        for _ in range(due):
            self.tick()
        return max(due, 0)

    def tick(self) -> list[LingeringReport]:
        self.ticks += 1
        now = self.clock.now()
        reports = []
        for repo in self._repos():
            try:
                config = resolve_config(self.forge, repo)
                report = scan_repo(self.forge, repo, config, now)
                self.scans += 1
                reports.append(report)
                message = prepare_lingering_email(report, config.email)
                if message is not None and self.mailer is not None:
                    self.mailer(message)
            except Exception as exc:
                logger.exception("lingering scan failed for %s", repo)
                self.failures.append((repo, exc))
        return reports


def run_scheduler(
    forge: Forge,
    installed_repos: RepoSource,
    clock: Clock,
    frequency_hours: int = 24,
    *,
    mailer: Callable[[EmailMessage], None] | None = None,
    stop: threading.Event | None = None,
) -> None:
    """Loop forever (or until ``stop`` is set), scanning on every elapsed period."""
    scheduler = LingeringScheduler(forge, installed_repos, clock, frequency_hours, mailer)
    while stop is None or not stop.is_set():
        scheduler.run_pending()
        clock.sleep(scheduler.seconds_until_next())
