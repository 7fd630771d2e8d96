"""In-memory forge used by the test suite, ``simulate`` and ``serve --fake-forge``."""

from __future__ import annotations

import dataclasses
import threading
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable

from tagdebt.forge.base import FALLBACK_LABEL_COLOR, LABEL_COLORS, check_repo_path
from tagdebt.forge.models import Comment, ForgeError, Issue, RepoRef, utcnow

BOT_LOGIN = "tagdebt[bot]"


@dataclass
class _RepoState:
    repo: RepoRef
    files: dict[tuple[str, str], bytes] = field(default_factory=dict)
    issues: dict[int, Issue] = field(default_factory=dict)
    comments: dict[int, list[Comment]] = field(default_factory=dict)
    label_defs: dict[str, str] = field(default_factory=dict)


class FakeForge:
    """Thread-safe in-memory forge.

    Every public operation appends ``(operation, repo, *args)`` to ``journal``,
    which tests use to assert effect order. Pass a shared list to interleave the
    forge's entries with those of other instrumented components.
    """

    def __init__(
        self,
        *,
        web_base: str = "https://forge.test",
        journal: list | None = None,
        clock: Callable[[], datetime] = utcnow,
        bot_login: str = BOT_LOGIN,
    ) -> None:
        self.web_base = web_base
        self.journal = journal if journal is not None else []
        self.clock = clock
        self.bot_login = bot_login
        self._repos: dict[str, _RepoState] = {}
        self._failures: list[tuple[str, str | None, ForgeError]] = []
        self._lock = threading.RLock()

    # -- seeding helpers -------------------------------------------------

    def add_repo(self, repo: RepoRef) -> RepoRef:
        with self._lock:
            self._repos.setdefault(repo.full_name, _RepoState(repo))
        return repo

    def installed_repos(self) -> list[RepoRef]:
        with self._lock:
            return [state.repo for state in self._repos.values()]

    def put_file(self, repo: RepoRef, path: str, data: bytes | str, branch: str | None = None) -> None:
        if isinstance(data, str):
            data = data.encode("utf-8")
        with self._lock:
            state = self._state(repo, create=True)
            state.files[(branch or state.repo.default_branch, check_repo_path(path))] = bytes(data)

    def delete_file(self, repo: RepoRef, path: str, branch: str | None = None) -> None:
        with self._lock:
            state = self._state(repo)
            state.files.pop((branch or state.repo.default_branch, path), None)

    def seed_issue(self, issue: Issue) -> Issue:
        with self._lock:
            self._state(issue.repo, create=True).issues[issue.number] = issue
        return issue

    def upsert_issue(self, issue: Issue) -> Issue:
        """Insert ``issue`` unless it already exists; existing labels and state win."""
        with self._lock:
            state = self._state(issue.repo, create=True)
            return state.issues.setdefault(issue.number, issue)

    def issue(self, repo: RepoRef, number: int) -> Issue:
        with self._lock:
            return self._issue(self._state(repo), number)

    def comments(self, repo: RepoRef, number: int) -> list[Comment]:
        with self._lock:
            return list(self._state(repo).comments.get(number, []))

    def label_definitions(self, repo: RepoRef) -> dict[str, str]:
        with self._lock:
            return dict(self._state(repo).label_defs)

    def fail_next(self, operation: str, error: ForgeError, repo: RepoRef | None = None) -> None:
        """Make the next ``operation`` call (optionally only for ``repo``) raise ``error``."""
        with self._lock:
            self._failures.append((operation, repo.full_name if repo else None, error))

    def writes(self) -> list[tuple]:
        return [e for e in self.journal if e[0] in ("add_label", "remove_label", "post_comment")]

    # -- Forge protocol --------------------------------------------------

    def fetch_file(self, repo: RepoRef, path: str, branch: str) -> bytes | None:
        check_repo_path(path)
        with self._lock:
            self._record("fetch_file", repo, path, branch)
            state = self._state(repo)
            return state.files.get((branch, path))

    def add_label(self, repo: RepoRef, issue_number: int, label: str) -> None:
        if not label:
            raise ValueError("label must be non-empty")
        with self._lock:
            self._record("add_label", repo, issue_number, label)
            state = self._state(repo)
            issue = self._issue(state, issue_number)
            state.label_defs.setdefault(label, LABEL_COLORS.get(label, FALLBACK_LABEL_COLOR))
            if label not in issue.labels:
                state.issues[issue_number] = self._touch(issue, labels=issue.labels | {label})

    def remove_label(self, repo: RepoRef, issue_number: int, label: str) -> None:
        with self._lock:
            self._record("remove_label", repo, issue_number, label)
            state = self._state(repo)
            issue = self._issue(state, issue_number)
            if label in issue.labels:
                state.issues[issue_number] = self._touch(issue, labels=issue.labels - {label})

    def post_comment(self, repo: RepoRef, issue_number: int, body: str) -> None:
        if not body:
            raise ValueError("comment body must be non-empty")
        with self._lock:
            self._record("post_comment", repo, issue_number, body)
            state = self._state(repo)
            issue = self._issue(state, issue_number)
            comment = Comment(repo, issue_number, self.bot_login, body, author_is_bot=True, created_at=self._now(issue))
            state.comments.setdefault(issue_number, []).append(comment)
            state.issues[issue_number] = self._touch(issue)

    def list_open_issues(self, repo: RepoRef) -> list[Issue]:
        with self._lock:
            self._record("list_open_issues", repo)
            state = self._state(repo)
            return [i for _, i in sorted(state.issues.items()) if i.is_open]

    # -- internals -------------------------------------------------------

    def _record(self, operation: str, repo: RepoRef, *args) -> None:
        for idx, (op, name, error) in enumerate(self._failures):
            if op == operation and name in (None, repo.full_name):
                del self._failures[idx]
                raise error
        self.journal.append((operation, repo.full_name, *args))

    def _state(self, repo: RepoRef, create: bool = False) -> _RepoState:
        state = self._repos.get(repo.full_name)
        if state is None:
            if not create:
                raise ForgeError("not_found", f"repository {repo.full_name} does not exist")
            state = self._repos[repo.full_name] = _RepoState(repo)
        return state

    @staticmethod
    def _issue(state: _RepoState, number: int) -> Issue:
        try:
            return state.issues[number]
        except KeyError:
            raise ForgeError("not_found", f"issue #{number} not found in {state.repo.full_name}") from None

    def _now(self, issue: Issue) -> datetime:
        return max(self.clock(), issue.updated_at)

    def _touch(self, issue: Issue, **changes) -> Issue:
        return dataclasses.replace(issue, updated_at=self._now(issue), **changes)
