from __future__ import annotations

from typing import Protocol, runtime_checkable

from tagdebt.forge.models import Issue, RepoRef

# Colors used when a label definition has to be created on first use.
LABEL_COLORS = {"TD": "d93f0b", "non-TD": "0e8a16"}
FALLBACK_LABEL_COLOR = "ededed"


@runtime_checkable
class Forge(Protocol):
    """The five forge operations the bot relies on."""

    web_base: str

    def fetch_file(self, repo: RepoRef, path: str, branch: str) -> bytes | None: ...

    def add_label(self, repo: RepoRef, issue_number: int, label: str) -> None: ...

    def remove_label(self, repo: RepoRef, issue_number: int, label: str) -> None: ...

    def post_comment(self, repo: RepoRef, issue_number: int, body: str) -> None: ...

    def list_open_issues(self, repo: RepoRef) -> list[Issue]: ...


def check_repo_path(path: str) -> str:
    parts = path.replace("\\", "/").split("/")
    if not path or path.startswith("/") or ".." in parts:
        raise ValueError(f"path must be repo-relative without '..' segments: {path!r}")
    return path
