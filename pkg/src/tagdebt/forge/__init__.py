from tagdebt.forge.base import Forge
from tagdebt.forge.fake import FakeForge
from tagdebt.forge.github import GitHubForge
from tagdebt.forge.models import (
    Comment,
    ForgeError,
    Issue,
    IssueState,
    RepoRef,
    format_timestamp,
    issue_url,
    parse_timestamp,
    utcnow,
)

__all__ = [
    "Comment",
    "FakeForge",
    "Forge",
    "ForgeError",
    "GitHubForge",
    "Issue",
    "IssueState",
    "RepoRef",
    "format_timestamp",
    "issue_url",
    "parse_timestamp",
    "utcnow",
]
