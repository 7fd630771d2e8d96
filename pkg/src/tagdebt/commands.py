"""``/tdbot`` comment commands.

Only the first non-blank line of a comment is inspected, so quoted text further
down never triggers the bot. The command words are case-insensitive; an explicit
label is passed through exactly as typed.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

PREFIX = "/tdbot"
UNKNOWN_COMMAND_REPLY = "Unknown command; try /tdbot help"
DEFAULT_DOCS_URL = "README.md#commands"

_LABEL_RE = re.compile(r"^/tdbot\s+label(?:\s+(?P<name>.*?))?\s*$", re.IGNORECASE)
_HELP_RE = re.compile(r"^/tdbot\s+help\s*$", re.IGNORECASE)
_PREFIX_RE = re.compile(r"^/tdbot(?:\s|$)", re.IGNORECASE)


class CommandKind(str, Enum):
    LABEL_AUTO = "label_auto"
    LABEL_EXPLICIT = "label_explicit"
    HELP = "help"


@dataclass(frozen=True)
class Command:
    kind: CommandKind
    explicit_label: str | None = None

    def __post_init__(self) -> None:
        if (self.kind is CommandKind.LABEL_EXPLICIT) != bool(self.explicit_label):
            raise ValueError("explicit_label is required for, and only for, label_explicit")


def _first_line(comment_body: str) -> str:
    stripped = comment_body.strip()
    return stripped.splitlines()[0].strip() if stripped else ""


def addresses_bot(comment_body: str) -> bool:
    """True when the comment's first line is a ``/tdbot`` invocation, known or not."""
    return bool(_PREFIX_RE.match(_first_line(comment_body)))


def parse_command(comment_body: str) -> Command | None:
    line = _first_line(comment_body)
    if _HELP_RE.match(line):
        return Command(CommandKind.HELP)
    match = _LABEL_RE.match(line)
    if match is None:
        return None
    name = match.group("name")
    if name:
        return Command(CommandKind.LABEL_EXPLICIT, name)
    return Command(CommandKind.LABEL_AUTO)


def _asset(name: str) -> str:
    return resources.files("tagdebt.data").joinpath(name).read_text(encoding="utf-8")


def docs_url() -> str:
    return os.environ.get("TAGDEBT_DOCS_URL", DEFAULT_DOCS_URL)


def help_text() -> str:
    return _asset("help.txt").replace("{docs_url}", docs_url())


def welcome_text() -> str:
    return _asset("welcome.md").replace("{docs_url}", docs_url())
