from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Protocol

from tagdebt.config import AnalyzedPart
from tagdebt.forge import Issue, RepoRef


class Verdict(str, Enum):
    TD = "TD"
    NON_TD = "non-TD"

    @property
    def counterpart(self) -> Verdict:
        return Verdict.NON_TD if self is Verdict.TD else Verdict.TD


class DetectorError(Exception):
    KINDS = ("auth", "network", "timeout", "bad_response")

    def __init__(self, kind: str, detail: str = "") -> None:
        if kind not in self.KINDS:
            raise ValueError(f"unknown DetectorError kind {kind!r}")
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind
        self.detail = detail


@dataclass(frozen=True)
class ClassificationInput:
    text: str
    repo: RepoRef | None = None
    issue_number: int | None = None


@dataclass(frozen=True)
class Classification:
    label: Verdict
    confidence: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "label", Verdict(self.label))
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence}")

    @property
    def wire_label(self) -> str:
        return self.label.value


class Detector(Protocol):
    def classify(self, item: ClassificationInput) -> Classification: ...


def select_text(issue: Issue, part: AnalyzedPart | str) -> str:
    part = AnalyzedPart(part)
    if part is AnalyzedPart.TITLE:
        return issue.title
    if part is AnalyzedPart.DESCRIPTION:
        return issue.body
    return f"{issue.title}\n\n{issue.body}"
