"""Offline keyword baseline.

Flags text as debt when any lexicon phrase appears as a whole word. It has no
calibrated probability, so every verdict carries confidence 0.5.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from tagdebt.config import DetectionSettings
from tagdebt.detection.base import Classification, ClassificationInput, Verdict

CONFIDENCE = 0.5


def load_lexicon(path: str | Path | None = None) -> tuple[str, ...]:
    if path is None:
        text = resources.files("tagdebt.data").joinpath("lexicon.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    phrases = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            phrases.append(line.lower())
    return tuple(phrases)


def _phrase_pattern(phrase: str) -> str:
    words = [re.escape(w) for w in phrase.split()]
    return r"(?<!\w)" + r"\s+".join(words) + r"(?!\w)"


class HeuristicDetector:
    def __init__(self, lexicon: tuple[str, ...] | None = None) -> None:
        self.lexicon = lexicon if lexicon is not None else load_lexicon()
        self._pattern = re.compile("|".join(_phrase_pattern(p) for p in self.lexicon), re.IGNORECASE)

    @classmethod
    def from_settings(cls, settings: DetectionSettings) -> HeuristicDetector:
        lexicon_path = settings.plugin_params.get("lexicon")
        return cls(load_lexicon(lexicon_path) if lexicon_path else None)

    def matches(self, text: str) -> list[str]:
        return [m.group(0) for m in self._pattern.finditer(text)]

    def classify(self, item: ClassificationInput) -> Classification:
        label = Verdict.TD if self._pattern.search(item.text) else Verdict.NON_TD
        return Classification(label, CONFIDENCE)


def heuristic_classify(item: ClassificationInput) -> Classification:
    return _default().classify(item)


_DEFAULT: HeuristicDetector | None = None


def _default() -> HeuristicDetector:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = HeuristicDetector()
    return _DEFAULT
