from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from tagdebt.detection.base import ClassificationInput, Detector, Verdict


@dataclass(frozen=True)
class Metrics:
    """Scores for the TD class. Any ratio with a zero denominator is reported as 0."""

    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def score(pairs: Iterable[tuple[Verdict, Verdict]]) -> Metrics:
    """Score ``(gold, predicted)`` pairs."""
    tp = fp = fn = tn = 0
    for gold, predicted in pairs:
        gold, predicted = Verdict(gold), Verdict(predicted)
        if predicted is Verdict.TD:
            if gold is Verdict.TD:
                tp += 1
            else:
                fp += 1
        elif gold is Verdict.TD:
            fn += 1
        else:
            tn += 1
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    return Metrics(precision, recall, f1, tp, fp, fn, tn)


def evaluate_detector(detector: Detector, corpus: list[tuple[str, Verdict | str]]) -> Metrics:
    if not corpus:
        raise ValueError("corpus must not be empty")
    pairs = []
    for text, gold in corpus:
        predicted = detector.classify(ClassificationInput(text)).label
        pairs.append((Verdict(gold), predicted))
    return score(pairs)


def load_corpus(path: str | Path) -> list[tuple[str, Verdict]]:
    """Read a JSON array of ``{"text": ..., "label": "TD" | "non-TD"}`` records."""
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    return [(r["text"], Verdict(r["label"])) for r in records]
