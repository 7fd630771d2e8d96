"""Client for a detection model served behind a small REST endpoint.

Wire format: ``POST {"text": ...}`` answered by ``{"label": "TD" | "non-TD",
"confidence": <optional number>}``.
"""

from __future__ import annotations

import math

import httpx

from tagdebt.config import DetectionSettings
from tagdebt.detection.base import Classification, ClassificationInput, DetectorError, Verdict

DEFAULT_TIMEOUT = 30.0


def parse_rest_reply(data: object) -> Classification:
    if not isinstance(data, dict):
        raise DetectorError("bad_response", "reply is not a JSON object")
    label = data.get("label")
    if label not in ("TD", "non-TD"):
        raise DetectorError("bad_response", f"unexpected label {label!r}")
    confidence = data.get("confidence")
    if confidence is not None:
        if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
            raise DetectorError("bad_response", f"confidence is not a number: {confidence!r}")
        if not math.isfinite(confidence) or not 0.0 <= confidence <= 1.0:
            raise DetectorError("bad_response", f"confidence out of range: {confidence!r}")
        confidence = float(confidence)
    return Classification(Verdict(label), confidence)


class RestDetector:
    def __init__(self, settings: DetectionSettings, transport: httpx.BaseTransport | None = None) -> None:
        self.endpoint = settings.plugin_params.get("endpoint", "")
        if not self.endpoint.startswith(("http://", "https://")):
            raise ValueError("the rest plugin needs plugin-params.endpoint set to an HTTP(S) URL")
        self.timeout = float(settings.plugin_params.get("timeout", DEFAULT_TIMEOUT))
        self._transport = transport

    def classify(self, item: ClassificationInput) -> Classification:
        # One retry on timeout only; other failures surface immediately.
        try:
            return self._call(item)
        except DetectorError as exc:
            if exc.kind != "timeout":
                raise
        return self._call(item)

    def _call(self, item: ClassificationInput) -> Classification:
        try:
            with httpx.Client(timeout=self.timeout, transport=self._transport) as client:
                resp = client.post(self.endpoint, json={"text": item.text})
        except httpx.TimeoutException as exc:
            raise DetectorError("timeout", str(exc)) from exc
        except httpx.TransportError as exc:
            raise DetectorError("network", str(exc) or type(exc).__name__) from exc
        if resp.status_code != 200:
            raise DetectorError("bad_response", f"HTTP {resp.status_code}")
        try:
            data = resp.json()
        except ValueError as exc:
            raise DetectorError("bad_response", "reply is not JSON") from exc
        return parse_rest_reply(data)


def remote_classify(item: ClassificationInput, settings: DetectionSettings) -> Classification:
    return RestDetector(settings).classify(item)
