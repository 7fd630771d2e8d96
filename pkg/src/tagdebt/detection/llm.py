"""Prompt a hosted chat model (OpenAI, Anthropic or Gemini) to classify issue text.

The model must answer with exactly ``TD`` or ``non-TD``; anything else is a
``bad_response``. Free text is never coerced into a label.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path
from typing import Any

import httpx

from tagdebt.config import DetectionSettings
from tagdebt.detection.base import Classification, ClassificationInput, DetectorError, Verdict

DEFAULT_TIMEOUT = 30.0

API_KEY_ENV = {
    "openai": "OPENAI_API_KEY",
    "anthropic": "ANTHROPIC_API_KEY",
    "gemini": "GEMINI_API_KEY",
}


def load_prompt(path: str | Path | None = None) -> str:
    if path:
        return Path(path).read_text(encoding="utf-8")
    return resources.files("tagdebt.data").joinpath("prompt.txt").read_text(encoding="utf-8")


def parse_llm_answer(answer: str) -> Classification:
    answer = answer.strip()
    if answer not in ("TD", "non-TD"):
        raise DetectorError("bad_response", f"model answered {answer[:80]!r}")
    return Classification(Verdict(answer))


class LlmDetector:
    def __init__(self, settings: DetectionSettings, transport: httpx.BaseTransport | None = None) -> None:
        params = settings.plugin_params
        self.provider = params.get("provider", "openai").lower()
        if self.provider not in API_KEY_ENV:
            raise ValueError(f"unsupported LLM provider {self.provider!r}; choose one of {sorted(API_KEY_ENV)}")
        if not params.get("model"):
            raise ValueError("the llm plugin needs plugin-params.model")
        self.model = params["model"]
        self.prompt = load_prompt(params.get("prompt-file"))
        self.timeout = float(params.get("timeout", DEFAULT_TIMEOUT))
        self.base_url = params.get("base-url")
        self._transport = transport

    @property
    def api_key_env(self) -> str:
        return API_KEY_ENV[self.provider]

    def classify(self, item: ClassificationInput) -> Classification:
        api_key = os.environ.get(self.api_key_env)
        if not api_key:
            raise DetectorError("auth", f"{self.api_key_env} is not set")
        try:
            answer = self._ask(api_key, item.text)
        except DetectorError as exc:
            if exc.kind != "timeout":
                raise
            answer = self._ask(api_key, item.text)
        return parse_llm_answer(answer)

    def _ask(self, api_key: str, text: str) -> str:
        url, headers, payload = self._build_request(api_key, text)
        try:
            with httpx.Client(timeout=self.timeout, transport=self._transport) as client:
                resp = client.post(url, headers=headers, json=payload)
        except httpx.TimeoutException as exc:
            raise DetectorError("timeout", str(exc)) from exc
        except httpx.TransportError as exc:
            raise DetectorError("network", str(exc) or type(exc).__name__) from exc
        if resp.status_code in (401, 403):
            raise DetectorError("auth", f"HTTP {resp.status_code}")
        if resp.status_code != 200:
            raise DetectorError("bad_response", f"HTTP {resp.status_code}")
        try:
            return self._extract(resp.json())
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise DetectorError("bad_response", f"unexpected reply shape: {exc}") from exc

    def _build_request(self, api_key: str, text: str) -> tuple[str, dict[str, str], dict[str, Any]]:
        if self.provider == "openai":
            base = self.base_url or "https://api.openai.com/v1"
            return (
                f"{base}/chat/completions",
                {"Authorization": f"Bearer {api_key}"},
                {
                    "model": self.model,
                    "messages": [
                        {"role": "system", "content": self.prompt},
                        {"role": "user", "content": text},
                    ],
                },
            )
        if self.provider == "anthropic":
            base = self.base_url or "https://api.anthropic.com/v1"
            return (
                f"{base}/messages",
                {"x-api-key": api_key, "anthropic-version": "2023-06-01"},
                {
                    "model": self.model,
                    "max_tokens": 8,
                    "system": self.prompt,
                    "messages": [{"role": "user", "content": text}],
                },
            )
        base = self.base_url or "https://generativelanguage.googleapis.com/v1beta"
        return (
            f"{base}/models/{self.model}:generateContent",
            {"x-goog-api-key": api_key},
            {
                "systemInstruction": {"parts": [{"text": self.prompt}]},
                "contents": [{"role": "user", "parts": [{"text": text}]}],
            },
        )

    def _extract(self, data: dict[str, Any]) -> str:
        if self.provider == "openai":
            return data["choices"][0]["message"]["content"]
        if self.provider == "anthropic":
            return "".join(block["text"] for block in data["content"] if block.get("type") == "text")
        return data["candidates"][0]["content"]["parts"][0]["text"]


def llm_classify(item: ClassificationInput, settings: DetectionSettings) -> Classification:
    return LlmDetector(settings).classify(item)
