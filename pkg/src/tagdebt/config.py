"""Per-repository bot configuration read from ``Bot/config.json``.

Keys are kebab-case. Any field left out of the file takes its default, so ``{}``
is a complete configuration. Unknown keys are errors rather than warnings, which
catches typos such as ``send-email``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Any, Callable

from tagdebt.forge import Forge, RepoRef

CONFIG_PATH = "Bot/config.json"
LINGERING_TEMPLATE_KEY = "lingering"

_ADDRESS_RE = re.compile(r"^[^@\s]+@[^@\s]+$")


class AnalyzedPart(str, Enum):
    TITLE = "title"
    DESCRIPTION = "description"
    BOTH = "both"


class LingeringMode(str, Enum):
    CREATION = "creation"
    LAST_MODIFIED = "last_modified"


class ConfigError(Exception):
    KINDS = ("malformed_json", "unknown_field", "invalid_value", "invariant_violation")

    def __init__(self, kind: str, path: str, detail: str) -> None:
        super().__init__(f"{kind} at {path or '<root>'}: {detail}")
        self.kind = kind
        self.path = path
        self.detail = detail


@dataclass(frozen=True)
class DetectionSettings:
    type: str = "heuristic"
    analyzed_part: AnalyzedPart = AnalyzedPart.BOTH
    plugin_params: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class EmailSettings:
    send_emails: bool = False
    when_to_send: frozenset[str] = frozenset({"TD"})
    recipients: tuple[str, ...] = ()
    subject_templates: dict[str, str] = field(default_factory=dict)
    body_templates: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class LingeringSettings:
    threshold_days: int = 30
    mode: LingeringMode = LingeringMode.CREATION
    check_frequency_hours: int = 24


@dataclass(frozen=True)
class BotConfig:
    detection: DetectionSettings = field(default_factory=DetectionSettings)
    email: EmailSettings = field(default_factory=EmailSettings)
    lingering: LingeringSettings = field(default_factory=LingeringSettings)
    welcome_comment: bool = True
    auto_label_on_creation: bool = False


def default_config() -> BotConfig:
    return BotConfig()


# -- parsing -------------------------------------------------------------


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _object(value: Any, path: str, allowed: set[str]) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError("invalid_value", path, "expected a JSON object")
    for key in value:
        if key not in allowed:
            raise ConfigError("unknown_field", _join(path, key), f"unknown field {key!r}")
    return value


def _bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError("invalid_value", path, "expected true or false")
    return value


def _string(value: Any, path: str, *, non_empty: bool = False) -> str:
    if not isinstance(value, str):
        raise ConfigError("invalid_value", path, "expected a string")
    if non_empty and not value.strip():
        raise ConfigError("invalid_value", path, "must not be empty")
    return value


def _positive_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("invalid_value", path, "expected an integer")
    if value < 1:
        raise ConfigError("invalid_value", path, f"must be >= 1, got {value}")
    return value


def _enum(enum: type[Enum], value: Any, path: str) -> Any:
    try:
        return enum(value)
    except ValueError:
        choices = ", ".join(repr(m.value) for m in enum)
        raise ConfigError("invalid_value", path, f"expected one of {choices}, got {value!r}") from None


def _string_map(value: Any, path: str) -> dict[str, str]:
    if not isinstance(value, dict):
        raise ConfigError("invalid_value", path, "expected a JSON object")
    return {k: _string(v, _join(path, k)) for k, v in value.items()}


def _string_list(value: Any, path: str, check: Callable[[str, str], None] | None = None) -> list[str]:
    if not isinstance(value, list):
        raise ConfigError("invalid_value", path, "expected a JSON array")
    out = []
    for idx, item in enumerate(value):
        item_path = _join(path, str(idx))
        item = _string(item, item_path, non_empty=True)
        if check:
            check(item, item_path)
        out.append(item)
    return out


def _check_address(address: str, path: str) -> None:
    if not _ADDRESS_RE.match(address):
        raise ConfigError("invalid_value", path, f"not an email address: {address!r}")


def _parse_detection(raw: Any, path: str) -> DetectionSettings:
    obj = _object(raw, path, {"type", "analyzed-part", "plugin-params"})
    base = DetectionSettings()
    return DetectionSettings(
        type=_string(obj["type"], _join(path, "type"), non_empty=True) if "type" in obj else base.type,
        analyzed_part=(
            _enum(AnalyzedPart, obj["analyzed-part"], _join(path, "analyzed-part"))
            if "analyzed-part" in obj
            else base.analyzed_part
        ),
        plugin_params=(
            _string_map(obj["plugin-params"], _join(path, "plugin-params"))
            if "plugin-params" in obj
            else base.plugin_params
        ),
    )


def _parse_email(raw: Any, path: str) -> EmailSettings:
    obj = _object(
        raw,
        path,
        {"send-emails", "when-to-send", "email-info", "email-subject-template", "email-body-template"},
    )
    base = EmailSettings()
    send = _bool(obj["send-emails"], _join(path, "send-emails")) if "send-emails" in obj else base.send_emails
    when = (
        frozenset(_string_list(obj["when-to-send"], _join(path, "when-to-send")))
        if "when-to-send" in obj
        else base.when_to_send
    )
    recipients = base.recipients
    if "email-info" in obj:
        info_path = _join(path, "email-info")
        info = _object(obj["email-info"], info_path, {"recipients"})
        if "recipients" in info:
            recipients = tuple(_string_list(info["recipients"], _join(info_path, "recipients"), _check_address))
    templates = {}
    for key in ("email-subject-template", "email-body-template"):
        tpl_path = _join(path, key)
        templates[key] = _string_map(obj[key], tpl_path) if key in obj else {}
        for label in templates[key]:
            if label not in when and label != LINGERING_TEMPLATE_KEY:
                raise ConfigError(
                    "invariant_violation",
                    _join(tpl_path, label),
                    f"template label {label!r} is neither in when-to-send nor {LINGERING_TEMPLATE_KEY!r}",
                )
    return EmailSettings(
        send_emails=send,
        when_to_send=when,
        recipients=recipients,
        subject_templates=templates["email-subject-template"],
        body_templates=templates["email-body-template"],
    )


def _parse_lingering(raw: Any, path: str) -> LingeringSettings:
    obj = _object(raw, path, {"lingering-issue-threshold", "lingering-mode", "lingering-check-frequency"})
    base = LingeringSettings()
    return LingeringSettings(
        threshold_days=(
            _positive_int(obj["lingering-issue-threshold"], _join(path, "lingering-issue-threshold"))
            if "lingering-issue-threshold" in obj
            else base.threshold_days
        ),
        mode=(
            _enum(LingeringMode, obj["lingering-mode"], _join(path, "lingering-mode"))
            if "lingering-mode" in obj
            else base.mode
        ),
        check_frequency_hours=(
            _positive_int(obj["lingering-check-frequency"], _join(path, "lingering-check-frequency"))
            if "lingering-check-frequency" in obj
            else base.check_frequency_hours
        ),
    )


def parse_config(raw: bytes | str) -> BotConfig:
    """Parse the contents of a config file, filling every missing field with its default.

    Raises:
        ConfigError: ``malformed_json`` when ``raw`` is not a JSON object, otherwise
            ``unknown_field``, ``invalid_value`` or ``invariant_violation`` with the
            dotted path of the offending field.
    """
    try:
        text = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
        data = json.loads(text)
    except (UnicodeDecodeError, ValueError, RecursionError) as exc:
        raise ConfigError("malformed_json", "", str(exc)) from None
    if not isinstance(data, dict):
        raise ConfigError("malformed_json", "", "the configuration must be a JSON object")
    obj = _object(data, "", {"detection", "email", "lingering", "welcome-comment", "auto-label-on-creation"})
    base = default_config()
    return BotConfig(
        detection=_parse_detection(obj["detection"], "detection") if "detection" in obj else base.detection,
        email=_parse_email(obj["email"], "email") if "email" in obj else base.email,
        lingering=_parse_lingering(obj["lingering"], "lingering") if "lingering" in obj else base.lingering,
        welcome_comment=(
            _bool(obj["welcome-comment"], "welcome-comment") if "welcome-comment" in obj else base.welcome_comment
        ),
        auto_label_on_creation=(
            _bool(obj["auto-label-on-creation"], "auto-label-on-creation")
            if "auto-label-on-creation" in obj
            else base.auto_label_on_creation
        ),
    )


def config_to_dict(config: BotConfig) -> dict[str, Any]:
    email = config.email
    return {
        "detection": {
            "type": config.detection.type,
            "analyzed-part": config.detection.analyzed_part.value,
            "plugin-params": dict(sorted(config.detection.plugin_params.items())),
        },
        "email": {
            "send-emails": email.send_emails,
            "when-to-send": sorted(email.when_to_send),
            "email-info": {"recipients": list(email.recipients)},
            "email-subject-template": dict(sorted(email.subject_templates.items())),
            "email-body-template": dict(sorted(email.body_templates.items())),
        },
        "lingering": {
            "lingering-issue-threshold": config.lingering.threshold_days,
            "lingering-mode": config.lingering.mode.value,
            "lingering-check-frequency": config.lingering.check_frequency_hours,
        },
        "welcome-comment": config.welcome_comment,
        "auto-label-on-creation": config.auto_label_on_creation,
    }


def serialize_config(config: BotConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2, ensure_ascii=False) + "\n"


def default_config_text() -> str:
    """The shipped golden copy of the defaults."""
    return resources.files("tagdebt.data").joinpath("default_config.json").read_text(encoding="utf-8")


def resolve_config(forge: Forge, repo: RepoRef) -> BotConfig:
    """Read ``Bot/config.json`` from the default branch on every call.

    Only a missing file falls back to the defaults; a file that fails to parse
    raises ``ConfigError`` so the caller can report the misconfiguration.
    """
    raw = forge.fetch_file(repo, CONFIG_PATH, repo.default_branch)
    if raw is None:
        return default_config()
    return parse_config(raw)
