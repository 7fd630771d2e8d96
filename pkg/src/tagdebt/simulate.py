"""Replay a scripted sequence of webhook payloads against the in-memory forge.

A scenario is a JSON array. Each entry has an ISO ``at`` timestamp plus either
``event`` (a webhook payload, optionally with ``name`` set to the event header;
otherwise it is inferred from whether a ``comment`` is present) or ``config``
(an object written to ``Bot/config.json`` of ``repo`` from that point on).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Any

from tagdebt.bot import HandlerOutcome, TagDebtBot
from tagdebt.detection import PluginRegistry, default_registry
from tagdebt.forge import FakeForge, RepoRef, format_timestamp, parse_timestamp
from tagdebt.gateway import EventKind, WebhookEnvelope, parse_event
from tagdebt.lingering import FakeClock
from tagdebt.notifier import OutboxMailer

CONFIG_PATH = "Bot/config.json"


@dataclass
class SimulationStep:
    at: str
    event_name: str
    issue_number: int | None
    outcome: HandlerOutcome

    def __str__(self) -> str:
        number = f"#{self.issue_number}" if self.issue_number is not None else "-"
        return f"{self.at}\t{self.event_name}\t{number}\t{self.outcome}"


@dataclass
class SimulationResult:
    steps: list[SimulationStep]
    forge: FakeForge
    outbox: OutboxMailer


def run_scenario(
    entries: list[dict[str, Any]],
    *,
    config: bytes | None = None,
    registry: PluginRegistry | None = None,
) -> SimulationResult:
    clock = FakeClock()
    forge = FakeForge(clock=clock.now)
    outbox = OutboxMailer()
    bot = TagDebtBot(forge, registry or default_registry(), outbox, clock=clock.now)
    seen: set[str] = set()
    steps = []

    def ensure_repo(repo: RepoRef) -> None:
        if repo.full_name not in seen:
            seen.add(repo.full_name)
            forge.add_repo(repo)
            if config is not None:
                forge.put_file(repo, CONFIG_PATH, config)

    for idx, entry in enumerate(entries):
        if "at" not in entry:
            raise ValueError(f"scenario entry {idx} has no 'at' timestamp")
        clock.set(parse_timestamp(entry["at"]))
        at = format_timestamp(clock.now())
        if "config" in entry:
            repo = RepoRef.parse(entry["repo"], entry.get("default_branch", "main"))
            ensure_repo(repo)
            forge.put_file(repo, CONFIG_PATH, json.dumps(entry["config"]))
            continue
        payload = entry["event"]
        name = entry.get("name") or ("issue_comment" if "comment" in payload else "issues")
        event = parse_event(WebhookEnvelope(name, json.dumps(payload).encode("utf-8")), forge.bot_login)
        number = None
        if event.kind is EventKind.IGNORED:
            outcome = bot.handle(event)
        else:
            ensure_repo(event.repo)
            current = forge.upsert_issue(event.issue)
            number = current.number
            outcome = bot.handle(dataclasses.replace(event, issue=current))
        steps.append(SimulationStep(at, name, number, outcome))
    return SimulationResult(steps, forge, outbox)
