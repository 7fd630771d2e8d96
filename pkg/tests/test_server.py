import socket
import threading
import time

import httpx
import pytest
from fastapi.testclient import TestClient

from helpers import REPO, comment_payload, make_issue, opened_payload, seeded_forge, to_bytes
from tagdebt.bot import TagDebtBot
from tagdebt.detection import PluginRegistry, default_registry
from tagdebt.gateway import create_app, sign
from tagdebt.server import StartupError, make_server, parse_bind

SECRET = b"hunter2-but-longer"


class RecordingBot(TagDebtBot):
    def __init__(self, forge):
        super().__init__(forge, default_registry())
        self.seen = []

    def handle(self, event):
        self.seen.append(event)
        return super().handle(event)


def post(client, event_name, body, secret=SECRET, signature=None):
    headers = {
        "X-GitHub-Event": event_name,
        "X-GitHub-Delivery": "d-1",
        "X-Hub-Signature-256": signature if signature is not None else sign(body, secret),
        "Content-Type": "application/json",
    }
    return client.post("/webhook", content=body, headers=headers)


@pytest.fixture
def rig():
    issue = make_issue(1, body="temporary hack")
    forge = seeded_forge(issue)
    bot = RecordingBot(forge)
    return issue, forge, bot, TestClient(create_app(bot, SECRET, bot_login="tagdebt[bot]"))


def test_healthz(rig):
    *_, client = rig
    response = client.get("/healthz")
    assert response.status_code == 200 and response.text == "ok"


def test_label_command_end_to_end(rig):
    issue, forge, bot, client = rig
    response = post(client, "issue_comment", to_bytes(comment_payload(issue, "/tdbot label")))
    assert response.status_code == 202
    assert forge.issue(REPO, 1).labels == {"TD"}
    assert len(bot.seen) == 1


@pytest.mark.parametrize("signature", ["", "sha256=" + "0" * 64, "sha1=abc"])
def test_bad_signature_is_rejected_without_dispatch(rig, signature):
    issue, forge, bot, client = rig
    response = post(client, "issue_comment", to_bytes(comment_payload(issue, "/tdbot label")), signature=signature)
    assert response.status_code == 401
    assert bot.seen == [] and forge.journal == []


def test_wrong_secret_is_rejected(rig):
    issue, forge, bot, client = rig
    response = post(client, "issues", to_bytes(opened_payload(issue)), secret=b"other")
    assert response.status_code == 401
    assert bot.seen == []


def test_ignored_event(rig):
    issue, forge, bot, client = rig
    response = post(client, "issue_comment", to_bytes(comment_payload(issue, "nice", login="tagdebt[bot]")))
    assert response.status_code == 200 and response.text == "ignored"
    assert bot.seen == []
    assert post(client, "push", b"{}").status_code == 200


def test_malformed_payload(rig):
    *_, bot, client = rig
    response = post(client, "issues", b'{"action": "opened"')
    assert response.status_code == 400
    assert bot.seen == []


def test_issue_opened_gets_welcome(rig):
    issue, forge, bot, client = rig
    assert post(client, "issues", to_bytes(opened_payload(issue))).status_code == 202
    assert len(forge.comments(REPO, 1)) == 1


def test_empty_secret_refused():
    with pytest.raises(ValueError):
        create_app(TagDebtBot(seeded_forge(), default_registry()), b"")


# -- server assembly -----------------------------------------------------


def test_parse_bind():
    assert parse_bind("127.0.0.1:8080") == ("127.0.0.1", 8080)
    assert parse_bind(":9000") == ("0.0.0.0", 9000)
    with pytest.raises(StartupError):
        parse_bind("localhost")


def test_missing_secret_is_startup_error(monkeypatch):
    monkeypatch.delenv("WEBHOOK_SECRET", raising=False)
    with pytest.raises(StartupError):
        make_server("127.0.0.1:0", seeded_forge(), default_registry())


def test_unfrozen_registry_is_startup_error():
    with pytest.raises(StartupError):
        make_server("127.0.0.1:0", seeded_forge(), PluginRegistry(), secret="s")


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_real_server_answers_health_and_webhooks():
    port = free_port()
    issue = make_issue(1, body="temporary hack")
    forge = seeded_forge(issue)
    server, scheduler, stop = make_server(f"127.0.0.1:{port}", forge, default_registry(), secret=SECRET, installed_repos=[REPO])
    server.config.log_level = "warning"
    thread = threading.Thread(target=server.run, daemon=True)
    scheduler.start()
    thread.start()
    try:
        deadline = time.monotonic() + 10
        while not server.started and time.monotonic() < deadline:
            time.sleep(0.02)
        assert server.started
        base = f"http://127.0.0.1:{port}"
        assert httpx.get(f"{base}/healthz").text == "ok"
        body = to_bytes(comment_payload(issue, "/tdbot label"))
        headers = {"X-GitHub-Event": "issue_comment", "X-Hub-Signature-256": sign(body, SECRET)}
        assert httpx.post(f"{base}/webhook", content=body, headers=headers).status_code == 202
        deadline = time.monotonic() + 5
        while forge.issue(REPO, 1).labels != {"TD"} and time.monotonic() < deadline:
            time.sleep(0.02)
        assert forge.issue(REPO, 1).labels == {"TD"}
    finally:
        server.should_exit = True
        stop.set()
        thread.join(5)
        scheduler.join(5)
    assert not scheduler.is_alive()
