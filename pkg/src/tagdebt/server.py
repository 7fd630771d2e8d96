from __future__ import annotations

import logging
import os
import threading
from typing import Callable

import uvicorn

from tagdebt.bot import Mailer, TagDebtBot
from tagdebt.detection import PluginRegistry
from tagdebt.forge import Forge
from tagdebt.gateway import create_app
from tagdebt.lingering import Clock, RepoSource, SystemClock, run_scheduler

logger = logging.getLogger(__name__)


class StartupError(RuntimeError):
    pass


def parse_bind(bind: str) -> tuple[str, int]:
    host, sep, port = bind.rpartition(":")
    if not sep or not port.isdigit():
        raise StartupError(f"--bind must look like HOST:PORT, got {bind!r}")
    return host or "0.0.0.0", int(port)


def make_server(
    bind: str,
    forge: Forge,
    registry: PluginRegistry,
    *,
    secret: str | bytes | None = None,
    mailer: Mailer | None = None,
    installed_repos: RepoSource = (),
    frequency_hours: int = 24,
    clock_factory: Callable[[threading.Event], Clock] = SystemClock,
) -> tuple[uvicorn.Server, threading.Thread, threading.Event]:
    """Build (but do not start) the HTTP server and the lingering-scan thread."""
    if secret is None:
        secret = os.environ.get("WEBHOOK_SECRET", "")
    if isinstance(secret, str):
        secret = secret.encode("utf-8")
    if not secret:
        raise StartupError("WEBHOOK_SECRET is not set; refusing to accept unauthenticated webhooks")
    if not registry.frozen:
        raise StartupError("plugin registry must be frozen before serving")
    host, port = parse_bind(bind)

    bot = TagDebtBot(forge, registry, mailer)
    app = create_app(bot, secret, bot_login=os.environ.get("BOT_LOGIN"))
    server = uvicorn.Server(uvicorn.Config(app, host=host, port=port, log_level="info"))

    stop = threading.Event()
    scheduler = threading.Thread(
        target=run_scheduler,
        args=(forge, installed_repos, clock_factory(stop), frequency_hours),
        kwargs={"mailer": mailer, "stop": stop},
        name="lingering-scheduler",
        daemon=True,
    )
    return server, scheduler, stop


def run_server(bind: str, forge: Forge, registry: PluginRegistry, **kwargs) -> None:
    server, scheduler, stop = make_server(bind, forge, registry, **kwargs)
    scheduler.start()
    try:
        server.run()
    finally:
        stop.set()
    if not server.started:
        raise StartupError(f"could not bind {bind}")
