"""HTTP adapter for a GitHub-compatible REST API.

The installation-token handshake is left to whoever builds the client: pass a
ready token (``GITHUB_TOKEN`` by default). The client keeps no state between
calls beyond the shared ``httpx.Client``.
"""

from __future__ import annotations

import logging
import os
import time
from typing import Any, Callable
from urllib.parse import quote

import httpx

from tagdebt.forge.base import FALLBACK_LABEL_COLOR, LABEL_COLORS, check_repo_path
from tagdebt.forge.models import DEFAULT_WEB_BASE, ForgeError, Issue, IssueState, RepoRef, parse_timestamp

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 3


class GitHubForge:
    def __init__(
        self,
        token: str | None = None,
        *,
        api_base: str = "https://api.github.com",
        web_base: str = DEFAULT_WEB_BASE,
        transport: httpx.BaseTransport | None = None,
        timeout: float = 15.0,
        sleep: Callable[[float], None] = time.sleep,
        backoff_base: float = 1.0,
    ) -> None:
        token = token if token is not None else os.environ.get("GITHUB_TOKEN")
        headers = {
            "Accept": "application/vnd.github+json",
            "X-GitHub-Api-Version": "2022-11-28",
            "User-Agent": "tagdebt-bot",
        }
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self.web_base = web_base
        self._http = httpx.Client(base_url=api_base, headers=headers, timeout=timeout, transport=transport)
        self._sleep = sleep
        self._backoff_base = backoff_base

    def close(self) -> None:
        self._http.close()

    def fetch_file(self, repo: RepoRef, path: str, branch: str) -> bytes | None:
        check_repo_path(path)
        resp = self._request(
            "GET",
            f"/repos/{repo.owner}/{repo.name}/contents/{quote(path)}",
            params={"ref": branch},
            headers={"Accept": "application/vnd.github.raw+json", "Cache-Control": "no-cache"},
            allow_404=True,
        )
        if resp.status_code == 404:
            return None
        return resp.content

    def add_label(self, repo: RepoRef, issue_number: int, label: str) -> None:
        if not label:
            raise ValueError("label must be non-empty")
        self._ensure_label(repo, label)
        self._request(
            "POST",
            f"/repos/{repo.owner}/{repo.name}/issues/{issue_number}/labels",
            json={"labels": [label]},
        )

    def remove_label(self, repo: RepoRef, issue_number: int, label: str) -> None:
        # 404 here means the label was not on the issue, which is the desired end state.
        self._request(
            "DELETE",
            f"/repos/{repo.owner}/{repo.name}/issues/{issue_number}/labels/{quote(label, safe='')}",
            allow_404=True,
        )

    def post_comment(self, repo: RepoRef, issue_number: int, body: str) -> None:
        if not body:
            raise ValueError("comment body must be non-empty")
        self._request(
            "POST",
            f"/repos/{repo.owner}/{repo.name}/issues/{issue_number}/comments",
            json={"body": body},
        )

    def list_open_issues(self, repo: RepoRef) -> list[Issue]:
        issues: list[Issue] = []
        page = 1
        while True:
            resp = self._request(
                "GET",
                f"/repos/{repo.owner}/{repo.name}/issues",
                params={"state": "open", "per_page": 100, "page": page},
            )
            batch = self._json(resp)
            if not isinstance(batch, list):
                raise ForgeError("invalid_response", "expected a list of issues")
            for item in batch:
                if "pull_request" in item:
                    continue
                issues.append(self._to_issue(repo, item))
            if len(batch) < 100:
                return issues
            page += 1

    def _ensure_label(self, repo: RepoRef, label: str) -> None:
        resp = self._request(
            "GET",
            f"/repos/{repo.owner}/{repo.name}/labels/{quote(label, safe='')}",
            allow_404=True,
        )
        if resp.status_code != 404:
            return
        color = LABEL_COLORS.get(label, FALLBACK_LABEL_COLOR)
        # 422 means someone created it concurrently.
        self._request(
            "POST",
            f"/repos/{repo.owner}/{repo.name}/labels",
            json={"name": label, "color": color},
            allow_status=(422,),
        )

    def _to_issue(self, repo: RepoRef, item: dict[str, Any]) -> Issue:
        try:
            return Issue(
                repo=repo,
                number=item["number"],
                title=item["title"],
                body=item.get("body") or "",
                labels=frozenset(lbl["name"] for lbl in item.get("labels", [])),
                state=IssueState(item["state"]),
                created_at=parse_timestamp(item["created_at"]),
                updated_at=parse_timestamp(item["updated_at"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ForgeError("invalid_response", f"malformed issue record: {exc}") from exc

    @staticmethod
    def _json(resp: httpx.Response) -> Any:
        try:
            return resp.json()
        except ValueError as exc:
            raise ForgeError("invalid_response", "response body is not JSON") from exc

    def _request(
        self,
        method: str,
        url: str,
        *,
        allow_404: bool = False,
        allow_status: tuple[int, ...] = (),
        **kwargs: Any,
    ) -> httpx.Response:
        for attempt in range(1, MAX_ATTEMPTS + 1):
            try:
                resp = self._http.request(method, url, **kwargs)
                self._check(resp, allow_404, allow_status)
                return resp
            except httpx.TransportError as exc:
                error = ForgeError("network", str(exc) or type(exc).__name__)
            except ForgeError as exc:
                error = exc
            if not error.retryable or attempt == MAX_ATTEMPTS:
                raise error
            delay = self._backoff_base * 2 ** (attempt - 1)
            logger.warning("%s %s failed (%s); retrying in %.1fs", method, url, error.kind, delay)
            self._sleep(delay)
        raise AssertionError("unreachable")

    @staticmethod
    def _check(resp: httpx.Response, allow_404: bool, allow_status: tuple[int, ...]) -> None:
        code = resp.status_code
        if code < 400 or code in allow_status or (code == 404 and allow_404):
            return
        detail = f"HTTP {code}: {resp.text[:200]}"
        if code == 404:
            raise ForgeError("not_found", detail)
        if code == 429 or (code == 403 and resp.headers.get("x-ratelimit-remaining") == "0"):
            raise ForgeError("rate_limited", detail)
        if code in (401, 403):
            raise ForgeError("permission_denied", detail)
        if code >= 500:
            raise ForgeError("network", detail)
        raise ForgeError("invalid_response", detail)
