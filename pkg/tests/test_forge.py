import json
import threading

import httpx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import REPO, T0, days, make_issue, seeded_forge
from tagdebt.forge import FakeForge, ForgeError, GitHubForge, Issue, RepoRef


def test_repo_ref_rejects_slashes_and_whitespace():
    with pytest.raises(ValueError):
        RepoRef("ac me", "x")
    with pytest.raises(ValueError):
        RepoRef("acme", "a/b")
    assert RepoRef.parse("acme/widgets", "trunk") == RepoRef("acme", "widgets", "trunk")


def test_issue_rejects_updated_before_created():
    with pytest.raises(ValueError):
        make_issue(created=T0, updated=T0 - days(1))


def test_forge_error_retry_eligibility():
    assert ForgeError("rate_limited").retryable
    assert ForgeError("network").retryable
    for kind in ("not_found", "permission_denied", "invalid_response"):
        assert not ForgeError(kind).retryable


class TestFetchFile:
    def test_round_trip(self):
        forge = seeded_forge(config='{"a": 1}')
        assert forge.fetch_file(REPO, "Bot/config.json", "main") == b'{"a": 1}'

    def test_missing_file_is_absent(self):
        assert seeded_forge().fetch_file(REPO, "Bot/config.json", "main") is None

    def test_reflects_latest_write(self):
        forge = seeded_forge(config="old")
        assert forge.fetch_file(REPO, "Bot/config.json", "main") == b"old"
        forge.put_file(REPO, "Bot/config.json", "new")
        assert forge.fetch_file(REPO, "Bot/config.json", "main") == b"new"

    def test_other_branch_is_separate(self):
        forge = seeded_forge()
        forge.put_file(REPO, "Bot/config.json", "x", branch="dev")
        assert forge.fetch_file(REPO, "Bot/config.json", "main") is None

    @pytest.mark.parametrize("path", ["../secrets", "Bot/../../x", "/etc/passwd", ""])
    def test_rejects_escaping_paths(self, path):
        with pytest.raises(ValueError):
            seeded_forge().fetch_file(REPO, path, "main")


class TestAddLabel:
    def test_inserts(self):
        forge = seeded_forge(make_issue(1))
        forge.add_label(REPO, 1, "TD")
        assert forge.issue(REPO, 1).labels == {"TD"}

    def test_idempotent(self):
        forge = seeded_forge(make_issue(1, labels={"TD"}))
        forge.add_label(REPO, 1, "TD")
        assert forge.issue(REPO, 1).labels == {"TD"}

    def test_missing_issue(self):
        forge = seeded_forge()
        with pytest.raises(ForgeError) as err:
            forge.add_label(REPO, 99, "TD")
        assert err.value.kind == "not_found"

    def test_creates_label_definition(self):
        forge = seeded_forge(make_issue(1))
        forge.add_label(REPO, 1, "TD")
        forge.add_label(REPO, 1, "wontfix")
        defs = forge.label_definitions(REPO)
        assert defs["TD"] == "d93f0b"
        assert "wontfix" in defs

    @given(st.lists(st.text(min_size=1, max_size=8), min_size=1, max_size=5))
    def test_twice_equals_once(self, labels):
        once = seeded_forge(make_issue(1))
        twice = seeded_forge(make_issue(1))
        for label in labels:
            once.add_label(REPO, 1, label)
            twice.add_label(REPO, 1, label)
            twice.add_label(REPO, 1, label)
        assert once.issue(REPO, 1).labels == twice.issue(REPO, 1).labels == set(labels)


class TestPostComment:
    def test_appends_one_bot_comment(self):
        forge = seeded_forge(make_issue(1))
        forge.post_comment(REPO, 1, "Welcome!")
        comments = forge.comments(REPO, 1)
        assert len(comments) == 1
        assert comments[0].author_is_bot and comments[0].body == "Welcome!"

    def test_missing_issue(self):
        with pytest.raises(ForgeError) as err:
            seeded_forge().post_comment(REPO, 404, "x")
        assert err.value.kind == "not_found"

    def test_failure_leaves_no_partial_write(self):
        forge = seeded_forge(make_issue(1))
        forge.fail_next("post_comment", ForgeError("network"))
        with pytest.raises(ForgeError):
            forge.post_comment(REPO, 1, "x")
        assert forge.comments(REPO, 1) == []


class TestListOpenIssues:
    def test_state_filter(self):
        forge = seeded_forge(make_issue(1), make_issue(2, state="closed"))
        assert [i.number for i in forge.list_open_issues(REPO)] == [1]

    def test_empty(self):
        assert seeded_forge().list_open_issues(REPO) == []

    def test_unknown_repo(self):
        with pytest.raises(ForgeError) as err:
            FakeForge().list_open_issues(REPO)
        assert err.value.kind == "not_found"

    @settings(max_examples=50)
    @given(st.lists(st.tuples(st.integers(1, 500), st.booleans(), st.text(max_size=10)), max_size=20, unique_by=lambda t: t[0]))
    def test_round_trip_matches_seed(self, specs):
        seeded = [make_issue(n, title, state="open" if is_open else "closed") for n, is_open, title in specs]
        forge = seeded_forge(*seeded)
        expected = sorted((i for i in seeded if i.is_open), key=lambda i: i.number)
        assert forge.list_open_issues(REPO) == expected


def test_fake_forge_concurrent_writes():
    forge = seeded_forge(*[make_issue(n) for n in range(1, 11)])

    def worker(k):
        for n in range(1, 11):
            forge.add_label(REPO, n, f"l{k}")
            forge.post_comment(REPO, n, f"c{k}")

    threads = [threading.Thread(target=worker, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for n in range(1, 11):
        assert forge.issue(REPO, n).labels == {f"l{k}" for k in range(8)}
        assert len(forge.comments(REPO, n)) == 8


# -- real client, driven through httpx.MockTransport ----------------------


def _issue_json(number, state="open", **extra):
    return {
        "number": number,
        "title": f"issue {number}",
        "body": None,
        "labels": [{"name": "bug"}],
        "state": state,
        "created_at": "2025-01-01T00:00:00Z",
        "updated_at": "2025-01-02T00:00:00Z",
        **extra,
    }


def _client(handler, **kwargs):
    return GitHubForge("tok", transport=httpx.MockTransport(handler), sleep=lambda s: None, **kwargs)


def test_github_fetch_file_raw_and_missing():
    seen = []

    def handler(request):
        seen.append(request)
        if request.url.path.endswith("/Bot/config.json"):
            return httpx.Response(200, content=b"{}")
        return httpx.Response(404, json={"message": "Not Found"})

    forge = _client(handler)
    assert forge.fetch_file(REPO, "Bot/config.json", "main") == b"{}"
    assert forge.fetch_file(REPO, "Bot/other.json", "main") is None
    assert seen[0].url.params["ref"] == "main"
    assert seen[0].headers["authorization"] == "Bearer tok"


def test_github_add_label_creates_definition_first():
    calls = []

    def handler(request):
        calls.append((request.method, request.url.path))
        if request.method == "GET":
            return httpx.Response(404)
        return httpx.Response(201, json={})

    _client(handler).add_label(REPO, 3, "TD")
    assert calls == [
        ("GET", "/repos/acme/widgets/labels/TD"),
        ("POST", "/repos/acme/widgets/labels"),
        ("POST", "/repos/acme/widgets/issues/3/labels"),
    ]


def test_github_list_open_issues_paginates_and_skips_prs():
    def handler(request):
        page = int(request.url.params["page"])
        if page == 1:
            batch = [_issue_json(n) for n in range(1, 101)]
            batch[5] = _issue_json(6, pull_request={"url": "x"})
            return httpx.Response(200, json=batch)
        return httpx.Response(200, json=[_issue_json(101)])

    issues = _client(handler).list_open_issues(REPO)
    assert len(issues) == 100
    assert 6 not in {i.number for i in issues}
    assert issues[0].body == "" and issues[0].labels == {"bug"}


def test_github_retries_rate_limit_then_gives_up():
    attempts = []

    def handler(request):
        attempts.append(1)
        return httpx.Response(429, text="slow down")

    sleeps = []
    forge = GitHubForge("t", transport=httpx.MockTransport(handler), sleep=sleeps.append)
    with pytest.raises(ForgeError) as err:
        forge.post_comment(REPO, 1, "x")
    assert err.value.kind == "rate_limited"
    assert len(attempts) == 3
    assert sleeps == [1.0, 2.0]


def test_github_recovers_after_network_blip():
    attempts = []

    def handler(request):
        attempts.append(1)
        if len(attempts) == 1:
            raise httpx.ConnectError("boom")
        return httpx.Response(201, json={})

    _client(handler).post_comment(REPO, 1, "x")
    assert len(attempts) == 2


def test_github_does_not_retry_permission_errors():
    attempts = []

    def handler(request):
        attempts.append(1)
        return httpx.Response(403, json={"message": "forbidden"})

    with pytest.raises(ForgeError) as err:
        _client(handler).post_comment(REPO, 1, "x")
    assert err.value.kind == "permission_denied"
    assert len(attempts) == 1


def test_github_invalid_issue_payload():
    def handler(request):
        return httpx.Response(200, content=json.dumps([{"number": 1}]).encode())

    with pytest.raises(ForgeError) as err:
        _client(handler).list_open_issues(REPO)
    assert err.value.kind == "invalid_response"


def test_both_forges_satisfy_protocol():
    from tagdebt.forge import Forge

    assert isinstance(FakeForge(), Forge)
    assert isinstance(_client(lambda r: httpx.Response(200)), Forge)
    assert isinstance(make_issue(), Issue)
