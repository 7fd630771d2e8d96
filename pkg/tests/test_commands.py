from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tagdebt.commands import Command, CommandKind, addresses_bot, help_text, parse_command

GOLDEN_HELP = (Path(__file__).parent / "fixtures" / "help_golden.txt").read_text()


@pytest.mark.parametrize(
    "body, expected",
    [
        ("/tdbot label", Command(CommandKind.LABEL_AUTO)),
        ("  \n\n  /tdbot label  \nthanks!", Command(CommandKind.LABEL_AUTO)),
        ("/TDBOT LABEL", Command(CommandKind.LABEL_AUTO)),
        ("/tdbot label wontfix", Command(CommandKind.LABEL_EXPLICIT, "wontfix")),
        ("/tdbot label   Needs Design Review  ", Command(CommandKind.LABEL_EXPLICIT, "Needs Design Review")),
        ("/tdbot Label TD", Command(CommandKind.LABEL_EXPLICIT, "TD")),
        ("/tdbot help", Command(CommandKind.HELP)),
        ("/tdbot   HELP ", Command(CommandKind.HELP)),
    ],
)
def test_grammar(body, expected):
    assert parse_command(body) == expected


@pytest.mark.parametrize(
    "body",
    [
        "I think /tdbot label is neat",
        "looks good to me",
        "",
        "   ",
        "> /tdbot label",
        "thanks\n/tdbot label",
        "/tdbotlabel",
        "/tdbot labels",
        "/tdbot help me",
        "/tdbot foo",
        "/tdbot",
    ],
)
def test_not_a_command(body):
    assert parse_command(body) is None


def test_unknown_subcommands_still_address_the_bot():
    assert addresses_bot("/tdbot foo")
    assert addresses_bot("/tdbot")
    assert not addresses_bot("/tdbotx label")
    assert not addresses_bot("hello /tdbot")


def test_help_text_is_golden(monkeypatch):
    monkeypatch.delenv("TAGDEBT_DOCS_URL", raising=False)
    text = help_text()
    assert text == GOLDEN_HELP == help_text()
    assert "/tdbot label" in text
    assert "/tdbot help" in text
    assert "/tdbot label <name>" in text


def test_help_docs_link_override(monkeypatch):
    monkeypatch.setenv("TAGDEBT_DOCS_URL", "https://docs.example.org/tagdebt")
    assert "https://docs.example.org/tagdebt" in help_text()


@given(st.text())
def test_unprefixed_text_never_parses(body):
    first = body.strip().splitlines()[0].strip() if body.strip() else ""
    if not first.lower().startswith("/tdbot"):
        assert parse_command(body) is None


@given(st.text(st.characters(blacklist_categories=("Cc", "Cs", "Zl", "Zp")), min_size=1).filter(lambda s: s.strip()))
def test_explicit_labels_pass_through_verbatim(name):
    name = name.strip()
    assert parse_command(f"/tdbot label {name}") == Command(CommandKind.LABEL_EXPLICIT, name)


@given(st.text())
def test_parse_is_a_function(body):
    assert parse_command(body) == parse_command(body)


def test_explicit_label_invariant():
    with pytest.raises(ValueError):
        Command(CommandKind.LABEL_EXPLICIT)
    with pytest.raises(ValueError):
        Command(CommandKind.HELP, "x")
