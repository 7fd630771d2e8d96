"""Issue-tracker bot that labels self-admitted technical debt and mails about it."""

__version__ = "0.1.0"
