"""Shared string normalization for entities, values, and section titles."""

import re

_WS = re.compile(r"\s+")


def normalize(s: str) -> str:
    """Lowercase, trim, and collapse internal whitespace."""
    return _WS.sub(" ", s.strip().lower())
