"""Event-B to JML translation and finite refinement checking."""

import json

from ._eb2jml import (
    MutationError,
    ParseError,
    TranslationError,
    main,
    normalize_jml,
    parse,
    trace,
    translate,
)

__all__ = [
    "MutationError",
    "ParseError",
    "TranslationError",
    "check",
    "main",
    "normalize_jml",
    "parse",
    "trace",
    "translate",
]


def check(text, int_range=(0, 1), carriers=None, ceiling=1_000_000, witnesses=5,
          mutation="", event=""):
    """Checks the translation of `text`; returns the report as a dict."""
    from ._eb2jml import check_json

    lo, hi = int_range
    return json.loads(check_json(text, lo, hi, dict(carriers or {}), ceiling, witnesses,
                                 mutation, event))
