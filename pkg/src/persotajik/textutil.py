"""Low-level Unicode helpers shared across the toolkit.

Everything here operates on plain strings and is script-agnostic. The one
non-obvious convention: a "grapheme" throughout this package means a base
character plus any combining marks attached to it (so a decomposed Cyrillic
u-with-macron counts as a single unit, same as its precomposed form).
"""

import unicodedata

ZWNJ = "‌"


def nfc(text: str) -> str:
    """Canonically compose text and strip a leading BOM if present."""
    if text.startswith("﻿"):
        text = text[1:]
    return unicodedata.normalize("NFC", text)


def grapheme_clusters(text: str) -> list[str]:
    """Split text into grapheme clusters (base + trailing combining marks).

    Input is NFC-composed first, so clusters for the scripts handled here
    are almost always single codepoints; the combining-mark grouping covers
    residual decomposed sequences and arbitrary metric inputs.
    """
    text = nfc(text)
    clusters: list[str] = []
    for ch in text:
        if clusters and unicodedata.combining(ch):
            clusters[-1] += ch
        else:
            clusters.append(ch)
    return clusters


def strip_spaces(text: str) -> str:
    """Remove all whitespace (used by the space-insensitive metrics)."""
    return "".join(text.split())
