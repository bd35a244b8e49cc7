"""Corpus text normalization.

Reduces raw text to inventory letters and single spaces: anything that is
not a letter of the script is stripped (diacritics, digits, punctuation,
foreign characters), the Tajik poetic hyphen is deleted without leaving a
space, and separated Perso-Arabic affixes are reattached to their stem with
a zero-width non-joiner.

Affix data is editable: ``data/affixes.txt`` (one affix per line with a
pre/post side marker), ``data/compounds.txt`` (space-separated compound
halves), ``data/attached_forms.txt`` (attached spellings rewritten to their
joiner form).
"""

import unicodedata
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from .script_model import CharClass, INVENTORIES, Script
from .textutil import ZWNJ, nfc


class ZwnjMode(Enum):
    KEEP = "keep"
    REMOVE = "remove"
    SPACE_REPLACE = "space"


@dataclass(frozen=True)
class NormalizeConfig:
    strip_diacritics: bool = True
    strip_digits_punct: bool = True
    strip_tajik_hyphen: bool = True
    join_affixes: bool = True
    zwnj_mode: ZwnjMode = ZwnjMode.KEEP

    def __post_init__(self):
        if self.join_affixes and self.zwnj_mode is not ZwnjMode.KEEP:
            raise ValueError("join_affixes requires zwnj_mode=KEEP")


DEFAULT_CONFIG = NormalizeConfig()

# Compatibility variants folded onto the inventory letters they denote.
_COMPAT_FOLD = {
    "ي": "ی",  # Arabic yeh -> Farsi yeh
    "ى": "ی",  # alef maksura -> Farsi yeh
    "ك": "ک",  # Arabic kaf -> Farsi kaf
    "ۀ": "ه",  # heh with yeh above -> heh
}

_HYPHENS = "-‐‑"


def _is_digit_or_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("N", "P")


def normalize_text(text: str, script: Script, cfg: NormalizeConfig = DEFAULT_CONFIG) -> str:
    """Normalize one line of text for the given script.

    Output contains only inventory letters, single spaces, and (for
    Perso-Arabic with zwnj_mode=KEEP) the zero-width non-joiner. Unknown
    characters are removed rather than rejected.
    """
    text = nfc(text)
    if script is Script.TAJIK_CYRILLIC:
        text = text.lower()
    else:
        text = "".join(_COMPAT_FOLD.get(ch, ch) for ch in text)

    inv = INVENTORIES[script]
    out: list[str] = []
    for ch in text:
        if ch.isspace():
            out.append(" ")
        elif ch == ZWNJ:
            if script is Script.PERSO_ARABIC and cfg.zwnj_mode is ZwnjMode.KEEP:
                out.append(ch)
            elif script is Script.PERSO_ARABIC and cfg.zwnj_mode is ZwnjMode.SPACE_REPLACE:
                out.append(" ")
            # REMOVE (and any Tajik occurrence): drop, halves stay joined
        elif script is Script.TAJIK_CYRILLIC and cfg.strip_tajik_hyphen and ch in _HYPHENS:
            pass  # delete with no space: к-аз -> каз
        elif ch in inv:
            if inv[ch].char_class is CharClass.DIACRITIC and cfg.strip_diacritics:
                pass  # in-word mark, delete with no space
            else:
                out.append(ch)
        elif not cfg.strip_digits_punct and _is_digit_or_punct(ch):
            out.append(ch)
        else:
            out.append(" ")  # junk separates rather than merges words

    joined = _tidy_zwnj("".join(out))
    collapsed = " ".join(joined.split())
    if script is Script.PERSO_ARABIC and cfg.join_affixes:
        collapsed = join_affixes(collapsed)
    return collapsed


def _tidy_zwnj(text: str) -> str:
    """Collapse joiner runs and drop joiners at word edges, where they are inert."""
    while ZWNJ + ZWNJ in text:
        text = text.replace(ZWNJ + ZWNJ, ZWNJ)
    text = text.replace(" " + ZWNJ, " ").replace(ZWNJ + " ", " ")
    return text.strip(ZWNJ)


@lru_cache(maxsize=None)
def _affix_data() -> tuple[list[tuple[str, str]], set[tuple[str, str]], dict[str, str]]:
    def rows(name: str) -> list[list[str]]:
        text = resources.files("persotajik.data").joinpath(name).read_text("utf-8")
        out = []
        for line in text.splitlines():
            if line.strip() and not line.startswith("#"):
                out.append(line.split("\t"))
        return out

    affixes = [(affix, side) for affix, side in rows("affixes.txt")]
    compounds = {(a, b) for a, b in rows("compounds.txt")}
    attached = {src: dst for src, dst in rows("attached_forms.txt")}
    return affixes, compounds, attached


def _last_piece(token: str) -> str:
    return token.rsplit(ZWNJ, 1)[-1]


def join_affixes(text: str) -> str:
    """Reattach separated Perso-Arabic affixes to their stem with a ZWNJ.

    Handles the configured pre-affixes (verbal prefixes), post-affixes
    (plural marker, object marker, auxiliary), compound-noun pairs, and a
    short list of attached spellings. The auxiliary joins only after a
    stem-final heh; one-letter neighbours are left alone so the standalone
    conjunction is never swallowed.
    """
    affixes, compounds, attached = _affix_data()
    tokens = [attached.get(t, t) for t in text.split(" ") if t]
    pre = [a for a, side in affixes if side == "pre"]
    post = [a for a, side in affixes if side == "post"]

    out: list[str] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if tok in pre and nxt is not None and len(nxt) >= 2:
            tokens[i + 1] = tok + ZWNJ + nxt
            i += 1
            continue
        if nxt is not None and nxt in post and len(_last_piece(tok)) >= 2:
            if nxt != "است" or tok.endswith("ه"):
                tokens[i + 1] = tok + ZWNJ + nxt
                i += 1
                continue
        if nxt is not None and (_last_piece(tok), nxt) in compounds:
            tokens[i + 1] = tok + ZWNJ + nxt
            i += 1
            continue
        out.append(tok)
        i += 1
    return " ".join(out)
