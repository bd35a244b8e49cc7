"""Declarative model of the two scripts.

Holds the grapheme inventories with their character classes, plus the
context-conditioned correspondence rules between Perso-Arabic and
Tajik-Cyrillic. Rules live in ``data/rules.tsv`` (one rule per line,
``direction<TAB>source<TAB>position<TAB>target1|target2|...<TAB>priority``,
``∅`` for the empty target) so they stay editable without touching code.

Inventories and rulesets are immutable after construction and safe to share
across threads.
"""

import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources

from .textutil import ZWNJ, nfc

EMPTY_TARGET_TOKEN = "∅"


class Script(Enum):
    PERSO_ARABIC = "fa"
    TAJIK_CYRILLIC = "tj"


class CharClass(Enum):
    CONSONANT = "consonant"
    VOWEL = "vowel"
    VOWEL_OR_CONSONANT = "vowel_or_consonant"
    DIACRITIC = "diacritic"
    CONTROL = "control"
    GLOTTAL_SIGN = "glottal_sign"


class Direction(Enum):
    FARSI_TO_TAJIK = "fa2tj"
    TAJIK_TO_FARSI = "tj2fa"

    @property
    def source_script(self) -> Script:
        return Script.PERSO_ARABIC if self is Direction.FARSI_TO_TAJIK else Script.TAJIK_CYRILLIC

    @property
    def target_script(self) -> Script:
        return Script.TAJIK_CYRILLIC if self is Direction.FARSI_TO_TAJIK else Script.PERSO_ARABIC


class Position(Enum):
    ANY = "any"
    WORD_INITIAL = "initial"
    WORD_MEDIAL = "medial"
    WORD_FINAL = "final"


class NotInInventory(KeyError):
    """A character (or cluster) is not a known grapheme of the script."""


class MissingRuleError(KeyError):
    """An inventory grapheme has no applicable rule for the position."""


@dataclass(frozen=True)
class Grapheme:
    text: str
    script: Script
    char_class: CharClass

    def __post_init__(self):
        if not (1 <= len(self.text) <= 2):
            raise ValueError(f"grapheme must be 1-2 codepoints, got {self.text!r}")

    def __str__(self) -> str:
        return self.text


# Inventory definitions. Tajik letters are stored lowercase; segmentation
# case-folds, since Perso-Arabic has no case to round-trip through.
_TAJIK_VOWELS = "аеёиӣоуӯэюя"
_TAJIK_CONSONANTS = "бвгғджзйкқлмнпрстфхҳчҷш"
_TAJIK_GLOTTAL = "ъ"

_FA_CONSONANTS = "بپتثجچحخدذرزژسشصضطظغفقکگلمن"
_FA_VOWELS = "آ"
_FA_VOWEL_OR_CONS = "اوهی"
_FA_GLOTTAL = "ءأإؤئع"
_FA_DIACRITICS = "ًٌٍَُِّْٰٕٓٔ"


def _build_inventory(script: Script, groups: dict[CharClass, str]) -> dict[str, Grapheme]:
    inv: dict[str, Grapheme] = {}
    for char_class, letters in groups.items():
        for ch in letters:
            inv[ch] = Grapheme(ch, script, char_class)
    return inv


INVENTORIES: dict[Script, dict[str, Grapheme]] = {
    Script.TAJIK_CYRILLIC: _build_inventory(
        Script.TAJIK_CYRILLIC,
        {
            CharClass.VOWEL: _TAJIK_VOWELS,
            CharClass.CONSONANT: _TAJIK_CONSONANTS,
            CharClass.GLOTTAL_SIGN: _TAJIK_GLOTTAL,
        },
    ),
    Script.PERSO_ARABIC: _build_inventory(
        Script.PERSO_ARABIC,
        {
            CharClass.CONSONANT: _FA_CONSONANTS,
            CharClass.VOWEL: _FA_VOWELS,
            CharClass.VOWEL_OR_CONSONANT: _FA_VOWEL_OR_CONS,
            CharClass.GLOTTAL_SIGN: _FA_GLOTTAL,
            CharClass.DIACRITIC: _FA_DIACRITICS,
            CharClass.CONTROL: ZWNJ,
        },
    ),
}


def inventory(script: Script) -> dict[str, Grapheme]:
    return INVENTORIES[script]


def _fold(text: str, script: Script) -> str:
    text = nfc(text)
    if script is Script.TAJIK_CYRILLIC:
        text = text.lower()
    return text


def classify(cluster: str, script: Script) -> CharClass:
    """Character class of a single grapheme cluster, or NotInInventory."""
    cluster = _fold(cluster, script)
    try:
        return INVENTORIES[script][cluster].char_class
    except KeyError:
        raise NotInInventory(f"{cluster!r} is not a {script.value} grapheme") from None


def segment(text: str, script: Script) -> list[Grapheme]:
    """Split text into inventory graphemes.

    Input is NFC-composed first (decomposed accented Cyrillic arrives as a
    single grapheme) and Tajik is case-folded. Whitespace separates words
    and yields no grapheme. Unknown characters raise NotInInventory.
    """
    inv = INVENTORIES[script]
    out: list[Grapheme] = []
    for ch in _fold(text, script):
        if ch.isspace():
            continue
        g = inv.get(ch)
        if g is None:
            raise NotInInventory(f"{ch!r} (U+{ord(ch):04X}) is not a {script.value} grapheme")
        out.append(g)
    return out


def segment_words(text: str, script: Script) -> list[list[Grapheme]]:
    """Like segment(), but grouped into whitespace-delimited words."""
    return [segment(word, script) for word in _fold(text, script).split()]


@dataclass(frozen=True)
class MappingRule:
    source: Grapheme
    targets: tuple[tuple[Grapheme, ...], ...]
    position: Position = Position.ANY
    priority: int = 0

    def __post_init__(self):
        if not self.targets:
            raise ValueError(f"rule for {self.source} has no targets")
        texts = ["".join(g.text for g in t) for t in self.targets]
        if len(set(texts)) != len(texts):
            raise ValueError(f"rule for {self.source} has duplicate targets: {texts}")

    def target_texts(self) -> list[str]:
        return ["".join(g.text for g in t) for t in self.targets]


@dataclass(frozen=True)
class RuleSet:
    direction: Direction
    rules: tuple[MappingRule, ...]
    lexicon: dict[str, int] | None = None
    _index: dict[tuple[str, Position], MappingRule] = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        index: dict[tuple[str, Position], MappingRule] = {}
        for rule in self.rules:
            key = (rule.source.text, rule.position)
            if key in index:
                raise ValueError(f"duplicate rule for {key}")
            index[key] = rule
        object.__setattr__(self, "_index", index)
        self._check_coverage()

    def _check_coverage(self):
        covered = {src for src, _ in self._index}
        missing = set(INVENTORIES[self.direction.source_script]) - covered
        if missing:
            raise ValueError(
                f"rules for {self.direction.value} do not cover: {sorted(missing)}"
            )

    def lookup(self, source_text: str, position: Position) -> MappingRule:
        """Rule for (grapheme, position); exact position wins over ANY."""
        rule = self._index.get((source_text, position))
        if rule is None:
            rule = self._index.get((source_text, Position.ANY))
        if rule is None:
            if source_text not in INVENTORIES[self.direction.source_script]:
                raise NotInInventory(
                    f"{source_text!r} is not a {self.direction.source_script.value} grapheme"
                )
            raise MissingRuleError(f"no rule for {source_text!r} at {position.value}")
        return rule

    def with_lexicon(self, lexicon: dict[str, int]) -> "RuleSet":
        return RuleSet(self.direction, self.rules, dict(lexicon))


def _parse_target(token: str, script: Script) -> tuple[Grapheme, ...]:
    if token == EMPTY_TARGET_TOKEN:
        return ()
    return tuple(segment(token, script))


def parse_rule_table(lines) -> dict[Direction, list[MappingRule]]:
    """Parse the tab-separated rule table format (see data/rules.tsv)."""
    out: dict[Direction, list[MappingRule]] = {d: [] for d in Direction}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"rule table line {lineno}: expected 5 columns, got {len(parts)}")
        dir_token, source, pos_token, targets_token, priority = parts
        direction = Direction(dir_token)
        position = Position(pos_token)
        src_seg = segment(source, direction.source_script)
        if len(src_seg) != 1:
            raise ValueError(f"rule table line {lineno}: source must be one grapheme")
        targets = tuple(
            _parse_target(t, direction.target_script) for t in targets_token.split("|")
        )
        out[direction].append(
            MappingRule(src_seg[0], targets, position, int(priority))
        )
    return out


@lru_cache(maxsize=None)
def _builtin_rules() -> dict[Direction, tuple[MappingRule, ...]]:
    text = resources.files("persotajik.data").joinpath("rules.tsv").read_text("utf-8")
    parsed = parse_rule_table(text.splitlines())
    return {d: tuple(rules) for d, rules in parsed.items()}


def builtin_ruleset(direction: Direction, lexicon: dict[str, int] | None = None) -> RuleSet:
    """The shipped ruleset for a direction, optionally with a lexicon."""
    return RuleSet(direction, _builtin_rules()[direction], lexicon)


def load_ruleset(path, direction: Direction, lexicon: dict[str, int] | None = None) -> RuleSet:
    """Load a ruleset for one direction from a rule table file."""
    with open(path, encoding="utf-8") as f:
        parsed = parse_rule_table(f)
    return RuleSet(direction, tuple(parsed[direction]), lexicon)


def reorder_by_letter_frequency(ruleset: RuleSet, lexicon: dict[str, int]) -> RuleSet:
    """Reorder each rule's targets by letter frequency observed in a lexicon.

    Frequencies are counted over the lexicon's word forms weighted by their
    counts; a target alternative is scored by its letters' summed frequency.
    Ties keep the shipped order, so an empty lexicon is a no-op.
    """
    freq: dict[str, int] = {}
    for form, count in lexicon.items():
        for ch in nfc(form):
            freq[ch] = freq.get(ch, 0) + count

    def score(target: tuple[Grapheme, ...]) -> int:
        return sum(freq.get(g.text, 0) for g in target)

    rules = []
    for rule in ruleset.rules:
        order = sorted(range(len(rule.targets)), key=lambda i: (-score(rule.targets[i]), i))
        rules.append(
            MappingRule(rule.source, tuple(rule.targets[i] for i in order),
                        rule.position, rule.priority)
        )
    return RuleSet(ruleset.direction, tuple(rules), ruleset.lexicon)


def word_positions(n: int) -> list[Position]:
    """Position label for each index of an n-grapheme word segment."""
    if n == 1:
        return [Position.WORD_INITIAL]
    return (
        [Position.WORD_INITIAL]
        + [Position.WORD_MEDIAL] * (n - 2)
        + [Position.WORD_FINAL]
    )
