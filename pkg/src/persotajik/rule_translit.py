"""Deterministic transliterators.

Two engines over the shipped correspondence rules:

* a naive one-to-one baseline that replaces every grapheme with its
  top-ranked target (lossy by design, useful as a floor), and
* an overgenerating lattice that expands all rule-licensed spellings per
  word and rescores them against a frequency lexicon, falling back to a
  letter-priority heuristic when nothing matches.

Going into Perso-Arabic, identical adjacent consonants may collapse into a
single written letter; coming out of it, the lattice inserts optional short
vowels after consonants, since the source script does not write them.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .script_model import (
    CharClass,
    Direction,
    Grapheme,
    Position,
    RuleSet,
    builtin_ruleset,
    segment_words,
    word_positions,
)
from .textutil import nfc

LEXICON_BONUS = 20.0  # any lexical match outranks any rule-priority score
DEFAULT_CAP = 10_000

# Optional epenthetic vowels offered after consonant-like graphemes when the
# source script leaves short vowels unwritten.
_EPENTHESIS = (("", 0), ("а", 1), ("и", 2), ("у", 3), ("е", 4))
_EPENTHESIS_AFTER = (CharClass.CONSONANT, CharClass.VOWEL_OR_CONSONANT)

# Suffix stripping used as the morphological fallback before lexicon lookup.
_STRIP_AFFIXES = {
    "fa": {"suffixes": ("های", "ها", "را"), "prefixes": ("نمی", "می")},
    "tj": {"suffixes": ("ҳои", "ҳо", "ро", "и"), "prefixes": ("наме", "ме")},
}


class LatticeOverflow(RuntimeError):
    """Full expansion of a word lattice would exceed the configured cap."""


@dataclass(frozen=True)
class WordLattice:
    """Candidate slots for one word; every slot holds (text, priority) options."""

    word: str
    slots: tuple[tuple[tuple[str, int], ...], ...]

    @property
    def expansion_count(self) -> int:
        count = 1
        for slot in self.slots:
            count *= len(slot)
        return count

    def expand(self, cap: int = DEFAULT_CAP) -> list[tuple[str, int]]:
        """All (candidate, priority-sum) expansions; LatticeOverflow above cap."""
        if self.expansion_count > cap:
            raise LatticeOverflow(
                f"word {self.word!r} expands to {self.expansion_count} candidates (cap {cap})"
            )
        acc: list[tuple[str, int]] = [("", 0)]
        for slot in self.slots:
            acc = [(text + t, prio + p) for text, prio in acc for t, p in slot]
        return acc

    def contains(self, candidate: str) -> bool:
        """Whether the candidate is one of the lattice's expansions."""
        target = nfc(candidate)
        offsets = {0}
        for slot in self.slots:
            nxt = set()
            for off in offsets:
                for t, _ in slot:
                    if target.startswith(t, off):
                        nxt.add(off + len(t))
            if not nxt:
                return False
            offsets = nxt
        return len(target) in offsets


@dataclass(frozen=True)
class TranslitResult:
    best: str
    alternatives: tuple[tuple[str, float], ...]
    per_word_candidate_counts: tuple[int, ...]


def _word_slots(
    graphemes: list[Grapheme], ruleset: RuleSet, epenthesis: bool, merge_doubles: bool
) -> list[tuple[tuple[str, int], ...]]:
    # A ZWNJ splits the word into joining segments; positions are computed
    # per segment, so a letter before the joiner counts as segment-final.
    segments: list[list[Grapheme]] = [[]]
    for g in graphemes:
        if g.char_class is CharClass.CONTROL:
            segments.append([g])
            segments.append([])
        else:
            segments[-1].append(g)

    slots: list[tuple[tuple[str, int], ...]] = []
    for seg in segments:
        if not seg:
            continue
        if seg[0].char_class is CharClass.CONTROL:
            rule = ruleset.lookup(seg[0].text, Position.ANY)
            slots.append(tuple((t, rule.priority + i) for i, t in enumerate(rule.target_texts())))
            continue
        positions = word_positions(len(seg))
        i = 0
        while i < len(seg):
            g, pos = seg[i], positions[i]
            doubled = (
                merge_doubles
                and i + 1 < len(seg)
                and seg[i + 1].text == g.text
                and g.char_class in (CharClass.CONSONANT, CharClass.GLOTTAL_SIGN)
            )
            if doubled:
                pos = positions[i] if i == 0 else positions[i + 1]
            rule = ruleset.lookup(g.text, pos)
            targets = rule.target_texts()
            options = [(t, rule.priority + k) for k, t in enumerate(targets)]
            if doubled:
                # written-double forms rank below every single form
                options += [(t + t, rule.priority + len(targets) + k) for k, t in enumerate(targets) if t]
                i += 1
            slots.append(tuple(options))
            if (
                epenthesis
                and g.char_class in _EPENTHESIS_AFTER
                and i < len(seg) - 1
            ):
                slots.append(_EPENTHESIS)
            i += 1
    return slots


def build_word_lattice(
    word: str,
    graphemes: list[Grapheme],
    ruleset: RuleSet,
    epenthesis: bool,
) -> WordLattice:
    merge_doubles = ruleset.direction is Direction.TAJIK_TO_FARSI
    if ruleset.direction is Direction.FARSI_TO_TAJIK and word == "و":
        # The standalone conjunction is always rendered independent; the
        # enclitic form cannot be told apart and is never generated.
        return WordLattice(word, ((("ва", 0),),))
    slots = _word_slots(graphemes, ruleset, epenthesis, merge_doubles)
    if ruleset.direction is Direction.TAJIK_TO_FARSI and graphemes and graphemes[-1].text == "и":
        # Word-final -и often marks the linking affix, which the other
        # script leaves unwritten: offer deletion as a candidate.
        last = list(slots[-1])
        if ("", len(last)) not in last and "" not in {t for t, _ in last}:
            last.append(("", len(last)))
        slots = slots[:-1] + [tuple(last)]
    return WordLattice(word, tuple(slots))


def translit_one_to_one(text: str, direction: Direction, ruleset: RuleSet | None = None) -> str:
    """Replace every grapheme with the top-ranked target of its rule."""
    if ruleset is None:
        ruleset = builtin_ruleset(direction)
    out_words: list[str] = []
    words = segment_words(text, direction.source_script)
    for word_graphemes in words:
        if direction is Direction.FARSI_TO_TAJIK and [g.text for g in word_graphemes] == ["و"]:
            out_words.append("ва")
            continue
        segments: list[list[Grapheme]] = [[]]
        for g in word_graphemes:
            if g.char_class is CharClass.CONTROL:
                segments.append([g])
                segments.append([])
            else:
                segments[-1].append(g)
        parts: list[str] = []
        for seg in segments:
            if not seg:
                continue
            if seg[0].char_class is CharClass.CONTROL:
                parts.append(ruleset.lookup(seg[0].text, Position.ANY).target_texts()[0])
                continue
            positions = word_positions(len(seg))
            for g, pos in zip(seg, positions):
                parts.append(ruleset.lookup(g.text, pos).target_texts()[0])
        out_words.append("".join(parts))
    return " ".join(out_words)


def _lexicon_score(candidate: str, lexicon: dict[str, int], script_tag: str) -> float | None:
    """Morphological match first, then direct lexical match; None on miss."""
    strip = _STRIP_AFFIXES[script_tag]
    for suffix in strip["suffixes"]:
        stem = candidate.removesuffix(suffix)
        if stem != candidate and stem in lexicon:
            return LEXICON_BONUS + math.log(lexicon[stem])
    for prefix in strip["prefixes"]:
        stem = candidate.removeprefix(prefix)
        if stem != candidate and stem in lexicon:
            return LEXICON_BONUS + math.log(lexicon[stem])
    if candidate in lexicon:
        return LEXICON_BONUS + math.log(lexicon[candidate])
    return None


def _score_word_candidates(
    lattice: WordLattice,
    lexicon: dict[str, int] | None,
    script_tag: str,
    beam: int,
    cap: int,
) -> list[tuple[str, float]]:
    if lattice.expansion_count <= cap:
        expansions = lattice.expand(cap)
    else:
        # Slot-by-slot pruning: keep the cap best partial strings by
        # accumulated priority, merging duplicates on their best priority.
        partial: dict[str, int] = {"": 0}
        for slot in lattice.slots:
            nxt: dict[str, int] = {}
            for text, prio in partial.items():
                for t, p in slot:
                    cand, c = text + t, prio + p
                    if cand not in nxt or c < nxt[cand]:
                        nxt[cand] = c
            if len(nxt) > cap:
                kept = sorted(nxt.items(), key=lambda kv: (kv[1], kv[0]))[:cap]
                nxt = dict(kept)
            partial = nxt
        expansions = list(partial.items())

    scored: dict[str, float] = {}
    for cand, prio in expansions:
        score = None
        if lexicon:
            score = _lexicon_score(cand, lexicon, script_tag)
        if score is None:
            score = float(-prio)
        if cand not in scored or score > scored[cand]:
            scored[cand] = score
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:beam]


def translit_lattice(
    text: str,
    direction: Direction,
    ruleset: RuleSet | None = None,
    beam: int = 8,
    cap: int = DEFAULT_CAP,
    epenthesis: bool | None = None,
) -> TranslitResult:
    """Overgenerate rule-licensed spellings per word and rescore.

    Scores: a lexicon (or suffix-stripped lexicon) match earns a large bonus
    plus log frequency; otherwise the candidate scores the negated sum of
    its rule priorities. Ties break lexicographically, so results are
    deterministic for a fixed ruleset and beam.
    """
    if beam < 1:
        raise ValueError("beam must be >= 1")
    if ruleset is None:
        ruleset = builtin_ruleset(direction)
    if epenthesis is None:
        epenthesis = direction is Direction.FARSI_TO_TAJIK
    script_tag = direction.target_script.value

    words = segment_words(text, direction.source_script)
    word_texts = nfc(text).split()

    counts: list[int] = []
    sentence: list[tuple[str, float]] = [("", 0.0)]
    for word_text, graphemes in zip(word_texts, words):
        lattice = build_word_lattice(word_text, graphemes, ruleset, epenthesis)
        counts.append(lattice.expansion_count)
        word_alts = _score_word_candidates(lattice, ruleset.lexicon, script_tag, beam, cap)
        combined = [
            ((prefix + " " + cand).strip(), score + s)
            for prefix, score in sentence
            for cand, s in word_alts
        ]
        combined.sort(key=lambda kv: (-kv[1], kv[0]))
        sentence = combined[:beam]

    return TranslitResult(
        best=sentence[0][0],
        alternatives=tuple(sentence),
        per_word_candidate_counts=tuple(counts),
    )


def avg_alternatives(results) -> float:
    """Mean pre-pruning candidate count per word over a set of results."""
    counts = [c for r in results for c in r.per_word_candidate_counts]
    if not counts:
        raise ValueError("avg_alternatives requires at least one transliterated word")
    return sum(counts) / len(counts)


def load_lexicon(path) -> dict[str, int]:
    """Read a ``wordform<TAB>frequency`` lexicon file."""
    lex: dict[str, int] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                form, freq = line.split("\t")
                lex[nfc(form)] = int(freq)
            except ValueError:
                raise ValueError(f"lexicon line {lineno}: expected wordform<TAB>frequency") from None
    return lex


@lru_cache(maxsize=None)
def builtin_lexicon(direction: Direction) -> dict[str, int]:
    """The shipped target-script lexicon for a direction."""
    name = "lexicon_tj.tsv" if direction is Direction.FARSI_TO_TAJIK else "lexicon_fa.tsv"
    text = resources.files("persotajik.data").joinpath(name).read_text("utf-8")
    lex: dict[str, int] = {}
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            form, freq = line.split("\t")
            lex[nfc(form)] = int(freq)
    return lex
