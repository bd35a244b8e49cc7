"""Evaluation suite for (hypothesis, reference) sentence sets.

All metrics operate on grapheme clusters after removing whitespace, so word
segmentation differences never count as errors. The suite covers a
character+word n-gram F-score, exact and edit-distance-relaxed sequence
accuracy, average edit distance and its normalized ratio, and per-grapheme
confusion F1 broken out by character class.
"""

import json
from collections import Counter
from dataclasses import dataclass, field

from .script_model import CharClass, NotInInventory, Script, classify
from .textutil import ZWNJ, grapheme_clusters, strip_spaces

Pair = tuple[str, str]  # (hypothesis, reference)


def _clusters(text: str) -> list[str]:
    return grapheme_clusters(strip_spaces(text))


def levenshtein(a: str, b: str) -> int:
    """Minimum single-grapheme edits (insert/delete/substitute) a -> b."""
    xs, ys = grapheme_clusters(a), grapheme_clusters(b)
    if not xs:
        return len(ys)
    if not ys:
        return len(xs)
    prev = list(range(len(ys) + 1))
    for i, x in enumerate(xs, start=1):
        cur = [i]
        for j, y in enumerate(ys, start=1):
            cur.append(min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (x != y),
            ))
        prev = cur
    return prev[-1]


def sequence_accuracy(pairs: list[Pair]) -> float:
    """Fraction of pairs identical after removing all spaces."""
    if not pairs:
        raise ValueError("sequence_accuracy requires at least one pair")
    hits = sum(strip_spaces(h) == strip_spaces(r) for h, r in pairs)
    return hits / len(pairs)


def relaxed_sequence_accuracy(pairs: list[Pair], k: int) -> float:
    """Fraction of space-stripped pairs within edit distance k."""
    if not pairs:
        raise ValueError("relaxed_sequence_accuracy requires at least one pair")
    hits = sum(levenshtein(strip_spaces(h), strip_spaces(r)) <= k for h, r in pairs)
    return hits / len(pairs)


def ld_stats(pairs: list[Pair]) -> tuple[float, float]:
    """(mean edit distance, mean per-pair distance / longer length)."""
    if not pairs:
        raise ValueError("ld_stats requires at least one pair")
    dists, ratios = [], []
    for h, r in pairs:
        hs, rs = strip_spaces(h), strip_spaces(r)
        d = levenshtein(hs, rs)
        longest = max(len(grapheme_clusters(hs)), len(grapheme_clusters(rs)))
        dists.append(d)
        ratios.append(d / longest if longest else 0.0)
    return sum(dists) / len(dists), sum(ratios) / len(ratios)


# --- chrF++ ---------------------------------------------------------------


def _char_ngrams(text: str, n: int) -> Counter:
    clusters = _clusters(text)
    return Counter(tuple(clusters[i:i + n]) for i in range(len(clusters) - n + 1))


def _word_ngrams(text: str, n: int) -> Counter:
    tokens = text.split()
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def chrf_pp(pairs: list[Pair], char_order: int = 6, word_order: int = 2,
            beta: float = 2.0) -> float:
    """Character + word n-gram F-score in [0, 100].

    Clipped n-gram matches are aggregated over the whole corpus per order;
    each order contributes an F_beta, and the orders are averaged uniformly.
    Orders with no reference n-grams are skipped. Whitespace is excluded
    from character n-grams.
    """
    if not pairs:
        raise ValueError("chrf_pp requires at least one pair")
    extractors = [("char", n) for n in range(1, char_order + 1)]
    extractors += [("word", n) for n in range(1, word_order + 1)]
    totals = {key: [0, 0, 0] for key in extractors}  # hyp, ref, match
    for h, r in pairs:
        for kind, n in extractors:
            grab = _char_ngrams if kind == "char" else _word_ngrams
            hyp_counts, ref_counts = grab(h, n), grab(r, n)
            t = totals[(kind, n)]
            t[0] += sum(hyp_counts.values())
            t[1] += sum(ref_counts.values())
            t[2] += sum((hyp_counts & ref_counts).values())

    b2 = beta * beta
    scores = []
    for hyp_total, ref_total, match in totals.values():
        if ref_total == 0:
            continue
        precision = match / hyp_total if hyp_total else 0.0
        recall = match / ref_total
        if precision + recall == 0:
            scores.append(0.0)
        else:
            scores.append((1 + b2) * precision * recall / (b2 * precision + recall))
    if not scores:
        return 0.0
    return 100.0 * sum(scores) / len(scores)


# --- per-grapheme confusion F1 --------------------------------------------


def align_graphemes(ref: str, hyp: str) -> list[tuple[str, str]]:
    """Minimum-edit alignment of space-stripped grapheme sequences.

    Returns (ref_grapheme, hyp_grapheme) pairs where "" marks an insertion
    or deletion. Ties prefer substitution over paired insert+delete, then
    consuming the reference first, so the alignment is deterministic.
    """
    xs, ys = _clusters(ref), _clusters(hyp)
    m, n = len(xs), len(ys)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (xs[i - 1] != ys[j - 1]))
    out: list[tuple[str, str]] = []
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0 and d[i][j] == d[i - 1][j - 1] + (xs[i - 1] != ys[j - 1]):
            out.append((xs[i - 1], ys[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and d[i][j] == d[i - 1][j] + 1:
            out.append((xs[i - 1], ""))
            i -= 1
        else:
            out.append(("", ys[j - 1]))
            j -= 1
    out.reverse()
    return out


def _class_of(grapheme: str, script: Script) -> CharClass | None:
    try:
        return classify(grapheme, script)
    except NotInInventory:
        return None


def confusion_matrix(pairs: list[Pair]) -> Counter:
    """Counts of aligned (ref_grapheme, hyp_grapheme); "" is the gap symbol."""
    counts: Counter = Counter()
    for h, r in pairs:
        counts.update(align_graphemes(r, h))
    return counts


def _f1_scores(confusion: Counter) -> dict[str, float]:
    tp: Counter = Counter()
    fp: Counter = Counter()
    fn: Counter = Counter()
    total = 0
    correct = 0
    for (ref_g, hyp_g), c in confusion.items():
        total += c
        if ref_g == hyp_g:
            tp[ref_g] += c
            correct += c
        else:
            if ref_g:
                fn[ref_g] += c
            if hyp_g:
                fp[hyp_g] += c
    classes = sorted({g for (g, _) in confusion if g})
    if not classes or total == 0:
        return {"macro": 0.0, "micro": 0.0, "weighted": 0.0}
    f1 = {}
    support = {}
    for g in classes:
        denom = 2 * tp[g] + fp[g] + fn[g]
        f1[g] = 2 * tp[g] / denom if denom else 0.0
        support[g] = tp[g] + fn[g]
    total_support = sum(support.values())
    return {
        "macro": sum(f1.values()) / len(classes),
        "micro": correct / total,
        "weighted": (
            sum(f1[g] * support[g] for g in classes) / total_support
            if total_support else 0.0
        ),
    }


def char_class_f1(pairs: list[Pair], hyp_script: Script) -> dict[str, dict[str, float]]:
    """Macro/micro/weighted per-grapheme F1 over consonants, vowels, and all.

    The confusion matrix treats each grapheme as a class; the consonant and
    vowel blocks keep only alignment pairs whose reference grapheme (or, for
    insertions, hypothesis grapheme) carries that character class.
    """
    if not pairs:
        raise ValueError("char_class_f1 requires at least one pair")
    confusion = confusion_matrix(pairs)

    def block(wanted: CharClass | None) -> Counter:
        if wanted is None:
            return confusion
        kept: Counter = Counter()
        for (ref_g, hyp_g), c in confusion.items():
            probe = ref_g or hyp_g
            if _class_of(probe, hyp_script) is wanted:
                kept[(ref_g, hyp_g)] = c
        return kept

    return {
        "consonants": _f1_scores(block(CharClass.CONSONANT)),
        "vowels": _f1_scores(block(CharClass.VOWEL)),
        "all": _f1_scores(block(None)),
    }


# --- full report -----------------------------------------------------------


@dataclass
class EvalReport:
    chrf_pp: float
    seq_acc: float
    rsa1: float
    rsa2: float
    avg_ld: float
    ld_ratio: float
    f1_blocks: dict[str, dict[str, float]]
    n_pairs: int
    confusion: dict[str, int] = field(default_factory=dict, repr=False)

    def to_json(self, include_confusion: bool = False) -> str:
        record = {
            "chrf_pp": self.chrf_pp,
            "seq_acc": self.seq_acc,
            "rsa1": self.rsa1,
            "rsa2": self.rsa2,
            "avg_ld": self.avg_ld,
            "ld_ratio": self.ld_ratio,
            "f1_blocks": self.f1_blocks,
            "n_pairs": self.n_pairs,
        }
        if include_confusion:
            record["confusion"] = self.confusion
        return json.dumps(record, ensure_ascii=False, indent=2)


def evaluate_pairs(pairs: list[Pair], hyp_script: Script,
                   strip_zwnj: bool = False) -> EvalReport:
    """All metrics for one (hypothesis, reference) set.

    ``strip_zwnj`` removes the zero-width non-joiner from both sides before
    any metric, matching the evaluation variant where the invisible joiner
    is not scored.
    """
    if not pairs:
        raise ValueError("evaluate_pairs requires at least one pair")
    if strip_zwnj:
        pairs = [(h.replace(ZWNJ, ""), r.replace(ZWNJ, "")) for h, r in pairs]
    avg_ld, ld_ratio = ld_stats(pairs)
    confusion = confusion_matrix(pairs)
    return EvalReport(
        chrf_pp=chrf_pp(pairs),
        seq_acc=sequence_accuracy(pairs),
        rsa1=relaxed_sequence_accuracy(pairs, 1),
        rsa2=relaxed_sequence_accuracy(pairs, 2),
        avg_ld=avg_ld,
        ld_ratio=ld_ratio,
        f1_blocks=char_class_f1(pairs, hyp_script),
        n_pairs=len(pairs),
        confusion={f"{r}→{h}": c for (r, h), c in sorted(confusion.items())},
    )


def per_pair_distances(pairs: list[Pair]) -> list[tuple[int, float]]:
    """Per-pair (distance, ratio) rows for error analysis output."""
    rows = []
    for h, r in pairs:
        hs, rs = strip_spaces(h), strip_spaces(r)
        d = levenshtein(hs, rs)
        longest = max(len(grapheme_clusters(hs)), len(grapheme_clusters(rs)))
        rows.append((d, d / longest if longest else 0.0))
    return rows
