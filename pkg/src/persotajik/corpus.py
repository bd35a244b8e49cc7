"""Parallel corpus handling: ingestion, sentence alignment, stats, splits.

The corpus format is plain TSV (``farsi<TAB>tajik<TAB>source_tag``) or JSON
lines with the same field names. Sentence alignment is the classic
length-based dynamic program over 0/1/2-sentence beads; statistics count
whitespace-delimited tokens and non-whitespace grapheme clusters.
"""

import json
import math
import random
from dataclasses import dataclass, field

from .textutil import grapheme_clusters, nfc


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptySide(ValueError):
    def __init__(self, ids: list[int]):
        super().__init__(f"empty farsi or tajik side in pairs: {ids}")
        self.ids = ids


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class SentencePair:
    farsi: str
    tajik: str
    source_tag: str = "unknown"
    id: int = 0


@dataclass
class ParallelCorpus:
    pairs: list[SentencePair]
    provenance: str = ""

    def __post_init__(self):
        ids = [p.id for p in self.pairs]
        if ids != list(range(len(ids))):
            raise ValueError("pair ids must be dense and start at 0")

    def __len__(self) -> int:
        return len(self.pairs)

    def tags(self) -> dict[str, list[int]]:
        by_tag: dict[str, list[int]] = {}
        for p in self.pairs:
            by_tag.setdefault(p.source_tag, []).append(p.id)
        return by_tag


def load_corpus(path, format: str | None = None) -> ParallelCorpus:
    """Load a parallel corpus from a TSV or JSONL file.

    Two-column TSV lines default the source tag to "unknown". Raises
    ParseError with the offending line number, or EmptySide listing the ids
    of pairs with an empty side.
    """
    if format is None:
        format = "jsonl" if str(path).endswith((".jsonl", ".json")) else "tsv"
    if format not in ("tsv", "jsonl"):
        raise ValueError(f"unknown corpus format {format!r}")

    pairs: list[SentencePair] = []
    empty_ids: list[int] = []
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if format == "tsv":
                cols = line.split("\t")
                if len(cols) == 3:
                    fa, tj, tag = cols
                elif len(cols) == 2:
                    fa, tj = cols
                    tag = "unknown"
                else:
                    raise ParseError(f"expected 2 or 3 tab-separated columns, got {len(cols)}", lineno)
            else:
                try:
                    rec = json.loads(line)
                    fa, tj = rec["farsi"], rec["tajik"]
                    tag = rec.get("source_tag", "unknown")
                except (json.JSONDecodeError, KeyError, TypeError) as e:
                    raise ParseError(f"bad json record ({e})", lineno) from None
            pair = SentencePair(nfc(fa).strip(), nfc(tj).strip(), tag, id=len(pairs))
            if not pair.farsi or not pair.tajik:
                empty_ids.append(pair.id)
            pairs.append(pair)
    if empty_ids:
        raise EmptySide(empty_ids)
    return ParallelCorpus(pairs, provenance=f"loaded from {path}; no deduplication performed")


@dataclass(frozen=True)
class SideStats:
    n_tokens: int
    n_chars: int
    avg_tokens: float
    avg_chars: float


@dataclass(frozen=True)
class CorpusStats:
    n_sentences: int
    farsi: SideStats
    tajik: SideStats


def _side_stats(texts: list[str]) -> SideStats:
    n_tokens = sum(len(t.split()) for t in texts)
    n_chars = sum(
        sum(1 for c in grapheme_clusters(t) if not c.isspace()) for t in texts
    )
    n = len(texts)
    return SideStats(n_tokens, n_chars, n_tokens / n if n else 0.0, n_chars / n if n else 0.0)


def corpus_stats(corpus: ParallelCorpus) -> CorpusStats:
    """Token and non-whitespace character counts per side, with averages."""
    return CorpusStats(
        n_sentences=len(corpus),
        farsi=_side_stats([p.farsi for p in corpus.pairs]),
        tajik=_side_stats([p.tajik for p in corpus.pairs]),
    )


# --- Gale-Church sentence alignment -------------------------------------

# Bead priors; the two asymmetric 2:1 shapes share the published 0.089 mass.
GC_PRIORS: dict[tuple[int, int], float] = {
    (1, 1): 0.89,
    (1, 0): 0.0099,
    (0, 1): 0.0099,
    (2, 1): 0.0445,
    (1, 2): 0.0445,
    (2, 2): 0.011,
}
GC_MEAN_RATIO = 1.0
GC_VARIANCE = 6.8

# Move order doubles as the deterministic tie-break.
_GC_MOVES = tuple(GC_PRIORS)


@dataclass(frozen=True)
class Bead:
    src: tuple[int, ...]
    tgt: tuple[int, ...]


def bead_cost(src_len: int, tgt_len: int, shape: tuple[int, int]) -> float:
    """Negative log probability of one bead given character lengths."""
    mean = (src_len + tgt_len / GC_MEAN_RATIO) / 2
    if mean > 0:
        delta = (src_len * GC_MEAN_RATIO - tgt_len) / math.sqrt(GC_VARIANCE * mean)
    else:
        delta = 0.0
    # two-tailed probability of a deviate at least this large
    p = math.erfc(abs(delta) / math.sqrt(2))
    p = max(p, 1e-300)
    return -math.log(p) - math.log(GC_PRIORS[shape])


def gale_church_align(src_sentences: list[str], tgt_sentences: list[str]) -> list[Bead]:
    """Minimum-cost bead sequence covering both sentence lists in order.

    Costs follow the standard length-based model: a normal deviate computed
    from character lengths plus a prior per bead shape (1-1, 1-0, 0-1, 2-1,
    1-2, 2-2).
    """
    if not src_sentences or not tgt_sentences:
        raise ValueError("gale_church_align requires nonempty sentence lists")
    slen = [len(nfc(s)) for s in src_sentences]
    tlen = [len(nfc(t)) for t in tgt_sentences]
    m, n = len(slen), len(tlen)

    inf = math.inf
    cost = [[inf] * (n + 1) for _ in range(m + 1)]
    back: list[list[tuple[int, int] | None]] = [[None] * (n + 1) for _ in range(m + 1)]
    cost[0][0] = 0.0
    for i in range(m + 1):
        for j in range(n + 1):
            if i == 0 and j == 0:
                continue
            best, best_move = inf, None
            for di, dj in _GC_MOVES:
                if di > i or dj > j:
                    continue
                prev = cost[i - di][j - dj]
                if prev == inf:
                    continue
                c = prev + bead_cost(sum(slen[i - di:i]), sum(tlen[j - dj:j]), (di, dj))
                if c < best:
                    best, best_move = c, (di, dj)
            cost[i][j] = best
            back[i][j] = best_move

    beads: list[Bead] = []
    i, j = m, n
    while i > 0 or j > 0:
        di, dj = back[i][j]
        beads.append(Bead(tuple(range(i - di, i)), tuple(range(j - dj, j))))
        i, j = i - di, j - dj
    beads.reverse()
    return beads


# --- Train/dev/test splits -----------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    seed: int = 0
    fractions: tuple[float, float, float] = (0.80, 0.10, 0.10)
    folds: int = 10

    def __post_init__(self):
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError("split fractions must sum to 1.0")
        if self.folds < 1:
            raise ValueError("folds must be >= 1")


@dataclass(frozen=True)
class Split:
    train: list[int]
    dev: list[int]
    test: list[int]


def make_splits(corpus: ParallelCorpus, spec: SplitSpec = SplitSpec()) -> list[Split]:
    """Repeated randomized train/dev/test resamples, stratified by source tag.

    Each fold draws its own shuffle from a seed derived from ``spec.seed``,
    applies the fractions within every source tag (rounding residue goes to
    train), and covers the corpus disjointly.
    """
    by_tag = corpus.tags()
    too_small = sorted(tag for tag, ids in by_tag.items() if len(ids) < 10)
    if too_small:
        raise InsufficientData(f"need >= 10 pairs per source_tag, short: {too_small}")

    _, f_dev, f_test = spec.fractions
    splits: list[Split] = []
    for fold in range(spec.folds):
        rng = random.Random(spec.seed * 1_000_003 + fold)
        train: list[int] = []
        dev: list[int] = []
        test: list[int] = []
        for tag in sorted(by_tag):
            ids = sorted(by_tag[tag])
            rng.shuffle(ids)
            n = len(ids)
            n_dev = int(f_dev * n)
            n_test = int(f_test * n)
            dev.extend(ids[:n_dev])
            test.extend(ids[n_dev:n_dev + n_test])
            train.extend(ids[n_dev + n_test:])
        splits.append(Split(sorted(train), sorted(dev), sorted(test)))
    return splits


def write_split_manifest(path, splits: list[Split]) -> None:
    """Emit splits as JSON lines {fold, split, ids} for reproducibility."""
    with open(path, "w", encoding="utf-8") as f:
        for fold, split in enumerate(splits):
            for name in ("train", "dev", "test"):
                rec = {"fold": fold, "split": name, "ids": getattr(split, name)}
                f.write(json.dumps(rec, ensure_ascii=False) + "\n")
