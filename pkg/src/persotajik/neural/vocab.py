"""Grapheme vocabulary for the character-level transducer."""

from dataclasses import dataclass, field

from ..textutil import grapheme_clusters, nfc

PAD, BOS, EOS, UNK = 0, 1, 2, 3
SPACE = 4
_RESERVED = ["<pad>", "<bos>", "<eos>", "<unk>", " "]


@dataclass(frozen=True)
class Vocab:
    """Bijective grapheme<->index map with fixed reserved indices 0..4.

    <pad>=0, <bos>=1, <eos>=2, <unk>=3 and the space token at 4; the
    zero-width non-joiner is an ordinary entry like any other grapheme.
    """

    symbols: tuple[str, ...]
    lowercase: bool = False
    index: dict[str, int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if list(self.symbols[: len(_RESERVED)]) != _RESERVED:
            raise ValueError("vocabulary must start with the reserved symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("vocabulary symbols must be unique")
        object.__setattr__(self, "index", {s: i for i, s in enumerate(self.symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    @classmethod
    def from_texts(cls, texts, lowercase: bool = False) -> "Vocab":
        seen: set[str] = set()
        for text in texts:
            text = nfc(text)
            if lowercase:
                text = text.lower()
            for cluster in grapheme_clusters(text):
                if not cluster.isspace():
                    seen.add(cluster)
        return cls(tuple(_RESERVED + sorted(seen)), lowercase)

    def encode(self, text: str, add_bos: bool = False, add_eos: bool = False) -> list[int]:
        text = nfc(text)
        if self.lowercase:
            text = text.lower()
        ids = [BOS] if add_bos else []
        for cluster in grapheme_clusters(text):
            if cluster.isspace():
                ids.append(SPACE)
            else:
                ids.append(self.index.get(cluster, UNK))
        if add_eos:
            ids.append(EOS)
        return ids

    def decode(self, ids) -> str:
        out: list[str] = []
        for i in ids:
            if i == EOS:
                break
            if i in (PAD, BOS, UNK):
                continue
            out.append(self.symbols[i])
        return "".join(out)
