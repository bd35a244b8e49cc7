"""Character-level encoder-decoder transformer.

Standard architecture: scaled embeddings plus sinusoidal positional
encodings, post-norm residual blocks, multi-head attention, and a final
linear projection to the target vocabulary. Decoder self-attention is
causally masked; padding positions are masked out of attention and loss.
"""

import math
from dataclasses import dataclass

import torch
from torch import nn

from .vocab import BOS, EOS, PAD, Vocab


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    n_encoder_layers: int = 4
    n_decoder_layers: int = 4
    n_heads: int = 4
    d_model: int = 256
    d_ffn: int = 1024
    dropout: float = 0.1
    max_seq_len: int = 512

    def __post_init__(self):
        if min(self.n_encoder_layers, self.n_decoder_layers, self.n_heads,
               self.d_model, self.d_ffn, self.max_seq_len) < 1:
            raise ConfigError("model dimensions must be positive")
        if self.d_model % self.n_heads != 0:
            raise ConfigError(
                f"d_model={self.d_model} not divisible by n_heads={self.n_heads}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0,1), got {self.dropout}")


def paper_config() -> ModelConfig:
    return ModelConfig()


def micro_config() -> ModelConfig:
    return ModelConfig(1, 1, 1, 8, 16, 0.0, max_seq_len=64)


class SinusoidalPositionalEncoding(nn.Module):
    def __init__(self, d_model: int, max_len: int):
        super().__init__()
        position = torch.arange(max_len).unsqueeze(1).to(torch.float64)
        div = torch.exp(torch.arange(0, d_model, 2).to(torch.float64)
                        * (-math.log(10000.0) / d_model))
        pe = torch.zeros(max_len, d_model, dtype=torch.float64)
        pe[:, 0::2] = torch.sin(position * div)
        pe[:, 1::2] = torch.cos(position * div)
        self.register_buffer("pe", pe.to(torch.float32))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.pe[: x.size(1)].to(x.dtype)


class MultiHeadAttention(nn.Module):
    def __init__(self, d_model: int, n_heads: int, dropout: float):
        super().__init__()
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.q_proj = nn.Linear(d_model, d_model)
        self.k_proj = nn.Linear(d_model, d_model)
        self.v_proj = nn.Linear(d_model, d_model)
        self.out_proj = nn.Linear(d_model, d_model)
        self.dropout = nn.Dropout(dropout)
        self.last_weights: torch.Tensor | None = None

    def forward(self, query, key, value, mask=None, keep_weights=False):
        b, tq, d = query.shape
        tk = key.size(1)

        def split(x, t):
            return x.view(b, t, self.n_heads, self.d_head).transpose(1, 2)

        q = split(self.q_proj(query), tq)
        k = split(self.k_proj(key), tk)
        v = split(self.v_proj(value), tk)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.d_head)
        if mask is not None:
            scores = scores.masked_fill(~mask, float("-inf"))
        weights = torch.softmax(scores, dim=-1)
        self.last_weights = weights.detach() if keep_weights else None
        ctx = self.dropout(weights) @ v
        ctx = ctx.transpose(1, 2).reshape(b, tq, d)
        return self.out_proj(ctx)


class FeedForward(nn.Module):
    def __init__(self, d_model: int, d_ffn: int, dropout: float):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(d_model, d_ffn),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(d_ffn, d_model),
        )

    def forward(self, x):
        return self.net(x)


class EncoderLayer(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.self_attn = MultiHeadAttention(cfg.d_model, cfg.n_heads, cfg.dropout)
        self.ffn = FeedForward(cfg.d_model, cfg.d_ffn, cfg.dropout)
        self.norm1 = nn.LayerNorm(cfg.d_model)
        self.norm2 = nn.LayerNorm(cfg.d_model)
        self.dropout = nn.Dropout(cfg.dropout)

    def forward(self, x, src_mask, keep_weights=False):
        x = self.norm1(x + self.dropout(
            self.self_attn(x, x, x, src_mask, keep_weights)))
        x = self.norm2(x + self.dropout(self.ffn(x)))
        return x


class DecoderLayer(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.self_attn = MultiHeadAttention(cfg.d_model, cfg.n_heads, cfg.dropout)
        self.cross_attn = MultiHeadAttention(cfg.d_model, cfg.n_heads, cfg.dropout)
        self.ffn = FeedForward(cfg.d_model, cfg.d_ffn, cfg.dropout)
        self.norm1 = nn.LayerNorm(cfg.d_model)
        self.norm2 = nn.LayerNorm(cfg.d_model)
        self.norm3 = nn.LayerNorm(cfg.d_model)
        self.dropout = nn.Dropout(cfg.dropout)

    def forward(self, x, memory, tgt_mask, mem_mask, keep_weights=False):
        x = self.norm1(x + self.dropout(
            self.self_attn(x, x, x, tgt_mask, keep_weights)))
        x = self.norm2(x + self.dropout(
            self.cross_attn(x, memory, memory, mem_mask, keep_weights)))
        x = self.norm3(x + self.dropout(self.ffn(x)))
        return x


class Transducer(nn.Module):
    """Encoder-decoder transformer over two grapheme vocabularies."""

    def __init__(self, config: ModelConfig, src_vocab: Vocab, tgt_vocab: Vocab):
        super().__init__()
        self.config = config
        self.src_vocab = src_vocab
        self.tgt_vocab = tgt_vocab
        self.src_embed = nn.Embedding(len(src_vocab), config.d_model, padding_idx=PAD)
        self.tgt_embed = nn.Embedding(len(tgt_vocab), config.d_model, padding_idx=PAD)
        self.pos_enc = SinusoidalPositionalEncoding(config.d_model, config.max_seq_len)
        self.embed_dropout = nn.Dropout(config.dropout)
        self.encoder = nn.ModuleList(EncoderLayer(config) for _ in range(config.n_encoder_layers))
        self.decoder = nn.ModuleList(DecoderLayer(config) for _ in range(config.n_decoder_layers))
        self.out_proj = nn.Linear(config.d_model, len(tgt_vocab))
        self.scale = math.sqrt(config.d_model)

    def _check_len(self, ids: torch.Tensor):
        if ids.size(1) > self.config.max_seq_len:
            raise ValueError(
                f"sequence length {ids.size(1)} exceeds max_seq_len {self.config.max_seq_len}"
            )

    def encode(self, src_ids: torch.Tensor, keep_weights=False) -> torch.Tensor:
        self._check_len(src_ids)
        src_mask = (src_ids != PAD)[:, None, None, :]
        x = self.pos_enc(self.src_embed(src_ids) * self.scale)
        x = self.embed_dropout(x)
        for layer in self.encoder:
            x = layer(x, src_mask, keep_weights)
        return x

    def decode_step(self, memory, src_ids, tgt_in_ids, causal: bool = True,
                    keep_weights=False) -> torch.Tensor:
        self._check_len(tgt_in_ids)
        t = tgt_in_ids.size(1)
        pad_mask = (tgt_in_ids != PAD)[:, None, None, :]
        tgt_mask = pad_mask
        if causal:
            tri = torch.ones(t, t, dtype=torch.bool, device=tgt_in_ids.device).tril()
            tgt_mask = pad_mask & tri[None, None, :, :]
        mem_mask = (src_ids != PAD)[:, None, None, :]
        y = self.pos_enc(self.tgt_embed(tgt_in_ids) * self.scale)
        y = self.embed_dropout(y)
        for layer in self.decoder:
            y = layer(y, memory, tgt_mask, mem_mask, keep_weights)
        return self.out_proj(y)

    def forward(self, src_ids: torch.Tensor, tgt_in_ids: torch.Tensor,
                causal: bool = True, keep_weights: bool = False) -> torch.Tensor:
        """Logits of shape (batch, tgt_len, tgt_vocab_size)."""
        memory = self.encode(src_ids, keep_weights)
        return self.decode_step(memory, src_ids, tgt_in_ids, causal, keep_weights)

    def attention_weights(self) -> list[torch.Tensor]:
        out = []
        for layer in self.encoder:
            if layer.self_attn.last_weights is not None:
                out.append(layer.self_attn.last_weights)
        for layer in self.decoder:
            for attn in (layer.self_attn, layer.cross_attn):
                if attn.last_weights is not None:
                    out.append(attn.last_weights)
        return out


def build_model(config: ModelConfig, src_vocab: Vocab, tgt_vocab: Vocab, seed: int = 0) -> Transducer:
    """Construct a transducer with seed-deterministic initialization."""
    torch.manual_seed(seed)
    return Transducer(config, src_vocab, tgt_vocab)


def sequence_loss(logits: torch.Tensor, tgt_out_ids: torch.Tensor) -> torch.Tensor:
    """Mean cross-entropy over non-padding target positions."""
    vocab = logits.size(-1)
    flat = logits.reshape(-1, vocab)
    target = tgt_out_ids.reshape(-1)
    losses = nn.functional.cross_entropy(flat, target, reduction="none")
    keep = target != PAD
    count = keep.sum()
    if count == 0:
        raise ValueError("loss undefined for all-padding batch")
    return (losses * keep).sum() / count


def pad_batch(seqs: list[list[int]], device=None) -> torch.Tensor:
    width = max(len(s) for s in seqs)
    out = torch.full((len(seqs), width), PAD, dtype=torch.long, device=device)
    for i, s in enumerate(seqs):
        out[i, : len(s)] = torch.tensor(s, dtype=torch.long)
    return out


def decode(model: Transducer, src: str, max_len: int | None = None) -> str:
    """Greedy decoding from BOS until EOS or the length cap."""
    src_ids = model.src_vocab.encode(src, add_eos=True)
    if len(src_ids) <= 1 and not src.strip():
        return ""
    if max_len is None:
        max_len = 2 * len(src_ids) + 10
    max_len = min(max_len, model.config.max_seq_len - 1)
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            src_t = pad_batch([src_ids])
            memory = model.encode(src_t)
            out = [BOS]
            for _ in range(max_len):
                logits = model.decode_step(memory, src_t, pad_batch([out]))
                nxt = int(logits[0, -1].argmax())
                out.append(nxt)
                if nxt == EOS:
                    break
            return model.tgt_vocab.decode(out[1:])
    finally:
        if was_training:
            model.train()
