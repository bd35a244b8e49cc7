"""Training loop: Adam, epoch-level warmup, and plateau-halved learning rate."""

import random
from dataclasses import dataclass

import torch

from .model import Transducer, pad_batch, sequence_loss
from .vocab import Vocab


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.001
    plateau_factor: float = 0.5
    plateau_patience_epochs: int = 10
    warmup_epochs: int = 5
    batch_size: int = 16
    max_epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        if min(self.lr, self.plateau_patience_epochs, self.warmup_epochs,
               self.batch_size, self.max_epochs) <= 0:
            raise ValueError("training hyperparameters must be positive")
        if not 0.0 < self.plateau_factor < 1.0:
            raise ValueError("plateau_factor must be in (0,1)")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    dev_loss: float
    lr: float


# Adam moments follow the transformer-standard values; the schedule only
# names the learning rate, so the betas live here rather than in the config.
ADAM_BETAS = (0.9, 0.98)
ADAM_EPS = 1e-9


def _encode_pairs(pairs, src_vocab: Vocab, tgt_vocab: Vocab):
    encoded = []
    for src, tgt in pairs:
        encoded.append((
            src_vocab.encode(src, add_eos=True),
            tgt_vocab.encode(tgt, add_bos=True),
            tgt_vocab.encode(tgt, add_eos=True),
        ))
    return encoded


def _run_epoch(model, encoded, batch_size, optimizer=None):
    total, tokens = 0.0, 0
    for start in range(0, len(encoded), batch_size):
        batch = encoded[start:start + batch_size]
        src = pad_batch([b[0] for b in batch])
        tgt_in = pad_batch([b[1] for b in batch])
        tgt_out = pad_batch([b[2] for b in batch])
        loss = sequence_loss(model(src, tgt_in), tgt_out)
        if not torch.isfinite(loss):
            raise DivergenceError(f"non-finite loss {loss.item()}")
        n = int((tgt_out != 0).sum())
        total += loss.item() * n
        tokens += n
        if optimizer is not None:
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
    return total / tokens


def train(
    model: Transducer,
    train_pairs: list[tuple[str, str]],
    dev_pairs: list[tuple[str, str]],
    cfg: TrainConfig = TrainConfig(),
    epoch_callback=None,
) -> list[EpochStats]:
    """Train in place and return the per-epoch log.

    Learning rate warms up linearly to ``cfg.lr`` over the warmup epochs,
    then halves whenever dev loss has not improved for the patience window.
    Deterministic for a fixed seed under single-threaded math. The optional
    ``epoch_callback(stats, model)`` may return True to stop early.
    """
    if not train_pairs or not dev_pairs:
        raise ValueError("train and dev sets must be nonempty")
    torch.manual_seed(cfg.seed)
    train_enc = _encode_pairs(train_pairs, model.src_vocab, model.tgt_vocab)
    dev_enc = _encode_pairs(dev_pairs, model.src_vocab, model.tgt_vocab)

    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr,
                                 betas=ADAM_BETAS, eps=ADAM_EPS)
    plateau_scale = 1.0
    best_dev = float("inf")
    stale_epochs = 0
    log: list[EpochStats] = []

    for epoch in range(1, cfg.max_epochs + 1):
        warmup = min(1.0, epoch / cfg.warmup_epochs)
        lr = cfg.lr * warmup * plateau_scale
        for group in optimizer.param_groups:
            group["lr"] = lr

        order = list(range(len(train_enc)))
        random.Random(cfg.seed * 1_000_003 + epoch).shuffle(order)
        model.train()
        train_loss = _run_epoch(model, [train_enc[i] for i in order],
                                cfg.batch_size, optimizer)
        model.eval()
        with torch.no_grad():
            dev_loss = _run_epoch(model, dev_enc, cfg.batch_size)

        if dev_loss < best_dev - 1e-12:
            best_dev = dev_loss
            stale_epochs = 0
        else:
            stale_epochs += 1
            if stale_epochs >= cfg.plateau_patience_epochs:
                plateau_scale *= cfg.plateau_factor
                stale_epochs = 0

        stats = EpochStats(epoch, train_loss, dev_loss, lr)
        log.append(stats)
        if epoch_callback is not None and epoch_callback(stats, model):
            break
    return log
