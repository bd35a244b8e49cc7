"""Character-level neural transducer: model, training loop, checkpoints."""

from .checkpoint import FormatError, VersionError, load_model, save_model
from .model import (
    ConfigError,
    ModelConfig,
    Transducer,
    build_model,
    decode,
    micro_config,
    pad_batch,
    paper_config,
    sequence_loss,
)
from .train import DivergenceError, EpochStats, TrainConfig, train
from .vocab import BOS, EOS, PAD, SPACE, UNK, Vocab

__all__ = [
    "BOS", "EOS", "PAD", "SPACE", "UNK",
    "ConfigError", "DivergenceError", "EpochStats", "FormatError",
    "ModelConfig", "TrainConfig", "Transducer", "VersionError", "Vocab",
    "build_model", "decode", "load_model", "micro_config", "pad_batch",
    "paper_config", "save_model", "sequence_loss", "train",
]
