"""Versioned binary checkpoint container.

Layout: 4 magic bytes, format version (u32 LE), header length (u64 LE), a
UTF-8 JSON header (model config, both vocabularies, a parameter shape
manifest, free-form metadata), then all parameters concatenated as
little-endian float32 in manifest order.
"""

import json
import struct
from dataclasses import asdict

import numpy as np
import torch

from .model import ModelConfig, Transducer
from .vocab import Vocab

MAGIC = b"PTJK"
FORMAT_VERSION = 1

# Choices the format bakes in, recorded so checkpoints are self-describing.
_DECISIONS = {
    "optimizer": "adam(beta1=0.9, beta2=0.98, eps=1e-9)",
    "positional_encoding": "sinusoidal",
    "decoding": "greedy, max_len = 2*source_len + 10",
    "training_unit": "sentence",
}


class FormatError(ValueError):
    pass


class VersionError(ValueError):
    pass


def save_model(model: Transducer, path, meta: dict | None = None) -> None:
    state = model.state_dict()
    manifest = []
    blobs = []
    for name, tensor in state.items():
        arr = np.ascontiguousarray(tensor.detach().cpu().numpy(), dtype="<f4")
        manifest.append({"name": name, "shape": list(tensor.shape)})
        blobs.append(arr.tobytes())
    header = {
        "config": asdict(model.config),
        "src_vocab": {"symbols": list(model.src_vocab.symbols),
                      "lowercase": model.src_vocab.lowercase},
        "tgt_vocab": {"symbols": list(model.tgt_vocab.symbols),
                      "lowercase": model.tgt_vocab.lowercase},
        "params": manifest,
        "decisions": _DECISIONS,
        "meta": meta or {},
    }
    header_bytes = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", FORMAT_VERSION))
        f.write(struct.pack("<Q", len(header_bytes)))
        f.write(header_bytes)
        for blob in blobs:
            f.write(blob)


def load_model(path) -> tuple[Transducer, dict]:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 16 or data[:4] != MAGIC:
        raise FormatError(f"{path}: not a checkpoint (bad magic)")
    (version,) = struct.unpack("<I", data[4:8])
    if version != FORMAT_VERSION:
        raise VersionError(
            f"{path}: checkpoint format version {version}, this build reads version {FORMAT_VERSION}"
        )
    (header_len,) = struct.unpack("<Q", data[8:16])
    if len(data) < 16 + header_len:
        raise FormatError(f"{path}: truncated header")
    try:
        header = json.loads(data[16:16 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"{path}: bad header ({e})") from None

    config = ModelConfig(**header["config"])
    src_vocab = Vocab(tuple(header["src_vocab"]["symbols"]), header["src_vocab"]["lowercase"])
    tgt_vocab = Vocab(tuple(header["tgt_vocab"]["symbols"]), header["tgt_vocab"]["lowercase"])
    model = Transducer(config, src_vocab, tgt_vocab)

    offset = 16 + header_len
    state = {}
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        numel = int(np.prod(shape)) if shape else 1
        end = offset + 4 * numel
        if end > len(data):
            raise FormatError(f"{path}: truncated parameter blob at {entry['name']}")
        arr = np.frombuffer(data[offset:end], dtype="<f4").reshape(shape)
        state[entry["name"]] = torch.from_numpy(arr.copy())
        offset = end
    if offset != len(data):
        raise FormatError(f"{path}: {len(data) - offset} trailing bytes after parameters")
    model.load_state_dict(state)
    model.eval()
    return model, header.get("meta", {})
