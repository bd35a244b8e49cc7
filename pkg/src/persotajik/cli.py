"""Command-line surface for batch use.

Subcommands: normalize, align, translit, train, evaluate, stats. All text
I/O is UTF-8, NFC-composed on read, BOM tolerated. Every command that
writes output also writes a ``<output>.manifest.json`` run manifest (the
command line, config snapshot, input digests, seed, tool version and
timestamps). Exit codes: 0 success, 1 data error, 2 usage error.
"""

import argparse
import csv
import dataclasses
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .corpus import (
    EmptySide,
    InsufficientData,
    ParseError,
    SplitSpec,
    corpus_stats,
    gale_church_align,
    load_corpus,
    make_splits,
)
from .metrics import evaluate_pairs, per_pair_distances
from .normalize import NormalizeConfig, ZwnjMode, normalize_text
from .rule_translit import (
    builtin_lexicon,
    load_lexicon,
    translit_lattice,
    translit_one_to_one,
)
from .script_model import Direction, NotInInventory, Script, builtin_ruleset
from .neural import (
    ModelConfig,
    TrainConfig,
    build_model,
    decode,
    load_model,
    save_model,
    train,
)
from .neural.vocab import Vocab
from .textutil import nfc

_SCRIPTS = {"fa": Script.PERSO_ARABIC, "tj": Script.TAJIK_CYRILLIC}
_DIRECTIONS = {"fa2tj": Direction.FARSI_TO_TAJIK, "tj2fa": Direction.TAJIK_TO_FARSI}


class DataError(Exception):
    """Input data problem; maps to exit code 1."""


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [nfc(line.rstrip("\n")) for line in f]


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_path, args, inputs, config, started: float) -> None:
    manifest = {
        "command": sys.argv[1:] if sys.argv[1:] else vars(args).get("_argv", []),
        "subcommand": args.command,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "seed": getattr(args, "seed", None),
        "tool_version": __version__,
        "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime(started)),
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    with open(str(out_path) + ".manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, ensure_ascii=False, indent=2)


def _cmd_normalize(args) -> int:
    started = time.time()
    script = _SCRIPTS[args.script]
    cfg = NormalizeConfig(
        join_affixes=not args.no_join_affixes and args.zwnj == "keep" and args.script == "fa",
        zwnj_mode=ZwnjMode(args.zwnj),
    )
    lines = _read_lines(args.input)
    with open(args.output, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(normalize_text(line, script, cfg) + "\n")
    _write_manifest(args.output, args, [args.input], dataclasses.asdict(cfg) | {"script": args.script}, started)
    return 0


def _cmd_align(args) -> int:
    started = time.time()
    src = [line for line in _read_lines(args.src) if line.strip()]
    tgt = [line for line in _read_lines(args.tgt) if line.strip()]
    if not src or not tgt:
        raise DataError("both input files must contain at least one sentence")
    beads = gale_church_align(src, tgt)
    with open(args.out, "w", encoding="utf-8") as f:
        for bead in beads:
            rec = {"src": list(bead.src), "tgt": list(bead.tgt)}
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    _write_manifest(args.out, args, [args.src, args.tgt], {}, started)
    return 0


def _cmd_translit(args) -> int:
    started = time.time()
    direction = _DIRECTIONS[args.direction]
    lines = _read_lines(args.input)
    inputs = [args.input]

    if args.engine == "model":
        if not args.checkpoint:
            raise UsageError("--engine model requires --checkpoint")
        model, _ = load_model(args.checkpoint)
        inputs.append(args.checkpoint)
        outputs = [decode(model, line) for line in lines]
    elif args.engine == "naive":
        outputs = [translit_one_to_one(line, direction) for line in lines]
    else:
        if args.lexicon:
            lexicon = load_lexicon(args.lexicon)
            inputs.append(args.lexicon)
        else:
            lexicon = builtin_lexicon(direction)
        ruleset = builtin_ruleset(direction, lexicon)
        outputs = []
        for line in lines:
            result = translit_lattice(line, direction, ruleset, beam=max(args.nbest, args.beam))
            if args.nbest > 1:
                outputs.append("\t".join(c for c, _ in result.alternatives[: args.nbest]))
            else:
                outputs.append(result.best)

    with open(args.output, "w", encoding="utf-8") as f:
        for line in outputs:
            f.write(line + "\n")
    _write_manifest(args.output, args,
                    inputs, {"engine": args.engine, "direction": args.direction}, started)
    return 0


def _parse_kv_config(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"{path} line {lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _configs_from_kv(kv: dict[str, str], seed: int) -> tuple[ModelConfig, TrainConfig]:
    def take(cls, defaults):
        fields = {f.name: f.type for f in dataclasses.fields(cls)}
        picked = dict(defaults)
        for key, value in kv.items():
            if key in fields:
                picked[key] = float(value) if "float" in str(fields[key]) else int(value)
        return cls(**picked)

    model_cfg = take(ModelConfig, {})
    train_cfg = take(TrainConfig, {"seed": seed})
    return model_cfg, train_cfg


def _cmd_train(args) -> int:
    started = time.time()
    corpus = load_corpus(args.corpus)
    spec = SplitSpec(seed=args.seed, folds=args.folds)
    if not 0 <= args.fold < spec.folds:
        raise UsageError(f"--fold must be in [0, {spec.folds})")
    split = make_splits(corpus, spec)[args.fold]

    direction = _DIRECTIONS[args.direction]

    def side(pair):
        fa, tj = pair.farsi, pair.tajik
        return (fa, tj) if direction is Direction.FARSI_TO_TAJIK else (tj, fa)

    train_pairs = [side(corpus.pairs[i]) for i in split.train]
    dev_pairs = [side(corpus.pairs[i]) for i in split.dev]

    kv = _parse_kv_config(args.config) if args.config else {}
    model_cfg, train_cfg = _configs_from_kv(kv, args.seed)

    lowercase_src = direction is Direction.TAJIK_TO_FARSI
    src_vocab = Vocab.from_texts([s for s, _ in train_pairs + dev_pairs], lowercase=lowercase_src)
    tgt_vocab = Vocab.from_texts([t for _, t in train_pairs + dev_pairs], lowercase=not lowercase_src)
    model = build_model(model_cfg, src_vocab, tgt_vocab, seed=train_cfg.seed)
    log = train(model, train_pairs, dev_pairs, train_cfg)

    save_model(model, args.out, meta={
        "direction": args.direction, "fold": args.fold,
        "train_config": dataclasses.asdict(train_cfg),
    })
    log_path = str(args.out) + ".log.csv"
    with open(log_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["epoch", "train_loss", "dev_loss", "lr"])
        for row in log:
            writer.writerow([row.epoch, f"{row.train_loss:.6f}", f"{row.dev_loss:.6f}", f"{row.lr:.8f}"])
    config_snapshot = {
        "model": dataclasses.asdict(model_cfg),
        "train": dataclasses.asdict(train_cfg),
        "fold": args.fold, "folds": args.folds, "direction": args.direction,
    }
    inputs = [args.corpus] + ([args.config] if args.config else [])
    _write_manifest(args.out, args, inputs, config_snapshot, started)
    return 0


def _cmd_evaluate(args) -> int:
    started = time.time()
    hyps = _read_lines(args.hyp)
    refs = _read_lines(args.ref)
    if len(hyps) != len(refs):
        raise DataError(f"line count mismatch: {len(hyps)} hypotheses vs {len(refs)} references")
    pairs = [(h, r) for h, r in zip(hyps, refs) if h.strip() or r.strip()]
    if not pairs:
        raise DataError("no nonempty lines to evaluate")
    script = _SCRIPTS[args.script] if args.script else _detect_script(refs)
    report = evaluate_pairs(pairs, script, strip_zwnj=args.strip_zwnj)
    with open(args.json, "w", encoding="utf-8") as f:
        f.write(report.to_json(include_confusion=args.confusion) + "\n")
    if args.per_pair:
        with open(args.per_pair, "w", encoding="utf-8") as f:
            f.write("distance\tratio\n")
            for d, ratio in per_pair_distances(pairs):
                f.write(f"{d}\t{ratio:.6f}\n")
    print(report.to_json())
    _write_manifest(args.json, args, [args.hyp, args.ref],
                    {"strip_zwnj": args.strip_zwnj, "script": script.value}, started)
    return 0


def _detect_script(lines: list[str]) -> Script:
    cyr = sum(1 for line in lines for ch in line if "Ѐ" <= ch <= "ӿ")
    ara = sum(1 for line in lines for ch in line if "؀" <= ch <= "ۿ")
    return Script.TAJIK_CYRILLIC if cyr >= ara else Script.PERSO_ARABIC


def _cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus)
    _print_stats(corpus_stats(corpus))
    return 0


def _print_stats(stats) -> None:
    rows = [
        ("# of sentences", f"{stats.n_sentences:,}", f"{stats.n_sentences:,}"),
        ("# of word tokens", f"{stats.farsi.n_tokens:,}", f"{stats.tajik.n_tokens:,}"),
        ("# of characters*", f"{stats.farsi.n_chars:,}", f"{stats.tajik.n_chars:,}"),
        ("Avg. # of tokens in a sentence", f"{stats.farsi.avg_tokens:.2f}", f"{stats.tajik.avg_tokens:.2f}"),
        ("Avg. # of characters* in a sentence", f"{stats.farsi.avg_chars:.2f}", f"{stats.tajik.avg_chars:.2f}"),
    ]
    width = max(len(r[0]) for r in rows)
    print(f"{'Statistics':<{width}}\tFarsi\tTajik")
    for name, fa, tj in rows:
        print(f"{name:<{width}}\t{fa}\t{tj}")
    print("* whitespace characters are not counted")


class UsageError(Exception):
    """Bad invocation; maps to exit code 2."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persotajik",
        description="Perso-Arabic / Tajik-Cyrillic transliteration toolkit",
    )
    parser.add_argument("--version", action="version", version=f"persotajik {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="normalize a text file line by line")
    p.add_argument("--script", choices=["fa", "tj"], required=True)
    p.add_argument("--no-join-affixes", action="store_true")
    p.add_argument("--zwnj", choices=["keep", "remove", "space"], default="keep")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("align", help="sentence-align two monolingual files")
    p.add_argument("src")
    p.add_argument("tgt")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("translit", help="transliterate a file line by line")
    p.add_argument("--engine", choices=["naive", "lattice", "model"], required=True)
    p.add_argument("--direction", choices=["fa2tj", "tj2fa"], required=True)
    p.add_argument("--checkpoint")
    p.add_argument("--lexicon")
    p.add_argument("--nbest", type=int, default=1)
    p.add_argument("--beam", type=int, default=8)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_translit)

    p = sub.add_parser("train", help="train the neural transducer on one fold")
    p.add_argument("--config", help="flat key=value file for model/training settings")
    p.add_argument("--corpus", required=True)
    p.add_argument("--fold", type=int, required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--direction", choices=["fa2tj", "tj2fa"], default="tj2fa")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a hypothesis file against a reference")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--strip-zwnj", action="store_true")
    p.add_argument("--json", required=True)
    p.add_argument("--per-pair")
    p.add_argument("--confusion", action="store_true")
    p.add_argument("--script", choices=["fa", "tj"])
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("stats", help="print corpus statistics")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: no such file: {e.filename}", file=sys.stderr)
        return 2
    except (ParseError, EmptySide, InsufficientData, NotInInventory, DataError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
