"""Command-line interface.

Subcommands:
  run       rewrite a JSONL batch (exit 0 all ok, 1 some failed, 2 startup error)
  chunk     print tokens, tags, and chunks for one sentence
  align     print the alignment for a single record JSON file
  validate  check a JSONL file and report record errors only
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from namegraft.alignment import AlignMode
from namegraft.chunking import chunk_nps, classify_person, pos_tag, tokenize
from namegraft.errors import ConfigError, NamegraftError, RecordError
from namegraft.lexicons import load_person_lexicon, load_tag_lexicon
from namegraft.pipeline import CaptionRewriter, Config, _align
from namegraft.providers import parse_record

ENDPOINT_ENV_VAR = "NAMEGRAFT_FACE_ENDPOINT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="namegraft",
        description="Rewrite generic image captions with recognized people's names.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="process a JSONL batch")
    run_p.add_argument("--input", required=True, help="input JSONL path")
    run_p.add_argument("--output", required=True, help="output JSONL path")
    _add_config_args(run_p)
    run_p.add_argument("--emit-scores", action="store_true", default=None,
                       help="include the chunk x face score matrix in outputs")
    run_p.add_argument("--replace-possessives", action="store_true", default=None,
                       help="also substitute chunks followed by a possessive")
    run_p.set_defaults(func=cmd_run)

    chunk_p = sub.add_parser("chunk", help="debug: chunk one sentence")
    chunk_p.add_argument("sentence", help="caption text to analyze")
    chunk_p.add_argument("--config", help="config JSON path")
    chunk_p.set_defaults(func=cmd_chunk)

    align_p = sub.add_parser("align", help="debug: align one record")
    align_p.add_argument("--input", required=True, help="single-record JSON file")
    _add_config_args(align_p)
    align_p.set_defaults(func=cmd_align)

    val_p = sub.add_parser("validate", help="check a JSONL file, report errors only")
    val_p.add_argument("--input", required=True, help="input JSONL path")
    val_p.set_defaults(func=cmd_validate)
    return parser


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="config JSON path")
    parser.add_argument("--mode", choices=["sequential", "attention", "auto"],
                        help="alignment mode (default: auto)")
    parser.add_argument("--min-confidence", type=float, dest="min_confidence",
                        help="drop faces below this confidence")
    parser.add_argument("--min-score", type=float, dest="min_score",
                        help="attention-mode score threshold")
    parser.add_argument("--timeout", type=float, help="face service timeout seconds")


def _build_config(args: argparse.Namespace) -> Config:
    config = Config.from_file(args.config) if getattr(args, "config", None) else Config()
    config = config.merged(
        mode=getattr(args, "mode", None),
        min_confidence=getattr(args, "min_confidence", None),
        min_score=getattr(args, "min_score", None),
        emit_scores=getattr(args, "emit_scores", None),
        replace_possessives=getattr(args, "replace_possessives", None),
        timeout=getattr(args, "timeout", None),
    )
    endpoint = os.environ.get(ENDPOINT_ENV_VAR)
    if endpoint:
        config = config.merged(face_endpoint=endpoint)
    config.validate()
    return config


def cmd_run(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if not Path(args.input).is_file():
        raise ConfigError(f"input path does not exist: {args.input}")
    engine = CaptionRewriter(config)
    try:
        summary = engine.run_batch(args.input, args.output)
    except OSError as exc:
        raise ConfigError(f"cannot process batch: {exc}") from exc
    return 1 if summary.failed else 0


def cmd_chunk(args: argparse.Namespace) -> int:
    config = _build_config(args)
    tags = load_tag_lexicon(config.tag_lexicon)
    persons = load_person_lexicon(config.person_lexicon)
    tokens = tokenize(args.sentence)
    tagged = pos_tag(tokens, tags)
    chunks = [classify_person(c, persons) for c in chunk_nps(tagged)]
    out = {
        "tokens": [
            {"text": t.text, "index": t.index,
             "char_start": t.char_start, "char_end": t.char_end}
            for t in tokens
        ],
        "tags": [tt.tag.value for tt in tagged],
        "chunks": [
            {"span": [c.span_start, c.span_end], "surface": c.surface,
             "head": c.head_text, "head_index": c.head_index,
             "is_person": c.is_person, "count": c.count.to_json(),
             "possessive": c.possessive}
            for c in chunks
        ],
    }
    print(json.dumps(out, indent=2, ensure_ascii=False))
    return 0


def cmd_align(args: argparse.Namespace) -> int:
    config = _build_config(args)
    try:
        text = Path(args.input).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read record: {exc}") from exc
    try:
        record = parse_record(text)
    except RecordError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    tags = load_tag_lexicon(config.tag_lexicon)
    persons = load_person_lexicon(config.person_lexicon)
    tokens = tokenize(record.caption)
    tagged = pos_tag(tokens, tags)
    chunks = [classify_person(c, persons) for c in chunk_nps(tagged)]
    eligible = [
        c for c in chunks
        if c.is_person and (config.replace_possessives or not c.possessive)
    ]
    faces = [f for f in record.faces if f.confidence >= config.min_confidence]
    try:
        result, fallback_notes = _align(eligible, faces, record, len(tokens), config)
    except NamegraftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = {
        "mode_used": result.mode_used.value,
        "assignments": [
            {"chunk": eligible[cid].surface,
             "span": [eligible[cid].span_start, eligible[cid].span_end],
             "names": list(names)}
            for cid, names in sorted(result.assignments.items())
        ],
        "unmatched": [
            {"chunk": eligible[cid].surface,
             "reason": result.reasons.get(cid, "not aligned")}
            for cid in result.unmatched_chunks
        ],
        "unassigned_names": list(result.unassigned_names),
        "notes": list(result.notes) + fallback_notes,
    }
    if result.scores is not None:
        out["scores"] = [list(row) for row in result.scores]
    print(json.dumps(out, indent=2, ensure_ascii=False))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    path = Path(args.input)
    if not path.is_file():
        raise ConfigError(f"input path does not exist: {args.input}")
    bad = 0
    with path.open("r", encoding="utf-8") as src:
        for line_number, raw in enumerate(src, start=1):
            try:
                parse_record(raw.rstrip("\n"), line_number)
            except RecordError as exc:
                bad += 1
                print(f"line {line_number}: {exc}")
    return 1 if bad else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
