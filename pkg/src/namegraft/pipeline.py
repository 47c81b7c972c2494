"""End-to-end caption rewriting over single records and JSONL batches.

Stage order per record: tokenize, tag, chunk, classify, filter faces by
confidence, align (sequential / attention / auto with fallback), then
substitute. Per-record failures never abort a batch; every input line
yields exactly one output line.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from namegraft.alignment import (
    AlignMode,
    AlignmentResult,
    Identity,
    REASON_POSSESSIVE,
    attention_align,
    sequential_align,
)
from namegraft.chunking import NpChunk, PosTag, chunk_nps, classify_person, pos_tag, tokenize
from namegraft.errors import (
    AlignmentError,
    ConfigError,
    GeometryError,
    NamegraftError,
    ProviderError,
    RecordError,
)
from namegraft.lexicons import load_person_lexicon, load_tag_lexicon
from namegraft.providers import DEFAULT_TIMEOUT, ImageRecord, fetch_faces_http, parse_record
from namegraft.substitution import Replacement, Skipped, substitute

__all__ = [
    "MODE_SEQUENTIAL",
    "MODE_ATTENTION",
    "MODE_AUTO",
    "Config",
    "OutputRecord",
    "BatchSummary",
    "CaptionRewriter",
    "run_record",
    "run_batch",
]

MODE_SEQUENTIAL = "sequential"
MODE_ATTENTION = "attention"
MODE_AUTO = "auto"
_MODES = (MODE_SEQUENTIAL, MODE_ATTENTION, MODE_AUTO)


@dataclass
class Config:
    """Pipeline settings; file values < CLI flags, env var wins for the endpoint."""

    mode: str = MODE_AUTO
    min_confidence: float = 0.5
    min_score: float = 0.04
    replace_possessives: bool = False
    emit_scores: bool = False
    tag_lexicon: str | None = None
    person_lexicon: str | None = None
    face_endpoint: str | None = None
    timeout: float = DEFAULT_TIMEOUT

    def validate(self) -> None:
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {', '.join(_MODES)}, got {self.mode!r}")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ConfigError(f"min_confidence must be in [0, 1], got {self.min_confidence}")
        if not 0.0 <= self.min_score <= 1.0:
            raise ConfigError(f"min_score must be in [0, 1], got {self.min_score}")
        if self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        for label, path in (("tag_lexicon", self.tag_lexicon),
                            ("person_lexicon", self.person_lexicon)):
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{label} path does not exist: {path}")

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        try:
            raw = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ConfigError(f"config {path} has unknown keys: {', '.join(unknown)}")
        return cls(**obj)

    def merged(self, **overrides) -> "Config":
        """New config with the non-None overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **changes)


@dataclass
class OutputRecord:
    """One output line: the rewrite plus full diagnostics."""

    image_id: str | None
    original: str
    final: str
    mode_used: str | None
    replacements: tuple[Replacement, ...] = ()
    skipped: tuple[Skipped, ...] = ()
    unassigned_names: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    errors: tuple[str, ...] = ()
    scores: tuple[tuple[float, ...], ...] | None = None

    @property
    def failed(self) -> bool:
        return bool(self.errors)

    def to_dict(self) -> dict:
        out = {
            "image_id": self.image_id,
            "original": self.original,
            "final": self.final,
            "mode_used": self.mode_used,
            "replacements": [r.to_dict() for r in self.replacements],
            "skipped": [s.to_dict() for s in self.skipped],
            "unassigned_names": list(self.unassigned_names),
            "notes": list(self.notes),
            "errors": list(self.errors),
        }
        if self.scores is not None:
            out["scores"] = [list(row) for row in self.scores]
        return out

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False)


@dataclass
class BatchSummary:
    ok: int = 0
    substituted: int = 0
    skipped: int = 0
    failed: int = 0

    def to_dict(self) -> dict:
        return {"ok": self.ok, "substituted": self.substituted,
                "skipped": self.skipped, "failed": self.failed}


def _failed_record(image_id: str | None, original: str, errors: Sequence[str]) -> OutputRecord:
    return OutputRecord(
        image_id=image_id,
        original=original,
        final=original,
        mode_used=None,
        errors=tuple(errors),
    )


def _align(eligible: Sequence[NpChunk], faces: Sequence[Identity],
           record: ImageRecord, token_count: int,
           config: Config) -> tuple[AlignmentResult, list[str]]:
    """Dispatch on mode; in auto, retreat to sequential when attention
    cannot be used or matches nothing."""
    if config.mode == MODE_SEQUENTIAL:
        return sequential_align(eligible, faces), []
    if config.mode == MODE_ATTENTION:
        result = attention_align(eligible, faces, record.attention,
                                 record.image_width, record.image_height,
                                 token_count, config.min_score)
        return result, []
    # auto
    if record.attention is None:
        return sequential_align(eligible, faces), []
    try:
        result = attention_align(eligible, faces, record.attention,
                                 record.image_width, record.image_height,
                                 token_count, config.min_score)
    except (AlignmentError, GeometryError) as exc:
        return sequential_align(eligible, faces), [
            f"attention alignment failed ({exc}); fell back to sequential"]
    if eligible and not result.assignments:
        return sequential_align(eligible, faces), [
            "attention alignment matched no chunks; fell back to sequential"]
    return result, []


def run_record(record: ImageRecord, config: Config,
               tag_lexicon: dict[str, PosTag] | None = None,
               person_lexicon: frozenset[str] | None = None) -> OutputRecord:
    """Rewrite one record; a pure function of (record, config, lexicons).

    Never raises for per-record problems: failures land in `errors` and
    the original caption passes through unchanged.
    """
    if tag_lexicon is None:
        tag_lexicon = load_tag_lexicon(config.tag_lexicon)
    if person_lexicon is None:
        person_lexicon = load_person_lexicon(config.person_lexicon)

    try:
        tokens = tokenize(record.caption)
        tagged = pos_tag(tokens, tag_lexicon)
        chunks = [classify_person(c, person_lexicon) for c in chunk_nps(tagged)]
        person_chunks = [c for c in chunks if c.is_person]

        eligible: list[NpChunk] = []
        possessive_skips: list[Skipped] = []
        for chunk in person_chunks:
            if chunk.possessive and not config.replace_possessives:
                possessive_skips.append(Skipped(chunk.surface, REASON_POSSESSIVE))
            else:
                eligible.append(chunk)

        faces = [f for f in record.faces if f.confidence >= config.min_confidence]
        conf_notes = [
            f"identity '{f.name}' below min confidence"
            for f in record.faces if f.confidence < config.min_confidence
        ]

        result, fallback_notes = _align(eligible, faces, record, len(tokens), config)
        rewrite = substitute(tokens, eligible, result, original=record.caption)

        skipped = _merge_skips(person_chunks, eligible, possessive_skips, result)
        scores = None
        if config.emit_scores and result.mode_used is AlignMode.ATTENTION:
            scores = result.scores
        return OutputRecord(
            image_id=record.image_id,
            original=record.caption,
            final=rewrite.rewritten,
            mode_used=result.mode_used.value,
            replacements=rewrite.replacements,
            skipped=skipped,
            unassigned_names=result.unassigned_names,
            notes=tuple(conf_notes) + result.notes + tuple(fallback_notes),
            errors=(),
            scores=scores,
        )
    except NamegraftError as exc:
        return _failed_record(record.image_id, record.caption, [str(exc)])


def _merge_skips(person_chunks: Sequence[NpChunk], eligible: Sequence[NpChunk],
                 possessive_skips: Sequence[Skipped],
                 result: AlignmentResult) -> tuple[Skipped, ...]:
    """Interleave possessive and alignment skips back into caption order."""
    unmatched = set(result.unmatched_chunks)
    merged: list[Skipped] = []
    poss_iter = iter(possessive_skips)
    e = 0
    for chunk in person_chunks:
        if e < len(eligible) and chunk is eligible[e]:
            if e in unmatched:
                merged.append(Skipped(chunk.surface, result.reasons.get(e, "not aligned")))
            e += 1
        else:
            merged.append(next(poss_iter))
    return tuple(merged)


def run_batch(input_path: str | Path, output_path: str | Path,
              config: Config | None = None,
              summary_stream: TextIO | None = None) -> BatchSummary:
    """Convenience wrapper building a CaptionRewriter for one batch."""
    return CaptionRewriter(config).run_batch(input_path, output_path,
                                             summary_stream=summary_stream)


class CaptionRewriter:
    """Reusable engine: lexicons loaded once, records processed independently."""

    def __init__(self, config: Config | None = None):
        self.config = config if config is not None else Config()
        self.config.validate()
        self._tags = load_tag_lexicon(self.config.tag_lexicon)
        self._persons = load_person_lexicon(self.config.person_lexicon)

    def run_record(self, record: ImageRecord) -> OutputRecord:
        """Process one parsed record, consulting the face service if configured."""
        if self.config.face_endpoint:
            try:
                faces = fetch_faces_http(
                    self.config.face_endpoint, record.image_id,
                    timeout=self.config.timeout,
                    image_width=record.image_width,
                    image_height=record.image_height)
            except ProviderError as exc:
                return _failed_record(record.image_id, record.caption, [str(exc)])
            record = dataclasses.replace(record, faces=tuple(faces))
        return run_record(record, self.config, self._tags, self._persons)

    def run_batch(self, input_path: str | Path, output_path: str | Path,
                  summary_stream: TextIO | None = None) -> BatchSummary:
        """Stream JSONL in, write one output line per input line, in order.

        The summary is printed to stderr (or `summary_stream`) as JSON.
        Per-record failures are recorded, never fatal.
        """
        summary = BatchSummary()
        in_path, out_path = Path(input_path), Path(output_path)
        with in_path.open("r", encoding="utf-8") as src, \
                out_path.open("w", encoding="utf-8") as dst:
            for line_number, raw in enumerate(src, start=1):
                out = self._process_line(raw.rstrip("\n"), line_number)
                dst.write(out.to_json_line() + "\n")
                if out.failed:
                    summary.failed += 1
                else:
                    summary.ok += 1
                    if out.replacements:
                        summary.substituted += 1
                    if out.skipped:
                        summary.skipped += 1
        stream = summary_stream if summary_stream is not None else sys.stderr
        print(json.dumps(summary.to_dict()), file=stream)
        return summary

    def _process_line(self, line: str, line_number: int) -> OutputRecord:
        image_id, caption = _salvage(line)
        try:
            record = parse_record(line, line_number)
        except RecordError as exc:
            return _failed_record(image_id, caption, [str(exc)])
        try:
            return self.run_record(record)
        except Exception as exc:  # defensive: a bug must not kill the batch
            return _failed_record(record.image_id, record.caption,
                                  [f"internal error: {exc}"])


def _salvage(line: str) -> tuple[str | None, str]:
    """Best-effort image_id/caption from a line that may fail validation."""
    try:
        obj = json.loads(line)
    except ValueError:
        return None, ""
    if not isinstance(obj, dict):
        return None, ""
    image_id = obj.get("image_id")
    caption = obj.get("caption")
    return (image_id if isinstance(image_id, str) else None,
            caption if isinstance(caption, str) else "")
