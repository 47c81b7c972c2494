"""Rewriting captions by splicing name lists over aligned chunk spans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from namegraft.alignment import AlignmentResult
from namegraft.chunking import NpChunk, SPLIT_PUNCTUATION, Token
from namegraft.errors import SubstitutionError

__all__ = [
    "Replacement",
    "Skipped",
    "RewriteRecord",
    "render_name_list",
    "detokenize",
    "substitute",
]


@dataclass(frozen=True)
class Replacement:
    chunk_surface: str
    span: tuple[int, int]
    names: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"chunk": self.chunk_surface, "span": list(self.span),
                "names": list(self.names)}


@dataclass(frozen=True)
class Skipped:
    chunk_surface: str
    reason: str

    def to_dict(self) -> dict:
        return {"chunk": self.chunk_surface, "reason": self.reason}


@dataclass(frozen=True)
class RewriteRecord:
    """One caption rewrite: what changed, what was left alone and why."""

    original: str
    rewritten: str
    replacements: tuple[Replacement, ...]
    skipped: tuple[Skipped, ...]


def render_name_list(names: Sequence[str]) -> str:
    """Join names for prose: "A", "A and B", or "A, B and C"."""
    if not names:
        raise SubstitutionError("nothing to render")
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + " and " + names[-1]


def _attaches_left(text: str) -> bool:
    if text.lower() == "'s":
        return True
    return all(c in SPLIT_PUNCTUATION for c in text)


def detokenize(parts: Sequence[str]) -> str:
    """Join token texts with single spaces; punctuation and the possessive
    clitic attach to the preceding piece."""
    out = ""
    for text in parts:
        if out and _attaches_left(text):
            out += text
        elif out:
            out += " " + text
        else:
            out = text
    return out


def substitute(tokens: Sequence[Token], chunks: Sequence[NpChunk],
               alignment: AlignmentResult,
               original: str | None = None) -> RewriteRecord:
    """Replace every assigned chunk span with its rendered names.

    Chunk ids in the alignment index into `chunks`. Unmatched chunks stay
    verbatim and appear in `skipped` with the aligner's reason. All other
    tokens pass through untouched; the final string is the normalizing
    detokenization of the edited token sequence.
    """
    edits = []
    for cid, names in alignment.assignments.items():
        if cid < 0 or cid >= len(chunks):
            raise SubstitutionError(f"unknown chunk id {cid}")
        chunk = chunks[cid]
        edits.append((chunk.span_start, chunk.span_end, chunk, names))
    edits.sort(key=lambda e: e[0])
    for (_, prev_end, prev_chunk, _), (start, _, chunk, _) in zip(edits, edits[1:]):
        if start < prev_end:
            raise SubstitutionError(
                f"conflicting spans: '{prev_chunk.surface}' and '{chunk.surface}'")

    parts: list[str] = []
    replacements: list[Replacement] = []
    cursor = 0
    for start, end, chunk, names in edits:
        parts.extend(tok.text for tok in tokens[cursor:start])
        parts.append(render_name_list(list(names)))
        replacements.append(Replacement(chunk.surface, (start, end), tuple(names)))
        cursor = end
    parts.extend(tok.text for tok in tokens[cursor:])

    skipped = tuple(
        Skipped(chunks[cid].surface, alignment.reasons.get(cid, "not aligned"))
        for cid in alignment.unmatched_chunks
    )
    if original is None:
        original = detokenize([tok.text for tok in tokens])
    return RewriteRecord(
        original=original,
        rewritten=detokenize(parts),
        replacements=tuple(replacements),
        skipped=skipped,
    )
