"""Assigning recognized identities to person-referring noun phrases.

Two strategies: sequential alignment walks chunks in caption order and
hands out names ordered left-to-right by face position (the exchangeable
case), while attention alignment scores every chunk/face pair by the
attention mass the chunk's tokens place inside the face box and picks the
injective assignment with the highest total score.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from namegraft.chunking import NpChunk
from namegraft.errors import AlignmentError
from namegraft.geometry import AttentionMap, BoundingBox, attention_mass_in_box

__all__ = [
    "AlignMode",
    "Identity",
    "AlignmentResult",
    "sequential_align",
    "score_matrix",
    "assign_optimal",
    "attention_align",
    "EXHAUSTIVE_LIMIT",
    "DEFAULT_MIN_SCORE",
    "REASON_NO_IDENTITIES",
    "REASON_INSUFFICIENT_NAMES",
    "REASON_BELOW_MIN_SCORE",
    "REASON_POSSESSIVE",
]

# Exhaustive assignment search is capped at 8! = 40320 candidate mappings.
EXHAUSTIVE_LIMIT = 8

# Roughly twice the uniform-attention floor of 1/49 for a cell-sized box;
# pairs scoring below this are treated as "attention saw nothing".
DEFAULT_MIN_SCORE = 0.04

REASON_NO_IDENTITIES = "no identities"
REASON_INSUFFICIENT_NAMES = "insufficient names"
REASON_BELOW_MIN_SCORE = "below min score"
REASON_POSSESSIVE = "possessive chunk"


class AlignMode(Enum):
    SEQUENTIAL = "sequential"
    ATTENTION = "attention"


@dataclass(frozen=True)
class Identity:
    """A recognized face: name, pixel box, and classifier confidence."""

    name: str
    box: BoundingBox
    confidence: float

    def __post_init__(self):
        if not self.name.strip():
            raise ValueError("identity name must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass
class AlignmentResult:
    """Outcome of aligning person chunks with identities.

    `assignments` maps a chunk id (its index in the chunk list handed to
    the aligner) to the ordered names that replace it. Every input chunk id
    appears either there or in `unmatched_chunks`; `reasons` explains the
    unmatched ones. Name multiset conservation holds: every input name is
    either assigned once or listed in `unassigned_names`.
    """

    assignments: dict[int, tuple[str, ...]]
    unassigned_names: tuple[str, ...]
    unmatched_chunks: tuple[int, ...]
    reasons: dict[int, str]
    mode_used: AlignMode
    scores: tuple[tuple[float, ...], ...] | None = None
    notes: tuple[str, ...] = field(default=())


def _reading_order(identity: Identity):
    return (identity.box.x, identity.box.y)


def _dedupe(identities: Sequence[Identity]) -> tuple[list[Identity], list[str], list[str]]:
    """Drop repeated names, keeping the highest-confidence (then leftmost)
    face per name. Returns (kept, dropped_names, notes); the total order on
    the sort key makes the outcome independent of input order."""
    ranked = sorted(
        identities,
        key=lambda f: (-f.confidence, f.box.x, f.box.y, f.box.w, f.box.h, f.name),
    )
    seen: set[str] = set()
    kept: list[Identity] = []
    dropped: list[str] = []
    notes: list[str] = []
    for face in ranked:
        if face.name in seen:
            dropped.append(face.name)
            notes.append(f"duplicate identity '{face.name}' ignored")
        else:
            seen.add(face.name)
            kept.append(face)
    return kept, dropped, notes


def _quota(chunk: NpChunk, is_last: bool) -> int | None:
    """Names a chunk wants: its exact count, 2 for a non-final bare plural,
    or None meaning "all remaining" for a final bare plural."""
    if chunk.count.is_exact:
        return chunk.count.n
    return None if is_last else 2


def sequential_align(person_chunks: Sequence[NpChunk],
                     identities: Sequence[Identity]) -> AlignmentResult:
    """Align names to chunks purely by order.

    Identities are sorted by box left edge (ties: top edge); chunks consume
    names walking the caption left to right. A chunk that cannot meet its
    full quota is left unmatched and the names it would have taken are
    reported unassigned rather than partially substituted.
    """
    faces, dup_names, notes = _dedupe(identities)
    pool = [f.name for f in sorted(faces, key=_reading_order)]

    assignments: dict[int, tuple[str, ...]] = {}
    unmatched: list[int] = []
    reasons: dict[int, str] = {}
    returned: list[str] = []
    p = 0
    last = len(person_chunks) - 1
    for cid, chunk in enumerate(person_chunks):
        available = len(pool) - p
        if available == 0:
            unmatched.append(cid)
            reasons[cid] = REASON_NO_IDENTITIES
            continue
        quota = _quota(chunk, cid == last)
        if quota is None:
            taken = pool[p:]
            p = len(pool)
            assignments[cid] = tuple(taken)
            notes.append(
                f"plural chunk '{chunk.surface}' took all {len(taken)} remaining names")
        elif available >= quota:
            assignments[cid] = tuple(pool[p:p + quota])
            p += quota
            if not chunk.count.is_exact:
                notes.append(f"plural chunk '{chunk.surface}' limited to 2 names")
        else:
            returned.extend(pool[p:])
            p = len(pool)
            unmatched.append(cid)
            reasons[cid] = REASON_INSUFFICIENT_NAMES
    return AlignmentResult(
        assignments=assignments,
        unassigned_names=tuple(pool[p:] + returned + dup_names),
        unmatched_chunks=tuple(unmatched),
        reasons=reasons,
        mode_used=AlignMode.SEQUENTIAL,
        notes=tuple(notes),
    )


def score_matrix(person_chunks: Sequence[NpChunk],
                 identities: Sequence[Identity],
                 attention: AttentionMap | None,
                 image_width: int, image_height: int,
                 token_count: int) -> list[list[float]]:
    """Chunk x face matrix of attention mass inside each face box.

    Row t of the attention map is taken to belong to emitted token t, so a
    chunk's score uses exactly the rows of its token span.
    """
    if attention is None:
        raise AlignmentError("attention mode requires attention map")
    if attention.token_count != token_count:
        raise AlignmentError("attention rows do not match tokens")
    matrix: list[list[float]] = []
    for chunk in person_chunks:
        span = range(chunk.span_start, chunk.span_end)
        matrix.append([
            attention_mass_in_box(attention, span, face.box, image_width, image_height)
            for face in identities
        ])
    return matrix


def _vector_key(vec: tuple[int | None, ...], n_cols: int) -> tuple[int, ...]:
    # Unassigned slots sort after every real column index.
    return tuple(n_cols if v is None else v for v in vec)


def assign_optimal(scores: Sequence[Sequence[float]],
                   min_score: float) -> dict[int, int]:
    """Injective row->column assignment maximizing the total score.

    Searches every injection of the smaller side into the larger
    (exhaustive; sides capped at 8). Ties pick the lexicographically
    smallest assignment vector in row order. Pairs scoring below
    `min_score` are removed from the winning mapping afterwards.
    """
    n_rows = len(scores)
    n_cols = len(scores[0]) if n_rows else 0
    for r, row in enumerate(scores):
        if len(row) != n_cols:
            raise AlignmentError(f"score matrix row {r} is ragged")
        for value in row:
            if not math.isfinite(value) or value < 0:
                raise AlignmentError(f"scores must be finite and non-negative, got {value!r}")
    if n_rows == 0 or n_cols == 0:
        return {}
    if min(n_rows, n_cols) > EXHAUSTIVE_LIMIT:
        raise AlignmentError("assignment size exceeds exhaustive bound")

    best_total = -math.inf
    best_vec: tuple[int | None, ...] | None = None
    if n_rows <= n_cols:
        for perm in itertools.permutations(range(n_cols), n_rows):
            total = sum(scores[r][perm[r]] for r in range(n_rows))
            if best_vec is None or total > best_total or (
                    total == best_total
                    and _vector_key(perm, n_cols) < _vector_key(best_vec, n_cols)):
                best_total, best_vec = total, perm
    else:
        for perm in itertools.permutations(range(n_rows), n_cols):
            vec: list[int | None] = [None] * n_rows
            for col, row in enumerate(perm):
                vec[row] = col
            total = sum(scores[row][col] for col, row in enumerate(perm))
            candidate = tuple(vec)
            if best_vec is None or total > best_total or (
                    total == best_total
                    and _vector_key(candidate, n_cols) < _vector_key(best_vec, n_cols)):
                best_total, best_vec = total, candidate

    assert best_vec is not None
    return {
        r: c for r, c in enumerate(best_vec)
        if c is not None and scores[r][c] >= min_score
    }


def attention_align(person_chunks: Sequence[NpChunk],
                    identities: Sequence[Identity],
                    attention: AttentionMap | None,
                    image_width: int, image_height: int,
                    token_count: int,
                    min_score: float = DEFAULT_MIN_SCORE) -> AlignmentResult:
    """Align names to chunks by spatial attention evidence.

    A chunk expecting n referents competes as n slots sharing its token
    span (bare plurals count as 2); the winning injective slot->face
    mapping keeps only pairs at or above `min_score`, and a chunk is
    substituted only when every one of its slots received a name. Names
    within a chunk are ordered left-to-right by face position.
    """
    faces0, dup_names, notes = _dedupe(identities)
    faces = sorted(faces0, key=_reading_order)
    chunk_scores = score_matrix(
        person_chunks, faces, attention, image_width, image_height, token_count)

    slot_owner: list[int] = []
    for cid, chunk in enumerate(person_chunks):
        slots = chunk.count.n if chunk.count.is_exact else 2
        if not chunk.count.is_exact:
            notes.append(f"plural chunk '{chunk.surface}' treated as 2 slots")
        slot_owner.extend([cid] * slots)
    slot_scores = [chunk_scores[cid] for cid in slot_owner]

    mapping = assign_optimal(slot_scores, min_score)

    assignments: dict[int, tuple[str, ...]] = {}
    unmatched: list[int] = []
    reasons: dict[int, str] = {}
    used_cols: set[int] = set()
    for cid, chunk in enumerate(person_chunks):
        slot_ids = [s for s, owner in enumerate(slot_owner) if owner == cid]
        cols = [mapping[s] for s in slot_ids if s in mapping]
        if len(cols) == len(slot_ids):
            ordered = sorted(cols, key=lambda c: _reading_order(faces[c]))
            assignments[cid] = tuple(faces[c].name for c in ordered)
            used_cols.update(cols)
        else:
            unmatched.append(cid)
            if not faces:
                reasons[cid] = REASON_NO_IDENTITIES
            elif len(faces) >= len(slot_owner):
                reasons[cid] = REASON_BELOW_MIN_SCORE
            else:
                reasons[cid] = REASON_INSUFFICIENT_NAMES

    unassigned = [faces[c].name for c in range(len(faces)) if c not in used_cols]
    return AlignmentResult(
        assignments=assignments,
        unassigned_names=tuple(unassigned + dup_names),
        unmatched_chunks=tuple(unmatched),
        reasons=reasons,
        mode_used=AlignMode.ATTENTION,
        scores=tuple(tuple(row) for row in chunk_scores),
        notes=tuple(notes),
    )
