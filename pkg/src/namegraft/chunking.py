"""Tokenization, lexicon-driven POS tagging, and flat noun-phrase chunking.

Captions are short declarative sentences ("a man is delivering a speech"),
so a whitespace tokenizer with punctuation peeling plus a small tag set is
enough to find the person-referring noun phrases downstream stages rewrite.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

__all__ = [
    "Token",
    "PosTag",
    "TaggedToken",
    "Count",
    "NpChunk",
    "tokenize",
    "pos_tag",
    "chunk_nps",
    "classify_person",
]

# Sentence punctuation peeled off word edges by the tokenizer.
SPLIT_PUNCTUATION = ".,!?;:'\""

_WORD_RE = re.compile(r"\S+")

# Number words accepted when parsing chunk referent counts.
NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
    "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19, "twenty": 20,
}


class PosTag(Enum):
    DT = "DT"        # determiner
    CD = "CD"        # cardinal number
    JJ = "JJ"        # adjective (incl. attributive participles)
    NN = "NN"        # singular noun
    NNS = "NNS"      # plural noun
    NNP = "NNP"      # proper noun
    PUNCT = "PUNCT"  # sentence punctuation
    OTHER = "OTHER"  # everything else (verbs, prepositions, ...)


_NOUN_TAGS = frozenset({PosTag.NN, PosTag.NNS, PosTag.NNP})


@dataclass(frozen=True)
class Token:
    """A caption text unit with its position in the raw string."""

    text: str
    index: int
    char_start: int
    char_end: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"token index must be >= 0, got {self.index}")
        if not self.char_start < self.char_end:
            raise ValueError(
                f"token offsets must satisfy start < end, got "
                f"[{self.char_start}, {self.char_end})")


class TaggedToken(NamedTuple):
    token: Token
    tag: PosTag


@dataclass(frozen=True)
class Count:
    """How many people a chunk refers to.

    `n` is the exact referent count, or None when only "plural" is known
    (a bare plural head with no cardinal, e.g. "people").
    """

    n: int | None

    @classmethod
    def exact(cls, n: int) -> "Count":
        if n < 1:
            raise ValueError(f"exact count must be >= 1, got {n}")
        return cls(n)

    @classmethod
    def plural_unknown(cls) -> "Count":
        return cls(None)

    @property
    def is_exact(self) -> bool:
        return self.n is not None

    def to_json(self) -> int | str:
        return self.n if self.n is not None else "plural"


@dataclass(frozen=True)
class NpChunk:
    """A flat noun-phrase span over the token sequence, half-open [start, end).

    `head_text`, `head_tag`, and `cd_text` are carried so person
    classification and count parsing need only the chunk itself.
    """

    span_start: int
    span_end: int
    head_index: int
    surface: str
    is_person: bool
    count: Count
    possessive: bool
    head_text: str
    head_tag: PosTag
    cd_text: str | None


def tokenize(raw: str) -> list[Token]:
    """Split a caption into tokens with exact character offsets.

    Words are whitespace-separated; leading/trailing sentence punctuation
    becomes standalone tokens, and a possessive "'s" is split from its host
    word. Empty input yields an empty list.
    """
    tokens: list[Token] = []
    for match in _WORD_RE.finditer(raw):
        word = match.group()
        base = match.start()
        for rel, piece in _split_word(word):
            tokens.append(Token(piece, len(tokens), base + rel, base + rel + len(piece)))
    return tokens


def _split_word(word: str) -> list[tuple[int, str]]:
    """Break one whitespace-delimited word into (offset, text) pieces."""
    lo, hi = 0, len(word)
    left: list[tuple[int, str]] = []
    while lo < hi and word[lo] in SPLIT_PUNCTUATION:
        left.append((lo, word[lo]))
        lo += 1
    right: list[tuple[int, str]] = []
    while hi > lo and word[hi - 1] in SPLIT_PUNCTUATION:
        right.append((hi - 1, word[hi - 1]))
        hi -= 1
    right.reverse()

    middle: list[tuple[int, str]] = []
    core = word[lo:hi]
    if core:
        if len(core) > 2 and core[-2:].lower() == "'s":
            middle = [(lo, core[:-2]), (hi - 2, core[-2:])]
        else:
            middle = [(lo, core)]
    return left + middle + right


def pos_tag(tokens: list[Token], lexicon: dict[str, PosTag]) -> list[TaggedToken]:
    """Assign one tag per token: lexicon lookup, then suffix/shape rules.

    Order of evaluation: punctuation and the possessive clitic are
    structural; then lowercased lexicon lookup; digit strings and number
    words go to CD; unknown words ending in "s" (length > 3) to NNS;
    capitalized words past the sentence start to NNP; everything else NN.
    """
    return [TaggedToken(tok, _tag_for(tok, lexicon)) for tok in tokens]


def _tag_for(token: Token, lexicon: dict[str, PosTag]) -> PosTag:
    text = token.text
    if all(c in SPLIT_PUNCTUATION for c in text):
        return PosTag.PUNCT
    lower = text.lower()
    if lower == "'s":
        return PosTag.OTHER
    if lower in lexicon:
        return lexicon[lower]
    if text.isdigit() or lower in NUMBER_WORDS:
        return PosTag.CD
    if len(text) > 3 and lower.endswith("s"):
        return PosTag.NNS
    if token.index > 0 and text[0].isupper():
        return PosTag.NNP
    return PosTag.NN


def chunk_nps(tagged: list[TaggedToken]) -> list[NpChunk]:
    """Extract non-overlapping noun phrases left to right by longest match.

    The chunk pattern is `DT? CD? JJ* (NN|NNS|NNP)+`. Chunks come back in
    increasing span order with `is_person` unset (False) until
    `classify_person` runs.
    """
    chunks: list[NpChunk] = []
    i, n = 0, len(tagged)
    while i < n:
        end = _match_at(tagged, i)
        if end is None:
            i += 1
            continue
        chunks.append(_build_chunk(tagged, i, end))
        i = end
    return chunks


def _match_at(tagged: list[TaggedToken], start: int) -> int | None:
    """Longest grammar match starting exactly at `start`, or None."""
    n = len(tagged)
    j = start
    if j < n and tagged[j].tag is PosTag.DT:
        j += 1
    if j < n and tagged[j].tag is PosTag.CD:
        j += 1
    while j < n and tagged[j].tag is PosTag.JJ:
        j += 1
    k = j
    while k < n and tagged[k].tag in _NOUN_TAGS:
        k += 1
    return k if k > j else None


def _build_chunk(tagged: list[TaggedToken], start: int, end: int) -> NpChunk:
    head = tagged[end - 1]
    cd_text = None
    for tt in tagged[start:end]:
        if tt.tag is PosTag.CD:
            cd_text = tt.token.text
            break
    return NpChunk(
        span_start=start,
        span_end=end,
        head_index=end - 1,
        surface=" ".join(tt.token.text for tt in tagged[start:end]),
        is_person=False,
        count=_count_for(head.tag, cd_text),
        possessive=_is_possessive(tagged, end),
        head_text=head.token.text,
        head_tag=head.tag,
        cd_text=cd_text,
    )


def _is_possessive(tagged: list[TaggedToken], end: int) -> bool:
    # A chunk is possessive when an "'s" clitic (or the bare apostrophe of a
    # plural possessive) is attached directly to its last token.
    if end >= len(tagged):
        return False
    nxt = tagged[end].token
    if nxt.text.lower() not in ("'s", "'"):
        return False
    return nxt.char_start == tagged[end - 1].token.char_end


def _parse_count(cd_text: str) -> int | None:
    lower = cd_text.lower()
    if lower in NUMBER_WORDS:
        return NUMBER_WORDS[lower]
    if cd_text.isdigit():
        value = int(cd_text)
        return value if value >= 1 else None
    return None


def _count_for(head_tag: PosTag, cd_text: str | None) -> Count:
    if cd_text is not None:
        value = _parse_count(cd_text)
        if value is not None:
            return Count.exact(value)
    if head_tag in (PosTag.NN, PosTag.NNP):
        return Count.exact(1)
    return Count.plural_unknown()


def classify_person(chunk: NpChunk, person_lexicon: frozenset[str] | set[str]) -> NpChunk:
    """Fill `is_person` from the head noun and (re)derive the referent count."""
    return dataclasses.replace(
        chunk,
        is_person=chunk.head_text.lower() in person_lexicon,
        count=_count_for(chunk.head_tag, chunk.cd_text),
    )
