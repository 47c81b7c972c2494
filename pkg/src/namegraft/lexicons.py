"""Loaders for the shipped tag and person-head lexicon data files.

Both lexicons are plain UTF-8 text so deployments can swap vocabularies
without touching code: `tags.tsv` holds one `word<TAB>TAG` pair per line,
`person_heads.txt` one lowercase head noun per line. `#` starts a comment.
"""

from __future__ import annotations

import functools
from importlib import resources
from pathlib import Path

from namegraft.chunking import PosTag
from namegraft.errors import LexiconError

__all__ = ["load_tag_lexicon", "load_person_lexicon"]

TAG_LEXICON_FILE = "tags.tsv"
PERSON_LEXICON_FILE = "person_heads.txt"


def _read_shipped(name: str) -> str:
    return (resources.files("namegraft") / "data" / name).read_text(encoding="utf-8")


def _read(path: str | Path | None, shipped_name: str) -> str:
    if path is None:
        return _read_shipped(shipped_name)
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon {path}: {exc}") from exc


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def load_tag_lexicon(path: str | Path | None = None) -> dict[str, PosTag]:
    """Load a word -> PosTag mapping; `path` None means the shipped file."""
    if path is None:
        return _shipped_tag_lexicon()
    return _parse_tag_lexicon(_read(path, TAG_LEXICON_FILE), str(path))


@functools.lru_cache(maxsize=1)
def _shipped_tag_lexicon() -> dict[str, PosTag]:
    return _parse_tag_lexicon(_read_shipped(TAG_LEXICON_FILE), TAG_LEXICON_FILE)


def _parse_tag_lexicon(text: str, source: str) -> dict[str, PosTag]:
    lexicon: dict[str, PosTag] = {}
    for lineno, line in _content_lines(text):
        word, sep, tag_name = line.partition("\t")
        word = word.strip().lower()
        tag_name = tag_name.strip()
        if not sep or not word or not tag_name:
            raise LexiconError(
                f"{source}:{lineno}: expected 'word<TAB>TAG', got {line!r}")
        try:
            lexicon[word] = PosTag[tag_name]
        except KeyError:
            raise LexiconError(
                f"{source}:{lineno}: unknown tag {tag_name!r}") from None
    return lexicon


def load_person_lexicon(path: str | Path | None = None) -> frozenset[str]:
    """Load the set of person-referring head nouns; None means the shipped file."""
    if path is None:
        return _shipped_person_lexicon()
    return _parse_person_lexicon(_read(path, PERSON_LEXICON_FILE))


@functools.lru_cache(maxsize=1)
def _shipped_person_lexicon() -> frozenset[str]:
    return _parse_person_lexicon(_read_shipped(PERSON_LEXICON_FILE))


def _parse_person_lexicon(text: str) -> frozenset[str]:
    return frozenset(line.lower() for _, line in _content_lines(text))
