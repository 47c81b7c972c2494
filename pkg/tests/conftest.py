"""Shared fixtures and hypothesis strategies for the test suite."""

from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from namegraft.chunking import Token
from namegraft.geometry import AttentionMap, BoundingBox
from namegraft.lexicons import load_person_lexicon, load_tag_lexicon

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def tag_lexicon():
    return load_tag_lexicon()


@pytest.fixture(scope="session")
def person_lexicon():
    return load_person_lexicon()


# --- hypothesis strategies -------------------------------------------------

def boxes_within(width: int, height: int) -> st.SearchStrategy[BoundingBox]:
    return st.builds(
        lambda x, y, w, h: BoundingBox(
            min(x, width - 1), min(y, height - 1),
            min(w, width - min(x, width - 1)), min(h, height - min(y, height - 1))),
        st.integers(0, width - 1), st.integers(0, height - 1),
        st.integers(1, width), st.integers(1, height),
    )


@st.composite
def scored_boxes(draw, max_n=10, width=100, height=100):
    n = draw(st.integers(0, max_n))
    out = []
    for _ in range(n):
        box = draw(boxes_within(width, height))
        score = draw(st.floats(0, 1, allow_nan=False, allow_infinity=False))
        out.append((box, score))
    return out


@st.composite
def attention_maps(draw, max_tokens=6, grid_size=7):
    """Row-stochastic maps built by normalizing positive weights."""
    cells = grid_size * grid_size
    t = draw(st.integers(1, max_tokens))
    rows = []
    for _ in range(t):
        raw = draw(st.lists(st.floats(0.01, 1.0, allow_nan=False),
                            min_size=cells, max_size=cells))
        total = sum(raw)
        rows.append([w / total for w in raw])
    return AttentionMap.from_rows(rows, grid_size)


def make_random_attention(rng: random.Random, tokens: int, grid_size: int = 7) -> AttentionMap:
    """Plain-random row-stochastic map for seeded bulk tests."""
    cells = grid_size * grid_size
    rows = []
    for _ in range(tokens):
        raw = [rng.random() + 1e-3 for _ in range(cells)]
        total = sum(raw)
        rows.append([w / total for w in raw])
    return AttentionMap.from_rows(rows, grid_size)


def make_token_list(texts: list[str]) -> list[Token]:
    """Tokens laid out with single-space separators, for tests that build
    token sequences directly."""
    tokens = []
    pos = 0
    for i, text in enumerate(texts):
        tokens.append(Token(text, i, pos, pos + len(text)))
        pos += len(text) + 1
    return tokens
