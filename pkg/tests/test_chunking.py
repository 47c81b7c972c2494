"""Tokenizer, tagger, chunker, and person-classification tests."""

from __future__ import annotations

import re

import pytest
from hypothesis import given, settings, strategies as st

from namegraft.chunking import (
    Count,
    PosTag,
    chunk_nps,
    classify_person,
    pos_tag,
    tokenize,
)

CHUNK_TAG_RE = re.compile(r"^(DT )?(CD )?(JJ )*(NN|NNS|NNP)( (NN|NNS|NNP))*$")


def texts(tokens):
    return [t.text for t in tokens]


def analyze(sentence, tag_lexicon, person_lexicon):
    tokens = tokenize(sentence)
    tagged = pos_tag(tokens, tag_lexicon)
    return tokens, tagged, [classify_person(c, person_lexicon) for c in chunk_nps(tagged)]


class TestTokenize:
    def test_simple_sentence(self):
        assert texts(tokenize("a man is delivering a speech")) == [
            "a", "man", "is", "delivering", "a", "speech"]

    def test_empty(self):
        assert tokenize("") == []

    def test_possessive_and_period(self):
        assert texts(tokenize("Obama's speech.")) == ["Obama", "'s", "speech", "."]

    def test_offsets_for_possessive(self):
        tokens = tokenize("Obama's speech.")
        assert [(t.char_start, t.char_end) for t in tokens] == [
            (0, 5), (5, 7), (8, 14), (14, 15)]

    def test_leading_and_trailing_punctuation(self):
        assert texts(tokenize('"a man smiles"')) == ['"', "a", "man", "smiles", '"']

    def test_multiple_trailing_punct_in_order(self):
        assert texts(tokenize("wow!?")) == ["wow", "!", "?"]

    def test_all_punct_word(self):
        assert texts(tokenize("...")) == [".", ".", "."]

    def test_internal_apostrophe_kept(self):
        assert texts(tokenize("don't stop")) == ["don't", "stop"]

    def test_indices_sequential(self):
        tokens = tokenize("one two, three.")
        assert [t.index for t in tokens] == list(range(len(tokens)))

    @given(st.text(max_size=80))
    def test_offset_round_trip(self, raw):
        tokens = tokenize(raw)
        cursor = 0
        for tok in tokens:
            assert tok.char_start >= cursor
            assert raw[tok.char_start:tok.char_end] == tok.text
            # gap before this token is pure whitespace
            assert raw[cursor:tok.char_start].strip() == ""
            cursor = tok.char_end
        rebuilt = ""
        cursor = 0
        for tok in tokens:
            rebuilt += raw[cursor:tok.char_start] + tok.text
            cursor = tok.char_end
        rebuilt += raw[cursor:]
        assert rebuilt == raw

    @given(st.text(max_size=80))
    def test_deterministic(self, raw):
        assert tokenize(raw) == tokenize(raw)


class TestPosTag:
    def test_lexicon_lookup(self, tag_lexicon):
        tagged = pos_tag(tokenize("a man"), tag_lexicon)
        assert [tt.tag for tt in tagged] == [PosTag.DT, PosTag.NN]

    def test_cd_adjective_and_plural_suffix(self, tag_lexicon):
        tagged = pos_tag(tokenize("Two young boys"), tag_lexicon)
        assert [tt.tag for tt in tagged] == [PosTag.CD, PosTag.JJ, PosTag.NNS]

    def test_unknown_defaults_to_nn(self, tag_lexicon):
        tagged = pos_tag(tokenize("blorptle"), tag_lexicon)
        assert [tt.tag for tt in tagged] == [PosTag.NN]

    def test_punct_tokens(self, tag_lexicon):
        tagged = pos_tag(tokenize("hello."), tag_lexicon)
        assert tagged[-1].tag is PosTag.PUNCT

    def test_possessive_clitic_is_other(self, tag_lexicon):
        tagged = pos_tag(tokenize("Obama's hat"), tag_lexicon)
        assert tagged[1].token.text == "'s"
        assert tagged[1].tag is PosTag.OTHER

    def test_digit_is_cd(self, tag_lexicon):
        tagged = pos_tag(tokenize("2 men"), tag_lexicon)
        assert tagged[0].tag is PosTag.CD

    def test_capitalized_mid_sentence_is_nnp(self, tag_lexicon):
        tagged = pos_tag(tokenize("meeting Widgetfrob today"), tag_lexicon)
        assert tagged[1].tag is PosTag.NNP

    def test_capitalized_at_start_not_nnp(self, tag_lexicon):
        tagged = pos_tag(tokenize("Widgetfrob arrives"), tag_lexicon)
        assert tagged[0].tag is PosTag.NN

    def test_number_word_is_cd(self, tag_lexicon):
        tagged = pos_tag(tokenize("seven dogs"), tag_lexicon)
        assert tagged[0].tag is PosTag.CD


class TestChunkNps:
    def test_motivating_sentence_spans(self, tag_lexicon):
        chunks = chunk_nps(pos_tag(tokenize("a man is delivering a speech"), tag_lexicon))
        assert [(c.span_start, c.span_end) for c in chunks] == [(0, 2), (4, 6)]

    def test_no_nouns_no_chunks(self, tag_lexicon):
        assert chunk_nps(pos_tag(tokenize("is running quickly"), tag_lexicon)) == []

    def test_full_np_with_modifiers(self, tag_lexicon):
        chunks = chunk_nps(pos_tag(tokenize("the tall young woman"), tag_lexicon))
        assert len(chunks) == 1
        chunk = chunks[0]
        assert (chunk.span_start, chunk.span_end) == (0, 4)
        assert chunk.head_text == "woman"
        assert chunk.surface == "the tall young woman"

    def test_determiner_alone_recovers_following_np(self, tag_lexicon):
        # leading stray determiner must not swallow "the man"
        chunks = chunk_nps(pos_tag(tokenize("the the man"), tag_lexicon))
        assert [(c.span_start, c.span_end) for c in chunks] == [(1, 3)]

    def test_noun_run_is_one_chunk(self, tag_lexicon):
        chunks = chunk_nps(pos_tag(tokenize("a soccer field"), tag_lexicon))
        assert [(c.span_start, c.span_end) for c in chunks] == [(0, 3)]
        assert chunks[0].head_text == "field"

    def test_possessive_flag(self, tag_lexicon):
        chunks = chunk_nps(pos_tag(tokenize("a man's hat is red"), tag_lexicon))
        assert chunks[0].surface == "a man"
        assert chunks[0].possessive is True
        # the possessed noun itself is a separate, non-possessive chunk
        assert chunks[1].surface == "hat"
        assert chunks[1].possessive is False

    def test_plural_possessive_flag(self, tag_lexicon):
        chunks = chunk_nps(pos_tag(tokenize("the boys' ball"), tag_lexicon))
        assert chunks[0].surface == "the boys"
        assert chunks[0].possessive is True

    def test_clitic_never_inside_chunk(self, tag_lexicon):
        tagged = pos_tag(tokenize("a man's hat"), tag_lexicon)
        for chunk in chunk_nps(tagged):
            for tt in tagged[chunk.span_start:chunk.span_end]:
                assert tt.token.text != "'s"

    @given(words=st.lists(st.sampled_from(
        ["a", "the", "two", "young", "red", "man", "woman", "boys", "dog",
         "is", "runs", "and", ".", "blorptle", "Paris"]), max_size=12))
    def test_chunks_match_grammar_and_never_overlap(self, tag_lexicon, words):
        tagged = pos_tag(tokenize(" ".join(words)), tag_lexicon)
        chunks = chunk_nps(tagged)
        prev_end = 0
        for chunk in chunks:
            assert prev_end <= chunk.span_start < chunk.span_end
            prev_end = chunk.span_end
            tag_string = " ".join(
                tt.tag.value for tt in tagged[chunk.span_start:chunk.span_end])
            assert CHUNK_TAG_RE.match(tag_string), tag_string
            assert chunk.span_start <= chunk.head_index < chunk.span_end


class TestClassifyPerson:
    def test_a_man(self, tag_lexicon, person_lexicon):
        _, _, chunks = analyze("a man", tag_lexicon, person_lexicon)
        assert chunks[0].is_person is True
        assert chunks[0].count == Count.exact(1)

    def test_two_young_boys(self, tag_lexicon, person_lexicon):
        _, _, chunks = analyze("Two young boys", tag_lexicon, person_lexicon)
        assert chunks[0].is_person is True
        assert chunks[0].count == Count.exact(2)

    def test_a_speech_not_person(self, tag_lexicon, person_lexicon):
        _, _, chunks = analyze("a speech", tag_lexicon, person_lexicon)
        assert chunks[0].is_person is False

    def test_bare_plural_unknown_count(self, tag_lexicon, person_lexicon):
        _, _, chunks = analyze("people", tag_lexicon, person_lexicon)
        assert chunks[0].is_person is True
        assert chunks[0].count == Count.plural_unknown()

    def test_digit_count(self, tag_lexicon, person_lexicon):
        _, _, chunks = analyze("3 women", tag_lexicon, person_lexicon)
        assert chunks[0].count == Count.exact(3)

    def test_number_word_twenty(self, tag_lexicon, person_lexicon):
        _, _, chunks = analyze("twenty children", tag_lexicon, person_lexicon)
        assert chunks[0].count == Count.exact(20)

    def test_proper_noun_head_exact_one(self, tag_lexicon, person_lexicon):
        # mid-sentence capitalized unknown -> NNP head, singular
        _, _, chunks = analyze("and Widgetfrob is smiling", tag_lexicon, person_lexicon)
        assert len(chunks) == 1
        assert chunks[0].head_tag is PosTag.NNP
        assert chunks[0].count == Count.exact(1)

    @given(sentence=st.sampled_from(["a man", "two women", "people", "a dog", "the speech"]),
           extra=st.sets(st.sampled_from(["man", "women", "people", "dog", "speech"])))
    @settings(max_examples=60)
    def test_monotone_in_lexicon(self, tag_lexicon, person_lexicon, sentence, extra):
        _, _, base = analyze(sentence, tag_lexicon, person_lexicon)
        bigger = frozenset(person_lexicon | extra)
        _, _, grown = analyze(sentence, tag_lexicon, bigger)
        for before, after in zip(base, grown):
            if before.is_person:
                assert after.is_person

    def test_determinism(self, tag_lexicon, person_lexicon):
        results = [analyze("two young boys play soccer", tag_lexicon, person_lexicon)
                   for _ in range(3)]
        assert results[0] == results[1] == results[2]
