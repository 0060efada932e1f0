"""Helpers shared by test modules: synthetic corpora and fixture models."""

import random

from scriptshift import compose_hangul
from scriptshift.input_types import InputType
from scriptshift.tokenizer import BOUNDARY_MARKER, UNK_TOKEN, SubwordModel, TokenSet

CONSONANTS = "bcdfghjklmnpqrstvwxyz"
VOWELS = "aeiou"
PANGRAM = "the quick brown fox jumps over the lazy dog"


def latin_word(rng: random.Random) -> str:
    syllables = rng.randint(1, 4)
    return "".join(rng.choice(CONSONANTS) + rng.choice(VOWELS)
                   for _ in range(syllables))


def latin_lines(rng: random.Random, total_words: int,
                vocabulary: int = 400, words_per_line: int = 12) -> list[str]:
    """Synthetic Latin corpus with heavy word reuse so merges have support.
    Includes a pangram so every ASCII letter is in the alphabet."""
    lexicon = [latin_word(rng) for _ in range(vocabulary)]
    lines = [PANGRAM, PANGRAM]
    produced = len(PANGRAM.split()) * 2
    while produced < total_words:
        count = min(words_per_line, total_words - produced)
        lines.append(" ".join(rng.choice(lexicon) for _ in range(count)))
        produced += count
    return lines


def hangul_word(rng: random.Random) -> str:
    return "".join(compose_hangul(rng.randrange(19), rng.randrange(21),
                                  rng.randrange(28))
                   for _ in range(rng.randint(1, 3)))


def hangul_lines(rng: random.Random, total_words: int,
                 vocabulary: int = 200, words_per_line: int = 10) -> list[str]:
    lexicon = [hangul_word(rng) for _ in range(vocabulary)]
    lines = []
    produced = 0
    while produced < total_words:
        count = min(words_per_line, total_words - produced)
        lines.append(" ".join(rng.choice(lexicon) for _ in range(count)))
        produced += count
    return lines


def make_token_set(lang: str, tokens,
                   input_type: InputType = InputType.ORTHO) -> TokenSet:
    return TokenSet(lang=lang, input_type=input_type,
                    tokens=frozenset(tokens))


def the_cat_model() -> SubwordModel:
    """Hand-built model where "the" is one token and "cat" splits in two."""
    alphabet = frozenset("aceht")
    merges = (("t", "h"), ("th", "e"), (BOUNDARY_MARKER, "the"),
              ("c", "a"), (BOUNDARY_MARKER, "ca"))
    vocab = {UNK_TOKEN: 0, BOUNDARY_MARKER: 1}
    for char in sorted(alphabet):
        vocab[char] = len(vocab)
    for left, right in merges:
        merged = left + right
        if merged not in vocab:
            vocab[merged] = len(vocab)
    return SubwordModel(alphabet=alphabet, merges=merges, vocab=vocab,
                        vocab_size_target=12)
