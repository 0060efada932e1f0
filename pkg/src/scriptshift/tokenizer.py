"""Deterministic subword tokenizer built on greedy pair merging.

Training learns highest-frequency symbol-pair merges over whitespace words,
each word prefixed with a reserved boundary-marker symbol. Encoding replays
the merge list in training order, so a serialized model reproduces the same
segmentation anywhere. Characters outside the alphabet are collapsed, one
maximal run at a time, into a single unknown token.
"""

from __future__ import annotations

import heapq
import json
import weakref
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .corpus import EmptyCorpusError
from .input_types import InputType

UNK_ID = 0
UNK_TOKEN = "<unk>"
UNK_DECODED = "\N{REPLACEMENT CHARACTER}"
BOUNDARY_MARKER = "\N{LOWER ONE EIGHTH BLOCK}"  # "▁", reserved


class _UnkRun:
    """Placeholder symbol for a maximal run of out-of-alphabet characters."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "<unk-run>"


UNK_SENTINEL = _UnkRun()


class ModelFormatError(ValueError):
    """Raised when a serialized model fails structural validation."""


@dataclass(frozen=True, eq=False)
class SubwordModel:
    """A trained tokenizer: alphabet, ordered merges, and the id table.

    Ids are assigned unknown first (0), boundary marker second (1), alphabet
    characters by codepoint from 2, then merge products in merge order.
    """

    alphabet: frozenset[str]
    merges: tuple[tuple[str, str], ...]
    vocab: dict[str, int]
    vocab_size_target: int
    boundary_marker: str = BOUNDARY_MARKER
    version: str = "1"

    def __post_init__(self) -> None:
        vocab = self.vocab
        if vocab.get(UNK_TOKEN) != UNK_ID:
            raise ModelFormatError(f"{UNK_TOKEN!r} must have id {UNK_ID}")
        if vocab.get(self.boundary_marker) != 1:
            raise ModelFormatError("boundary marker must have id 1")
        ids = sorted(vocab.values())
        if ids != list(range(len(vocab))):
            raise ModelFormatError("vocab ids must be contiguous from 0")
        missing = [c for c in self.alphabet if c not in vocab]
        if missing:
            raise ModelFormatError(f"alphabet symbols missing from vocab: "
                                   f"{sorted(missing)!r}")
        if self.boundary_marker in self.alphabet:
            raise ModelFormatError("boundary marker cannot be in alphabet")
        for left, right in self.merges:
            if left not in vocab or right not in vocab:
                raise ModelFormatError(
                    f"merge ({left!r}, {right!r}) references unknown tokens")

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def id_to_token(self) -> list[str]:
        table = [""] * len(self.vocab)
        for token, token_id in self.vocab.items():
            table[token_id] = token
        return table

    def strip_marker(self, token: str) -> str:
        if token.startswith(self.boundary_marker):
            return token[len(self.boundary_marker):]
        return token

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "vocab_size_target": self.vocab_size_target,
            "boundary_marker": self.boundary_marker,
            "alphabet": sorted(self.alphabet),
            "merges": [list(pair) for pair in self.merges],
            "vocab": {token: token_id for token, token_id
                      in sorted(self.vocab.items(), key=lambda kv: kv[1])},
        }

    @classmethod
    def from_json_dict(cls, payload: Mapping) -> "SubwordModel":
        try:
            merges = tuple((str(a), str(b)) for a, b in payload["merges"])
            model = cls(
                alphabet=frozenset(payload["alphabet"]),
                merges=merges,
                vocab={str(k): int(v) for k, v in payload["vocab"].items()},
                vocab_size_target=int(payload["vocab_size_target"]),
                boundary_marker=str(payload.get("boundary_marker",
                                                BOUNDARY_MARKER)),
                version=str(payload.get("version", "1")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(f"malformed model payload: {exc}") from exc
        return model


@dataclass(frozen=True)
class TokenSet:
    """The set of surface token strings (boundary markers stripped) a model
    produces on one corpus. Set semantics: duplicates collapse."""

    lang: str
    input_type: InputType
    tokens: frozenset[str]

    def by_length(self) -> dict[int, frozenset[str]]:
        buckets: dict[int, set[str]] = {}
        for token in self.tokens:
            buckets.setdefault(len(token), set()).add(token)
        return {length: frozenset(tokens)
                for length, tokens in sorted(buckets.items())}

    def to_json_dict(self) -> dict:
        return {
            "lang": self.lang,
            "input_type": self.input_type.value,
            "tokens": sorted(self.tokens),
        }

    @classmethod
    def from_json_dict(cls, payload: Mapping) -> "TokenSet":
        return cls(
            lang=payload["lang"],
            input_type=InputType.parse(payload["input_type"]),
            tokens=frozenset(payload["tokens"]),
        )


# --- Training ---------------------------------------------------------------


def _word_symbols(word: str, alphabet: frozenset[str],
                  marker: str) -> tuple:
    """Initial symbol sequence: marker, then characters, with each maximal
    out-of-alphabet run collapsed to the unknown sentinel."""
    syms: list = [marker]
    in_unk_run = False
    for char in word:
        if char in alphabet:
            syms.append(char)
            in_unk_run = False
        elif not in_unk_run:
            syms.append(UNK_SENTINEL)
            in_unk_run = True
    return tuple(syms)


def _mergeable_pairs(syms: Sequence) -> Iterator[tuple[str, str]]:
    for left, right in zip(syms, syms[1:]):
        if left is not UNK_SENTINEL and right is not UNK_SENTINEL:
            yield (left, right)


def _apply_merge(syms: list, pair: tuple[str, str], merged: str) -> list:
    """Replace every occurrence of pair, scanning left to right."""
    out: list = []
    i = 0
    n = len(syms)
    while i < n:
        if (i + 1 < n and syms[i] == pair[0] and syms[i + 1] == pair[1]
                and syms[i] is not UNK_SENTINEL
                and syms[i + 1] is not UNK_SENTINEL):
            out.append(merged)
            i += 2
        else:
            out.append(syms[i])
            i += 1
    return out


def train_from_word_counts(word_counts: Mapping[str, int], vocab_size: int,
                           min_char_freq: int = 1,
                           marker: str = BOUNDARY_MARKER) -> SubwordModel:
    """Train a model from word frequencies.

    Greedy loop: the most frequent adjacent symbol pair is merged, ties
    broken by the lexicographically smaller concatenation and then pair.
    Merging stops when the vocabulary reaches vocab_size or no pair occurs
    at least twice. Candidate selection uses a heap with lazy invalidation;
    entries are revalidated against current counts when popped.
    """
    if min_char_freq < 1:
        raise ValueError(f"min_char_freq must be >= 1, got {min_char_freq}")
    counts = {word: int(freq) for word, freq in word_counts.items()
              if word and freq > 0}
    if not counts:
        raise EmptyCorpusError("training corpus has no words")

    char_freqs: Counter = Counter()
    for word, freq in counts.items():
        if marker in word:
            raise ValueError(f"boundary marker {marker!r} occurs in the "
                             f"corpus; it is reserved")
        for char in word:
            char_freqs[char] += freq
    alphabet = frozenset(c for c, f in char_freqs.items()
                         if f >= min_char_freq)
    reserved = 2  # unknown + boundary marker
    if vocab_size <= len(alphabet) + reserved:
        raise ValueError(
            f"vocab_size {vocab_size} leaves no merge room: alphabet has "
            f"{len(alphabet)} symbols plus {reserved} reserved tokens")

    vocab: dict[str, int] = {UNK_TOKEN: 0, marker: 1}
    for char in sorted(alphabet):
        vocab[char] = len(vocab)

    words: dict[str, list] = {
        word: [freq, list(_word_symbols(word, alphabet, marker))]
        for word, freq in counts.items()
    }
    pair_counts: Counter = Counter()
    pair_words: dict[tuple[str, str], set[str]] = {}
    for word, (freq, syms) in words.items():
        for pair in _mergeable_pairs(syms):
            pair_counts[pair] += freq
            pair_words.setdefault(pair, set()).add(word)

    heap: list = []
    for pair, count in pair_counts.items():
        if count >= 2:
            heapq.heappush(heap, (-count, pair[0] + pair[1], pair))

    merges: list[tuple[str, str]] = []
    while len(vocab) < vocab_size and heap:
        neg_count, merged, pair = heapq.heappop(heap)
        count = pair_counts.get(pair, 0)
        if count != -neg_count or count < 2:
            continue  # stale entry
        merges.append(pair)
        if merged not in vocab:
            vocab[merged] = len(vocab)

        touched = pair_words.pop(pair, set())
        for word in touched:
            freq, syms = words[word]
            old_pairs = Counter(_mergeable_pairs(syms))
            new_syms = _apply_merge(syms, pair, merged)
            new_pairs = Counter(_mergeable_pairs(new_syms))
            words[word][1] = new_syms
            delta = Counter(new_pairs)
            delta.subtract(old_pairs)
            for changed, d in delta.items():
                if d == 0:
                    continue
                pair_counts[changed] += d * freq
                if pair_counts[changed] <= 0:
                    del pair_counts[changed]
                    pair_words.get(changed, set()).discard(word)
                else:
                    new_count = pair_counts[changed]
                    if new_count >= 2:
                        heapq.heappush(
                            heap, (-new_count, changed[0] + changed[1],
                                   changed))
            for changed in new_pairs:
                pair_words.setdefault(changed, set()).add(word)
            for changed in old_pairs:
                if changed not in new_pairs:
                    pair_words.get(changed, set()).discard(word)

    return SubwordModel(
        alphabet=alphabet,
        merges=tuple(merges),
        vocab=vocab,
        vocab_size_target=vocab_size,
        boundary_marker=marker,
    )


def train(corpus: Iterable[str], vocab_size: int,
          min_char_freq: int = 1) -> SubwordModel:
    """Train a model on an iterable of text lines."""
    word_counts: Counter = Counter()
    for line in corpus:
        word_counts.update(line.split())
    return train_from_word_counts(word_counts, vocab_size, min_char_freq)


# --- Encoding ---------------------------------------------------------------


class Encoder:
    """Replays a model's merges over words, caching per-word segmentations.

    Reuse one encoder across a whole corpus pass; the cache makes repeated
    words cost a dictionary lookup.
    """

    def __init__(self, model: SubwordModel):
        self.model = model
        self._cache: dict[str, tuple] = {}

    def segment_word(self, word: str) -> tuple:
        """Emitted symbol sequence for one word: token strings and unknown
        sentinels. A boundary marker left standalone directly before an
        unknown run is dropped, so fully out-of-alphabet words produce
        exactly one unknown token."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        model = self.model
        syms = list(_word_symbols(word, model.alphabet,
                                  model.boundary_marker))
        present = set(syms)
        for pair in model.merges:
            if pair[0] in present and pair[1] in present:
                merged_syms = _apply_merge(syms, pair, pair[0] + pair[1])
                if len(merged_syms) != len(syms):
                    syms = merged_syms
                    present.add(pair[0] + pair[1])
        if (len(syms) > 1 and syms[0] == model.boundary_marker
                and syms[1] is UNK_SENTINEL):
            syms = syms[1:]
        result = tuple(syms)
        self._cache[word] = result
        return result

    def iter_symbols(self, text: str) -> Iterator:
        for word in text.split():
            yield from self.segment_word(word)

    def encode(self, text: str) -> list[int]:
        vocab = self.model.vocab
        return [UNK_ID if sym is UNK_SENTINEL else vocab[sym]
                for sym in self.iter_symbols(text)]

    def tokens(self, text: str) -> list[str]:
        return [UNK_TOKEN if sym is UNK_SENTINEL else sym
                for sym in self.iter_symbols(text)]


_encoders: "weakref.WeakKeyDictionary[SubwordModel, Encoder]" = \
    weakref.WeakKeyDictionary()


def encoder_for(model: SubwordModel) -> Encoder:
    encoder = _encoders.get(model)
    if encoder is None:
        encoder = Encoder(model)
        _encoders[model] = encoder
    return encoder


def encode(model: SubwordModel, text: str) -> list[int]:
    """Token ids for text; unknown runs map to the unknown id."""
    return encoder_for(model).encode(text)


def encode_tokens(model: SubwordModel, text: str) -> list[str]:
    """Token strings for text; unknown runs map to the unknown token."""
    return encoder_for(model).tokens(text)


def decode(model: SubwordModel, ids: Sequence[int]) -> str:
    """Invert encode for in-alphabet text: boundary markers become word
    separators and unknown ids become the replacement character."""
    table = model.id_to_token()
    marker = model.boundary_marker
    parts = []
    for token_id in ids:
        if not 0 <= token_id < len(table):
            raise ValueError(f"id {token_id} outside vocabulary of size "
                             f"{len(table)}")
        if token_id == UNK_ID:
            parts.append(UNK_DECODED)
            continue
        token = table[token_id]
        if token.startswith(marker):
            parts.append(" " + token[len(marker):])
        else:
            parts.append(token)
    text = "".join(parts)
    return text[1:] if text.startswith(" ") else text


def token_set(model: SubwordModel, corpus: Iterable[str], lang: str,
              input_type: InputType) -> TokenSet:
    """Unique surface tokens (markers stripped, unknowns excluded) the model
    produces over a corpus of text lines."""
    encoder = encoder_for(model)
    surface: set[str] = set()
    for line in corpus:
        for sym in encoder.iter_symbols(line):
            if sym is UNK_SENTINEL:
                continue
            stripped = model.strip_marker(sym)
            if stripped:
                surface.add(stripped)
    return TokenSet(lang=lang, input_type=input_type,
                    tokens=frozenset(surface))


# --- Serialization ----------------------------------------------------------


def dumps_model(model: SubwordModel) -> str:
    """Serialize with sorted keys and ASCII escapes for byte-stable output."""
    return json.dumps(model.to_json_dict(), ensure_ascii=True,
                      sort_keys=True, indent=2) + "\n"


def save_model(model: SubwordModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def loads_model(payload: str) -> SubwordModel:
    try:
        raw = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    return SubwordModel.from_json_dict(raw)


def load_model(path: str | Path) -> SubwordModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))
