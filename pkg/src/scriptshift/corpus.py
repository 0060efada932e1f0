"""Corpus containers, budgeted sampling, and annotated-data conversion.

Corpora are plain-text files with one document per line. Annotated data
(for sequence-labeling tasks) is token<TAB>label lines with blank lines
separating records; labels are never transformed, only tokens are.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .input_types import InputType


class EmptyCorpusError(ValueError):
    """Raised when an operation needs at least one document or word."""


class RecordConversionError(ValueError):
    """Raised when transforming one token of an annotated record fails."""

    def __init__(self, token_index: int, token: str, cause: Exception):
        super().__init__(f"token {token_index} ({token!r}) failed to "
                         f"convert: {cause}")
        self.token_index = token_index
        self.token = token
        self.cause = cause


@dataclass(frozen=True)
class Document:
    doc_id: str
    lang: str
    text: str

    def __post_init__(self) -> None:
        if "\n" in self.text:
            raise ValueError(f"document {self.doc_id!r} text contains a "
                             f"newline; one document per line")


@dataclass(frozen=True)
class CorpusManifest:
    """What a sampling pass selected: document and word totals for one
    language in one input type, plus the seed that drove the shuffle."""

    lang: str
    input_type: InputType
    doc_count: int
    word_count: int
    sampling_seed: int
    under_budget: bool

    def __post_init__(self) -> None:
        if self.doc_count < 0 or self.word_count < 0:
            raise ValueError("manifest counts must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "lang": self.lang,
            "input_type": self.input_type.value,
            "doc_count": self.doc_count,
            "word_count": self.word_count,
            "sampling_seed": self.sampling_seed,
            "under_budget": self.under_budget,
        }

    @classmethod
    def from_json_dict(cls, payload: Mapping) -> "CorpusManifest":
        return cls(
            lang=payload["lang"],
            input_type=InputType.parse(payload["input_type"]),
            doc_count=int(payload["doc_count"]),
            word_count=int(payload["word_count"]),
            sampling_seed=int(payload["sampling_seed"]),
            under_budget=bool(payload["under_budget"]),
        )


@dataclass(frozen=True)
class AnnotatedRecord:
    tokens: tuple[str, ...]
    labels: tuple[str, ...]
    lang: str

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.labels):
            raise ValueError(
                f"record has {len(self.tokens)} tokens but "
                f"{len(self.labels)} labels")


def count_words(doc: Document | str) -> int:
    """Whitespace-segmented word count; empty text counts zero."""
    text = doc.text if isinstance(doc, Document) else doc
    return len(text.split())


def sample_to_budget(docs: Sequence[Document], budget: int, seed: int,
                     input_type: InputType = InputType.ORTHO,
                     ) -> tuple[CorpusManifest, list[Document]]:
    """Select a word-budgeted subset of one language's documents.

    Documents are put in a canonical order (sorted by doc_id), shuffled with
    a seeded Fisher-Yates pass, and accumulated until the word budget is
    reached. The document that crosses the budget is included, so the
    selection always holds at least budget words when the collection does.
    """
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    if not docs:
        raise EmptyCorpusError("cannot sample from an empty corpus")
    langs = {doc.lang for doc in docs}
    if len(langs) != 1:
        raise ValueError(f"documents span multiple languages: {sorted(langs)}")
    ids = [doc.doc_id for doc in docs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate doc_id in corpus")

    ordered = sorted(docs, key=lambda d: d.doc_id)
    random.Random(seed).shuffle(ordered)

    selected: list[Document] = []
    total = 0
    for doc in ordered:
        selected.append(doc)
        total += count_words(doc)
        if total >= budget:
            break
    manifest = CorpusManifest(
        lang=docs[0].lang,
        input_type=input_type,
        doc_count=len(selected),
        word_count=total,
        sampling_seed=seed,
        under_budget=total < budget,
    )
    return manifest, selected


def oversampling_weights(manifests: Sequence[CorpusManifest],
                         budget: int) -> dict[str, Fraction]:
    """Per-language repetition weights that level corpus sizes: languages
    below the budget get weight budget/word_count, clamped to at least 1."""
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    weights: dict[str, Fraction] = {}
    for manifest in manifests:
        if manifest.lang in weights:
            raise ValueError(f"duplicate language {manifest.lang!r}")
        if manifest.word_count == 0:
            raise EmptyCorpusError(
                f"language {manifest.lang!r} has zero words; cannot weight")
        weights[manifest.lang] = max(Fraction(1),
                                     Fraction(budget, manifest.word_count))
    return weights


def repetition_counts(manifests: Sequence[CorpusManifest],
                      budget: int) -> dict[str, int]:
    """Whole-corpus repetition counts: ceil of the oversampling weight, so
    repeating a corpus that many times always meets the budget."""
    weights = oversampling_weights(manifests, budget)
    return {lang: math.ceil(weight) for lang, weight in weights.items()}


def convert_annotated(record: AnnotatedRecord,
                      transform: Callable[[str], str]) -> AnnotatedRecord:
    """Apply a text transform to each token, leaving labels untouched."""
    converted = []
    for index, token in enumerate(record.tokens):
        try:
            converted.append(transform(token))
        except Exception as exc:
            raise RecordConversionError(index, token, exc) from exc
    return AnnotatedRecord(tuple(converted), record.labels, record.lang)


# --- File I/O ---------------------------------------------------------------


def read_documents(path: str | Path, lang: str) -> list[Document]:
    """Read a one-document-per-line corpus; blank lines are skipped and
    doc_ids are derived from line numbers."""
    docs = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.rstrip("\n")
            if not text.strip():
                continue
            docs.append(Document(f"{lang}-{lineno:08d}", lang, text))
    return docs


def write_documents(path: str | Path, docs: Iterable[Document]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for doc in docs:
            handle.write(doc.text + "\n")


def read_manifest(path: str | Path) -> CorpusManifest:
    with open(path, "r", encoding="utf-8") as handle:
        return CorpusManifest.from_json_dict(json.load(handle))


def write_manifest(path: str | Path, manifest: CorpusManifest) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest.to_json_dict(), handle, ensure_ascii=False,
                  indent=2)
        handle.write("\n")


def read_annotated(path: str | Path, lang: str) -> list[AnnotatedRecord]:
    """Read token<TAB>label lines; blank lines separate records."""
    records: list[AnnotatedRecord] = []
    tokens: list[str] = []
    labels: list[str] = []

    def flush() -> None:
        if tokens:
            records.append(AnnotatedRecord(tuple(tokens), tuple(labels),
                                           lang))
            tokens.clear()
            labels.clear()

    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush()
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected token<TAB>label, "
                    f"got {line!r}")
            tokens.append(parts[0])
            labels.append(parts[1])
    flush()
    return records


def write_annotated(path: str | Path,
                    records: Iterable[AnnotatedRecord]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        first = True
        for record in records:
            if not first:
                handle.write("\n")
            for token, label in zip(record.tokens, record.labels):
                handle.write(f"{token}\t{label}\n")
            first = False
