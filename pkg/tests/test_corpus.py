"""Corpus sampling, oversampling weights, and annotated-data conversion."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scriptshift import corpus as cp
from scriptshift import translit as tr
from scriptshift.input_types import InputType


def docs_of(*texts, lang="eng"):
    return [cp.Document(f"{lang}-{i:04d}", lang, text)
            for i, text in enumerate(texts)]


word_lists = st.lists(
    st.text(alphabet="abcdef", min_size=1, max_size=5), max_size=12)


def manifest_of(lang, words, budget=100, seed=0):
    return cp.CorpusManifest(lang, InputType.ORTHO, 1, words, seed,
                             words < budget)


class TestCountWords:
    @pytest.mark.parametrize("text,expected", [
        ("", 0),
        ("   ", 0),
        ("hello world", 2),
        ("a  b\tc", 3),
        (" leading and trailing ", 3),
    ])
    def test_whitespace_segmentation(self, text, expected):
        assert cp.count_words(text) == expected
        assert cp.count_words(cp.Document("d", "eng", text)) == expected


class TestSampling:
    def test_crossing_document_included(self):
        docs = docs_of("a b c d e", "f g h i j", "k l m n o")
        manifest, selected = cp.sample_to_budget(docs, budget=12, seed=3)
        assert manifest.doc_count == 3
        assert manifest.word_count == 15
        assert manifest.word_count >= 12
        assert not manifest.under_budget
        assert len(selected) == 3

    def test_under_budget_flag(self):
        docs = docs_of("a b", "c d")
        manifest, selected = cp.sample_to_budget(docs, budget=100, seed=0)
        assert manifest.under_budget
        assert manifest.word_count == 4
        assert manifest.doc_count == 2

    def test_exactly_at_budget_is_not_under(self):
        docs = docs_of("a b c", "d e f")
        manifest, _ = cp.sample_to_budget(docs, budget=6, seed=0)
        assert manifest.word_count == 6
        assert not manifest.under_budget

    def test_stop_after_crossing(self):
        # each doc has 4 words; budget 5 needs exactly two docs
        docs = docs_of("a a a a", "b b b b", "c c c c", "d d d d")
        manifest, selected = cp.sample_to_budget(docs, budget=5, seed=11)
        assert manifest.doc_count == 2
        assert manifest.word_count == 8

    def test_same_seed_same_selection(self):
        docs = docs_of(*[f"w{i} " * (i + 1) for i in range(20)])
        first = cp.sample_to_budget(docs, budget=30, seed=7)
        second = cp.sample_to_budget(docs, budget=30, seed=7)
        assert first[0] == second[0]
        assert first[1] == second[1]

    def test_input_order_does_not_matter(self):
        docs = docs_of(*[f"w{i} " * (i + 1) for i in range(20)])
        forward = cp.sample_to_budget(docs, budget=30, seed=7)
        backward = cp.sample_to_budget(list(reversed(docs)), budget=30,
                                       seed=7)
        assert forward[0] == backward[0]
        assert forward[1] == backward[1]

    def test_seed_changes_selection(self):
        docs = docs_of(*[f"w{i}" for i in range(50)])
        _, first = cp.sample_to_budget(docs, budget=10, seed=1)
        _, second = cp.sample_to_budget(docs, budget=10, seed=2)
        assert [d.doc_id for d in first] != [d.doc_id for d in second]

    def test_errors(self):
        docs = docs_of("a b")
        with pytest.raises(cp.EmptyCorpusError):
            cp.sample_to_budget([], budget=10, seed=0)
        with pytest.raises(ValueError):
            cp.sample_to_budget(docs, budget=0, seed=0)
        dup = [cp.Document("x", "eng", "a"), cp.Document("x", "eng", "b")]
        with pytest.raises(ValueError, match="duplicate"):
            cp.sample_to_budget(dup, budget=10, seed=0)
        mixed = [cp.Document("x", "eng", "a"), cp.Document("y", "fra", "b")]
        with pytest.raises(ValueError, match="languages"):
            cp.sample_to_budget(mixed, budget=10, seed=0)

    @given(st.lists(word_lists, min_size=1, max_size=10),
           st.integers(1, 40), st.integers(0, 10_000))
    @settings(max_examples=60)
    def test_manifest_counts_match_selection(self, lists, budget, seed):
        docs = [cp.Document(f"d{i:03d}", "eng", " ".join(words))
                for i, words in enumerate(lists)]
        manifest, selected = cp.sample_to_budget(docs, budget, seed)
        assert manifest.word_count == sum(cp.count_words(d) for d in selected)
        assert manifest.doc_count == len(selected)
        selected_ids = [d.doc_id for d in selected]
        assert len(set(selected_ids)) == len(selected_ids)
        assert set(selected_ids) <= {d.doc_id for d in docs}
        if manifest.under_budget:
            assert manifest.doc_count == len(docs)
            assert manifest.word_count < budget
        else:
            assert manifest.word_count >= budget


class TestOversamplingWeights:
    def test_exact_fractions(self):
        manifests = [manifest_of("aaa", 10), manifest_of("bbb", 5),
                     manifest_of("ccc", 40), manifest_of("ddd", 3)]
        weights = cp.oversampling_weights(manifests, budget=10)
        assert weights == {
            "aaa": Fraction(1),
            "bbb": Fraction(2),
            "ccc": Fraction(1),  # clamped, corpus already over budget
            "ddd": Fraction(10, 3),
        }

    @given(st.lists(st.integers(1, 500), min_size=1, max_size=8,
                    unique=True),
           st.integers(1, 1000))
    @settings(max_examples=60)
    def test_weighted_size_meets_budget(self, counts, budget):
        manifests = [manifest_of(f"l{i}", count, budget)
                     for i, count in enumerate(counts)]
        weights = cp.oversampling_weights(manifests, budget)
        for manifest in manifests:
            weight = weights[manifest.lang]
            assert weight >= 1
            assert weight * manifest.word_count >= budget

    def test_repetition_counts_are_ceilings(self):
        manifests = [manifest_of("aaa", 3), manifest_of("bbb", 10),
                     manifest_of("ccc", 12)]
        reps = cp.repetition_counts(manifests, budget=10)
        assert reps == {"aaa": 4, "bbb": 1, "ccc": 1}

    def test_errors(self):
        with pytest.raises(cp.EmptyCorpusError):
            cp.oversampling_weights([manifest_of("aaa", 0)], budget=10)
        with pytest.raises(ValueError, match="duplicate"):
            cp.oversampling_weights(
                [manifest_of("aaa", 5), manifest_of("aaa", 5)], budget=10)
        with pytest.raises(ValueError):
            cp.oversampling_weights([manifest_of("aaa", 5)], budget=0)


class TestAnnotated:
    def test_labels_never_change(self):
        record = cp.AnnotatedRecord(("apple", "pie"), ("B-FOOD", "I-FOOD"),
                                    "eng")
        key = tr.CipherKey("eng", 4)
        converted = cp.convert_annotated(
            record, lambda token: tr.caesar_encipher(key, token))
        assert converted.tokens == ("ettpi", "tmi")
        assert converted.labels == record.labels
        assert converted.lang == "eng"

    def test_alignment_preserved(self):
        record = cp.AnnotatedRecord(("a", "b", "c"), ("1", "2", "3"), "eng")
        converted = cp.convert_annotated(record, lambda token: token * 2)
        assert len(converted.tokens) == len(converted.labels) == 3

    def test_error_carries_token_index(self):
        record = cp.AnnotatedRecord(("ok", "ok", "boom"), ("x", "y", "z"),
                                    "eng")

        def explode(token):
            if token == "boom":
                raise ValueError("bad token")
            return token

        with pytest.raises(cp.RecordConversionError) as info:
            cp.convert_annotated(record, explode)
        assert info.value.token_index == 2
        assert info.value.token == "boom"

    def test_token_label_length_mismatch(self):
        with pytest.raises(ValueError):
            cp.AnnotatedRecord(("a",), ("x", "y"), "eng")

    def test_read_write_round_trip(self, tmp_path):
        records = [
            cp.AnnotatedRecord(("New", "York"), ("B-LOC", "I-LOC"), "eng"),
            cp.AnnotatedRecord(("ok",), ("O",), "eng"),
        ]
        path = tmp_path / "data.tsv"
        cp.write_annotated(path, records)
        assert cp.read_annotated(path, "eng") == records

    def test_read_rejects_malformed_line(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("token with no label\n", encoding="utf-8")
        with pytest.raises(ValueError):
            cp.read_annotated(path, "eng")


class TestDocumentIO:
    def test_round_trip_skips_blank_lines(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("one two\n\nthree\n   \nfour\n", encoding="utf-8")
        docs = cp.read_documents(path, "eng")
        assert [d.text for d in docs] == ["one two", "three", "four"]
        assert len({d.doc_id for d in docs}) == 3
        out = tmp_path / "out.txt"
        cp.write_documents(out, docs)
        assert [d.text for d in cp.read_documents(out, "eng")] == \
            [d.text for d in docs]

    def test_document_rejects_newline(self):
        with pytest.raises(ValueError):
            cp.Document("d", "eng", "two\nlines")

    def test_manifest_json_round_trip(self, tmp_path):
        manifest = cp.CorpusManifest("kor", InputType.CIPHER, 7, 123, 42,
                                     True)
        path = tmp_path / "manifest.json"
        cp.write_manifest(path, manifest)
        assert cp.read_manifest(path) == manifest

    def test_manifest_rejects_negative_counts(self):
        with pytest.raises(ValueError):
            cp.CorpusManifest("kor", InputType.ORTHO, -1, 0, 0, True)
