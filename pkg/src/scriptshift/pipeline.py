"""End-to-end experiment runs: sample, transliterate, train, measure.

A run takes per-language document collections, samples seen languages to a
word budget, renders every corpus in the configured input type, trains one
tokenizer on the oversampling-weighted seen corpora, and reports quality and
overlap metrics. Runs are deterministic functions of the config and corpora;
artifacts are cached under a content digest so stages can be reused exactly.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .corpus import (CorpusManifest, Document, EmptyCorpusError,
                     repetition_counts, sample_to_budget)
from .input_types import InputType
from .metrics import (OverlapReport, OverlapVariant, TokenizerQualityReport,
                      overlap_report, quality_report, token_length_histogram)
from .tokenizer import (SubwordModel, TokenSet, dumps_model, loads_model,
                        token_set, train_from_word_counts)
from .translit import (CipherKey, TableRegistry, assign_shift_keys,
                       caesar_encipher, default_registry)

DEFAULT_SEED = 101
DEFAULT_VOCAB_SIZE = 30_000
DEFAULT_BUDGET = 10_000_000


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configs."""


class PipelineStageError(RuntimeError):
    """Wraps a failure with the stage and language it happened in."""

    def __init__(self, stage: str, lang: str | None, cause: Exception):
        where = f"stage {stage!r}" + (f", language {lang!r}" if lang else "")
        super().__init__(f"{where}: {cause}")
        self.stage = stage
        self.lang = lang
        self.cause = cause


@dataclass(frozen=True)
class LanguageSpec:
    lang: str
    seen: bool


@dataclass(frozen=True)
class ExperimentConfig:
    languages: tuple[LanguageSpec, ...]
    input_type: InputType
    vocab_size: int = DEFAULT_VOCAB_SIZE
    budget: int = DEFAULT_BUDGET
    seed: int = DEFAULT_SEED
    min_char_freq: int = 1
    overlap_variant: OverlapVariant = OverlapVariant.MAX_SOURCE
    table_root: str | None = None
    cipher_shifts: Mapping[str, int] | None = None

    def __post_init__(self) -> None:
        langs = [spec.lang for spec in self.languages]
        if not langs:
            raise ConfigError("config lists no languages")
        if len(set(langs)) != len(langs):
            raise ConfigError(f"duplicate languages in config: {langs}")
        if not any(spec.seen for spec in self.languages):
            raise ConfigError("config needs at least one seen language")
        if self.vocab_size < 3:
            raise ConfigError(f"vocab_size too small: {self.vocab_size}")
        if self.budget <= 0:
            raise ConfigError(f"budget must be positive: {self.budget}")
        if self.min_char_freq < 1:
            raise ConfigError(
                f"min_char_freq must be >= 1: {self.min_char_freq}")
        if self.cipher_shifts is not None:
            missing = [l for l in langs if l not in self.cipher_shifts]
            if missing:
                raise ConfigError(f"cipher_shifts missing languages: "
                                  f"{missing}")
            for lang in langs:
                CipherKey(lang, self.cipher_shifts[lang])

    @property
    def langs(self) -> tuple[str, ...]:
        return tuple(spec.lang for spec in self.languages)

    @property
    def seen_langs(self) -> tuple[str, ...]:
        return tuple(sorted(s.lang for s in self.languages if s.seen))

    @property
    def unseen_langs(self) -> tuple[str, ...]:
        return tuple(sorted(s.lang for s in self.languages if not s.seen))

    def to_json_dict(self) -> dict:
        payload = {
            "languages": [{"lang": s.lang, "seen": s.seen}
                          for s in self.languages],
            "input_type": self.input_type.value,
            "vocab_size": self.vocab_size,
            "budget": self.budget,
            "seed": self.seed,
            "min_char_freq": self.min_char_freq,
            "overlap_variant": self.overlap_variant.value,
            "table_root": self.table_root,
            "cipher_shifts": (dict(sorted(self.cipher_shifts.items()))
                              if self.cipher_shifts is not None else None),
        }
        return payload

    @classmethod
    def from_json_dict(cls, payload: Mapping) -> "ExperimentConfig":
        try:
            languages = tuple(
                LanguageSpec(str(entry["lang"]), bool(entry["seen"]))
                for entry in payload["languages"])
            return cls(
                languages=languages,
                input_type=InputType.parse(payload["input_type"]),
                vocab_size=int(payload.get("vocab_size",
                                           DEFAULT_VOCAB_SIZE)),
                budget=int(payload.get("budget", DEFAULT_BUDGET)),
                seed=int(payload.get("seed", DEFAULT_SEED)),
                min_char_freq=int(payload.get("min_char_freq", 1)),
                overlap_variant=OverlapVariant(
                    payload.get("overlap_variant", "max")),
                table_root=payload.get("table_root"),
                cipher_shifts=({str(k): int(v) for k, v
                                in payload["cipher_shifts"].items()}
                               if payload.get("cipher_shifts") is not None
                               else None),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed experiment config: {exc}") from exc

    def digest(self) -> str:
        canonical = json.dumps(self.to_json_dict(), sort_keys=True,
                               ensure_ascii=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: str | Path) -> ExperimentConfig:
    """Load a config from JSON, or TOML when a TOML parser is available."""
    path = Path(path)
    if path.suffix == ".toml":
        try:
            import tomllib as toml_parser  # Python >= 3.11
        except ModuleNotFoundError:
            try:
                import tomli as toml_parser
            except ModuleNotFoundError:
                raise ConfigError(
                    "TOML configs need Python >= 3.11 or the tomli package; "
                    "use JSON instead") from None
        try:
            payload = toml_parser.loads(path.read_text(encoding="utf-8"))
        except toml_parser.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    else:
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return ExperimentConfig.from_json_dict(payload)


@dataclass(frozen=True)
class AnalysisReport:
    """Everything a run measured, serializable to JSON and CSV."""

    config_digest: str
    model_digest: str
    input_type: InputType
    seed: int
    vocab_size: int
    seen_langs: tuple[str, ...]
    unseen_langs: tuple[str, ...]
    manifests: dict[str, CorpusManifest]
    quality: dict[str, TokenizerQualityReport]
    overlap: dict[str, OverlapReport]
    token_lengths: dict[str, dict[int, int]]

    def __post_init__(self) -> None:
        if set(self.overlap) != set(self.unseen_langs):
            raise ValueError("overlap reports must cover exactly the unseen "
                             "languages")

    def to_json_dict(self) -> dict:
        return {
            "config_digest": self.config_digest,
            "model_digest": self.model_digest,
            "input_type": self.input_type.value,
            "seed": self.seed,
            "vocab_size": self.vocab_size,
            "seen_langs": list(self.seen_langs),
            "unseen_langs": list(self.unseen_langs),
            "manifests": {lang: manifest.to_json_dict()
                          for lang, manifest in sorted(
                              self.manifests.items())},
            "quality": {lang: report.to_json_dict()
                        for lang, report in sorted(self.quality.items())},
            "overlap": {lang: report.to_json_dict()
                        for lang, report in sorted(self.overlap.items())},
            "token_lengths": {
                lang: {str(length): count
                       for length, count in sorted(lengths.items())}
                for lang, lengths in sorted(self.token_lengths.items())},
        }

    @classmethod
    def from_json_dict(cls, payload: Mapping) -> "AnalysisReport":
        return cls(
            config_digest=payload["config_digest"],
            model_digest=payload["model_digest"],
            input_type=InputType.parse(payload["input_type"]),
            seed=int(payload["seed"]),
            vocab_size=int(payload["vocab_size"]),
            seen_langs=tuple(payload["seen_langs"]),
            unseen_langs=tuple(payload["unseen_langs"]),
            manifests={lang: CorpusManifest.from_json_dict(entry)
                       for lang, entry in payload["manifests"].items()},
            quality={lang: TokenizerQualityReport.from_json_dict(entry)
                     for lang, entry in payload["quality"].items()},
            overlap={lang: OverlapReport.from_json_dict(entry)
                     for lang, entry in payload["overlap"].items()},
            token_lengths={
                lang: {int(length): int(count)
                       for length, count in lengths.items()}
                for lang, lengths in payload["token_lengths"].items()},
        )

    def to_csv_rows(self) -> list[list]:
        """Tidy rows: lang, input_type, metric, length, value. Scalar
        metrics leave the length column empty."""
        rows: list[list] = []
        itype = self.input_type.value
        for lang in sorted(self.quality):
            report = self.quality[lang]
            rows.append([lang, itype, "unk_ratio", "",
                         float(report.unk_ratio)])
            rows.append([lang, itype, "fertility", "",
                         float(report.fertility)])
            rows.append([lang, itype, "vocab_coverage", "",
                         float(report.vocab_coverage)])
            for length, ratio in sorted(report.coverage_by_length.items()):
                rows.append([lang, itype, "coverage_by_length", length,
                             float(ratio)])
        for lang in sorted(self.overlap):
            report = self.overlap[lang]
            rows.append([lang, itype, "overlap_ratio", "",
                         float(report.overall_ratio)])
            for length, ratio in sorted(report.by_length.items()):
                rows.append([lang, itype, "overlap_by_length", length,
                             float(ratio)])
        return rows


def dumps_report(report: AnalysisReport) -> str:
    return json.dumps(report.to_json_dict(), ensure_ascii=True,
                      sort_keys=True, indent=2) + "\n"


def load_report(path: str | Path) -> AnalysisReport:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return AnalysisReport.from_json_dict(payload)


# --- Running ------------------------------------------------------------------


def _corpus_digest(corpora: Mapping[str, Sequence[Document]]) -> str:
    digest = hashlib.sha256()
    for lang in sorted(corpora):
        digest.update(lang.encode("utf-8"))
        for doc in corpora[lang]:
            digest.update(b"\x00" + doc.doc_id.encode("utf-8"))
            digest.update(b"\x01" + doc.text.encode("utf-8"))
    return digest.hexdigest()


def _make_transform(config: ExperimentConfig, registry: TableRegistry,
                    keys: Mapping[str, CipherKey] | None,
                    lang: str) -> Callable[[str], str]:
    itype = config.input_type
    if itype is InputType.ORTHO:
        return lambda text: text
    if itype is InputType.IPA:
        return lambda text: registry.g2p(lang, text)
    if itype is InputType.ROM:
        return lambda text: registry.romanize(lang, text)
    key = keys[lang]
    return lambda text: caesar_encipher(key, registry.romanize(lang, text))


def _cipher_keys(config: ExperimentConfig) -> dict[str, CipherKey] | None:
    if config.input_type is not InputType.CIPHER:
        return None
    if config.cipher_shifts is not None:
        # Explicit maps are taken as-is; auto-assignment guarantees the
        # distinct non-zero shifts the experiment design calls for.
        return {lang: CipherKey(lang, shift)
                for lang, shift in config.cipher_shifts.items()}
    return assign_shift_keys(config.langs)


class _StageStore:
    """Content-addressed artifact store; None path disables persistence."""

    def __init__(self, root: Path | None):
        self.root = root
        if root is not None:
            root.mkdir(parents=True, exist_ok=True)

    def load_text(self, name: str) -> str | None:
        if self.root is None:
            return None
        path = self.root / name
        return path.read_text(encoding="utf-8") if path.is_file() else None

    def save_text(self, name: str, content: str) -> None:
        if self.root is None:
            return
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")


def run_experiment(config: ExperimentConfig,
                   corpora: Mapping[str, Sequence[Document]],
                   registry: TableRegistry | None = None,
                   artifacts_dir: str | Path | None = None,
                   ) -> AnalysisReport:
    """Run the full pipeline for one input type over one language set.

    The run is a deterministic function of config and corpora. When
    artifacts_dir is given, every stage output lands under a directory named
    by the combined config and corpus digest, and an existing artifact with
    the same digest is loaded instead of recomputed.
    """
    missing = [lang for lang in config.langs if lang not in corpora]
    if missing:
        raise ConfigError(f"no corpus provided for languages: {missing}")

    if registry is None:
        if config.table_root is not None:
            registry = TableRegistry([Path(config.table_root)])
        else:
            registry = default_registry()

    run_digest = hashlib.sha256(
        (config.digest() + _corpus_digest(corpora)).encode("ascii")
    ).hexdigest()
    store = _StageStore(Path(artifacts_dir) / run_digest
                        if artifacts_dir is not None else None)

    keys = _cipher_keys(config)
    manifests: dict[str, CorpusManifest] = {}
    prepared: dict[str, list[str]] = {}

    for lang in sorted(config.langs):
        seen = lang in config.seen_langs
        try:
            docs = corpora[lang]
            if seen:
                manifest, selected = sample_to_budget(
                    docs, config.budget, config.seed, config.input_type)
                manifests[lang] = manifest
            else:
                selected = list(docs)
                if not selected:
                    raise EmptyCorpusError(f"corpus for {lang!r} is empty")
        except Exception as exc:
            raise PipelineStageError("sample", lang, exc) from exc

        cached = store.load_text(f"prepared/{lang}.txt")
        if cached is not None:
            prepared[lang] = cached.splitlines()
            continue
        try:
            transform = _make_transform(config, registry, keys, lang)
            lines = [transform(doc.text) for doc in selected]
        except Exception as exc:
            raise PipelineStageError("transliterate", lang, exc) from exc
        prepared[lang] = lines
        store.save_text(f"prepared/{lang}.txt",
                        "".join(line + "\n" for line in lines))

    cached_model = store.load_text("model.json")
    if cached_model is not None:
        model = loads_model(cached_model)
    else:
        try:
            reps = repetition_counts(
                [manifests[lang] for lang in config.seen_langs],
                config.budget)
            word_counts: Counter = Counter()
            for lang in config.seen_langs:
                factor = reps[lang]
                for line in prepared[lang]:
                    for word in line.split():
                        word_counts[word] += factor
            model = train_from_word_counts(word_counts, config.vocab_size,
                                           config.min_char_freq)
        except Exception as exc:
            raise PipelineStageError("train", None, exc) from exc
        store.save_text("model.json", dumps_model(model))

    try:
        token_sets = {
            lang: token_set(model, prepared[lang], lang, config.input_type)
            for lang in sorted(config.langs)
        }
        for lang, ts in token_sets.items():
            store.save_text(
                f"tokensets/{lang}.json",
                json.dumps(ts.to_json_dict(), ensure_ascii=True,
                           sort_keys=True, indent=2) + "\n")
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError("token-sets", None, exc) from exc

    quality: dict[str, TokenizerQualityReport] = {}
    overlap: dict[str, OverlapReport] = {}
    seen_sets = [token_sets[lang] for lang in config.seen_langs]
    for lang in sorted(config.langs):
        try:
            quality[lang] = quality_report(model, prepared[lang], lang,
                                           config.input_type)
            if lang in config.unseen_langs:
                target = token_sets[lang]
                if not target.tokens:
                    # a fully out-of-alphabet corpus (every word an unknown
                    # run) has nothing to overlap; report zero rather than
                    # failing the whole run
                    overlap[lang] = OverlapReport(
                        lang, config.overlap_variant, None, Fraction(0), {})
                else:
                    overlap[lang] = overlap_report(target, seen_sets,
                                                   config.overlap_variant)
        except Exception as exc:
            raise PipelineStageError("metrics", lang, exc) from exc

    report = AnalysisReport(
        config_digest=config.digest(),
        model_digest=hashlib.sha256(
            dumps_model(model).encode("utf-8")).hexdigest(),
        input_type=config.input_type,
        seed=config.seed,
        vocab_size=config.vocab_size,
        seen_langs=config.seen_langs,
        unseen_langs=config.unseen_langs,
        manifests=manifests,
        quality=quality,
        overlap=overlap,
        token_lengths=token_length_histogram(
            token_sets[lang] for lang in sorted(token_sets)),
    )
    store.save_text("report.json", dumps_report(report))
    return report


# --- Cross-input-type comparison ---------------------------------------------

COMPARISON_METRICS = ("unk_ratio", "fertility", "vocab_coverage",
                      "overlap_ratio")


@dataclass(frozen=True)
class ComparisonRow:
    lang: str
    metric: str
    values: dict[str, float | None]
    deltas: dict[str, float | None]


@dataclass(frozen=True)
class ComparisonTable:
    """Per-language metric values side by side across input types, with
    deltas against the Ortho baseline when it is present."""

    input_types: tuple[str, ...]
    langs: tuple[str, ...]
    rows: tuple[ComparisonRow, ...]
    coverage_by_length: dict[str, dict[int, float]]

    def to_json_dict(self) -> dict:
        return {
            "input_types": list(self.input_types),
            "langs": list(self.langs),
            "rows": [{
                "lang": row.lang,
                "metric": row.metric,
                "values": row.values,
                "deltas": row.deltas,
            } for row in self.rows],
            "coverage_by_length": {
                itype: {str(length): value
                        for length, value in sorted(lengths.items())}
                for itype, lengths in sorted(
                    self.coverage_by_length.items())},
        }

    def to_csv_rows(self) -> list[list]:
        header = (["lang", "metric"]
                  + [f"value_{t}" for t in self.input_types]
                  + [f"delta_{t}" for t in self.input_types])
        out = [header]
        for row in self.rows:
            record = [row.lang, row.metric]
            record += [row.values.get(t) for t in self.input_types]
            record += [row.deltas.get(t) for t in self.input_types]
            out.append(record)
        return out


def _metric_value(report: AnalysisReport, lang: str,
                  metric: str) -> float | None:
    if metric == "overlap_ratio":
        entry = report.overlap.get(lang)
        return float(entry.overall_ratio) if entry is not None else None
    quality = report.quality[lang]
    return float(getattr(quality, metric))


def compare_input_types(reports: Sequence[AnalysisReport]) -> ComparisonTable:
    """Line up runs of the same language set under different input types.

    All reports must share the language split, seed, and vocab size, and
    each input type may appear once. Every language contributes one row per
    comparison metric, so the table has len(langs) * 4 rows.
    """
    if len(reports) < 2:
        raise ValueError("comparison needs at least two reports")
    first = reports[0]
    type_order = [r.input_type.value for r in reports]
    if len(set(type_order)) != len(type_order):
        raise ValueError(f"duplicate input types in comparison: {type_order}")
    for report in reports[1:]:
        if (report.seen_langs != first.seen_langs
                or report.unseen_langs != first.unseen_langs):
            raise ValueError("reports cover different language sets")
        if report.seed != first.seed:
            raise ValueError("reports were run with different seeds")
        if report.vocab_size != first.vocab_size:
            raise ValueError("reports use different vocab sizes")

    by_type = {r.input_type.value: r for r in reports}
    baseline = by_type.get(InputType.ORTHO.value)
    langs = tuple(sorted(first.seen_langs + first.unseen_langs))

    rows: list[ComparisonRow] = []
    for lang in langs:
        for metric in COMPARISON_METRICS:
            values = {itype: _metric_value(by_type[itype], lang, metric)
                      for itype in type_order}
            deltas: dict[str, float | None] = {}
            base = (_metric_value(baseline, lang, metric)
                    if baseline is not None else None)
            for itype in type_order:
                value = values[itype]
                deltas[itype] = (value - base
                                 if value is not None and base is not None
                                 else None)
            rows.append(ComparisonRow(lang, metric, values, deltas))

    coverage: dict[str, dict[int, float]] = {}
    for itype in type_order:
        report = by_type[itype]
        sums: dict[int, Fraction] = {}
        for lang in langs:
            for length, ratio in \
                    report.quality[lang].coverage_by_length.items():
                sums[length] = sums.get(length, Fraction(0)) + ratio
        coverage[itype] = {length: float(total / len(langs))
                           for length, total in sorted(sums.items())}

    return ComparisonTable(
        input_types=tuple(type_order),
        langs=langs,
        rows=tuple(rows),
        coverage_by_length=coverage,
    )
