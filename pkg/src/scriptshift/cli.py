"""Command-line interface.

Subcommands wrap the library one stage at a time (translit, train-tokenizer,
encode, token-set, overlap, quality, select-langs, stats) plus whole runs
(run, compare). Machine-readable output goes to stdout or --output; logs and
errors go to stderr. Exit codes: 0 success, 2 configuration or usage error,
3 data or processing error, 4 unwritable output.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import itertools
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import corpus as corpus_mod
from . import langselect, metrics, pipeline, stats, tokenizer, translit
from .input_types import InputType

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_WRITE = 4

DATA_ERRORS = (
    corpus_mod.EmptyCorpusError,
    corpus_mod.RecordConversionError,
    tokenizer.ModelFormatError,
    translit.RuleTableError,
    translit.UnmatchedCharacterError,
    translit.UnsupportedLanguageError,
    langselect.MissingFeatureError,
    pipeline.PipelineStageError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    ValueError,
    ArithmeticError,
)


class UsageError(ValueError):
    """Flag combinations argparse cannot express; exits with code 2."""


class OutputWriteError(Exception):
    def __init__(self, path: str, cause: OSError):
        super().__init__(f"cannot write {path}: {cause}")
        self.path = path


def _emit(args: argparse.Namespace, text: str) -> None:
    output = getattr(args, "output", None)
    if output:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OutputWriteError(str(output), exc) from exc
    else:
        sys.stdout.write(text)


def write_report(payload, fmt: str) -> str:
    """Render a report payload: dict for JSON, list of rows for CSV. An
    empty CSV report still carries its header row."""
    if fmt == "json":
        return json.dumps(payload, ensure_ascii=True, sort_keys=True,
                          indent=2) + "\n"
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        for row in payload:
            writer.writerow(["" if cell is None else cell for cell in row])
        return buffer.getvalue()
    raise UsageError(f"unknown format {fmt!r}")


@contextlib.contextmanager
def _open_in(path: str | None):
    if path is None:
        yield sys.stdin
    else:
        with open(path, "r", encoding="utf-8") as handle:
            yield handle


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        try:
            with open(path, "w", encoding="utf-8") as handle:
                yield handle
        except OSError as exc:
            raise OutputWriteError(path, exc) from exc


def _registry(args: argparse.Namespace) -> translit.TableRegistry:
    tables = getattr(args, "tables", None)
    if tables:
        return translit.TableRegistry([Path(tables),
                                       translit.packaged_table_root()])
    return translit.default_registry()


# --- translit ----------------------------------------------------------------


def _build_transform(args: argparse.Namespace):
    passthrough = translit.Passthrough(args.passthrough)
    if args.mode == "cipher":
        if (args.shift is None) == (args.keys is None):
            raise UsageError("cipher mode needs exactly one of --shift or "
                             "--keys")
        if args.shift is not None:
            key = translit.CipherKey(args.lang or "und", args.shift)
        else:
            if not args.lang:
                raise UsageError("--keys needs --lang to pick the entry")
            shifts = json.loads(Path(args.keys).read_text(encoding="utf-8"))
            if args.lang not in shifts:
                raise UsageError(f"no cipher key for language {args.lang!r} "
                                 f"in {args.keys}")
            key = translit.CipherKey(args.lang, int(shifts[args.lang]))
        if args.decipher:
            return lambda text: translit.caesar_decipher(key, text)
        return lambda text: translit.caesar_encipher(key, text)

    mode = translit.RuleMode.G2P if args.mode == "g2p" \
        else translit.RuleMode.ROMANIZE
    if args.table:
        table = translit.load_rule_table(args.table, args.lang or "und",
                                         mode, passthrough)
    else:
        if not args.lang:
            raise UsageError(f"{args.mode} mode needs --lang or --table")
        registry = translit.TableRegistry(_registry(args).roots, passthrough)
        table = registry.table(mode, args.lang)
    if mode is translit.RuleMode.ROMANIZE:
        return lambda text: translit.apply_rules(
            table, translit.decompose_syllables(text))
    return lambda text: translit.apply_rules(table, text)


def _cmd_translit(args: argparse.Namespace) -> int:
    transform = _build_transform(args)
    with _open_in(args.input) as src, _open_out(args.output) as dst:
        for line in src:
            dst.write(transform(line.rstrip("\n")) + "\n")
    return EXIT_OK


# --- tokenizer commands -------------------------------------------------------


def _cmd_train_tokenizer(args: argparse.Namespace) -> int:
    def lines():
        for path in args.input:
            with open(path, "r", encoding="utf-8") as handle:
                for line in handle:
                    yield line.rstrip("\n")

    model = tokenizer.train(lines(), args.vocab_size, args.min_char_freq)
    _emit(args, tokenizer.dumps_model(model))
    return EXIT_OK


def _cmd_encode(args: argparse.Namespace) -> int:
    model = tokenizer.load_model(args.model)
    encoder = tokenizer.encoder_for(model)
    with _open_in(args.input) as src, _open_out(args.output) as dst:
        for line in src:
            ids = encoder.encode(line.rstrip("\n"))
            dst.write(" ".join(str(i) for i in ids) + "\n")
    return EXIT_OK


def _cmd_token_set(args: argparse.Namespace) -> int:
    model = tokenizer.load_model(args.model)
    input_type = InputType.parse(args.input_type)
    with _open_in(args.input) as src:
        ts = tokenizer.token_set(model, (line.rstrip("\n") for line in src),
                                 args.lang, input_type)
    _emit(args, write_report(ts.to_json_dict(), "json"))
    return EXIT_OK


def _load_token_set(path: str) -> tokenizer.TokenSet:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return tokenizer.TokenSet.from_json_dict(payload)


def _cmd_overlap(args: argparse.Namespace) -> int:
    target = _load_token_set(args.target)
    sources = [_load_token_set(path)
               for path in args.sources.split(",") if path]
    if not sources:
        raise UsageError("--sources needs at least one file")
    variant = metrics.OverlapVariant(args.variant)
    report = metrics.overlap_report(target, sources, variant)
    if args.format == "json":
        _emit(args, write_report(report.to_json_dict(), "json"))
    else:
        rows = [["target_lang", "variant", "best_source", "metric", "length",
                 "value"]]
        rows.append([report.target_lang, variant.value, report.best_source,
                     "overall_ratio", "", float(report.overall_ratio)])
        for length, ratio in sorted(report.by_length.items()):
            rows.append([report.target_lang, variant.value,
                         report.best_source, "by_length", length,
                         float(ratio)])
        _emit(args, write_report(rows, "csv"))
    return EXIT_OK


def _cmd_quality(args: argparse.Namespace) -> int:
    model = tokenizer.load_model(args.model)
    input_type = InputType.parse(args.input_type)
    with open(args.input, "r", encoding="utf-8") as handle:
        corpus = [line.rstrip("\n") for line in handle]
    report = metrics.quality_report(model, corpus, args.lang, input_type)
    if args.format == "json":
        _emit(args, write_report(report.to_json_dict(), "json"))
    else:
        rows = [["lang", "input_type", "metric", "length", "value"]]
        rows.append([args.lang, input_type.value, "unk_ratio", "",
                     float(report.unk_ratio)])
        rows.append([args.lang, input_type.value, "fertility", "",
                     float(report.fertility)])
        rows.append([args.lang, input_type.value, "vocab_coverage", "",
                     float(report.vocab_coverage)])
        for length, ratio in sorted(report.coverage_by_length.items()):
            rows.append([args.lang, input_type.value, "coverage_by_length",
                         length, float(ratio)])
        _emit(args, write_report(rows, "csv"))
    return EXIT_OK


# --- language selection -------------------------------------------------------


def _cmd_select_langs(args: argparse.Namespace) -> int:
    features = langselect.load_feature_csv(args.features)
    scripts = langselect.load_script_map(args.scripts)
    if args.pool:
        pool = [lang.strip() for lang in args.pool.split(",") if lang.strip()]
    else:
        pool = sorted(features)
    if args.script:
        pool = [lang for lang in pool
                if scripts.get(lang) == args.script]
    corpora = None
    if args.corpus_dir:
        corpora = {}
        for lang in pool:
            path = Path(args.corpus_dir) / f"{lang}.txt"
            if path.is_file():
                corpora[lang] = path.read_text(
                    encoding="utf-8").splitlines()
    spec = langselect.SelectionSpec(
        regime=langselect.Regime(args.regime),
        set_size=args.set_size,
        alpha=args.alpha,
        script_map=scripts,
    )
    sims = langselect.SimilarityMatrix.build(pool, features, corpora)
    chosen, objective = langselect.select_subset(pool, spec, sims)
    payload = {
        "regime": spec.regime.value,
        "alpha": spec.alpha,
        "set_size": spec.set_size,
        "pool": sorted(pool),
        "langs": list(chosen),
        "objective": objective,
    }
    _emit(args, write_report(payload, "json"))
    return EXIT_OK


# --- statistics ---------------------------------------------------------------


def _read_scores(path: str) -> dict[tuple[str, str], dict[str, float]]:
    """Scores keyed by input_type, then by (set, lang) label."""
    scores: dict[str, dict[tuple[str, str], float]] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        required = {"lang", "input_type", "score"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns {sorted(required)}")
        has_set = "set" in reader.fieldnames
        for row in reader:
            itype = InputType.parse(row["input_type"]).value
            label = (row["set"].strip() if has_set else "", row["lang"].strip())
            per_type = scores.setdefault(itype, {})
            if label in per_type:
                raise ValueError(f"{path}: duplicate score for {label} "
                                 f"under {itype}")
            per_type[label] = float(row["score"])
    return scores


def _read_metric_series(path: str):
    """Metric values keyed by (metric, length), then (set, lang, input_type)."""
    series: dict[tuple[str, str], dict[tuple[str, str, str], float]] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        required = {"lang", "input_type", "metric", "length", "value"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns {sorted(required)}")
        has_set = "set" in reader.fieldnames
        for row in reader:
            itype = InputType.parse(row["input_type"]).value
            key = (row["metric"].strip(), row["length"].strip())
            label = (row["set"].strip() if has_set else "",
                     row["lang"].strip(), itype)
            series.setdefault(key, {})[label] = float(row["value"])
    return series


def _cmd_stats(args: argparse.Namespace) -> int:
    scores = _read_scores(args.scores)
    t_tests = []
    for type_a, type_b in itertools.combinations(sorted(scores), 2):
        common = sorted(set(scores[type_a]) & set(scores[type_b]))
        if len(common) < 2:
            continue
        sample = stats.PairedSample(
            labels=tuple(f"{s}:{l}" if s else l for s, l in common),
            a=tuple(scores[type_a][label] for label in common),
            b=tuple(scores[type_b][label] for label in common),
        )
        result = stats.paired_t_test(sample)
        t_tests.append({
            "input_type_a": type_a,
            "input_type_b": type_b,
            "t": result.t,
            "p_value": result.p_value,
            "n": result.n,
            "significant": result.p_value < args.alpha,
        })

    correlations = []
    if args.metrics:
        series = _read_metric_series(args.metrics)
        flat_scores = {(s, l, itype): value
                       for itype, per_type in scores.items()
                       for (s, l), value in per_type.items()}
        for (metric, length), values in sorted(series.items()):
            common = sorted(set(values) & set(flat_scores))
            if len(common) < 3:
                continue
            xs = [values[label] for label in common]
            ys = [flat_scores[label] for label in common]
            for method in (stats.pearson, stats.spearman):
                try:
                    result = method(xs, ys)
                except ValueError:
                    continue  # constant series has no correlation
                correlations.append({
                    "metric": metric,
                    "length": length,
                    "method": result.method,
                    "r": result.r,
                    "p_value": result.p_value,
                    "n": result.n,
                    "significant": result.p_value < args.alpha,
                })

    if args.format == "json":
        payload = {"alpha": args.alpha, "t_tests": t_tests,
                   "correlations": correlations}
        _emit(args, write_report(payload, "json"))
    else:
        rows = [["record", "input_type_a", "input_type_b", "metric",
                 "length", "method", "statistic", "p_value", "n",
                 "significant"]]
        for entry in t_tests:
            rows.append(["t_test", entry["input_type_a"],
                         entry["input_type_b"], "", "", "paired_t",
                         entry["t"], entry["p_value"], entry["n"],
                         entry["significant"]])
        for entry in correlations:
            rows.append(["correlation", "", "", entry["metric"],
                         entry["length"], entry["method"], entry["r"],
                         entry["p_value"], entry["n"],
                         entry["significant"]])
        _emit(args, write_report(rows, "csv"))
    return EXIT_OK


# --- whole runs ---------------------------------------------------------------


def _load_corpora(corpus_dir: str, langs) -> dict[str, list]:
    corpora = {}
    for lang in langs:
        path = Path(corpus_dir) / f"{lang}.txt"
        if not path.is_file():
            raise FileNotFoundError(f"no corpus file for {lang!r}: {path}")
        corpora[lang] = corpus_mod.read_documents(path, lang)
    return corpora


def _cmd_run(args: argparse.Namespace) -> int:
    config = pipeline.load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.vocab_size is not None:
        overrides["vocab_size"] = args.vocab_size
    if args.budget is not None:
        overrides["budget"] = args.budget
    if overrides:
        config = replace(config, **overrides)
    corpora = _load_corpora(args.corpus_dir, config.langs)
    registry = _registry(args) if args.tables else None
    report = pipeline.run_experiment(config, corpora, registry=registry,
                                     artifacts_dir=args.artifacts_dir)
    if args.format == "json":
        _emit(args, pipeline.dumps_report(report))
    else:
        rows = [["lang", "input_type", "metric", "length", "value"]]
        rows.extend(report.to_csv_rows())
        _emit(args, write_report(rows, "csv"))
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    reports = [pipeline.load_report(path) for path in args.reports]
    table = pipeline.compare_input_types(reports)
    if args.format == "json":
        _emit(args, write_report(table.to_json_dict(), "json"))
    else:
        _emit(args, write_report(table.to_csv_rows(), "csv"))
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scriptshift",
        description="Corpus transliteration and tokenizer analysis toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("translit", help="transform text line by line")
    p.add_argument("--mode", required=True, choices=["g2p", "rom", "cipher"])
    p.add_argument("--lang")
    p.add_argument("--table", help="explicit rule table file")
    p.add_argument("--tables", help="rule table registry root")
    p.add_argument("--shift", type=int, help="cipher shift 0..25")
    p.add_argument("--keys", help="JSON file of per-language cipher shifts")
    p.add_argument("--decipher", action="store_true",
                   help="invert the cipher instead of applying it")
    p.add_argument("--passthrough", default="keep",
                   choices=["keep", "drop", "error"])
    p.add_argument("--input")
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_translit)

    p = sub.add_parser("train-tokenizer", help="train a subword model")
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--vocab-size", type=int,
                   default=pipeline.DEFAULT_VOCAB_SIZE)
    p.add_argument("--min-char-freq", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_train_tokenizer)

    p = sub.add_parser("encode", help="encode lines to token ids")
    p.add_argument("--model", required=True)
    p.add_argument("--input")
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_encode)

    p = sub.add_parser("token-set", help="collect unique surface tokens")
    p.add_argument("--model", required=True)
    p.add_argument("--input")
    p.add_argument("--lang", required=True)
    p.add_argument("--input-type", default=InputType.ORTHO.value)
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_token_set)

    p = sub.add_parser("overlap", help="token-set overlap metrics")
    p.add_argument("--target", required=True)
    p.add_argument("--sources", required=True,
                   help="comma-separated token-set files")
    p.add_argument("--variant", default="max", choices=["max", "all", "type"])
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_overlap)

    p = sub.add_parser("quality", help="tokenizer quality metrics")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--lang", required=True)
    p.add_argument("--input-type", default=InputType.ORTHO.value)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_quality)

    p = sub.add_parser("select-langs", help="pick a language set by regime")
    p.add_argument("--features", required=True)
    p.add_argument("--scripts", required=True)
    p.add_argument("--corpus-dir")
    p.add_argument("--pool", help="comma-separated candidate languages")
    p.add_argument("--script", help="restrict the pool to one script")
    p.add_argument("--regime", required=True,
                   choices=[r.value for r in langselect.Regime])
    p.add_argument("--set-size", type=int, default=8)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_select_langs)

    p = sub.add_parser("stats", help="paired tests and correlations")
    p.add_argument("--scores", required=True)
    p.add_argument("--metrics")
    p.add_argument("--alpha", type=float, default=stats.SIGNIFICANCE_LEVEL)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_stats)

    p = sub.add_parser("run", help="run the full pipeline from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--corpus-dir", required=True)
    p.add_argument("--artifacts-dir")
    p.add_argument("--tables")
    p.add_argument("--seed", type=int)
    p.add_argument("--vocab-size", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_run)

    p = sub.add_parser("compare", help="compare runs across input types")
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_compare)

    return parser


def main(argv=None) -> int:
    for stream in (sys.stdin, sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            try:
                stream.reconfigure(encoding="utf-8")
            except (ValueError, OSError):
                pass
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (None, 0):
            return EXIT_OK
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        return args.handler(args)
    except OutputWriteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WRITE
    except (UsageError, pipeline.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
