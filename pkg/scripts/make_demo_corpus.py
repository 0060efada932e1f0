"""Synthesize a small multilingual demo corpus plus an experiment config.

Creates <out>/corpora/{eng,spa,kor}.txt (one document per line) and
<out>/config.json ready for `scriptshift run` or scripts/run_demo_grid.py.
The Latin-script languages draw from disjoint synthetic vocabularies; the
Korean corpus is random Hangul, so under orthographic input it shares no
characters with the training languages.
"""

import argparse
import json
import random
import sys
from pathlib import Path

from scriptshift.translit import compose_hangul

CONSONANTS = "bcdfghjklmnpqrstvwz"
VOWELS = "aeiou"


def latin_vocabulary(rng, size):
    words = set()
    while len(words) < size:
        syllables = rng.randint(1, 4)
        word = "".join(rng.choice(CONSONANTS) + rng.choice(VOWELS)
                       for _ in range(syllables))
        words.add(word)
    return sorted(words)


def hangul_vocabulary(rng, size):
    words = set()
    while len(words) < size:
        length = rng.randint(1, 3)
        word = "".join(compose_hangul(rng.randrange(19), rng.randrange(21),
                                      rng.randrange(28))
                       for _ in range(length))
        words.add(word)
    return sorted(words)


def corpus_lines(rng, vocabulary, total_words, words_per_line):
    lines = []
    written = 0
    while written < total_words:
        count = min(words_per_line, total_words - written)
        lines.append(" ".join(rng.choice(vocabulary) for _ in range(count)))
        written += count
    return lines


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", required=True,
                        help="directory to create the demo tree under")
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--words", type=int, default=5000,
                        help="corpus size per language in words")
    parser.add_argument("--vocabulary", type=int, default=300,
                        help="distinct words per language")
    args = parser.parse_args(argv)

    out = Path(args.output_dir)
    corpora_dir = out / "corpora"
    corpora_dir.mkdir(parents=True, exist_ok=True)

    rng = random.Random(args.seed)
    specs = (("eng", latin_vocabulary, 1.0),
             ("spa", latin_vocabulary, 0.4),
             ("kor", hangul_vocabulary, 0.6))
    for lang, make_vocabulary, scale in specs:
        vocabulary = make_vocabulary(rng, max(10, int(args.vocabulary
                                                      * scale)))
        lines = corpus_lines(rng, vocabulary, max(50, int(args.words
                                                          * scale)), 12)
        path = corpora_dir / f"{lang}.txt"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {path} ({len(lines)} lines)")

    config = {
        "languages": [{"lang": "eng", "seen": True},
                      {"lang": "spa", "seen": True},
                      {"lang": "kor", "seen": False}],
        "input_type": "Ortho",
        "vocab_size": 800,
        "budget": max(100, args.words // 2),
        "seed": args.seed,
    }
    config_path = out / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n",
                           encoding="utf-8")
    print(f"wrote {config_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
