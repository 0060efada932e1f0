"""Text transforms: rule-table rewriting, Hangul decomposition, Caesar ciphers.

Grapheme-to-phoneme conversion and romanization both run on ordered,
context-sensitive rewrite rules loaded from TSV tables. The per-language
substitution cipher shifts Latin letters by a fixed offset, preserving
within-language structure while destroying cross-language string overlap.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

ENV_TABLE_ROOT = "SCRIPTSHIFT_TABLES"

LATIN_LOWER = "abcdefghijklmnopqrstuvwxyz"
LATIN_UPPER = LATIN_LOWER.upper()


class RuleMode(str, Enum):
    G2P = "g2p"
    ROMANIZE = "rom"


class Passthrough(str, Enum):
    """What to do with input characters no rule covers."""

    KEEP = "keep"
    DROP = "drop"
    ERROR = "error"


class UnmatchedCharacterError(ValueError):
    """Raised under Passthrough.ERROR when no rule covers a character."""

    def __init__(self, char: str, position: int):
        super().__init__(f"no rule matches {char!r} at position {position}")
        self.char = char
        self.position = position


class UnsupportedLanguageError(LookupError):
    """Raised when no rule table is registered for a language and mode."""


class RuleTableError(ValueError):
    """Raised for malformed rule tables (parse errors, duplicate rules)."""


@dataclass(frozen=True)
class RewriteRule:
    """One rewrite: source string to target string, optionally guarded by
    literal left/right contexts matched against the original input."""

    source: str
    target: str
    left_context: str = ""
    right_context: str = ""
    priority: int = 0

    def __post_init__(self) -> None:
        if not self.source:
            raise RuleTableError("rule source must be non-empty")

    def matches(self, text: str, pos: int) -> bool:
        if not text.startswith(self.source, pos):
            return False
        lc = self.left_context
        if lc and (pos < len(lc) or text[pos - len(lc):pos] != lc):
            return False
        rc = self.right_context
        if rc:
            end = pos + len(self.source)
            if text[end:end + len(rc)] != rc:
                return False
        return True


@dataclass(frozen=True)
class RuleTable:
    """An ordered rewrite system for one language and mode.

    Rules are tried longest-source-first, then by ascending priority number,
    so specific (longer or lower-numbered) rules win over general ones.
    """

    lang: str
    mode: RuleMode
    rules: tuple[RewriteRule, ...]
    passthrough: Passthrough = Passthrough.KEEP

    def __post_init__(self) -> None:
        seen_keys = set()
        seen_priorities = set()
        for rule in self.rules:
            key = (rule.source, rule.left_context, rule.right_context)
            if key in seen_keys:
                raise RuleTableError(f"duplicate rule for {key!r}")
            seen_keys.add(key)
            if rule.priority in seen_priorities:
                raise RuleTableError(f"duplicate priority {rule.priority}")
            seen_priorities.add(rule.priority)
        ordered = tuple(sorted(self.rules,
                               key=lambda r: (-len(r.source), r.priority)))
        object.__setattr__(self, "rules", ordered)

    @functools.cached_property
    def _by_first_char(self) -> dict[str, tuple[RewriteRule, ...]]:
        index: dict[str, list[RewriteRule]] = {}
        for rule in self.rules:
            index.setdefault(rule.source[0], []).append(rule)
        return {char: tuple(rules) for char, rules in index.items()}


def apply_rules(table: RuleTable, text: str) -> str:
    """Rewrite text in a single left-to-right pass.

    At each position the highest-ranked matching rule fires, its target is
    emitted, and scanning resumes after the consumed source. Contexts are
    matched against the original input, so rule outputs never feed back into
    later matches. Unmatched characters follow the table's passthrough policy.
    """
    out: list[str] = []
    pos = 0
    n = len(text)
    index = table._by_first_char
    while pos < n:
        fired = None
        for rule in index.get(text[pos], ()):
            if rule.matches(text, pos):
                fired = rule
                break
        if fired is not None:
            out.append(fired.target)
            pos += len(fired.source)
        else:
            char = text[pos]
            if table.passthrough is Passthrough.KEEP:
                out.append(char)
            elif table.passthrough is Passthrough.ERROR:
                raise UnmatchedCharacterError(char, pos)
            pos += 1
    return "".join(out)


def parse_rule_table(content: str, lang: str, mode: RuleMode,
                     passthrough: Passthrough = Passthrough.KEEP,
                     origin: str = "<string>") -> RuleTable:
    """Parse TSV rule rows: source, target, left_context, right_context,
    priority. Lines starting with '#' and blank lines are skipped."""
    rules = []
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise RuleTableError(
                f"{origin}:{lineno}: expected 5 tab-separated fields, "
                f"got {len(fields)}")
        source, target, left, right, priority_text = fields
        try:
            priority = int(priority_text)
        except ValueError:
            raise RuleTableError(
                f"{origin}:{lineno}: priority {priority_text!r} is not an "
                f"integer") from None
        try:
            rules.append(RewriteRule(source, target, left, right, priority))
        except RuleTableError as exc:
            raise RuleTableError(f"{origin}:{lineno}: {exc}") from None
    try:
        return RuleTable(lang, mode, tuple(rules), passthrough)
    except RuleTableError as exc:
        raise RuleTableError(f"{origin}: {exc}") from None


def load_rule_table(path: str | Path, lang: str, mode: RuleMode,
                    passthrough: Passthrough = Passthrough.KEEP) -> RuleTable:
    path = Path(path)
    content = path.read_text(encoding="utf-8")
    return parse_rule_table(content, lang, mode, passthrough,
                            origin=str(path))


def format_rule_table(table: RuleTable) -> str:
    """Render a table back to TSV, rules in priority order."""
    lines = ["# source\ttarget\tleft_context\tright_context\tpriority"]
    for rule in sorted(table.rules, key=lambda r: r.priority):
        lines.append("\t".join([rule.source, rule.target, rule.left_context,
                                rule.right_context, str(rule.priority)]))
    return "\n".join(lines) + "\n"


# --- Hangul syllable arithmetic -------------------------------------------
#
# Precomposed syllables occupy U+AC00..U+D7A3 and factor as
# code = 0xAC00 + (lead * 21 + vowel) * 28 + tail. The conjoining jamo
# blocks start at U+1100 (leads), U+1161 (vowels), U+11A8 (tails).

HANGUL_BASE = 0xAC00
HANGUL_LEADS = 19
HANGUL_VOWELS = 21
HANGUL_TAILS = 28
HANGUL_COUNT = HANGUL_LEADS * HANGUL_VOWELS * HANGUL_TAILS
LEAD_BASE = 0x1100
VOWEL_BASE = 0x1161
TAIL_BASE = 0x11A7


def is_hangul_syllable(char: str) -> bool:
    return len(char) == 1 and 0 <= ord(char) - HANGUL_BASE < HANGUL_COUNT


def decompose_hangul(char: str) -> tuple[int, int, int]:
    """Split a precomposed syllable into (lead, vowel, tail) indices.
    Tail index 0 means no final consonant."""
    if not is_hangul_syllable(char):
        raise ValueError(f"{char!r} is not a precomposed Hangul syllable")
    index = ord(char) - HANGUL_BASE
    lead, rest = divmod(index, HANGUL_VOWELS * HANGUL_TAILS)
    vowel, tail = divmod(rest, HANGUL_TAILS)
    return lead, vowel, tail


def compose_hangul(lead: int, vowel: int, tail: int) -> str:
    if not (0 <= lead < HANGUL_LEADS and 0 <= vowel < HANGUL_VOWELS
            and 0 <= tail < HANGUL_TAILS):
        raise ValueError(f"jamo indices out of range: {(lead, vowel, tail)}")
    return chr(HANGUL_BASE + (lead * HANGUL_VOWELS + vowel) * HANGUL_TAILS
               + tail)


def decompose_syllables(text: str) -> str:
    """Replace every precomposed Hangul syllable with its conjoining jamo
    characters; all other characters pass through unchanged."""
    out = []
    for char in text:
        if is_hangul_syllable(char):
            lead, vowel, tail = decompose_hangul(char)
            out.append(chr(LEAD_BASE + lead))
            out.append(chr(VOWEL_BASE + vowel))
            if tail:
                out.append(chr(TAIL_BASE + tail))
        else:
            out.append(char)
    return "".join(out)


# --- Caesar cipher over the Latin alphabet ---------------------------------


@dataclass(frozen=True)
class CipherKey:
    lang: str
    shift: int

    def __post_init__(self) -> None:
        if not 0 <= self.shift <= 25:
            raise ValueError(f"shift must be in 0..25, got {self.shift}")


@functools.lru_cache(maxsize=None)
def _shift_table(shift: int) -> dict[int, int]:
    table = {}
    for alphabet in (LATIN_LOWER, LATIN_UPPER):
        for i, char in enumerate(alphabet):
            table[ord(char)] = ord(alphabet[(i + shift) % 26])
    return table


def caesar_encipher(key: CipherKey, text: str) -> str:
    """Shift a-z and A-Z forward by key.shift, each case wrapping within
    itself; every other character is left unchanged."""
    return text.translate(_shift_table(key.shift))


def caesar_decipher(key: CipherKey, text: str) -> str:
    return text.translate(_shift_table((26 - key.shift) % 26))


def assign_shift_keys(langs: Iterable[str]) -> dict[str, CipherKey]:
    """Give each language a distinct non-zero shift: sorted languages get
    shifts 1, 2, ... so assignment is reproducible from the set alone."""
    ordered = sorted(langs)
    if not ordered:
        raise ValueError("no languages to assign cipher keys to")
    if len(set(ordered)) != len(ordered):
        raise ValueError("duplicate languages in cipher key assignment")
    if len(ordered) > 25:
        raise ValueError(f"only 25 distinct non-zero shifts exist, "
                         f"got {len(ordered)} languages")
    return {lang: CipherKey(lang, i + 1) for i, lang in enumerate(ordered)}


# --- Table registry ---------------------------------------------------------


def packaged_table_root():
    return resources.files("scriptshift") / "tables"


class TableRegistry:
    """Looks up rule tables under one or more roots laid out as
    <root>/<mode>/<lang>.tsv. Loaded tables are cached per (mode, lang)."""

    def __init__(self, roots: Sequence | None = None,
                 passthrough: Passthrough = Passthrough.KEEP):
        if roots is None:
            roots = []
            env_root = os.environ.get(ENV_TABLE_ROOT)
            if env_root:
                roots.append(Path(env_root))
            roots.append(packaged_table_root())
        self.roots = list(roots)
        self.passthrough = passthrough
        self._cache: dict[tuple[RuleMode, str], RuleTable] = {}

    def has_table(self, mode: RuleMode, lang: str) -> bool:
        return self._locate(mode, lang) is not None

    def _locate(self, mode: RuleMode, lang: str):
        for root in self.roots:
            candidate = root / mode.value / f"{lang}.tsv"
            if candidate.is_file():
                return candidate
        return None

    def table(self, mode: RuleMode, lang: str) -> RuleTable:
        key = (mode, lang)
        if key not in self._cache:
            located = self._locate(mode, lang)
            if located is None:
                raise UnsupportedLanguageError(
                    f"no {mode.value} table for language {lang!r} under "
                    f"{[str(r) for r in self.roots]}")
            content = located.read_text(encoding="utf-8")
            self._cache[key] = parse_rule_table(
                content, lang, mode, self.passthrough, origin=str(located))
        return self._cache[key]

    def g2p(self, lang: str, text: str) -> str:
        """Grapheme-to-phoneme conversion via the language's g2p table."""
        return apply_rules(self.table(RuleMode.G2P, lang), text)

    def romanize(self, lang: str, text: str) -> str:
        """Romanize text: Hangul syllables are decomposed into jamo first,
        then the language's romanization table is applied."""
        table = self.table(RuleMode.ROMANIZE, lang)
        return apply_rules(table, decompose_syllables(text))


def default_registry() -> TableRegistry:
    return TableRegistry()
