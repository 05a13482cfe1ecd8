"""Categorized insult lexicon with exact multi-pattern matching.

The lexicon is a flat list of terms, each carrying a category (four
targeted-group categories plus general swearwords), a surface class
(explicit or implicit), and a tag naming the derivation rule that
produced the term (or ``none`` for base forms).

Matching is character-level Aho-Corasick, so a text is scanned once
regardless of lexicon size, and overlapping/nested occurrences are all
reported.  ``token_category`` projects matches down to one category id
per character — the per-token toxic signal consumed by the classifier.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .normalize import normalize_text


class LexiconError(ValueError):
    """Malformed lexicon file or inconsistent entry set."""


class Category(IntEnum):
    SEXISM = 1
    RACISM = 2
    REGIONAL_BIAS = 3
    ANTI_LGBTQ = 4
    GENERAL = 5


_CATEGORY_BY_NAME = {c.name.lower(): c for c in Category}


class Surface(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


class RuleTag(str, Enum):
    NONE = "none"
    DEFORMATION = "deformation"
    HOMOPHONIC = "homophonic"
    IRONY = "irony"
    ABBREVIATION = "abbreviation"
    METAPHOR = "metaphor"
    CODE_MIXING = "code_mixing"
    BORROWED_WORD = "borrowed_word"


@dataclass(frozen=True)
class InsultEntry:
    term: str
    category: Category
    surface: Surface
    rule_tag: RuleTag = RuleTag.NONE

    def __post_init__(self):
        if not self.term:
            raise LexiconError("empty term")


@dataclass(frozen=True)
class LexiconMatch:
    """One occurrence of a lexicon term: text[start:end] == entry.term."""

    start: int
    end: int
    entry: InsultEntry


class _AhoCorasick:
    """Multi-pattern matcher: one pass over the text finds all occurrences.

    Construction has three phases:

    1. Trie: patterns share prefixes; each trie node is a state, edges
       are ``_goto[state][char]``.
    2. Failure links (BFS order): ``_fail[s]`` is the state for the
       longest proper suffix of s's string that is also a trie prefix.
       Processing states level by level guarantees the link target is
       already final when a deeper state needs it.
    3. Output merging: a state emits its own patterns plus everything
       its failure target emits, so nested matches (e.g. 黑 inside 老黑)
       surface without extra link-chasing at scan time.

    Scanning feeds one character at a time, following failure links on
    mismatch; total work is O(text + matches).
    """

    def __init__(self, patterns: Sequence[str]):
        self._patterns = list(patterns)
        self._goto: list[dict[str, int]] = [{}]
        self._out: list[list[int]] = [[]]
        for idx, pattern in enumerate(self._patterns):
            state = 0
            for ch in pattern:
                nxt = self._goto[state].get(ch)
                if nxt is None:
                    nxt = len(self._goto)
                    self._goto[state][ch] = nxt
                    self._goto.append({})
                    self._out.append([])
                state = nxt
            self._out[state].append(idx)

        self._fail = [0] * len(self._goto)
        queue = deque(self._goto[0].values())
        while queue:
            state = queue.popleft()
            for ch, nxt in self._goto[state].items():
                queue.append(nxt)
                f = self._fail[state]
                while f and ch not in self._goto[f]:
                    f = self._fail[f]
                target = self._goto[f].get(ch, 0)
                self._fail[nxt] = target if target != nxt else 0
                self._out[nxt] = self._out[nxt] + self._out[self._fail[nxt]]

    def scan(self, text: str) -> Iterator[tuple[int, int]]:
        """Yield (start offset, pattern index) for every occurrence."""
        state = 0
        for pos, ch in enumerate(text):
            while state and ch not in self._goto[state]:
                state = self._fail[state]
            state = self._goto[state].get(ch, 0)
            for idx in self._out[state]:
                yield pos + 1 - len(self._patterns[idx]), idx


class Lexicon:
    """Immutable term collection plus its search automaton."""

    def __init__(self, entries: Iterable[InsultEntry]):
        self.entries: tuple[InsultEntry, ...] = tuple(entries)
        seen: dict[str, InsultEntry] = {}
        for entry in self.entries:
            if entry.term in seen:
                raise LexiconError(f"duplicate term {entry.term!r}")
            seen[entry.term] = entry
        self._by_term = seen
        self._automaton = _AhoCorasick([e.term for e in self.entries])

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[InsultEntry]:
        return iter(self.entries)

    def __contains__(self, term: str) -> bool:
        return term in self._by_term

    def get(self, term: str) -> InsultEntry | None:
        return self._by_term.get(term)

    def extended(self, new_entries: Iterable[InsultEntry]) -> "Lexicon":
        """A new Lexicon with the extra entries appended (self unchanged)."""
        return Lexicon(self.entries + tuple(new_entries))


def _parse_category(raw: str, where: str) -> Category:
    key = raw.strip().lower()
    if key in _CATEGORY_BY_NAME:
        return _CATEGORY_BY_NAME[key]
    if key.isdigit() and int(key) in set(Category):
        return Category(int(key))
    raise LexiconError(f"{where}: unknown category {raw!r}")


def _parse_enum(enum_cls, raw: str, what: str, where: str):
    try:
        return enum_cls(raw.strip().lower())
    except ValueError:
        raise LexiconError(f"{where}: unknown {what} {raw!r}") from None


def load_lexicon(path: str | Path) -> Lexicon:
    """Load a TSV lexicon: columns term, category, surface, rule_tag.

    '#' lines are comments; there is no header row.  Terms are run
    through normalize_text so they match against normalized corpus text.
    Duplicate terms and unknown enum values are load errors carrying the
    line number.
    """
    path = Path(path)
    entries: list[InsultEntry] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            where = f"{path}:{lineno}"
            stripped = line.strip("\n")
            if not stripped.strip() or stripped.lstrip().startswith("#"):
                continue
            columns = stripped.split("\t")
            if len(columns) != 4:
                raise LexiconError(f"{where}: expected 4 tab-separated columns, got {len(columns)}")
            raw_term, raw_cat, raw_surface, raw_tag = columns
            term = normalize_text(raw_term)
            if not term:
                raise LexiconError(f"{where}: term is empty after normalization")
            if term in seen:
                raise LexiconError(f"{where}: duplicate term {term!r}")
            seen.add(term)
            entries.append(
                InsultEntry(
                    term=term,
                    category=_parse_category(raw_cat, where),
                    surface=_parse_enum(Surface, raw_surface, "surface", where),
                    rule_tag=_parse_enum(RuleTag, raw_tag, "rule_tag", where),
                )
            )
    return Lexicon(entries)


def find_matches(text: str, lex: Lexicon) -> list[LexiconMatch]:
    """All occurrences of all terms, overlaps included.

    Sorted by (start ascending, length descending); that order is total
    because two matches with equal span would be the same term.
    """
    matches = [
        LexiconMatch(start=start, end=start + len(lex.entries[idx].term), entry=lex.entries[idx])
        for start, idx in lex._automaton.scan(text)
    ]
    matches.sort(key=lambda m: (m.start, m.start - m.end))
    return matches


def token_category(tokens: str | Sequence[str], lex: Lexicon) -> list[int]:
    """Category id (0..5) per character token.

    A token covered by a match gets that match's category; when several
    matches cover it, the longest wins, ties broken by the smallest
    category id.  Uncovered tokens get 0 (non-toxic).
    """
    text = tokens if isinstance(tokens, str) else "".join(tokens)
    cats = [0] * len(text)
    best_len = [0] * len(text)
    for match in find_matches(text, lex):
        length = match.end - match.start
        cat = int(match.entry.category)
        for i in range(match.start, match.end):
            if length > best_len[i]:
                best_len[i] = length
                cats[i] = cat
            elif length == best_len[i] and cat < cats[i]:
                cats[i] = cat
    return cats
