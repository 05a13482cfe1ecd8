"""Lexicon-driven weak labels plus the review loop that grows the lexicon.

A sample is pseudo-toxic iff it contains at least one lexicon match.
New insult candidates are surfaced as character n-grams that skew toward
the pseudo-toxic set; a human reviews them into an accept list, and
``iterate_to_fixpoint`` replays match → extract → accept until no
accepted term is newly discoverable.  Because the lexicon only ever
grows, the pseudo-toxic set grows monotonically and the loop terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .lexicon import Category, InsultEntry, Lexicon, LexiconMatch, RuleTag, Surface, find_matches
from .normalize import normalize_text


class PseudoLabel(str, Enum):
    TOXIC = "toxic"
    NON_TOXIC = "non_toxic"


@dataclass(frozen=True)
class PseudoLabeledSample:
    sample_id: int
    pseudo_label: PseudoLabel
    matches: tuple[LexiconMatch, ...]


@dataclass(frozen=True)
class CandidateTerm:
    term: str
    toxic_freq: int
    clean_freq: int
    score: float  # add-one smoothed: (toxic_freq + 1) / (clean_freq + 1)


@dataclass(frozen=True)
class FixpointResult:
    lexicon: Lexicon
    labels: tuple[PseudoLabeledSample, ...]
    iterations: int
    added_per_round: tuple[tuple[str, ...], ...]


def pseudo_label(
    corpus: Sequence[tuple[int, str]], lex: Lexicon
) -> list[PseudoLabeledSample]:
    """Label each (id, normalized text) pair: toxic ⟺ ≥1 lexicon match."""
    out = []
    for sample_id, text in corpus:
        matches = tuple(find_matches(text, lex))
        label = PseudoLabel.TOXIC if matches else PseudoLabel.NON_TOXIC
        out.append(PseudoLabeledSample(sample_id=sample_id, pseudo_label=label, matches=matches))
    return out


def _doc_ngrams(text: str, spans: Sequence[tuple[int, int]], max_n: int) -> set[str]:
    """Distinct n-grams with ≥1 occurrence not fully inside a match span.

    Whitespace-bearing n-grams are skipped; they straddle what the
    normalizer already decided are separate fragments.
    """
    grams: set[str] = set()
    for n in range(1, max_n + 1):
        for i in range(len(text) - n + 1):
            j = i + n
            if any(s <= i and j <= e for s, e in spans):
                continue
            gram = text[i:j]
            if any(ch.isspace() for ch in gram):
                continue
            grams.add(gram)
    return grams


def extract_candidates(
    labeled: Sequence[PseudoLabeledSample],
    texts: Sequence[tuple[int, str]],
    min_freq: int,
    min_score: float,
    max_n: int = 4,
    lex: Lexicon | None = None,
) -> list[CandidateTerm]:
    """Rank out-of-lexicon n-grams by how strongly they indicate pseudo-toxicity.

    Frequencies are document frequencies.  Occurrences fully inside an
    existing lexicon match do not count — the evidence there is already
    explained by the matched term.  Candidates need toxic_freq ≥ min_freq
    and score ≥ min_score; ties rank by toxic_freq, then term.
    """
    if max_n < 1:
        raise ValueError(f"max_n must be ≥ 1, got {max_n}")
    by_id = dict(texts)
    known_terms = {m.entry.term for row in labeled for m in row.matches}
    if lex is not None:
        known_terms.update(e.term for e in lex)

    toxic_df: dict[str, int] = {}
    clean_df: dict[str, int] = {}
    for row in labeled:
        text = by_id[row.sample_id]
        spans = [(m.start, m.end) for m in row.matches]
        counter = toxic_df if row.pseudo_label is PseudoLabel.TOXIC else clean_df
        for gram in _doc_ngrams(text, spans, max_n):
            counter[gram] = counter.get(gram, 0) + 1

    candidates = []
    for gram, tf in toxic_df.items():
        if gram in known_terms or tf < min_freq:
            continue
        cf = clean_df.get(gram, 0)
        score = (tf + 1) / (cf + 1)
        if score >= min_score:
            candidates.append(CandidateTerm(term=gram, toxic_freq=tf, clean_freq=cf, score=score))
    candidates.sort(key=lambda c: (-c.score, -c.toxic_freq, c.term))
    return candidates


def iterate_to_fixpoint(
    corpus: Sequence[tuple[int, str]],
    seed_lex: Lexicon,
    accept_list: Iterable[str],
    *,
    min_freq: int = 3,
    min_score: float = 3.0,
    max_n: int = 4,
) -> FixpointResult:
    """Grow the lexicon from reviewed terms until labeling stabilizes.

    Each round: pseudo-label under the current lexicon, extract
    candidates, and admit those present in the (human-reviewed) accept
    list.  Admitted terms enter as general-category base entries — the
    accept list carries no category metadata.  Stops the first round that
    admits nothing; the round count includes that final quiet round.
    """
    accepted = {normalize_text(t) for t in accept_list}
    accepted.discard("")
    lex = seed_lex
    iterations = 0
    added_rounds: list[tuple[str, ...]] = []
    while True:
        iterations += 1
        labels = pseudo_label(corpus, lex)
        candidates = extract_candidates(
            labels, corpus, min_freq=min_freq, min_score=min_score, max_n=max_n, lex=lex
        )
        new_terms = tuple(
            c.term for c in candidates if c.term in accepted and c.term not in lex
        )
        if not new_terms:
            return FixpointResult(
                lexicon=lex,
                labels=tuple(labels),
                iterations=iterations,
                added_per_round=tuple(added_rounds),
            )
        added_rounds.append(new_terms)
        lex = lex.extended(
            InsultEntry(term=t, category=Category.GENERAL, surface=Surface.EXPLICIT, rule_tag=RuleTag.NONE)
            for t in new_terms
        )
