"""Web-comment text cleaning for Chinese social-media corpora.

The cleaning pipeline desensitizes and regularizes raw comments so that
downstream lexicon matching sees a stable surface form:

  * full-width letters, digits and the at sign are folded to ASCII
    (Chinese punctuation is left alone: 「我靠！」 keeps its ！),
  * @-mentions, URLs and image placeholders are deleted,
  * whitespace runs collapse to a single space,
  * emoji are preserved verbatim, since reactions carry signal.

Deletions are iterated to a fixpoint: removing one token can splice the
surrounding text into a new removable token (e.g. an @-mention sitting
inside a URL), so the removal passes repeat until the text stops
changing.  This makes ``normalize_text`` idempotent by construction.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass


@dataclass(frozen=True)
class NormalizeConfig:
    """Cleaning knobs; defaults reproduce the full pipeline."""

    min_content_chars: int = 4
    strip_mentions: bool = True
    strip_urls: bool = True
    collapse_whitespace: bool = True


# Placeholders that platforms substitute for inline images.
IMAGE_PLACEHOLDERS = ("[图片]", "[image]", "[img]")

# URL bodies are restricted to ASCII URL characters so a trailing CJK
# clause is never swallowed ("点这里http://a.b/c然后" keeps 然后).
_URL_RE = re.compile(
    r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)[A-Za-z0-9\-._~:/?#\[\]@!$&'()*+,;=%]+"
)

_WS_RE = re.compile(r"\s+")

# Emoji blocks preserved through mention stripping.
_EMOJI_RANGES = (
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF),
    (0x1FA70, 0x1FAFF),
    (0x1F1E6, 0x1F1FF),
    (0x2600, 0x26FF),
    (0x2700, 0x27BF),
    (0x2B00, 0x2BFF),
)


def is_emoji(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def _fold_fullwidth(text: str) -> str:
    """Fold full-width alphanumerics, ＠ and the ideographic space to ASCII."""
    out = []
    for ch in text:
        cp = ord(ch)
        if 0xFF10 <= cp <= 0xFF19 or 0xFF21 <= cp <= 0xFF3A or 0xFF41 <= cp <= 0xFF5A:
            out.append(chr(cp - 0xFEE0))
        elif cp == 0xFF20:  # ＠
            out.append("@")
        elif cp == 0x3000:  # ideographic space
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def _strip_mentions(text: str) -> str:
    """Delete each '@' plus the maximal run of name characters after it.

    A name character is anything that is not whitespace, not punctuation
    and not an emoji; a bare '@' (empty run) is kept.
    """
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "@":
            j = i + 1
            while j < n:
                c = text[j]
                if c.isspace() or unicodedata.category(c).startswith("P") or is_emoji(c):
                    break
                j += 1
            if j > i + 1:
                i = j
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _strip_placeholders(text: str) -> str:
    for marker in IMAGE_PLACEHOLDERS:
        while marker in text:
            text = text.replace(marker, "")
    return text


def normalize_text(raw: str, cfg: NormalizeConfig | None = None) -> str:
    """Normalize one comment. Total: never raises on valid Unicode."""
    cfg = cfg or NormalizeConfig()
    text = _fold_fullwidth(raw)

    # Iterate removals to a fixpoint; each pass strictly shrinks the text
    # or leaves it unchanged, so this terminates.
    while True:
        before = text
        text = _strip_placeholders(text)
        if cfg.strip_urls:
            text = _URL_RE.sub("", text)
        if cfg.strip_mentions:
            text = _strip_mentions(text)
        if text == before:
            break

    if cfg.collapse_whitespace:
        text = _WS_RE.sub(" ", text)
    return text.strip()


def is_substantive(text: str, cfg: NormalizeConfig | None = None) -> bool:
    """True iff the text has enough content characters to carry meaning.

    Content characters are letters (CJK ideographs included) and digits.
    """
    cfg = cfg or NormalizeConfig()
    count = sum(1 for ch in text if ch.isalnum())
    return count >= cfg.min_content_chars


def deduplicate(corpus: list[tuple[int, str]]) -> list[int]:
    """Return ids whose normalized text is the first of its kind.

    Comparison is exact (case-sensitive); input order is preserved.
    """
    seen: set[str] = set()
    survivors: list[int] = []
    for sample_id, text in corpus:
        if text not in seen:
            seen.add(text)
            survivors.append(sample_id)
    return survivors
