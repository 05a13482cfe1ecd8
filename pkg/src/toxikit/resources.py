"""Paths to the bundled TSV tables, overridable via TOXIKIT_RESOURCES."""

from __future__ import annotations

import os
from pathlib import Path

ENV_VAR = "TOXIKIT_RESOURCES"


def resource_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "resources"


def lexicon_path() -> Path:
    return resource_dir() / "lexicon.tsv"


def pinyin_path() -> Path:
    return resource_dir() / "pinyin.tsv"


def glyph_path() -> Path:
    return resource_dir() / "glyph.tsv"
