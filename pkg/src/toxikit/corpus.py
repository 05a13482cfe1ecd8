"""Sample schema, label-hierarchy validation, splitting and statistics.

Labels form a four-level hierarchy: is the comment toxic; if toxic, is it
general offense or hate speech; if hate, which groups are attacked (one or
more) and through which expression (explicit, implicit, or reporting).
Offensive (non-hate) samples carry no group or expression fields: their
expression is by definition explicit, so storing it adds nothing.

Corpus files are UTF-8 JSON Lines.  Line 1 is a header object
``{"toxicn_schema": 1}``; each following line is one sample object with
keys id, platform, topic, text, toxic, hate, groups, expression.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

SCHEMA_KEY = "toxicn_schema"
SCHEMA_VERSION = 1


class CorpusError(ValueError):
    """Malformed record, file, or label combination."""


class Platform(str, Enum):
    ZHIHU = "zhihu"
    TIEBA = "tieba"


class Topic(str, Enum):
    GENDER = "gender"
    RACE = "race"
    REGION = "region"
    LGBTQ = "lgbtq"


class TargetGroup(str, Enum):
    SEXISM = "sexism"
    RACISM = "racism"
    REGIONAL_BIAS = "regional_bias"
    ANTI_LGBTQ = "anti_lgbtq"


class Expression(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"
    REPORTING = "reporting"


@dataclass(frozen=True)
class ToxiSample:
    """One labeled comment. Immutable; safe to share across workers."""

    id: int
    platform: Platform
    topic: Topic
    text: str
    toxic: int
    hate: int
    groups: frozenset[TargetGroup]
    expression: Expression | None


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split settings.

    Train size is round-half-up(train_ratio * N).  With ``stratify`` the
    cut is applied per (toxic, hate) stratum instead, so class balance is
    preserved exactly; per-stratum rounding may then shift the overall
    train size by a sample or two.
    """

    train_ratio: float
    seed: int
    stratify: bool = False


@dataclass(frozen=True)
class TopicStats:
    non_toxic: int
    toxic: int
    offensive: int
    hate: int
    hate_explicit: int
    hate_implicit: int
    hate_reporting: int
    total: int
    avg_length: float


@dataclass(frozen=True)
class GroupExpressionRow:
    explicit: int
    implicit: int
    reporting: int
    total: int


@dataclass(frozen=True)
class StatsReport:
    by_topic: dict[Topic, TopicStats]
    overall: TopicStats
    group_expression: dict[TargetGroup, GroupExpressionRow]


def validate_hierarchy(sample: ToxiSample) -> list[str]:
    """Return every violated hierarchy rule; empty list means valid."""
    violations = []
    if sample.hate == 1 and sample.toxic == 0:
        violations.append("hate requires toxic")
    if sample.toxic == 0 and sample.groups:
        violations.append("groups on non-toxic")
    if sample.toxic == 0 and sample.expression is not None:
        violations.append("expression on non-toxic")
    if sample.hate == 1 and not sample.groups:
        violations.append("hate requires targeted group")
    if sample.hate == 1 and sample.expression is None:
        violations.append("hate requires expression")
    if sample.toxic == 1 and sample.hate == 0 and sample.groups:
        violations.append("groups on offensive (non-hate) sample")
    if sample.toxic == 1 and sample.hate == 0 and sample.expression is not None:
        violations.append("expression on offensive (non-hate) sample")
    return violations


def _require(record: dict, field: str, index: int):
    if field not in record:
        raise CorpusError(f"record {index}: missing field '{field}'")
    return record[field]


def _decode_flag(record: dict, field: str, index: int) -> int:
    value = _require(record, field, index)
    if isinstance(value, bool):
        value = int(value)
    if not isinstance(value, int) or value not in (0, 1):
        raise CorpusError(f"record {index}: field '{field}' must be 0 or 1, got {value!r}")
    return value


def _decode_enum(record: dict, field: str, enum_cls, index: int):
    value = _require(record, field, index)
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise CorpusError(
            f"record {index}: field '{field}' must be one of {allowed}, got {value!r}"
        ) from None


def parse_sample(record: dict, index: int = 0) -> ToxiSample:
    """Decode one JSON object into a validated ToxiSample.

    Unknown extra keys are ignored.  Empty ``groups`` / null ``expression``
    are normalized to absent.  Raises CorpusError naming the offending
    field and record index, or listing the violated hierarchy rules.
    """
    if not isinstance(record, dict):
        raise CorpusError(f"record {index}: expected a JSON object, got {type(record).__name__}")

    sample_id = _require(record, "id", index)
    if not isinstance(sample_id, int) or isinstance(sample_id, bool) or sample_id < 0:
        raise CorpusError(f"record {index}: field 'id' must be a non-negative integer")
    text = _require(record, "text", index)
    if not isinstance(text, str):
        raise CorpusError(f"record {index}: field 'text' must be a string")

    platform = _decode_enum(record, "platform", Platform, index)
    topic = _decode_enum(record, "topic", Topic, index)
    toxic = _decode_flag(record, "toxic", index)
    hate = _decode_flag(record, "hate", index)

    raw_groups = _require(record, "groups", index)
    if not isinstance(raw_groups, list):
        raise CorpusError(f"record {index}: field 'groups' must be an array")
    groups = set()
    for g in raw_groups:
        try:
            groups.add(TargetGroup(g))
        except ValueError:
            allowed = ", ".join(e.value for e in TargetGroup)
            raise CorpusError(
                f"record {index}: field 'groups' entry {g!r} not in {allowed}"
            ) from None

    raw_expr = _require(record, "expression", index)
    if raw_expr in (None, ""):
        expression = None
    else:
        try:
            expression = Expression(raw_expr)
        except ValueError:
            allowed = ", ".join(e.value for e in Expression)
            raise CorpusError(
                f"record {index}: field 'expression' must be null or one of {allowed}"
            ) from None

    sample = ToxiSample(
        id=sample_id,
        platform=platform,
        topic=topic,
        text=text,
        toxic=toxic,
        hate=hate,
        groups=frozenset(groups),
        expression=expression,
    )
    violations = validate_hierarchy(sample)
    if violations:
        raise CorpusError(f"record {index}: hierarchy violation: {'; '.join(violations)}")
    return sample


def sample_to_record(sample: ToxiSample) -> dict:
    """Serialize to the JSON Lines wire form (group names, not indices)."""
    return {
        "id": sample.id,
        "platform": sample.platform.value,
        "topic": sample.topic.value,
        "text": sample.text,
        "toxic": sample.toxic,
        "hate": sample.hate,
        "groups": sorted(g.value for g in sample.groups),
        "expression": sample.expression.value if sample.expression else None,
    }


def iter_corpus_records(path: str | Path):
    """Yield (record index, raw JSON object) after validating the header line."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        first = fh.readline()
        if not first.strip():
            raise CorpusError(f"{path}: empty file, expected schema header")
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: line 1: malformed JSON header: {exc}") from None
        if not isinstance(header, dict) or header.get(SCHEMA_KEY) != SCHEMA_VERSION:
            raise CorpusError(
                f"{path}: line 1 must be the header object {{\"{SCHEMA_KEY}\": {SCHEMA_VERSION}}}"
            )
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: malformed JSON: {exc}") from None
            yield lineno - 2, record


def read_corpus(path: str | Path) -> list[ToxiSample]:
    """Read a corpus file, checking the schema header on line 1."""
    return [parse_sample(record, index=index) for index, record in iter_corpus_records(path)]


def write_corpus(path: str | Path, samples: Iterable[ToxiSample]) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({SCHEMA_KEY: SCHEMA_VERSION}) + "\n")
        for sample in samples:
            fh.write(json.dumps(sample_to_record(sample), ensure_ascii=False) + "\n")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def split_dataset(
    corpus: Sequence[ToxiSample], spec: SplitSpec
) -> tuple[list[ToxiSample], list[ToxiSample]]:
    """Shuffle and cut the corpus into (train, test); deterministic per seed."""
    n = len(corpus)
    if n < 2:
        raise CorpusError(f"cannot split a corpus of {n} sample(s)")
    if not 0.0 < spec.train_ratio < 1.0:
        raise CorpusError(f"train_ratio must be in (0, 1), got {spec.train_ratio}")
    rng = random.Random(spec.seed)
    items = list(corpus)
    rng.shuffle(items)
    if not spec.stratify:
        k = _round_half_up(spec.train_ratio * n)
        return items[:k], items[k:]

    strata: dict[tuple[int, int], list[ToxiSample]] = {}
    for sample in items:
        strata.setdefault((sample.toxic, sample.hate), []).append(sample)
    train: list[ToxiSample] = []
    test: list[ToxiSample] = []
    for key in sorted(strata):
        members = strata[key]
        k = _round_half_up(spec.train_ratio * len(members))
        train.extend(members[:k])
        test.extend(members[k:])
    return train, test


def _expression_counts(samples: list[ToxiSample]) -> tuple[int, int, int]:
    exp = sum(1 for s in samples if s.expression is Expression.EXPLICIT)
    imp = sum(1 for s in samples if s.expression is Expression.IMPLICIT)
    rep = sum(1 for s in samples if s.expression is Expression.REPORTING)
    return exp, imp, rep


def _topic_stats(samples: list[ToxiSample]) -> TopicStats:
    non_toxic = sum(1 for s in samples if s.toxic == 0)
    toxic = sum(1 for s in samples if s.toxic == 1)
    offensive = sum(1 for s in samples if s.toxic == 1 and s.hate == 0)
    hate = sum(1 for s in samples if s.hate == 1)
    exp, imp, rep = _expression_counts([s for s in samples if s.hate == 1])
    total = len(samples)
    avg_length = sum(len(s.text) for s in samples) / total if total else 0.0
    return TopicStats(non_toxic, toxic, offensive, hate, exp, imp, rep, total, avg_length)


def corpus_stats(corpus: Sequence[ToxiSample]) -> StatsReport:
    """Per-topic label counts, totals, and the group-by-expression table.

    Every sample must pass validate_hierarchy; otherwise the offending
    ids are collected into one CorpusError.
    """
    bad = [s.id for s in corpus if validate_hierarchy(s)]
    if bad:
        raise CorpusError(f"invalid samples (hierarchy violations): ids {bad}")

    by_topic = {}
    for topic in Topic:
        members = [s for s in corpus if s.topic is topic]
        by_topic[topic] = _topic_stats(members)
    overall = _topic_stats(list(corpus))

    group_expression = {}
    for group in TargetGroup:
        members = [s for s in corpus if group in s.groups]
        exp, imp, rep = _expression_counts(members)
        group_expression[group] = GroupExpressionRow(exp, imp, rep, len(members))
    return StatsReport(by_topic=by_topic, overall=overall, group_expression=group_expression)
