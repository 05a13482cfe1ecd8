"""Command-line entry point chaining the pipeline stages.

Exit codes: 0 success, 1 usage error, 2 data error (bad file/record,
message carries file and line where known), 3 internal check failure.

Config files are line-oriented ``key=value`` ('#' comments); flags given
on the command line take precedence over the file.  The bundled resource
tables can be overridden with the TOXIKIT_RESOURCES environment variable
or per-invocation flags.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import resources
from .classifier import (
    ClassifierError,
    EncodedSample,
    Task,
    TkeConfig,
    Vocab,
    eligible_samples,
    encode_corpus,
    grad_check,
    init_params,
    load_checkpoint,
    predict,
    save_checkpoint,
    task_label,
    train,
)
from .corpus import (
    CorpusError,
    SplitSpec,
    corpus_stats,
    iter_corpus_records,
    parse_sample,
    read_corpus,
    split_dataset,
    write_corpus,
)
from .lexicon import LexiconError, Lexicon, find_matches, load_lexicon
from .metrics import (
    MetricsError,
    expression_accuracy_breakdown,
    fleiss_kappa,
    weighted_prf,
)
from .normalize import NormalizeConfig, deduplicate, is_substantive, normalize_text
from .pseudolabel import extract_candidates, iterate_to_fixpoint
from .variants import (
    DerivationRule,
    GlyphTable,
    PinyinTable,
    VariantError,
    compose_deformation,
    detect_code_mixing,
    expand_deformation,
    gen_abbreviation,
    gen_homophones,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CHECK = 3

GRAD_TOLERANCE = 1e-4
CORRUPT_FLOOR = 1e-1

_DATA_ERRORS = (CorpusError, LexiconError, VariantError, MetricsError, ClassifierError, OSError)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; this tool reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------- config

_CONFIG_FIELDS = {
    "task": str,
    "d": int,
    "h": int,
    "lam": float,
    "pad_len": int,
    "epochs": int,
    "batch": int,
    "lr": float,
    "dropout": float,
    "seed": int,
    "enhancement": bool,
    "weight_decay": float,
    "val_fraction": float,
    "patience": int,
}


def _parse_config_file(path: str) -> dict:
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise CorpusError(f"{path}:{lineno}: expected key=value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _CONFIG_FIELDS:
            raise CorpusError(f"{path}:{lineno}: unknown config key {key!r}")
        kind = _CONFIG_FIELDS[key]
        try:
            if kind is bool:
                if raw.lower() not in ("true", "false", "0", "1"):
                    raise ValueError
                values[key] = raw.lower() in ("true", "1")
            else:
                values[key] = kind(raw)
        except ValueError:
            raise CorpusError(f"{path}:{lineno}: bad value {raw!r} for {key}") from None
    return values


def _add_model_flags(sub) -> None:
    sub.add_argument("--config", help="key=value config file; flags override it")
    sub.add_argument("--d", type=int, default=None, help="embedding dimension")
    sub.add_argument("--h", type=int, default=None, help="hidden dimension")
    sub.add_argument("--lam", type=float, default=None, help="enhancement strength in [0,1]")
    sub.add_argument("--pad-len", type=int, default=None)
    sub.add_argument("--epochs", type=int, default=None)
    sub.add_argument("--batch", type=int, default=None)
    sub.add_argument("--lr", type=float, default=None)
    sub.add_argument("--dropout", type=float, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--no-enhancement", action="store_true", help="ablate the lexicon term")
    sub.add_argument("--weight-decay", type=float, default=None)


def _assemble_config(args, needs_task: bool = True) -> TkeConfig:
    file_values = _parse_config_file(args.config) if args.config else {}
    merged: dict = dict(file_values)
    for key in ("d", "h", "lam", "pad_len", "epochs", "batch", "lr", "dropout", "seed", "weight_decay"):
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if getattr(args, "no_enhancement", False):
        merged["enhancement"] = False
    task_name = getattr(args, "task", None) or merged.pop("task", None)
    if needs_task:
        if task_name is None:
            raise CorpusError("no task given (flag --task or config key task)")
        merged["task"] = Task(task_name)
    else:
        merged.pop("task", None)
    return TkeConfig(**merged)


def _lexicon_from(args) -> Lexicon:
    path = getattr(args, "lexicon", None) or resources.lexicon_path()
    return load_lexicon(path)


def _write_json(path: str | Path, payload) -> None:
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- commands

def cmd_normalize(args) -> int:
    cfg = NormalizeConfig() if args.min_chars is None else NormalizeConfig(min_content_chars=args.min_chars)
    exclude: set[int] = set()
    if args.exclude:
        for line in Path(args.exclude).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line:
                exclude.add(int(line))
    samples = read_corpus(args.infile)
    normalized = []
    dropped_brief = 0
    for sample in samples:
        if sample.id in exclude:
            continue
        text = normalize_text(sample.text, cfg)
        if not is_substantive(text, cfg):
            dropped_brief += 1
            continue
        normalized.append(replace(sample, text=text))
    survivors = set(deduplicate([(s.id, s.text) for s in normalized]))
    dropped_dup = len(normalized) - len(survivors)
    kept = [s for s in normalized if s.id in survivors]
    write_corpus(args.out, kept)
    print(f"kept={len(kept)} dropped_brief={dropped_brief} dropped_dup={dropped_dup}")
    return EXIT_OK


def cmd_match(args) -> int:
    lex = _lexicon_from(args)
    samples = read_corpus(args.infile)
    matched = 0
    with Path(args.out).open("w", encoding="utf-8") as fh:
        for sample in samples:
            matches = find_matches(sample.text, lex)
            matched += bool(matches)
            row = {
                "id": sample.id,
                "matches": [
                    {
                        "start": m.start,
                        "end": m.end,
                        "term": m.entry.term,
                        "category": m.entry.category.name.lower(),
                    }
                    for m in matches
                ],
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"samples={len(samples)} matched={matched}")
    return EXIT_OK


def cmd_derive(args) -> int:
    rule = DerivationRule(args.rule)
    resource_dir = Path(args.resources) if args.resources else resources.resource_dir()
    if rule is DerivationRule.ABBREVIATION:
        table = PinyinTable.load(resource_dir / "pinyin.tsv")
        print(gen_abbreviation(args.term, table).variant)
    elif rule is DerivationRule.HOMOPHONIC:
        if not args.pool:
            print("derive --rule homophonic requires --pool", file=sys.stderr)
            return EXIT_USAGE
        table = PinyinTable.load(resource_dir / "pinyin.tsv")
        for cand in gen_homophones(args.term, table, args.pool):
            print(f"{cand.variant}\t{cand.note}")
    elif rule is DerivationRule.DEFORMATION:
        table = GlyphTable.load(resource_dir / "glyph.tsv")
        if len(args.term) == 1:
            expansion = expand_deformation(args.term, table)
            print("+".join(expansion.components) if expansion.components else expansion.note)
        else:
            hits = compose_deformation(list(args.term), table)
            print(" ".join(hits) if hits else "no character matches these components")
    else:  # code_mixing
        result = detect_code_mixing(args.term)
        runs = " ".join(f"{r.script}:{r.text}" for r in result.runs)
        print(f"mixed={'true' if result.mixed else 'false'} runs={runs}")
    return EXIT_OK


def cmd_pseudolabel(args) -> int:
    lex = _lexicon_from(args)
    samples = read_corpus(args.infile)
    pairs = [(s.id, s.text) for s in samples]
    accept: list[str] = []
    if args.accept:
        accept = [
            line.strip()
            for line in Path(args.accept).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.startswith("#")
        ]
    result = iterate_to_fixpoint(
        pairs, lex, accept, min_freq=args.min_freq, min_score=args.min_score, max_n=args.max_n
    )
    with Path(args.out).open("w", encoding="utf-8") as fh:
        for row in result.labels:
            fh.write(
                json.dumps(
                    {
                        "id": row.sample_id,
                        "pseudo_label": row.pseudo_label.value,
                        "matches": [
                            {"start": m.start, "end": m.end, "term": m.entry.term}
                            for m in row.matches
                        ],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    if args.report:
        leftovers = extract_candidates(
            result.labels, pairs, min_freq=args.min_freq, min_score=args.min_score,
            max_n=args.max_n, lex=result.lexicon,
        )
        with Path(args.report).open("w", encoding="utf-8") as fh:
            fh.write("term\ttoxic_freq\tclean_freq\tscore\n")
            for cand in leftovers:
                fh.write(f"{cand.term}\t{cand.toxic_freq}\t{cand.clean_freq}\t{cand.score:.6f}\n")
    toxic = sum(1 for row in result.labels if row.pseudo_label.value == "toxic")
    added = sum(len(batch) for batch in result.added_per_round)
    print(
        f"iterations={result.iterations} toxic={toxic} "
        f"non_toxic={len(result.labels) - toxic} added={added}"
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    good = 0
    bad = 0
    for index, record in iter_corpus_records(args.infile):
        try:
            parse_sample(record, index=index)
            good += 1
        except CorpusError as exc:
            print(str(exc))
            bad += 1
    print(f"records={good + bad} invalid={bad}")
    return EXIT_OK if bad == 0 else EXIT_DATA


def _stats_payload(report) -> dict:
    return {
        "by_topic": {topic.value: asdict(row) for topic, row in report.by_topic.items()},
        "overall": asdict(report.overall),
        "group_expression": {
            group.value: asdict(row) for group, row in report.group_expression.items()
        },
    }


def cmd_stats(args) -> int:
    report = corpus_stats(read_corpus(args.infile))
    header = f"{'topic':<10}{'non_toxic':>10}{'toxic':>7}{'off':>6}{'hate':>6}{'h_exp':>7}{'h_imp':>7}{'h_rep':>7}{'total':>7}{'avg_len':>9}"
    print(header)
    rows = list(report.by_topic.items()) + [(None, report.overall)]
    for topic, row in rows:
        name = topic.value if topic else "total"
        print(
            f"{name:<10}{row.non_toxic:>10}{row.toxic:>7}{row.offensive:>6}{row.hate:>6}"
            f"{row.hate_explicit:>7}{row.hate_implicit:>7}{row.hate_reporting:>7}"
            f"{row.total:>7}{row.avg_length:>9.2f}"
        )
    print()
    print(f"{'group':<15}{'explicit':>9}{'implicit':>9}{'reporting':>10}{'total':>7}")
    for group, row in report.group_expression.items():
        print(f"{group.value:<15}{row.explicit:>9}{row.implicit:>9}{row.reporting:>10}{row.total:>7}")
    if args.json:
        _write_json(args.json, _stats_payload(report))
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _assemble_config(args)
    lex = _lexicon_from(args)
    samples = read_corpus(args.infile)
    selected = eligible_samples(samples, cfg.task)
    if not selected:
        raise CorpusError(f"no samples usable for task {cfg.task.value}")
    vocab = Vocab.build(s.text for s in selected)
    encoded = encode_corpus(selected, vocab, lex, cfg)
    params, history = train(encoded, cfg, vocab_size=len(vocab))
    save_checkpoint(args.out, params, cfg, vocab)
    last = history[-1]
    print(
        f"task={cfg.task.value} epochs_run={len(history)} train_loss={last.train_loss:.4f} "
        f"train_acc={100 * last.train_accuracy:.1f} model={args.out}"
    )
    return EXIT_OK


def _evaluate(samples, params, cfg, vocab, lex) -> dict:
    selected = eligible_samples(samples, cfg.task)
    if not selected:
        raise CorpusError(f"no samples usable for task {cfg.task.value}")
    encoded = encode_corpus(selected, vocab, lex, cfg)
    labels, _ = predict(encoded, params, cfg)
    golds = [task_label(s, cfg.task) for s in selected]
    if cfg.multilabel:
        prf = weighted_prf(labels, np.stack(golds), cfg.n_classes, mode="multilabel")
    else:
        prf = weighted_prf(labels.tolist(), golds, cfg.n_classes, mode="single")
    payload = {
        "task": cfg.task.value,
        "n_test": len(selected),
        "precision": round(prf.precision, 10),
        "recall": round(prf.recall, 10),
        "f1": round(prf.f1, 10),
        "support": list(prf.support),
    }
    if cfg.task is Task.TOXIC:
        strata = expression_accuracy_breakdown([int(x) for x in labels], selected)
        payload["expression_accuracy"] = {
            name: {"correct": row.correct, "total": row.total, "accuracy": round(row.accuracy, 10)}
            for name, row in strata.items()
        }
    return payload


def cmd_eval(args) -> int:
    params, cfg, vocab = load_checkpoint(args.model)
    lex = _lexicon_from(args)
    samples = read_corpus(args.test)
    payload = _evaluate(samples, params, cfg, vocab, lex)
    print(
        f"task={payload['task']} n={payload['n_test']} "
        f"P={payload['precision']:.1f} R={payload['recall']:.1f} F1={payload['f1']:.1f}"
    )
    for name, row in payload.get("expression_accuracy", {}).items():
        print(f"  {name:<10} acc={row['accuracy']:.1f} ({row['correct']}/{row['total']})")
    if args.json:
        _write_json(args.json, payload)
    return EXIT_OK


def _random_check_batch(rng, cfg: TkeConfig, vocab_size: int, size: int) -> list[EncodedSample]:
    batch = []
    for _ in range(size):
        n_real = int(rng.integers(1, cfg.pad_len + 1))
        tok = np.zeros(cfg.pad_len, dtype=np.int64)
        tok[:n_real] = rng.integers(1, vocab_size, size=n_real)
        tox = np.zeros(cfg.pad_len, dtype=np.int64)
        tox[:n_real] = rng.integers(0, 6, size=n_real)
        if cfg.multilabel:
            label = (rng.random(cfg.n_classes) < 0.5).astype(np.float64)
            if label.sum() == 0:
                label[int(rng.integers(cfg.n_classes))] = 1.0
        else:
            label = int(rng.integers(cfg.n_classes))
        batch.append(EncodedSample(token_ids=tok, toxic_ids=tox, label=label))
    return batch


def run_gradcheck(n_configs: int, seed: int) -> tuple[float, float]:
    """(max relative error over random configs, corrupted self-test error)."""
    rng = np.random.default_rng(seed)
    tasks = list(Task)
    worst = 0.0
    corrupted = 0.0
    for i in range(n_configs):
        cfg = TkeConfig(
            task=tasks[i % len(tasks)],
            d=int(rng.integers(3, 9)),
            h=int(rng.integers(3, 9)),
            lam=float(rng.choice([0.0, 0.3, 0.5, 1.0])),
            pad_len=int(rng.integers(4, 9)),
            dropout=0.0,
            seed=int(rng.integers(1, 10_000)),
        )
        vocab_size = int(rng.integers(6, 14))
        params = init_params(vocab_size, cfg)
        batch = _random_check_batch(rng, cfg, vocab_size, size=int(rng.integers(2, 5)))
        weights = rng.uniform(0.5, 2.0, size=cfg.n_classes)
        worst = max(worst, grad_check(params, batch, cfg, class_weights=weights))
        if i == n_configs - 1:
            corrupted = grad_check(params, batch, cfg, class_weights=weights, corrupt=True)
    return worst, corrupted


def cmd_gradcheck(args) -> int:
    worst, corrupted = run_gradcheck(args.configs, args.seed)
    print(f"max_rel_error={worst:.3e} corrupted_self_test={corrupted:.3e}")
    if worst < GRAD_TOLERANCE and corrupted > CORRUPT_FLOOR:
        return EXIT_OK
    return EXIT_CHECK


def cmd_kappa(args) -> int:
    rows = []
    for line in Path(args.infile).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rows.append([int(cell) for cell in stripped.split("\t")])
    value = fleiss_kappa(rows)
    print(f"kappa={value:.4f}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg_base = _assemble_config(args)
    lex = _lexicon_from(args)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [1, 2, 3, 4, 5]

    raw = read_corpus(args.infile)
    norm_cfg = NormalizeConfig()
    normalized = []
    for sample in raw:
        text = normalize_text(sample.text, norm_cfg)
        if is_substantive(text, norm_cfg):
            normalized.append(replace(sample, text=text))
    survivors = set(deduplicate([(s.id, s.text) for s in normalized]))
    clean = [s for s in normalized if s.id in survivors]

    _write_json(outdir / "stats.json", _stats_payload(corpus_stats(clean)))
    train_set, test_set = split_dataset(
        clean, SplitSpec(train_ratio=args.train_ratio, seed=args.split_seed, stratify=args.stratify)
    )
    write_corpus(outdir / "train.jsonl", train_set)
    write_corpus(outdir / "test.jsonl", test_set)

    train_selected = eligible_samples(train_set, cfg_base.task)
    if not train_selected:
        raise CorpusError(f"no training samples usable for task {cfg_base.task.value}")
    vocab = Vocab.build(s.text for s in train_selected)
    for seed in seeds:
        cfg = replace(cfg_base, seed=seed)
        encoded = encode_corpus(train_selected, vocab, lex, cfg)
        params, _ = train(encoded, cfg, vocab_size=len(vocab))
        save_checkpoint(outdir / f"model_seed_{seed}.json", params, cfg, vocab)
        payload = _evaluate(test_set, params, cfg, vocab, lex)
        payload["seed"] = seed
        _write_json(outdir / f"report_seed_{seed}.json", payload)

    # aggregate strictly from the per-seed reports on disk
    reports = [json.loads((outdir / f"report_seed_{seed}.json").read_text(encoding="utf-8")) for seed in seeds]
    aggregate = {"task": cfg_base.task.value, "seeds": seeds, "n_test": reports[0]["n_test"]}
    for metric in ("precision", "recall", "f1"):
        values = [r[metric] for r in reports]
        mean = statistics.fmean(values)
        sd = statistics.stdev(values) if len(values) > 1 else 0.0
        aggregate[metric] = {"mean": round(mean, 10), "sd": round(sd, 10)}
        print(f"{metric}: {mean:.1f} ± {sd:.1f}")
    _write_json(outdir / "aggregate.json", aggregate)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _build_parser() -> _Parser:
    parser = _Parser(prog="toxikit", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("normalize", help="clean texts, drop brief and duplicate samples")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-chars", type=int, default=None)
    p.add_argument("--exclude", help="file of sample ids to drop (ad filtering)")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("match", help="report lexicon matches per sample")
    p.add_argument("--lexicon", default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("derive", help="generate profanity variants")
    p.add_argument("--term", required=True)
    p.add_argument("--rule", required=True, choices=[r.value for r in DerivationRule])
    p.add_argument("--pool", default=None, help="replacement characters for homophonic")
    p.add_argument("--resources", default=None)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("pseudolabel", help="lexicon-driven weak labels + candidate report")
    p.add_argument("--lexicon", default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--accept", default=None, help="reviewed terms, one per line")
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="candidates TSV")
    p.add_argument("--min-freq", type=int, default=3)
    p.add_argument("--min-score", type=float, default=3.0)
    p.add_argument("--max-n", type=int, default=4)
    p.set_defaults(func=cmd_pseudolabel)

    p = sub.add_parser("validate", help="check every record against the label hierarchy")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="per-topic and per-group corpus statistics")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train one subtask model")
    p.add_argument("--task", choices=[t.value for t in Task], default=None)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    _add_model_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a test corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference gradient verification")
    p.add_argument("--configs", type=int, default=3)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("kappa", help="Fleiss' kappa over an items × categories count TSV")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("pipeline", help="normalize → stats → split → seed-looped train/eval")
    p.add_argument("--task", choices=[t.value for t in Task], default=None)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--seeds", default=None, help="comma-separated, default 1,2,3,4,5")
    p.add_argument("--train-ratio", type=float, default=0.8)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--stratify", action="store_true")
    _add_model_flags(p)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
