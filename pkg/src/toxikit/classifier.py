"""Lexicon-enhanced text classifier for the four hierarchy subtasks.

Each character token i contributes W[token_i] + λ·C[toxic_i] to the
sample representation, where C holds one embedding per insult category
(row 0 = non-toxic) and toxic_i comes from lexicon.token_category.  The
encoder is deliberately minimal — mean pooling over non-pad rows, one
tanh hidden layer, a linear head — so the enhancement term is isolated
and every gradient is checkable against finite differences.

Setting λ=0, or flipping ``enhancement`` off, skips the addition
entirely; both builds execute identical floating-point operations and
consume identical RNG draws (C is always initialized), so their trained
parameters and predictions agree bitwise.

Training: AdamW on weighted cross-entropy (class weights = inverse
label frequency, normalized to mean 1), deterministic per seed, early
stopping on an internal validation carve-out with patience 3, inverted
dropout on the pooled vector during training only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Expression, TargetGroup, ToxiSample
from .lexicon import Lexicon, token_category

NUM_CATEGORIES = 5  # four targeted-group categories + general swearwords
PAD_ID = 0
UNK_ID = 1

GROUP_ORDER = (
    TargetGroup.SEXISM,
    TargetGroup.RACISM,
    TargetGroup.REGIONAL_BIAS,
    TargetGroup.ANTI_LGBTQ,
)
EXPRESSION_ORDER = (Expression.EXPLICIT, Expression.IMPLICIT, Expression.REPORTING)


class ClassifierError(ValueError):
    """Bad configuration, shape mismatch, or task/label mismatch."""


class Task(str, Enum):
    TOXIC = "toxic"            # toxic vs non-toxic, all samples
    TYPE = "type"              # offensive vs hate, toxic samples only
    GROUP = "group"            # multi-label targeted groups, hate samples only
    EXPRESSION = "expression"  # explicit/implicit/reporting, hate samples only


TASK_CLASSES = {Task.TOXIC: 2, Task.TYPE: 2, Task.GROUP: 4, Task.EXPRESSION: 3}
MULTILABEL_TASKS = frozenset({Task.GROUP})


@dataclass(frozen=True)
class TkeConfig:
    task: Task = Task.TOXIC
    d: int = 64
    h: int = 64
    lam: float = 0.5
    pad_len: int = 100
    epochs: int = 20
    batch: int = 64
    lr: float = 1e-3
    dropout: float = 0.5
    seed: int = 1
    enhancement: bool = True
    weight_decay: float = 0.0
    val_fraction: float = 0.1
    patience: int = 3

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ClassifierError(f"lambda must be in [0, 1], got {self.lam}")
        if min(self.d, self.h, self.pad_len, self.batch) < 1 or self.epochs < 0:
            raise ClassifierError("dimensions, batch, and pad_len must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ClassifierError(f"dropout must be in [0, 1), got {self.dropout}")
        if not 0.0 <= self.val_fraction < 0.5:
            raise ClassifierError(f"val_fraction must be in [0, 0.5), got {self.val_fraction}")
        if self.patience < 1:
            raise ClassifierError(f"patience must be ≥ 1, got {self.patience}")
        if self.lr < 0.0 or self.weight_decay < 0.0:
            raise ClassifierError("lr and weight_decay must be non-negative")

    @property
    def n_classes(self) -> int:
        return TASK_CLASSES[self.task]

    @property
    def multilabel(self) -> bool:
        return self.task in MULTILABEL_TASKS


@dataclass(frozen=True)
class Vocab:
    """Character → id. Ids 0/1 are reserved for pad/unknown."""

    token_to_id: dict[str, int]

    @classmethod
    def build(cls, texts: Iterable[str]) -> "Vocab":
        freq: dict[str, int] = {}
        for text in texts:
            for ch in text:
                freq[ch] = freq.get(ch, 0) + 1
        if not freq:
            raise ClassifierError("cannot build a vocabulary from an empty corpus")
        ordered = sorted(freq, key=lambda ch: (-freq[ch], ord(ch)))
        return cls(token_to_id={ch: i + 2 for i, ch in enumerate(ordered)})

    def __len__(self) -> int:
        return len(self.token_to_id) + 2

    def encode(self, text: str) -> list[int]:
        return [self.token_to_id.get(ch, UNK_ID) for ch in text]


@dataclass
class EncodedSample:
    token_ids: np.ndarray  # (pad_len,) int64
    toxic_ids: np.ndarray  # (pad_len,) int64, values in [0, NUM_CATEGORIES]
    label: int | np.ndarray


@dataclass
class ModelParams:
    W: np.ndarray    # |V| × d word embeddings
    C: np.ndarray    # (m+1) × d category embeddings, row 0 = non-toxic
    U: np.ndarray    # d × h
    b_h: np.ndarray  # h
    V: np.ndarray    # h × k
    b: np.ndarray    # k

    def blocks(self) -> dict[str, np.ndarray]:
        return {"W": self.W, "C": self.C, "U": self.U, "b_h": self.b_h, "V": self.V, "b": self.b}

    def copy(self) -> "ModelParams":
        return ModelParams(**{name: arr.copy() for name, arr in self.blocks().items()})


def eligible_samples(
    samples: Sequence[ToxiSample], task: Task, upstream: Sequence[int] | None = None
) -> list[ToxiSample]:
    """The subset a task is defined on.

    By default the cascade is gold-filtered (type on gold-toxic samples,
    group/expression on gold-hate).  Passing ``upstream`` — one 0/1
    prediction per sample from the preceding cascade stage — switches to
    predicted-cascade filtering instead.
    """
    if upstream is not None and len(upstream) != len(samples):
        raise ClassifierError(
            f"upstream predictions ({len(upstream)}) do not align with samples ({len(samples)})"
        )
    if task is Task.TOXIC:
        return list(samples)
    if upstream is not None:
        return [s for s, keep in zip(samples, upstream) if keep == 1]
    if task is Task.TYPE:
        return [s for s in samples if s.toxic == 1]
    return [s for s in samples if s.hate == 1]


def task_label(sample: ToxiSample, task: Task) -> int | np.ndarray:
    if task is Task.TOXIC:
        return sample.toxic
    if task is Task.TYPE:
        if sample.toxic != 1:
            raise ClassifierError(f"sample {sample.id}: type task needs a toxic sample")
        return sample.hate
    if sample.hate != 1:
        raise ClassifierError(f"sample {sample.id}: {task.value} task needs a hate sample")
    if task is Task.GROUP:
        return np.array([float(g in sample.groups) for g in GROUP_ORDER])
    return EXPRESSION_ORDER.index(sample.expression)


def encode_sample(sample: ToxiSample, vocab: Vocab, lex: Lexicon, cfg: TkeConfig) -> EncodedSample:
    ids = vocab.encode(sample.text)[: cfg.pad_len]
    cats = token_category(sample.text, lex)[: cfg.pad_len]
    pad = cfg.pad_len - len(ids)
    token_ids = np.array(ids + [PAD_ID] * pad, dtype=np.int64)
    toxic_ids = np.array(cats + [0] * pad, dtype=np.int64)
    return EncodedSample(token_ids=token_ids, toxic_ids=toxic_ids, label=task_label(sample, cfg.task))


def encode_corpus(
    samples: Sequence[ToxiSample], vocab: Vocab, lex: Lexicon, cfg: TkeConfig
) -> list[EncodedSample]:
    return [encode_sample(s, vocab, lex, cfg) for s in samples]


def init_params(vocab_size: int, cfg: TkeConfig) -> ModelParams:
    """Uniform [-0.1, 0.1] init from a generator seeded with cfg.seed.

    C is drawn even when enhancement is off so that ablated and λ=0
    builds see identical RNG streams.
    """
    rng = np.random.default_rng(cfg.seed)
    k = cfg.n_classes
    return ModelParams(
        W=rng.uniform(-0.1, 0.1, size=(vocab_size, cfg.d)),
        C=rng.uniform(-0.1, 0.1, size=(NUM_CATEGORIES + 1, cfg.d)),
        U=rng.uniform(-0.1, 0.1, size=(cfg.d, cfg.h)),
        b_h=rng.uniform(-0.1, 0.1, size=cfg.h),
        V=rng.uniform(-0.1, 0.1, size=(cfg.h, k)),
        b=rng.uniform(-0.1, 0.1, size=k),
    )


def embed_enhanced(enc: EncodedSample, params: ModelParams, lam: float) -> np.ndarray:
    """Per-token enhanced embeddings: row i = W[token_i] + λ·C[toxic_i]."""
    if (
        enc.token_ids.min(initial=0) < 0
        or enc.token_ids.max(initial=0) >= params.W.shape[0]
        or enc.toxic_ids.min(initial=0) < 0
        or enc.toxic_ids.max(initial=0) >= params.C.shape[0]
    ):
        raise ClassifierError("token or toxic id out of range for the parameter tables")
    E = params.W[enc.token_ids]
    if lam != 0.0:
        E = E + lam * params.C[enc.toxic_ids]
    return E


def _stack(batch: Sequence[EncodedSample]) -> tuple[np.ndarray, np.ndarray]:
    tok = np.stack([s.token_ids for s in batch])
    tox = np.stack([s.toxic_ids for s in batch])
    return tok, tox


def _stack_labels(batch: Sequence[EncodedSample], cfg: TkeConfig) -> np.ndarray:
    if cfg.multilabel:
        return np.stack([np.asarray(s.label, dtype=np.float64) for s in batch])
    return np.array([int(s.label) for s in batch], dtype=np.int64)


def _forward_batch(
    tok: np.ndarray,
    tox: np.ndarray,
    params: ModelParams,
    cfg: TkeConfig,
    dropout_mask: np.ndarray | None = None,
):
    nonpad = tok != PAD_ID
    counts = nonpad.sum(axis=1)
    if (counts == 0).any():
        raise ClassifierError("empty sequence")
    E = params.W[tok]
    if cfg.enhancement and cfg.lam != 0.0:
        E = E + cfg.lam * params.C[tox]
    mask = nonpad[:, :, None].astype(np.float64)
    pooled = (E * mask).sum(axis=1) / counts[:, None]
    dropped = pooled if dropout_mask is None else pooled * dropout_mask
    z = dropped @ params.U + params.b_h
    hidden = np.tanh(z)
    scores = hidden @ params.V + params.b
    cache = (tok, tox, nonpad, counts, dropped, dropout_mask, hidden)
    return scores, cache


def forward(enc: EncodedSample, params: ModelParams, cfg: TkeConfig) -> np.ndarray:
    """Class scores for one sample (no dropout; inference path)."""
    tok, tox = _stack([enc])
    scores, _ = _forward_batch(tok, tox, params, cfg)
    return scores[0]


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    expx = np.exp(x[~pos])
    out[~pos] = expx / (1.0 + expx)
    return out


def _bce_with_logits(scores: np.ndarray, targets: np.ndarray) -> np.ndarray:
    # max(s,0) - s*y + log(1 + exp(-|s|)), stable for large |s|
    return np.maximum(scores, 0.0) - scores * targets + np.log1p(np.exp(-np.abs(scores)))


def loss_weighted_ce(
    scores: np.ndarray, label: int | np.ndarray, class_weights: np.ndarray
) -> float:
    """Weighted cross-entropy for one sample.

    Single-label: softmax CE scaled by the true class's weight.
    Multi-label (label is a 0/1 vector): mean over labels of the
    weighted per-label binary cross-entropies.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if not np.isfinite(scores).all():
        raise ClassifierError("non-finite scores")
    weights = np.asarray(class_weights, dtype=np.float64)
    if (weights <= 0).any():
        raise ClassifierError("class weights must be positive")
    if np.ndim(label) == 0:
        label = int(label)
        if not 0 <= label < scores.shape[-1]:
            raise ClassifierError(f"label {label} out of range")
        return float(-weights[label] * _log_softmax(scores)[label])
    targets = np.asarray(label, dtype=np.float64)
    return float(np.mean(weights * _bce_with_logits(scores, targets)))


def class_weights_for(labels: Sequence[int] | np.ndarray, cfg: TkeConfig) -> np.ndarray:
    """Inverse label-frequency weights, normalized to mean 1.

    Classes absent from the data are counted as 1 so the weights stay
    finite; they get the largest weight, which is the intended bias.
    """
    k = cfg.n_classes
    if cfg.multilabel:
        rows = np.asarray(labels, dtype=np.float64).reshape(-1, k)
        counts = rows.sum(axis=0)
    else:
        counts = np.bincount(np.asarray(labels, dtype=np.int64), minlength=k).astype(np.float64)
    counts = np.maximum(counts, 1.0)
    raw = 1.0 / counts
    return raw / raw.mean()


def loss_and_grads(
    batch: Sequence[EncodedSample],
    params: ModelParams,
    cfg: TkeConfig,
    class_weights: np.ndarray,
    dropout_mask: np.ndarray | None = None,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean weighted CE over the batch plus analytic gradients for every block."""
    tok, tox = _stack(batch)
    labels = _stack_labels(batch, cfg)
    scores, cache = _forward_batch(tok, tox, params, cfg, dropout_mask)
    _, _, nonpad, counts, dropped, dmask, hidden = cache
    B, k = scores.shape
    weights = np.asarray(class_weights, dtype=np.float64)

    if cfg.multilabel:
        per = weights * _bce_with_logits(scores, labels)
        loss = float(per.mean())
        dscores = weights * (_sigmoid(scores) - labels) / (B * k)
    else:
        logp = _log_softmax(scores)
        w_true = weights[labels]
        loss = float(np.mean(-w_true * logp[np.arange(B), labels]))
        probs = np.exp(logp)
        onehot = np.zeros_like(probs)
        onehot[np.arange(B), labels] = 1.0
        dscores = (w_true[:, None] / B) * (probs - onehot)

    grads = {name: np.zeros_like(arr) for name, arr in params.blocks().items()}
    grads["V"] = hidden.T @ dscores
    grads["b"] = dscores.sum(axis=0)
    dhidden = dscores @ params.V.T
    dz = dhidden * (1.0 - hidden * hidden)
    grads["U"] = dropped.T @ dz
    grads["b_h"] = dz.sum(axis=0)
    ddropped = dz @ params.U.T
    dpooled = ddropped if dmask is None else ddropped * dmask
    dE = (dpooled[:, None, :] / counts[:, None, None]) * nonpad[:, :, None]
    np.add.at(grads["W"], tok.ravel(), dE.reshape(-1, params.W.shape[1]))
    if cfg.enhancement and cfg.lam != 0.0:
        np.add.at(grads["C"], tox.ravel(), (cfg.lam * dE).reshape(-1, params.C.shape[1]))
    return loss, grads


def finite_diff_grads(
    batch: Sequence[EncodedSample],
    params: ModelParams,
    cfg: TkeConfig,
    class_weights: np.ndarray,
    step: float = 1e-5,
) -> dict[str, np.ndarray]:
    """Central-difference gradients; the independent oracle for loss_and_grads."""

    def batch_loss() -> float:
        tok, tox = _stack(batch)
        labels = _stack_labels(batch, cfg)
        scores, _ = _forward_batch(tok, tox, params, cfg)
        if cfg.multilabel:
            per = np.asarray(class_weights) * _bce_with_logits(scores, labels)
            return float(per.mean())
        total = 0.0
        for i in range(len(batch)):
            total += loss_weighted_ce(scores[i], int(labels[i]), class_weights)
        return total / len(batch)

    numeric = {}
    for name, arr in params.blocks().items():
        grad = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + step
            up = batch_loss()
            flat[idx] = orig - step
            down = batch_loss()
            flat[idx] = orig
            gflat[idx] = (up - down) / (2.0 * step)
        numeric[name] = grad
    return numeric


def grad_check(
    params: ModelParams,
    batch: Sequence[EncodedSample],
    cfg: TkeConfig,
    class_weights: np.ndarray | None = None,
    step: float = 1e-5,
    corrupt: bool = False,
) -> float:
    """Max relative error between analytic and finite-difference gradients.

    Relative error uses max(|analytic|, |numeric|, 1e-6) as denominator
    so near-zero entries compare on an absolute scale.  ``corrupt``
    sign-flips the largest analytic entry first — the self-test that
    proves the harness can fail.
    """
    if len(batch) > 8:
        raise ClassifierError("grad_check batches are capped at 8 samples")
    if class_weights is None:
        class_weights = np.ones(cfg.n_classes)
    _, analytic = loss_and_grads(batch, params, cfg, class_weights)
    numeric = finite_diff_grads(batch, params, cfg, class_weights, step=step)
    if corrupt:
        name = max(analytic, key=lambda n: np.abs(analytic[n]).max())
        flat = analytic[name].reshape(-1)
        idx = int(np.abs(flat).argmax())
        flat[idx] = -flat[idx]
    worst = 0.0
    for name in analytic:
        a = analytic[name]
        n = numeric[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-6)
        worst = max(worst, float((np.abs(a - n) / denom).max()))
    return worst


class _AdamW:
    def __init__(self, blocks: dict[str, np.ndarray], lr: float, weight_decay: float):
        self.lr = lr
        self.wd = weight_decay
        self.beta1, self.beta2, self.eps = 0.9, 0.999, 1e-8
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in blocks.items()}
        self.v = {k: np.zeros_like(v) for k, v in blocks.items()}

    def step(self, blocks: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        for name, p in blocks.items():
            g = grads[name]
            self.m[name] = self.beta1 * self.m[name] + (1 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1 - self.beta2) * g * g
            mhat = self.m[name] / (1 - self.beta1 ** self.t)
            vhat = self.v[name] / (1 - self.beta2 ** self.t)
            p -= self.lr * (mhat / (np.sqrt(vhat) + self.eps) + self.wd * p)


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_loss: float | None
    val_accuracy: float | None


def _eval_loss_acc(
    encoded: Sequence[EncodedSample],
    params: ModelParams,
    cfg: TkeConfig,
    class_weights: np.ndarray,
) -> tuple[float, float]:
    tok, tox = _stack(encoded)
    labels = _stack_labels(encoded, cfg)
    scores, _ = _forward_batch(tok, tox, params, cfg)
    if cfg.multilabel:
        per = np.asarray(class_weights) * _bce_with_logits(scores, labels)
        loss = float(per.mean())
        pred = _predict_from_scores(scores, cfg)
        acc = float((pred == labels).all(axis=1).mean())
    else:
        logp = _log_softmax(scores)
        B = len(encoded)
        loss = float(np.mean(-np.asarray(class_weights)[labels] * logp[np.arange(B), labels]))
        acc = float((scores.argmax(axis=1) == labels).mean())
    return loss, acc


def train(
    train_set: Sequence[EncodedSample], cfg: TkeConfig, vocab_size: int
) -> tuple[ModelParams, list[EpochStats]]:
    """Train from scratch; deterministic per cfg.seed.

    A validation slice (cfg.val_fraction, at least one sample, only when
    the set has ≥ 5 samples) is carved off the end of a seeded shuffle
    and drives early stopping: no improvement for cfg.patience epochs
    stops the run, and the best-validation-loss snapshot is returned.
    """
    if not train_set:
        raise ClassifierError("empty training set")
    params = init_params(vocab_size, cfg)
    class_weights = class_weights_for(
        [s.label for s in train_set] if not cfg.multilabel else [np.asarray(s.label) for s in train_set],
        cfg,
    )
    loop_rng = np.random.default_rng([cfg.seed, 1])

    order = loop_rng.permutation(len(train_set))
    n_val = int(len(train_set) * cfg.val_fraction) if len(train_set) >= 5 else 0
    n_val = max(n_val, 1) if n_val else 0
    fit_idx = order[: len(order) - n_val]
    val_idx = order[len(order) - n_val :]
    fit = [train_set[i] for i in fit_idx]
    val = [train_set[i] for i in val_idx]

    history: list[EpochStats] = []
    best_loss = np.inf
    best_params = params.copy()
    stale = 0
    optimizer = _AdamW(params.blocks(), lr=cfg.lr, weight_decay=cfg.weight_decay)
    for epoch in range(cfg.epochs):
        perm = loop_rng.permutation(len(fit))
        for start in range(0, len(fit), cfg.batch):
            chunk = [fit[i] for i in perm[start : start + cfg.batch]]
            dropout_mask = None
            if cfg.dropout > 0.0:
                keep = loop_rng.random((len(chunk), cfg.d)) >= cfg.dropout
                dropout_mask = keep.astype(np.float64) / (1.0 - cfg.dropout)
            _, grads = loss_and_grads(chunk, params, cfg, class_weights, dropout_mask)
            optimizer.step(params.blocks(), grads)

        train_loss, train_acc = _eval_loss_acc(fit, params, cfg, class_weights)
        if val:
            val_loss, val_acc = _eval_loss_acc(val, params, cfg, class_weights)
            history.append(EpochStats(epoch, train_loss, train_acc, val_loss, val_acc))
            if val_loss < best_loss:
                best_loss = val_loss
                best_params = params.copy()
                stale = 0
            else:
                stale += 1
                if stale >= cfg.patience:
                    break
        else:
            history.append(EpochStats(epoch, train_loss, train_acc, None, None))
            best_params = params.copy()
    return best_params, history


def _predict_from_scores(scores: np.ndarray, cfg: TkeConfig) -> np.ndarray:
    if not cfg.multilabel:
        return scores.argmax(axis=1)
    probs = _sigmoid(scores)
    labels = (probs >= 0.5).astype(np.float64)
    empty = labels.sum(axis=1) == 0
    if empty.any():
        # a hate sample must attack at least one group
        fallback = probs[empty].argmax(axis=1)
        labels[np.nonzero(empty)[0], fallback] = 1.0
    return labels


def predict(
    test_set: Sequence[EncodedSample], params: ModelParams, cfg: TkeConfig
) -> tuple[np.ndarray, np.ndarray]:
    """(labels, probabilities). Argmax for single-label tasks; 0.5-threshold
    per label for the group task with a highest-probability fallback."""
    if not test_set:
        raise ClassifierError("empty test set")
    tok, tox = _stack(test_set)
    if params.V.shape[1] != cfg.n_classes:
        raise ClassifierError(
            f"head has {params.V.shape[1]} classes but task {cfg.task.value} needs {cfg.n_classes}"
        )
    scores, _ = _forward_batch(tok, tox, params, cfg)
    if cfg.multilabel:
        probs = _sigmoid(scores)
    else:
        probs = np.exp(_log_softmax(scores))
    return _predict_from_scores(scores, cfg), probs


CHECKPOINT_VERSION = 1


def save_checkpoint(path: str | Path, params: ModelParams, cfg: TkeConfig, vocab: Vocab) -> None:
    """JSON container: config echo, vocab, and all matrices.

    Floats are serialized via repr and round-trip bitwise.
    """
    payload = {
        "version": CHECKPOINT_VERSION,
        "config": {
            "task": cfg.task.value, "d": cfg.d, "h": cfg.h, "lam": cfg.lam,
            "pad_len": cfg.pad_len, "epochs": cfg.epochs, "batch": cfg.batch,
            "lr": cfg.lr, "dropout": cfg.dropout, "seed": cfg.seed,
            "enhancement": cfg.enhancement, "weight_decay": cfg.weight_decay,
            "val_fraction": cfg.val_fraction, "patience": cfg.patience,
        },
        "vocab": sorted(vocab.token_to_id.items(), key=lambda kv: kv[1]),
        "params": {
            name: {"shape": list(arr.shape), "data": arr.reshape(-1).tolist()}
            for name, arr in params.blocks().items()
        },
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")


def load_checkpoint(path: str | Path) -> tuple[ModelParams, TkeConfig, Vocab]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ClassifierError(f"unsupported checkpoint version {payload.get('version')!r}")
    raw_cfg = dict(payload["config"])
    raw_cfg["task"] = Task(raw_cfg["task"])
    cfg = TkeConfig(**raw_cfg)
    blocks = {
        name: np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])
        for name, entry in payload["params"].items()
    }
    vocab = Vocab(token_to_id={tok: i for tok, i in payload["vocab"]})
    return ModelParams(**blocks), cfg, vocab
