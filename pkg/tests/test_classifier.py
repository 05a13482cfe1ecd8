import math

import numpy as np
import pytest

from synthcorpus import labeled_corpus
from toxikit.classifier import (
    GROUP_ORDER,
    PAD_ID,
    UNK_ID,
    ClassifierError,
    EncodedSample,
    ModelParams,
    Task,
    TkeConfig,
    Vocab,
    class_weights_for,
    eligible_samples,
    embed_enhanced,
    encode_corpus,
    encode_sample,
    forward,
    grad_check,
    init_params,
    load_checkpoint,
    loss_and_grads,
    loss_weighted_ce,
    predict,
    save_checkpoint,
    task_label,
    train,
)
from toxikit.corpus import Expression, Platform, TargetGroup, Topic, ToxiSample
from toxikit.lexicon import Category, InsultEntry, Lexicon, Surface
from toxikit.resources import lexicon_path
from toxikit.lexicon import load_lexicon


def tiny_lex():
    return Lexicon(
        [
            InsultEntry(term="老黑", category=Category.RACISM, surface=Surface.EXPLICIT),
            InsultEntry(term="女拳", category=Category.SEXISM, surface=Surface.IMPLICIT),
        ]
    )


def sample(i=0, text="文字老黑文", toxic=1, hate=0, groups=(), expression=None):
    return ToxiSample(
        id=i,
        platform=Platform.TIEBA,
        topic=Topic.RACE,
        text=text,
        toxic=toxic,
        hate=hate,
        groups=frozenset(groups),
        expression=expression,
    )


# ---------------------------------------------------------------- vocab

def test_vocab_order_frequency_then_codepoint():
    vocab = Vocab.build(["aa", "ab"])
    # 'a' ×3 then 'b' ×1; reserved ids 0/1
    assert vocab.token_to_id == {"a": 2, "b": 3}
    assert len(vocab) == 4


def test_vocab_ties_break_by_codepoint():
    vocab = Vocab.build(["ba"])
    assert vocab.token_to_id == {"a": 2, "b": 3}


def test_vocab_deterministic():
    corpus = ["你好吗", "好得很"]
    assert Vocab.build(corpus).token_to_id == Vocab.build(corpus).token_to_id


def test_vocab_encode_unknown_to_unk():
    vocab = Vocab.build(["ab"])
    assert vocab.encode("axb") == [2, UNK_ID, 3]


def test_vocab_empty_corpus_rejected():
    with pytest.raises(ClassifierError):
        Vocab.build([])


# ---------------------------------------------------------------- encoding

def test_encode_pads_and_truncates():
    cfg = TkeConfig(task=Task.TOXIC, pad_len=6)
    vocab = Vocab.build(["文字老黑文"])
    enc = encode_sample(sample(), vocab, tiny_lex(), cfg)
    assert enc.token_ids.shape == (6,)
    assert enc.token_ids[-1] == PAD_ID
    assert list(enc.toxic_ids[:5]) == [0, 0, 2, 2, 0]
    assert enc.label == 1

    short_cfg = TkeConfig(task=Task.TOXIC, pad_len=3)
    enc = encode_sample(sample(), vocab, tiny_lex(), short_cfg)
    assert enc.token_ids.shape == (3,)
    assert list(enc.toxic_ids) == [0, 0, 2]


def test_eligible_samples_gold_cascade():
    samples = [
        sample(0, toxic=0),
        sample(1, toxic=1),
        sample(
            2,
            toxic=1,
            hate=1,
            groups=(TargetGroup.RACISM,),
            expression=Expression.EXPLICIT,
        ),
    ]
    assert len(eligible_samples(samples, Task.TOXIC)) == 3
    assert [s.id for s in eligible_samples(samples, Task.TYPE)] == [1, 2]
    assert [s.id for s in eligible_samples(samples, Task.GROUP)] == [2]
    assert [s.id for s in eligible_samples(samples, Task.EXPRESSION)] == [2]


def test_eligible_samples_predicted_cascade():
    samples = [sample(0, toxic=0), sample(1, toxic=1), sample(2, toxic=1)]
    kept = eligible_samples(samples, Task.TYPE, upstream=[1, 0, 1])
    assert [s.id for s in kept] == [0, 2]
    with pytest.raises(ClassifierError, match="align"):
        eligible_samples(samples, Task.TYPE, upstream=[1])


def test_task_label_values_and_errors():
    hate = sample(
        0,
        toxic=1,
        hate=1,
        groups=(TargetGroup.SEXISM, TargetGroup.ANTI_LGBTQ),
        expression=Expression.REPORTING,
    )
    assert task_label(hate, Task.TOXIC) == 1
    assert task_label(hate, Task.TYPE) == 1
    np.testing.assert_array_equal(task_label(hate, Task.GROUP), [1.0, 0.0, 0.0, 1.0])
    assert task_label(hate, Task.EXPRESSION) == 2
    assert GROUP_ORDER[0] is TargetGroup.SEXISM

    with pytest.raises(ClassifierError, match="type task"):
        task_label(sample(toxic=0), Task.TYPE)
    with pytest.raises(ClassifierError, match="group task"):
        task_label(sample(toxic=1, hate=0), Task.GROUP)


# ---------------------------------------------------------------- embedding

def _fixture_params(d=2, h=2, k=2, vocab_size=4):
    W = np.zeros((vocab_size, d))
    W[2] = (0.1, -0.2)
    W[3] = (0.3, 0.05)
    C = np.zeros((6, d))
    C[0] = (0.01, 0.02)
    C[1] = (-0.1, 0.4)
    U = np.array([[0.5, -0.3], [0.2, 0.1]])
    b_h = np.array([0.01, -0.02])
    V = np.array([[1.0, -1.0], [0.5, 0.25]])
    b = np.array([0.0, 0.1])
    return ModelParams(W=W, C=C, U=U, b_h=b_h, V=V, b=b)


def _enc(tokens, toxic, label=0):
    return EncodedSample(
        token_ids=np.array(tokens, dtype=np.int64),
        toxic_ids=np.array(toxic, dtype=np.int64),
        label=label,
    )


def test_embed_lambda_zero_is_plain_rows():
    params = _fixture_params()
    enc = _enc([2, 3], [0, 1])
    np.testing.assert_array_equal(embed_enhanced(enc, params, 0.0), params.W[[2, 3]])


def test_embed_all_nontoxic_adds_c0():
    params = _fixture_params()
    enc = _enc([2, 3], [0, 0])
    expected = params.W[[2, 3]] + params.C[0]
    np.testing.assert_allclose(embed_enhanced(enc, params, 1.0), expected, rtol=0, atol=0)


def test_embed_hand_arithmetic():
    params = _fixture_params()
    params.W[2] = (1.0, 0.0)
    params.C[1] = (0.0, 2.0)
    enc = _enc([2, 2], [1, 0])
    rows = embed_enhanced(enc, params, 0.5)
    np.testing.assert_allclose(rows[0], [1.0, 1.0], rtol=0, atol=0)


def test_embed_range_checks():
    params = _fixture_params(vocab_size=4)
    with pytest.raises(ClassifierError):
        embed_enhanced(_enc([9], [0]), params, 0.5)
    with pytest.raises(ClassifierError):
        embed_enhanced(_enc([2], [7]), params, 0.5)
    with pytest.raises(ClassifierError):
        embed_enhanced(_enc([-1], [0]), params, 0.5)


# ---------------------------------------------------------------- forward

def _cfg(**kw):
    base = dict(task=Task.TOXIC, d=2, h=2, pad_len=5, seed=1, dropout=0.0)
    base.update(kw)
    return TkeConfig(**base)


def test_forward_zero_weights_gives_bias():
    cfg = _cfg()
    params = ModelParams(
        W=np.zeros((4, 2)),
        C=np.zeros((6, 2)),
        U=np.zeros((2, 2)),
        b_h=np.zeros(2),
        V=np.zeros((2, 2)),
        b=np.array([0.3, -0.7]),
    )
    enc = _enc([2, 3, 0, 0, 0], [0, 0, 0, 0, 0])
    np.testing.assert_array_equal(forward(enc, params, cfg), [0.3, -0.7])


def test_forward_token_permutation_invariant():
    cfg = _cfg()
    params = _fixture_params()
    a = forward(_enc([2, 3, 2, 0, 0], [0, 1, 0, 0, 0]), params, cfg)
    b = forward(_enc([3, 2, 2, 0, 0], [1, 0, 0, 0, 0]), params, cfg)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)


def test_forward_matches_hand_computation():
    cfg = _cfg(lam=0.5)
    params = _fixture_params()
    enc = _enc([2, 3, 2, 0, 0], [0, 1, 0, 0, 0])
    scores = forward(enc, params, cfg)

    # the same arithmetic spelled out scalar by scalar
    r0 = (0.1 + 0.5 * 0.01, -0.2 + 0.5 * 0.02)
    r1 = (0.3 + 0.5 * -0.1, 0.05 + 0.5 * 0.4)
    p0 = (r0[0] + r1[0] + r0[0]) / 3
    p1 = (r0[1] + r1[1] + r0[1]) / 3
    z0 = p0 * 0.5 + p1 * 0.2 + 0.01
    z1 = p0 * -0.3 + p1 * 0.1 - 0.02
    h0, h1 = math.tanh(z0), math.tanh(z1)
    s0 = h0 * 1.0 + h1 * 0.5 + 0.0
    s1 = h0 * -1.0 + h1 * 0.25 + 0.1
    assert abs(scores[0] - s0) < 1e-12
    assert abs(scores[1] - s1) < 1e-12


def test_forward_all_pad_rejected():
    cfg = _cfg()
    params = _fixture_params()
    with pytest.raises(ClassifierError, match="empty sequence"):
        forward(_enc([0, 0, 0, 0, 0], [0, 0, 0, 0, 0]), params, cfg)


def test_prediction_depends_on_c_only_through_c0_when_nontoxic():
    cfg = TkeConfig(task=Task.TOXIC, d=8, h=8, pad_len=6, lam=0.7, seed=3)
    params = init_params(10, cfg)
    enc = _enc([2, 5, 9, 0, 0, 0], [0, 0, 0, 0, 0, 0])
    before = forward(enc, params, cfg)
    params.C[1:] += 123.0  # rows for category ids never used by this input
    np.testing.assert_array_equal(forward(enc, params, cfg), before)
    params.C[0] += 1.0
    assert not np.array_equal(forward(enc, params, cfg), before)


# ---------------------------------------------------------------- loss

def test_loss_probability_one_tends_to_zero():
    loss = loss_weighted_ce(np.array([40.0, -40.0]), 0, np.array([1.0, 1.0]))
    assert 0.0 <= loss < 1e-12


def test_loss_weight_linearity():
    scores = np.array([0.2, -0.4, 1.1])
    base = loss_weighted_ce(scores, 2, np.array([1.0, 1.0, 1.0]))
    doubled = loss_weighted_ce(scores, 2, np.array([1.0, 1.0, 2.0]))
    assert math.isclose(doubled, 2 * base, rel_tol=1e-12)


def test_loss_uniform_two_class_ln2():
    loss = loss_weighted_ce(np.array([0.0, 0.0]), 0, np.array([1.0, 1.0]))
    assert math.isclose(loss, math.log(2), rel_tol=1e-15)


def test_loss_multilabel_mean_of_weighted_bce():
    scores = np.array([0.0, 0.0, 0.0, 0.0])
    label = np.array([1.0, 0.0, 1.0, 0.0])
    loss = loss_weighted_ce(scores, label, np.array([1.0, 1.0, 1.0, 1.0]))
    assert math.isclose(loss, math.log(2), rel_tol=1e-12)
    heavier = loss_weighted_ce(scores, label, np.array([2.0, 1.0, 1.0, 1.0]))
    assert math.isclose(heavier, math.log(2) * 5 / 4, rel_tol=1e-12)


def test_loss_rejects_non_finite():
    with pytest.raises(ClassifierError):
        loss_weighted_ce(np.array([np.inf, 0.0]), 0, np.array([1.0, 1.0]))


def test_class_weights_inverse_frequency_mean_one():
    cfg = _cfg()
    weights = class_weights_for([0, 0, 0, 1], cfg)
    # counts 3,1 → raw 1/3,1 → mean 2/3 → normalized 0.5, 1.5
    np.testing.assert_allclose(weights, [0.5, 1.5], rtol=1e-15)
    assert math.isclose(weights.mean(), 1.0)


def test_class_weights_clamp_absent_class():
    cfg = _cfg(task=Task.EXPRESSION)
    weights = class_weights_for([0, 0, 1], cfg)  # class 2 absent → counted as 1
    assert weights.shape == (3,)
    assert np.isfinite(weights).all()
    assert math.isclose(weights.mean(), 1.0)


# ---------------------------------------------------------------- gradients

def test_gradients_match_finite_differences():
    rng = np.random.default_rng(5)
    for task in (Task.TOXIC, Task.GROUP, Task.EXPRESSION):
        cfg = TkeConfig(task=task, d=4, h=3, pad_len=5, lam=0.5, seed=2, dropout=0.0)
        params = init_params(8, cfg)
        batch = []
        for _ in range(3):
            n = int(rng.integers(1, 6))
            tok = np.zeros(5, dtype=np.int64)
            tok[:n] = rng.integers(2, 8, size=n)
            tox = np.zeros(5, dtype=np.int64)
            tox[:n] = rng.integers(0, 6, size=n)
            if task is Task.GROUP:
                label = np.zeros(4)
                label[rng.integers(4)] = 1.0
            else:
                label = int(rng.integers(cfg.n_classes))
            batch.append(_enc(tok, tox, label))
        err = grad_check(params, batch, cfg)
        assert err < 1e-4, f"{task}: {err}"


def test_grad_check_corrupt_self_test():
    cfg = _cfg(d=4, h=3)
    params = init_params(6, cfg)
    batch = [_enc([2, 3, 4, 0, 0], [0, 1, 0, 0, 0], 1)]
    assert grad_check(params, batch, cfg, corrupt=True) > 1e-1


def test_lambda_zero_c_gradient_exactly_zero():
    cfg = _cfg(d=4, h=3, lam=0.0)
    params = init_params(6, cfg)
    batch = [_enc([2, 3, 0, 0, 0], [1, 2, 0, 0, 0], 1)]
    _, grads = loss_and_grads(batch, params, cfg, np.ones(2))
    assert np.all(grads["C"] == 0.0)


def test_grad_check_batch_cap():
    cfg = _cfg()
    params = init_params(4, cfg)
    batch = [_enc([2, 0, 0, 0, 0], [0, 0, 0, 0, 0], 0)] * 9
    with pytest.raises(ClassifierError):
        grad_check(params, batch, cfg)


# ---------------------------------------------------------------- training

def _train_corpus(lex, n=40, seed=0):
    return labeled_corpus(n, seed, lex)


def test_train_deterministic_per_seed():
    lex = load_lexicon(lexicon_path())
    corpus = _train_corpus(lex)
    cfg = TkeConfig(task=Task.TOXIC, d=8, h=8, pad_len=12, epochs=3, seed=4)
    vocab = Vocab.build(s.text for s in corpus)
    enc = encode_corpus(corpus, vocab, lex, cfg)
    p1, h1 = train(enc, cfg, vocab_size=len(vocab))
    p2, h2 = train(enc, cfg, vocab_size=len(vocab))
    for a, b in zip(p1.blocks().values(), p2.blocks().values()):
        np.testing.assert_array_equal(a, b)
    assert h1 == h2

    p3, _ = train(enc, TkeConfig(task=Task.TOXIC, d=8, h=8, pad_len=12, epochs=3, seed=5), vocab_size=len(vocab))
    assert any(
        not np.array_equal(a, b) for a, b in zip(p1.blocks().values(), p3.blocks().values())
    )


def test_train_lr_zero_leaves_params_at_init():
    lex = load_lexicon(lexicon_path())
    corpus = _train_corpus(lex, n=20)
    cfg = TkeConfig(task=Task.TOXIC, d=8, h=8, pad_len=12, epochs=2, seed=4, lr=0.0)
    vocab = Vocab.build(s.text for s in corpus)
    enc = encode_corpus(corpus, vocab, lex, cfg)
    params, _ = train(enc, cfg, vocab_size=len(vocab))
    init = init_params(len(vocab), cfg)
    for a, b in zip(params.blocks().values(), init.blocks().values()):
        np.testing.assert_array_equal(a, b)


def test_train_returns_best_validation_snapshot():
    lex = load_lexicon(lexicon_path())
    corpus = _train_corpus(lex, n=30, seed=7)
    cfg = TkeConfig(
        task=Task.TOXIC, d=8, h=8, pad_len=12, epochs=40, seed=9, lr=5e-2, patience=40
    )
    vocab = Vocab.build(s.text for s in corpus)
    enc = encode_corpus(corpus, vocab, lex, cfg)
    params, history = train(enc, cfg, vocab_size=len(vocab))
    best = min(h.val_loss for h in history)

    # rebuild the documented validation carve-out and score the snapshot
    order = np.random.default_rng([cfg.seed, 1]).permutation(len(enc))
    n_val = max(1, int(len(enc) * cfg.val_fraction))
    val = [enc[i] for i in order[len(enc) - n_val :]]
    weights = class_weights_for([s.label for s in enc], cfg)
    losses = []
    for item in val:
        scores = forward(item, params, cfg)
        logz = np.log(np.exp(scores - scores.max()).sum()) + scores.max()
        losses.append(-weights[item.label] * (scores[item.label] - logz))
    assert math.isclose(float(np.mean(losses)), best, rel_tol=1e-9)


def test_early_stopping_cuts_run_short():
    lex = load_lexicon(lexicon_path())
    corpus = _train_corpus(lex, n=30, seed=8)
    cfg = TkeConfig(
        task=Task.TOXIC, d=8, h=8, pad_len=12, epochs=400, seed=2, lr=5e-2, patience=2
    )
    vocab = Vocab.build(s.text for s in corpus)
    enc = encode_corpus(corpus, vocab, lex, cfg)
    _, history = train(enc, cfg, vocab_size=len(vocab))
    assert len(history) < 400


def test_train_empty_set_rejected():
    with pytest.raises(ClassifierError):
        train([], _cfg(), vocab_size=4)


# ---------------------------------------------------------------- predict

def test_predict_single_label_argmax():
    cfg = _cfg()
    params = ModelParams(
        W=np.zeros((4, 2)),
        C=np.zeros((6, 2)),
        U=np.zeros((2, 2)),
        b_h=np.zeros(2),
        V=np.zeros((2, 2)),
        b=np.array([2.0, -1.0]),
    )
    labels, probs = predict([_enc([2, 0, 0, 0, 0], [0] * 5, 0)], params, cfg)
    assert labels.tolist() == [0]
    assert probs.shape == (1, 2)
    assert math.isclose(probs[0].sum(), 1.0)


def test_predict_group_threshold_and_fallback():
    cfg = TkeConfig(task=Task.GROUP, d=2, h=2, pad_len=3, seed=1)

    def with_bias(bias):
        return ModelParams(
            W=np.zeros((4, 2)),
            C=np.zeros((6, 2)),
            U=np.zeros((2, 2)),
            b_h=np.zeros(2),
            V=np.zeros((2, 4)),
            b=np.array(bias),
        )

    enc = [_enc([2, 0, 0], [0, 0, 0], np.array([1.0, 0, 0, 0]))]
    # sigmoid: 0.9, 0.6, 0.1, 0.2 ≈ logits 2.2, 0.4, -2.2, -1.4
    labels, _ = predict(enc, with_bias([2.2, 0.4, -2.2, -1.4]), cfg)
    assert labels[0].tolist() == [1.0, 1.0, 0.0, 0.0]

    # all below 0.5: highest (regional_bias, index 2) wins the fallback
    labels, _ = predict(enc, with_bias([-3.0, -2.0, -0.5, -1.0]), cfg)
    assert labels[0].tolist() == [0.0, 0.0, 1.0, 0.0]


def test_predict_shape_mismatch_rejected():
    cfg = TkeConfig(task=Task.EXPRESSION, d=2, h=2, pad_len=3, seed=1)
    params = init_params(4, _cfg())  # toxic head: 2 classes, expression needs 3
    with pytest.raises(ClassifierError):
        predict([_enc([2, 0, 0], [0, 0, 0], 0)], params, cfg)


# ---------------------------------------------------------------- ablation

def test_lambda_zero_equals_ablated_build():
    lex = load_lexicon(lexicon_path())
    corpus = _train_corpus(lex, n=60, seed=3)
    vocab = Vocab.build(s.text for s in corpus)
    outputs = []
    for lam, enhancement in ((0.0, True), (0.5, False)):
        cfg = TkeConfig(
            task=Task.TOXIC, d=8, h=8, pad_len=12, epochs=3, seed=6,
            lam=lam, enhancement=enhancement,
        )
        enc = encode_corpus(corpus, vocab, lex, cfg)
        params, _ = train(enc, cfg, vocab_size=len(vocab))
        labels, probs = predict(enc, params, cfg)
        outputs.append((params, labels, probs))
    (pa, la, ra), (pb, lb, rb) = outputs
    for a, b in zip(pa.blocks().values(), pb.blocks().values()):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(la, lb)
    np.testing.assert_array_equal(ra, rb)


# ---------------------------------------------------------------- checkpoints

def test_checkpoint_roundtrip_bitwise(tmp_path):
    lex = load_lexicon(lexicon_path())
    corpus = _train_corpus(lex, n=30, seed=5)
    cfg = TkeConfig(task=Task.TOXIC, d=8, h=8, pad_len=12, epochs=2, seed=7)
    vocab = Vocab.build(s.text for s in corpus)
    enc = encode_corpus(corpus, vocab, lex, cfg)
    params, _ = train(enc, cfg, vocab_size=len(vocab))

    path = tmp_path / "model.json"
    save_checkpoint(path, params, cfg, vocab)
    loaded_params, loaded_cfg, loaded_vocab = load_checkpoint(path)
    assert loaded_cfg == cfg
    assert loaded_vocab.token_to_id == vocab.token_to_id
    for a, b in zip(params.blocks().values(), loaded_params.blocks().values()):
        np.testing.assert_array_equal(a, b)

    before = predict(enc, params, cfg)
    after = predict(enc, loaded_params, loaded_cfg)
    np.testing.assert_array_equal(before[1], after[1])


def test_checkpoint_version_checked(tmp_path):
    import json

    lex = load_lexicon(lexicon_path())
    corpus = _train_corpus(lex, n=10, seed=5)
    cfg = TkeConfig(task=Task.TOXIC, d=4, h=4, pad_len=8, epochs=1, seed=7)
    vocab = Vocab.build(s.text for s in corpus)
    params, _ = train(encode_corpus(corpus, vocab, lex, cfg), cfg, vocab_size=len(vocab))
    path = tmp_path / "model.json"
    save_checkpoint(path, params, cfg, vocab)
    blob = json.loads(path.read_text(encoding="utf-8"))
    blob["version"] = 99
    path.write_text(json.dumps(blob), encoding="utf-8")
    with pytest.raises(ClassifierError, match="version"):
        load_checkpoint(path)


# ---------------------------------------------------------------- config

def test_config_validation():
    with pytest.raises(ClassifierError):
        TkeConfig(task=Task.TOXIC, lam=1.5)
    with pytest.raises(ClassifierError):
        TkeConfig(task=Task.TOXIC, d=0)
    with pytest.raises(ClassifierError):
        TkeConfig(task=Task.TOXIC, dropout=1.0)
    with pytest.raises(ClassifierError):
        TkeConfig(task=Task.TOXIC, val_fraction=0.9)
    cfg = TkeConfig(task=Task.GROUP)
    assert cfg.multilabel and cfg.n_classes == 4
    assert not TkeConfig(task=Task.EXPRESSION).multilabel
