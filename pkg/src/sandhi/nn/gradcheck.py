"""Finite-difference verification of the analytic gradients.

Runs the exact training code path on a tiny float64 model and compares
every parameter's analytic gradient against central differences. This is
the safety net for the hand-written BPTT; it has no role at runtime.
"""

from __future__ import annotations

import numpy as np

from ..corpus import Vocabulary
from .models import (TrainConfig, init_seq2seq, init_tagger,
                     seq2seq_loss_and_grads, tagger_loss_and_grads)

FD_STEP = 1e-5


def _toy_vocab() -> Vocabulary:
    return Vocabulary.build(["abcd"])  # 4 chars + 3 specials + PAD = 8 tokens


def _relative_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    # The floor keeps finite-difference rounding noise (~1e-11 on a O(1)
    # loss) from dominating entries whose true gradient is essentially zero.
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
    return np.abs(analytic - numeric) / denom


def gradient_check(model_kind: str, seed: int = 0) -> float:
    """Max relative error between analytic and numeric gradients.

    model_kind is 'seq2seq' or 'tagger'. Small instances only (hidden 6,
    vocab 8, sequences up to 6 characters).
    """
    vocab = _toy_vocab()
    cfg = TrainConfig(hidden_size=6, batch_size=4, epochs=1, seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed + 1))

    if model_kind == "seq2seq":
        model = init_seq2seq(vocab, cfg, dtype=np.float64)
        srcs = ["abc", "dcbacd", "bd"]
        tgts = ["&cba$", "&dab$", "&abcd$"]
        src_rows = [vocab.ids(s) for s in srcs]
        tgt_rows = [vocab.ids(t) for t in tgts]

        def loss_fn():
            return seq2seq_loss_and_grads(model, src_rows, tgt_rows)
    elif model_kind == "tagger":
        model = init_tagger(vocab, cfg, dtype=np.float64)
        texts = ["abcab", "ddc", "badcba"]
        tags = [[0, 1, 1, 1, 0], [1, 1, 0], [0, 0, 1, 1, 1, 0]]
        src_rows = [vocab.ids(t) for t in texts]

        def loss_fn():
            return tagger_loss_and_grads(model, src_rows, tags)
    else:
        raise ValueError(f"unknown model kind {model_kind!r}")

    # Kick parameters well off the near-symmetric init: at tiny weights the
    # recurrent gradients are ~1e-9 and the comparison measures only
    # finite-difference noise.
    for _, obj, attr in model.param_slots():
        arr = getattr(obj, attr)
        setattr(obj, attr, arr + rng.uniform(-0.8, 0.8, arr.shape))

    _, analytic = loss_fn()
    worst = 0.0
    for name, obj, attr in model.param_slots():
        param = getattr(obj, attr)
        numeric = np.empty_like(param)
        it = np.nditer(param, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = param[idx]
            param[idx] = orig + FD_STEP
            lo_plus, _ = loss_fn()
            param[idx] = orig - FD_STEP
            lo_minus, _ = loss_fn()
            param[idx] = orig
            numeric[idx] = (lo_plus - lo_minus) / (2.0 * FD_STEP)
            it.iternext()
        worst = max(worst, float(_relative_errors(analytic[name], numeric).max()))
    return worst
