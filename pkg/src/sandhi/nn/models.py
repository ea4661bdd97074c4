"""The three model shapes: seq2seq (joiner / window splitter) and tagger.

A seq2seq model is a bidirectional LSTM encoder whose concatenated final
(h, c) states pass through one linear bridge into the initial state of a
unidirectional LSTM decoder with a softmax projection. The tagger is a
bidirectional LSTM with a per-step sigmoid head. Inputs are one-hot
characters; the PAD token encodes as the zero vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import Vocabulary
from ..errors import SandhiError, VocabMissError
from .layers import (DenseParams, LstmParams, bilstm_backward, bilstm_forward,
                     init_dense, init_lstm, lstm_backward, lstm_forward, lstm_step,
                     sigmoid, softmax)

START = "&"
END = "$"


@dataclass
class TrainConfig:
    hidden_size: int
    batch_size: int = 64
    epochs: int = 100
    learning_rate: float = 0.001
    rho: float = 0.9
    epsilon: float = 1e-7
    seed: int = 0
    max_decode_margin: int = 4

    def __post_init__(self):
        for name in ("hidden_size", "batch_size", "epochs", "learning_rate",
                     "rho", "epsilon", "max_decode_margin"):
            if getattr(self, name) <= 0:
                raise SandhiError(f"TrainConfig.{name} must be positive")

    def to_dict(self) -> dict:
        return {
            "hidden_size": self.hidden_size,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "rho": self.rho,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "max_decode_margin": self.max_decode_margin,
        }


@dataclass
class Seq2SeqModel:
    enc_fwd: LstmParams
    enc_bwd: LstmParams
    bridge: DenseParams  # (2H, 4H): [hf; hb; cf; cb] -> [h0; c0]
    dec: LstmParams
    out: DenseParams     # (V, H)
    vocab: Vocabulary
    config: TrainConfig

    def param_slots(self):
        return [
            ("enc_fwd.W", self.enc_fwd, "W"), ("enc_fwd.U", self.enc_fwd, "U"),
            ("enc_fwd.b", self.enc_fwd, "b"),
            ("enc_bwd.W", self.enc_bwd, "W"), ("enc_bwd.U", self.enc_bwd, "U"),
            ("enc_bwd.b", self.enc_bwd, "b"),
            ("bridge.W", self.bridge, "W"), ("bridge.b", self.bridge, "b"),
            ("dec.W", self.dec, "W"), ("dec.U", self.dec, "U"), ("dec.b", self.dec, "b"),
            ("out.W", self.out, "W"), ("out.b", self.out, "b"),
        ]


@dataclass
class TaggerModel:
    enc_fwd: LstmParams
    enc_bwd: LstmParams
    head: DenseParams  # (1, 2H)
    vocab: Vocabulary
    config: TrainConfig

    def param_slots(self):
        return [
            ("enc_fwd.W", self.enc_fwd, "W"), ("enc_fwd.U", self.enc_fwd, "U"),
            ("enc_fwd.b", self.enc_fwd, "b"),
            ("enc_bwd.W", self.enc_bwd, "W"), ("enc_bwd.U", self.enc_bwd, "U"),
            ("enc_bwd.b", self.enc_bwd, "b"),
            ("head.W", self.head, "W"), ("head.b", self.head, "b"),
        ]


def parameters(model) -> list[tuple[str, np.ndarray]]:
    return [(name, getattr(obj, attr)) for name, obj, attr in model.param_slots()]


def init_seq2seq(vocab: Vocabulary, config: TrainConfig, dtype=np.float32) -> Seq2SeqModel:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    V, H = len(vocab), config.hidden_size
    return Seq2SeqModel(
        enc_fwd=init_lstm(V, H, rng, dtype),
        enc_bwd=init_lstm(V, H, rng, dtype),
        bridge=init_dense(4 * H, 2 * H, rng, dtype),
        dec=init_lstm(V, H, rng, dtype),
        out=init_dense(H, V, rng, dtype),
        vocab=vocab,
        config=config,
    )


def init_tagger(vocab: Vocabulary, config: TrainConfig, dtype=np.float32) -> TaggerModel:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    V, H = len(vocab), config.hidden_size
    return TaggerModel(
        enc_fwd=init_lstm(V, H, rng, dtype),
        enc_bwd=init_lstm(V, H, rng, dtype),
        head=init_dense(2 * H, 1, rng, dtype),
        vocab=vocab,
        config=config,
    )


def pad_id_rows(rows: list[list[int]], pad_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Stack variable-length id rows into (T, B) ids plus a validity mask."""
    T = max(len(r) for r in rows)
    B = len(rows)
    ids = np.full((T, B), pad_index, dtype=np.int64)
    mask = np.zeros((T, B), dtype=np.float64)
    for b, row in enumerate(rows):
        ids[:len(row), b] = row
        mask[:len(row), b] = 1.0
    return ids, mask


def one_hot(ids: np.ndarray, mask: np.ndarray, vocab_size: int, dtype) -> np.ndarray:
    """(T, B) ids -> (T, B, V) one-hot; PAD positions stay all-zero."""
    xs = np.zeros(ids.shape + (vocab_size,), dtype=dtype)
    t_idx, b_idx = np.nonzero(mask)
    xs[t_idx, b_idx, ids[t_idx, b_idx]] = 1.0
    return xs


def _bridge_states(model: Seq2SeqModel, hf, hb, cf, cb):
    H = model.config.hidden_size
    bridge_in = np.concatenate([hf, hb, cf, cb], axis=1)
    z = bridge_in @ model.bridge.W.T + model.bridge.b
    return bridge_in, z[:, :H], z[:, H:]


def seq2seq_loss_and_grads(model: Seq2SeqModel, src_rows: list[list[int]],
                           tgt_rows: list[list[int]]):
    """Teacher-forced cross-entropy loss and gradients for one batch.

    Targets include the start/end markers; the decoder consumes tgt[:-1]
    and is scored against tgt[1:], with PAD positions masked out.
    """
    vocab_size = len(model.vocab)
    dtype = model.enc_fwd.W.dtype
    pad = model.vocab.pad_index

    enc_ids, enc_mask = pad_id_rows(src_rows, pad)
    enc_xs = one_hot(enc_ids, enc_mask, vocab_size, dtype)
    _, (hf, cf, hb, cb), enc_caches = bilstm_forward(
        model.enc_fwd, model.enc_bwd, enc_xs, enc_mask)
    bridge_in, h0, c0 = _bridge_states(model, hf, hb, cf, cb)

    dec_in_rows = [row[:-1] for row in tgt_rows]
    dec_tgt_rows = [row[1:] for row in tgt_rows]
    dec_ids, dec_mask = pad_id_rows(dec_in_rows, pad)
    tgt_ids, _ = pad_id_rows(dec_tgt_rows, pad)
    dec_xs = one_hot(dec_ids, dec_mask, vocab_size, dtype)
    hs, _, _, dec_cache = lstm_forward(model.dec, dec_xs, dec_mask, h0, c0)

    logits = hs @ model.out.W.T + model.out.b
    probs = softmax(logits)
    Td, B = tgt_ids.shape
    t_idx, b_idx = np.indices((Td, B))
    picked = probs[t_idx, b_idx, tgt_ids]
    n_valid = dec_mask.sum()
    loss = float(-(np.log(np.maximum(picked, 1e-30)) * dec_mask).sum() / n_valid)

    dlogits = probs.copy()
    dlogits[t_idx, b_idx, tgt_ids] -= 1.0
    dlogits *= (dec_mask / n_valid)[:, :, None]

    d_out_W = np.einsum("tbv,tbh->vh", dlogits, hs)
    d_out_b = dlogits.sum(axis=(0, 1))
    dhs = dlogits @ model.out.W

    dec_grads, dh0, dc0 = lstm_backward(model.dec, dec_cache, dhs)
    dz = np.concatenate([dh0, dc0], axis=1)
    d_bridge_W = dz.T @ bridge_in
    d_bridge_b = dz.sum(axis=0)
    d_in = dz @ model.bridge.W
    H = model.config.hidden_size
    dstates = (d_in[:, 0:H], d_in[:, 2 * H:3 * H], d_in[:, H:2 * H], d_in[:, 3 * H:4 * H])
    grads_f, grads_b = bilstm_backward(model.enc_fwd, model.enc_bwd, enc_caches,
                                       None, dstates)

    grads = {
        "enc_fwd.W": grads_f["W"], "enc_fwd.U": grads_f["U"], "enc_fwd.b": grads_f["b"],
        "enc_bwd.W": grads_b["W"], "enc_bwd.U": grads_b["U"], "enc_bwd.b": grads_b["b"],
        "bridge.W": d_bridge_W, "bridge.b": d_bridge_b,
        "dec.W": dec_grads["W"], "dec.U": dec_grads["U"], "dec.b": dec_grads["b"],
        "out.W": d_out_W, "out.b": d_out_b,
    }
    return loss, grads


def tagger_loss_and_grads(model: TaggerModel, src_rows: list[list[int]],
                          tag_rows: list[list[int]]):
    """Masked mean-squared-error loss and gradients for one tagger batch."""
    vocab_size = len(model.vocab)
    dtype = model.enc_fwd.W.dtype
    pad = model.vocab.pad_index

    ids, mask = pad_id_rows(src_rows, pad)
    xs = one_hot(ids, mask, vocab_size, dtype)
    outs, _, caches = bilstm_forward(model.enc_fwd, model.enc_bwd, xs, mask)

    T, B = ids.shape
    targets = np.zeros((T, B, 1), dtype=dtype)
    for b, tags in enumerate(tag_rows):
        targets[:len(tags), b, 0] = tags

    pre = outs @ model.head.W.T + model.head.b
    y = sigmoid(pre)
    m = mask[:, :, None]
    n_valid = mask.sum()
    diff = (y - targets) * m
    loss = float((diff * diff).sum() / n_valid)

    dy = 2.0 * diff / n_valid
    dpre = dy * y * (1.0 - y)
    d_head_W = np.einsum("tbo,tbh->oh", dpre, outs)
    d_head_b = dpre.sum(axis=(0, 1))
    douts = dpre @ model.head.W
    grads_f, grads_b = bilstm_backward(model.enc_fwd, model.enc_bwd, caches, douts)

    grads = {
        "enc_fwd.W": grads_f["W"], "enc_fwd.U": grads_f["U"], "enc_fwd.b": grads_f["b"],
        "enc_bwd.W": grads_b["W"], "enc_bwd.U": grads_b["U"], "enc_bwd.b": grads_b["b"],
        "head.W": d_head_W, "head.b": d_head_b,
    }
    return loss, grads


def tagger_scores(model: TaggerModel, text: str) -> np.ndarray:
    """Per-character junction scores in (0, 1) for one word."""
    ids = model.vocab.ids(text)
    ids_arr, mask = pad_id_rows([ids], model.vocab.pad_index)
    xs = one_hot(ids_arr, mask, len(model.vocab), model.enc_fwd.W.dtype)
    outs, _, _ = bilstm_forward(model.enc_fwd, model.enc_bwd, xs, mask)
    pre = outs[:, 0, :] @ model.head.W.T + model.head.b
    return sigmoid(pre)[:, 0]


def greedy_decode(model: Seq2SeqModel, text: str) -> str:
    """Decode the most likely character at each step until the end marker.

    Decoding stops at '$', at a PAD emission, or after
    len(text) + max_decode_margin steps; markers are stripped from the
    returned string. Argmax ties resolve to the lowest vocabulary index.
    """
    vocab = model.vocab
    ids = vocab.ids(text)
    if START not in vocab.index or END not in vocab.index:
        raise VocabMissError(START)
    dtype = model.enc_fwd.W.dtype
    ids_arr, mask = pad_id_rows([ids], vocab.pad_index)
    xs = one_hot(ids_arr, mask, len(vocab), dtype)
    _, (hf, cf, hb, cb), _ = bilstm_forward(model.enc_fwd, model.enc_bwd, xs, mask)
    _, h, c = _bridge_states(model, hf, hb, cf, cb)

    prev = vocab.index[START]
    out: list[str] = []
    limit = len(text) + model.config.max_decode_margin
    for _ in range(limit):
        x = np.zeros((1, len(vocab)), dtype=dtype)
        if prev != vocab.pad_index:
            x[0, prev] = 1.0
        h, c = lstm_step(model.dec, x, (h, c))
        logits = h @ model.out.W.T + model.out.b
        nxt = int(np.argmax(logits[0]))
        token = vocab.tokens[nxt]
        if token == END or nxt == vocab.pad_index:
            break
        if token != START:
            out.append(token)
        prev = nxt
    return "".join(out)
