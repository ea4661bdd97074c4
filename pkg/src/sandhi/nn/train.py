"""Training loops: RMSProp over teacher-forced batches, seeded end to end.

Batches are carved from a stable length-sort once, then only the batch
order is reshuffled per epoch, so a fixed seed reproduces bit-identical
parameters. Gradients are clipped by global norm before every update to
keep the small hidden sizes from diverging.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptyDatasetError, LengthMismatchError, SandhiError
from .models import (END, START, Seq2SeqModel, TaggerModel, TrainConfig,
                     seq2seq_loss_and_grads, tagger_loss_and_grads)

CLIP_NORM = 5.0


def rmsprop_update(param: np.ndarray, grad: np.ndarray, cache: np.ndarray,
                   lr: float, rho: float, epsilon: float,
                   ) -> tuple[np.ndarray, np.ndarray]:
    """One RMSProp step: cache' = rho*cache + (1-rho)*grad^2,
    param' = param - lr*grad/(sqrt(cache') + epsilon)."""
    if param.shape != grad.shape or param.shape != cache.shape:
        raise SandhiError(f"shape mismatch {param.shape}/{grad.shape}/{cache.shape}")
    new_cache = rho * cache + (1.0 - rho) * grad * grad
    new_param = param - lr * grad / (np.sqrt(new_cache) + epsilon)
    return new_param.astype(param.dtype, copy=False), new_cache


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float = CLIP_NORM) -> None:
    total = 0.0
    for g in grads.values():
        total += float((g.astype(np.float64) ** 2).sum())
    norm = np.sqrt(total)
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale


def _bucket_batches(n_items: int, lengths: list[int], batch_size: int) -> list[list[int]]:
    order = sorted(range(n_items), key=lambda i: lengths[i])  # stable
    return [order[i:i + batch_size] for i in range(0, len(order), batch_size)]


def _apply_updates(model, grads, caches, cfg: TrainConfig) -> None:
    clip_gradients(grads)
    for name, obj, attr in model.param_slots():
        new_param, new_cache = rmsprop_update(
            getattr(obj, attr), grads[name], caches[name],
            cfg.learning_rate, cfg.rho, cfg.epsilon)
        setattr(obj, attr, new_param)
        caches[name] = new_cache


def train_seq2seq(model: Seq2SeqModel, data: list[tuple[str, str]], cfg: TrainConfig,
                  validation: list[tuple[str, str]] | None = None,
                  ) -> tuple[Seq2SeqModel, list[dict]]:
    """Teacher-forced training; returns the model and one history row per epoch."""
    if not data:
        raise EmptyDatasetError("train_seq2seq got no examples")
    for _, tgt in data:
        if not (tgt.startswith(START) and tgt.endswith(END)):
            raise SandhiError(f"target {tgt!r} must start with '&' and end with '$'")

    vocab = model.vocab
    src_rows = [vocab.ids(src) for src, _ in data]
    tgt_rows = [vocab.ids(tgt) for _, tgt in data]
    val_rows = None
    if validation:
        val_rows = ([vocab.ids(s) for s, _ in validation],
                    [vocab.ids(t) for _, t in validation])

    batches = _bucket_batches(len(data), [len(r) for r in src_rows], cfg.batch_size)
    caches = {name: np.zeros_like(arr) for name, arr in
              ((n, getattr(o, a)) for n, o, a in model.param_slots())}
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    history: list[dict] = []
    for epoch in range(cfg.epochs):
        total_loss, total_tokens = 0.0, 0
        for bi in rng.permutation(len(batches)):
            batch = batches[bi]
            srcs = [src_rows[i] for i in batch]
            tgts = [tgt_rows[i] for i in batch]
            loss, grads = seq2seq_loss_and_grads(model, srcs, tgts)
            n_tokens = sum(len(t) - 1 for t in tgts)
            total_loss += loss * n_tokens
            total_tokens += n_tokens
            _apply_updates(model, grads, caches, cfg)
        row = {"epoch": epoch + 1, "train_loss": total_loss / total_tokens,
               "val_loss": None}
        if val_rows is not None:
            row["val_loss"] = _eval_seq2seq_loss(model, *val_rows, cfg.batch_size)
        history.append(row)
    return model, history


def _eval_seq2seq_loss(model, src_rows, tgt_rows, batch_size) -> float:
    total_loss, total_tokens = 0.0, 0
    batches = _bucket_batches(len(src_rows), [len(r) for r in src_rows], batch_size)
    for batch in batches:
        srcs = [src_rows[i] for i in batch]
        tgts = [tgt_rows[i] for i in batch]
        loss, _ = seq2seq_loss_and_grads(model, srcs, tgts)
        n_tokens = sum(len(t) - 1 for t in tgts)
        total_loss += loss * n_tokens
        total_tokens += n_tokens
    return total_loss / total_tokens


def train_tagger(model: TaggerModel, data: list[tuple[str, list[int]]], cfg: TrainConfig,
                 validation: list[tuple[str, list[int]]] | None = None,
                 ) -> tuple[TaggerModel, list[dict]]:
    """Per-character sigmoid regression to 0/1 junction tags."""
    if not data:
        raise EmptyDatasetError("train_tagger got no examples")
    for text, tags in data:
        if len(text) != len(tags):
            raise LengthMismatchError(
                f"tags length {len(tags)} != text length {len(text)} for {text!r}")

    vocab = model.vocab
    src_rows = [vocab.ids(text) for text, _ in data]
    tag_rows = [tags for _, tags in data]
    val_rows = None
    if validation:
        val_rows = ([vocab.ids(t) for t, _ in validation],
                    [tags for _, tags in validation])

    batches = _bucket_batches(len(data), [len(r) for r in src_rows], cfg.batch_size)
    caches = {name: np.zeros_like(arr) for name, arr in
              ((n, getattr(o, a)) for n, o, a in model.param_slots())}
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    history: list[dict] = []
    for epoch in range(cfg.epochs):
        total_loss, total_chars = 0.0, 0
        for bi in rng.permutation(len(batches)):
            batch = batches[bi]
            srcs = [src_rows[i] for i in batch]
            tags = [tag_rows[i] for i in batch]
            loss, grads = tagger_loss_and_grads(model, srcs, tags)
            n_chars = sum(len(r) for r in srcs)
            total_loss += loss * n_chars
            total_chars += n_chars
            _apply_updates(model, grads, caches, cfg)
        row = {"epoch": epoch + 1, "train_loss": total_loss / total_chars,
               "val_loss": None}
        if val_rows is not None:
            row["val_loss"] = _eval_tagger_loss(model, *val_rows, cfg.batch_size)
        history.append(row)
    return model, history


def _eval_tagger_loss(model, src_rows, tag_rows, batch_size) -> float:
    total_loss, total_chars = 0.0, 0
    batches = _bucket_batches(len(src_rows), [len(r) for r in src_rows], batch_size)
    for batch in batches:
        srcs = [src_rows[i] for i in batch]
        tags = [tag_rows[i] for i in batch]
        loss, _ = tagger_loss_and_grads(model, srcs, tags)
        n_chars = sum(len(r) for r in srcs)
        total_loss += loss * n_chars
        total_chars += n_chars
    return total_loss / total_chars
