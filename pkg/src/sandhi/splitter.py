"""Two-stage sandhi split: locate the junction window, then split it.

Stage 1 is a bidirectional tagger scoring each character's junction
membership; the predicted window is the fixed-width span (5 characters,
or the whole word when shorter) with the highest score sum, leftmost on
ties. Stage 2 decodes that window into the two word fragments, and the
unchanged flanks are glued back on.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import corpus
from .errors import (EmptyDatasetError, MalformedDecodeError, NoSeparatorError,
                     WordTooShortError)
from .nn import (Seq2SeqModel, TaggerModel, TrainConfig, greedy_decode, init_seq2seq,
                 init_tagger, tagger_scores, train_seq2seq, train_tagger)


def default_tagger_config(seed: int = 0) -> TrainConfig:
    return TrainConfig(hidden_size=64, batch_size=64, epochs=40, seed=seed)


def default_wsplitter_config(seed: int = 0) -> TrainConfig:
    return TrainConfig(hidden_size=128, batch_size=64, epochs=30, seed=seed)


@dataclass(frozen=True)
class WindowSpan:
    start: int
    length: int
    score: float


@dataclass(frozen=True)
class SplitResult:
    pw1: str
    pw2: str
    window: WindowSpan
    ps1: str
    ps2: str
    nw1: str
    nw2: str


def predict_window(tagger: TaggerModel, compound: str) -> WindowSpan:
    """Highest-sum contiguous span of width min(5, len); ties go leftmost."""
    if len(compound) < 2:
        raise WordTooShortError(f"{compound!r} is too short to split")
    scores = tagger_scores(tagger, compound)
    width = min(corpus.WINDOW_MAX, len(compound))
    start = corpus.max_sum_span(scores, width)
    return WindowSpan(start=start, length=width,
                      score=float(scores[start:start + width].sum()))


def split_window(model: Seq2SeqModel, window: str) -> tuple[str, str]:
    """Decode a window into its two word fragments (split at the first '+')."""
    core = greedy_decode(model, window)
    if not core:
        raise MalformedDecodeError(f"empty decode for window {window!r}")
    if "+" not in core:
        raise NoSeparatorError(f"decoded {core!r} has no separator")
    ps1, _, ps2 = core.partition("+")
    return ps1, ps2


def split(tagger: TaggerModel, wsplit: Seq2SeqModel, compound: str) -> SplitResult:
    span = predict_window(tagger, compound)
    window_text = compound[span.start:span.start + span.length]
    ps1, ps2 = split_window(wsplit, window_text)
    nw1 = compound[:span.start]
    nw2 = compound[span.start + span.length:]
    return SplitResult(pw1=nw1 + ps1, pw2=ps2 + nw2, window=span,
                       ps1=ps1, ps2=ps2, nw1=nw1, nw2=nw2)


def train_stage1(dataset: list[tuple[str, list[int]]],
                 cfg: TrainConfig | None = None,
                 validation: list[tuple[str, list[int]]] | None = None,
                 ) -> tuple[TaggerModel, list[dict]]:
    """Train the window tagger on (compound, 0/1 tags) examples."""
    if not dataset:
        raise EmptyDatasetError("train_stage1 got no examples")
    cfg = cfg or default_tagger_config()
    texts = [t for t, _ in dataset] + ([t for t, _ in validation] if validation else [])
    vocab = corpus.Vocabulary.build(texts)
    model = init_tagger(vocab, cfg)
    return train_tagger(model, dataset, cfg, validation)


def train_stage2(dataset: list[tuple[str, str]],
                 cfg: TrainConfig | None = None,
                 validation: list[tuple[str, str]] | None = None,
                 ) -> tuple[Seq2SeqModel, list[dict]]:
    """Train the window splitter on (window, '&ps1+ps2$') examples."""
    if not dataset:
        raise EmptyDatasetError("train_stage2 got no examples")
    cfg = cfg or default_wsplitter_config()
    texts = [s for pair in dataset for s in pair]
    if validation:
        texts += [s for pair in validation for s in pair]
    vocab = corpus.Vocabulary.build(texts)
    model = init_seq2seq(vocab, cfg)
    return train_seq2seq(model, dataset, cfg, validation)
