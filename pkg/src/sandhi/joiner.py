"""Sandhi generation: truncate the word pair, run the seq2seq, reattach flanks.

Long words defeat a small encoder, but sandhi only ever rewrites the
junction, so the model sees just the last n characters of the first word
and the first m of the second (n=5, m=2 by default). The untouched
prefix/suffix are glued back on around the decoded junction core.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import corpus
from .errors import EmptyDatasetError, EmptyWordError, MalformedDecodeError
from .nn import Seq2SeqModel, TrainConfig, greedy_decode, init_seq2seq, train_seq2seq

FULL_WORD = 10 ** 9  # sentinel for the no-truncation baseline


def default_train_config(seed: int = 0) -> TrainConfig:
    return TrainConfig(hidden_size=16, batch_size=64, epochs=100, seed=seed)


@dataclass(frozen=True)
class JoinerConfig:
    n: int = 5
    m: int = 2
    train: TrainConfig = field(default_factory=default_train_config)

    def __post_init__(self):
        if self.n < 2 or self.m < 1:
            raise ValueError("need n >= 2 and m >= 1 to cover the junction")


@dataclass(frozen=True)
class TruncationPlan:
    prefix: str  # w1 minus its last n chars
    t1: str      # last min(n, |w1|) chars of w1
    t2: str      # first min(m, |w2|) chars of w2
    suffix: str  # w2 minus its first m chars


def truncate_pair(w1: str, w2: str, cfg: JoinerConfig = JoinerConfig()) -> TruncationPlan:
    if not w1 or not w2:
        raise EmptyWordError("truncate_pair requires nonempty words")
    cut1 = max(0, len(w1) - cfg.n)
    cut2 = min(cfg.m, len(w2))
    return TruncationPlan(prefix=w1[:cut1], t1=w1[cut1:], t2=w2[:cut2], suffix=w2[cut2:])


def join(model: Seq2SeqModel, w1: str, w2: str,
         cfg: JoinerConfig = JoinerConfig()) -> str:
    """Join two SLP1 words with a trained model."""
    plan = truncate_pair(w1, w2, cfg)
    core = greedy_decode(model, plan.t1 + "+" + plan.t2)
    if not core:
        raise MalformedDecodeError(f"empty junction core for {w1!r} + {w2!r}")
    if "+" in core:
        raise MalformedDecodeError(f"separator leaked into junction core {core!r}")
    return plan.prefix + core + plan.suffix


def train_joiner(dataset: list[corpus.SandhiTriple], cfg: JoinerConfig = JoinerConfig(),
                 validation: list[corpus.SandhiTriple] | None = None,
                 ) -> tuple[Seq2SeqModel, list[dict]]:
    """Train on (truncated pair -> junction core) examples from filtered triples."""
    if not dataset:
        raise EmptyDatasetError("train_joiner got no triples")
    examples = [corpus.joiner_example(t, cfg.n, cfg.m) for t in dataset]
    val_examples = None
    if validation:
        val_examples = [corpus.joiner_example(t, cfg.n, cfg.m) for t in validation]
    texts = [s for pair in examples for s in pair]
    if val_examples:
        texts += [s for pair in val_examples for s in pair]
    vocab = corpus.Vocabulary.build(texts)
    model = init_seq2seq(vocab, cfg.train)
    return train_seq2seq(model, examples, cfg.train, val_examples)
