"""Corpus handling: parsing, cleaning rules, sandhi-window annotation, datasets.

The corpus unit is a triple (w1, w2, cw): two input words and the compound
they fuse into. Cleaning keeps a triple only when the compound length is
within [-2, +1] of the summed word lengths and the junction region (the
sandhi-window) is 2..5 characters wide with byte-identical flanks on both
sides. Violations are almost always corpus errors, so they are discarded
with a reason rather than repaired.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import translit
from .errors import EmptyDatasetError, SandhiError, VocabMissError, WindowError

RESERVED = ("+", "&", "$")
PAD_TOKEN = "<pad>"

LENGTH_SLACK_MIN = -2
LENGTH_SLACK_MAX = 1
WINDOW_MIN = 2
WINDOW_MAX = 5

# Characters a junction keeps from each word: the last 2 of w1 and the
# first 2 of w2 are the only ones that may change under sandhi.
JUNCTION_CHARS = 2


@dataclass(frozen=True)
class SandhiTriple:
    w1: str
    w2: str
    cw: str


@dataclass(frozen=True)
class WindowAnnotation:
    """Gold sandhi-window of a compound.

    n1/n2 count the unchanged flank characters before/after the window;
    tw1/tw2 are the word fragments that actually participate in the
    junction (at most 2 characters each).
    """

    n1: int
    n2: int
    window: str
    tw1: str
    tw2: str


class FilterReason(enum.Enum):
    OK = "ok"
    LENGTH_RELATION = "length_relation"
    WINDOW_MISMATCH = "window_mismatch"
    WINDOW_LENGTH = "window_length"
    ILLEGAL_CHAR = "illegal_char"


@dataclass(frozen=True)
class FilterVerdict:
    retained: bool
    reason: FilterReason


@dataclass(frozen=True)
class Diagnostic:
    line: int
    reason: str
    detail: str


@dataclass
class DatasetSplit:
    train: list
    validation: list
    test: list
    seed: int

    def counts(self) -> dict[str, int]:
        return {
            "train": len(self.train),
            "validation": len(self.validation),
            "test": len(self.test),
        }


class StageKind(enum.Enum):
    JOINER = "joiner"
    TAGGER = "tagger"
    WINDOW_SPLITTER = "wsplitter"


def annotate_window(t: SandhiTriple) -> WindowAnnotation:
    """Mark the sandhi-window of a triple.

    The flanks are fixed, not searched: everything except the last 2
    characters of w1 and the first 2 of w2 must appear verbatim in the
    compound. Raises WindowError when the flanks differ (a corpus error)
    or the window width falls outside 2..5.
    """
    n1 = max(0, len(t.w1) - JUNCTION_CHARS)
    n2 = max(0, len(t.w2) - JUNCTION_CHARS)
    if n1 + n2 > len(t.cw):
        raise WindowError(FilterReason.WINDOW_LENGTH.value,
                          f"flanks ({n1}+{n2}) exceed compound length {len(t.cw)}")
    if t.cw[:n1] != t.w1[:n1]:
        raise WindowError(FilterReason.WINDOW_MISMATCH.value,
                          f"prefix {t.cw[:n1]!r} != {t.w1[:n1]!r}")
    if n2 and t.cw[len(t.cw) - n2:] != t.w2[len(t.w2) - n2:]:
        raise WindowError(FilterReason.WINDOW_MISMATCH.value,
                          f"suffix {t.cw[len(t.cw) - n2:]!r} != {t.w2[len(t.w2) - n2:]!r}")
    window = t.cw[n1:len(t.cw) - n2]
    if not WINDOW_MIN <= len(window) <= WINDOW_MAX:
        raise WindowError(FilterReason.WINDOW_LENGTH.value,
                          f"window {window!r} has length {len(window)}")
    return WindowAnnotation(
        n1=n1,
        n2=n2,
        window=window,
        tw1=t.w1[n1:],
        tw2=t.w2[:len(t.w2) - n2],
    )


def filter_triple(t: SandhiTriple) -> FilterVerdict:
    """Apply the cleaning rules; the verdict encodes why a triple was dropped."""
    for word in (t.w1, t.w2, t.cw):
        if not word or not translit.is_slp1(word):
            return FilterVerdict(False, FilterReason.ILLEGAL_CHAR)
    nc, nw = len(t.cw), len(t.w1) + len(t.w2)
    if not LENGTH_SLACK_MIN <= nc - nw <= LENGTH_SLACK_MAX:
        return FilterVerdict(False, FilterReason.LENGTH_RELATION)
    try:
        annotate_window(t)
    except WindowError as err:
        return FilterVerdict(False, FilterReason(err.reason))
    return FilterVerdict(True, FilterReason.OK)


def parse_corpus(path: str | Path, devanagari: bool = False,
                 ) -> tuple[list[SandhiTriple], list[Diagnostic]]:
    """Read a 3-field TSV of (w1, w2, cw). Malformed lines become diagnostics.

    With devanagari=True each field is transliterated to SLP1 first.
    """
    triples: list[SandhiTriple] = []
    diagnostics: list[Diagnostic] = []
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as err:
        raise SandhiError(f"{path}: not valid UTF-8 ({err})") from err

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            diagnostics.append(Diagnostic(lineno, "blank_line", ""))
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            diagnostics.append(Diagnostic(lineno, "field_count",
                                          f"{len(fields)} fields"))
            continue
        if devanagari:
            try:
                fields = [translit.devanagari_to_slp1(f) for f in fields]
            except SandhiError as err:
                diagnostics.append(Diagnostic(lineno, "illegal_char", str(err)))
                continue
        bad = next((f for f in fields
                    if not f or any(c in RESERVED for c in f) or not translit.is_slp1(f)),
                   None)
        if bad is not None:
            diagnostics.append(Diagnostic(lineno, "illegal_char", bad))
            continue
        if any(translit.AVAGRAHA in f for f in fields):
            # Avagraha handling in source corpora is inconsistent; keep the
            # triple but flag it for manual review.
            diagnostics.append(Diagnostic(lineno, "avagraha_flagged", line))
        triples.append(SandhiTriple(*fields))
    return triples, diagnostics


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def split_dataset(examples: Sequence, seed: int,
                  test_frac: float = 0.2, val_frac: float = 0.2) -> DatasetSplit:
    """Shuffle and partition into test / validation / train.

    The test share is carved off the whole set, validation off the
    remainder; both sizes round half-up and train takes what is left.
    """
    if not examples:
        raise EmptyDatasetError("cannot split an empty dataset")
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(len(examples))
    shuffled = [examples[i] for i in order]
    n_test = _round_half_up(len(shuffled) * test_frac)
    rest = shuffled[n_test:]
    n_val = _round_half_up(len(rest) * val_frac)
    return DatasetSplit(
        train=rest[n_val:],
        validation=rest[:n_val],
        test=shuffled[:n_test],
        seed=seed,
    )


class Vocabulary:
    """Character dictionary shared by a model's inputs and outputs.

    Token order is the serialization order: corpus characters sorted
    lexicographically, then the separator/start/end specials, then PAD.
    """

    SPECIALS = RESERVED  # '+', '&', '$'

    def __init__(self, tokens: Sequence[str]):
        self.tokens = list(tokens)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise SandhiError("vocabulary tokens are not distinct")
        self.pad_index = self.index[PAD_TOKEN]

    @classmethod
    def build(cls, examples: Iterable[str]) -> "Vocabulary":
        chars: set[str] = set()
        for text in examples:
            chars.update(text)
        chars -= set(cls.SPECIALS)
        chars.discard(PAD_TOKEN)
        tokens = sorted(chars) + list(cls.SPECIALS) + [PAD_TOKEN]
        return cls(tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def ids(self, text: str) -> list[int]:
        try:
            return [self.index[c] for c in text]
        except KeyError as err:
            raise VocabMissError(err.args[0]) from err


def max_sum_span(scores: Sequence[float], width: int) -> int:
    """Start of the contiguous span of `width` maximizing the score sum.

    Ties break leftmost. This single routine defines the window convention
    for tagger inference, for the gold spans it is scored against, and for
    the stage-2 training windows, so the three can never drift apart.
    """
    values = np.asarray(scores, dtype=np.float64)
    if width <= 0 or width > len(values):
        raise ValueError(f"span width {width} invalid for {len(values)} scores")
    best_start, best_sum = 0, float(values[:width].sum())
    running = best_sum
    for start in range(1, len(values) - width + 1):
        running += float(values[start + width - 1]) - float(values[start - 1])
        if running > best_sum + 1e-12:
            best_start, best_sum = start, running
    return best_start


def gold_tags(t: SandhiTriple, ann: WindowAnnotation) -> list[int]:
    """Per-character 0/1 target for the tagger: ones exactly on the window."""
    tags = [0] * len(t.cw)
    for i in range(ann.n1, ann.n1 + len(ann.window)):
        tags[i] = 1
    return tags


def gold_window_span(t: SandhiTriple, ann: WindowAnnotation) -> tuple[int, int]:
    """Gold fixed-width span: the inference selector applied to gold tags."""
    width = min(WINDOW_MAX, len(t.cw))
    return max_sum_span(gold_tags(t, ann), width), width


def aligned_tags(t: SandhiTriple, ann: WindowAnnotation) -> list[int]:
    """Fixed-width 0/1 tagger target: ones on the canonical inference span.

    Training on the variable-width window leaves every covering span tied
    at inference, so span selection would hinge on score noise; padding
    the ones out to the span the selector must return makes the
    convention itself learnable.
    """
    start, width = gold_window_span(t, ann)
    tags = [0] * len(t.cw)
    for i in range(start, start + width):
        tags[i] = 1
    return tags


def aligned_splitter_example(t: SandhiTriple, ann: WindowAnnotation) -> tuple[str, str]:
    """Stage-2 training pair on the fixed-width window the tagger will emit.

    The window may spill over the gold junction into the flanks, so the
    targets are the word fragments actually overlapping the span rather
    than the 2-character junction fragments.
    """
    start, width = gold_window_span(t, ann)
    window = t.cw[start:start + width]
    trailing = len(t.cw) - start - width
    ps1 = t.w1[start:]
    ps2 = t.w2[:len(t.w2) - trailing]
    return window, "&" + ps1 + "+" + ps2 + "$"


def joiner_example(t: SandhiTriple, n: int = 5, m: int = 2) -> tuple[str, str]:
    """Training pair for sandhi generation on truncated words."""
    prefix_len = max(0, len(t.w1) - n)
    suffix_len = max(0, len(t.w2) - m)
    t1 = t.w1[prefix_len:]
    t2 = t.w2[:len(t.w2) - suffix_len]
    core = t.cw[prefix_len:len(t.cw) - suffix_len]
    return t1 + "+" + t2, "&" + core + "$"


def make_stage_examples(annotated: Sequence[tuple[SandhiTriple, WindowAnnotation]],
                        kind: StageKind, n: int = 5, m: int = 2) -> list:
    """Derive per-model training examples from annotated triples."""
    if kind is StageKind.JOINER:
        return [joiner_example(t, n, m) for t, _ in annotated]
    if kind is StageKind.TAGGER:
        return [(t.cw, gold_tags(t, ann)) for t, ann in annotated]
    if kind is StageKind.WINDOW_SPLITTER:
        return [(ann.window, "&" + ann.tw1 + "+" + ann.tw2 + "$")
                for _, ann in annotated]
    raise ValueError(kind)


def annotate_retained(triples: Iterable[SandhiTriple],
                      ) -> tuple[list[tuple[SandhiTriple, WindowAnnotation]],
                                 dict[str, int]]:
    """Filter triples and annotate the survivors; returns a discard histogram."""
    kept: list[tuple[SandhiTriple, WindowAnnotation]] = []
    histogram: dict[str, int] = {}
    for t in triples:
        verdict = filter_triple(t)
        if verdict.retained:
            kept.append((t, annotate_window(t)))
        else:
            histogram[verdict.reason.value] = histogram.get(verdict.reason.value, 0) + 1
    return kept, histogram


def write_triples_tsv(path: str | Path, triples: Iterable[SandhiTriple]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in triples:
            fh.write(f"{t.w1}\t{t.w2}\t{t.cw}\n")


def write_pairs_tsv(path: str | Path, pairs: Iterable[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for src, tgt in pairs:
            fh.write(f"{src}\t{tgt}\n")


def read_pairs_tsv(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line:
            src, tgt = line.split("\t")
            pairs.append((src, tgt))
    return pairs


def write_tagger_tsv(path: str | Path, examples: Iterable[tuple[str, list[int]]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for text, tags in examples:
            fh.write(f"{text}\t{''.join(str(b) for b in tags)}\n")


def read_tagger_tsv(path: str | Path) -> list[tuple[str, list[int]]]:
    examples = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line:
            text, tags = line.split("\t")
            examples.append((text, [int(c) for c in tags]))
    return examples


def write_manifest(path: str | Path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
