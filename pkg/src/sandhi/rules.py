"""Deterministic rule-based sandhi engine and synthetic corpus generation.

A small curated subset of classical external sandhi rules, each an
unambiguous rewrite of the junction (last phoneme of w1, first phoneme of
w2). The subset deliberately trades coverage for determinism: it exists to
manufacture ground-truth corpora and to verify the learned models, not to
be a complete grammar. All three sandhi classes (vowel, consonant,
visarga) are represented.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .corpus import SandhiTriple, WindowAnnotation, filter_triple
from .errors import EmptyWordError, InsufficientCoverageError, SandhiError, WindowError
from .translit import SLP1_VOWELS, validate_slp1

VOICED_CONSONANTS = set("gGNjJYqQRdDnbBmyrlvh")
# H before r degeminates classically; the curated subset leaves it uncovered.
_VISARGA_RIGHT = (VOICED_CONSONANTS - {"r"}) | set(SLP1_VOWELS)

_A = set("aA")
_I = set("iI")
_U = set("uU")


class NoRuleError(SandhiError):
    """The word pair is outside the curated rule subset."""


@dataclass(frozen=True)
class SandhiRule:
    id: str
    left: Callable[[str], bool]     # predicate on the final phoneme of w1
    right: Callable[[str], bool]    # predicate on the initial phoneme of w2
    rewrite: Callable[[str, str], str]


def _consonant_voicing(tail: str, head: str) -> str:
    # k assimilates to g; a following h additionally becomes its voiced
    # aspirate, as in vAk + hari -> vAgGari.
    if head == "h":
        return "gG"
    return "g" + head


RULES: tuple[SandhiRule, ...] = (
    SandhiRule("visarga_r",
               lambda t: t == "H",
               lambda h: h in _VISARGA_RIGHT,
               lambda t, h: "r" + h),
    SandhiRule("savarna_a",
               lambda t: t in _A, lambda h: h in _A,
               lambda t, h: "A"),
    SandhiRule("savarna_i",
               lambda t: t in _I, lambda h: h in _I,
               lambda t, h: "I"),
    SandhiRule("savarna_u",
               lambda t: t in _U, lambda h: h in _U,
               lambda t, h: "U"),
    SandhiRule("guna_e",
               lambda t: t in _A, lambda h: h in _I,
               lambda t, h: "e"),
    SandhiRule("guna_o",
               lambda t: t in _A, lambda h: h in _U,
               lambda t, h: "o"),
    SandhiRule("vriddhi_ai",
               lambda t: t in _A, lambda h: h in set("eE"),
               lambda t, h: "E"),
    SandhiRule("vriddhi_au",
               lambda t: t in _A, lambda h: h in set("oO"),
               lambda t, h: "O"),
    SandhiRule("yan_y",
               lambda t: t in _I,
               lambda h: h in set(SLP1_VOWELS) - _I,
               lambda t, h: "y" + h),
    SandhiRule("yan_v",
               lambda t: t in _U,
               lambda h: h in set(SLP1_VOWELS) - _U,
               lambda t, h: "v" + h),
    SandhiRule("k_voicing",
               lambda t: t == "k",
               lambda h: h in VOICED_CONSONANTS,
               _consonant_voicing),
)


def find_rule(w1: str, w2: str) -> SandhiRule | None:
    if not w1 or not w2:
        raise EmptyWordError("apply_rules requires nonempty words")
    tail, head = w1[-1], w2[0]
    for rule in RULES:
        if rule.left(tail) and rule.right(head):
            return rule
    return None


def apply_rules(w1: str, w2: str) -> str:
    """Join two SLP1 words with the first matching rule; NoRuleError otherwise."""
    rule = find_rule(w1, w2)
    if rule is None:
        raise NoRuleError(f"no rule covers {w1!r} + {w2!r}")
    return w1[:-1] + rule.rewrite(w1[-1], w2[0]) + w2[1:]


@dataclass(frozen=True)
class Lexicon:
    words: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if not self.words:
            raise SandhiError("lexicon is empty")
        for w in self.words:
            validate_slp1(w)


def load_lexicon(path: str | Path | None = None) -> Lexicon:
    """Load a lexicon file: one SLP1 word per line, optional tab-separated weight.

    Without a path, the bundled demo lexicon ships with the package.
    """
    if path is None:
        text = resources.files("sandhi.data").joinpath("lexicon.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    words: list[str] = []
    weights: list[float] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        words.append(parts[0])
        weights.append(float(parts[1]) if len(parts) > 1 else 1.0)
    return Lexicon(tuple(words), tuple(weights))


def generate_synthetic(lex: Lexicon, count: int, seed: int) -> list[SandhiTriple]:
    """Sample distinct word pairs and join them with the rule engine.

    Pairs outside the rule subset are skipped; every emitted triple passes
    the corpus filter by construction (re-checked anyway). Deterministic
    for a fixed seed.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    p = np.asarray(lex.weights, dtype=np.float64)
    p = p / p.sum()
    seen: set[tuple[str, str]] = set()
    out: list[SandhiTriple] = []
    budget = max(200 * count, 10_000)
    for _ in range(budget):
        if len(out) >= count:
            break
        i, j = rng.choice(len(lex.words), size=2, p=p)
        pair = (lex.words[i], lex.words[j])
        if pair in seen:
            continue
        seen.add(pair)
        rule = find_rule(*pair)
        if rule is None:
            continue
        triple = SandhiTriple(pair[0], pair[1], apply_rules(*pair))
        if not filter_triple(triple).retained:
            continue
        out.append(triple)
    if len(out) < count:
        raise InsufficientCoverageError(
            f"generated {len(out)}/{count} triples within the attempt budget")
    return out


def brute_force_window(t: SandhiTriple) -> WindowAnnotation:
    """Independent re-derivation of the sandhi-window by per-character comparison.

    Exists purely to cross-check corpus.annotate_window; shares its error
    taxonomy but none of its code.
    """
    n1 = len(t.w1) - 2 if len(t.w1) > 2 else 0
    n2 = len(t.w2) - 2 if len(t.w2) > 2 else 0
    if n1 + n2 > len(t.cw):
        raise WindowError("window_length",
                          f"flanks ({n1}+{n2}) exceed compound length {len(t.cw)}")
    for i in range(n1):
        if t.cw[i] != t.w1[i]:
            raise WindowError("window_mismatch",
                              f"prefix differs at {i}: {t.cw[i]!r} != {t.w1[i]!r}")
    for j in range(n2):
        if t.cw[len(t.cw) - 1 - j] != t.w2[len(t.w2) - 1 - j]:
            raise WindowError("window_mismatch",
                              f"suffix differs at -{j + 1}")
    window_chars = [t.cw[i] for i in range(n1, len(t.cw) - n2)]
    if not 2 <= len(window_chars) <= 5:
        raise WindowError("window_length", f"window length {len(window_chars)}")
    tw1 = "".join(t.w1[i] for i in range(n1, len(t.w1)))
    tw2 = "".join(t.w2[i] for i in range(0, len(t.w2) - n2))
    return WindowAnnotation(n1=n1, n2=n2, window="".join(window_chars),
                            tw1=tw1, tw2=tw2)
