"""Transliteration between Devanagari, ITRANS and SLP1, plus phoneme classification.

SLP1 is the internal representation everywhere in this package: one ASCII
character per phoneme, which makes character-level models and window
arithmetic trivial. The full correspondence tables are embedded below;
unknown characters are hard errors so that corpus noise surfaces loudly
instead of silently corrupting training data.
"""

from __future__ import annotations

import enum

from .errors import EmptyWordError, UnknownCodePointError, UnknownTokenError

SLP1_VOWELS = "aAiIuUfFxXeEoO"
SLP1_CONSONANTS = "kKgGNcCjJYwWqQRtTdDnpPbBmyrlvSzsh"
ANUSVARA = "M"
VISARGA = "H"
AVAGRAHA = "'"

SLP1_INVENTORY = frozenset(SLP1_VOWELS + SLP1_CONSONANTS + ANUSVARA + VISARGA + AVAGRAHA)

# Characters that may ride along inside corpus files without being phonemes.
_PASSTHROUGH = frozenset(" \t\n+.,;!?-")

_DEVA_INDEPENDENT_VOWELS = "अआइईउऊऋॠऌॡएऐओऔ"
_DEVA_MATRAS = "ािीुूृॄॢॣेैोौ"  # dependent signs for A..O ('a' is inherent)
_DEVA_CONSONANTS = "कखगघङचछजझञटठडढणतथदधनपफबभमयरलवशषसह"
_DEVA_VIRAMA = "्"
_DEVA_ANUSVARA = "ं"
_DEVA_VISARGA = "ः"
_DEVA_AVAGRAHA = "ऽ"

_VOWEL_FROM_DEVA = dict(zip(_DEVA_INDEPENDENT_VOWELS, SLP1_VOWELS))
_VOWEL_FROM_MATRA = dict(zip(_DEVA_MATRAS, SLP1_VOWELS[1:]))  # matras start at A
_CONSONANT_FROM_DEVA = dict(zip(_DEVA_CONSONANTS, SLP1_CONSONANTS))

_DEVA_FROM_VOWEL = {v: k for k, v in _VOWEL_FROM_DEVA.items()}
_MATRA_FROM_VOWEL = {v: k for k, v in _VOWEL_FROM_MATRA.items()}
_DEVA_FROM_CONSONANT = {v: k for k, v in _CONSONANT_FROM_DEVA.items()}

# ITRANS -> SLP1, matched greedily longest-first. Synonyms listed explicitly.
_ITRANS_TO_SLP1 = {
    "a": "a", "aa": "A", "A": "A", "i": "i", "ii": "I", "I": "I",
    "u": "u", "uu": "U", "U": "U",
    "RRi": "f", "R^i": "f", "RRI": "F", "R^I": "F",
    "LLi": "x", "L^i": "x", "LLI": "X", "L^I": "X",
    "e": "e", "ai": "E", "o": "o", "au": "O",
    "k": "k", "kh": "K", "g": "g", "gh": "G", "~N": "N", "N^": "N",
    "ch": "c", "Ch": "C", "chh": "C", "j": "j", "jh": "J", "~n": "Y", "JN": "Y",
    "T": "w", "Th": "W", "D": "q", "Dh": "Q", "N": "R",
    "t": "t", "th": "T", "d": "d", "dh": "D", "n": "n",
    "p": "p", "ph": "P", "b": "b", "bh": "B", "m": "m",
    "y": "y", "r": "r", "l": "l", "v": "v", "w": "v",
    "sh": "S", "Sh": "z", "shh": "z", "s": "s", "h": "h",
    "M": "M", ".m": "M", ".n": "M", "H": "H", ".a": "'",
}
_ITRANS_MAX_TOKEN = max(len(t) for t in _ITRANS_TO_SLP1)


class PhonemeClass(enum.Enum):
    VOWEL = "vowel"
    CONSONANT = "consonant"
    VISARGA = "visarga"
    ANUSVARA = "anusvara"
    OTHER = "other"


class SandhiType(enum.Enum):
    SWARA = "swara"
    VYANJANA = "vyanjana"
    VISARGA = "visarga"


def is_slp1(text: str) -> bool:
    """True if every character is an SLP1 phoneme symbol."""
    return all(c in SLP1_INVENTORY for c in text)


def validate_slp1(text: str) -> str:
    for pos, c in enumerate(text):
        if c not in SLP1_INVENTORY:
            raise UnknownTokenError(c, pos)
    return text


def classify_phoneme(c: str) -> PhonemeClass:
    if c in SLP1_VOWELS:
        return PhonemeClass.VOWEL
    if c in SLP1_CONSONANTS:
        return PhonemeClass.CONSONANT
    if c == VISARGA:
        return PhonemeClass.VISARGA
    if c == ANUSVARA:
        return PhonemeClass.ANUSVARA
    if c == AVAGRAHA:
        return PhonemeClass.OTHER
    raise UnknownTokenError(c, 0)


def classify_sandhi_type(w1: str, w2: str) -> SandhiType:
    """Classify the junction of two SLP1 words.

    Precedence is fixed: visarga-final first words always classify as
    visarga sandhi, then vowel+vowel pairs as swara, everything else as
    vyanjana.
    """
    if not w1 or not w2:
        raise EmptyWordError("classify_sandhi_type requires nonempty words")
    last, first = w1[-1], w2[0]
    if last == VISARGA:
        return SandhiType.VISARGA
    if last in SLP1_VOWELS and first in SLP1_VOWELS:
        return SandhiType.SWARA
    return SandhiType.VYANJANA


def devanagari_to_slp1(text: str) -> str:
    """Convert Devanagari text to SLP1, one output character per phoneme.

    Consonants carry the inherent 'a' unless followed by a vowel sign or
    virama. Whitespace and corpus punctuation pass through unchanged.
    """
    out: list[str] = []
    pending_a = False  # a consonant was emitted and its inherent vowel is still open

    def flush() -> None:
        nonlocal pending_a
        if pending_a:
            out.append("a")
            pending_a = False

    for pos, c in enumerate(text):
        if c in _CONSONANT_FROM_DEVA:
            flush()
            out.append(_CONSONANT_FROM_DEVA[c])
            pending_a = True
        elif c in _VOWEL_FROM_MATRA:
            if not pending_a:
                raise UnknownCodePointError(c, pos)
            out.append(_VOWEL_FROM_MATRA[c])
            pending_a = False
        elif c == _DEVA_VIRAMA:
            if not pending_a:
                raise UnknownCodePointError(c, pos)
            pending_a = False
        elif c in _VOWEL_FROM_DEVA:
            flush()
            out.append(_VOWEL_FROM_DEVA[c])
        elif c == _DEVA_ANUSVARA:
            flush()
            out.append(ANUSVARA)
        elif c == _DEVA_VISARGA:
            flush()
            out.append(VISARGA)
        elif c == _DEVA_AVAGRAHA:
            flush()
            out.append(AVAGRAHA)
        elif c in _PASSTHROUGH:
            flush()
            out.append(c)
        else:
            raise UnknownCodePointError(c, pos)
    flush()
    return "".join(out)


def slp1_to_devanagari(text: str) -> str:
    """Render SLP1 back to Devanagari; inverse of devanagari_to_slp1 on its image."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in _DEVA_FROM_CONSONANT:
            out.append(_DEVA_FROM_CONSONANT[c])
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt == "a":
                i += 2  # inherent vowel, no sign
                continue
            if nxt and nxt in _MATRA_FROM_VOWEL:
                out.append(_MATRA_FROM_VOWEL[nxt])
                i += 2
                continue
            out.append(_DEVA_VIRAMA)
            i += 1
        elif c in _DEVA_FROM_VOWEL:
            out.append(_DEVA_FROM_VOWEL[c])
            i += 1
        elif c == ANUSVARA:
            out.append(_DEVA_ANUSVARA)
            i += 1
        elif c == VISARGA:
            out.append(_DEVA_VISARGA)
            i += 1
        elif c == AVAGRAHA:
            out.append(_DEVA_AVAGRAHA)
            i += 1
        elif c in _PASSTHROUGH:
            out.append(c)
            i += 1
        else:
            raise UnknownTokenError(c, i)
    return "".join(out)


def itrans_to_slp1(text: str) -> str:
    """Convert ITRANS romanization to SLP1 with greedy longest-match tokenization."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] in _PASSTHROUGH:
            out.append(text[i])
            i += 1
            continue
        for width in range(min(_ITRANS_MAX_TOKEN, n - i), 0, -1):
            token = text[i:i + width]
            if token in _ITRANS_TO_SLP1:
                out.append(_ITRANS_TO_SLP1[token])
                i += width
                break
        else:
            raise UnknownTokenError(text[i], i)
    return "".join(out)
