"""Sanskrit sandhi generation and splitting.

Library + CLI around three character-level recurrent models: a seq2seq
joiner over truncated word pairs, a bidirectional window tagger, and a
seq2seq window splitter, plus the transliteration codecs, corpus
pipeline and rule oracle they depend on.
"""

from .corpus import SandhiTriple, Vocabulary, WindowAnnotation, annotate_window, filter_triple
from .errors import SandhiError
from .joiner import JoinerConfig, join, train_joiner, truncate_pair
from .rules import apply_rules, generate_synthetic, load_lexicon
from .splitter import SplitResult, predict_window, split, split_window, train_stage1, train_stage2
from .translit import (SandhiType, classify_sandhi_type, devanagari_to_slp1,
                       itrans_to_slp1, slp1_to_devanagari)

__version__ = "0.1.0"

__all__ = [
    "JoinerConfig", "SandhiError", "SandhiTriple", "SandhiType", "SplitResult",
    "Vocabulary", "WindowAnnotation", "annotate_window", "apply_rules",
    "classify_sandhi_type", "devanagari_to_slp1", "filter_triple",
    "generate_synthetic", "itrans_to_slp1", "join", "load_lexicon",
    "predict_window", "slp1_to_devanagari", "split", "split_window",
    "train_joiner", "train_stage1", "train_stage2", "truncate_pair",
    "__version__",
]
