import pytest
from hypothesis import given, strategies as st

from sandhi import corpus
from sandhi.corpus import FilterReason, SandhiTriple, StageKind
from sandhi.errors import EmptyDatasetError, WindowError

VIDYA = SandhiTriple("vidyA", "AlayaH", "vidyAlayaH")
SAMANYA = SandhiTriple("sAmAnyaDvaMsAn", "aNgIkArAt", "sAmAnyaDvaMsAnaNgIkArAt")


def test_parse_corpus(tmp_path):
    raw = tmp_path / "raw.tsv"
    raw.write_text("vidyA\tAlayaH\tvidyAlayaH\n\nfoo\tbar\n", encoding="utf-8")
    triples, diagnostics = corpus.parse_corpus(raw)
    assert triples == [VIDYA]
    assert [d.reason for d in diagnostics] == ["blank_line", "field_count"]


def test_parse_corpus_rejects_reserved_and_non_slp1(tmp_path):
    raw = tmp_path / "raw.tsv"
    raw.write_text("a+b\tcd\tef\nvidyA\tAlayaH\tvidyAlayaH\nxyσ\tab\tcd\n",
                   encoding="utf-8")
    triples, diagnostics = corpus.parse_corpus(raw)
    assert len(triples) == 1
    assert all(d.reason == "illegal_char" for d in diagnostics)
    assert len(diagnostics) == 2


def test_parse_corpus_flags_avagraha(tmp_path):
    raw = tmp_path / "raw.tsv"
    raw.write_text("so'yam\titi\tso'yamiti\n", encoding="utf-8")
    triples, diagnostics = corpus.parse_corpus(raw)
    assert len(triples) == 1  # retained, but flagged for review
    assert diagnostics[0].reason == "avagraha_flagged"


def test_parse_corpus_devanagari_mode(tmp_path):
    raw = tmp_path / "raw.tsv"
    raw.write_text("विद्या\tआलयः\tविद्यालयः\n", encoding="utf-8")
    triples, _ = corpus.parse_corpus(raw, devanagari=True)
    assert triples == [VIDYA]


def test_filter_length_relation_hand_counts():
    # N_c - (N_w1 + N_w2): 23 - (14+9) = 0 and 10 - (5+6) = -1
    assert corpus.filter_triple(SAMANYA).retained
    assert corpus.filter_triple(VIDYA).retained
    too_long = SandhiTriple("ab", "cd", "abXXcd")  # 6 - 4 = 2, just outside
    verdict = corpus.filter_triple(too_long)
    assert not verdict.retained
    assert verdict.reason is FilterReason.LENGTH_RELATION


def test_filter_retained_iff_ok():
    for t in (VIDYA, SAMANYA, SandhiTriple("ab", "cd", "abcdx")):
        verdict = corpus.filter_triple(t)
        assert verdict.retained == (verdict.reason is FilterReason.OK)


def test_annotate_window_examples():
    ann = corpus.annotate_window(VIDYA)
    assert (ann.n1, ann.n2, ann.window, ann.tw1, ann.tw2) == (3, 4, "yAl", "yA", "Al")
    ann = corpus.annotate_window(SAMANYA)
    assert (ann.n1, ann.n2, ann.window, ann.tw1, ann.tw2) == (12, 7, "AnaN", "An", "aN")


def test_annotate_window_mismatch():
    # suffix flank of cw does not match w2's tail
    with pytest.raises(WindowError) as err:
        corpus.annotate_window(SandhiTriple("ab", "cdef", "abcdeX"))
    assert err.value.reason == "window_mismatch"
    # prefix flank of cw does not match w1's head
    with pytest.raises(WindowError) as err:
        corpus.annotate_window(SandhiTriple("abcd", "ef", "aXcdef"))
    assert err.value.reason == "window_mismatch"


def test_annotate_window_flankless_words_cannot_mismatch():
    # with both words at 2 chars there is no flank to compare, so the whole
    # compound is the window; only the length bound can reject it
    ann = corpus.annotate_window(SandhiTriple("ab", "cd", "abcdx"))
    assert (ann.n1, ann.n2, ann.window) == (0, 0, "abcdx")
    with pytest.raises(WindowError) as err:
        corpus.annotate_window(SandhiTriple("ab", "cd", "abcdxy"))
    assert err.value.reason == "window_length"


def test_annotate_window_invariants():
    for t in (VIDYA, SAMANYA, SandhiTriple("rAma", "iti", "rAmeti")):
        ann = corpus.annotate_window(t)
        assert ann.n1 + len(ann.window) + ann.n2 == len(t.cw)
        assert t.cw[:ann.n1] == t.w1[:ann.n1]
        assert t.cw[len(t.cw) - ann.n2:] == t.w2[len(t.w2) - ann.n2:]
        assert ann.tw1 == t.w1[ann.n1:]
        assert ann.tw2 == t.w2[:len(t.w2) - ann.n2]
        assert len(ann.tw1) <= 2 and len(ann.tw2) <= 2
        assert 2 <= len(ann.window) <= 5


def test_split_dataset_rounding_arithmetic():
    split = corpus.split_dataset(list(range(81029)), seed=0)
    assert len(split.test) == 16206
    assert len(split.train) == 51858
    assert len(split.validation) == 12965


def test_split_dataset_deterministic():
    data = list(range(10))
    a = corpus.split_dataset(data, seed=7)
    b = corpus.split_dataset(data, seed=7)
    assert (a.train, a.validation, a.test) == (b.train, b.validation, b.test)


def test_split_dataset_is_partition():
    data = list(range(100))
    split = corpus.split_dataset(data, seed=3)
    combined = sorted(split.train + split.validation + split.test)
    assert combined == data


def test_split_dataset_small():
    split = corpus.split_dataset(list(range(5)), seed=1)
    assert (len(split.test), len(split.train), len(split.validation)) == (1, 3, 1)


def test_split_dataset_empty():
    with pytest.raises(EmptyDatasetError):
        corpus.split_dataset([], seed=0)


def test_build_vocabulary_order():
    vocab = corpus.Vocabulary.build(["ab", "bc"])
    assert vocab.tokens == ["a", "b", "c", "+", "&", "$", corpus.PAD_TOKEN]
    assert vocab.index["a"] == 0
    assert vocab.pad_index == len(vocab) - 1


def test_build_vocabulary_specials_once():
    vocab = corpus.Vocabulary.build(["a+b", "&ab$"])
    assert vocab.tokens.count("+") == 1
    assert vocab.tokens.count("&") == 1
    assert vocab.tokens.count("$") == 1


def test_vocabulary_ids_miss():
    from sandhi.errors import VocabMissError
    vocab = corpus.Vocabulary.build(["ab"])
    with pytest.raises(VocabMissError):
        vocab.ids("abz")


def test_stage_examples_joiner():
    # core = cw minus the reattachable prefix (w1[:-5]) and suffix (w2[2:])
    pairs = corpus.make_stage_examples(
        [(VIDYA, corpus.annotate_window(VIDYA))], StageKind.JOINER)
    assert pairs == [("vidyA+Al", "&vidyAl$")]
    pairs = corpus.make_stage_examples(
        [(SAMANYA, corpus.annotate_window(SAMANYA))], StageKind.JOINER)
    assert pairs == [("aMsAn+aN", "&aMsAnaN$")]


def test_stage_examples_tagger():
    (text, tags), = corpus.make_stage_examples(
        [(SAMANYA, corpus.annotate_window(SAMANYA))], StageKind.TAGGER)
    assert text == SAMANYA.cw
    assert len(tags) == len(text)
    assert [i for i, b in enumerate(tags) if b] == [12, 13, 14, 15]
    # single contiguous run of ones, as long as the window
    run = "".join(str(b) for b in tags).strip("0")
    assert set(run) == {"1"} and len(run) == 4


def test_stage_examples_window_splitter():
    (src, tgt), = corpus.make_stage_examples(
        [(VIDYA, corpus.annotate_window(VIDYA))], StageKind.WINDOW_SPLITTER)
    assert (src, tgt) == ("yAl", "&yA+Al$")


def test_max_sum_span_fixture():
    scores = [0.1, 0.2, 0.9, 0.8, 0.9, 0.7, 0.9, 0.1, 0.05]
    assert corpus.max_sum_span(scores, 5) == 2


def test_max_sum_span_leftmost_tie():
    assert corpus.max_sum_span([0.5] * 8, 5) == 0


@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=5, max_size=24),
       st.integers(min_value=1, max_value=5))
def test_max_sum_span_matches_brute_force(scores, width):
    got = corpus.max_sum_span(scores, width)
    best, best_sum = 0, sum(scores[:width])
    for start in range(1, len(scores) - width + 1):
        s = sum(scores[start:start + width])
        if s > best_sum + 1e-12:
            best, best_sum = start, s
    assert got == best


def test_gold_window_span_and_aligned_tags():
    t = SandhiTriple("rAma", "iti", "rAmeti")
    ann = corpus.annotate_window(t)
    start, width = corpus.gold_window_span(t, ann)
    assert width == 5
    # gold window is positions 2..4; leftmost covering 5-span starts at 0
    assert start == 0
    tags = corpus.aligned_tags(t, ann)
    assert tags == [1, 1, 1, 1, 1, 0]


def test_aligned_splitter_example_recovers_words():
    for t in (VIDYA, SAMANYA, SandhiTriple("tat", "upAsanIyam", "tadupAsanIyam")):
        ann = corpus.annotate_window(t)
        window, target = corpus.aligned_splitter_example(t, ann)
        start, width = corpus.gold_window_span(t, ann)
        assert window == t.cw[start:start + width]
        core = target[1:-1]
        ps1, _, ps2 = core.partition("+")
        assert t.cw[:start] + ps1 == t.w1
        assert ps2 + t.cw[start + width:] == t.w2
