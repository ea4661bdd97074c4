import json
import struct
import zlib

import numpy as np
import pytest

from sandhi import corpus
from sandhi.errors import BadMagicError, ChecksumMismatchError, VersionMismatchError
from sandhi.nn import (TrainConfig, greedy_decode, init_seq2seq, init_tagger,
                       load_checkpoint, save_checkpoint, tagger_scores)


@pytest.fixture
def seq2seq_model():
    vocab = corpus.Vocabulary.build(["abcde"])
    cfg = TrainConfig(hidden_size=6, batch_size=4, epochs=1, seed=13)
    return init_seq2seq(vocab, cfg)


def random_inputs(count, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    chars = "abcde"
    return ["".join(rng.choice(list(chars), size=rng.integers(1, 8)))
            for _ in range(count)]


def test_round_trip_preserves_predictions(seq2seq_model, tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(seq2seq_model, path, "joiner")
    kind, loaded = load_checkpoint(path)
    assert kind == "joiner"
    for text in random_inputs(100):
        assert greedy_decode(loaded, text) == greedy_decode(seq2seq_model, text)


def test_round_trip_tagger(tmp_path):
    vocab = corpus.Vocabulary.build(["abcde"])
    cfg = TrainConfig(hidden_size=5, batch_size=4, epochs=1, seed=14)
    model = init_tagger(vocab, cfg)
    path = tmp_path / "tagger.ckpt"
    save_checkpoint(model, path, "tagger")
    kind, loaded = load_checkpoint(path)
    assert kind == "tagger"
    for text in random_inputs(20, seed=1):
        np.testing.assert_array_equal(tagger_scores(loaded, text),
                                      tagger_scores(model, text))


def test_truncated_file_rejected(seq2seq_model, tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(seq2seq_model, path, "joiner")
    data = path.read_bytes()
    path.write_bytes(data[:len(data) // 2])
    with pytest.raises(ChecksumMismatchError):
        load_checkpoint(path)


def test_flipped_byte_rejected(seq2seq_model, tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(seq2seq_model, path, "joiner")
    data = bytearray(path.read_bytes())
    data[len(data) // 2] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(ChecksumMismatchError):
        load_checkpoint(path)


def test_bad_magic_rejected(seq2seq_model, tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(seq2seq_model, path, "joiner")
    data = bytearray(path.read_bytes())
    data[:8] = b"NOTAMODL"
    path.write_bytes(bytes(data))
    with pytest.raises(BadMagicError):
        load_checkpoint(path)


def _rewrite_header(path, mutate):
    raw = bytearray(path.read_bytes())
    header_len = struct.unpack("<I", raw[8:12])[0]
    header = json.loads(raw[12:12 + header_len].decode("utf-8"))
    mutate(header)
    new_header = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    body = raw[:8] + struct.pack("<I", len(new_header)) + new_header + raw[12 + header_len:-4]
    body += struct.pack("<I", zlib.crc32(bytes(body)) & 0xFFFFFFFF)
    path.write_bytes(bytes(body))


def test_version_mismatch_rejected(seq2seq_model, tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(seq2seq_model, path, "joiner")
    _rewrite_header(path, lambda h: h.update(version=99))
    with pytest.raises(VersionMismatchError):
        load_checkpoint(path)


def test_header_vocab_order_defines_columns(seq2seq_model, tmp_path):
    # Permuting vocab tokens in the header without permuting the payload
    # must change predictions: the parameter columns are bound to the
    # header's token order.
    path = tmp_path / "model.ckpt"
    save_checkpoint(seq2seq_model, path, "joiner")

    def swap_tokens(header):
        header["vocab"][0], header["vocab"][1] = header["vocab"][1], header["vocab"][0]

    _rewrite_header(path, swap_tokens)
    _, permuted = load_checkpoint(path)
    inputs = random_inputs(20, seed=2)
    original_out = [greedy_decode(seq2seq_model, t) for t in inputs]
    permuted_out = [greedy_decode(permuted, t) for t in inputs]
    assert original_out != permuted_out
