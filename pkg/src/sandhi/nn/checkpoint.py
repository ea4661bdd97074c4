"""Versioned binary serialization for trained models.

Layout: magic "SKTSNDH1", u32 little-endian header length, UTF-8 JSON
header (kind, dims, vocabulary tokens in index order, training config),
then every parameter as little-endian float32 in a fixed layer order
(encoder-fwd W,U,b; encoder-bwd W,U,b; bridge or head W,b; decoder W,U,b;
output W,b - gates stacked i,f,c,o; matrices row-major), and a trailing
CRC32 over everything before it.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from ..corpus import Vocabulary
from ..errors import (BadMagicError, ChecksumMismatchError, CheckpointError,
                      VersionMismatchError)
from .layers import DenseParams, LstmParams
from .models import Seq2SeqModel, TaggerModel, TrainConfig

MAGIC = b"SKTSNDH1"
VERSION = 1

SEQ2SEQ_KINDS = ("joiner", "wsplitter")
TAGGER_KIND = "tagger"


def save_checkpoint(model, path: str | Path, kind: str) -> None:
    if kind in SEQ2SEQ_KINDS and not isinstance(model, Seq2SeqModel):
        raise CheckpointError(f"kind {kind!r} requires a Seq2SeqModel")
    if kind == TAGGER_KIND and not isinstance(model, TaggerModel):
        raise CheckpointError(f"kind {kind!r} requires a TaggerModel")
    if kind not in SEQ2SEQ_KINDS + (TAGGER_KIND,):
        raise CheckpointError(f"unknown checkpoint kind {kind!r}")

    header = {
        "version": VERSION,
        "kind": kind,
        "dims": {"hidden": model.config.hidden_size, "vocab_size": len(model.vocab)},
        "vocab": model.vocab.tokens,
        "config": model.config.to_dict(),
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")

    body = bytearray()
    body += MAGIC
    body += struct.pack("<I", len(header_bytes))
    body += header_bytes
    for _, obj, attr in model.param_slots():
        body += np.ascontiguousarray(getattr(obj, attr), dtype="<f4").tobytes()
    body += struct.pack("<I", zlib.crc32(bytes(body)) & 0xFFFFFFFF)
    Path(path).write_bytes(bytes(body))


def _take(buf: memoryview, offset: int, shape: tuple[int, ...]) -> tuple[np.ndarray, int]:
    n = int(np.prod(shape))
    end = offset + 4 * n
    if end > len(buf):
        raise CheckpointError("payload shorter than the declared dimensions")
    arr = np.frombuffer(buf[offset:end], dtype="<f4").reshape(shape).copy()
    return arr, end


def load_checkpoint(path: str | Path):
    """Load a checkpoint; returns (kind, model)."""
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 8:
        raise ChecksumMismatchError("file too short to be a checkpoint")
    if raw[:len(MAGIC)] != MAGIC:
        raise BadMagicError(f"bad magic {raw[:len(MAGIC)]!r}")
    stored_crc = struct.unpack("<I", raw[-4:])[0]
    actual_crc = zlib.crc32(raw[:-4]) & 0xFFFFFFFF
    if stored_crc != actual_crc:
        raise ChecksumMismatchError(
            f"CRC mismatch: stored {stored_crc:#010x}, computed {actual_crc:#010x}")

    header_len = struct.unpack("<I", raw[8:12])[0]
    try:
        header = json.loads(raw[12:12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise CheckpointError(f"unreadable header: {err}") from err
    if header.get("version") != VERSION:
        raise VersionMismatchError(
            f"checkpoint version {header.get('version')} != supported {VERSION}")
    kind = header["kind"]
    if kind not in SEQ2SEQ_KINDS + (TAGGER_KIND,):
        raise CheckpointError(f"unknown checkpoint kind {kind!r}")

    vocab = Vocabulary(header["vocab"])
    config = TrainConfig(**header["config"])
    H = header["dims"]["hidden"]
    V = header["dims"]["vocab_size"]
    if V != len(vocab):
        raise CheckpointError("vocab_size does not match the vocabulary list")

    payload = memoryview(raw)[12 + header_len:-4]
    pos = 0

    def lstm(input_dim: int) -> LstmParams:
        nonlocal pos
        W, pos = _take(payload, pos, (4 * H, input_dim))
        U, pos = _take(payload, pos, (4 * H, H))
        b, pos = _take(payload, pos, (4 * H,))
        return LstmParams(W, U, b)

    def dense(input_dim: int, output_dim: int) -> DenseParams:
        nonlocal pos
        W, pos = _take(payload, pos, (output_dim, input_dim))
        b, pos = _take(payload, pos, (output_dim,))
        return DenseParams(W, b)

    if kind == TAGGER_KIND:
        model = TaggerModel(
            enc_fwd=lstm(V), enc_bwd=lstm(V),
            head=dense(2 * H, 1),
            vocab=vocab, config=config)
    else:
        model = Seq2SeqModel(
            enc_fwd=lstm(V), enc_bwd=lstm(V),
            bridge=dense(4 * H, 2 * H),
            dec=lstm(V), out=dense(H, V),
            vocab=vocab, config=config)
    if pos != len(payload):
        raise CheckpointError(f"{len(payload) - pos} unexpected payload bytes")
    return kind, model
