"""LSTM and dense layers with explicit forward/backward passes.

Everything here is plain numpy. Weight matrices stack the four LSTM gates
in the fixed order i, f, c, o along the first axis:

    z = x W^T + h_prev U^T + b          (batch, 4H)
    i, f, o = sigmoid(z_i), sigmoid(z_f), sigmoid(z_o)
    g = tanh(z_c)
    c = f * c_prev + i * g
    h = o * tanh(c)

Sequences are padded at the end; a (T, B) mask marks real positions and
masked steps carry the previous state through unchanged, so final states
are per-sequence correct without bucketing by exact length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError, EmptySequenceError


def sigmoid(x):
    # exp(-softplus(-x)): stable for large |x|
    return np.exp(-np.logaddexp(0.0, -x))


def softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


@dataclass
class LstmParams:
    W: np.ndarray  # (4H, D) input weights
    U: np.ndarray  # (4H, H) recurrent weights
    b: np.ndarray  # (4H,)

    @property
    def hidden(self) -> int:
        return self.U.shape[1]

    @property
    def input_dim(self) -> int:
        return self.W.shape[1]


@dataclass
class DenseParams:
    W: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)


def init_lstm(input_dim: int, hidden: int, rng: np.random.Generator,
              dtype=np.float32, scale: float = 0.08) -> LstmParams:
    W = rng.uniform(-scale, scale, (4 * hidden, input_dim)).astype(dtype)
    U = rng.uniform(-scale, scale, (4 * hidden, hidden)).astype(dtype)
    b = np.zeros(4 * hidden, dtype=dtype)
    b[hidden:2 * hidden] = 1.0  # open forget gates at init
    return LstmParams(W, U, b)


def init_dense(input_dim: int, output_dim: int, rng: np.random.Generator,
               dtype=np.float32, scale: float = 0.08) -> DenseParams:
    W = rng.uniform(-scale, scale, (output_dim, input_dim)).astype(dtype)
    b = np.zeros(output_dim, dtype=dtype)
    return DenseParams(W, b)


def lstm_step(params: LstmParams, x: np.ndarray, state: tuple[np.ndarray, np.ndarray],
              ) -> tuple[np.ndarray, np.ndarray]:
    """One LSTM step; x is (D,) or (B, D), state is a matching (h, c) pair."""
    h_prev, c_prev = state
    if x.shape[-1] != params.input_dim or h_prev.shape[-1] != params.hidden:
        raise DimensionMismatchError(
            f"x dim {x.shape[-1]} vs W {params.input_dim}, "
            f"h dim {h_prev.shape[-1]} vs U {params.hidden}")
    H = params.hidden
    z = x @ params.W.T + h_prev @ params.U.T + params.b
    i = sigmoid(z[..., 0 * H:1 * H])
    f = sigmoid(z[..., 1 * H:2 * H])
    g = np.tanh(z[..., 2 * H:3 * H])
    o = sigmoid(z[..., 3 * H:4 * H])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c


class LstmCache:
    __slots__ = ("xs", "mask", "i", "f", "g", "o", "c_new", "hs", "cs", "h0", "c0")


def lstm_forward(params: LstmParams, xs: np.ndarray, mask: np.ndarray,
                 h0: np.ndarray | None = None, c0: np.ndarray | None = None,
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray, LstmCache]:
    """Run a padded batch (T, B, D) through the cell.

    Returns per-step hidden states (T, B, H), the final (h, c) pair, and a
    cache for the backward pass. Masked steps carry state through.
    """
    T, B, _ = xs.shape
    if T == 0:
        raise EmptySequenceError("lstm_forward needs at least one step")
    H = params.hidden
    dtype = params.W.dtype
    h = np.zeros((B, H), dtype=dtype) if h0 is None else h0
    c = np.zeros((B, H), dtype=dtype) if c0 is None else c0

    cache = LstmCache()
    cache.xs, cache.mask = xs, mask
    cache.h0, cache.c0 = h, c
    cache.i = np.empty((T, B, H), dtype=dtype)
    cache.f = np.empty((T, B, H), dtype=dtype)
    cache.g = np.empty((T, B, H), dtype=dtype)
    cache.o = np.empty((T, B, H), dtype=dtype)
    cache.c_new = np.empty((T, B, H), dtype=dtype)
    cache.hs = np.empty((T, B, H), dtype=dtype)
    cache.cs = np.empty((T, B, H), dtype=dtype)

    for t in range(T):
        z = xs[t] @ params.W.T + h @ params.U.T + params.b
        i = sigmoid(z[:, 0 * H:1 * H])
        f = sigmoid(z[:, 1 * H:2 * H])
        g = np.tanh(z[:, 2 * H:3 * H])
        o = sigmoid(z[:, 3 * H:4 * H])
        c_new = f * c + i * g
        h_new = o * np.tanh(c_new)
        m = mask[t][:, None].astype(dtype)
        h = m * h_new + (1.0 - m) * h
        c = m * c_new + (1.0 - m) * c
        cache.i[t], cache.f[t], cache.g[t], cache.o[t] = i, f, g, o
        cache.c_new[t] = c_new
        cache.hs[t], cache.cs[t] = h, c
    return cache.hs, h, c, cache


def lstm_backward(params: LstmParams, cache: LstmCache, dhs: np.ndarray | None,
                  dh_final: np.ndarray | None = None, dc_final: np.ndarray | None = None,
                  ) -> tuple[dict[str, np.ndarray], np.ndarray, np.ndarray]:
    """Backpropagation through time; mirrors lstm_forward's masking exactly.

    dhs carries per-step gradients w.r.t. the (post-mask) hidden states;
    dh_final/dc_final add gradients flowing into the final states. Returns
    parameter gradients plus the gradients w.r.t. the initial (h0, c0).
    Input gradients are not computed (inputs are one-hot data, never
    parameters).
    """
    T, B, H = cache.hs.shape
    dtype = params.W.dtype
    dW = np.zeros_like(params.W)
    dU = np.zeros_like(params.U)
    db = np.zeros_like(params.b)
    dh = np.zeros((B, H), dtype=dtype) if dh_final is None else dh_final.copy()
    dc = np.zeros((B, H), dtype=dtype) if dc_final is None else dc_final.copy()

    for t in range(T - 1, -1, -1):
        if dhs is not None:
            dh = dh + dhs[t]
        m = cache.mask[t][:, None].astype(dtype)
        dh_new = m * dh
        dc_new = m * dc
        dh_carry = (1.0 - m) * dh
        dc_carry = (1.0 - m) * dc

        i, f, g, o = cache.i[t], cache.f[t], cache.g[t], cache.o[t]
        c_prev = cache.cs[t - 1] if t > 0 else cache.c0
        h_prev = cache.hs[t - 1] if t > 0 else cache.h0
        tanh_c = np.tanh(cache.c_new[t])

        do = dh_new * tanh_c
        dc_new = dc_new + dh_new * o * (1.0 - tanh_c * tanh_c)
        di = dc_new * g
        df = dc_new * c_prev
        dg = dc_new * i

        dz = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ], axis=1)

        dW += dz.T @ cache.xs[t]
        dU += dz.T @ h_prev
        db += dz.sum(axis=0)
        dh = dh_carry + dz @ params.U
        dc = dc_carry + dc_new * f
    return {"W": dW, "U": dU, "b": db}, dh, dc


def bilstm_forward(fwd: LstmParams, bwd: LstmParams, xs: np.ndarray, mask: np.ndarray):
    """Bidirectional pass: per-step [h_fwd; h_bwd] plus both final states.

    The backward cell consumes the time-reversed batch; leading pads carry
    zero state so its final state corresponds to the first real character.
    """
    hs_f, hf, cf, cache_f = lstm_forward(fwd, xs, mask)
    hs_b_rev, hb, cb, cache_b = lstm_forward(bwd, xs[::-1], mask[::-1])
    outs = np.concatenate([hs_f, hs_b_rev[::-1]], axis=2)
    return outs, (hf, cf, hb, cb), (cache_f, cache_b)


def bilstm_backward(fwd: LstmParams, bwd: LstmParams, caches, douts,
                    dstates=None) -> tuple[dict, dict]:
    """Backward counterpart of bilstm_forward.

    douts is (T, B, 2H) or None; dstates optionally carries gradients for
    (hf, cf, hb, cb).
    """
    cache_f, cache_b = caches
    H = fwd.hidden
    dhf = dcf = dhb = dcb = None
    if dstates is not None:
        dhf, dcf, dhb, dcb = dstates
    d_f = douts[:, :, :H] if douts is not None else None
    d_b = douts[::-1, :, H:] if douts is not None else None
    grads_f, _, _ = lstm_backward(fwd, cache_f, d_f, dhf, dcf)
    grads_b, _, _ = lstm_backward(bwd, cache_b, d_b, dhb, dcb)
    return grads_f, grads_b


def bilstm_encode(fwd: LstmParams, bwd: LstmParams, xs: np.ndarray):
    """Inference-only bidirectional encoding of a single unpadded sequence (T, D)."""
    if xs.ndim != 2 or xs.shape[0] == 0:
        raise EmptySequenceError("bilstm_encode needs a nonempty (T, D) sequence")
    batch = xs[:, None, :]
    mask = np.ones((xs.shape[0], 1), dtype=xs.dtype)
    outs, (hf, cf, hb, cb), _ = bilstm_forward(fwd, bwd, batch, mask)
    return outs[:, 0, :], (hf[0], cf[0], hb[0], cb[0])
