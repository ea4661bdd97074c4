import math

import numpy as np
import numpy.testing as npt
import pytest

from sandhi.errors import DimensionMismatchError, EmptySequenceError
from sandhi.nn import LstmParams, bilstm_encode, init_lstm, lstm_step, rmsprop_update, softmax
from sandhi.nn.layers import lstm_forward


def zeros_cell(input_dim, hidden, dtype=np.float64):
    return LstmParams(W=np.zeros((4 * hidden, input_dim), dtype=dtype),
                      U=np.zeros((4 * hidden, hidden), dtype=dtype),
                      b=np.zeros(4 * hidden, dtype=dtype))


def test_lstm_step_zero_params_give_zero_state():
    params = zeros_cell(3, 4)
    x = np.array([1.0, -2.0, 0.5])
    h, c = lstm_step(params, x, (np.zeros(4), np.zeros(4)))
    npt.assert_array_equal(c, np.zeros(4))
    npt.assert_array_equal(h, np.zeros(4))


def test_lstm_step_matches_hand_arithmetic():
    # 2-unit cell, 1-dim input, every weight written out and the step
    # recomputed with scalar math.
    H = 2
    W = np.array([[0.1], [0.2], [-0.3], [0.4], [0.5], [-0.6], [0.7], [0.8]])
    U = np.array([
        [0.01, 0.02], [0.03, 0.04],      # i
        [-0.05, 0.06], [0.07, -0.08],    # f
        [0.09, 0.10], [0.11, 0.12],      # g
        [-0.13, 0.14], [0.15, 0.16],     # o
    ])
    b = np.array([0.0, 0.1, 1.0, 1.0, 0.2, -0.2, 0.0, 0.3])
    params = LstmParams(W, U, b)
    x = np.array([0.7])
    h_prev = np.array([0.25, -0.5])
    c_prev = np.array([0.3, 0.1])

    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    expected_h, expected_c = [], []
    for j in range(H):
        zi = W[j, 0] * x[0] + U[j] @ h_prev + b[j]
        zf = W[H + j, 0] * x[0] + U[H + j] @ h_prev + b[H + j]
        zg = W[2 * H + j, 0] * x[0] + U[2 * H + j] @ h_prev + b[2 * H + j]
        zo = W[3 * H + j, 0] * x[0] + U[3 * H + j] @ h_prev + b[3 * H + j]
        c_j = sig(zf) * c_prev[j] + sig(zi) * math.tanh(zg)
        expected_c.append(c_j)
        expected_h.append(sig(zo) * math.tanh(c_j))

    h, c = lstm_step(params, x, (h_prev, c_prev))
    npt.assert_allclose(c, expected_c, atol=1e-12)
    npt.assert_allclose(h, expected_h, atol=1e-12)


def test_lstm_step_outputs_bounded():
    rng = np.random.Generator(np.random.PCG64(0))
    params = init_lstm(5, 7, rng, dtype=np.float64, scale=2.0)
    h, _ = lstm_step(params, rng.normal(size=5), (rng.normal(size=7) * 0.5,
                                                  rng.normal(size=7)))
    assert np.all(np.abs(h) < 1.0)


def test_lstm_step_dimension_mismatch():
    params = zeros_cell(3, 4)
    with pytest.raises(DimensionMismatchError):
        lstm_step(params, np.zeros(5), (np.zeros(4), np.zeros(4)))


def test_bilstm_single_step_concatenates_both_cells():
    rng = np.random.Generator(np.random.PCG64(1))
    fwd = init_lstm(3, 4, rng, dtype=np.float64)
    bwd = init_lstm(3, 4, rng, dtype=np.float64)
    x = rng.normal(size=(1, 3))
    outs, (hf, cf, hb, cb) = bilstm_encode(fwd, bwd, x)
    h_f, _ = lstm_step(fwd, x[0], (np.zeros(4), np.zeros(4)))
    h_b, _ = lstm_step(bwd, x[0], (np.zeros(4), np.zeros(4)))
    npt.assert_allclose(outs[0, :4], h_f, atol=1e-12)
    npt.assert_allclose(outs[0, 4:], h_b, atol=1e-12)


def test_bilstm_reversal_swaps_halves():
    rng = np.random.Generator(np.random.PCG64(2))
    fwd = init_lstm(3, 4, rng, dtype=np.float64)
    bwd = init_lstm(3, 4, rng, dtype=np.float64)
    xs = rng.normal(size=(6, 3))
    outs, _ = bilstm_encode(fwd, bwd, xs)
    # running (bwd, fwd) on the reversed input swaps the halves and the order
    outs_rev, _ = bilstm_encode(bwd, fwd, xs[::-1])
    npt.assert_allclose(outs_rev[::-1, :4], outs[:, 4:], atol=1e-12)
    npt.assert_allclose(outs_rev[::-1, 4:], outs[:, :4], atol=1e-12)


def test_bilstm_output_dimension():
    rng = np.random.Generator(np.random.PCG64(3))
    fwd = init_lstm(2, 5, rng)
    bwd = init_lstm(2, 5, rng)
    outs, _ = bilstm_encode(fwd, bwd, rng.normal(size=(4, 2)).astype(np.float32))
    assert outs.shape == (4, 10)


def test_bilstm_empty_sequence():
    rng = np.random.Generator(np.random.PCG64(4))
    fwd = init_lstm(2, 3, rng)
    with pytest.raises(EmptySequenceError):
        bilstm_encode(fwd, fwd, np.zeros((0, 2), dtype=np.float32))


def test_masked_forward_ignores_padding():
    # final states of a padded batch equal the unpadded single-sequence run
    rng = np.random.Generator(np.random.PCG64(5))
    params = init_lstm(3, 4, rng, dtype=np.float64)
    xs = rng.normal(size=(3, 1, 3))
    _, h_short, c_short, _ = lstm_forward(params, xs, np.ones((3, 1)))
    padded = np.concatenate([xs, np.zeros((2, 1, 3))], axis=0)
    mask = np.array([[1.0], [1.0], [1.0], [0.0], [0.0]])
    _, h_pad, c_pad, _ = lstm_forward(params, padded, mask)
    npt.assert_allclose(h_pad, h_short, atol=1e-12)
    npt.assert_allclose(c_pad, c_short, atol=1e-12)


def test_rmsprop_zero_grad_keeps_param():
    param = np.array([1.0, -2.0])
    cache = np.array([0.4, 0.4])
    new_param, new_cache = rmsprop_update(param, np.zeros(2), cache, 0.001, 0.9, 1e-7)
    npt.assert_array_equal(new_param, param)
    npt.assert_allclose(new_cache, 0.9 * cache)


def test_rmsprop_scalar_fixture():
    param = np.array([0.0])
    new_param, new_cache = rmsprop_update(param, np.array([1.0]), np.array([0.0]),
                                          lr=0.001, rho=0.9, epsilon=1e-7)
    npt.assert_allclose(new_cache, [0.1])
    npt.assert_allclose(new_param, [-0.001 / (math.sqrt(0.1) + 1e-7)])


def test_rmsprop_step_bound():
    for grad in (1e-12, 1.0, 1e12):
        param, _ = rmsprop_update(np.array([0.0]), np.array([grad]),
                                  np.array([0.0]), lr=0.001, rho=0.9, epsilon=1e-7)
        assert abs(param[0]) <= 0.001 / 1e-7 + 1e-6


def test_softmax_rows_sum_to_one():
    rng = np.random.Generator(np.random.PCG64(6))
    z = rng.normal(scale=30.0, size=(7, 11)).astype(np.float32)
    probs = softmax(z)
    npt.assert_allclose(probs.sum(axis=-1), np.ones(7), atol=1e-6)
    assert np.all(probs >= 0.0)
