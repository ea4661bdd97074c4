import numpy as np

from sandhi.corpus import Vocabulary
from sandhi.nn import TrainConfig, gradient_check
from sandhi.nn.models import init_tagger, tagger_loss_and_grads
from sandhi.nn.layers import bilstm_forward, sigmoid
from sandhi.nn.models import one_hot, pad_id_rows


def test_seq2seq_gradients_match_finite_differences():
    assert gradient_check("seq2seq") < 1e-4


def test_tagger_gradients_match_finite_differences():
    assert gradient_check("tagger") < 1e-4


def test_zero_loss_instance_has_zero_gradients():
    # Feed the tagger its own outputs as targets: loss and every gradient
    # must vanish identically.
    vocab = Vocabulary.build(["abcd"])
    cfg = TrainConfig(hidden_size=5, batch_size=2, epochs=1, seed=9)
    model = init_tagger(vocab, cfg, dtype=np.float64)
    texts = ["abca", "dcb"]
    rows = [vocab.ids(t) for t in texts]
    ids, mask = pad_id_rows(rows, vocab.pad_index)
    xs = one_hot(ids, mask, len(vocab), np.float64)
    outs, _, _ = bilstm_forward(model.enc_fwd, model.enc_bwd, xs, mask)
    y = sigmoid(outs @ model.head.W.T + model.head.b)
    targets = [list(y[:len(t), b, 0]) for b, t in enumerate(texts)]

    loss, grads = tagger_loss_and_grads(model, rows, targets)
    assert loss == 0.0
    for name, g in grads.items():
        assert np.allclose(g, 0.0, atol=1e-15), name
