"""From-scratch recurrent network core: layers, models, training, checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import gradient_check
from .layers import (DenseParams, LstmParams, bilstm_encode, bilstm_forward,
                     init_dense, init_lstm, lstm_step, sigmoid, softmax)
from .models import (END, START, Seq2SeqModel, TaggerModel, TrainConfig,
                     greedy_decode, init_seq2seq, init_tagger, tagger_scores)
from .train import rmsprop_update, train_seq2seq, train_tagger

__all__ = [
    "DenseParams", "LstmParams", "Seq2SeqModel", "TaggerModel", "TrainConfig",
    "START", "END",
    "bilstm_encode", "bilstm_forward", "gradient_check", "greedy_decode",
    "init_dense", "init_lstm", "init_seq2seq", "init_tagger",
    "load_checkpoint", "lstm_step", "rmsprop_update", "save_checkpoint",
    "sigmoid", "softmax", "tagger_scores", "train_seq2seq", "train_tagger",
]
