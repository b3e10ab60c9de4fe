"""Pairwise space-time trellis code comparison.

Core pieces: the 4-state QPSK codec (`codes`), the Rayleigh/AWGN link
(`channel`), BER curves and competitions (`simulate`), the MLP-gated
representative-channel search (`microsim`), feature/dataset handling
(`dataset`), the from-scratch MLP (`mlp`), and the accuracy/speed
benchmark (`benchmark`).  A FastAPI service (`service`) exposes all of
it; the CLI (`cli`) is a thin client of that service.
"""

from .channel import ChannelMatrix, SnrPoint, sample_rayleigh_channel, snr_to_noise_variance, transmit
from .codes import (
    GeneratorMatrix,
    Trellis,
    bit_error_rate,
    brute_force_ml_decode,
    build_trellis,
    encode,
    qpsk_map,
    random_generator_matrix,
    viterbi_decode,
)
from .dataset import (
    FEATURE_DIM,
    LabeledRow,
    extract_features,
    prepare_dataset,
    read_csv,
    split_train_test,
    write_csv,
)
from .microsim import MicrosimConfig, MicrosimResult, microsimulate
from .mlp import MlpModel, TrainReport, forward, init_model, load_model, predict, save_model, train
from .simulate import (
    ELEMENTARY_FRAME,
    BerCurve,
    CompetitionRecord,
    MetricTriple,
    compete_full,
    compete_micro,
    curve_metrics,
    hierarchy_compare,
    majority_vote,
    make_grid,
    run_ber_curve_full,
    run_ber_curve_micro,
    subcompete,
)

__version__ = "0.1.0"

__all__ = [
    "BerCurve",
    "ChannelMatrix",
    "CompetitionRecord",
    "ELEMENTARY_FRAME",
    "FEATURE_DIM",
    "GeneratorMatrix",
    "LabeledRow",
    "MetricTriple",
    "MicrosimConfig",
    "MicrosimResult",
    "MlpModel",
    "SnrPoint",
    "TrainReport",
    "Trellis",
    "bit_error_rate",
    "brute_force_ml_decode",
    "build_trellis",
    "compete_full",
    "compete_micro",
    "curve_metrics",
    "encode",
    "extract_features",
    "forward",
    "hierarchy_compare",
    "init_model",
    "load_model",
    "majority_vote",
    "make_grid",
    "microsimulate",
    "predict",
    "prepare_dataset",
    "qpsk_map",
    "random_generator_matrix",
    "read_csv",
    "run_ber_curve_full",
    "run_ber_curve_micro",
    "sample_rayleigh_channel",
    "save_model",
    "snr_to_noise_variance",
    "split_train_test",
    "subcompete",
    "train",
    "transmit",
    "viterbi_decode",
    "write_csv",
]
