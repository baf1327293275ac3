"""Iterative joint Tx/Rx beamforming training for millimeter-wave links."""

__version__ = "0.1.0"

from .channel import (
    LOS_PROFILE,
    NLOS_PROFILE,
    ChannelKind,
    ChannelProfile,
    Mpc,
    MultipathChannel,
    render_channel,
    sample_angles,
    sample_channel,
    steering_vector,
)
from .experiment import (
    CurvePoint,
    ExperimentConfig,
    ExperimentResult,
    TrialRecord,
    array_gain,
    run_experiment,
    run_trial,
)
from .numerics import (
    NonConvergenceError,
    SvdTriple,
    dft_matrix,
    hermitian_matvec,
    matvec,
    principal_svd,
)
from .training import (
    Awv,
    DegenerateInputError,
    Scheme,
    TrainConfig,
    TrainResult,
    cazac_init,
    measure_rx,
    measure_tx_side,
    normalize,
    sgv_train,
    signature_estimate,
    stv_train,
)

__all__ = [
    "array_gain",
    "Awv",
    "cazac_init",
    "ChannelKind",
    "ChannelProfile",
    "CurvePoint",
    "DegenerateInputError",
    "dft_matrix",
    "ExperimentConfig",
    "ExperimentResult",
    "hermitian_matvec",
    "LOS_PROFILE",
    "matvec",
    "measure_rx",
    "measure_tx_side",
    "Mpc",
    "MultipathChannel",
    "NLOS_PROFILE",
    "NonConvergenceError",
    "normalize",
    "principal_svd",
    "render_channel",
    "run_experiment",
    "run_trial",
    "sample_angles",
    "sample_channel",
    "Scheme",
    "sgv_train",
    "signature_estimate",
    "steering_vector",
    "stv_train",
    "SvdTriple",
    "TrainConfig",
    "TrainResult",
    "TrialRecord",
]
