# Copyright 2026 The tcnse Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Streaming TCN speech enhancement (Conv-TasNet and STFT-TCN)."""

from tcnse._core import (
    EncoderKind,
    InputLayout,
    LossConfig,
    MaskActivation,
    Model,
    ModelConfig,
    ModelWeights,
    PowerLaw,
    RunConfig,
    StreamState,
    TcnConfig,
    TcnseError,
    analyze_latency,
    frame_signal,
    init_random,
    load_run_config,
    load_weights,
    loss_gradient,
    overlap_add,
    param_count,
    parse_run_config,
    pasemse_loss,
    pcmse_loss,
    probe_causality,
    read_wav,
    save_weights,
    si_snr,
    sisnr_loss,
    snr_loss,
    ssnr,
    stft_basis,
    write_wav,
)

__version__ = "0.1.0"


def stream(model, samples):
    """Runs `samples` through a fresh StreamState and returns one array per source.

    The last partial hop is zero padded and the output trimmed back to the
    input length, matching Model.enhance.
    """
    import numpy as np

    state = StreamState(model)
    hop = state.hop
    n = len(samples)
    padded = np.zeros(-(-n // hop) * hop)
    padded[:n] = samples
    chunks = []
    for start in range(0, len(padded), hop):
        out = state.push(padded[start:start + hop])
        if out:
            chunks.append(out)
    chunks.append(state.flush())
    sources = len(chunks[-1])
    return [np.concatenate([c[k] for c in chunks])[:n] for k in range(sources)]
