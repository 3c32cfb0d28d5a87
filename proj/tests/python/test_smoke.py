# Copyright 2026 The tcnse Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

import math
import os

import numpy as np
import pytest

import tcnse


def narrow(config):
    config.tcn.bottleneck_channels = 16
    config.tcn.conv_channels = 24
    config.tcn.skip_channels = 16
    return config


@pytest.fixture
def noise():
    return np.random.default_rng(0).normal(0.0, 0.3, 8000)


def test_latency_reference_values():
    assert tcnse.analyze_latency(tcnse.ModelConfig.conv_tasnet(5))["lookahead_ms"] == 33.0
    assert tcnse.analyze_latency(tcnse.ModelConfig.conv_tasnet(0))["lookahead_ms"] == 1.0
    assert tcnse.analyze_latency(tcnse.ModelConfig.stft_tcn(3))["lookahead_ms"] == 40.0
    assert tcnse.analyze_latency(tcnse.ModelConfig.stft_tcn(0))["lookahead_ms"] == 4.0


def test_param_count():
    count = tcnse.param_count(tcnse.ModelConfig.conv_tasnet())
    assert abs(count - 5.08e6) <= 0.1 * 5.08e6
    weights = tcnse.init_random(tcnse.ModelConfig.stft_tcn(), 1)
    assert weights.num_parameters == tcnse.param_count(tcnse.ModelConfig.stft_tcn())


def test_enhance_and_stream_agree(noise):
    for config in (narrow(tcnse.ModelConfig.conv_tasnet(3)), narrow(tcnse.ModelConfig.stft_tcn(2))):
        model = tcnse.Model(config, tcnse.init_random(config, 42))
        offline = model.enhance(noise)
        streamed = tcnse.stream(model, noise)
        assert len(offline) == 2
        for a, b in zip(offline, streamed):
            assert a.shape == noise.shape
            assert np.max(np.abs(a - b)) <= 1e-5


def test_masks(noise):
    config = narrow(tcnse.ModelConfig.conv_tasnet())
    masks = tcnse.Model(config, tcnse.init_random(config, 1)).masks(noise)
    assert all(0.0 <= m.min() and m.max() <= 1.0 for m in masks)


def test_round_trip():
    x = np.random.default_rng(1).normal(size=4000)
    analysis, synthesis = tcnse.stft_basis(192, 64, 512)
    frames = tcnse.frame_signal(x, 192, 64)
    y = tcnse.overlap_add(synthesis @ (analysis @ frames), 64, len(x))
    assert np.max(np.abs(x - y)) <= 1e-9


def test_losses():
    r = tcnse.sisnr_loss([np.array([1.0, 1, 0, 0])], [np.array([1.0, 0, 0, 0])])
    assert abs(r["value"]) < 1e-12
    assert abs(r["alpha"][0] - 0.5) < 1e-12
    r = tcnse.snr_loss([np.array([2.0, 0])], [np.array([1.0, 0])])
    assert abs(r["value"] + 6.0206) < 1e-4
    s = np.random.default_rng(2).normal(size=256)
    assert tcnse.sisnr_loss([s], [3 * s])["status"] == "PerfectEstimate"
    e = np.random.default_rng(3).normal(size=256)
    g = tcnse.loss_gradient("pcmse", [s], [e])[0]
    assert g.shape == (256,)
    h = 1e-4
    i = 17
    up, down = e.copy(), e.copy()
    up[i] += h
    down[i] -= h
    fd = (tcnse.pcmse_loss([s], [up])["value"] - tcnse.pcmse_loss([s], [down])["value"]) / (2 * h)
    assert abs(g[i] - fd) <= 1e-4 * np.max(np.abs(g))
    assert tcnse.ssnr(s, s) == 35.0
    assert math.isinf(tcnse.si_snr(s, s))


def test_errors_carry_codes(tmp_path):
    with pytest.raises(tcnse.TcnseError) as info:
        tcnse.parse_run_config('{"model": {"bogus": 1}}')
    assert info.value.code == "UnknownConfigKey"
    config = narrow(tcnse.ModelConfig.conv_tasnet())
    model = tcnse.Model(config, tcnse.init_random(config, 1))
    state = tcnse.StreamState(model)
    with pytest.raises(tcnse.TcnseError) as info:
        state.push(np.zeros(15))
    assert info.value.code == "ChunkSizeMismatch"


def test_files(tmp_path):
    config_dir = os.environ.get("TCNSE_CONFIG_DIR")
    if config_dir:
        rc = tcnse.load_run_config(os.path.join(config_dir, "stft_tcn.json"))
        assert rc.model.frame_length == 192
    config = narrow(tcnse.ModelConfig.stft_tcn())
    path = str(tmp_path / "w.tcnw")
    tcnse.save_weights(path, tcnse.init_random(config, 5))
    tcnse.load_weights(path, config)
    wav = str(tmp_path / "x.wav")
    x = np.random.default_rng(4).uniform(-0.5, 0.5, 1000)
    assert tcnse.write_wav(wav, x) == 0
    y, rate = tcnse.read_wav(wav)
    assert rate == 16000
    assert np.max(np.abs(x - y)) <= 1 / 32768
