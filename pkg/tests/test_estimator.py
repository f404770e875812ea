import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from scunet import SpectrogramChannelsSeparator
from scunet.errors import ConfigError, DataError, DimensionError
from scunet.validation import check_stems, check_waveforms


@pytest.fixture(scope="module")
def fitted(toy_tracks):
    X = np.stack([t.mixture.samples[:88200] for t in toy_tracks])
    Y = np.stack([[t.stem(s).samples[:88200] for s in ("vocals", "accompaniment")] for t in toy_tracks])
    est = SpectrogramChannelsSeparator(depth=2, base_channels=4, max_steps=2, batch_size=1, epochs=(1,), learning_rates=(1e-3,))
    return est.fit(X, Y), X, Y


def test_params_round_trip():
    est = SpectrogramChannelsSeparator(preset="M4", depth=3)
    params = est.get_params()
    assert params["preset"] == "M4" and params["depth"] == 3
    assert clone(est).get_params() == params
    est.set_params(depth=2)
    assert est.depth == 2


def test_fit_predict_transform_score(fitted):
    est, X, Y = fitted
    assert len(est.loss_trace_) == 2
    assert est.sources_ == ("vocals", "accompaniment")
    mags = est.transform(X[:1])
    assert mags.shape == (1, 2, 1025, 173) and (mags >= 0).all()
    wav = est.predict(X[:1])
    assert wav.shape == (1, 2, 88200)
    assert np.isfinite(est.score(X[:1], Y[:1]))


def test_balance_option_computes_weights(toy_tracks):
    X = np.stack([t.mixture.samples[:88200] for t in toy_tracks])
    Y = np.stack([[t.stem(s).samples[:88200] for s in ("vocals", "accompaniment")] for t in toy_tracks])
    est = SpectrogramChannelsSeparator(depth=2, base_channels=4, max_steps=1, balance=True, epochs=(1,), learning_rates=(1e-3,))
    est.fit(X, Y)
    assert est.weights_.alpha != (0.5, 0.5) and sum(est.weights_.alpha) == pytest.approx(1.0)


def test_unfitted_and_invalid_inputs():
    est = SpectrogramChannelsSeparator()
    with pytest.raises(NotFittedError):
        est.predict(np.zeros((1, 1000)))
    with pytest.raises(ConfigError):
        SpectrogramChannelsSeparator(preset="M9").fit(np.zeros((1, 100)), np.zeros((1, 2, 100)))
    with pytest.raises(DimensionError, match="axis 1"):
        check_stems(np.zeros((1, 3, 10)), 1, 2, 10)
    with pytest.raises(DimensionError):
        check_waveforms(np.zeros((1, 2, 3)))
    with pytest.raises(DataError):
        check_waveforms([[0.0, np.nan]])
    assert check_waveforms([0.0, 1.0]).shape == (1, 2)
