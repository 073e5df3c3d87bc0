import numpy as np
import pytest

import timewarp as tw


def smooth_signal(n=200, freqs=(1.0, 2.5), amps=(1.0, 0.5), phases=(0.0, 1.0)):
    t = np.linspace(0.0, 1.0, n)
    v = np.zeros(n)
    for f, a, p in zip(freqs, amps, phases):
        v += a * np.sin(2.0 * np.pi * f * t + p)
    return tw.Signal.from_samples(t, v)


def warped_pair(n=200, scale=0.1):
    """x and y = x composed with the smooth warp t + scale*sin(pi t)."""
    x = smooth_signal(n=n, freqs=(1.0, 2.5, 4.5), amps=(1.0, 0.6, 0.3),
                      phases=(0.0, 1.0, 2.0))
    t = np.linspace(0.0, 1.0, n)

    def warp_true(tt):
        tt = np.asarray(tt, dtype=float)
        return tt + scale * np.sin(np.pi * tt)

    y = tw.Signal.from_samples(t, x(warp_true(t)))
    return x, y, warp_true


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
