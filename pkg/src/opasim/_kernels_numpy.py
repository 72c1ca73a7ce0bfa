"""Pure-numpy/scipy kernel backend.

Filter math is staged through ``scipy.signal.lfilter`` (direct form II
transposed), matching the numba backend's per-sample recurrences operation
for operation.  State values are the DF2T internal memories.
"""

from __future__ import annotations

import numpy as np
from scipy import signal as sp_signal

NAME = "numpy"


def one_pole(x: np.ndarray, alpha: float, state: float):
    """y[n] = alpha*x[n] + (1-alpha)*y[n-1]; state is (1-alpha)*y[n-1]."""
    y, zf = sp_signal.lfilter([alpha], [1.0, alpha - 1.0], x, zi=[state])
    return y, float(zf[0])


def cascade_lpf(z: np.ndarray, alpha: float, s1: float, s2: float):
    """Two identical one-pole low-pass stages in series."""
    y1, s1 = one_pole(z, alpha, s1)
    y2, s2 = one_pole(y1, alpha, s2)
    return y2, s1, s2


def biquad(x: np.ndarray, coefs: np.ndarray, z1: float, z2: float):
    """DF2T biquad; coefs = (b0, b1, b2, a1, a2) with a0 normalized to 1."""
    b = [coefs[0], coefs[1], coefs[2]]
    a = [1.0, coefs[3], coefs[4]]
    y, zf = sp_signal.lfilter(b, a, x, zi=[z1, z2])
    return y, float(zf[0]), float(zf[1])


def sml_chain(x: np.ndarray, mix: np.ndarray, lockin_alpha: float,
              s1: float, s2: float):
    """Demodulate a sample stream: 2*x*mix through the lock-in LPF cascade."""
    z = 2.0 * x * mix
    return cascade_lpf(z, lockin_alpha, s1, s2)


def qnl_chain(x: np.ndarray, mix: np.ndarray, bq1: np.ndarray, bq2: np.ndarray,
              video_alpha: float, lockin_alpha: float, state: np.ndarray):
    """Band power + demodulated error for one block of photocurrent.

    Chain: two band-pass biquads, square-law detection, video one-pole,
    multiply by 2*mix, two lock-in one-pole stages.  ``state`` holds the seven
    filter memories (z1a, z2a, z1b, z2b, s_video, s_lp1, s_lp2) and is updated
    in place.  Returns (band_power_series, error_series).
    """
    v, state[0], state[1] = biquad(x, bq1, state[0], state[1])
    w, state[2], state[3] = biquad(v, bq2, state[2], state[3])
    power = w * w
    video, state[4] = one_pole(power, video_alpha, state[4])
    z = 2.0 * video * mix
    e1, state[5] = one_pole(z, lockin_alpha, state[5])
    e2, state[6] = one_pole(e1, lockin_alpha, state[6])
    return video, e2
