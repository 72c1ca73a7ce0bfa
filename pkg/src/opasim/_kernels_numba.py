"""Numba kernel backend: fused single-pass loops.

Recurrences mirror scipy's DF2T update order exactly (no fastmath), so the
numpy backend produces the same bits.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def one_pole(x, alpha, state):
    n = x.shape[0]
    y = np.empty(n)
    for k in range(n):
        yk = alpha * x[k] + state
        state = (1.0 - alpha) * yk
        y[k] = yk
    return y, state


@njit(**_OPTS)
def cascade_lpf(z, alpha, s1, s2):
    n = z.shape[0]
    y = np.empty(n)
    for k in range(n):
        y1 = alpha * z[k] + s1
        s1 = (1.0 - alpha) * y1
        y2 = alpha * y1 + s2
        s2 = (1.0 - alpha) * y2
        y[k] = y2
    return y, s1, s2


@njit(**_OPTS)
def biquad(x, coefs, z1, z2):
    b0, b1, b2, a1, a2 = coefs[0], coefs[1], coefs[2], coefs[3], coefs[4]
    n = x.shape[0]
    y = np.empty(n)
    for k in range(n):
        xk = x[k]
        yk = b0 * xk + z1
        z1 = (b1 * xk + z2) - a1 * yk
        z2 = b2 * xk - a2 * yk
        y[k] = yk
    return y, z1, z2


@njit(**_OPTS)
def sml_chain(x, mix, lockin_alpha, s1, s2):
    n = x.shape[0]
    y = np.empty(n)
    for k in range(n):
        zk = 2.0 * x[k] * mix[k]
        y1 = lockin_alpha * zk + s1
        s1 = (1.0 - lockin_alpha) * y1
        y2 = lockin_alpha * y1 + s2
        s2 = (1.0 - lockin_alpha) * y2
        y[k] = y2
    return y, s1, s2


@njit(**_OPTS)
def qnl_chain(x, mix, bq1, bq2, video_alpha, lockin_alpha, state):
    b0a, b1a, b2a, a1a, a2a = bq1[0], bq1[1], bq1[2], bq1[3], bq1[4]
    b0b, b1b, b2b, a1b, a2b = bq2[0], bq2[1], bq2[2], bq2[3], bq2[4]
    z1a, z2a = state[0], state[1]
    z1b, z2b = state[2], state[3]
    sv, sl1, sl2 = state[4], state[5], state[6]
    n = x.shape[0]
    video = np.empty(n)
    err = np.empty(n)
    for k in range(n):
        xk = x[k]
        v = b0a * xk + z1a
        z1a = (b1a * xk + z2a) - a1a * v
        z2a = b2a * xk - a2a * v
        w = b0b * v + z1b
        z1b = (b1b * v + z2b) - a1b * w
        z2b = b2b * v - a2b * w
        p = w * w
        vy = video_alpha * p + sv
        sv = (1.0 - video_alpha) * vy
        video[k] = vy
        zk = 2.0 * vy * mix[k]
        l1 = lockin_alpha * zk + sl1
        sl1 = (1.0 - lockin_alpha) * l1
        l2 = lockin_alpha * l1 + sl2
        sl2 = (1.0 - lockin_alpha) * l2
        err[k] = l2
    state[0], state[1] = z1a, z2a
    state[2], state[3] = z1b, z2b
    state[4], state[5], state[6] = sv, sl1, sl2
    return video, err
