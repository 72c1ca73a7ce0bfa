"""Dither-lock control loops.

Both locks share the same architecture: a phase dither at the modulation
frequency, a plant observable whose mean depends on the controlled phase, a
lock-in demodulator (multiply by 2 sin, cascaded one-pole low-pass), and a PID
controller updated block-synchronously at ``control_rate`` while the plant is
simulated per sample.

* Quantum-noise lock: the observable is homodyne noise power in a fixed
  analysis band (band-pass + square-law + video filter on the synthesized
  photocurrent).  It holds the LO phase at a noise-power extremum, so it works
  on vacuum squeezing with no carrier.
* Photon-count lock: the observable is the single-photon count rate of the
  probe/fluorescence interference fringe, demodulated directly from per-sample
  Poisson counts.  It holds the pump phase at a fringe extremum (0 or pi).

Error signals are normalized by the analytic small-signal slope magnitude so
that PID gains are in radians-per-radian units.  ``PidConfig.sign`` selects
which extremum is stable; flipping it moves the loop to the conjugate
extremum of the same plant.

Reported phase errors exclude the intentional dither: they are the slow
(controller + disturbance) deviation from the target extremum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import resolve_backend
from .detection import SpcmChannel, count_rate_model
from .errors import AnalysisError, LockError, ParameterError
from .noise import TimeSeries
from .physics import (DetectionChain, OpaParams, normalized_pump,
                      squeezing_spectrum)
from .seeding import derive_rng

__all__ = [
    "LockInConfig",
    "PidConfig",
    "PidState",
    "LockResult",
    "QnlPlant",
    "SmlPlant",
    "lock_in_demodulate",
    "pid_step",
    "quantum_noise_lock",
    "sml_lock",
]


@dataclass(frozen=True)
class LockInConfig:
    """Dither/demodulation settings for one loop."""

    mod_frequency: float
    mod_amplitude: float
    demod_phase: float = 0.0
    lpf_cutoff: float = 1.0

    def __post_init__(self):
        if self.mod_frequency <= 0.0:
            raise ParameterError("mod_frequency must be > 0")
        if self.mod_amplitude <= 0.0:
            raise ParameterError("mod_amplitude must be > 0")
        if not 0.0 < self.lpf_cutoff < self.mod_frequency / 2.0:
            raise ParameterError("lpf_cutoff must be in (0, mod_frequency/2)")


@dataclass(frozen=True)
class PidConfig:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    sign: int = 1
    output_limit: float = 10.0

    def __post_init__(self):
        if self.output_limit <= 0.0:
            raise ParameterError("output_limit must be > 0")
        if self.sign not in (-1, 1):
            raise ParameterError("sign must be +1 or -1")


@dataclass
class PidState:
    config: PidConfig
    integral: float = 0.0
    prev_error: float | None = None


def pid_step(state: PidState, error: float, dt: float) -> float:
    """One PID update; returns the actuation (radians), clamped at the limit.

    The configured sign multiplies the error.  Anti-windup freezes the
    integrator whenever the output saturates in the direction of the error.
    """
    if dt <= 0.0:
        raise ParameterError("dt must be > 0")
    cfg = state.config
    e = cfg.sign * error
    derivative = 0.0 if state.prev_error is None else (e - state.prev_error) / dt
    integral = state.integral + e * dt
    u = cfg.kp * e + cfg.ki * integral + cfg.kd * derivative
    if abs(u) > cfg.output_limit:
        if u * e > 0.0:
            integral = state.integral
        u = math.copysign(cfg.output_limit,
                          cfg.kp * e + cfg.ki * integral + cfg.kd * derivative)
    state.integral = integral
    state.prev_error = e
    return u


@dataclass
class LockResult:
    """Outcome of a lock simulation (series are at the control rate)."""

    phase_error_series: TimeSeries
    rms_error: float
    locked: bool
    acquisition_time: float
    observable_series: TimeSeries | None = None
    error_signal_series: TimeSeries | None = None
    target: float = 0.0
    diagnostic: str = ""


@dataclass(frozen=True)
class QnlPlant:
    """Homodyne context for quantum noise locking."""

    params: OpaParams
    chain: DetectionChain = field(default_factory=DetectionChain)
    extra_noise_psd: float = 0.1
    analysis_center: float = 250e3
    analysis_bandwidth: float = 200e3
    video_bandwidth: float = 150e3
    sample_rate: float = 1e6
    control_rate: float = 1e3

    def __post_init__(self):
        if self.analysis_center + self.analysis_bandwidth / 2 >= self.sample_rate / 2:
            raise ParameterError("analysis band must fit below Nyquist")
        if self.sample_rate <= 0 or self.control_rate <= 0:
            raise ParameterError("rates must be > 0")


@dataclass(frozen=True)
class SmlPlant:
    """Photon-counting context for pump-phase locking."""

    params: OpaParams
    probe_power: float = 3.0
    spcm: SpcmChannel = field(default_factory=SpcmChannel)
    sample_rate: float = 5e5
    control_rate: float = 1e3

    def __post_init__(self):
        if self.probe_power < 0.0:
            raise ParameterError("probe_power must be >= 0")
        if self.sample_rate <= 0 or self.control_rate <= 0:
            raise ParameterError("rates must be > 0")


def lock_in_demodulate(signal: TimeSeries, config: LockInConfig,
                       backend: str | None = None) -> TimeSeries:
    """2*signal*sin(2 pi f_mod t + demod_phase) through the low-pass cascade.

    For signal = A sin(2 pi f_mod t + demod_phase) the steady-state output
    approaches A.
    """
    fs = signal.sample_rate
    if fs <= 2.0 * config.mod_frequency:
        raise AnalysisError(
            f"sample rate {fs} Hz undersamples the {config.mod_frequency} Hz dither")
    kern = resolve_backend(backend)
    t = np.arange(len(signal)) / fs
    mix = np.sin(2.0 * np.pi * config.mod_frequency * t + config.demod_phase)
    alpha = 1.0 - math.exp(-2.0 * math.pi * config.lpf_cutoff / fs)
    y, _, _ = kern.sml_chain(signal.samples, mix, alpha, 0.0, 0.0)
    return TimeSeries(fs, y)


def _rbj_bandpass(center: float, bandwidth: float, fs: float) -> np.ndarray:
    """Unit-peak-gain band-pass biquad (b0, b1, b2, a1, a2)."""
    w0 = 2.0 * math.pi * center / fs
    q = center / bandwidth
    alpha = math.sin(w0) / (2.0 * q)
    a0 = 1.0 + alpha
    return np.array([alpha / a0, 0.0, -alpha / a0,
                     -2.0 * math.cos(w0) / a0, (1.0 - alpha) / a0])


def _noise_bandwidth(coefs: np.ndarray, fs: float, stages: int = 2) -> float:
    """Equivalent noise bandwidth of the cascaded band-pass, by quadrature."""
    from scipy import signal as sp_signal

    freqs = np.linspace(0.0, fs / 2.0, 20001)
    _, h = sp_signal.freqz([coefs[0], coefs[1], coefs[2]],
                           [1.0, coefs[3], coefs[4]], worN=freqs, fs=fs)
    mag2 = np.abs(h) ** (2 * stages)
    return float(np.trapz(mag2, freqs))


def _check_disturbance(disturbance: TimeSeries | None, control_rate: float,
                       n_blocks: int) -> np.ndarray:
    if disturbance is None:
        return np.zeros(n_blocks)
    if abs(disturbance.sample_rate - control_rate) > 1e-9 * control_rate:
        raise AnalysisError(
            f"disturbance rate {disturbance.sample_rate} != control rate {control_rate}")
    if len(disturbance) < n_blocks:
        raise AnalysisError("disturbance series shorter than the lock duration")
    return disturbance.samples[:n_blocks]


def _assess_lock(err_norm: np.ndarray, true_err: np.ndarray, control_rate: float,
                 lpf_cutoff: float):
    """Acquisition by sustained small error signal; residual over the tail."""
    n = err_norm.size
    tail = err_norm[int(0.75 * n):]
    steady_rms = float(np.sqrt(np.mean(tail**2)))
    threshold = 3.0 * steady_rms + 1e-15
    hold = max(1, int(round(10.0 * control_rate / (2.0 * math.pi * lpf_cutoff))))
    below = np.abs(err_norm) < threshold
    acq_idx = None
    run = 0
    for i, ok in enumerate(below):
        run = run + 1 if ok else 0
        if run >= hold:
            acq_idx = i
            break
    if acq_idx is None or acq_idx >= n - 2:
        return False, float("nan"), float(np.sqrt(np.mean(true_err**2)))
    post = true_err[acq_idx:]
    rms = float(np.sqrt(np.mean(post**2)))
    return rms < 0.3, acq_idx / control_rate, rms


def _failed_result(disturbance_slow: np.ndarray, control_rate: float, target: float,
                   diagnostic: str) -> LockResult:
    series = TimeSeries(control_rate, disturbance_slow - target
                        if disturbance_slow.size else np.zeros(1))
    return LockResult(phase_error_series=series,
                      rms_error=float(np.sqrt(np.mean(series.samples**2))),
                      locked=False, acquisition_time=float("nan"),
                      target=target, diagnostic=diagnostic)


def quantum_noise_lock(plant: QnlPlant, lockin: LockInConfig, pid: PidConfig,
                       disturbance: TimeSeries | None, duration: float,
                       seed: int, initial_offset: float = 0.15,
                       backend: str | None = None) -> LockResult:
    """Hold the LO phase at a noise-power extremum by dithering it.

    ``pid.sign`` = +1 stabilizes the squeezed quadrature (theta = 0),
    -1 the anti-squeezed one (theta = pi/2).  The error signal is the
    demodulated band noise power of the synthesized photocurrent.
    """
    fs = plant.sample_rate
    control_rate = plant.control_rate
    block = int(round(fs / control_rate))
    n_blocks = int(round(duration * control_rate))
    if n_blocks < 8:
        raise AnalysisError("duration too short for the control rate")
    dist = _check_disturbance(disturbance, control_rate, n_blocks)

    pair = squeezing_spectrum(plant.params, plant.chain, plant.analysis_center)
    r_minus, contrast = pair.r_minus, pair.r_plus - pair.r_minus
    target = 0.0 if pid.sign > 0 else math.pi / 2.0
    if normalized_pump(plant.params) == 0.0 or contrast < 1e-9:
        return _failed_result(dist, control_rate, target,
                              "no phase dependence: pump is off")

    kern = resolve_backend(backend)
    bq = _rbj_bandpass(plant.analysis_center, plant.analysis_bandwidth, fs)
    noise_bw = _noise_bandwidth(bq, fs)
    video_alpha = 1.0 - math.exp(-2.0 * math.pi * plant.video_bandwidth / fs)
    lock_alpha = 1.0 - math.exp(-2.0 * math.pi * lockin.lpf_cutoff / fs)
    # Small-signal slope of the demodulated band power per radian of offset.
    err_scale = 2.0 * lockin.mod_amplitude * contrast * noise_bw

    rng = derive_rng(seed, "qnl_lock")
    state = np.zeros(7)
    pid_state = PidState(pid)
    theta_start = target + initial_offset
    theta_c = theta_start
    omega = 2.0 * math.pi * lockin.mod_frequency / fs
    phase0 = 0.0
    dt = block / fs
    idx = np.arange(block)

    err_sig = np.empty(n_blocks)
    observable = np.empty(n_blocks)
    slow_err = np.empty(n_blocks)
    for b in range(n_blocks):
        arg = phase0 + omega * idx
        dither = lockin.mod_amplitude * np.sin(arg)
        mix = np.sin(arg + lockin.demod_phase)
        theta = theta_c + dist[b] + dither
        psd = r_minus + contrast * np.sin(theta) ** 2 + plant.extra_noise_psd
        x = np.sqrt(psd * (fs / 2.0)) * rng.standard_normal(block)
        video, err = kern.qnl_chain(x, mix, bq, bq, video_alpha, lock_alpha, state)
        e_norm = err[-1] / err_scale
        err_sig[b] = e_norm
        observable[b] = video[-1]
        slow_err[b] = theta_c + dist[b] - target
        theta_c = theta_start - pid_step(pid_state, e_norm, dt)
        phase0 = (phase0 + omega * block) % (2.0 * math.pi)

    locked, acq_time, rms = _assess_lock(err_sig, slow_err, control_rate,
                                         lockin.lpf_cutoff)
    return LockResult(
        phase_error_series=TimeSeries(control_rate, slow_err),
        rms_error=rms, locked=locked, acquisition_time=acq_time,
        observable_series=TimeSeries(control_rate, observable),
        error_signal_series=TimeSeries(control_rate, err_sig),
        target=target,
        diagnostic="" if locked else "lock not acquired")


def _gain_curvature(x: float, pump_phase: float) -> float:
    """d^2 G / d phi^2 of the parametric gain at the given phase."""
    delta = 1.0 / (1.0 - x) ** 2 - 1.0 / (1.0 + x) ** 2
    return -math.cos(pump_phase) / 2.0 * delta


def sml_lock(plant: SmlPlant, lockin: LockInConfig, pid: PidConfig,
             target: float, disturbance: TimeSeries | None, duration: float,
             seed: int, initial_offset: float = 0.15,
             backend: str | None = None) -> LockResult:
    """Hold the pump phase at a count-rate fringe extremum (target 0 or pi).

    The error signal is the dithered, demodulated photon count rate.  With the
    stated normalization, ``pid.sign`` = -1 stabilizes the fringe maximum
    (target 0, amplification) and +1 the minimum (target pi, deamplification);
    flipping it sends the loop to the conjugate extremum.
    """
    if target not in (0.0, math.pi):
        raise ParameterError("target must be 0 or pi")
    fs = plant.sample_rate
    control_rate = plant.control_rate
    block = int(round(fs / control_rate))
    n_blocks = int(round(duration * control_rate))
    if n_blocks < 8:
        raise AnalysisError("duration too short for the control rate")
    dist = _check_disturbance(disturbance, control_rate, n_blocks)

    x = normalized_pump(plant.params)
    fringe = (plant.probe_power > 0.0 and
              count_rate_model(plant.params, plant.probe_power, 0.0, plant.spcm)
              - count_rate_model(plant.params, plant.probe_power, math.pi, plant.spcm)
              > 0.0)
    if not fringe:
        return _failed_result(dist, control_rate, target,
                              "no fringe: probe power is zero")
    peak_rate = count_rate_model(plant.params, plant.probe_power, 0.0, plant.spcm)
    if peak_rate <= 0.0:
        raise LockError("count rate saturated at zero")

    from .detection import PROBE_RATE_PER_NANOWATT

    curvature = abs(_gain_curvature(x, target))
    err_scale = (lockin.mod_amplitude * plant.spcm.etalon_transmission
                 * PROBE_RATE_PER_NANOWATT * plant.probe_power * curvature)

    kern = resolve_backend(backend)
    lock_alpha = 1.0 - math.exp(-2.0 * math.pi * lockin.lpf_cutoff / fs)
    rng = derive_rng(seed, "sml_lock")
    pid_state = PidState(pid)
    phi_start = target + initial_offset
    phi_c = phi_start
    omega = 2.0 * math.pi * lockin.mod_frequency / fs
    phase0 = 0.0
    dt = block / fs
    idx = np.arange(block)
    inv_minus = 1.0 / (1.0 - x) ** 2
    inv_plus = 1.0 / (1.0 + x) ** 2
    base_rate = count_rate_model(plant.params, 0.0, 0.0, plant.spcm)
    probe_amp = plant.spcm.etalon_transmission * PROBE_RATE_PER_NANOWATT * plant.probe_power

    s1 = s2 = 0.0
    err_sig = np.empty(n_blocks)
    observable = np.empty(n_blocks)
    slow_err = np.empty(n_blocks)
    for b in range(n_blocks):
        arg = phase0 + omega * idx
        dither = lockin.mod_amplitude * np.sin(arg)
        mix = np.sin(arg + lockin.demod_phase)
        phi = phi_c + dist[b] + dither
        gain = 0.5 * (1.0 + np.cos(phi)) * inv_minus + 0.5 * (1.0 - np.cos(phi)) * inv_plus
        rate = base_rate + probe_amp * gain
        counts = rng.poisson(rate / fs).astype(np.float64)
        err, s1, s2 = kern.sml_chain(counts * fs, mix, lock_alpha, s1, s2)
        e_norm = err[-1] / err_scale
        err_sig[b] = e_norm
        observable[b] = float(np.mean(rate))
        slow_err[b] = phi_c + dist[b] - target
        phi_c = phi_start - pid_step(pid_state, e_norm, dt)
        phase0 = (phase0 + omega * block) % (2.0 * math.pi)

    locked, acq_time, rms = _assess_lock(err_sig, slow_err, control_rate,
                                         lockin.lpf_cutoff)
    return LockResult(
        phase_error_series=TimeSeries(control_rate, slow_err),
        rms_error=rms, locked=locked, acquisition_time=acq_time,
        observable_series=TimeSeries(control_rate, observable),
        error_signal_series=TimeSeries(control_rate, err_sig),
        target=target,
        diagnostic="" if locked else "lock not acquired")
