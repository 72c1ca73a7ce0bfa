"""Detection channels: balanced homodyne detector and photon counter.

The homodyne photocurrent is synthesized so that its one-sided PSD at
frequency f approximates

    shot_level * [R_minus(f) cos^2(theta(t)) + R_plus(f) sin^2(theta(t))]
    + dark(f) + technical(f) / CMRR

with the instantaneous local-oscillator phase error theta(t) applied
pointwise (valid while phase dynamics are slow against the analysis band).
Vacuum level is 1, so spectra normalize directly to SQL = 0 dB.

The photon-counting channel models the filtered squeezer output seen by a
single-photon counter: parametric fluorescence that scales as x^2/(1-x^2),
plus a probe interference fringe following the classical parametric gain,
plus background counts.  Count rates are calibrated at a reference operating
point (pump-only 1.95 MHz at x^2 = 100/165; probe-only 90 kHz at 3 nW).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError, ParameterError
from .noise import NoiseScenario, TimeSeries, colored_noise_from_psd
from .physics import (DetectionChain, OpaParams, normalized_pump,
                      parametric_power_gain, squeezing_spectrum)
from .seeding import derive_rng

__all__ = [
    "HomodyneDetector",
    "SpcmChannel",
    "homodyne_measure",
    "expected_homodyne_psd",
    "count_rate_model",
    "spcm_counts",
    "PUMP_ONLY_RATE_HZ",
    "PROBE_RATE_PER_NANOWATT",
]

# Count-rate calibration anchors (reference operating point).
PUMP_ONLY_RATE_HZ = 1.95e6      # fluorescence + background at x^2 = 100/165
PROBE_RATE_PER_NANOWATT = 3.0e4  # probe-only fringe rate per nW at unit gain
_CAL_PUMP_RATIO = 100.0 / 165.0


@dataclass(frozen=True)
class HomodyneDetector:
    """Balanced detector: LO power, common-mode rejection, dark-noise spec.

    ``dark_anchors`` are (frequency_hz, db_rel_shot_at_2mW) points joined
    log-linearly and held flat outside; ``cmrr_db`` may be a single figure or
    a tuple of (frequency_hz, db) anchors.
    """

    lo_power: float = 2.0
    cmrr_db: float | tuple[tuple[float, float], ...] = 55.0
    dark_anchors: tuple[tuple[float, float], ...] = ((10.0, -7.0), (100.0, -10.0))
    chain: DetectionChain = field(default_factory=DetectionChain)

    def __post_init__(self):
        if self.lo_power <= 0.0:
            raise ParameterError("lo_power must be > 0")
        cmrr = self.cmrr_db if isinstance(self.cmrr_db, tuple) else ((1.0, self.cmrr_db),)
        if any(db < 0.0 for _, db in cmrr):
            raise ParameterError("cmrr_db must be >= 0 dB")
        freqs = [f for f, _ in self.dark_anchors]
        levels = [db for _, db in self.dark_anchors]
        if any(f <= 0.0 for f in freqs) or sorted(freqs) != freqs:
            raise ParameterError("dark_anchors frequencies must be positive and increasing")
        if any(later > earlier for earlier, later in zip(levels, levels[1:])):
            raise ParameterError("dark spec must be non-increasing with frequency")

    def dark_psd(self, f: np.ndarray) -> np.ndarray:
        """Dark-noise PSD relative to the SQL at the configured LO power."""
        f = np.asarray(f, dtype=float)
        anchors_f = np.array([a[0] for a in self.dark_anchors])
        anchors_db = np.array([a[1] for a in self.dark_anchors])
        safe = np.clip(f, anchors_f[0] * 1e-6, None)
        db = np.interp(np.log10(safe), np.log10(anchors_f), anchors_db)
        # dark is absolute noise; SQL scales with LO power (anchored at 2 mW)
        return 10.0 ** (db / 10.0) * (2.0 / self.lo_power)

    def cmrr_linear(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if isinstance(self.cmrr_db, tuple):
            anchors_f = np.array([a[0] for a in self.cmrr_db])
            anchors_db = np.array([a[1] for a in self.cmrr_db])
            safe = np.clip(f, anchors_f[0] * 1e-6, None)
            db = np.interp(np.log10(safe), np.log10(anchors_f), anchors_db)
        else:
            db = np.full_like(f, float(self.cmrr_db))
        return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SpcmChannel:
    """Single-photon counter fed by the filtered squeezer output."""

    background_rate: float = 500.0
    etalon_transmission: float = 1.0
    bin_width: float = 0.020

    def __post_init__(self):
        if self.background_rate < 0.0:
            raise ParameterError("background_rate must be >= 0")
        if not 0.0 < self.etalon_transmission <= 1.0:
            raise ParameterError("etalon_transmission must be in (0, 1]")
        if self.bin_width <= 0.0:
            raise ParameterError("bin_width must be > 0")


def expected_homodyne_psd(params: OpaParams, chain: DetectionChain,
                          detector: HomodyneDetector, scenario: NoiseScenario,
                          theta: float, f: np.ndarray) -> np.ndarray:
    """Model PSD for a fixed LO phase error (tones excluded)."""
    f = np.asarray(f, dtype=float)
    pair = squeezing_spectrum(params, chain, f)
    s2 = np.sin(theta) ** 2
    quad = pair.r_minus * (1.0 - s2) + pair.r_plus * s2
    leak = scenario.technical_noise.psd(f) / detector.cmrr_linear(f)
    return scenario.shot_level * quad + detector.dark_psd(f) + leak


def homodyne_measure(scenario: NoiseScenario, params: OpaParams,
                     chain: DetectionChain, detector: HomodyneDetector,
                     lo_phase_series: TimeSeries, duration: float,
                     sample_rate: float, seed: int, *path) -> TimeSeries:
    """Synthesize the balanced-detector photocurrent for one measurement.

    ``lo_phase_series`` is the instantaneous LO phase error (radians) at the
    same sample rate; it must cover the requested duration.
    """
    n = int(round(duration * sample_rate))
    if n < 2:
        raise AnalysisError("duration * sample_rate must be >= 2")
    if lo_phase_series.sample_rate != sample_rate:
        raise AnalysisError(
            f"lo_phase_series rate {lo_phase_series.sample_rate} != {sample_rate}")
    if len(lo_phase_series) < n:
        raise AnalysisError("lo_phase_series shorter than the requested duration")
    theta = lo_phase_series.samples[:n]

    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate)
    pair = squeezing_spectrum(params, chain, freqs)
    shot = scenario.shot_level
    quad_minus = colored_noise_from_psd(lambda f: shot * pair.r_minus, sample_rate,
                                        n, seed, *path, "quad_minus").samples
    quad_plus = colored_noise_from_psd(lambda f: shot * pair.r_plus, sample_rate,
                                       n, seed, *path, "quad_plus").samples
    current = np.cos(theta) * quad_minus + np.sin(theta) * quad_plus

    current += colored_noise_from_psd(detector.dark_psd, sample_rate, n,
                                      seed, *path, "dark").samples
    if scenario.technical_noise.level_at_corner > 0.0:
        leak_psd = lambda f: scenario.technical_noise.psd(f) / detector.cmrr_linear(f)
        current += colored_noise_from_psd(leak_psd, sample_rate, n,
                                          seed, *path, "leak").samples

    tones = scenario.tones_below(sample_rate / 2.0)
    if tones:
        rng = derive_rng(seed, "tones", *path)
        t = np.arange(n) / sample_rate
        for tone in tones:
            phase = rng.uniform(0.0, 2.0 * np.pi)
            current += tone.amplitude_rms * np.sqrt(2.0) * np.sin(
                2.0 * np.pi * tone.frequency * t + phase)
    return TimeSeries(sample_rate, current)


def count_rate_model(params: OpaParams, probe_power: float, pump_phase: float,
                     spcm: SpcmChannel) -> float:
    """Mean photon count rate (Hz) at the counter for the given drive."""
    if probe_power < 0.0:
        raise ParameterError("probe_power must be >= 0")
    x = normalized_pump(params)
    fluor_coeff = ((PUMP_ONLY_RATE_HZ - spcm.background_rate)
                   * (1.0 - _CAL_PUMP_RATIO) / _CAL_PUMP_RATIO)
    fluor = fluor_coeff * x**2 / (1.0 - x**2)
    probe = PROBE_RATE_PER_NANOWATT * probe_power * parametric_power_gain(x, pump_phase)
    return spcm.background_rate + spcm.etalon_transmission * (fluor + probe)


def spcm_counts(rate_series: TimeSeries, seed: int, *path) -> TimeSeries:
    """Per-sample Poisson draws with mean rate * dt."""
    rates = rate_series.samples
    if np.any(rates < 0.0):
        raise ParameterError("count rates must be >= 0")
    rng = derive_rng(seed, "spcm", *path)
    counts = rng.poisson(rates / rate_series.sample_rate)
    return TimeSeries(rate_series.sample_rate, counts.astype(float))
