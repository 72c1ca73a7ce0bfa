"""Seeded synthesis of every stochastic time series in the simulator.

Conventions used throughout the package:

* Series are real, uniformly sampled, in photocurrent units where the vacuum
  quadrature has one-sided PSD = 1 (so the SQL is 0 dB after normalization).
* PSDs are one-sided; integrating a PSD over [0, Nyquist] gives the sample
  variance.  A flat PSD of S0 therefore corresponds to variance S0 * fs / 2.
* Every generator is a pure function of its arguments and seed.  Sub-streams
  are derived with :func:`opasim.seeding.derive_rng`, so per-trace parallelism
  cannot change results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError, ParameterError
from .seeding import derive_rng

__all__ = [
    "TimeSeries",
    "TechnicalNoise",
    "Tone",
    "NoiseScenario",
    "white_noise",
    "power_law_noise",
    "colored_noise_from_psd",
    "phase_random_walk",
]


@dataclass
class TimeSeries:
    """Uniformly sampled real signal; the universal DSP currency."""

    sample_rate: float
    samples: np.ndarray

    def __post_init__(self):
        if self.sample_rate <= 0.0:
            raise ParameterError("sample_rate must be > 0")
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ParameterError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.samples)):
            raise ParameterError("samples must be finite")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def nyquist(self) -> float:
        return self.sample_rate / 2.0

    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    def variance(self) -> float:
        return float(np.var(self.samples))


@dataclass(frozen=True)
class TechnicalNoise:
    """Power-law laser noise: PSD = level_at_corner * (corner/f)^alpha."""

    corner_frequency: float = 10.0
    slope_alpha: float = 2.0
    level_at_corner: float = 0.0

    def __post_init__(self):
        if self.corner_frequency <= 0.0:
            raise ParameterError("corner_frequency must be > 0")
        if not 0.5 <= self.slope_alpha <= 3.0:
            raise ParameterError("slope_alpha must be in [0.5, 3]")
        if self.level_at_corner < 0.0:
            raise ParameterError("level_at_corner must be >= 0")

    def psd(self, f: np.ndarray) -> np.ndarray:
        """One-sided PSD on the given frequency grid (plateau below f[1])."""
        f = np.asarray(f, dtype=float)
        out = np.zeros_like(f)
        if self.level_at_corner == 0.0:
            return out
        # Avoid the DC singularity: hold the first positive bin's value.
        f_floor = np.where(f > 0.0, f, np.inf)
        f_min = float(np.min(f_floor)) if np.isfinite(np.min(f_floor)) else self.corner_frequency
        f_eff = np.clip(f, f_min, None)
        out = self.level_at_corner * (self.corner_frequency / f_eff) ** self.slope_alpha
        return out


@dataclass(frozen=True)
class Tone:
    """Spurious spectral line at ``frequency`` with the given RMS amplitude."""

    frequency: float
    amplitude_rms: float

    def __post_init__(self):
        if self.frequency <= 0.0:
            raise ParameterError("tone frequency must be > 0")
        if self.amplitude_rms < 0.0:
            raise ParameterError("tone amplitude_rms must be >= 0")


@dataclass(frozen=True)
class NoiseScenario:
    """Configuration for every classical noise source in a run."""

    shot_level: float = 1.0
    technical_noise: TechnicalNoise = field(default_factory=TechnicalNoise)
    tones: tuple[Tone, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.shot_level <= 0.0:
            raise ParameterError("shot_level must be > 0")

    def tones_below(self, nyquist: float) -> tuple[Tone, ...]:
        """Tones representable in a series with the given Nyquist frequency."""
        return tuple(t for t in self.tones if t.frequency < nyquist)


def white_noise(sample_rate: float, count: int, sigma: float, seed: int,
                *path) -> TimeSeries:
    """I.i.d. Gaussian samples with mean 0 and standard deviation sigma."""
    if count < 1:
        raise ParameterError("count must be >= 1")
    if sigma < 0.0:
        raise ParameterError("sigma must be >= 0")
    rng = derive_rng(seed, "white", *path)
    return TimeSeries(sample_rate, sigma * rng.standard_normal(count))


def colored_noise_from_psd(psd_function, sample_rate: float, count: int,
                           seed: int, *path) -> TimeSeries:
    """Gaussian noise whose one-sided PSD follows ``psd_function``.

    ``psd_function`` is evaluated on the rfft frequency grid and must be
    non-negative there.  Realized by spectral shaping of white noise; the DC
    bin is zeroed so the output is (statistically) zero-mean.
    """
    if count < 2:
        raise ParameterError("count must be >= 2")
    freqs = np.fft.rfftfreq(count, d=1.0 / sample_rate)
    target = np.asarray(psd_function(freqs), dtype=float)
    if target.shape != freqs.shape:
        raise AnalysisError("psd_function must return one value per rfft bin")
    if np.any(~np.isfinite(target)) or np.any(target < 0.0):
        raise ParameterError("psd_function must be finite and >= 0 on [0, Nyquist]")
    rng = derive_rng(seed, "colored", *path)
    x = rng.standard_normal(count)
    spectrum = np.fft.rfft(x)
    # Unit white noise has one-sided PSD 2/fs; |H|^2 * (2/fs) = target.
    gain = np.sqrt(target * sample_rate / 2.0)
    gain[0] = 0.0
    samples = np.fft.irfft(spectrum * gain, n=count)
    return TimeSeries(sample_rate, samples)


def power_law_noise(sample_rate: float, count: int, alpha: float, scale: float,
                    seed: int, *path, f_min: float | None = None) -> TimeSeries:
    """Gaussian noise with one-sided PSD = scale * (1 Hz / f)^alpha.

    The spectrum plateaus below ``f_min`` (default: the 4th rfft bin) to keep
    the low-frequency power finite.  alpha may be 0 (white) up to 3.
    """
    if not 0.0 <= alpha <= 3.0:
        raise ParameterError("alpha must be in [0, 3]")
    if scale < 0.0:
        raise ParameterError("scale must be >= 0")
    if count < 16:
        raise AnalysisError("count too small to resolve the shaping band (need >= 16)")
    if scale == 0.0:
        return TimeSeries(sample_rate, np.zeros(count))
    resolution = sample_rate / count
    if f_min is None:
        f_min = 4.0 * resolution
    if f_min < resolution:
        raise AnalysisError(
            f"count too small to resolve f_min={f_min} Hz (resolution {resolution} Hz)")

    def psd(f):
        f_eff = np.clip(f, f_min, None)
        return scale * f_eff ** (-alpha)

    return colored_noise_from_psd(psd, sample_rate, count, seed, "powerlaw", *path)


def phase_random_walk(sample_rate: float, count: int, diffusion: float,
                      seed: int, *path) -> TimeSeries:
    """Wiener process with Var[theta(t)] = diffusion * t (rad^2)."""
    if diffusion < 0.0:
        raise ParameterError("diffusion must be >= 0")
    if count < 1:
        raise ParameterError("count must be >= 1")
    if diffusion == 0.0:
        return TimeSeries(sample_rate, np.zeros(count))
    rng = derive_rng(seed, "walk", *path)
    increments = rng.standard_normal(count) * np.sqrt(diffusion / sample_rate)
    return TimeSeries(sample_rate, np.cumsum(increments))
