"""Spectrum-analyzer emulation.

Two detector modes are provided, mirroring how the bench instruments are
driven:

* FFT mode: Welch-averaged one-sided PSD where the resolution bandwidth is
  identified with the equivalent noise bandwidth of the Hann window
  (ENBW = 1.5 * fs / nperseg).  The video bandwidth is a moving average over
  trace points with equivalent bandwidth vbw.
* Zero-span mode: brick-wall band-pass of width rbw around a center
  frequency, square-law power detection, then a one-pole video low-pass at
  vbw.  The output is band power versus time.

Trace averaging is the RMS detector (pointwise root-mean-square across
measurements), and normalization subtracts the electronic dark trace in the
linear domain before forming dB relative to the SQL trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sp_signal

from .errors import AnalysisError, ParameterError
from .noise import TimeSeries

__all__ = [
    "SpectrumConfig",
    "PowerSpectrum",
    "NormalizedTrace",
    "fft_spectrum",
    "zero_span",
    "rms_average",
    "normalize_and_subtract",
    "stitch_spectra",
    "log_resample",
]

HANN_ENBW_BINS = 1.5  # ENBW of a Hann window, in FFT bins


@dataclass(frozen=True)
class SpectrumConfig:
    """Analyzer settings for one measurement window."""

    rbw: float
    vbw: float
    center_or_range: float | tuple[float, float]
    mode: str = "fft"
    averages: int = 1
    window: str = "hann"

    def __post_init__(self):
        if self.mode not in ("fft", "zero_span"):
            raise ParameterError(f"unknown analyzer mode {self.mode!r}")
        if self.rbw <= 0.0:
            raise ParameterError("rbw must be > 0")
        if not 0.0 < self.vbw <= self.rbw:
            raise ParameterError("vbw must satisfy 0 < vbw <= rbw")
        if self.averages < 1:
            raise ParameterError("averages must be >= 1")
        if self.window != "hann":
            raise ParameterError("only the hann window is supported")


@dataclass
class PowerSpectrum:
    """One-sided binned PSD (SQL-normalizable linear units) with metadata."""

    frequencies: np.ndarray
    power: np.ndarray
    rbw: float
    vbw: float
    n_averages: int = 1

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.power = np.asarray(self.power, dtype=float)
        if self.frequencies.shape != self.power.shape:
            raise AnalysisError("frequencies and power must have the same shape")
        if self.frequencies.size and np.any(np.diff(self.frequencies) <= 0.0):
            raise AnalysisError("frequencies must be strictly increasing")
        if np.any(self.power < 0.0):
            raise AnalysisError("power must be >= 0")

    def bin_width(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    def integrated_power(self) -> float:
        return float(np.sum(self.power) * self.bin_width())


@dataclass
class NormalizedTrace:
    """dB-relative-to-SQL trace with per-bin below-dark flags."""

    axis: np.ndarray
    db: np.ndarray
    flagged: np.ndarray


def required_length(sample_rate: float, rbw: float) -> int:
    """Samples needed for one FFT segment at the requested RBW."""
    return int(round(HANN_ENBW_BINS * sample_rate / rbw))


def fft_spectrum(series: TimeSeries, config: SpectrumConfig) -> PowerSpectrum:
    """Welch-averaged one-sided PSD with RBW = Hann ENBW and VBW bin smoothing."""
    fs = series.sample_rate
    nperseg = required_length(fs, config.rbw)
    if nperseg < 8:
        raise AnalysisError(f"rbw {config.rbw} Hz too coarse for fs {fs} Hz")
    if len(series) < nperseg:
        raise AnalysisError(
            f"series too short for rbw {config.rbw} Hz: need >= {nperseg} samples "
            f"at fs {fs} Hz, got {len(series)}")
    realized_rbw = HANN_ENBW_BINS * fs / nperseg
    freqs, psd = sp_signal.welch(
        series.samples, fs=fs, window="hann", nperseg=nperseg,
        noverlap=nperseg // 2, detrend=False, scaling="density")
    n_segments = 1 + (len(series) - nperseg) // (nperseg - nperseg // 2)

    smooth = max(1, int(round(realized_rbw / config.vbw)))
    if smooth > 1:
        psd = _moving_average(psd, smooth)

    lo, hi = _frequency_range(config, freqs[-1])
    keep = (freqs >= max(lo, freqs[1])) & (freqs < hi)
    return PowerSpectrum(freqs[keep], psd[keep], rbw=realized_rbw,
                         vbw=config.vbw, n_averages=n_segments)


def _frequency_range(config: SpectrumConfig, f_max: float) -> tuple[float, float]:
    if isinstance(config.center_or_range, tuple):
        lo, hi = config.center_or_range
        if not 0.0 <= lo < hi:
            raise AnalysisError(f"invalid frequency range {config.center_or_range}")
        return lo, min(hi, f_max * (1 + 1e-12))
    return 0.0, f_max * (1 + 1e-12)


def _moving_average(x: np.ndarray, m: int) -> np.ndarray:
    padded = np.pad(x, (m // 2, m - 1 - m // 2), mode="reflect")
    kernel = np.full(m, 1.0 / m)
    return np.convolve(padded, kernel, mode="valid")


def zero_span(series: TimeSeries, center: float, rbw: float,
              vbw: float) -> TimeSeries:
    """Band power versus time at a fixed center frequency.

    Brick-wall band-pass of width rbw (noise bandwidth exactly rbw), square-law
    detection, one-pole video low-pass at vbw.  For a flat input PSD S0 the
    mean output is S0 * rbw; for a sine of amplitude A inside the band it is
    A^2 / 2.
    """
    fs = series.sample_rate
    if rbw <= 0.0 or vbw <= 0.0:
        raise AnalysisError("rbw and vbw must be > 0")
    lo, hi = center - rbw / 2.0, center + rbw / 2.0
    if lo <= 0.0 or hi >= series.nyquist:
        raise AnalysisError(
            f"zero-span band [{lo}, {hi}] Hz outside (0, Nyquist={series.nyquist} Hz)")
    n = len(series)
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    spectrum = np.fft.rfft(series.samples)
    spectrum[(freqs < lo) | (freqs >= hi)] = 0.0
    band = np.fft.irfft(spectrum, n=n)
    power = band * band
    alpha = 1.0 - np.exp(-2.0 * np.pi * vbw / fs)
    smoothed = sp_signal.lfilter([alpha], [1.0, alpha - 1.0], power,
                                 zi=[(1.0 - alpha) * power[0]])[0]
    return TimeSeries(fs, smoothed)


def rms_average(traces):
    """Pointwise root-mean-square across PowerSpectrum or TimeSeries traces."""
    if not traces:
        raise AnalysisError("rms_average requires at least one trace")
    first = traces[0]
    if isinstance(first, PowerSpectrum):
        for t in traces[1:]:
            if (t.frequencies.shape != first.frequencies.shape
                    or not np.allclose(t.frequencies, first.frequencies)):
                raise AnalysisError("spectra must share the same frequency bins")
        stacked = np.stack([t.power for t in traces])
        return PowerSpectrum(first.frequencies.copy(),
                             np.sqrt(np.mean(stacked**2, axis=0)),
                             rbw=first.rbw, vbw=first.vbw,
                             n_averages=sum(t.n_averages for t in traces))
    if isinstance(first, TimeSeries):
        for t in traces[1:]:
            if len(t) != len(first) or t.sample_rate != first.sample_rate:
                raise AnalysisError("series must share length and sample rate")
        stacked = np.stack([t.samples for t in traces])
        return TimeSeries(first.sample_rate, np.sqrt(np.mean(stacked**2, axis=0)))
    raise AnalysisError(f"cannot rms_average objects of type {type(first)!r}")


def _values_and_axis(trace):
    if isinstance(trace, PowerSpectrum):
        return trace.power, trace.frequencies
    if isinstance(trace, TimeSeries):
        return trace.samples, trace.times()
    return np.asarray(trace, dtype=float), np.arange(np.asarray(trace).size)


def normalize_and_subtract(trace, sql_trace, dark_trace=None) -> NormalizedTrace:
    """dB trace = 10 log10((trace - dark) / (sql - dark)), dark in linear units.

    Bins where the trace does not exceed the dark level are flagged and set to
    NaN rather than clipped.
    """
    values, axis = _values_and_axis(trace)
    sql, _ = _values_and_axis(sql_trace)
    if dark_trace is None:
        dark = np.zeros_like(values)
    else:
        dark, _ = _values_and_axis(dark_trace)
        if np.isscalar(dark) or dark.ndim == 0:
            dark = np.full_like(values, float(dark))
    if sql.shape != values.shape or dark.shape != values.shape:
        raise AnalysisError("trace, sql and dark must share the same bins")
    if np.any(sql <= dark):
        raise AnalysisError("sql trace must exceed the dark trace at every bin")
    numerator = values - dark
    flagged = numerator <= 0.0
    db = np.full_like(values, np.nan)
    ok = ~flagged
    db[ok] = 10.0 * np.log10(numerator[ok] / (sql[ok] - dark[ok]))
    return NormalizedTrace(axis=axis, db=db, flagged=flagged)


def stitch_spectra(spectra) -> PowerSpectrum:
    """Concatenate non-overlapping windows into one display spectrum.

    Windows are sorted by start frequency; overlapping bins are rejected.  The
    stitched product keeps the coarsest rbw as its metadata; per-window raw
    spectra should be preserved alongside.
    """
    if not spectra:
        raise AnalysisError("nothing to stitch")
    ordered = sorted(spectra, key=lambda s: s.frequencies[0])
    freqs = np.concatenate([s.frequencies for s in ordered])
    power = np.concatenate([s.power for s in ordered])
    if np.any(np.diff(freqs) <= 0.0):
        raise AnalysisError("windows overlap or contain duplicate bins")
    return PowerSpectrum(freqs, power,
                         rbw=max(s.rbw for s in ordered),
                         vbw=max(s.vbw for s in ordered),
                         n_averages=min(s.n_averages for s in ordered))


def log_resample(spectrum: PowerSpectrum, points: int = 600) -> PowerSpectrum:
    """Logarithmic frequency resampling for display export only."""
    f = spectrum.frequencies
    if f[0] <= 0.0 or points < 2:
        raise AnalysisError("log resampling needs positive frequencies and >= 2 points")
    edges = np.geomspace(f[0], f[-1] * (1 + 1e-12), points + 1)
    idx = np.searchsorted(edges, f, side="right") - 1
    out_f = np.sqrt(edges[:-1] * edges[1:])
    out_p = np.full(points, np.nan)
    for k in range(points):
        sel = idx == k
        if np.any(sel):
            out_p[k] = float(np.mean(spectrum.power[sel]))
    keep = ~np.isnan(out_p)
    return PowerSpectrum(out_f[keep], out_p[keep], rbw=spectrum.rbw,
                         vbw=spectrum.vbw, n_averages=spectrum.n_averages)
