"""Closed-form model of a sub-threshold degenerate OPA squeezer.

The squeezer is described by four numbers: the output-coupler transmission T,
the residual round-trip loss L, the round-trip length l, and the pump power P
relative to the oscillation threshold P_th.  Everything else follows:

    cavity decay rate     gamma = c (T + L) / l
    escape efficiency     rho   = T / (T + L)
    normalized pump       x     = sqrt(P / P_th),  0 <= x < 1 below threshold

The detected quadrature variances relative to the vacuum level (SQL = 1) at
analysis frequency f are

    R_minus(f) = 1 - K * 4x / ((1 + x)^2 + 4 (f/gamma)^2)     (squeezed)
    R_plus(f)  = 1 + K * 4x / ((1 - x)^2 + 4 (f/gamma)^2)     (anti-squeezed)

where K = eta * xi^2 * zeta * rho collects the detection efficiency budget
(photodiode quantum efficiency, homodyne visibility squared, propagation, and
cavity escape).  A residual phase error with RMS value theta mixes the two
quadratures:

    R'_minus = R_minus cos^2(theta) + R_plus sin^2(theta)
    R'_plus  = R_plus  cos^2(theta) + R_minus sin^2(theta)

All decibel values in the package are power dB (10 log10), consistent with
spectra normalized to make the SQL 0 dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AboveThresholdError, ParameterError

__all__ = [
    "SPEED_OF_LIGHT",
    "PHOTONS_PER_NANOWATT",
    "OpaParams",
    "DetectionChain",
    "QuadratureVariancePair",
    "PhaseJitter",
    "cavity_decay_rate",
    "normalized_pump",
    "escape_efficiency",
    "squeezing_spectrum",
    "apply_phase_jitter",
    "parametric_power_gain",
    "mean_intracavity_photons",
    "to_db",
    "from_db",
]

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# Linear calibration from injected probe power to mean intracavity photon
# number at the reference operating point (0.0764 photons per nanowatt).
PHOTONS_PER_NANOWATT = 0.0764


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParameterError(message)


@dataclass(frozen=True)
class OpaParams:
    """Cavity and pump description of the squeezer.

    Powers are in milliwatts, lengths in meters, wavelength in nanometers.
    """

    output_coupler_transmission: float = 0.11
    intracavity_loss: float = 0.11 * (1.0 - 0.879) / 0.879
    round_trip_length: float = 0.407
    pump_power: float = 100.0
    threshold_power: float = 165.0
    wavelength: float = 852.3
    speed_of_light: float = field(default=SPEED_OF_LIGHT)

    def __post_init__(self):
        _require(0.0 < self.output_coupler_transmission < 1.0,
                 "output_coupler_transmission must be in (0, 1)")
        _require(self.intracavity_loss >= 0.0, "intracavity_loss must be >= 0")
        _require(self.round_trip_length > 0.0, "round_trip_length must be > 0")
        _require(self.threshold_power > 0.0, "threshold_power must be > 0")
        _require(self.pump_power >= 0.0, "pump_power must be >= 0")
        if self.pump_power >= self.threshold_power:
            raise AboveThresholdError(
                f"pump_power {self.pump_power} mW >= threshold {self.threshold_power} mW"
            )
        _require(self.wavelength > 0.0, "wavelength must be > 0")

    @property
    def free_spectral_range(self) -> float:
        """FSR in Hz: c / round-trip length."""
        return self.speed_of_light / self.round_trip_length

    def with_pump(self, pump_power: float) -> "OpaParams":
        return OpaParams(
            output_coupler_transmission=self.output_coupler_transmission,
            intracavity_loss=self.intracavity_loss,
            round_trip_length=self.round_trip_length,
            pump_power=pump_power,
            threshold_power=self.threshold_power,
            wavelength=self.wavelength,
            speed_of_light=self.speed_of_light,
        )


@dataclass(frozen=True)
class DetectionChain:
    """Efficiency budget of the homodyne detection path."""

    quantum_efficiency: float = 0.990
    visibility: float = 0.985
    propagation_efficiency: float = 0.912

    def __post_init__(self):
        for name in ("quantum_efficiency", "visibility", "propagation_efficiency"):
            v = getattr(self, name)
            _require(0.0 < v <= 1.0, f"{name} must be in (0, 1]")

    def total_efficiency(self, params: OpaParams) -> float:
        """K = eta * xi^2 * zeta * rho, in (0, 1]."""
        return (self.quantum_efficiency * self.visibility**2
                * self.propagation_efficiency * escape_efficiency(params))

    def with_propagation_efficiency(self, zeta: float) -> "DetectionChain":
        return DetectionChain(
            quantum_efficiency=self.quantum_efficiency,
            visibility=self.visibility,
            propagation_efficiency=zeta,
        )


@dataclass(frozen=True)
class QuadratureVariancePair:
    """Linear quadrature variances relative to SQL = 1.

    ``r_minus``/``r_plus`` are scalars or arrays (one value per analysis
    frequency).  Positivity is enforced; the ordering r_minus <= r_plus holds
    for direct model output but not after large phase-jitter mixing.
    """

    r_minus: float | np.ndarray
    r_plus: float | np.ndarray

    def __post_init__(self):
        for name in ("r_minus", "r_plus"):
            v = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
                raise ParameterError(f"{name} must be finite and > 0")

    def squeezing_db(self) -> float | np.ndarray:
        return to_db(self.r_minus)

    def anti_squeezing_db(self) -> float | np.ndarray:
        return to_db(self.r_plus)


@dataclass(frozen=True)
class PhaseJitter:
    """RMS residual phase error of a locking loop, in radians."""

    rms: float

    def __post_init__(self):
        _require(self.rms >= 0.0, "rms must be >= 0")
        _require(self.rms < math.pi / 2, "rms must be < pi/2 for a meaningful lock")


def cavity_decay_rate(params: OpaParams) -> float:
    """gamma = c (T + L) / l, in 1/s."""
    return (params.speed_of_light
            * (params.output_coupler_transmission + params.intracavity_loss)
            / params.round_trip_length)


def normalized_pump(params: OpaParams) -> float:
    """x = sqrt(P / P_th) in [0, 1); construction already rejects P >= P_th."""
    return math.sqrt(params.pump_power / params.threshold_power)


def escape_efficiency(params: OpaParams) -> float:
    """rho = T / (T + L)."""
    total = params.output_coupler_transmission + params.intracavity_loss
    if total <= 0.0:
        raise ParameterError("degenerate cavity: T + L must be > 0")
    return params.output_coupler_transmission / total


def squeezing_spectrum(params: OpaParams, chain: DetectionChain,
                       f: float | np.ndarray) -> QuadratureVariancePair:
    """Detected (R_minus, R_plus) at analysis frequency f (Hz, scalar or array)."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0.0):
        raise ParameterError("analysis frequency must be >= 0")
    x = normalized_pump(params)
    k = chain.total_efficiency(params)
    omega = f / cavity_decay_rate(params)
    four_om2 = 4.0 * omega * omega
    r_minus = 1.0 - k * 4.0 * x / ((1.0 + x) ** 2 + four_om2)
    r_plus = 1.0 + k * 4.0 * x / ((1.0 - x) ** 2 + four_om2)
    if f.ndim == 0:
        return QuadratureVariancePair(float(r_minus), float(r_plus))
    return QuadratureVariancePair(r_minus, r_plus)


def apply_phase_jitter(pair: QuadratureVariancePair,
                       jitter: PhaseJitter) -> QuadratureVariancePair:
    """Mix the pair by an RMS phase error; r_minus + r_plus is conserved."""
    s2 = math.sin(jitter.rms) ** 2
    delta = (pair.r_plus - pair.r_minus) * s2
    r_minus = pair.r_minus + delta
    # Written as total-minus-other so the trace is preserved to the last ulp.
    r_plus = (pair.r_minus + pair.r_plus) - r_minus
    return QuadratureVariancePair(r_minus, r_plus)


def parametric_power_gain(x: float, pump_phase: float) -> float:
    """Classical seed power gain of the phase-sensitive amplifier.

    G(phi) = cos^2(phi/2)/(1-x)^2 + sin^2(phi/2)/(1+x)^2, so amplification
    G(0) = 1/(1-x)^2 and deamplification G(pi) = 1/(1+x)^2.
    """
    if not 0.0 <= x < 1.0:
        raise AboveThresholdError(f"normalized pump x={x} must be in [0, 1)")
    c2 = math.cos(pump_phase / 2.0) ** 2
    return c2 / (1.0 - x) ** 2 + (1.0 - c2) / (1.0 + x) ** 2


def mean_intracavity_photons(probe_power: float) -> float:
    """Mean intracavity photon number for a probe power given in nanowatts."""
    if probe_power < 0.0:
        raise ParameterError("probe_power must be >= 0")
    return PHOTONS_PER_NANOWATT * probe_power


def to_db(linear: float | np.ndarray) -> float | np.ndarray:
    """Power decibels: 10 log10(linear)."""
    arr = np.asarray(linear, dtype=float)
    if np.any(arr <= 0.0):
        raise ParameterError("to_db requires positive input")
    out = 10.0 * np.log10(arr)
    return float(out) if arr.ndim == 0 else out


def from_db(db: float | np.ndarray) -> float | np.ndarray:
    arr = np.asarray(db, dtype=float)
    out = np.power(10.0, arr / 10.0)
    return float(out) if arr.ndim == 0 else out
