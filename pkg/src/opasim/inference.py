"""Parameter recovery from measured squeezing/anti-squeezing pairs.

Two inversions are provided:

* residual phase jitter from the degradation of a measured pair relative to
  an ideal (vacuum-locked) pair, using the cos^2/sin^2 mixing law;
* the operating point (normalized pump x, total detection efficiency K) from
  a low-frequency pair, by inverting the two quadrature-variance relations.

The jitter fit minimizes the joint dB-space residual of both quadratures.
dB space keeps the two residuals commensurate; a linear-variance least
squares is dominated entirely by the anti-squeezed quadrature (twenty times
larger) and degenerates on real data where the measured anti-squeezing sits
slightly above the ideal value.  Closed-form single-quadrature estimates are
exposed separately for diagnostics.

All fits are deterministic; root finding is bracketed bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, InconsistentDataError, InfeasiblePairError, ParameterError
from .noise import TimeSeries
from .physics import PhaseJitter, from_db

__all__ = [
    "MeasurementPair",
    "OperatingPointFit",
    "StabilityMetrics",
    "fit_phase_jitter",
    "per_quadrature_jitter_estimates",
    "fit_opa_operating_point",
    "stability_metrics",
]

_BISECT_TOL = 1e-12
_MAX_MIX = 0.5  # sin^2(pi/4): largest mixing considered by the fit


@dataclass(frozen=True)
class MeasurementPair:
    """Measured squeezing (<= 0 dB) and anti-squeezing (>= 0 dB) at one frequency."""

    squeezing_db: float
    anti_squeezing_db: float
    frequency: float = 0.0

    def __post_init__(self):
        if not (self.squeezing_db <= 0.0 <= self.anti_squeezing_db):
            raise ParameterError(
                "expected squeezing_db <= 0 <= anti_squeezing_db for squeezed-state data")
        if self.frequency < 0.0:
            raise ParameterError("frequency must be >= 0")

    def linear(self) -> tuple[float, float]:
        return from_db(self.squeezing_db), from_db(self.anti_squeezing_db)


@dataclass(frozen=True)
class OperatingPointFit:
    """Recovered (x, K); ``degenerate`` marks a 0 dB pair where K is undefined."""

    normalized_pump: float
    total_efficiency: float
    degenerate: bool = False


@dataclass(frozen=True)
class StabilityMetrics:
    std_db: float
    peak_to_peak_db: float
    drift_db_per_hour: float


def _joint_db_objective(u: float, rm_i: float, rp_i: float,
                        obs_sq_db: float, obs_anti_db: float) -> tuple[float, float]:
    """Value and derivative of the summed squared dB residuals at mixing u."""
    delta = rp_i - rm_i
    minus = rm_i + delta * u
    plus = rp_i - delta * u
    scale = 10.0 / math.log(10.0)
    r1 = 10.0 * math.log10(minus) - obs_sq_db
    r2 = 10.0 * math.log10(plus) - obs_anti_db
    d1 = scale * delta / minus
    d2 = -scale * delta / plus
    return r1 * r1 + r2 * r2, 2.0 * (r1 * d1 + r2 * d2)


def fit_phase_jitter(observed: MeasurementPair, ideal: MeasurementPair) -> PhaseJitter:
    """RMS phase jitter that degrades ``ideal`` into ``observed``.

    Joint least squares over both quadratures in dB space, solved by a coarse
    scan plus bracketed bisection of the objective derivative.
    """
    if observed.squeezing_db < ideal.squeezing_db:
        raise InconsistentDataError(
            f"observed squeezing {observed.squeezing_db} dB is deeper than the "
            f"ideal {ideal.squeezing_db} dB")
    rm_i, rp_i = ideal.linear()
    if rp_i <= rm_i:
        raise InconsistentDataError("ideal pair must have anti-squeezing above squeezing")
    obs_sq, obs_anti = observed.squeezing_db, observed.anti_squeezing_db

    grid = np.linspace(0.0, _MAX_MIX, 4097)
    values = [_joint_db_objective(u, rm_i, rp_i, obs_sq, obs_anti)[0] for u in grid]
    k = int(np.argmin(values))
    lo = grid[max(0, k - 1)]
    hi = grid[min(grid.size - 1, k + 1)]
    dlo = _joint_db_objective(lo, rm_i, rp_i, obs_sq, obs_anti)[1]
    dhi = _joint_db_objective(hi, rm_i, rp_i, obs_sq, obs_anti)[1]
    if dlo >= 0.0:
        u_star = lo
    elif dhi <= 0.0:
        u_star = hi
    else:
        while hi - lo > _BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if _joint_db_objective(mid, rm_i, rp_i, obs_sq, obs_anti)[1] < 0.0:
                lo = mid
            else:
                hi = mid
        u_star = 0.5 * (lo + hi)
    return PhaseJitter(math.asin(math.sqrt(u_star)))


def per_quadrature_jitter_estimates(observed: MeasurementPair,
                                    ideal: MeasurementPair) -> tuple[float, float]:
    """Closed-form jitter (rad) from each quadrature alone; NaN when infeasible."""
    rm_i, rp_i = ideal.linear()
    rm_o, rp_o = observed.linear()
    delta = rp_i - rm_i

    def solve(u: float) -> float:
        if not 0.0 <= u <= _MAX_MIX:
            return float("nan")
        return math.asin(math.sqrt(u))

    return solve((rm_o - rm_i) / delta), solve((rp_i - rp_o) / delta)


def fit_opa_operating_point(pair: MeasurementPair) -> OperatingPointFit:
    """Invert a low-frequency pair for (normalized pump x, total efficiency K).

    The pair of relations at zero analysis frequency gives the closed form
    ((1+x)/(1-x))^2 = (R_plus - 1)/(1 - R_minus), then K from either relation.
    Valid only for frequency << cavity decay rate.
    """
    rm, rp = pair.linear()
    if math.isclose(rm, 1.0, rel_tol=0, abs_tol=1e-12) and \
            math.isclose(rp, 1.0, rel_tol=0, abs_tol=1e-12):
        return OperatingPointFit(0.0, float("nan"), degenerate=True)
    if rm >= 1.0 or rp <= 1.0:
        raise InfeasiblePairError(
            f"pair ({pair.squeezing_db}, {pair.anti_squeezing_db}) dB does not "
            "bracket the SQL")
    ratio = (rp - 1.0) / (1.0 - rm)
    s = math.sqrt(ratio)
    x = (s - 1.0) / (s + 1.0)
    if not 0.0 < x < 1.0:
        raise InfeasiblePairError("implied pump ratio outside (0, 1)")
    k = (1.0 - rm) * (1.0 + x) ** 2 / (4.0 * x)
    if not 0.0 < k <= 1.0 + 1e-9:
        raise InfeasiblePairError(f"implied total efficiency {k:.6f} outside (0, 1]")
    return OperatingPointFit(x, min(k, 1.0))


def stability_metrics(trace: TimeSeries) -> StabilityMetrics:
    """Sample std, range, and linear drift of a squeezing-vs-time dB trace."""
    if len(trace) < 10:
        raise AnalysisError("stability metrics need at least 10 points")
    y = trace.samples
    hours = trace.times() / 3600.0
    slope = float(np.polyfit(hours, y, 1)[0])
    return StabilityMetrics(std_db=float(np.std(y)),
                            peak_to_peak_db=float(np.ptp(y)),
                            drift_db_per_hour=slope)
