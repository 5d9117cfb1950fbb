"""Qualitative readouts of interference patterns."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .engine import InterferencePattern
from .errors import ParameterError, PreconditionError
from .spectral import SampledJsa
from .terms import term_table

MIN_SAMPLES = 16


class Monotonicity(str, Enum):
    MONOTONIC_DIP = "MonotonicDip"
    MONOTONIC_BUMP = "MonotonicBump"
    NONMONOTONIC = "Nonmonotonic"
    FLAT = "Flat"

    @property
    def is_monotonic(self) -> bool:
        return self in (Monotonicity.MONOTONIC_DIP, Monotonicity.MONOTONIC_BUMP)


@dataclass(frozen=True)
class MonotonicityReport:
    klass: Monotonicity
    extremum_taus: tuple
    tolerance_used: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["class"] = self.klass.value
        del d["klass"]
        d["extremum_taus"] = list(self.extremum_taus)
        return d


def _check_sweep(pattern: InterferencePattern) -> None:
    taus = pattern.taus
    if len(taus) < MIN_SAMPLES:
        raise PreconditionError(f"need at least {MIN_SAMPLES} delay samples, got {len(taus)}")
    if not np.all(np.diff(taus) > 0):
        raise PreconditionError("delays must be strictly increasing")
    if taus[0] != 0:
        raise PreconditionError("delay sweep must start at tau = 0")


def _turning_points(y: np.ndarray, tol: float) -> list[int]:
    """Indices of interior extrema whose excursion on both sides exceeds ``tol``."""
    turns = []
    trend = 0
    pivot = 0
    for i in range(1, len(y)):
        if trend == 0:
            # an initial wiggle smaller than tol does not count as a turn
            if y[i] - y[: i + 1].min() > tol:
                trend, pivot = +1, i
            elif y[: i + 1].max() - y[i] > tol:
                trend, pivot = -1, i
        elif trend > 0:
            if y[i] >= y[pivot]:
                pivot = i
            elif y[pivot] - y[i] > tol:
                turns.append(pivot)
                trend, pivot = -1, i
        else:
            if y[i] <= y[pivot]:
                pivot = i
            elif y[i] - y[pivot] > tol:
                turns.append(pivot)
                trend, pivot = +1, i
    return turns


def classify_monotonic(pattern: InterferencePattern, rel_tolerance: float = 1e-3) -> MonotonicityReport:
    """Decide whether the normalized pattern approaches 1 monotonically.

    A sweep is monotonic when it never reverses direction by more than
    ``rel_tolerance`` (in units of the baseline).  Each reversal beyond the
    tolerance is reported as an interior extremum.
    """
    _check_sweep(pattern)
    y = pattern.normalized
    tol = float(rel_tolerance)
    if np.max(np.abs(y - 1.0)) <= tol:
        return MonotonicityReport(Monotonicity.FLAT, (), tol)
    turns = _turning_points(y, tol)
    if turns:
        return MonotonicityReport(Monotonicity.NONMONOTONIC,
                                  tuple(float(pattern.taus[i]) for i in turns), tol)
    klass = Monotonicity.MONOTONIC_DIP if y[0] < 1.0 else Monotonicity.MONOTONIC_BUMP
    return MonotonicityReport(klass, (), tol)


def _value_at_zero(pattern: InterferencePattern) -> float:
    hit = np.flatnonzero(pattern.taus == 0)
    if not len(hit):
        raise PreconditionError("pattern has no sample at tau = 0")
    return float(pattern.values[hit[0]])


def visibility(pattern: InterferencePattern) -> float:
    """``|P(0) - baseline| / baseline``."""
    return abs(_value_at_zero(pattern) - pattern.baseline) / pattern.baseline


def feature_width(pattern: InterferencePattern, tolerance: float = 1e-6) -> float:
    """Largest delay at which the deviation from baseline is still half its zero-delay value.

    The crossing between the last qualifying sample and the next one is
    located by linear interpolation of the deviation magnitude.
    """
    p0 = _value_at_zero(pattern)
    depth = abs(p0 - pattern.baseline)
    if depth <= tolerance * pattern.baseline:
        raise PreconditionError("pattern has no feature at tau = 0")
    mask = pattern.taus >= 0
    taus = pattern.taus[mask]
    dev = np.abs(pattern.values[mask] - pattern.baseline)
    order = np.argsort(taus)
    taus, dev = taus[order], dev[order]
    half = 0.5 * depth
    above = np.flatnonzero(dev >= half)
    last = int(above[-1])
    if last == len(taus) - 1:
        return float(taus[last])
    t0, t1 = taus[last], taus[last + 1]
    d0, d1 = dev[last], dev[last + 1]
    return float(t0 + (d0 - half) / (d0 - d1) * (t1 - t0))


def symmetry_residual_31(jsa: SampledJsa) -> float:
    """Root of the zero-delay 3/1 integral of the squared six-term amplitude.

    Vanishes exactly when the generalized exchange symmetry of the 3/1 scheme
    holds; equals ``sqrt(128 * P31(0))``.
    """
    from .engine import _slice_index, term_amplitudes

    table = term_table("3/1")
    f = jsa.amplitudes
    n = jsa.grid.n_points
    total = 0.0
    for j1 in range(n):
        amp = sum(term_amplitudes(f, table, _slice_index(j1, n)))
        total += float(np.sum(np.abs(amp) ** 2))
    return math.sqrt(total * jsa.grid.spacing**4)


def default_taus(tau_max: float = 10.0, n: int = 201) -> np.ndarray:
    if n < 2 or not tau_max > 0:
        raise ParameterError("need tau_max > 0 and at least two samples")
    return np.linspace(0.0, tau_max, n)
