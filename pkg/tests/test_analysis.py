import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import homsim as hs
from homsim.analysis import (
    Monotonicity,
    classify_monotonic,
    default_taus,
    feature_width,
    symmetry_residual_31,
    visibility,
)
from homsim.engine import InterferencePattern
from homsim.errors import PreconditionError

from conftest import RHOS, SIGMA, jsa_for


def synthetic(values, taus=None, baseline=1.0):
    values = np.asarray(values, dtype=float)
    if taus is None:
        taus = np.linspace(0.0, 10.0, len(values))
    return InterferencePattern(np.asarray(taus, dtype=float), values, baseline, {})


@pytest.mark.parametrize("rho", RHOS)
@pytest.mark.parametrize("scheme, expected", [
    ("3/1", Monotonicity.MONOTONIC_DIP),
    ("4/0", Monotonicity.MONOTONIC_BUMP),
    ("1/1", Monotonicity.MONOTONIC_DIP),
    ("2/0", Monotonicity.MONOTONIC_BUMP),
])
def test_monotonic_schemes(jsas49, sweep, rho, scheme, expected):
    report = classify_monotonic(hs.pattern(jsas49[rho], scheme, sweep))
    assert report.klass is expected
    assert report.extremum_taus == ()


@pytest.mark.parametrize("rho", [0.0, -0.8])
def test_two_two_nonmonotonic(jsas49, sweep, rho):
    report = classify_monotonic(hs.pattern(jsas49[rho], "2/2", sweep))
    assert report.klass is Monotonicity.NONMONOTONIC
    assert len(report.extremum_taus) == 1
    assert 0 < report.extremum_taus[0] < 10


def test_report_dict():
    d = classify_monotonic(synthetic(np.linspace(0.5, 1.0, 20))).to_dict()
    assert d == {"class": "MonotonicDip", "extremum_taus": [], "tolerance_used": 1e-3}


@pytest.mark.parametrize("rho", RHOS)
@pytest.mark.parametrize("scheme", ["3/1", "1/1"])
def test_full_visibility(jsas49, sweep, rho, scheme):
    assert visibility(hs.pattern(jsas49[rho], scheme, sweep)) == pytest.approx(1.0, abs=1e-9)


def test_bunching_visibility(jsas49, sweep):
    assert visibility(hs.pattern(jsas49[0.0], "2/0", sweep)) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("scheme", ["3/1", "4/0"])
def test_positive_correlation_widens(jsas49, sweep, scheme):
    w0 = feature_width(hs.pattern(jsas49[0.0], scheme, sweep))
    w8 = feature_width(hs.pattern(jsas49[0.8], scheme, sweep))
    assert w8 >= 1.1 * w0


@pytest.mark.parametrize("scheme", ["3/1", "4/0", "1/1"])
def test_width_scales_inversely_with_bandwidth(scheme):
    taus = np.linspace(0, 12, 241)
    w = feature_width(hs.pattern(jsa_for(0.8, n=25), scheme, taus))
    w_half = feature_width(hs.pattern(jsa_for(0.8, n=25, sigma=SIGMA / 2), scheme, 2 * taus))
    assert w_half == pytest.approx(2 * w, rel=0.05)


def test_feature_width_interpolates():
    taus = np.linspace(0, 4, 17)
    p = synthetic(1 - np.exp(-taus), taus)
    # deviation exp(-tau) reaches half at ln 2
    assert feature_width(p) == pytest.approx(np.log(2), abs=0.02)


def test_feature_width_requires_feature():
    with pytest.raises(PreconditionError):
        feature_width(synthetic(np.ones(20)))


def test_visibility_requires_zero_sample():
    with pytest.raises(PreconditionError):
        visibility(synthetic(np.ones(20), np.linspace(1, 2, 20)))


def test_flat():
    report = classify_monotonic(synthetic(1 + 1e-5 * np.sin(np.arange(30))))
    assert report.klass is Monotonicity.FLAT


def test_wiggle_below_tolerance_is_ignored():
    y = np.linspace(0.5, 1.0, 40)
    y[10] += 2e-4
    assert classify_monotonic(synthetic(y)).klass is Monotonicity.MONOTONIC_DIP


def test_overshoot_is_nonmonotonic():
    taus = np.linspace(0, 10, 101)
    y = 1 - np.exp(-taus) * np.cos(taus)
    report = classify_monotonic(synthetic(y, taus))
    assert report.klass is Monotonicity.NONMONOTONIC
    assert report.extremum_taus[0] == pytest.approx(np.pi / 2 + np.pi / 4, abs=0.1)


@pytest.mark.parametrize("kwargs, match", [
    ({"values": np.ones(10)}, "at least"),
    ({"values": np.ones(20), "taus": np.r_[0, np.linspace(2, 1, 19)]}, "increasing"),
    ({"values": np.ones(20), "taus": np.linspace(1, 2, 20)}, "tau = 0"),
])
def test_classifier_preconditions(kwargs, match):
    with pytest.raises(PreconditionError, match=match):
        classify_monotonic(synthetic(**kwargs))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=16, max_size=60),
       st.floats(1e-6, 1e6), st.booleans())
def test_monotone_sequences_classified_monotonic(steps, scale, bump):
    steps = np.asarray(steps) + 1e-3
    gap = np.exp(-np.cumsum(steps))  # strictly shrinking distance to 1
    y = 1 + gap if bump else 1 - gap
    report = classify_monotonic(synthetic(scale * y, baseline=scale))
    assert report.klass in (Monotonicity.MONOTONIC_BUMP if bump else Monotonicity.MONOTONIC_DIP,
                            Monotonicity.FLAT)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-8, 1e8))
def test_classifier_scale_invariant(scale):
    taus = np.linspace(0, 10, 101)
    y = 1 - (4 / 3) * np.exp(-taus**2) + np.exp(-2 * taus**2)
    ref = classify_monotonic(synthetic(y, taus))
    got = classify_monotonic(synthetic(scale * y, taus, baseline=scale))
    assert got.klass is ref.klass
    assert got.extremum_taus == ref.extremum_taus


@pytest.mark.parametrize("rho", RHOS)
def test_residual_vanishes_for_symmetric(jsas8, rho):
    assert symmetry_residual_31(jsas8[rho]) < 1e-9


def test_residual_detects_broken_symmetry():
    jsa = jsa_for(0.0, n=8)
    nu = jsa.grid.detunings
    skew = hs.normalize(jsa.with_amplitudes(jsa.amplitudes * (1 + 0.1 * nu / SIGMA)[:, None]))
    r = symmetry_residual_31(skew)
    assert r > 1e-3
    p31 = hs.pattern(skew, "3/1", [0.0]).values[0]
    assert r == pytest.approx(np.sqrt(128 * p31), rel=1e-10)
    rotated = skew.with_amplitudes(np.exp(0.9j) * skew.amplitudes)
    assert symmetry_residual_31(rotated) == pytest.approx(r, rel=1e-12)


def test_default_taus():
    t = default_taus()
    assert t[0] == 0 and t[-1] == 10 and len(t) == 201
    with pytest.raises(hs.ParameterError):
        default_taus(0.0)
