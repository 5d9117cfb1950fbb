"""Acceptance gate: every criterion at its stated tolerance.

Each test records a verdict with ``record``; the session prints one
PASS/FAIL line per criterion at the end of the run.
"""

import time
import warnings

import numpy as np
import pytest

import homsim as hs
from homsim.analysis import Monotonicity, classify_monotonic, feature_width
from homsim.cli import main
from homsim.terms import expand_table

from conftest import FOUR, RHOS, TWO, jsa_for, record, rel_dev

TAUS21 = np.linspace(-10, 10, 21)
SWEEP = np.linspace(0.0, 10.0, 201)

GOLDEN = {
    "2/2": ["+(f13 f24 + f14 f23) exp(-i(w1+w2)tau)",
            "+(f31 f42 + f32 f41) exp(-i(w3+w4)tau)",
            "-(f12 f34 + f14 f32) exp(-i(w1+w3)tau)",
            "-(f12 f43 + f13 f42) exp(-i(w1+w4)tau)",
            "-(f21 f34 + f24 f31) exp(-i(w2+w3)tau)",
            "-(f21 f43 + f23 f41) exp(-i(w2+w4)tau)"],
    "3/1": ["-(f13 f24 + f14 f23) exp(-i(w1+w2)tau)",
            "+(f31 f42 + f32 f41) exp(-i(w3+w4)tau)",
            "-(f12 f34 + f14 f32) exp(-i(w1+w3)tau)",
            "+(f12 f43 + f13 f42) exp(-i(w1+w4)tau)",
            "-(f21 f34 + f24 f31) exp(-i(w2+w3)tau)",
            "+(f21 f43 + f23 f41) exp(-i(w2+w4)tau)"],
    "4/0": ["+(f13 f24 + f14 f23) exp(-i(w1+w2)tau)",
            "+(f31 f42 + f32 f41) exp(-i(w3+w4)tau)",
            "+(f12 f34 + f14 f32) exp(-i(w1+w3)tau)",
            "+(f12 f43 + f13 f42) exp(-i(w1+w4)tau)",
            "+(f21 f34 + f24 f31) exp(-i(w2+w3)tau)",
            "+(f21 f43 + f23 f41) exp(-i(w2+w4)tau)"],
}


def test_criterion_1_term_tables():
    start = time.perf_counter()
    tokens_ok = all(expand_table(hs.term_table(s)) == GOLDEN[s] for s in FOUR)
    signs_ok = (hs.term_table("2/2").signs == (1, 1, -1, -1, -1, -1)
                and hs.term_table("3/1").signs == (-1, 1, -1, 1, -1, 1)
                and hs.term_table("4/0").signs == (1,) * 6)
    elapsed = time.perf_counter() - start
    ok = tokens_ok and signs_ok and elapsed < 1.0
    record(1, ok, f"golden expansion match={tokens_ok}, signs={signs_ok}, {elapsed:.3f} s")
    assert ok


def test_criterion_2_oracle_equivalence():
    start = time.perf_counter()
    worst = 0.0
    for rho in RHOS:
        jsa = jsa_for(rho, n=8)
        for scheme in FOUR:
            slow = hs.oracle_pattern(jsa, scheme, TAUS21).values
            worst = max(worst, rel_dev(hs.pattern(jsa, scheme, TAUS21).values, slow))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 30
    record(2, ok, f"max rel deviation {worst:.2e} (< 1e-10), {elapsed:.1f} s")
    assert ok


def test_criterion_3_symmetric_cosine_path():
    start = time.perf_counter()
    worst = 0.0
    for rho in RHOS:
        jsa = jsa_for(rho, n=16)
        alt = hs.pattern_symmetric_22(jsa, TAUS21).values
        worst = max(worst, rel_dev(alt, hs.pattern(jsa, "2/2", TAUS21).values))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 60
    record(3, ok, f"max rel deviation {worst:.2e} (< 1e-10), {elapsed:.1f} s")
    assert ok


@pytest.mark.parametrize("rho", RHOS)
def test_criterion_4_analytic_constants(rho):
    jsa = jsa_for(rho, n=49)
    zero = [0.0]
    p11 = hs.pattern(jsa, "1/1", zero)
    p20 = hs.pattern(jsa, "2/0", zero)
    p22 = hs.pattern(jsa, "2/2", zero).values[0]
    p31 = hs.pattern(jsa, "3/1", zero)
    checks = {
        "P11(0)=0": abs(p11.values[0]) < 1e-12,
        "P11 baseline=1/2": abs(p11.baseline - 0.5) / 0.5 < 1e-6,
        "P20 baseline=1/8": abs(p20.baseline - 0.125) / 0.125 < 1e-6,
        "P20(0)=1/4": abs(p20.values[0] - 0.25) / 0.25 < 1e-6,
        "P22(0)=1/4": abs(p22 - 0.25) / 0.25 < 1e-5,
        "P31(0)=0": abs(p31.values[0]) < 1e-9 * p31.baseline,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    record(4, ok, f"rho={rho:+.1f}: " + ("all six identities hold" if ok else "failed " + ", ".join(failed)))
    assert ok


@pytest.fixture(scope="module")
def figure2():
    start = time.perf_counter()
    out = {}
    for rho in RHOS:
        jsa = jsa_for(rho, n=49)
        for scheme in FOUR + TWO:
            out[scheme, rho] = hs.pattern(jsa, scheme, SWEEP)
    return out, time.perf_counter() - start


FIG2_EXPECTED = [
    ("2/2", 0.0, {Monotonicity.NONMONOTONIC}),
    ("2/2", -0.8, {Monotonicity.NONMONOTONIC}),
    ("2/2", 0.8, {Monotonicity.MONOTONIC_DIP}),
] + [("3/1", rho, {Monotonicity.MONOTONIC_DIP}) for rho in RHOS] \
  + [("4/0", rho, {Monotonicity.MONOTONIC_BUMP}) for rho in RHOS] \
  + [(s, rho, {Monotonicity.MONOTONIC_DIP, Monotonicity.MONOTONIC_BUMP}) for s in TWO for rho in RHOS]


@pytest.mark.parametrize("scheme, rho, allowed", FIG2_EXPECTED,
                         ids=[f"{s}-rho{r:+.1f}" for s, r, _ in FIG2_EXPECTED])
def test_criterion_5_figure2_classes(figure2, scheme, rho, allowed):
    patterns, elapsed = figure2
    p = patterns[scheme, rho]
    report = classify_monotonic(p)
    ok = report.klass in allowed and elapsed < 600
    want = "/".join(sorted(a.value for a in allowed))
    extra = f" extrema at {report.extremum_taus} ps" if report.extremum_taus else ""
    record(5, ok, f"{scheme} rho={rho:+.1f}: got {report.klass.value}, want {want}{extra}")
    assert ok


@pytest.mark.parametrize("scheme", ["3/1", "4/0"])
def test_criterion_6_fatter_patterns(figure2, scheme):
    patterns, _ = figure2
    w = {rho: feature_width(patterns[scheme, rho]) for rho in RHOS}
    ok = w[0.8] >= 1.1 * max(w[0.0], w[-0.8])
    record(6, ok, f"{scheme}: widths +0.8={w[0.8]:.3f}, 0={w[0.0]:.3f}, -0.8={w[-0.8]:.3f} ps")
    assert ok


@pytest.mark.parametrize("scheme", FOUR + TWO)
def test_criterion_7_shift_invariance(scheme):
    worst = 0.0
    for rho in RHOS:
        jsa = jsa_for(rho, n=49, span=8.0)
        ref = hs.pattern(jsa, scheme, TAUS21).values
        for delta in (-3, 3):
            moved = hs.pattern(hs.shift_jsa(jsa, delta), scheme, TAUS21, on_unnormalized="ignore").values
            worst = max(worst, rel_dev(moved, ref))
    ok = worst < 1e-9
    record(7, ok, f"{scheme}: max rel deviation {worst:.2e} (< 1e-9)")
    assert ok


@pytest.mark.parametrize("scheme", FOUR + TWO)
def test_criterion_8_hygiene(scheme):
    taus = np.linspace(-10, 10, 201)
    problems = []
    for rho in RHOS:
        jsa = jsa_for(rho, n=49)
        p = hs.pattern(jsa, scheme, taus)
        b = p.baseline
        if p.meta.get("max_abs_imag", 0.0) >= 1e-10 * b:
            problems.append(f"imag rho={rho}")
        if np.any(p.values < -1e-10 * b):
            problems.append(f"negative rho={rho}")
        if np.max(np.abs(p.values - p.values[::-1])) > 1e-10 * b:
            problems.append(f"odd rho={rho}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            doubled = hs.pattern(jsa.with_amplitudes(2 * jsa.amplitudes), scheme, taus).values
        power = 4 if scheme in FOUR else 2
        if not np.array_equal(doubled, 2**power * p.values):
            problems.append(f"homogeneity rho={rho}")
    ok = not problems
    record(8, ok, f"{scheme}: realness/positivity/evenness/homogeneity " + ("ok" if ok else ", ".join(problems)))
    assert ok


@pytest.mark.slow
@pytest.mark.parametrize("scheme", FOUR + TWO)
def test_criterion_8_grid_doubling(scheme):
    worst = 0.0
    for rho in RHOS:
        coarse = hs.pattern(jsa_for(rho, n=49), scheme, SWEEP).values
        fine = hs.pattern(jsa_for(rho, n=97), scheme, SWEEP).values
        worst = max(worst, rel_dev(coarse, fine))
    ok = worst < 1e-4
    record(8, ok, f"{scheme}: n=49 vs n=97 rel deviation {worst:.2e} (< 1e-4)")
    assert ok


@pytest.mark.parametrize("scheme", FOUR)
def test_criterion_9_determinism(tmp_path, monkeypatch, scheme):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("HOMSIM_THREADS", raising=False)
    base = ["pattern", "--scheme", scheme, "--rho", "0.8"]
    assert main(base + ["--threads", "1", "--out", "t1"]) == 0
    assert main(base + ["--threads", "8", "--out", "t8"]) == 0
    same = (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t8.csv").read_bytes()
    record(9, same, f"{scheme}: CSV bytes identical for 1 and 8 threads = {same}")
    assert same
