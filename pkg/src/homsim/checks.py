"""Regression suite run by ``homsim check``.

Every check returns a plain dict so the whole report serializes to JSON.
Term tables may be overridden to confirm that a corrupted table is caught.
"""

from __future__ import annotations

import numpy as np

from . import __version__
from .analysis import symmetry_residual_31
from .engine import build_kernels, pattern, pattern_symmetric_22
from .oracle import DEFAULT_ORACLE_CAP, oracle_pattern
from .spectral import (
    GaussianJsaParams,
    gaussian_jsa,
    gaussian_sigma_from_fwhm,
    make_grid,
    normalize,
    shift_jsa,
)
from .terms import DetectionScheme, expand_table, table_for

FOUR_PHOTON = (DetectionScheme.TWO_TWO, DetectionScheme.THREE_ONE, DetectionScheme.FOUR_ZERO)
DEFAULT_RHOS = (0.0, -0.8, 0.8)

# the six bracketed terms of each squared amplitude, transcribed by hand
GOLDEN_EXPANSIONS = {
    DetectionScheme.TWO_TWO: [
        "+(f13 f24 + f14 f23) exp(-i(w1+w2)tau)",
        "+(f31 f42 + f32 f41) exp(-i(w3+w4)tau)",
        "-(f12 f34 + f14 f32) exp(-i(w1+w3)tau)",
        "-(f12 f43 + f13 f42) exp(-i(w1+w4)tau)",
        "-(f21 f34 + f24 f31) exp(-i(w2+w3)tau)",
        "-(f21 f43 + f23 f41) exp(-i(w2+w4)tau)",
    ],
    DetectionScheme.THREE_ONE: [
        "-(f13 f24 + f14 f23) exp(-i(w1+w2)tau)",
        "+(f31 f42 + f32 f41) exp(-i(w3+w4)tau)",
        "-(f12 f34 + f14 f32) exp(-i(w1+w3)tau)",
        "+(f12 f43 + f13 f42) exp(-i(w1+w4)tau)",
        "-(f21 f34 + f24 f31) exp(-i(w2+w3)tau)",
        "+(f21 f43 + f23 f41) exp(-i(w2+w4)tau)",
    ],
    DetectionScheme.FOUR_ZERO: [
        "+(f13 f24 + f14 f23) exp(-i(w1+w2)tau)",
        "+(f31 f42 + f32 f41) exp(-i(w3+w4)tau)",
        "+(f12 f34 + f14 f32) exp(-i(w1+w3)tau)",
        "+(f12 f43 + f13 f42) exp(-i(w1+w4)tau)",
        "+(f21 f34 + f24 f31) exp(-i(w2+w3)tau)",
        "+(f21 f43 + f23 f41) exp(-i(w2+w4)tau)",
    ],
}


def max_rel_dev(a, b) -> float:
    """Sup-norm deviation of ``a`` from ``b`` relative to the sup norm of ``b``."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def _result(name, deviation, tolerance, **extra):
    out = {"name": name, "max_deviation": deviation, "tolerance": tolerance,
           "passed": bool(deviation < tolerance)}
    out.update(extra)
    return out


def _tables(overrides):
    overrides = overrides or {}
    return {s: overrides.get(s) or table_for(s) for s in DetectionScheme}


def default_jsas(n_points: int, rhos=DEFAULT_RHOS, span_sigmas: float = 4.0):
    sigma = gaussian_sigma_from_fwhm(1584.0, 2.0)
    grid = make_grid(sigma, span_sigmas, n_points)
    return {rho: gaussian_jsa(GaussianJsaParams(sigma, rho), grid) for rho in rhos}


def check_terms(tables) -> dict:
    mismatches = []
    for scheme, golden in GOLDEN_EXPANSIONS.items():
        got = expand_table(tables[scheme])
        mismatches += [f"{scheme.value}[{i}]: {g!r} != {w!r}"
                       for i, (g, w) in enumerate(zip(got, golden)) if g != w]
    return {"name": "terms_golden", "passed": not mismatches, "mismatches": mismatches}


def check_oracle(jsas, tables, taus, threads=None) -> dict:
    worst = 0.0
    for jsa in jsas.values():
        for scheme in FOUR_PHOTON:
            fast = pattern(jsa, scheme, taus, threads=threads, table=tables[scheme])
            slow = oracle_pattern(jsa, scheme, taus, table=tables[scheme])
            worst = max(worst, max_rel_dev(fast.values, slow.values))
    return _result("engine_vs_oracle", worst, 1e-10)


def check_eq8(jsas, tables, taus, threads=None) -> dict:
    worst = 0.0
    for jsa in jsas.values():
        fast = pattern(jsa, DetectionScheme.TWO_TWO, taus, threads=threads, table=tables[DetectionScheme.TWO_TWO])
        alt = pattern_symmetric_22(jsa, taus)
        worst = max(worst, max_rel_dev(fast.values, alt.values))
    return _result("eq8_path", worst, 1e-10)


def check_shift(tables, taus, shifts=(-3, 3), threads=None) -> dict:
    # wide span so that a 3-bin shift only drops samples below 1e-11 of the peak
    jsas = default_jsas(49, span_sigmas=8.0)
    worst = 0.0
    for jsa in jsas.values():
        for scheme in DetectionScheme:
            ref = pattern(jsa, scheme, taus, threads=threads, table=tables[scheme]).values
            for delta in shifts:
                moved = pattern(shift_jsa(jsa, delta), scheme, taus, threads=threads,
                                table=tables[scheme], on_unnormalized="ignore").values
                worst = max(worst, max_rel_dev(moved, ref))
    return _result("shift_invariance", worst, 1e-9)


def check_constants(jsas, tables, threads=None) -> dict:
    """Zero-delay identities that hold on any grid for a normalized symmetric JSA."""
    worst = 0.0
    detail = {}
    zero = np.array([0.0])
    for rho, jsa in jsas.items():
        p22 = pattern(jsa, "2/2", zero, threads=threads, table=tables[DetectionScheme.TWO_TWO]).values[0]
        ks31 = build_kernels(jsa, tables[DetectionScheme.THREE_ONE], threads=threads)
        p31 = ks31.pattern(zero).values[0]
        p11 = pattern(jsa, "1/1", zero, table=tables[DetectionScheme.ANTI_BUNCH_11])
        p20 = pattern(jsa, "2/0", zero, table=tables[DetectionScheme.BUNCH_20])
        devs = {
            "P22(0)=1/4": abs(p22 - 0.25) / 0.25,
            "P31(0)=0": abs(p31) / ks31.baseline,
            "P11(0)=0": abs(p11.values[0]),
            "P11 baseline=1/2": abs(p11.baseline - 0.5) / 0.5,
            "P20(0)=1/4": abs(p20.values[0] - 0.25) / 0.25,
            "P20 baseline=1/8": abs(p20.baseline - 0.125) / 0.125,
        }
        detail[str(rho)] = devs
        worst = max(worst, *devs.values())
    return _result("analytic_constants", worst, 1e-9, detail=detail)


def check_symmetry_residual(jsas) -> dict:
    worst = max(symmetry_residual_31(j) for j in jsas.values())
    # informational: a JSA with broken exchange symmetry must give a positive residual
    j0 = jsas[next(iter(jsas))]
    nu = j0.grid.detunings
    sigma = float(j0.provenance.get("sigma_rad_per_ps", 1.0))
    skewed = normalize(j0.with_amplitudes(j0.amplitudes * (1 + 0.1 * nu / sigma)[:, None], note="skewed"))
    return _result("symmetry_residual", worst, 1e-9,
                   asymmetric_residual=symmetry_residual_31(skewed), informational=["asymmetric_residual"])


def run_checks(n_points: int = 8, rhos=DEFAULT_RHOS, n_taus: int = 21, tau_max: float = 10.0,
               threads: int | None = None, tables=None, oracle_cap: int = DEFAULT_ORACLE_CAP) -> dict:
    if n_points > oracle_cap:
        from .errors import OracleCapError
        raise OracleCapError(f"check grid n_points={n_points} exceeds oracle cap {oracle_cap}")
    tables = _tables(tables)
    taus = np.linspace(-tau_max, tau_max, n_taus)
    jsas = default_jsas(n_points, rhos)
    results = [
        check_terms(tables),
        check_oracle(jsas, tables, taus, threads),
        check_eq8(jsas, tables, taus, threads),
        check_shift(tables, taus, threads=threads),
        check_constants(jsas, tables, threads),
        check_symmetry_residual(jsas),
    ]
    return {
        "passed": all(r["passed"] for r in results),
        "n_points": n_points,
        "rhos": list(rhos),
        "checks": results,
        "version": __version__,
    }
