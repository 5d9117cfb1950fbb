"""Brute-force four-photon coincidence probability.

Evaluates the squared six-term amplitude at every point of the 4D grid for
every delay, exactly as written.  Slow on purpose; the grid size is capped.
"""

from __future__ import annotations

import numpy as np

from .engine import InterferencePattern, _as_taus, check_normalized, pattern_meta
from .errors import OracleCapError, ParameterError
from .spectral import SampledJsa
from .terms import DetectionScheme, TermTable, term_table

DEFAULT_ORACLE_CAP = 16


def oracle_pattern(jsa: SampledJsa, scheme, taus, table: TermTable | None = None,
                   cap: int = DEFAULT_ORACLE_CAP) -> InterferencePattern:
    scheme = DetectionScheme.parse(scheme)
    if not scheme.is_four_photon:
        raise ParameterError("the oracle covers the four-photon schemes only")
    table = table or term_table(scheme)
    n = jsa.grid.n_points
    if n > cap:
        raise OracleCapError(f"oracle limited to n_points <= {cap}, got {n}")
    taus = _as_taus(taus)
    check_normalized(jsa)

    f = jsa.amplitudes
    nu = jsa.grid.detunings
    J = dict(zip((1, 2, 3, 4), np.meshgrid(*([np.arange(n)] * 4), indexing="ij")))
    h4 = jsa.grid.spacing**4
    pref = float(scheme.prefactor)

    values = np.empty(len(taus))
    for i, tau in enumerate(taus):
        total = np.zeros((n, n, n, n), dtype=complex)
        for term in table.terms:
            (a, b), (c, d) = term.pairing
            amp = f[J[a], J[b]] * f[J[c], J[d]] + f[J[a], J[d]] * f[J[c], J[b]]
            phase = np.exp(-1j * sum(nu[J[m]] for m in sorted(term.phase_mask)) * tau)
            total += term.sign * amp * phase
        values[i] = pref * h4 * float(np.sum(np.abs(total) ** 2))

    diagonal = 0.0
    for term in table.terms:
        (a, b), (c, d) = term.pairing
        amp = f[J[a], J[b]] * f[J[c], J[d]] + f[J[a], J[d]] * f[J[c], J[b]]
        diagonal += float(np.sum(np.abs(amp) ** 2))
    return InterferencePattern(taus, values, pref * h4 * diagonal, pattern_meta(jsa, scheme, "oracle"))
