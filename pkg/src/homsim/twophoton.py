"""Two-photon dip (1/1 detection) and bump (2/0 detection) by direct 2D quadrature."""

from __future__ import annotations

import numpy as np

from .engine import InterferencePattern, _as_taus, check_normalized, pattern_meta
from .errors import ParameterError
from .spectral import SampledJsa
from .terms import DetectionScheme, TermTable, two_photon_table


def two_photon_pattern(jsa: SampledJsa, scheme, taus, table: TermTable | None = None,
                       on_unnormalized: str = "warn") -> InterferencePattern:
    scheme = DetectionScheme.parse(scheme)
    if scheme.is_four_photon:
        raise ParameterError(f"{scheme.value} is a four-photon scheme")
    table = table or two_photon_table(scheme)
    taus = _as_taus(taus)
    check_normalized(jsa, on_unnormalized)

    f = jsa.amplitudes
    nu = jsa.grid.detunings
    n = jsa.grid.n_points
    ar = np.arange(n)
    idx = {1: ar[:, None], 2: ar[None, :]}
    freq = {1: nu[:, None], 2: nu[None, :]}
    terms = []
    for term in table.terms:
        (a, b), = term.pairing
        (m,) = tuple(term.phase_mask)
        terms.append((term.sign * f[idx[a], idx[b]], freq[m]))

    h2 = jsa.grid.spacing**2
    pref = float(scheme.prefactor)
    values = np.empty(len(taus))
    for i, tau in enumerate(taus):
        amp = sum(t * np.exp(-1j * w * tau) for t, w in terms)
        values[i] = pref * h2 * float(np.sum(amp.real**2 + amp.imag**2))
    base = pref * h2 * sum(float(np.sum(np.abs(t) ** 2)) for t, _ in terms)
    return InterferencePattern(taus, values, base, pattern_meta(jsa, scheme, "direct2d"))
