"""Four-photon coincidence patterns from precomputed delay kernels.

Expanding ``|sum_k T_k exp(-i phi_k tau)|**2`` over the six terms gives a
delay-independent diagonal plus cross terms ``T_k conj(T_l)`` whose only
delay dependence is ``exp(-i u tau)`` with ``u = phi_k - phi_l``.  On a uniform
grid ``u`` is always an integer multiple of the spacing, so each cross product
is binned exactly into a 1D kernel over the difference-frequency lattice.
One pass over the 4D grid then serves any number of delays.
"""

from __future__ import annotations

import itertools
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from . import __version__
from .errors import MemoryBoundError, NormalizationError, ParameterError, PreconditionError
from .spectral import SampledJsa, exchange_symmetry_defect
from .terms import DetectionScheme, TermTable, term_table

NORM_TOLERANCE = 1e-9
DEFAULT_MAX_WORKING_BYTES = 4 * 2**30
TAU_CHUNK = 64


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else ``HOMSIM_THREADS``, else 1."""
    if threads is None:
        env = os.environ.get("HOMSIM_THREADS")
        threads = int(env) if env else 1
    threads = int(threads)
    if threads < 1:
        raise ParameterError(f"thread count must be >= 1, got {threads}")
    return threads


def check_normalized(jsa: SampledJsa, on_unnormalized: str = "warn") -> None:
    norm = jsa.norm
    if abs(norm - 1.0) <= NORM_TOLERANCE:
        return
    msg = f"JSA norm is {norm!r}, expected 1; probabilities scale with norm**2"
    if on_unnormalized == "raise":
        raise NormalizationError(msg)
    if on_unnormalized == "warn":
        warnings.warn(msg, stacklevel=3)
    elif on_unnormalized != "ignore":
        raise ParameterError(f"on_unnormalized must be 'warn', 'raise' or 'ignore', not {on_unnormalized!r}")


@dataclass(frozen=True, eq=False)
class InterferencePattern:
    taus: np.ndarray
    values: np.ndarray
    baseline: float
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if taus.shape != values.shape or taus.ndim != 1:
            raise ParameterError("taus and values must be 1D arrays of equal length")
        if not self.baseline > 0:
            raise ParameterError(f"baseline must be positive, got {self.baseline}")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def normalized(self) -> np.ndarray:
        return self.values / self.baseline

    @property
    def scheme(self) -> DetectionScheme | None:
        s = self.meta.get("scheme")
        return DetectionScheme.parse(s) if s else None

    def __len__(self):
        return len(self.taus)


def pattern_meta(jsa: SampledJsa, scheme: DetectionScheme, path: str, **extra) -> dict:
    meta = {
        "scheme": scheme.value,
        "prefactor": str(scheme.prefactor),
        "jsa": dict(jsa.provenance),
        "grid": jsa.grid.as_dict(),
        "engine": {"path": path},
        "version": __version__,
    }
    meta.update(extra)
    return meta


def _as_taus(taus) -> np.ndarray:
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if taus.ndim != 1:
        raise ParameterError("taus must be one-dimensional")
    if not np.all(np.isfinite(taus)):
        raise ParameterError("taus must be finite")
    return taus


# -- kernel construction -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class DelayKernelSet:
    """Delay-independent pieces of one (JSA, scheme) coincidence probability.

    ``kernels[(k, l)][b]`` holds the sum of ``T_k conj(T_l) h**4`` over all grid
    tuples whose delay frequency ``u`` equals ``lags[b]``.
    """

    table: TermTable
    diagonal: float
    kernels: Mapping[tuple, np.ndarray]
    spacing: float
    n_points: int

    @property
    def scheme(self) -> DetectionScheme:
        return self.table.scheme

    @property
    def prefactor(self) -> float:
        return float(self.table.prefactor)

    @property
    def lags(self) -> np.ndarray:
        n = self.n_points
        return (np.arange(4 * n - 3) - 2 * (n - 1)) * self.spacing

    @property
    def baseline(self) -> float:
        return self.prefactor * self.diagonal

    def hermitian_kernel(self) -> np.ndarray:
        """Sum over all ordered pairs ``k != l``; ``g_lk[u] = conj(g_kl[-u])``."""
        total = np.zeros(4 * self.n_points - 3, dtype=complex)
        for key in sorted(self.kernels):
            g = self.kernels[key]
            total += g
            total += np.conj(g[::-1])
        return total

    def evaluate_complex(self, taus, threads: int | None = None) -> np.ndarray:
        """``prefactor * (diagonal + sum_u K[u] exp(-i u tau))`` before taking the real part."""
        taus = _as_taus(taus)
        kernel = self.hermitian_kernel()
        lags = self.lags

        def chunk(start: int) -> np.ndarray:
            t = taus[start:start + TAU_CHUNK]
            phases = np.exp(-1j * np.outer(t, lags))
            return (phases * kernel).sum(axis=1)

        starts = range(0, len(taus), TAU_CHUNK)
        with ThreadPoolExecutor(resolve_threads(threads)) as pool:
            parts = list(pool.map(chunk, starts))
        cross = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
        return self.prefactor * (self.diagonal + cross)

    def pattern(self, taus, threads: int | None = None, meta: Mapping | None = None) -> InterferencePattern:
        z = self.evaluate_complex(taus, threads)
        info = dict(meta or {})
        info["max_abs_imag"] = float(np.max(np.abs(z.imag))) if len(z) else 0.0
        return InterferencePattern(_as_taus(taus), z.real.copy(), self.baseline, info)


def _pair_specs(table: TermTable, n: int):
    """For each pair k<l: detector coefficients of ``u``, reduction subscripts and bin index."""
    specs = []
    ar = np.arange(n)
    offset = 2 * (n - 1)
    for k, l in itertools.combinations(range(len(table.terms)), 2):
        mk, ml = table.terms[k].phase_mask, table.terms[l].phase_mask
        coef = {m: int(m in mk) - int(m in ml) for m in (1, 2, 3, 4)}
        # slice axes i, j, k are detectors 2, 3, 4; axes with zero coefficient are summed out
        kept = [m for m in (2, 3, 4) if coef[m] != 0]
        subscripts = "ijk,ijk->" + "".join("ijk"[m - 2] for m in kept)
        grids = np.meshgrid(*([ar] * len(kept)), indexing="ij")
        idx = sum(coef[m] * g for m, g in zip(kept, grids)) + offset
        specs.append(((k, l), coef[1], subscripts, np.asarray(idx, dtype=np.intp).ravel()))
    return specs


def _slice_index(j1: int, n: int):
    ar = np.arange(n)
    return {1: j1, 2: ar[:, None, None], 3: ar[None, :, None], 4: ar[None, None, :]}


def term_amplitudes(f: np.ndarray, table: TermTable, idx) -> list[np.ndarray]:
    """``s_k (f_ab f_cd + f_ad f_cb)`` for every term, on the index arrays ``idx``."""
    out = []
    for term in table.terms:
        (a, b), (c, d) = term.pairing
        amp = f[idx[a], idx[b]] * f[idx[c], idx[d]] + f[idx[a], idx[d]] * f[idx[c], idx[b]]
        out.append(term.sign * amp)
    return out


def _slice_contribution(f, table, specs, j1, n, nbins):
    shape = (n, n, n)
    amps = [np.broadcast_to(t, shape) for t in term_amplitudes(f, table, _slice_index(j1, n))]
    real = not np.iscomplexobj(f)
    if real:
        diag = sum(float(np.einsum("ijk,ijk->", t, t)) for t in amps)
        conj = amps
    else:
        diag = sum(float(np.sum(t.real**2 + t.imag**2)) for t in amps)
        conj = [np.conj(t) for t in amps]
    kernels = []
    for (k, l), c1, subscripts, idx in specs:
        prod = np.einsum(subscripts, amps[k], conj[l]).ravel()
        bins = idx + c1 * j1
        g = np.bincount(bins, weights=prod.real, minlength=nbins).astype(complex)
        if not real:
            g.imag = np.bincount(bins, weights=prod.imag, minlength=nbins)
        kernels.append(g)
    return diag, kernels


def build_kernels(jsa: SampledJsa, table: TermTable, threads: int | None = None,
                  on_unnormalized: str = "warn",
                  max_working_bytes: int = DEFAULT_MAX_WORKING_BYTES) -> DelayKernelSet:
    """One pass over the 4D grid producing the diagonal and all 15 cross kernels.

    Work is split by the first detector index and reduced in index order, so
    the result is bit-identical for any thread count.
    """
    if not table.scheme.is_four_photon or len(table.terms) != 6:
        raise ParameterError("build_kernels needs a four-photon term table")
    check_normalized(jsa, on_unnormalized)
    n = jsa.grid.n_points
    # six term arrays plus a few product temporaries per slice, per worker
    need = 10 * n**3 * 16 * resolve_threads(threads)
    if need > max_working_bytes:
        raise MemoryBoundError(f"n_points={n} needs ~{need / 2**30:.1f} GiB of working memory, "
                               f"bound is {max_working_bytes / 2**30:.1f} GiB")
    # real JSAs (the Gaussian family) take a real-arithmetic path
    f = jsa.amplitudes.real if jsa.is_real else np.asarray(jsa.amplitudes)
    nbins = 4 * n - 3
    specs = _pair_specs(table, n)

    def work(j1):
        return _slice_contribution(f, table, specs, j1, n, nbins)

    with ThreadPoolExecutor(resolve_threads(threads)) as pool:
        results = list(pool.map(work, range(n)))

    h4 = jsa.grid.spacing**4
    diag = 0.0
    totals = [np.zeros(nbins, dtype=complex) for _ in specs]
    for d, ks in results:
        diag += d
        for acc, g in zip(totals, ks):
            acc += g
    kernels = {key: acc * h4 for (key, *_), acc in zip(specs, totals)}
    return DelayKernelSet(table=table, diagonal=diag * h4, kernels=kernels,
                          spacing=jsa.grid.spacing, n_points=n)


# -- public entry points -----------------------------------------------------

def pattern(jsa: SampledJsa, scheme, taus, threads: int | None = None,
            table: TermTable | None = None, on_unnormalized: str = "warn") -> InterferencePattern:
    """Coincidence probability versus delay for any detection scheme.

    Four-photon schemes use the kernel path; the two-photon schemes are
    delegated to :func:`homsim.twophoton.two_photon_pattern`.
    """
    scheme = DetectionScheme.parse(scheme)
    taus = _as_taus(taus)
    if not scheme.is_four_photon:
        from .twophoton import two_photon_pattern
        return two_photon_pattern(jsa, scheme, taus, table=table, on_unnormalized=on_unnormalized)
    table = table or term_table(scheme)
    ks = build_kernels(jsa, table, threads=threads, on_unnormalized=on_unnormalized)
    return ks.pattern(taus, threads, meta=pattern_meta(jsa, scheme, "kernel"))


def baseline(jsa: SampledJsa, scheme, threads: int | None = None) -> float:
    """Large-delay level where every cross term has dephased."""
    scheme = DetectionScheme.parse(scheme)
    if not scheme.is_four_photon:
        # both terms contribute the full norm
        return float(scheme.prefactor) * 2.0 * jsa.norm
    return build_kernels(jsa, term_table(scheme), threads=threads, on_unnormalized="ignore").baseline


def pattern_symmetric_22(jsa: SampledJsa, taus) -> InterferencePattern:
    """2/2 pattern from the cosine expansion valid for real exchange-symmetric JSAs.

    With ``A = f12 f34``, ``B = f13 f24``, ``C = f14 f23`` the squared 2/2
    amplitude equals four times a sum of six constants and nine cosines of
    frequency differences.  Evaluated by direct quadrature at every delay,
    independently of the term tables.
    """
    if exchange_symmetry_defect(jsa) >= 1e-10:
        raise PreconditionError("cosine expansion requires an exchange-symmetric JSA")
    if not jsa.is_real:
        raise PreconditionError("cosine expansion requires a real-valued JSA")
    taus = _as_taus(taus)
    check_normalized(jsa)
    f = jsa.amplitudes.real
    nu = jsa.grid.detunings
    n = jsa.grid.n_points
    w2, w3, w4 = nu[:, None, None], nu[None, :, None], nu[None, None, :]
    values = np.zeros(len(taus))
    const_total = 0.0
    for j1 in range(n):
        w1 = nu[j1]
        A = f[j1][:, None, None] * f[None, :, :]        # f12 f34
        B = f[j1][None, :, None] * f[:, None, :]        # f13 f24
        C = f[j1][None, None, :] * f[:, :, None]        # f14 f23
        AB, AC, BC = A + B, A + C, B + C
        const_total += float(np.sum(A * A + B * B + C * C + A * B + A * C + B * C))
        families = (
            (AB * AC, w1 - w2), (-AB * BC, w1 - w3), (-AC * BC, w1 - w4),
            (-AC * BC, w2 - w3), (-AB * BC, w2 - w4), (AB * AC, w3 - w4),
            (0.5 * BC * BC, w1 + w2 - w3 - w4),
            (0.5 * AC * AC, w1 - w2 + w3 - w4),
            (0.5 * AB * AB, w1 - w2 - w3 + w4),
        )
        for i, tau in enumerate(taus):
            acc = 0.0
            for coef, dw in families:
                acc += float(np.sum(coef * np.cos(dw * tau)))
            values[i] += acc
    h4 = jsa.grid.spacing**4
    pref = float(DetectionScheme.TWO_TWO.prefactor)
    values = 4.0 * pref * h4 * (const_total + values)
    base = 4.0 * pref * h4 * const_total
    return InterferencePattern(taus, values, base, pattern_meta(jsa, DetectionScheme.TWO_TWO, "eq8"))
