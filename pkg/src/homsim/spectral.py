"""Joint spectral amplitudes sampled on uniform detuning grids.

All frequencies are angular detunings in rad/ps measured from the grid
centre.  A JSA matrix is indexed ``[signal_bin, idler_bin]`` and each sample
carries the midpoint quadrature weight ``h**2``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import JsaFormatError, NormalizationError, ParameterError

# speed of light in nm/ps
C_NM_PER_PS = 299_792.458

DEFAULT_CENTER_WAVELENGTH_NM = 1584.0
DEFAULT_FWHM_NM = 2.0
DEFAULT_SPAN_SIGMAS = 4.0
DEFAULT_N_POINTS = 49


@dataclass(frozen=True)
class FrequencyGrid:
    """Symmetric uniform lattice ``nu_j = (j - (n-1)/2) * spacing``."""

    spacing: float
    n_points: int
    center_omega: float = 0.0

    def __post_init__(self):
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ParameterError(f"grid spacing must be positive, got {self.spacing}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ParameterError(f"n_points must be an integer >= 2, got {self.n_points}")

    @property
    def detunings(self) -> np.ndarray:
        j = np.arange(self.n_points, dtype=float)
        return (j - (self.n_points - 1) / 2.0) * self.spacing

    @property
    def span(self) -> float:
        """Half-width of the lattice, i.e. the largest detuning."""
        return (self.n_points - 1) / 2.0 * self.spacing

    def as_dict(self) -> dict:
        return {"n": self.n_points, "h": self.spacing, "span": self.span}


def make_grid(sigma: float, span_sigmas: float = DEFAULT_SPAN_SIGMAS,
              n_points: int = DEFAULT_N_POINTS, center_omega: float = 0.0) -> FrequencyGrid:
    """Lattice of ``n_points`` samples covering ``[-span_sigmas*sigma, +span_sigmas*sigma]``."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if not span_sigmas > 0:
        raise ParameterError(f"span_sigmas must be positive, got {span_sigmas}")
    if int(n_points) != n_points or n_points < 2:
        raise ParameterError(f"n_points must be an integer >= 2, got {n_points}")
    n_points = int(n_points)
    h = 2.0 * span_sigmas * sigma / (n_points - 1)
    return FrequencyGrid(spacing=h, n_points=n_points, center_omega=center_omega)


def gaussian_sigma_from_fwhm(center_wavelength_nm: float, fwhm_nm: float) -> float:
    """Angular-frequency standard deviation (rad/ps) of a spectrum given in wavelength.

    Uses the narrow-band conversion ``df = c * dlambda / lambda**2``.
    """
    if not center_wavelength_nm > 0:
        raise ParameterError(f"center wavelength must be positive, got {center_wavelength_nm}")
    if not fwhm_nm > 0:
        raise ParameterError(f"FWHM must be positive, got {fwhm_nm}")
    fwhm_omega = 2.0 * math.pi * C_NM_PER_PS * fwhm_nm / center_wavelength_nm**2
    return fwhm_omega / (2.0 * math.sqrt(2.0 * math.log(2.0)))


def center_omega_from_wavelength(center_wavelength_nm: float) -> float:
    return 2.0 * math.pi * C_NM_PER_PS / center_wavelength_nm


@dataclass(frozen=True)
class GaussianJsaParams:
    """Correlated double-Gaussian JSA; both marginals have std ``sigma`` for every ``rho``."""

    sigma: float
    rho: float = 0.0
    center_wavelength_nm: float = DEFAULT_CENTER_WAVELENGTH_NM

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not -1.0 < self.rho < 1.0:
            raise ParameterError(f"rho must lie strictly inside (-1, 1), got {self.rho}")

    @classmethod
    def from_fwhm(cls, rho: float = 0.0,
                  center_wavelength_nm: float = DEFAULT_CENTER_WAVELENGTH_NM,
                  fwhm_nm: float = DEFAULT_FWHM_NM) -> "GaussianJsaParams":
        sigma = gaussian_sigma_from_fwhm(center_wavelength_nm, fwhm_nm)
        return cls(sigma=sigma, rho=rho, center_wavelength_nm=center_wavelength_nm)


@dataclass(frozen=True, eq=False)
class SampledJsa:
    """A JSA on a :class:`FrequencyGrid`.

    ``amplitudes`` is stored as a read-only complex matrix.  ``provenance``
    records where the samples came from and ends up in output metadata.
    """

    grid: FrequencyGrid
    amplitudes: np.ndarray
    provenance: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex, copy=True)
        n = self.grid.n_points
        if amps.ndim != 2 or amps.shape[0] != amps.shape[1]:
            raise JsaFormatError(f"JSA matrix must be square, got shape {amps.shape}")
        if amps.shape != (n, n):
            raise JsaFormatError(f"JSA matrix shape {amps.shape} does not match grid n_points={n}")
        if not np.all(np.isfinite(amps)):
            raise JsaFormatError("JSA contains non-finite entries")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def quadrature_weight(self) -> float:
        return self.grid.spacing**2

    @property
    def norm(self) -> float:
        """Discrete value of the double integral of ``|f|**2``."""
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.quadrature_weight)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.amplitudes.imag == 0))

    def with_amplitudes(self, amplitudes: np.ndarray, **provenance) -> "SampledJsa":
        prov = dict(self.provenance)
        prov.update(provenance)
        return SampledJsa(self.grid, amplitudes, prov)


def gaussian_jsa(params: GaussianJsaParams, grid: FrequencyGrid) -> SampledJsa:
    """Sample and normalize the correlated Gaussian JSA on ``grid``."""
    if not -1.0 < params.rho < 1.0:
        raise ParameterError(f"rho must lie strictly inside (-1, 1), got {params.rho}")
    nu = grid.detunings
    s, i = nu[:, None], nu[None, :]
    # s*s + i*i and s*i are both exchange-symmetric in floating point, so the
    # matrix is bitwise equal to its transpose
    quad = (s * s + i * i) - 2.0 * params.rho * (s * i)
    amps = np.exp(-quad / (4.0 * params.sigma**2 * (1.0 - params.rho**2)))
    jsa = SampledJsa(grid, amps, {
        "source": "gaussian",
        "rho": params.rho,
        "sigma_rad_per_ps": params.sigma,
        "lambda_nm": params.center_wavelength_nm,
    })
    return normalize(jsa)


def normalize(jsa: SampledJsa) -> SampledJsa:
    norm = jsa.norm
    if not norm > 0:
        raise NormalizationError("cannot normalize a JSA with zero norm")
    return SampledJsa(jsa.grid, jsa.amplitudes / math.sqrt(norm), jsa.provenance)


def marginals(jsa: SampledJsa) -> tuple[np.ndarray, np.ndarray]:
    """Signal and idler marginal spectra (row and column sums of ``|f|**2 * h``)."""
    intensity = np.abs(jsa.amplitudes) ** 2
    h = jsa.grid.spacing
    return intensity.sum(axis=1) * h, intensity.sum(axis=0) * h


def exchange_symmetry_defect(jsa: SampledJsa) -> float:
    """``max|f_jk - f_kj| / max|f_jk|``; zero for exchange-symmetric JSAs."""
    f = jsa.amplitudes
    scale = np.max(np.abs(f))
    if scale == 0:
        raise NormalizationError("exchange symmetry is undefined for an all-zero JSA")
    return float(np.max(np.abs(f - f.T)) / scale)


def shift_jsa(jsa: SampledJsa, delta_bins: int) -> SampledJsa:
    """Move the JSA ``delta_bins`` bins along the diagonal (both photons detuned alike).

    Samples pushed off the lattice are dropped and vacated samples are zero.
    """
    n = jsa.grid.n_points
    delta = int(delta_bins)
    if delta != delta_bins or abs(delta) >= n:
        raise ParameterError(f"|delta_bins| must be an integer below {n}, got {delta_bins}")
    out = np.zeros((n, n), dtype=complex)
    src = jsa.amplitudes
    if delta >= 0:
        out[delta:, delta:] = src[: n - delta, : n - delta]
    else:
        out[: n + delta, : n + delta] = src[-delta:, -delta:]
    prov = dict(jsa.provenance)
    prov["shift_bins"] = prov.get("shift_bins", 0) + delta
    return SampledJsa(jsa.grid, out, prov)


# -- file IO ---------------------------------------------------------------

def _stem(path: str | Path) -> Path:
    p = Path(path)
    name = p.name
    for suffix in (".jsa.csv", ".jsa.json"):
        if name.endswith(suffix):
            return p.with_name(name[: -len(suffix)])
    return p


def jsa_paths(path: str | Path) -> tuple[Path, Path]:
    """``(<stem>.jsa.csv, <stem>.jsa.json)`` for a stem or either file name."""
    stem = _stem(path)
    return stem.with_name(stem.name + ".jsa.csv"), stem.with_name(stem.name + ".jsa.json")


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}J"


def save_jsa(jsa: SampledJsa, path: str | Path) -> tuple[Path, Path]:
    """Write the CSV matrix and its JSON sidecar; returns both paths."""
    csv_path, json_path = jsa_paths(path)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in jsa.amplitudes:
            writer.writerow([_format_complex(complex(z)) for z in row])
    meta = {
        "center_wavelength_nm": jsa.provenance.get("lambda_nm"),
        "spacing_rad_per_ps": jsa.grid.spacing,
        "n_points": jsa.grid.n_points,
    }
    if "sigma_rad_per_ps" in jsa.provenance:
        meta["sigma_rad_per_ps"] = jsa.provenance["sigma_rad_per_ps"]
    json_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path, json_path


def _parse_entry(text: str) -> complex:
    text = text.strip()
    if not text:
        raise JsaFormatError("empty matrix entry")
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise JsaFormatError(f"cannot parse matrix entry {text!r}") from exc


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_jsa(path: str | Path, format: str = "csv") -> SampledJsa:
    """Read a JSA written by :func:`save_jsa` (or by hand in the same layout).

    ``path`` may be the stem or either of the two files.  The amplitudes are
    not renormalized.
    """
    if format != "csv":
        raise JsaFormatError(f"unsupported JSA format {format!r}")
    csv_path, json_path = jsa_paths(path)
    if not csv_path.exists():
        raise JsaFormatError(f"missing JSA matrix file {csv_path}")
    if not json_path.exists():
        raise JsaFormatError(f"missing JSA sidecar {json_path}")
    try:
        meta = json.loads(json_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise JsaFormatError(f"sidecar {json_path} is not valid JSON") from exc
    for key in ("spacing_rad_per_ps", "n_points"):
        if key not in meta:
            raise JsaFormatError(f"sidecar {json_path} lacks {key!r}")

    with open(csv_path, newline="", encoding="utf-8") as fh:
        rows = [[_parse_entry(x) for x in row] for row in csv.reader(fh) if row]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise JsaFormatError("JSA rows are ragged or empty")
    amps = np.array(rows, dtype=complex)
    if amps.shape[0] != amps.shape[1]:
        raise JsaFormatError(f"JSA matrix must be square, got shape {amps.shape}")
    if amps.shape[0] != meta["n_points"]:
        raise JsaFormatError(f"matrix has {amps.shape[0]} rows but sidecar says n_points={meta['n_points']}")
    if not np.all(np.isfinite(amps)):
        raise JsaFormatError("JSA contains non-finite entries")

    lam = meta.get("center_wavelength_nm")
    center = center_omega_from_wavelength(lam) if lam else 0.0
    try:
        grid = FrequencyGrid(float(meta["spacing_rad_per_ps"]), int(meta["n_points"]), center)
    except ParameterError as exc:
        raise JsaFormatError(str(exc)) from exc
    prov = {"source": "file", "file": str(csv_path), "sha256": file_sha256(csv_path), "lambda_nm": lam}
    if meta.get("sigma_rad_per_ps") is not None:
        prov["sigma_rad_per_ps"] = meta["sigma_rad_per_ps"]
    jsa = SampledJsa(grid, amps, prov)
    if not jsa.norm > 0:
        raise NormalizationError(f"JSA in {csv_path} has zero norm")
    return jsa
