"""Command-line front end: ``homsim {pattern,figure2,check,terms}``.

Settings are resolved as command-line flag, then config file (``--config`` or
``./homsim.toml``), then built-in default.  Keys in a ``[<command>]`` table of
the config file override top-level keys for that command.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import classify_monotonic, feature_width, visibility
from .checks import run_checks
from .engine import InterferencePattern, pattern, pattern_symmetric_22, resolve_threads
from .errors import HomsimError, ParameterError
from .oracle import oracle_pattern
from .spectral import (
    DEFAULT_CENTER_WAVELENGTH_NM,
    DEFAULT_FWHM_NM,
    DEFAULT_N_POINTS,
    DEFAULT_SPAN_SIGMAS,
    GaussianJsaParams,
    gaussian_jsa,
    gaussian_sigma_from_fwhm,
    load_jsa,
    make_grid,
    save_jsa,
)
from .terms import DetectionScheme, format_table, table_for

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

DEFAULTS = {
    "rho": 0.0,
    "lambda_nm": DEFAULT_CENTER_WAVELENGTH_NM,
    "fwhm_nm": DEFAULT_FWHM_NM,
    "n_points": DEFAULT_N_POINTS,
    "span_sigmas": DEFAULT_SPAN_SIGMAS,
    "tau_min": 0.0,
    "tau_max": 10.0,
    "tau_points": 201,
    "engine": "kernel",
    "out": "pattern",
    "outdir": "figure2",
    "check_n_points": 8,
}

FIGURE2_ROWS = (("a", 0.0), ("b", -0.8), ("c", 0.8))
FIGURE2_COLUMNS = ((2, "2/2"), (3, "3/1"), (4, "4/0"))


class UsageError(HomsimError):
    pass


def load_config(path: str | None, command: str) -> dict:
    if path is None:
        if not Path("homsim.toml").exists():
            return {}
        path = "homsim.toml"
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config file {path} is not valid TOML: {exc}") from exc
    cfg = {k.replace("-", "_"): v for k, v in raw.items() if not isinstance(v, dict)}
    section = raw.get(command, {})
    cfg.update({k.replace("-", "_"): v for k, v in section.items()})
    return cfg


def _setting(args, cfg: dict, key: str):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in cfg:
        return cfg[key]
    return DEFAULTS.get(key)


def _threads(args, cfg) -> int:
    value = args.threads if args.threads is not None else cfg.get("threads")
    return resolve_threads(value)


# -- output writers ----------------------------------------------------------

def write_pattern_csv(p: InterferencePattern, path: Path) -> None:
    lines = ["tau_ps,probability,normalized"]
    lines += [f"{t:.17g},{v:.17g},{n:.17g}" for t, v, n in zip(p.taus, p.values, p.normalized)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def pattern_meta_json(p: InterferencePattern, fwhm_nm=None) -> dict:
    jsa = dict(p.meta.get("jsa", {}))
    if jsa.get("source") == "file":
        jsa_out = {"file": jsa.get("file"), "sha256": jsa.get("sha256")}
    else:
        jsa_out = {"source": jsa.get("source"), "rho": jsa.get("rho"),
                   "sigma_rad_per_ps": jsa.get("sigma_rad_per_ps"),
                   "lambda_nm": jsa.get("lambda_nm"), "fwhm_nm": fwhm_nm}
    return {
        "scheme": p.meta.get("scheme"),
        "prefactor": p.meta.get("prefactor"),
        "jsa": jsa_out,
        "grid": p.meta.get("grid"),
        "baseline": p.baseline,
        "engine": p.meta.get("engine"),
        "version": __version__,
    }


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- commands ----------------------------------------------------------------

def _build_jsa(args, cfg):
    gaussian_flags = [name for name in ("rho", "sigma", "lambda_nm", "fwhm_nm")
                      if getattr(args, name, None) is not None]
    jsa_file = args.jsa_file
    if jsa_file is not None and gaussian_flags:
        raise UsageError("--jsa-file conflicts with " + ", ".join("--" + g.replace("_nm", "").replace("_", "-")
                                                                for g in gaussian_flags))
    if jsa_file is None and not gaussian_flags:
        jsa_file = cfg.get("jsa_file")
    if jsa_file is not None:
        return load_jsa(jsa_file), None

    if args.sigma is not None and args.fwhm_nm is not None:
        raise UsageError("--sigma and --fwhm both fix the bandwidth; give one")
    lam = float(_setting(args, cfg, "lambda_nm"))
    if args.sigma is not None or (args.fwhm_nm is None and "sigma" in cfg):
        sigma = float(_setting(args, cfg, "sigma"))
        fwhm = None
    else:
        fwhm = float(_setting(args, cfg, "fwhm_nm"))
        sigma = gaussian_sigma_from_fwhm(lam, fwhm)
    params = GaussianJsaParams(sigma=sigma, rho=float(_setting(args, cfg, "rho")), center_wavelength_nm=lam)
    grid = make_grid(sigma, float(_setting(args, cfg, "span_sigmas")), int(_setting(args, cfg, "n_points")))
    return gaussian_jsa(params, grid), fwhm


def _taus(args, cfg) -> np.ndarray:
    n = int(_setting(args, cfg, "tau_points"))
    if n < 1:
        raise UsageError("--tau-points must be positive")
    return np.linspace(float(_setting(args, cfg, "tau_min")), float(_setting(args, cfg, "tau_max")), n)


def cmd_pattern(args) -> int:
    cfg = load_config(args.config, "pattern")
    scheme = DetectionScheme.parse(_setting(args, cfg, "scheme") or "2/2")
    jsa, fwhm = _build_jsa(args, cfg)
    taus = _taus(args, cfg)
    engine = _setting(args, cfg, "engine")
    threads = _threads(args, cfg)
    if not scheme.is_four_photon or engine == "kernel":
        p = pattern(jsa, scheme, taus, threads=threads)
    elif engine == "eq8":
        if scheme is not DetectionScheme.TWO_TWO:
            raise UsageError("the eq8 engine only covers the 2/2 scheme")
        p = pattern_symmetric_22(jsa, taus)
    elif engine == "oracle":
        p = oracle_pattern(jsa, scheme, taus)
    else:
        raise UsageError(f"unknown engine {engine!r}")

    out = Path(_setting(args, cfg, "out"))
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    csv_path = out.with_name(out.name + ".csv")
    meta_path = out.with_name(out.name + ".meta.json")
    write_pattern_csv(p, csv_path)
    _write_json(meta_path, pattern_meta_json(p, fwhm))
    print(f"wrote {csv_path} and {meta_path}")
    return 0


def run_figure2(outdir: Path, n_points: int = DEFAULT_N_POINTS, tau_max: float = 10.0,
                tau_points: int = 201, threads: int = 1, rows=FIGURE2_ROWS,
                lambda_nm: float = DEFAULT_CENTER_WAVELENGTH_NM, fwhm_nm: float = DEFAULT_FWHM_NM,
                span_sigmas: float = DEFAULT_SPAN_SIGMAS) -> dict:
    """Write the three JSAs and nine normalized patterns; return the index."""
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        probe = outdir / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"output directory {outdir} is not writable: {exc}") from exc
    sigma = gaussian_sigma_from_fwhm(lambda_nm, fwhm_nm)
    grid = make_grid(sigma, span_sigmas, n_points)
    taus = np.linspace(0.0, tau_max, tau_points)
    index = {"version": __version__, "lambda_nm": lambda_nm, "fwhm_nm": fwhm_nm,
             "sigma_rad_per_ps": sigma, "grid": grid.as_dict(), "panels": {}}
    for row, rho in rows:
        jsa = gaussian_jsa(GaussianJsaParams(sigma, rho, lambda_nm), grid)
        csv_path, _ = save_jsa(jsa, outdir / f"{row}1")
        index["panels"][f"{row}1"] = {"file": csv_path.name, "kind": "jsa", "rho": rho}
        for col, scheme in FIGURE2_COLUMNS:
            p = pattern(jsa, scheme, taus, threads=threads)
            label = f"{row}{col}"
            name = f"{label}.csv"
            write_pattern_csv(p, outdir / name)
            report = classify_monotonic(p)
            index["panels"][label] = {
                "file": name, "kind": "pattern", "scheme": scheme, "rho": rho,
                "baseline": p.baseline, "classification": report.to_dict(),
                "feature_width_ps": feature_width(p), "visibility": visibility(p),
            }
    _write_json(outdir / "index.json", index)
    return index


def cmd_figure2(args) -> int:
    cfg = load_config(args.config, "figure2")
    index = run_figure2(
        Path(_setting(args, cfg, "outdir")),
        n_points=int(_setting(args, cfg, "n_points")),
        tau_max=float(_setting(args, cfg, "tau_max")),
        tau_points=int(_setting(args, cfg, "tau_points")),
        threads=_threads(args, cfg),
    )
    for label, panel in index["panels"].items():
        if panel["kind"] == "pattern":
            print(f"{label}  {panel['scheme']}  rho={panel['rho']:+.1f}  "
                  f"{panel['classification']['class']:<14} width={panel['feature_width_ps']:.3f} ps")
    return 0


def cmd_check(args) -> int:
    cfg = load_config(args.config, "check")
    n = int(args.n_points if args.n_points is not None else cfg.get("n_points", DEFAULTS["check_n_points"]))
    report = run_checks(n_points=n, threads=_threads(args, cfg))
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    print(text)
    for r in report["checks"]:
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}", file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_terms(args) -> int:
    schemes = [args.scheme] if args.scheme else [s.value for s in DetectionScheme]
    print("\n\n".join(format_table(table_for(s)) for s in schemes))
    return 0


def _scheme_arg(text: str) -> str:
    try:
        return DetectionScheme.parse(text).value
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="homsim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"homsim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file (default: ./homsim.toml if present)")
    common.add_argument("--threads", type=int, help="worker threads (fallback: $HOMSIM_THREADS, then 1)")

    p = sub.add_parser("pattern", parents=[common], help="compute one interference pattern")
    p.add_argument("--scheme", type=_scheme_arg, help="2/2, 3/1, 4/0, 1/1 or 2/0")
    p.add_argument("--rho", type=float)
    p.add_argument("--sigma", type=float, help="marginal std in rad/ps (instead of --fwhm)")
    p.add_argument("--lambda", dest="lambda_nm", type=float, help="center wavelength, nm")
    p.add_argument("--fwhm", dest="fwhm_nm", type=float, help="bandwidth FWHM, nm")
    p.add_argument("--jsa-file", help="JSA stem or .jsa.csv path")
    p.add_argument("--n-points", type=int)
    p.add_argument("--span", dest="span_sigmas", type=float, help="grid half-width in sigmas")
    p.add_argument("--tau-min", type=float)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--tau-points", type=int)
    p.add_argument("--engine", choices=("kernel", "eq8", "oracle"))
    p.add_argument("--out", help="output stem; writes <out>.csv and <out>.meta.json")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("figure2", parents=[common], help="reproduce the three-JSA, nine-pattern figure")
    p.add_argument("--outdir")
    p.add_argument("--n-points", type=int)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--tau-points", type=int)
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("check", parents=[common], help="engine-vs-oracle and invariance regression")
    p.add_argument("--n-points", type=int)
    p.add_argument("--report", help="also write the JSON report here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("terms", help="print the signed term tables")
    p.add_argument("--scheme", type=_scheme_arg)
    p.set_defaults(func=cmd_terms)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except HomsimError as exc:
        print(f"homsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
