"""Command-line front end.

    cqedgate [--config cfg.json] spectrum --state g --in V --out H --grid -60:60:0.5 --relative
    cqedgate truth-table [--ideal] [--alpha A]
    cqedgate fit --data fig2b.csv:g:VH --free g,kappa,gamma_inhom,w0
    cqedgate lifetime --delta-range 100:250:10
    cqedgate rabi --power-range 0:0.6:0.01

Each subcommand writes CSV to ``--csv PATH`` (stdout when omitted). Exit
status: 0 success, 2 user or configuration error, 3 numerical failure.
"""

import argparse
import csv
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .dynamics import excitation_probability, qubit_lifetime
from .errors import (ContractError, DegenerateParametersError, NegativeBackgroundWarning,
                     NonIdentifiableError)
from .fitting import (CURVE_PARAMS, SHARED_PARAMS, FitData, FitProblem, default_bounds, fit,
                      model_curves)
from .gate import ideal_table, truth_table
from .spectra import Spectrum, spectrum_scan
from .states import Mixture, Pol, PolarizationPair, QdState
from .units import ghz_to_nm, nm_to_ghz

EXIT_OK = 0
EXIT_USER = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    """Bad command-line input (exit status 2)."""


def _fmt(x):
    return f"{x:.12g}"


def parse_range(text, what="range"):
    """``start:stop:step`` -> inclusive array; a trailing ``nm``/``ghz`` unit is returned too."""
    unit = None
    low = text.strip().lower()
    for suffix in ("ghz", "nm"):
        if low.endswith(suffix):
            unit, low = suffix, low[: -len(suffix)]
            break
    parts = low.split(":")
    if len(parts) != 3:
        raise UsageError(f"{what} must look like start:stop:step, got {text!r}")
    try:
        start, stop, step = map(float, parts)
    except ValueError:
        raise UsageError(f"{what} {text!r} has non-numeric fields") from None
    if not step > 0 or stop < start:
        raise UsageError(f"{what} needs step > 0 and stop >= start")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    if n > 10_000_000:
        raise UsageError(f"{what} has too many points ({n})")
    return start + step * np.arange(n), unit


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def write_csv(path, header, rows):
    fh, close = _open_out(path)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    finally:
        if close:
            fh.close()


def read_spectrum_csv(path):
    """Read ``frequency_ghz`` (or ``wavelength_nm``), ``intensity`` and optional ``sigma``."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise UsageError(f"{path}: cannot read data ({exc.strerror})") from None
    if not rows:
        raise UsageError(f"{path}: empty file")
    header = [h.strip().lower() for h in rows[0]]
    if "frequency_ghz" in header:
        xcol = "frequency_ghz"
    elif "wavelength_nm" in header:
        xcol = "wavelength_nm"
    else:
        raise UsageError(f"{path}: row 1: header needs a 'frequency_ghz' or 'wavelength_nm' column")
    if "intensity" not in header:
        raise UsageError(f"{path}: row 1: header needs an 'intensity' column")
    cols = {name: header.index(name) for name in (xcol, "intensity", "sigma") if name in header}
    data = {name: [] for name in cols}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise UsageError(f"{path}: row {lineno}: expected {len(header)} columns, got {len(row)}")
        for name, idx in cols.items():
            try:
                value = float(row[idx])
            except ValueError:
                raise UsageError(f"{path}: row {lineno}, column '{name}': "
                                 f"cannot parse {row[idx]!r} as a number") from None
            if not np.isfinite(value):
                raise UsageError(f"{path}: row {lineno}, column '{name}': value is not finite")
            data[name].append(value)
    if not data[xcol]:
        raise UsageError(f"{path}: no data rows")
    x = np.array(data[xcol])
    freq = nm_to_ghz(x) if xcol == "wavelength_nm" else x
    order = np.argsort(freq)
    sigma = np.array(data["sigma"])[order] if "sigma" in data else None
    try:
        return Spectrum(freq[order], np.array(data["intensity"])[order], sigma)
    except ContractError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _state(label, alpha):
    return {"g": QdState.GROUND, "minus": QdState.MINUS}.get(label) or Mixture(alpha)


def cmd_spectrum(cfg, args):
    values, unit = parse_range(args.grid, "--grid")
    unit = unit or args.grid_unit
    if unit == "nm":
        if args.relative:
            raise UsageError("--relative applies to GHz grids only")
        freq = np.sort(nm_to_ghz(values))
    else:
        freq = values + (cfg.device.nu_cavity if args.relative else 0.0)
    pair = PolarizationPair(Pol(args.in_pol), Pol(args.out_pol))
    bg = None if args.no_background else cfg.backgrounds.get(pair)
    probe = replace(cfg.probe, fwhm=cfg.probe.fwhm if args.fwhm is None else args.fwhm)
    spec = spectrum_scan(freq, pair, _state(args.state, cfg.alpha), cfg.device, probe, cfg.quad, bg)
    write_csv(args.csv, ["frequency_ghz", "wavelength_nm", "intensity"],
              ((float(f), float(ghz_to_nm(f)), float(i))
               for f, i in zip(spec.frequency, spec.intensity)))


def cmd_truth_table(cfg, args):
    if args.ideal:
        table = ideal_table(cfg.device, cfg.operating_nu)
    else:
        alpha = cfg.alpha if args.alpha is None else args.alpha
        if not 0 <= alpha <= 1:
            raise UsageError("--alpha must lie in [0, 1]")
        table = truth_table(cfg.device, cfg.probe, alpha, cfg.backgrounds, cfg.operating_nu,
                            cfg.quad)
    labels = {QdState.GROUND: "g", QdState.MINUS: "minus"}
    write_csv(args.csv, ["control_state", "in_pol", "out_pol", "probability"],
              ((labels[s], pair.input.value, pair.output.value, float(p))
               for s, pair, p, _ in table.rows()))


def _parse_assignments(items, what):
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"{what} entries look like name=value, got {item!r}")
        out[name.strip()] = value.strip()
    return out


def cmd_fit(cfg, args):
    datasets = []
    for spec in args.data:
        parts = spec.split(":")
        if len(parts) < 2 or len(parts) > 4:
            raise UsageError(f"--data needs path:state[:channel[:tag]], got {spec!r}")
        path, state = parts[0], parts[1]
        if state not in ("g", "minus", "mixture"):
            raise UsageError(f"--data state must be g, minus or mixture, got {state!r}")
        try:
            pair = PolarizationPair.parse(parts[2]) if len(parts) > 2 else PolarizationPair(Pol.V, Pol.H)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        tag = parts[3] if len(parts) > 3 else ("" if len(args.data) == 1 else f"d{len(datasets)}")
        datasets.append(FitData(read_spectrum_csv(path), pair, state, tag))

    free = [f.strip() for f in args.free.split(",") if f.strip()]
    init = {}
    for name, value in _parse_assignments(args.init, "--init").items():
        try:
            init[name] = float(value)
        except ValueError:
            raise UsageError(f"--init {name}: {value!r} is not a number") from None
    if any(d.state == "mixture" for d in datasets):
        init.setdefault("alpha", cfg.alpha)
    fwhm = cfg.probe.fwhm if args.fwhm is None else args.fwhm
    problem = FitProblem(datasets, free, init, {}, cfg.device, fwhm, cfg.quad, args.max_iter)
    try:
        start = problem.start_values()
    except ContractError as exc:
        raise UsageError(str(exc)) from None

    # scale guesses: match the data maximum when w0 was not given
    curves = model_curves(problem, start)
    for d, curve in zip(datasets, curves):
        key = d.name("w0")
        if key not in init and np.max(curve) > 0:
            init[key] = start[key] = float(np.max(d.spectrum.intensity) / np.max(curve))

    bounds = {}
    for name, text in _parse_assignments(args.bounds, "--bounds").items():
        try:
            lo, hi = map(float, text.split(":"))
        except ValueError:
            raise UsageError(f"--bounds {name} must be lo:hi, got {text!r}") from None
        bounds[name] = (lo, hi)
    for name in free:
        if name.split("@")[0] not in CURVE_PARAMS + SHARED_PARAMS:
            raise UsageError(f"unknown free parameter {name!r}")
        bounds.setdefault(name, default_bounds(name, start.get(name, 0.0)))
    problem = replace(problem, init=init, bounds=bounds)

    try:
        result = fit(problem)
    except NonIdentifiableError as exc:
        print(f"cqedgate fit: non-identifiable parameters: {', '.join(exc.parameters)}",
              file=sys.stderr)
        return EXIT_NUMERIC
    rows = [(n, float(result.estimates[n]), float(result.ci95[n])) for n in result.names]
    write_csv(args.csv, ["parameter", "estimate", "ci95"], rows)
    print(f"# residual_norm={_fmt(result.residual_norm)} iterations={result.iterations} "
          f"converged={result.converged}", file=sys.stderr)
    return EXIT_OK


def cmd_lifetime(cfg, args):
    deltas, unit = parse_range(args.delta_range, "--delta-range")
    if unit == "nm":
        raise UsageError("--delta-range is a GHz detuning")
    model = cfg.lifetime
    write_csv(args.csv, ["delta_ghz", "lifetime_ps"],
              ((float(d), float(qubit_lifetime(d, model))) for d in deltas))


def cmd_rabi(cfg, args):
    powers, unit = parse_range(args.power_range, "--power-range")
    if unit is not None:
        raise UsageError("--power-range is in uW")
    prob = np.atleast_1d(excitation_probability(powers, cfg.rabi))
    write_csv(args.csv, ["power_uw", "excitation_probability"],
              ((float(p), float(a)) for p, a in zip(powers, prob)))


def build_parser():
    ap = argparse.ArgumentParser(prog="cqedgate", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help="JSON configuration file")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="model reflection spectrum for one channel")
    sp.add_argument("--state", choices=["g", "minus", "mixture"], default="g")
    sp.add_argument("--in", dest="in_pol", choices=["H", "V"], default="V")
    sp.add_argument("--out", dest="out_pol", choices=["H", "V"], default="H")
    sp.add_argument("--grid", required=True, help="start:stop:step, optional nm/ghz suffix")
    sp.add_argument("--grid-unit", choices=["ghz", "nm"], default="ghz")
    sp.add_argument("--relative", action="store_true",
                    help="GHz grid is an offset from the cavity resonance")
    sp.add_argument("--fwhm", type=float, help="override probe FWHM (GHz); 0 = monochromatic")
    sp.add_argument("--no-background", action="store_true")
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_spectrum)

    tt = sub.add_parser("truth-table", help="cNOT probability table")
    tt.add_argument("--ideal", action="store_true",
                    help="C -> inf, alpha = 1, monochromatic, no background")
    tt.add_argument("--alpha", type=float)
    tt.add_argument("--csv")
    tt.set_defaults(func=cmd_truth_table)

    ft = sub.add_parser("fit", help="least-squares fit of spectra")
    ft.add_argument("--data", action="append", required=True,
                    help="path:state[:channel[:tag]], state in g|minus|mixture; repeatable")
    ft.add_argument("--free", required=True, help="comma-separated parameter names")
    ft.add_argument("--init", action="append", help="name=value; repeatable")
    ft.add_argument("--bounds", action="append", help="name=lo:hi; repeatable")
    ft.add_argument("--fwhm", type=float, help="probe FWHM (GHz); default from config")
    ft.add_argument("--max-iter", type=int, default=500)
    ft.add_argument("--csv")
    ft.set_defaults(func=cmd_fit)

    lt = sub.add_parser("lifetime", help="Purcell-modified lifetime vs detuning")
    lt.add_argument("--delta-range", required=True, help="start:stop:step in GHz")
    lt.add_argument("--csv")
    lt.set_defaults(func=cmd_lifetime)

    rb = sub.add_parser("rabi", help="excitation probability vs pump power")
    rb.add_argument("--power-range", required=True, help="start:stop:step in uW")
    rb.add_argument("--csv")
    rb.set_defaults(func=cmd_rabi)
    return ap


_RANGE_FLAGS = ("--grid", "--delta-range", "--power-range")


def _join_range_flags(argv):
    # let "--grid -60:60:1" through: argparse would take "-60:60:1" for an option
    out, it = [], iter(argv)
    for tok in it:
        if tok in _RANGE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = _join_range_flags(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USER if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NegativeBackgroundWarning)
            status = args.func(cfg, args)
    except (ConfigError, UsageError, ContractError) as exc:
        print(f"cqedgate {args.command}: {exc}", file=sys.stderr)
        return EXIT_USER
    except (DegenerateParametersError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"cqedgate {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())
