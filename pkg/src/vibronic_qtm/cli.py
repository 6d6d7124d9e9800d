"""Command-line front end.

Every subcommand reads a model file (``hyst`` reads a trace) and writes one
CSV or JSON document to ``--output`` or stdout. CSV files start with a
``# vibronic-qtm/<table>/<version>`` line, then a header row; numbers carry
17 significant digits. Internal fields are given in mT and sweep rates in
Oe/s on the command line; tables report SI-derived units stated in the
column names.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cfham import KramersPairingError, build_cf_hamiltonian, build_mode_operators, diagonalize_kramers
from .constants import OERSTED
from .doublet import GMatrix, electronic_g_matrix
from .dynamics import LZScenario, axiality, ensemble_average, single_mode_analysis, splitting_map
from .fields import dipolar_field, mean_distance, nuclear_field
from .hysteresis import DEFAULT_FIT_WINDOW, HysteresisTrace, extract_spin_flip
from .modelfile import ModelFileError, load_model
from .vibronic import vibronic_g_matrix

CSV_VERSION = 1


def _num(x) -> str:
    return format(float(x), ".17g")


def _csv(table: str, header: list[str], rows) -> str:
    out = io.StringIO()
    out.write(f"# vibronic-qtm/{table}/{CSV_VERSION}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else (str(v) if isinstance(v, (int, np.integer)) else _num(v)) for v in row) + "\n")
    return out.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _gdoc(g) -> dict:
    g = GMatrix(np.asarray(g))
    doc = {"raw": g.matrix.tolist(), "hermitized": g.hermitized().tolist(), "principal": g.principal_values().tolist()}
    if np.trace(g.hermitized()) > 0:
        doc["axiality"] = axiality(g)
    return doc


@dataclass
class _Analysis:
    loaded: object
    ladder: object
    ops: list
    g_el: GMatrix
    g_vib: object


def _analyse(path, tol) -> _Analysis:
    loaded = load_model(path)
    model = loaded.model
    ladder = diagonalize_kramers(build_cf_hamiltonian(model), tol=tol)
    ops = build_mode_operators(model)
    g_el = electronic_g_matrix(ladder, model.spec)
    g_vib = vibronic_g_matrix(ladder, model.spec, ops) if ops else None
    return _Analysis(loaded, ladder, ops, g_el, g_vib)


def _gtotal(a: _Analysis) -> np.ndarray:
    return a.g_el.matrix + (a.g_vib.total.matrix if a.g_vib else 0.0)


def _scenario(args, g, bint_mt, rate_oe):
    return LZScenario(
        g=np.asarray(g),
        bint=bint_mt * 1e-3,
        sweep_rate=rate_oe * OERSTED,
        method=args.method,
        n_theta=args.n_theta,
        n_phi=args.n_phi,
        n_samples=args.samples,
        seed=args.seed,
    )


def cmd_spectrum(args) -> str:
    a = _analyse(args.model, args.tolerance)
    e = a.ladder.energies
    return _csv("spectrum", ["doublet", "energy_cm1", "relative_cm1"], ((i, e[i], e[i] - e[0]) for i in range(len(e))))


def cmd_gmatrix(args) -> str:
    a = _analyse(args.model, args.tolerance)
    doc = {"schema": "vibronic-qtm/gmatrix/1", "electronic": _gdoc(a.g_el)}
    if a.g_vib is not None:
        doc["vibronicTotal"] = _gdoc(a.g_vib.total)
        doc["perMode"] = [dict(_gdoc(g), mode=j) for j, g in enumerate(a.g_vib.per_mode)]
        doc["total"] = _gdoc(_gtotal(a))
    return _json(doc)


def cmd_splitmap(args) -> str:
    a = _analyse(args.model, args.tolerance)
    gv = a.g_vib.total if a.g_vib else np.zeros((3, 3))
    sm = splitting_map(a.g_el, gv, args.field, args.grid_theta, args.grid_phi)
    return _csv(
        "splitmap",
        ["theta_rad", "phi_rad", "deltaEl_cm1", "deltaVib_cm1"],
        zip(sm.theta, sm.phi, sm.delta_el, sm.delta_vib),
    )


def cmd_lz(args) -> str:
    a = _analyse(args.model, args.tolerance)
    gt = _gtotal(a)
    rows = []
    for rate in args.rate:
        for b in args.bint:
            el = ensemble_average(_scenario(args, a.g_el, b, rate), args.threads)
            vib = ensemble_average(_scenario(args, gt, b, rate), args.threads)
            rows.append((b * 1e-3, rate, el.mean, vib.mean, el.stderr, vib.stderr))
    return _csv("lz", ["bint_T", "rate_Oe_per_s", "P_el", "P_vib", "stderr_el", "stderr_vib"], rows)


def cmd_modes(args) -> str:
    a = _analyse(args.model, args.tolerance)
    if a.g_vib is None:
        raise ModelFileError(f"{args.model}: no vibrational modes")
    ma = single_mode_analysis(
        a.g_el,
        a.g_vib.per_mode,
        _scenario(args, a.g_el, args.bint[0], args.rate[0]),
        coupling=[op.strength for op in a.ops],
        omega=[op.omega for op in a.ops],
        threads=args.threads,
    )
    rows = ((j, ma.omega[j], ma.coupling[j], ma.axiality[j], ma.delta_axiality[j], ma.p[j]) for j in range(len(ma.p)))
    return _csv("modes", ["mode", "omega_cm1", "normV_cm1", "A", "deltaA", "P"], rows)


def cmd_fields(args) -> str:
    loaded = load_model(args.model)
    doc = {"schema": "vibronic-qtm/fields/1"}
    if loaded.sample is None and loaded.nuclear is None:
        raise ModelFileError(f"{args.model}: no 'fields' section")
    if loaded.sample is not None:
        doc["meanDistance_A"] = mean_distance(loaded.sample)
        if loaded.sample.measured_m_parallel is not None:
            d = dipolar_field(loaded.sample, n_mc=args.mc, seed=args.seed)
            doc["dipolar"] = {
                "moment_muB": d.moment,
                "prefactor_mT": d.prefactor,
                "rangeFactor": list(d.range_factor),
                "meanFactor": d.mean_factor,
            }
            if args.mc:
                doc["dipolar"]["meanFactorMonteCarlo"] = d.mean_factor_mc
                doc["dipolar"]["meanFactorStderr"] = d.mean_factor_stderr
    if loaded.nuclear is not None:
        b = nuclear_field(loaded.nuclear, args.bext, args.temperature, loaded.model.spec.gJ)
        doc["nuclear"] = {"Bext_T": list(args.bext), "temperature_K": args.temperature, "Bnuc_T": b.tolist()}
    return _json(doc)


def cmd_hyst(args) -> str:
    trace = HysteresisTrace.from_csv(args.trace, args.msat)
    r = extract_spin_flip(trace, args.window)
    return _json({"schema": "vibronic-qtm/hyst/1", "M": r.M, "Mprime": r.Mprime, "P": r.P, "clamped": r.clamped})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vibronic-qtm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seed", type=int, default=0, help="master seed for every stochastic path")
    p.add_argument("--threads", type=int, default=1, help="worker threads for orientation averages")
    p.add_argument("--tolerance", type=float, default=1e-8, help="relative Kramers pairing tolerance")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, model=True):
        sp = sub.add_parser(name, help=help_)
        if model:
            sp.add_argument("model", type=Path, help="JSON model file")
        sp.add_argument("-o", "--output", type=Path, help="output file (default stdout)")
        sp.set_defaults(func=fn)
        return sp

    def add_lz_opts(sp, bint, rate):
        sp.add_argument("--bint", type=float, nargs="+", default=bint, help="internal field magnitude(s), mT")
        sp.add_argument("--rate", type=float, nargs="+", default=rate, help="sweep rate(s), Oe/s")
        sp.add_argument("--method", choices=("quadrature", "montecarlo"), default="quadrature")
        sp.add_argument("--samples", type=int, default=100_000, help="Monte Carlo sample count")
        sp.add_argument("--n-theta", type=int, default=32, help="polar quadrature nodes")
        sp.add_argument("--n-phi", type=int, default=64, help="azimuthal quadrature nodes")

    add("spectrum", cmd_spectrum, "Kramers doublet energies")
    add("gmatrix", cmd_gmatrix, "electronic, vibronic and total g-matrices")
    sp = add("splitmap", cmd_splitmap, "ground doublet splitting over field directions")
    sp.add_argument("--field", type=float, default=1.0, help="field magnitude, T")
    sp.add_argument("--grid-theta", type=int, default=91)
    sp.add_argument("--grid-phi", type=int, default=181)
    sp = add("lz", cmd_lz, "orientation-averaged LZ probability, electronic vs vibronic")
    add_lz_opts(sp, [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0], [10.0, 20.0])
    sp = add("modes", cmd_modes, "per-mode axiality change and LZ probability")
    add_lz_opts(sp, [1.0], [10.0])
    sp = add("fields", cmd_fields, "dipolar and nuclear internal-field estimates")
    sp.add_argument("--bext", type=float, nargs=3, default=[0.0, 0.0, 0.0], help="external field, T")
    sp.add_argument("--temperature", type=float, default=2.0, help="K")
    sp.add_argument("--mc", type=int, default=0, help="Monte Carlo samples for the dipolar average")
    sp = add("hyst", cmd_hyst, "spin-flip probability from a hysteresis trace", model=False)
    sp.add_argument("trace", type=Path, help="CSV with columns t,B,M")
    sp.add_argument("--msat", type=float, required=True, help="saturation magnetisation, units of M")
    sp.add_argument("--window", type=float, default=DEFAULT_FIT_WINDOW, help="fit window, T")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            text = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except (ModelFileError, KramersPairingError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
