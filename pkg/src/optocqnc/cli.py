"""Command-line front end.

Every subcommand builds an :class:`~optocqnc.tables.OutputTable` and writes
it as CSV (default) or JSON. Exit codes: 0 success, 2 invalid configuration
or arguments, 3 numerical singularity, 4 internal error.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__, oracle
from .config import AXES, Config, ConfigError, SweepPlan, list_presets, load_config, preset_text
from .params import AncillaCoupling, SystemParams
from .response import (
    im_chi_peaks,
    nms_approx,
    nms_eigenfrequencies,
    optical_spring_cqnc,
    optical_spring_free,
)
from .spectra import (
    G2_CONVENTIONS,
    ModeMismatchError,
    default_grid,
    noise_spectrum_cqnc,
    noise_spectrum_free,
    sql_cqnc,
    sql_optimal_g,
    sql_spectrum,
    table1_row,
)
from .stability import (
    JacobianSpec,
    characteristic_coefficients,
    eigen_stability,
    g_max_search,
    hurwitz_determinants,
    hurwitz_stable,
)
from .tables import OutputTable
from .units import rescale_force_spectrum, torque_sensitivity

EXIT_OK, EXIT_CONFIG, EXIT_SINGULAR, EXIT_INTERNAL = 0, 2, 3, 4

QUANTITIES = ("S", "S_c", "R", "gamma_eff", "gamma_eff_c", "G_L", "S_L", "omega_pm", "D_i", "stable")
CONTROLS = ("off", "balanced", "imbalanced")
SINGULAR = (ArithmeticError, np.linalg.LinAlgError)

TABLE1_RATIOS = (0.1, 0.2, 0.3, 0.4, 0.5)


def _fmt(x: float) -> str:
    return repr(float(x))


def _base_metadata(cfg: Config, args) -> dict[str, str]:
    meta = {
        "preset": cfg.meta.get("id", args.config or ""),
        "tool_version": __version__,
        "seed": str(args.seed),
        "control": args.control or "config",
        "phi": "0",
        "omega_units": "omega_m",
    }
    p = cfg.params
    for name in ("gamma_m", "kappa_b", "delta_b", "big_g", "n_th", "omega_m"):
        meta[f"param.{name}"] = _fmt(getattr(p, name))
    if cfg.ancilla is not None and args.control != "off":
        meta["ancilla.mode"] = cfg.ancilla_mode
        for name in ("g1", "g2", "delta_c", "kappa_c"):
            meta[f"ancilla.{name}"] = _fmt(getattr(cfg.ancilla, name))
    if "assumptions" in cfg.meta:
        meta["assumptions"] = cfg.meta["assumptions"]
    return meta


def _cqnc_mode(control: str | None) -> str:
    return {"balanced": "balanced", "imbalanced": "imbalanced"}.get(control or "", "auto")


def _use_ancilla(cfg: Config, control: str | None) -> bool:
    if control == "off":
        return False
    if control in ("balanced", "imbalanced") and cfg.ancilla is None:
        raise ConfigError(f"--control {control} needs an [ancilla] section")
    return cfg.ancilla is not None


def _pointwise(fn, grid, width):
    """Evaluate ``fn`` per point; singular points become NaN with pole = 1."""
    rows = []
    for x in grid:
        try:
            vals = list(fn(float(x)))
            rows.append([float(x), *vals, 0.0])
        except SINGULAR:
            rows.append([float(x), *([math.nan] * width), 1.0])
    return rows


def _grid_from_args(args, default=None):
    if args.points is None and args.omin is None and args.omax is None and default is not None:
        return default
    lo = 0.5 if args.omin is None else args.omin
    hi = 1.5 if args.omax is None else args.omax
    n = 2001 if args.points is None else args.points
    if n < 2 or not lo < hi:
        raise ConfigError("grid needs points >= 2 and min < max")
    return np.linspace(lo, hi, n)


# ---- spectrum ---------------------------------------------------------------


def cmd_spectrum(cfg: Config, args) -> OutputTable:
    grid = _grid_from_args(args, default_grid())
    p = cfg.params
    with_anc = _use_ancilla(cfg, args.control)
    mode = _cqnc_mode(args.control)
    free_cols = ["thermal", "background", "backaction", "shot"]
    cqnc_cols = ["ancilla_background", "interference_terms", "shot"]
    cols = ["omega", "S_total", *free_cols]
    if with_anc:
        if mode == "balanced" and not cfg.ancilla.balanced:
            raise ModeMismatchError("balanced control requires g1 == g2")
        cols += ["S_c_total", *(f"S_c_{c}" for c in cqnc_cols), "ratio"]

    def point(w):
        f = noise_spectrum_free(w, p)
        out = [float(f.total), *(float(f.components[c]) for c in free_cols)]
        if with_anc:
            c = noise_spectrum_cqnc(w, p, cfg.ancilla, mode)
            out += [float(c.total), *(float(c.components[k]) for k in cqnc_cols), float(c.total / f.total)]
        return out

    rows = _pointwise(point, grid, len(cols) - 1)
    meta = _base_metadata(cfg, args)
    meta["command"] = "spectrum"
    return OutputTable([*cols, "pole"], rows, meta)


# ---- sweep ------------------------------------------------------------------


def _axis_values(plan: SweepPlan) -> np.ndarray:
    if plan.spacing == "log":
        return np.geomspace(plan.lo, plan.hi, plan.points)
    return np.linspace(plan.lo, plan.hi, plan.points)


def _point_state(cfg: Config, plan: SweepPlan, x: float, control):
    """(params, ancilla, omega, phi) at axis value ``x``."""
    p = cfg.params
    anc = cfg.ancilla if _use_ancilla(cfg, control) else None
    omega, phi = plan.omega, 0.0
    if plan.axis == "omega":
        omega = x
    elif plan.axis == "phi":
        phi = x
    elif plan.axis == "G":
        p = p.with_(big_g=x)
        if anc is not None:
            anc = cfg.ancilla_for(p)
    elif plan.axis == "delta_c":
        if anc is None:
            raise ConfigError("delta_c sweep needs an ancilla")
        anc = anc.with_(delta_c=x)
        if plan.tie_delta_b:
            p = p.with_(delta_b=x)
    elif plan.axis == "g_n":
        if anc is None:
            raise ConfigError("g_n sweep needs an ancilla")
        if plan.hold == "g_c":
            anc = AncillaCoupling.from_gc_gn(anc.g_c, x, anc.delta_c, anc.kappa_c)
        else:
            g2 = plan.g2_ratio * math.sqrt(2.0) * p.big_g
            anc = AncillaCoupling(g2 + x, g2, anc.delta_c, anc.kappa_c)
    return p, anc, omega, phi


def _free_total(p: SystemParams, omega: float, phi: float) -> float:
    if phi == 0.0:
        return float(noise_spectrum_free(omega, p).total)
    return float(oracle.spectrum_from_statespace(oracle.build_system(p, None, phi), omega))


def _cqnc_total(p: SystemParams, anc, omega: float, phi: float, control) -> float:
    if anc is None:
        raise ConfigError("S_c and R need an ancilla")
    if phi == 0.0:
        return float(noise_spectrum_cqnc(omega, p, anc, _cqnc_mode(control)).total)
    if control == "balanced" and not anc.balanced:
        raise ModeMismatchError("balanced control requires g1 == g2")
    return float(oracle.spectrum_from_statespace(oracle.build_system(p, anc, phi), omega))


def _columns_for(q: str, dim: int) -> list[str]:
    if q == "omega_pm":
        return ["omega_plus_re", "omega_plus_im", "omega_minus_re", "omega_minus_im"]
    if q == "D_i":
        return [f"D{i}" for i in range(1, dim + 1)]
    if q == "gamma_eff":
        return ["gamma_eff", "gamma_eff_over_gamma_m"]
    if q == "gamma_eff_c":
        return ["gamma_eff_c", "gamma_eff_c_over_gamma_m"]
    return [q]


def _quantity(q: str, p: SystemParams, anc, omega: float, phi: float, control) -> list[float]:
    if q == "S":
        return [_free_total(p, omega, phi)]
    if q == "S_c":
        return [_cqnc_total(p, anc, omega, phi, control)]
    if q == "R":
        return [1.0 - _cqnc_total(p, anc, omega, phi, control) / _free_total(p, omega, phi)]
    if q == "gamma_eff":
        g = float(optical_spring_free(omega, p).gamma_eff)
        return [g, g / p.gamma_m]
    if q == "gamma_eff_c":
        if anc is None:
            raise ConfigError("gamma_eff_c needs an ancilla")
        g = float(optical_spring_cqnc(omega, p, anc).gamma_eff)
        return [g, g / p.gamma_m]
    if q == "G_L":
        return [float(sql_optimal_g(omega, p))]
    if q == "S_L":
        return [float(sql_spectrum(omega, p))]
    if q == "omega_pm":
        plus, minus = nms_eigenfrequencies(p)
        return [plus.real, plus.imag, minus.real, minus.imag]
    if q == "D_i":
        return [float(d) for d in hurwitz_determinants(characteristic_coefficients(JacobianSpec(p, anc)))]
    if q == "stable":
        return [1.0 if hurwitz_stable(characteristic_coefficients(JacobianSpec(p, anc))) else 0.0]
    raise ConfigError(f"unknown quantity {q!r}")


def _check_outputs(outputs) -> None:
    bad = [q for q in outputs if q not in QUANTITIES]
    if bad:
        raise ConfigError(f"unknown quantity {', '.join(bad)}; vocabulary: {', '.join(QUANTITIES)}")
    if not outputs:
        raise ConfigError(f"no outputs requested; vocabulary: {', '.join(QUANTITIES)}")


def cmd_sweep(cfg: Config, plan: SweepPlan, args) -> OutputTable:
    _check_outputs(plan.outputs)
    xs = _axis_values(plan)
    control = args.control
    p0, anc0, _, _ = _point_state(cfg, plan, float(xs[0]), control)
    dim = 6 if anc0 is not None else 4
    cols = [plan.axis]
    for q in plan.outputs:
        cols += _columns_for(q, dim)

    def point(x):
        p, anc, omega, phi = _point_state(cfg, plan, x, control)
        out = []
        for q in plan.outputs:
            out += _quantity(q, p, anc, omega, phi, control)
        return out

    rows = _pointwise(point, xs, len(cols) - 1)
    meta = _base_metadata(cfg, args)
    meta.update(
        {
            "command": "sweep",
            "axis": plan.axis,
            "spacing": plan.spacing,
            "eval_omega": _fmt(plan.omega),
            "hold": plan.hold,
            "g2_ratio": _fmt(plan.g2_ratio),
            "tie_delta_b": str(plan.tie_delta_b).lower(),
        }
    )
    return OutputTable([*cols, "pole"], rows, meta)


# ---- stability --------------------------------------------------------------


def _table1(cfg: Config, args) -> OutputTable:
    cols = ["g2_over_sqrt2G", "gn_over_sqrt2G", "halfwidth", "R", "gamma_eff_over_gamma_m", "G_max"]
    rows = []
    for name in ("g2_half", "g2_full"):
        for r in TABLE1_RATIOS:
            row = table1_row(cfg.params, r, name)
            rows.append([G2_CONVENTIONS[name], r, *row.as_tuple()])
    meta = _base_metadata(cfg, args)
    meta.update({"command": "stability --table1", "conventions": "g2_over_sqrt2G = 0.5 (half) and 1.0 (full)"})
    return OutputTable(cols, rows, meta)


def cmd_stability(cfg: Config, args, report_stream=None) -> OutputTable:
    if args.table1:
        return _table1(cfg, args)
    anc = cfg.ancilla if _use_ancilla(cfg, args.control) else None
    rep = eigen_stability(JacobianSpec(cfg.params, anc))
    n = len(rep.coefficients) - 1
    cols = [f"a{i}" for i in range(n + 1)] + [f"D{i}" for i in range(1, n + 1)]
    cols += ["max_re_eig", "hurwitz_stable", "eigen_stable"]
    row = [*map(float, rep.coefficients), *map(float, rep.hurwitz_determinants), -rep.margin]
    row += [float(rep.hurwitz_verdict), float(rep.eigen_verdict)]
    meta = _base_metadata(cfg, args)
    meta.update({"command": "stability", "binding_constraint": rep.binding_constraint})
    if args.find_gmax:
        if anc is not None and cfg.ancilla_mode == "matched":
            target = lambda G: cfg.ancilla_for(cfg.params.with_(big_g=G))  # noqa: E731
        else:
            target = anc
        gmax = g_max_search(cfg.params, target)
        cols.append("G_max")
        row.append(gmax)
    if report_stream is not None:
        print(rep.summary(), file=report_stream)
    return OutputTable(cols, [row], meta)


# ---- sql / nms / rescale ----------------------------------------------------


def cmd_sql(cfg: Config, args) -> OutputTable:
    grid = _grid_from_args(args, default_grid())
    p = cfg.params
    anc = cfg.ancilla_for(p) if cfg.ancilla is not None else None

    def point(w):
        out = [float(sql_optimal_g(w, p)), float(sql_spectrum(w, p))]
        if anc is not None:
            out.append(float(sql_cqnc(w, p, anc)))
        return out

    cols = ["omega", "G_L", "S_L"] + (["S_L_c"] if anc is not None else [])
    meta = _base_metadata(cfg, args)
    meta["command"] = "sql"
    return OutputTable([*cols, "pole"], _pointwise(point, grid, len(cols) - 1), meta)


def cmd_nms(cfg: Config, args) -> OutputTable:
    p0 = cfg.params
    if args.points is None and args.omin is None and args.omax is None:
        gs = np.geomspace(0.5 * p0.kappa_b, 10.0 * p0.kappa_b, 40)
    else:
        gs = _grid_from_args(args)
    w = np.linspace(0.5, 1.5, 100001) * p0.omega_m

    def point(G):
        p = p0.with_(big_g=G)
        plus, minus = nms_eigenfrequencies(p)
        ap, am = nms_approx(p)
        peaks = im_chi_peaks(w, p)
        split = float(np.ptp(peaks)) if len(peaks) > 1 else 0.0
        return [plus.real, plus.imag, minus.real, minus.imag, ap.real, ap.imag, am.real, am.imag, len(peaks), split]

    cols = [
        "G",
        "omega_plus_re",
        "omega_plus_im",
        "omega_minus_re",
        "omega_minus_im",
        "approx_plus_re",
        "approx_plus_im",
        "approx_minus_re",
        "approx_minus_im",
        "im_chi_peaks",
        "peak_splitting",
    ]
    meta = _base_metadata(cfg, args)
    meta["command"] = "nms"
    return OutputTable([*cols, "pole"], _pointwise(point, gs, len(cols) - 1), meta)


def cmd_rescale(cfg: Config, args) -> OutputTable:
    if cfg.si is None:
        raise ConfigError("rescale needs an [si] section")
    p = cfg.params
    anc = cfg.ancilla_for(p) if _use_ancilla(cfg, args.control) else None
    grid = _grid_from_args(args, np.array([p.omega_m]))
    cols = ["omega", "S", "S_SI"]
    if anc is not None:
        cols += ["S_c", "S_c_SI", "ratio_SI"]
    if args.torque:
        cols += ["S_L_c", "torque_SI"]
    mode = _cqnc_mode(args.control)

    def point(w):
        s = float(noise_spectrum_free(w, p).total)
        out = [s, float(rescale_force_spectrum(s, cfg.si))]
        if anc is not None:
            sc = float(noise_spectrum_cqnc(w, p, anc, mode).total)
            sc_si = float(rescale_force_spectrum(sc, cfg.si))
            out += [sc, sc_si, sc_si / out[1]]
        if args.torque:
            if anc is None:
                raise ConfigError("--torque needs an ancilla")
            slc = float(sql_cqnc(w, p, anc))
            out += [slc, float(torque_sensitivity(slc, cfg.si))]
        return out

    meta = _base_metadata(cfg, args)
    meta.update(
        {
            "command": "rescale",
            "si.mass": _fmt(cfg.si.mass),
            "si.omega_m_si": _fmt(cfg.si.omega_m_si),
            "si.spectrum_units": "N^2/Hz, dimensionless S taken in rad/s",
        }
    )
    if cfg.si.temperature is not None:
        meta["si.temperature"] = _fmt(cfg.si.temperature)
    if cfg.si.mirror_arm_r is not None:
        meta["si.mirror_arm_r"] = _fmt(cfg.si.mirror_arm_r)
    return OutputTable([*cols, "pole"], _pointwise(point, grid, len(cols) - 1), meta)


# ---- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="INI configuration file")
    src.add_argument("--preset", metavar="NAME", help="bundled preset (see 'preset list')")
    common.add_argument("--output", metavar="PATH", help="write the table here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0, help="recorded in metadata; all commands are deterministic")
    common.add_argument("--control", choices=CONTROLS, default=None, help="default: use the ancilla if configured")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--min", dest="omin", type=float)
    grid.add_argument("--max", dest="omax", type=float)
    grid.add_argument("--points", type=int)

    parser = argparse.ArgumentParser(prog="optocqnc", description="Force-noise spectra with coherent noise cancellation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common, grid], help="noise spectrum on a frequency grid")
    sw = sub.add_parser("sweep", parents=[common], help="sweep one parameter")
    sw.add_argument("--axis", choices=AXES)
    sw.add_argument("--min", dest="lo", type=float)
    sw.add_argument("--max", dest="hi", type=float)
    sw.add_argument("--points", type=int)
    sw.add_argument("--spacing", choices=("linear", "log"))
    sw.add_argument("--outputs", help="comma-separated quantities: " + ", ".join(QUANTITIES))
    st = sub.add_parser("stability", parents=[common], help="Hurwitz and eigenvalue stability")
    st.add_argument("--find-gmax", action="store_true")
    st.add_argument("--table1", action="store_true", help="working-range table under both g2 conventions")
    sub.add_parser("sql", parents=[common, grid], help="standard quantum limit on a grid")
    sub.add_parser("nms", parents=[common, grid], help="normal-mode frequencies versus G")
    rs = sub.add_parser("rescale", parents=[common, grid], help="SI force spectra")
    rs.add_argument("--torque", action="store_true")
    pr = sub.add_parser("preset", help="list or show bundled presets")
    pr.add_argument("action", choices=("list", "show"))
    pr.add_argument("name", nargs="?")
    return parser


def _sweep_plan(cfg: Config, args) -> SweepPlan:
    base = cfg.sweep
    if base is None and args.axis is None:
        raise ConfigError("no [sweep] section and no --axis given")
    fields = {}
    if base is not None:
        fields = {k: getattr(base, k) for k in SweepPlan.__dataclass_fields__}
    overrides = {"axis": args.axis, "lo": args.lo, "hi": args.hi, "points": args.points, "spacing": args.spacing}
    for k, v in overrides.items():
        if v is not None:
            fields[k] = v
    if args.outputs is not None:
        fields["outputs"] = tuple(x.strip() for x in args.outputs.split(",") if x.strip())
    missing = [k for k in ("axis", "lo", "hi", "points") if k not in fields]
    if missing:
        raise ConfigError("sweep needs " + ", ".join(missing))
    if "outputs" in fields:
        _check_outputs(fields["outputs"])
    try:
        return SweepPlan(**fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "preset":
            if args.action == "list":
                print("\n".join(list_presets()), file=stdout)
            else:
                if not args.name:
                    raise ConfigError("preset show needs a name")
                print(preset_text(args.name), end="", file=stdout)
            return EXIT_OK
        if args.config is None and args.preset is None:
            args.preset = "canonical"
        cfg = load_config(args.config, args.preset)
        if args.command == "spectrum":
            table = cmd_spectrum(cfg, args)
        elif args.command == "sweep":
            table = cmd_sweep(cfg, _sweep_plan(cfg, args), args)
        elif args.command == "stability":
            table = cmd_stability(cfg, args, report_stream=stderr)
        elif args.command == "sql":
            table = cmd_sql(cfg, args)
        elif args.command == "nms":
            table = cmd_nms(cfg, args)
        else:
            table = cmd_rescale(cfg, args)
        text = table.dump(args.format)
        if args.output:
            with open(args.output, "w", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        return EXIT_OK
    except (ConfigError, ModeMismatchError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except SINGULAR as exc:
        print(f"singular: {exc}", file=stderr)
        return EXIT_SINGULAR
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INTERNAL


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
