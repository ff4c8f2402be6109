"""Command-line front end.

Quantities on the command line carry unit suffixes (``100nm``, ``10mK``,
``0.5Pa``); a bare ``0`` is accepted where zero is unambiguous.  All output
goes to stdout, all errors to stderr.  Exit codes: 0 success, 1 domain or
convergence error, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

from .config import (
    load_device_config,
    parse_length,
    parse_material_spec,
    parse_pressure,
    parse_temperature,
)
from .designer import (
    MaterialPairDifferential,
    StepPressureSignal,
    SweepSpec,
    detectability_report,
    run_gap_sweep,
    simulate_temperature_scan,
)
from .errors import CasimirChipError, ConfigError
from .film import (
    coherence_length,
    conductivity_from_four_point,
    extract_tc,
    ingest_rt_table,
    mean_free_path,
    penetration_depth,
)
from .lifshitz import LifshitzNumerics, plate_pressure
from .mechanics import derive_mechanics, pressure_to_gap_change
from .readout import (
    gap_change_to_frequency_shift,
    min_detectable_pressure,
    pdh_voltage,
)
from .serialize import fmt, render_kv, scan_csv, sweep_csv, verdicts_csv


def _add_config_arg(parser, required):
    parser.add_argument(
        "--config", required=required, metavar="FILE",
        help="device config file (unit-suffixed keys; see the bundled "
             "example_device.cfg)",
    )


def _add_numerics_args(parser):
    parser.add_argument("--rel-tol-series", type=float, default=1e-6,
                        help="relative tolerance of the Matsubara sum (dimensionless)")
    parser.add_argument("--rel-tol-quadrature", type=float, default=1e-8,
                        help="relative tolerance of the k-integration (dimensionless)")
    parser.add_argument("--max-terms", type=int, default=5_000_000,
                        help="Matsubara term budget before a convergence error")
    parser.add_argument("--t-zero-nodes", type=int, default=200,
                        help="frequency-integral nodes for the T = 0 branch")


def _numerics(args):
    return LifshitzNumerics(
        rel_tol_quadrature=args.rel_tol_quadrature,
        rel_tol_series=args.rel_tol_series,
        max_matsubara_terms=args.max_terms,
        t_zero_nodes=args.t_zero_nodes,
    )


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="casimirchip",
        description="Measurement-chain modeling for on-chip Casimir experiments "
                    "between superconducting nanobeams.  Internally everything is "
                    "SI; command-line quantities carry unit suffixes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pressure", help="parallel-plate Casimir pressure")
    p.add_argument("--gap", required=True,
                   help="plate separation with unit, e.g. 100nm or 0.1um")
    p.add_argument("--temp", required=True,
                   help="temperature with unit, e.g. 1.2K or 10mK (bare 0 allowed)")
    p.add_argument("--model-a", required=True, metavar="MATERIAL",
                   help="'ideal', a config material name, or an inline spec "
                        "like drude:omega_p_eV=12,gamma_meV=50")
    p.add_argument("--model-b", required=True, metavar="MATERIAL",
                   help="second plate material (same syntax as --model-a)")
    _add_config_arg(p, required=False)
    _add_numerics_args(p)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("sweep", help="gap sweep over material pairs (CSV)")
    _add_config_arg(p, required=True)
    p.add_argument("--spec", metavar="FILE",
                   help="config file whose [sweep] section overrides the device "
                        "config's (gap_*_nm, temperatures_K, pairs)")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel evaluators; the CSV is byte-identical for any value")
    _add_numerics_args(p)
    p.add_argument("--output", metavar="FILE", help="write CSV here instead of stdout")

    p = sub.add_parser("scan", help="simulated temperature scan of the cavity shift")
    _add_config_arg(p, required=True)
    p.add_argument("--tmin", required=True, help="coldest grid point, e.g. 100mK")
    p.add_argument("--tmax", required=True, help="hottest grid point, e.g. 1.2K")
    p.add_argument("--points", type=int, default=25, help="grid size")
    p.add_argument("--theory", required=True,
                   help="'grav-casimir' (step signal from [signals]) or "
                        "'A/B-vs-C/D' with material names/inline specs, e.g. "
                        "al_sc/al_sc-vs-al_drude/al_drude")
    _add_numerics_args(p)
    p.add_argument("--output", metavar="FILE", help="write CSV here instead of stdout")

    p = sub.add_parser("film", help="dirty-limit film parameters (xi, lambda, ell)")
    _add_config_arg(p, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--sigma", type=float, metavar="S",
                       help="measured 4 K conductivity in (ohm m)^-1; default: "
                            "sigma_4k_per_ohm_m from the config")
    group.add_argument("--r4k", type=float, metavar="OHM",
                       help="measured 4 K wire resistance in ohm (uses the config "
                            "wire length and cross section)")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("tc", help="extract T_c from a four-point R(T) CSV")
    p.add_argument("--input", required=True, metavar="FILE",
                   help="CSV with header temperature_K,resistance_ohm "
                        "(# lines are comments)")
    p.add_argument("--threshold", type=float, default=0.5,
                   help="fraction of R_normal defining the conventional crossing")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("transduce",
                       help="pressure -> gap change, cavity shift, PDH voltage")
    _add_config_arg(p, required=True)
    p.add_argument("--pressure", required=True,
                   help="attractive pressure with unit, e.g. 0.5Pa or 6mPa")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("detect", help="detectability verdicts vs the chain floor")
    _add_config_arg(p, required=True)
    p.add_argument("--signal", action="append", default=[], metavar="NAME=PRESSURE",
                   help="named signal, e.g. grav=0.5Pa (repeatable; defaults to "
                        "the config [signals] section)")

    p = sub.add_parser("validate", help="config lint and derived-parameter report")
    _add_config_arg(p, required=True)
    return parser


def _cmd_pressure(args):
    materials = {}
    if args.config:
        materials = load_device_config(args.config).materials
    mat_a = parse_material_spec(args.model_a, materials)
    mat_b = parse_material_spec(args.model_b, materials)
    gap = parse_length(args.gap)
    temp = parse_temperature(args.temp)
    result = plate_pressure(gap, temp, mat_a, mat_b, _numerics(args))
    sys.stdout.write(render_kv([
        ("pressure_Pa", result.pressure),
        ("terms_used", result.terms_used),
        ("truncation_estimate_Pa", result.truncation_estimate),
        ("quadrature_estimate_Pa", result.quadrature_estimate),
    ], args.format))
    return 0


def _resolve_sweep(settings, materials):
    pairs = []
    for name_a, name_b in settings.pair_names:
        pairs.append((
            f"{name_a}/{name_b}",
            parse_material_spec(name_a, materials),
            parse_material_spec(name_b, materials),
        ))
    return SweepSpec(
        gap_min=settings.gap_min, gap_max=settings.gap_max,
        gap_step=settings.gap_step, temperatures=settings.temperatures,
        pairs=tuple(pairs),
    )


def _cmd_sweep(args):
    cfg = load_device_config(args.config)
    settings = cfg.sweep
    if args.spec:
        settings = _sweep_only(args.spec)
    if settings is None:
        raise ConfigError(["config has no [sweep] section and no --spec was given"])
    spec = _resolve_sweep(settings, cfg.materials)
    rows = run_gap_sweep(spec, cfg.geometry, cfg.cavity, cfg.calib,
                         _numerics(args), workers=args.workers)
    text = sweep_csv(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _sweep_only(path):
    """Read just the [sweep] section of a spec file."""
    import configparser

    from .config import _SWEEP_SCHEMA, _parse_float_list, _parse_section, SweepSettings

    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError([f"cannot read sweep spec: {exc}"]) from None
    problems = []
    values = _parse_section(parser, "sweep", _SWEEP_SCHEMA, problems)
    temps = _parse_float_list(values.get("temperatures_K", ""),
                              "[sweep] temperatures_K", problems)
    pair_names = []
    for item in values.get("pairs", "").split(","):
        item = item.strip()
        if item:
            a, sep, b = item.partition("/")
            if not sep:
                problems.append(f"[sweep] pairs: expected 'name/name', got {item!r}")
                continue
            pair_names.append((a.strip(), b.strip()))
    if problems:
        raise ConfigError(problems)
    return SweepSettings(values["gap_min_nm"], values["gap_max_nm"],
                         values["gap_step_nm"], temps, tuple(pair_names))


def _parse_theory(text, cfg):
    token = text.strip()
    if token == "grav-casimir":
        magnitude = dict(cfg.signals).get("gravitational_casimir")
        if magnitude is None:
            raise ConfigError(
                ["theory grav-casimir needs gravitational_casimir_Pa in [signals]"]
            )
        return StepPressureSignal("grav-casimir", magnitude, cfg.film.t_c)
    pair_part, sep, ref_part = token.partition("-vs-")
    if not sep:
        raise CasimirChipError(
            f"theory must be 'grav-casimir' or 'A/B-vs-C/D', got {text!r}"
        )

    def pair_of(part):
        a, slash, b = part.partition("/")
        if not slash:
            raise CasimirChipError(f"material pair must be 'A/B', got {part!r}")
        return (parse_material_spec(a, cfg.materials),
                parse_material_spec(b, cfg.materials))

    return MaterialPairDifferential(token, pair_of(pair_part), pair_of(ref_part))


def _cmd_scan(args):
    cfg = load_device_config(args.config)
    theory = _parse_theory(args.theory, cfg)
    tmin = parse_temperature(args.tmin)
    tmax = parse_temperature(args.tmax)
    if not (tmin < tmax and args.points >= 2):
        raise CasimirChipError("need tmin < tmax and at least 2 grid points")
    step = (tmax - tmin) / (args.points - 1)
    grid = [tmin + i * step for i in range(args.points)]
    points = simulate_temperature_scan(cfg.geometry, cfg.cavity, cfg.calib,
                                       grid, theory, _numerics(args))
    text = scan_csv(points, resolution_band=cfg.calib.min_resolvable_shift,
                    drift_band=cfg.calib.drift_bound)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_film(args):
    cfg = load_device_config(args.config)
    film = cfg.film
    if args.r4k is not None:
        sigma = conductivity_from_four_point(film.wire_length, film.cross_section,
                                             args.r4k)
        source = f"r4k = {args.r4k} ohm"
    elif args.sigma is not None:
        sigma = args.sigma
        source = "--sigma"
    else:
        sigma = cfg.film_measured.get("sigma_4k")
        if sigma is None:
            raise ConfigError(
                ["no conductivity: give --sigma/--r4k or set sigma_4k_per_ohm_m"]
            )
        source = "config sigma_4k_per_ohm_m"

    ell = mean_free_path(sigma, film.rho_ell)
    pairs = [
        ("conductivity_source", source),
        ("sigma_4k_per_ohm_m", sigma),
        ("rho_ell_ohm_m2", film.rho_ell),
        ("mean_free_path_from_sigma_nm", ell * 1e9),
    ]
    quoted = cfg.film_measured.get("quoted_mean_free_path")
    ells = [("from_sigma", ell)]
    if quoted is not None:
        pairs.append(("quoted_mean_free_path_nm", quoted * 1e9))
        if abs(quoted - ell) > 0.05 * ell:
            pairs.append((
                "mean_free_path_note",
                "sigma * rho_ell and the quoted mean free path disagree; "
                "lengths are reported for both, unresolved",
            ))
        ells.append(("from_quoted", quoted))
    for tag, l_mfp in ells:
        pairs.extend([
            (f"coherence_length_approx_{tag}_nm",
             coherence_length(film.xi0, l_mfp, mode="approx") * 1e9),
            (f"coherence_length_exact_t0_{tag}_nm",
             coherence_length(film.xi0, l_mfp, 0.0, film.t_c, mode="exact") * 1e9),
            (f"penetration_depth_approx_{tag}_nm",
             penetration_depth(film.lambda_l, film.xi0, l_mfp, mode="approx") * 1e9),
            (f"penetration_depth_exact_t0_{tag}_nm",
             penetration_depth(film.lambda_l, film.xi0, l_mfp, 0.0, film.t_c,
                               mode="exact") * 1e9),
        ])
    pairs.append(("mode_note",
                  "approx = plateau form; exact_t0 = prefactor form at T = 0"))
    sys.stdout.write(render_kv(pairs, args.format))
    return 0


def _cmd_tc(args):
    with open(args.input, "rb") as handle:
        curve = ingest_rt_table(handle.read())
    result = extract_tc(curve, threshold_fraction=args.threshold)
    pairs = [
        ("tc_K", result.t_c),
        ("transition_width_K", result.transition_width),
        ("r_normal_ohm", result.r_normal),
        ("r_residual_ohm", result.r_residual),
        ("multi_step", result.multi_step),
        ("threshold_crossing_K", result.threshold_crossing),
        ("n_steps", len(result.steps)),
    ]
    for i, (t_step, before, after) in enumerate(result.steps, start=1):
        pairs.extend([
            (f"step{i}_T_K", t_step),
            (f"step{i}_R_before_ohm", before),
            (f"step{i}_R_after_ohm", after),
        ])
    sys.stdout.write(render_kv(pairs, args.format))
    return 0


def _cmd_transduce(args):
    cfg = load_device_config(args.config)
    pressure = parse_pressure(args.pressure)
    gap_change = pressure_to_gap_change(pressure, cfg.geometry)
    shift = gap_change_to_frequency_shift(-gap_change, cfg.cavity)
    voltage = pdh_voltage(shift, cfg.calib)
    sys.stdout.write(render_kv([
        ("pressure_Pa", pressure),
        ("gap_closing_m", gap_change),
        ("freq_shift_Hz", shift),
        ("pdh_voltage_V", voltage),
    ], args.format))
    return 0


def _cmd_detect(args):
    cfg = load_device_config(args.config)
    signals = []
    for item in args.signal:
        name, eq, value = item.partition("=")
        if not eq:
            raise CasimirChipError(f"--signal must be NAME=PRESSURE, got {item!r}")
        signals.append((name.strip(), parse_pressure(value)))
    if not signals:
        signals = list(cfg.signals)
    if not signals:
        raise ConfigError(["no signals: give --signal or a [signals] section"])
    verdicts = detectability_report(signals, cfg.geometry, cfg.cavity, cfg.calib)
    sys.stdout.write(verdicts_csv(verdicts))
    return 0


def _cmd_validate(args):
    lines = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cfg = load_device_config(args.config)
    lines.append(f"config ok: {args.config}")
    for w in caught:
        lines.append(f"warning: {w.message}")

    cavity = cfg.cavity
    q_from_kappa = cavity.omega_c / cavity.kappa
    rel = abs(q_from_kappa - cavity.q_optical) / cavity.q_optical
    lines.append(
        f"q_optical vs omega_c/kappa: {cavity.q_optical:.4g} vs "
        f"{q_from_kappa:.4g} ({rel:.2%} apart; warn above 5%)"
    )
    derived = derive_mechanics(cfg.geometry, m_eff=cfg.m_eff)
    lines.append(f"axial tension: {fmt(derived.tension)} N")
    lines.append(f"fundamental frequency: {derived.f1 / 1e3:.1f} kHz "
                 f"(effective length {cfg.geometry.effective_length * 1e6:.0f} um)")
    lines.append(f"modal stiffness: {derived.k_eff:.3g} N/m "
                 f"(m_eff {cfg.m_eff * 1e15:.0f} pg)")
    floor = min_detectable_pressure(cfg.geometry, cfg.cavity, cfg.calib)
    lines.append(f"pressure floor: {floor.pressure * 1e3:.2f} mPa at gap change "
                 f"{floor.gap_change * 1e15:.0f} fm")
    ratio = cfg.calib.min_resolvable_shift / (cavity.kappa / (2.0 * math.pi))
    lines.append(f"min shift / linewidth: {ratio:.2%}")
    if cfg.geometry.gap <= 5e-9:
        lines.append("warning: gap is at or below the 5 nm roughness scale")
    for name, value in cfg.annotations.items():
        lines.append(f"annotation {name} = {fmt(value)}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


_HANDLERS = {
    "pressure": _cmd_pressure,
    "sweep": _cmd_sweep,
    "scan": _cmd_scan,
    "film": _cmd_film,
    "tc": _cmd_tc,
    "transduce": _cmd_transduce,
    "detect": _cmd_detect,
    "validate": _cmd_validate,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except CasimirChipError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
