"""Command-line front end.

Exit codes: 0 success, 1 validation failed, 2 configuration or argument
error, 3 computation or simulation error.
"""

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import studio
from .actuator import mech_stiffness
from .config import load_config
from .equilibrium import (
    blocking_force,
    frequency_response,
    natural_frequency,
    solve_free_length,
    stack_stiffness,
    static_displacement,
    voltage_sweep,
)
from .errors import ConfigError, DeaError
from .locomotion import (
    PAYLOAD_GRID,
    build_body,
    simulate,
    speed_vs_frequency,
    speed_vs_payload,
)
from .powertrain import input_power, rc_cutoff, trace_to_csv
from .tables import (
    render_csv,
    render_freq_csv,
    render_payload_csv,
    render_speed_freq_csv,
    render_voltage_csv,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3
DEGREE_PARAMS = ("theta", "incline")


class UsageError(ConfigError):
    pass


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


class Output:
    """Routes delimited data and the human/JSON summary."""

    def __init__(self, args):
        self.args = args

    def data(self, text):
        if self.args.out:
            _write(self.args.out, text)
        else:
            sys.stdout.write(text)

    def summary(self, obj, lines):
        stream = sys.stdout if (self.args.out or not self._has_data) else sys.stderr
        if self.args.json:
            stream.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
        else:
            stream.write("".join(line + "\n" for line in lines))

    _has_data = True

    def figure_path(self):
        if not self.args.plot:
            return None
        if not self.args.out:
            raise UsageError("--plot", "needs --out; the figure is written next to it")
        return str(Path(self.args.out).with_suffix(".png"))


def cmd_model(cfg, args, out):
    asm = cfg.assembly
    mode = cfg.solver["stiffness_mode"]
    U = cfg.drive.amplitude
    free = solve_free_length(asm, cfg.solver["force_tol_n"], cfg.solver["max_iter"])
    res = {
        "free_length_m": free.l_dea,
        "free_lambda_y": free.lambda_y,
        "free_residual_n": free.residual,
        "k_stack_secant_n_per_m": stack_stiffness(asm, "secant"),
        "k_stack_tangent_n_per_m": stack_stiffness(asm, "tangent"),
        "k_frame_n_per_m": mech_stiffness(asm.mech),
        "stiffness_mode": mode,
        "natural_frequency_hz": natural_frequency(asm, mode),
        "cutoff_hz": rc_cutoff(cfg.electrical),
        "drive_amplitude_v": U,
        "displacement_m": static_displacement(asm, U),
        "blocking_force_n": blocking_force(asm, U),
    }
    meas = cfg.measured
    lines = [
        f"free length        {res['free_length_m'] * 1e3:.6f} mm (lambda_y {res['free_lambda_y']:.6f})",
        f"k_stack (secant)   {res['k_stack_secant_n_per_m']:.6g} N/m",
        f"k_stack (tangent)  {res['k_stack_tangent_n_per_m']:.6g} N/m",
        f"k_frame            {res['k_frame_n_per_m']:.6g} N/m",
        f"natural frequency  {res['natural_frequency_hz']:.6g} Hz ({mode})",
        f"RC cutoff          {res['cutoff_hz']:.6g} Hz",
        "model vs measured:",
        f"  resonance        {res['natural_frequency_hz']:.4g} Hz | {meas['resonance_hz']:.4g} Hz",
        f"  displacement     {res['displacement_m'] * 1e6:.4g} um | {meas['displacement_m'] * 1e6:.4g} um (at {U:g} V)",
        f"  blocking force   {res['blocking_force_n'] * 1e3:.4g} mN | {meas['blocking_force_n'] * 1e3:.4g} mN",
        f"  RC cutoff        {res['cutoff_hz']:.4g} Hz | {meas['cutoff_hz']:.4g} Hz",
    ]
    out._has_data = False
    out.summary({"config": cfg.to_dict(), "results": res}, lines)
    return EXIT_OK


def cmd_sweep_voltage(cfg, args, out):
    u_max = cfg.drive.amplitude if args.u_max is None else args.u_max
    if not u_max >= 0:
        raise UsageError("--u-max", "must be >= 0")
    if args.n_points < 1:
        raise UsageError("--n-points", "must be >= 1")
    if u_max == 0 or args.n_points == 1:
        volts = [0.0] if args.n_points == 1 or u_max == 0 else None
    else:
        volts = [u_max * k / (args.n_points - 1) for k in range(args.n_points)]
    curve = voltage_sweep(cfg.assembly, volts, workers=cfg.solver["workers"])
    out.data(render_voltage_csv(curve))
    fig = out.figure_path()
    if fig:
        from .plotting import plot_voltage_curve
        plot_voltage_curve(curve, fig, cfg.measured)
    return EXIT_OK


def cmd_freq_response(cfg, args, out):
    zeta = cfg.solver["damping_ratio"] if args.zeta is None else args.zeta
    if not zeta > 0:
        raise UsageError("--zeta", "must be > 0")
    if args.n < 1 or not args.f_max >= args.f_min or args.f_min < 0:
        raise UsageError("--f-min/--f-max/--n", "empty or invalid frequency range")
    U = cfg.drive.amplitude if args.voltage is None else args.voltage
    if args.n == 1:
        freqs = [args.f_min]
    else:
        freqs = [args.f_min + (args.f_max - args.f_min) * k / (args.n - 1) for k in range(args.n)]
    mode = cfg.solver["stiffness_mode"]
    points = frequency_response(cfg.assembly, freqs, U, zeta, mode)
    out.data(render_freq_csv(points))
    fig = out.figure_path()
    if fig:
        from .plotting import plot_frequency_response
        plot_frequency_response(points, fig, natural_frequency(cfg.assembly, mode),
                                cfg.measured["resonance_hz"])
    return EXIT_OK


def _loco_kwargs(cfg, n_cycles=None):
    s = cfg.solver
    return dict(damping_ratio=s["body_damping_ratio"],
                n_cycles=s["n_cycles"] if n_cycles is None else n_cycles,
                steps_per_cycle=s["steps_per_cycle"], structure_mass=cfg.structure_mass,
                g=s["gravity_mps2"])


def _drive_for(cfg, args):
    drive = cfg.drive
    if args.freq is not None:
        if args.freq == "fn":
            f = natural_frequency(cfg.assembly, cfg.solver["stiffness_mode"])
        else:
            try:
                f = float(args.freq)
            except ValueError:
                raise UsageError("--freq", f"expected a number or 'fn', got {args.freq!r}")
            if not f > 0:
                raise UsageError("--freq", "must be > 0")
        drive = replace(drive, frequency=f)
    if args.amplitude is not None:
        if not args.amplitude >= 0:
            raise UsageError("--amplitude", "must be >= 0")
        drive = replace(drive, amplitude=args.amplitude)
    return drive


def cmd_locomote(cfg, args, out):
    drive = _drive_for(cfg, args)
    if args.n_cycles is not None and args.n_cycles < 20:
        raise UsageError("--n-cycles", "must be >= 20")
    kw = _loco_kwargs(cfg, args.n_cycles)
    payload = cfg.payload if args.payload is None else args.payload
    if not payload >= 0:
        raise UsageError("--payload", "must be >= 0")
    fig = out.figure_path()
    workers = cfg.solver["workers"]
    if args.payload_grid:
        table = speed_vs_payload(cfg.assembly, cfg.pad, drive, PAYLOAD_GRID, workers=workers, **kw)
        out.data(render_payload_csv(table))
        if fig:
            from .plotting import plot_speed_table
            plot_speed_table(table, fig, "payload (g)", 1e3)
        out.summary({"drive_hz": drive.frequency, "amplitude_v": drive.amplitude,
                     "payload_kg": [p for p, _ in table], "speed_mps": [v for _, v in table]},
                    [f"payload {p * 1e3:5.2f} g  speed {v * 1e3:.4g} mm/s" for p, v in table])
        return EXIT_OK
    if args.freq_grid:
        fn = natural_frequency(cfg.assembly, cfg.solver["stiffness_mode"])
        freqs = [fn * 0.2 * k for k in range(1, 11)]
        table = speed_vs_frequency(cfg.assembly, cfg.pad, drive, freqs, payload, workers=workers, **kw)
        out.data(render_speed_freq_csv(table))
        if fig:
            from .plotting import plot_speed_table
            plot_speed_table(table, fig, "drive frequency (Hz)")
        out.summary({"fn_hz": fn, "f_hz": [f for f, _ in table], "speed_mps": [v for _, v in table]},
                    [f"f {f:7.3f} Hz  speed {v * 1e3:.4g} mm/s" for f, v in table])
        return EXIT_OK
    body = build_body(cfg.assembly, cfg.pad, payload, kw["damping_ratio"], kw["structure_mass"], kw["g"])
    result = simulate(body, cfg.pad, drive, cfg.assembly, kw["n_cycles"], kw["steps_per_cycle"])
    out.data(render_csv(("t_s", "x_front_m", "x_rear_m", "v_front_mps", "v_rear_mps"), result.rows()))
    if fig:
        from .plotting import plot_trajectory
        plot_trajectory(result, fig)
    out.summary(
        {"mean_velocity_mps": result.mean_velocity, "stroke_m": result.stroke, "cycles": result.cycles,
         "drive_hz": drive.frequency, "amplitude_v": drive.amplitude, "payload_kg": payload},
        [f"mean speed {result.mean_velocity * 1e3:.4g} mm/s over the last {result.cycles // 2} of "
         f"{result.cycles} cycles at {drive.frequency:.4g} Hz, {drive.amplitude:g} V, payload {payload * 1e3:g} g",
         f"stroke {result.stroke * 1e6:.4g} um"],
    )
    return EXIT_OK


def cmd_powertrain(cfg, args, out):
    from .powertrain import simulate_drive_cycle

    drive = cfg.drive
    if args.frequency is not None:
        if not args.frequency > 0:
            raise UsageError("--frequency", "must be > 0")
        drive = replace(drive, frequency=args.frequency)
    if args.amplitude is not None:
        if not args.amplitude >= 0:
            raise UsageError("--amplitude", "must be >= 0")
        drive = replace(drive, amplitude=args.amplitude)
    s = simulate_drive_cycle(cfg.flyback, cfg.electrical.C, drive)
    p_in = input_power(s.trace, drive.frequency)
    target = min(cfg.flyback.v_max, drive.amplitude)
    if args.out:
        out.data(trace_to_csv(s.trace))
    else:
        out._has_data = False
    fig = out.figure_path()
    if fig:
        from .plotting import plot_power_trace
        plot_power_trace(s.trace, fig)
    out.summary(
        {"v_peak_v": s.v_peak, "v_trough_v": s.v_trough, "pulses_per_half_cycle": s.pulses_per_charge,
         "target_v": target, "input_power_w": p_in, "cycles": s.cycles, "converged": s.converged,
         "drive_hz": drive.frequency},
        [f"v_peak {s.v_peak:.6g} V (target {target:g} V)",
         f"v_trough {s.v_trough:.6g} V",
         f"pulses per half-cycle {s.pulses_per_charge}",
         f"converter output power {p_in * 1e3:.4g} mW",
         f"{'charged' if s.v_peak >= target else 'undercharged'} at {drive.frequency:g} Hz "
         f"after {s.cycles} cycles"],
    )
    return EXIT_OK


def _parse_param(text):
    name, sep, rng = text.partition("=")
    parts = rng.split(":")
    if not sep or len(parts) not in (2, 3):
        raise UsageError("--param", f"expected NAME=LO:HI[:N], got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) == 3 else 5
    except ValueError:
        raise UsageError("--param", f"bad numbers in {text!r}")
    if name in DEGREE_PARAMS:
        lo, hi = math.radians(lo), math.radians(hi)
    return name, (lo, hi, n)


def cmd_optimize(cfg, args, out):
    if not args.param:
        raise UsageError("--param", "at least one parameter is required")
    try:
        space = studio.ParamSpace(dict(_parse_param(p) for p in args.param))
        obj = studio.Objective(
            args.objective,
            voltage=cfg.drive.amplitude if args.voltage is None else args.voltage,
            target=args.target if args.target is not None else 0.0,
            drive=cfg.drive, pad=cfg.pad, payload=cfg.payload,
            damping_ratio=cfg.solver["body_damping_ratio"],
        )
    except DeaError as exc:
        raise UsageError("--param/--objective", str(exc))

    def shown(name, v):
        return math.degrees(v) if name in DEGREE_PARAMS else v

    fig = out.figure_path()
    if args.grid:
        result = studio.grid_sweep(space, obj, cfg.assembly, workers=cfg.solver["workers"])
        rows = [tuple(shown(n, v) for n, v in zip(result.names, vals))
                + ("nan" if val is None else val, "true" if ok else "false")
                for vals, val, ok in result.rows]
        out.data(render_csv(list(result.names) + ["objective", "feasible"], rows))
        if fig:
            from .plotting import plot_sweep
            plot_sweep(result, fig)
        best = result.best_row()
        out.summary(
            {"best": None if best is None else {**{n: shown(n, v) for n, v in zip(result.names, best[0])},
                                                 "objective": best[1]},
             "rows": len(result.rows)},
            ["no feasible point" if best is None else
             "best " + " ".join(f"{n}={shown(n, v):.6g}" for n, v in zip(result.names, best[0]))
             + f" objective={best[1]:.6g}"],
        )
        return EXIT_OK

    start = {}
    for item in args.start or []:
        name, _, val = item.partition("=")
        try:
            v = float(val)
        except ValueError:
            raise UsageError("--start", f"bad value in {item!r}")
        start[name] = math.radians(v) if name in DEGREE_PARAMS else v
    for name in space.names:
        if name not in start:
            lo, hi = space.bounds(name)
            start[name] = 0.5 * (lo + hi)
    try:
        res = studio.optimize(space, obj, cfg.assembly, start, tol=args.tol, max_iter=args.max_iter)
    except studio.DomainError as exc:
        raise UsageError("--start", str(exc))
    rows = [tuple(shown(n, p[n]) for n in space.names)
            + ("nan" if v is None else v, "true" if ok else "false") for p, v, ok in res.trace]
    out.data(render_csv(space.names + ["objective", "feasible"], rows))
    if fig:
        from .plotting import plot_speed_table
        plot_speed_table([(i, v) for i, (_, v, ok) in enumerate(res.trace) if ok], fig, "evaluation")
    best = {n: shown(n, v) for n, v in res.point.items()}
    out.summary({"best": best, "objective": res.value, "iterations": res.iterations,
                 "evaluations": len(res.trace)},
                ["best " + " ".join(f"{n}={v:.6g}" for n, v in best.items()) + f" objective={res.value:.6g}",
                 f"{res.iterations} iterations, {len(res.trace)} evaluations"])
    return EXIT_OK


def cmd_validate(cfg, args, out):
    from .validation import run_validation

    report = run_validation(cfg)
    text = report.render()
    if args.json:
        obj = {"passed": report.passed, "criteria": [
            {"number": c.number, "title": c.title, "passed": c.passed,
             "checks": [{"label": l, "passed": ok, "detail": d} for l, ok, d in c.checks]}
            for c in report.criteria],
            "context": [{"label": l, "model": m, "measured": x} for l, m, x in report.context]}
        text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    out.data(text)
    if args.out:
        sys.stdout.write(f"overall: {'PASS' if report.passed else 'FAIL'}\n")
    fig = out.figure_path()
    if fig:
        from .plotting import plot_validation
        asm, s = cfg.assembly, cfg.solver
        U = cfg.drive.amplitude
        curve = voltage_sweep(asm, [U * k / 22 for k in range(23)] if U > 0 else [0.0])
        fn = natural_frequency(asm, s["stiffness_mode"])
        resp = frequency_response(asm, [150.0 * k / 299 + 1.0 for k in range(300)], U,
                                  s["damping_ratio"], s["stiffness_mode"])
        plot_validation(curve, resp, fn, cfg.measured, fig)
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "model": cmd_model,
    "sweep-voltage": cmd_sweep_voltage,
    "freq-response": cmd_freq_response,
    "locomote": cmd_locomote,
    "powertrain": cmd_powertrain,
    "optimize": cmd_optimize,
    "validate": cmd_validate,
}


def _global_options(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--config", default=d(None), help="design file (.toml or .json)")
    parser.add_argument("--json", action="store_true", default=d(False), help="machine-readable summary")
    parser.add_argument("--out", default=d(None), help="write delimited output here")
    parser.add_argument("--seed", type=int, default=d(None), help="reserved; all algorithms are deterministic")
    parser.add_argument("--plot", action="store_true", default=d(False),
                        help="also render a PNG figure next to --out")


def build_parser():
    parser = argparse.ArgumentParser(prog="deaforge", description="Thin in-plane DEA design toolkit")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("model", parents=[common], help="free state, stiffnesses, resonance, cutoff")

    p = sub.add_parser("sweep-voltage", parents=[common], help="displacement/blocking force vs voltage")
    p.add_argument("--u-max", type=float, default=None)
    p.add_argument("--n-points", type=int, default=23)

    p = sub.add_parser("freq-response", parents=[common], help="single-mode amplitude vs frequency")
    p.add_argument("--f-min", type=float, default=0.0)
    p.add_argument("--f-max", type=float, default=150.0)
    p.add_argument("--n", type=int, default=151)
    p.add_argument("--voltage", type=float, default=None)
    p.add_argument("--zeta", type=float, default=None)

    p = sub.add_parser("locomote", parents=[common], help="stick-slip crawling simulation")
    p.add_argument("--payload", type=float, default=None, help="kg")
    p.add_argument("--n-cycles", type=int, default=None)
    p.add_argument("--freq", default=None, help="drive frequency in Hz, or 'fn' for the model resonance")
    p.add_argument("--amplitude", type=float, default=None, help="V")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--payload-grid", action="store_true", help="run the 0-3 g payload grid")
    g.add_argument("--freq-grid", action="store_true", help="run speed vs frequency over 0.2..2 f_n")

    p = sub.add_parser("powertrain", parents=[common], help="flyback charge/discharge steady state")
    p.add_argument("--frequency", type=float, default=None)
    p.add_argument("--amplitude", type=float, default=None)

    p = sub.add_parser("optimize", parents=[common], help="parameter sweep or Nelder-Mead search")
    p.add_argument("--param", action="append", help="NAME=LO:HI[:N] (theta, incline in degrees)")
    p.add_argument("--objective", default="static_displacement_at_U",
                   choices=["static_displacement_at_U", "resonance_match", "locomotion_speed"])
    p.add_argument("--target", type=float, default=None, help="Hz, for resonance_match")
    p.add_argument("--voltage", type=float, default=None)
    p.add_argument("--start", action="append", help="NAME=VALUE")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--grid", action="store_true", help="evaluate the full grid instead of optimizing")

    sub.add_parser("validate", parents=[common], help="acceptance checks vs reported measurements")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args, Output(args))
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except DeaError as exc:
        sys.stderr.write(f"computation error: {exc}\n")
        return EXIT_COMPUTE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
