"""Model-vs-measurement validation report and the acceptance checks it runs."""

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import studio
from .equilibrium import (
    blocking_force,
    frequency_response,
    natural_frequency,
    solve_actuated_length,
    solve_free_length,
    static_displacement,
    voltage_sweep,
)
from .errors import LockupError
from .tables import render_payload_csv, render_voltage_csv
from .locomotion import (
    PAYLOAD_GRID,
    FrictionPad,
    build_body,
    simulate,
    speed_vs_frequency,
    speed_vs_payload,
)
from .material import GentMaterial, gent_stress_y, gent_tangent_y, lockup_lambda_y, stretch_from_xy
from .powertrain import (
    PowerTrace,
    efficiency,
    input_power,
    mechanical_power,
    rc_cutoff,
    simulate_drive_cycle,
)

# Independent high-precision bisection on the default profile.
FROZEN_FREE_LENGTH = 0.033788670867564959  # m
FROZEN_DELTA_220 = 2.5378717390179331e-5  # m
FROZEN_FN = 60.066314049199312  # Hz

STRETCH_GRID = (0.5, 1.0, 1.5, 2.5)
FREQ_GRID_RATIOS = tuple(round(0.2 * k, 1) for k in range(1, 11))  # 0.2 .. 2.0


@dataclass
class Criterion:
    number: int
    title: str
    checks: list = field(default_factory=list)  # (label, passed, detail)

    def check(self, label, passed, detail=""):
        self.checks.append((label, bool(passed), detail))

    @property
    def passed(self):
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)


@dataclass
class ValidationReport:
    criteria: list
    context: list  # (label, model, measured) reported only

    @property
    def passed(self):
        return all(c.passed for c in self.criteria)

    def render(self):
        out = io.StringIO()
        for c in self.criteria:
            out.write(f"[{'PASS' if c.passed else 'FAIL'}] {c.number}. {c.title}\n")
            for label, ok, detail in c.checks:
                out.write(f"    {'ok  ' if ok else 'FAIL'} {label}" + (f": {detail}" if detail else "") + "\n")
        if self.context:
            out.write("reported only (model | measured):\n")
            for label, model, measured in self.context:
                out.write(f"    {label}: {model} | {measured}\n")
        out.write(f"overall: {'PASS' if self.passed else 'FAIL'}\n")
        return out.getvalue()


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_rc_cutoff(cfg):
    c = Criterion(1, "RC cutoff")
    fc = rc_cutoff(cfg.electrical)
    stated = cfg.measured["cutoff_hz"]
    c.check("cutoff within 0.5% of stated", _rel(fc, stated) <= 5e-3,
            f"model {fc:.4f} Hz vs stated {stated:g} Hz ({100 * _rel(fc, stated):.3f}%)")
    return c


def check_equilibrium(cfg):
    c = Criterion(2, "Equilibrium residual and frozen regression")
    asm = cfg.assembly
    U = cfg.drive.amplitude
    free = solve_free_length(asm)
    act = solve_actuated_length(asm, U)
    c.check("|residual| free state <= 1e-9 N", abs(free.residual) <= 1e-9, f"{free.residual:.3e} N")
    c.check(f"|residual| at {U:g} V <= 1e-9 N", abs(act.residual) <= 1e-9, f"{act.residual:.3e} N")
    if cfg.is_default():
        delta = act.l_dea - free.l_dea
        fn = natural_frequency(asm)
        for label, got, ref in (("free length", free.l_dea, FROZEN_FREE_LENGTH),
                                ("displacement at 220 V", delta, FROZEN_DELTA_220),
                                ("natural frequency", fn, FROZEN_FN)):
            c.check(f"{label} matches frozen value to 1e-6", _rel(got, ref) <= 1e-6,
                    f"{got:.12g} vs {ref:.12g}")
    else:
        c.check("frozen regression", True, "skipped: profile differs from the default")
    return c


def check_bands(cfg):
    c = Criterion(3, "Model vs measurement bands")
    asm, meas, U = cfg.assembly, cfg.measured, cfg.drive.amplitude
    fn = natural_frequency(asm, cfg.solver["stiffness_mode"])
    delta = static_displacement(asm, U)
    fb = blocking_force(asm, U)
    for label, model, measured, factor, unit, scale in (
        ("natural frequency", fn, meas["resonance_hz"], 2.0, "Hz", 1.0),
        ("static displacement", delta, meas["displacement_m"], 10.0, "um", 1e6),
        ("blocking force", fb, meas["blocking_force_n"], 10.0, "mN", 1e3),
    ):
        ratio = max(model / measured, measured / model) if model > 0 else math.inf
        c.check(f"{label} within x{factor:g}", ratio <= factor,
                f"model {model * scale:.4g} {unit} | measured {measured * scale:.4g} {unit} (x{ratio:.3g})")
    return c


def check_material(cfg):
    c = Criterion(4, "Material properties")
    mat = cfg.assembly.mat
    neo = replace(mat, J1=1e12)
    worst = 0.0
    for lx in STRETCH_GRID:
        for ly in STRETCH_GRID:
            st = stretch_from_xy(lx, ly)
            ref = mat.mu1 * (ly ** 2 - lx ** -2 * ly ** -2)
            worst = max(worst, abs(gent_stress_y(neo, st) - ref) / mat.mu1)
    c.check("neo-Hookean limit at J1 = 1e12 within 1e-9 (relative to mu1)", worst <= 1e-9, f"max {worst:.2e}")
    c.check("zero stress at identity", gent_stress_y(mat, stretch_from_xy(1.0, 1.0)) == 0.0)
    worst = 0.0
    for lx in STRETCH_GRID:
        for ly in STRETCH_GRID:
            h = 1e-7 * ly
            try:
                fd = (gent_stress_y(mat, stretch_from_xy(lx, ly + h))
                      - gent_stress_y(mat, stretch_from_xy(lx, ly - h))) / (2 * h)
                an = gent_tangent_y(mat, stretch_from_xy(lx, ly), lx)
            except LockupError:
                continue
            worst = max(worst, abs(an - fd) / max(abs(fd), 1e-300))
    c.check("tangent vs central difference within 1e-5", worst <= 1e-5, f"max relative {worst:.2e}")
    lx = 2.5
    ly = lockup_lambda_y(mat, lx) * (1 + 1e-6)
    try:
        gent_stress_y(mat, stretch_from_xy(lx, ly))
        raised = False
    except LockupError:
        raised = True
    c.check("lock-up error past the stretch limit", raised, f"lambda_y = {ly:.6g} at lambda_x = {lx:g}")
    return c


def ramp_trace(n, T=1.0):
    """RC-charging voltage and current over one period, ``n`` intervals."""
    tau = T / 5.0
    t = np.linspace(0.0, T, n + 1)
    return PowerTrace(t=t, u=1.0 - np.exp(-t / tau), i=np.exp(-t / tau))


def ramp_exact(T=1.0):
    tau = T / 5.0
    # (1/T) * integral (e^-x - e^-2x) dt over [0, T]
    return (tau * (1 - math.exp(-T / tau)) - 0.5 * tau * (1 - math.exp(-2 * T / tau))) / T


def check_efficiency(cfg):
    c = Criterion(5, "Efficiency pipeline")
    meas = cfg.measured
    p_dea = meas["mechanical_power_w"]
    p_target = p_dea / meas["efficiency"]
    f = cfg.drive.frequency
    U0 = cfg.drive.amplitude if cfg.drive.amplitude > 0 else 1.0
    t = np.linspace(0.0, 1.0 / f, 65)
    trace = PowerTrace(t=t, u=np.full_like(t, U0), i=np.full_like(t, p_target / U0))
    p_in = input_power(trace, f)
    eta = efficiency(p_dea, p_in).eta
    c.check("efficiency equals the stated ratio", _rel(eta, meas["efficiency"]) <= 1e-12,
            f"P_dea {p_dea * 1e3:.3g} mW / P_in {p_in * 1e3:.6g} mW = {100 * eta:.6g}%")
    n = 10 ** 4
    ts = np.linspace(0.0, 1.0, n + 1)
    sin = np.sin(2 * np.pi * ts)
    half = input_power(PowerTrace(t=ts, u=3.0 * sin, i=2.0 * sin), 1.0)
    c.check("in-phase sinusoids give U0 I0 / 2 within 1e-4", _rel(half, 3.0) <= 1e-4, f"{half:.10g} vs 3")
    exact = ramp_exact()
    e1 = abs(input_power(ramp_trace(64), 1.0) - exact)
    e2 = abs(input_power(ramp_trace(128), 1.0) - exact)
    c.check("trapezoid error ratio at n, 2n is ~4 (O(n^-2))", 3.8 <= e1 / e2 <= 4.2, f"ratio {e1 / e2:.4f}")
    return c


def check_undercharge(cfg):
    c = Criterion(6, "Powertrain undercharge")
    C = cfg.electrical.C
    fast = simulate_drive_cycle(cfg.flyback, C, cfg.drive)
    slow = simulate_drive_cycle(cfg.flyback, C, replace(cfg.drive, frequency=1.0))
    c.check(f"peak at {cfg.drive.frequency:g} Hz below quasi-static peak", fast.v_peak < slow.v_peak,
            f"{fast.v_peak:.4g} V < {slow.v_peak:.4g} V")
    return c


def _loco_kwargs(cfg):
    s = cfg.solver
    return dict(damping_ratio=s["body_damping_ratio"], n_cycles=s["n_cycles"],
                steps_per_cycle=s["steps_per_cycle"], structure_mass=cfg.structure_mass,
                g=s["gravity_mps2"])


def _body(cfg, pad=None, payload=0.0):
    kw = _loco_kwargs(cfg)
    return build_body(cfg.assembly, pad or cfg.pad, payload, kw["damping_ratio"],
                      kw["structure_mass"], kw["g"])


def resonant_drive(cfg):
    return replace(cfg.drive, frequency=natural_frequency(cfg.assembly, cfg.solver["stiffness_mode"]))


def check_locomotion(cfg):
    c = Criterion(7, "Locomotion properties")
    asm, s = cfg.assembly, cfg.solver
    n, spc = s["n_cycles"], s["steps_per_cycle"]
    drive = resonant_drive(cfg)
    fn = drive.frequency

    sym = FrictionPad(incline=cfg.pad.incline, mu_forward=cfg.pad.mu_backward,
                      mu_backward=cfg.pad.mu_backward, v_reg=cfg.pad.v_reg)
    r = simulate(_body(cfg, sym), sym, drive, asm, n, spc)
    bound = 1e-2 * r.stroke * fn
    c.check("symmetric pads: no net drift", abs(r.mean_velocity) <= bound,
            f"|v| {abs(r.mean_velocity):.2e} m/s <= {bound:.2e} m/s")

    r = simulate(_body(cfg), cfg.pad, replace(drive, amplitude=0.0), asm, n, spc)
    moved = max(np.max(np.abs(r.x_front)), np.max(np.abs(r.x_rear)))
    c.check("zero drive: no motion", moved == 0.0, f"max |x| {moved:.1e} m")

    base = simulate(_body(cfg), cfg.pad, drive, asm, n, spc)
    fine = simulate(_body(cfg), cfg.pad, drive, asm, n, 2 * spc)
    change = abs(fine.mean_velocity - base.mean_velocity) / abs(base.mean_velocity) if base.mean_velocity else math.inf
    c.check("halving the step changes speed < 2%", change < 0.02, f"{100 * change:.3f}%")
    c.check("forward speed at f_n is positive", base.mean_velocity > 0.0,
            f"{base.mean_velocity * 1e3:.4g} mm/s at {fn:.4g} Hz")

    kw = _loco_kwargs(cfg)
    table = speed_vs_payload(asm, cfg.pad, drive, PAYLOAD_GRID, workers=s["workers"], **kw)
    speeds = [v for _, v in table]
    mono = all(b <= a for a, b in zip(speeds, speeds[1:]))
    c.check("speed nonincreasing over the payload grid", mono and all(v > 0 for v in speeds),
            " ".join(f"{p * 1e3:g}g:{v * 1e3:.3g}" for p, v in table) + " mm/s")

    freqs = [fn * k for k in FREQ_GRID_RATIOS]
    fk = {k: v for k, v in zip(FREQ_GRID_RATIOS, (v for _, v in speed_vs_frequency(
        asm, cfg.pad, drive, freqs, cfg.payload, workers=s["workers"], **kw)))}
    peak = max(fk, key=fk.get)
    c.check("speed-vs-frequency peaks at the grid point nearest f_n", peak == 1.0,
            " ".join(f"{k:g}fn:{v * 1e3:.3g}" for k, v in fk.items()) + " mm/s")
    return c, base, table


def check_determinism(cfg):
    c = Criterion(8, "Determinism")
    asm = cfg.assembly
    volts = np.linspace(0.0, cfg.drive.amplitude, 12).tolist() if cfg.drive.amplitude > 0 else [0.0]
    a = render_voltage_csv(voltage_sweep(asm, volts))
    b = render_voltage_csv(voltage_sweep(asm, volts))
    p = render_voltage_csv(voltage_sweep(asm, volts, workers=4))
    c.check("voltage sweep CSV identical (repeat, threaded)", a == b == p)

    space = studio.ParamSpace({"theta": (math.radians(60), math.radians(85), 6)})
    obj = studio.Objective("static_displacement_at_U", voltage=cfg.drive.amplitude)
    outs = []
    for workers in (1, 1, 4):
        buf = io.StringIO()
        studio.write_sweep_csv(studio.grid_sweep(space, obj, asm, workers=workers), buf)
        outs.append(buf.getvalue())
    c.check("grid sweep CSV identical (repeat, threaded)", outs[0] == outs[1] == outs[2])

    drive = resonant_drive(cfg)
    kw = dict(_loco_kwargs(cfg), n_cycles=20)
    payloads = PAYLOAD_GRID[:3]
    runs = [render_payload_csv(speed_vs_payload(asm, cfg.pad, drive, payloads, workers=w, **kw))
            for w in (1, 1, 3)]
    c.check("locomotion CSV identical (repeat, threaded)", runs[0] == runs[1] == runs[2])
    return c


def run_validation(cfg):
    """Run every acceptance criterion on ``cfg`` and collect report context."""
    criteria = [check_rc_cutoff(cfg), check_equilibrium(cfg), check_bands(cfg),
                check_material(cfg), check_efficiency(cfg), check_undercharge(cfg)]
    loco, base_run, _ = check_locomotion(cfg)
    criteria.append(loco)
    criteria.append(check_determinism(cfg))
    return ValidationReport(criteria=criteria, context=_context(cfg, base_run))


def _context(cfg, base_run):
    asm, meas, s = cfg.assembly, cfg.measured, cfg.solver
    fn = natural_frequency(asm, s["stiffness_mode"])
    U = cfg.drive.amplitude
    fb = blocking_force(asm, U)
    amp = frequency_response(asm, [fn], U, s["damping_ratio"], s["stiffness_mode"])[0][1]
    p_dea = mechanical_power(fb, amp, fn)
    cycle = simulate_drive_cycle(cfg.flyback, cfg.electrical.C, replace(cfg.drive, frequency=fn))
    p_in = input_power(cycle.trace, fn)
    eta = p_dea / p_in if p_in > 0 else float("nan")

    kw = _loco_kwargs(cfg)
    body = _body(cfg, payload=cfg.payload)
    bare = simulate(body, cfg.pad, cfg.drive, asm, kw["n_cycles"], kw["steps_per_cycle"])
    v_onboard = simulate_drive_cycle(cfg.flyback, cfg.electrical.C, cfg.drive).v_peak
    untethered = simulate(body, cfg.pad, replace(cfg.drive, amplitude=v_onboard), asm,
                          kw["n_cycles"], kw["steps_per_cycle"])
    f = cfg.drive.frequency
    return [
        ("mechanical power at f_n (mW)", f"{p_dea * 1e3:.4g}", f"{meas['mechanical_power_w'] * 1e3:.4g}"),
        ("efficiency at f_n (%)", f"{100 * eta:.4g}", f"{100 * meas['efficiency']:.4g}"),
        ("bare speed at f_n (mm/s)", f"{base_run.mean_velocity * 1e3:.4g}", f"{meas['speed_mps'] * 1e3:.4g}"),
        (f"bare speed at {f:g} Hz (mm/s)", f"{bare.mean_velocity * 1e3:.4g}", f"{meas['speed_mps'] * 1e3:.4g}"),
        (f"onboard drive amplitude at {f:g} Hz (V)", f"{v_onboard:.4g}", f"{U:g}"),
        (f"untethered speed at {f:g} Hz (mm/s)", f"{untethered.mean_velocity * 1e3:.4g}",
         f"{meas['untethered_speed_mps'] * 1e3:.4g}"),
    ]
