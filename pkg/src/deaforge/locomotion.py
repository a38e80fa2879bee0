"""Two-mass stick-slip crawler driven by the actuator's Maxwell force.

The front and rear pad masses are joined by the actuator, modelled as a
spring-damper with the free-state stiffness of the stack plus frame. The
voltage-induced force pushes the masses apart while the drive is high.
Each pad resists sliding with a regularised, direction-dependent Coulomb
force, so the pair ratchets forward (+x).

Integration is semi-implicit Euler: spring, damper and actuator forces are
evaluated at the start of the step, the pad friction is taken implicitly in
the new velocity (solved per mass, the friction law is monotone), and the
positions advance with the new velocities.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .actuator import mech_stiffness, maxwell_force_y
from .equilibrium import solve_free_length, stack_stiffness
from .errors import DomainError, IntegrationError

GRAVITY = 9.81
ROBOT_MASS = 2.34e-3  # kg, whole bare robot
STRUCTURE_MASS = ROBOT_MASS - 1.2e-3  # kg, robot minus the oscillating actuator mass
PAYLOAD_GRID = (0.0, 0.25e-3, 0.5e-3, 1e-3, 1.5e-3, 1.75e-3, 2e-3, 2.5e-3, 3e-3)


@dataclass(frozen=True)
class FrictionPad:
    """Directional pad. ``incline`` in radians; coefficients are per-direction."""

    incline: float = math.radians(30.0)
    mu_forward: float = 0.15
    mu_backward: float = 1.0
    v_reg: float = 1e-4

    def __post_init__(self):
        if not 0.0 < self.mu_forward <= self.mu_backward:
            raise DomainError("need 0 < mu_forward <= mu_backward")
        if not self.v_reg > 0.0:
            raise DomainError("v_reg must be > 0")
        if not 0.0 < self.incline < math.pi / 2:
            raise DomainError("incline must lie in (0, pi/2)")


@dataclass(frozen=True)
class RobotBody:
    m_front: float
    m_rear: float
    k: float
    c: float
    payload: float = 0.0
    g: float = GRAVITY

    def __post_init__(self):
        if not (self.m_front > 0.0 and self.m_rear > 0.0):
            raise DomainError("masses must be > 0")
        if not self.k > 0.0:
            raise DomainError("k must be > 0")
        if not (self.c >= 0.0 and self.payload >= 0.0 and self.g >= 0.0):
            raise DomainError("c, payload and g must be >= 0")

    @property
    def rear_total(self):
        return self.m_rear + self.payload


@dataclass(frozen=True)
class LocomotionResult:
    t: np.ndarray
    x_front: np.ndarray
    x_rear: np.ndarray
    v_front: np.ndarray
    v_rear: np.ndarray
    mean_velocity: float
    cycles: int
    stroke: float

    def rows(self):
        return zip(self.t, self.x_front, self.x_rear, self.v_front, self.v_rear)


TRAJECTORY_HEADER = ("t_s", "x_front_m", "x_rear_m", "v_front_mps", "v_rear_mps")


def pad_friction(pad, v, normal_load):
    """Regularised anisotropic Coulomb force opposing velocity ``v`` (N)."""
    if not normal_load >= 0.0:
        raise DomainError("normal load must be >= 0")
    mu = pad.mu_forward if v > 0.0 else pad.mu_backward
    return -mu * normal_load * math.tanh(v / pad.v_reg)


def _friction_slope(pad, v, normal_load):
    mu = pad.mu_forward if v > 0.0 else pad.mu_backward
    x = abs(v) / pad.v_reg
    if x > 300.0:
        return 0.0
    ch = math.cosh(x)
    return -mu * normal_load / (pad.v_reg * ch * ch)


def build_body(asm, pad, payload=0.0, damping_ratio=0.1, structure_mass=STRUCTURE_MASS, g=GRAVITY):
    """Lumped two-mass body for ``asm`` with ``payload`` (kg) carried at the rear.

    Actuator plus structure mass is split evenly between the two pads. The
    coupling is the free-state secant stack stiffness plus the frame
    stiffness, damped at ``damping_ratio`` of critical for the reduced mass.
    """
    if not payload >= 0.0:
        raise DomainError("payload must be >= 0")
    if not damping_ratio >= 0.0:
        raise DomainError("damping_ratio must be >= 0")
    if not structure_mass >= 0.0:
        raise DomainError("structure_mass must be >= 0")
    half = (asm.mass + structure_mass) / 2.0
    k = stack_stiffness(asm, "secant") + mech_stiffness(asm.mech)
    reduced = half * half / (2.0 * half)
    c = 2.0 * damping_ratio * math.sqrt(k * reduced)
    return RobotBody(m_front=half, m_rear=half, k=k, c=c, payload=payload, g=g)


def _implicit_velocity(m, v, impulse, pad, normal, dt):
    """Solve m (w - v) = impulse + dt * friction(w) for w."""
    if normal == 0.0:
        return v + impulse / m
    target = m * v + impulse

    def g(w):
        return m * w - dt * pad_friction(pad, w, normal) - target

    # g is strictly increasing; Newton from the explicit guess, guarded by a bracket
    cap = dt * pad.mu_backward * normal
    lo, hi = (target - cap) / m, (target + cap) / m
    w = min(max(v, lo), hi)
    for _ in range(50):
        gw = g(w)
        if gw == 0.0:
            return w
        if gw > 0.0:
            hi = w
        else:
            lo = w
        dg = m - dt * _friction_slope(pad, w, normal)
        w_new = w - gw / dg
        if not lo < w_new < hi:
            w_new = 0.5 * (lo + hi)
        if abs(w_new - w) <= 1e-15 + 1e-12 * abs(w_new):
            return w_new
        w = w_new
    return w


def simulate(body, pad, drive, asm, n_cycles=60, steps_per_cycle=400):
    """Integrate the crawler for ``n_cycles`` drive periods.

    The actuator force is the Maxwell force at the free-state stretch under
    the instantaneous drive voltage, applied equal and opposite to the two
    masses. Mean velocity is that of the pad midpoint over the last half of
    the cycles.

    Raises:
        IntegrationError: if mechanical energy exceeds ten times the work
            the actuator has put in (step too large).
    """
    if steps_per_cycle < 200:
        raise DomainError("steps_per_cycle must be >= 200")
    if n_cycles < 20:
        raise DomainError("n_cycles must be >= 20")

    lam = solve_free_length(asm).lambda_y
    f_high = maxwell_force_y(asm, drive.amplitude, lam)
    n_high = int(round(drive.duty * steps_per_cycle))
    dt = drive.period / steps_per_cycle
    mf, mr = body.m_front, body.rear_total
    k, c = body.k, body.c
    nf, nr = mf * body.g, mr * body.g

    total = n_cycles * steps_per_cycle
    xf = np.zeros(total + 1)
    xr = np.zeros(total + 1)
    vf_out = np.zeros(total + 1)
    vr_out = np.zeros(total + 1)
    x_f = x_r = v_f = v_r = 0.0
    work = 0.0
    step = 0
    for cyc in range(n_cycles):
        for j in range(steps_per_cycle):
            fa = f_high if j < n_high else 0.0
            stretch = x_f - x_r
            f_int = -k * stretch - c * (v_f - v_r) + fa
            v_f = _implicit_velocity(mf, v_f, dt * f_int, pad, nf, dt)
            v_r = _implicit_velocity(mr, v_r, -dt * f_int, pad, nr, dt)
            x_f += dt * v_f
            x_r += dt * v_r
            work += abs(fa * ((x_f - x_r) - stretch))
            step += 1
            xf[step], xr[step], vf_out[step], vr_out[step] = x_f, x_r, v_f, v_r
        energy = 0.5 * mf * v_f ** 2 + 0.5 * mr * v_r ** 2 + 0.5 * k * (x_f - x_r) ** 2
        if energy > 10.0 * work + 1e-30:
            raise IntegrationError(
                f"energy {energy:.3g} J exceeds 10x actuator work {work:.3g} J after "
                f"{cyc + 1} cycles; reduce the step (steps_per_cycle = {steps_per_cycle})"
            )

    t = np.arange(total + 1) * dt
    half = (n_cycles // 2) * steps_per_cycle
    mid = 0.5 * (xf + xr)
    mean_v = (mid[-1] - mid[half]) / (t[-1] - t[half])
    rel = (xf - xr)[half:]
    return LocomotionResult(
        t=t, x_front=xf, x_rear=xr, v_front=vf_out, v_rear=vr_out,
        mean_velocity=float(mean_v), cycles=n_cycles, stroke=float(rel.max() - rel.min()),
    )


def _run_all(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def speed_vs_payload(asm, pad, drive, payloads, damping_ratio=0.1, n_cycles=60,
                     steps_per_cycle=400, structure_mass=STRUCTURE_MASS, g=GRAVITY, workers=1):
    """Steady speed for each payload (kg); list of (payload, m/s)."""
    payloads = [float(p) for p in payloads]
    if any(p < 0.0 for p in payloads):
        raise DomainError("payloads must be >= 0")
    if any(b < a for a, b in zip(payloads, payloads[1:])):
        raise DomainError("payloads must be increasing")

    def run(p):
        body = build_body(asm, pad, p, damping_ratio, structure_mass, g)
        return simulate(body, pad, drive, asm, n_cycles, steps_per_cycle).mean_velocity

    return list(zip(payloads, _run_all(run, payloads, workers)))


def speed_vs_frequency(asm, pad, drive, freqs, payload=0.0, damping_ratio=0.1, n_cycles=60,
                       steps_per_cycle=400, structure_mass=STRUCTURE_MASS, g=GRAVITY, workers=1):
    """Steady speed for each drive frequency (Hz); list of (Hz, m/s)."""
    freqs = [float(f) for f in freqs]
    if any(f <= 0.0 for f in freqs):
        raise DomainError("frequencies must be > 0")
    body = build_body(asm, pad, payload, damping_ratio, structure_mass, g)

    def run(f):
        return simulate(body, pad, replace(drive, frequency=f), asm, n_cycles,
                        steps_per_cycle).mean_velocity

    return list(zip(freqs, _run_all(run, freqs, workers)))


def write_trajectory_csv(result, fh):
    fh.write(",".join(TRAJECTORY_HEADER) + "\n")
    for row in result.rows():
        fh.write(",".join(f"{float(x):.9g}" for x in row) + "\n")
