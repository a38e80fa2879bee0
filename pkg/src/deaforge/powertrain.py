"""Electrical side of the actuator: RC cutoff, flyback charge/discharge, efficiency."""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

SAMPLES_PER_PERIOD = 256


@dataclass(frozen=True)
class ElectrodeElectrical:
    R: float = 0.41e6
    C: float = 1.69e-9

    def __post_init__(self):
        if not (self.R > 0.0 and self.C > 0.0):
            raise DomainError("R and C must be > 0")


@dataclass(frozen=True)
class FlybackParams:
    """Energy-packet abstraction of the flyback converter.

    Each PWM cycle moves ``eta_xfer * energy_per_pulse`` joules onto the load.
    The defaults deliver about 23 uJ per 86 Hz half-period into 1.69 nF,
    well short of the 41 uJ needed for 220 V.
    """

    v_batt: float = 3.7
    energy_per_pulse: float = 0.25e-6
    f_pwm: float = 20e3
    v_max: float = 250.0
    r_discharge: float = 1.0e6
    eta_xfer: float = 0.8

    def __post_init__(self):
        for name in ("v_batt", "f_pwm", "v_max", "r_discharge"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be > 0")
        if not self.energy_per_pulse >= 0.0:
            raise DomainError("energy_per_pulse must be >= 0")
        if not 0.0 < self.eta_xfer <= 1.0:
            raise DomainError("eta_xfer must lie in (0, 1]")


@dataclass(frozen=True)
class DriveSpec:
    """Unipolar square drive: ``amplitude`` for ``duty`` of each period, else 0 V."""

    amplitude: float = 220.0
    frequency: float = 86.0
    duty: float = 0.5
    waveform: str = "square"

    def __post_init__(self):
        if self.waveform != "square":
            raise DomainError(f"unsupported waveform {self.waveform!r}")
        if not self.amplitude >= 0.0:
            raise DomainError("amplitude must be >= 0")
        if not self.frequency > 0.0:
            raise DomainError("frequency must be > 0")
        if not 0.0 < self.duty < 1.0:
            raise DomainError("duty must lie in (0, 1)")

    @property
    def period(self):
        return 1.0 / self.frequency

    def voltage(self, t):
        phase = (t * self.frequency) % 1.0
        return self.amplitude if phase < self.duty else 0.0


@dataclass(frozen=True)
class PowerTrace:
    """Uniformly sampled (t, U, I) over an integer number of drive periods.

    Sample times include both endpoints, so ``n`` samples span ``n - 1`` intervals.
    """

    t: np.ndarray
    u: np.ndarray
    i: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if not (len(t) == len(self.u) == len(self.i)):
            raise DomainError("t, u, i must have equal length")
        if len(t) < 2 or np.any(np.diff(t) <= 0.0):
            raise DomainError("time must be strictly increasing with at least two samples")

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class DriveCycleSummary:
    v_peak: float
    v_trough: float
    pulses_per_charge: int
    cycles: int
    converged: bool
    trace: PowerTrace


@dataclass(frozen=True)
class EfficiencyReport:
    p_dea: float
    p_in: float
    eta: float


def rc_cutoff(e):
    """Electrode-limited cutoff 1 / (2 pi R C) (Hz)."""
    return 1.0 / (2.0 * math.pi * e.R * e.C)


def charge_step(v, p, c_load, ceiling=None):
    """Load voltage after one PWM energy packet, clipped at the converter ceiling."""
    if not v >= 0.0:
        raise DomainError(f"voltage must be >= 0, got {v!r}")
    cap = p.v_max if ceiling is None else min(p.v_max, ceiling)
    if v >= cap:
        return v
    return min(cap, math.sqrt(v * v + 2.0 * p.eta_xfer * p.energy_per_pulse / c_load))


def pulses_to_reach(target, p, c_load, v0=0.0):
    """Closed-form packet count to lift the load from ``v0`` to ``target``."""
    if p.energy_per_pulse == 0.0:
        return math.inf
    need = 0.5 * c_load * (target ** 2 - v0 ** 2)
    return max(0, math.ceil(need / (p.eta_xfer * p.energy_per_pulse) - 1e-12))


def _charge_phase(v, n_pulses, p, c_load, ceiling):
    out = [v]
    for k in range(n_pulses):
        v_next = charge_step(v, p, c_load, ceiling)
        if v_next == v:
            # pinned at the ceiling (or zero packet): nothing changes any more
            out.extend([v] * (n_pulses - k))
            break
        v = v_next
        out.append(v)
    return out


def simulate_drive_cycle(p, c_load, drive, v0=0.0, rtol=1e-3, max_cycles=10000,
                         samples_per_period=None):
    """Periodic steady state of alternating charge (PWM packets) and RC discharge.

    The charge phase lasts ``duty * T`` and fires ``floor(duty * T * f_pwm)``
    packets, stopping at ``min(v_max, amplitude)``. The discharge phase decays
    through ``r_discharge``. Cycles repeat until the end-of-charge peak changes
    by less than ``rtol`` between consecutive cycles.

    The returned trace samples the last cycle; its current is the converter
    output current ``C dU/dt`` during charge and zero during discharge (the
    discharge path bypasses the converter).

    Raises:
        ConfigError: if ``f_pwm < 10 * drive.frequency``.
    """
    if p.f_pwm < 10.0 * drive.frequency:
        raise ConfigError(
            "flyback.f_pwm_hz",
            f"PWM frequency {p.f_pwm:g} Hz is below 10x the drive frequency {drive.frequency:g} Hz",
        )
    if not c_load > 0.0:
        raise DomainError("c_load must be > 0")
    T = drive.period
    t_charge = drive.duty * T
    t_dis = T - t_charge
    n_pulses = int(math.floor(t_charge * p.f_pwm + 1e-9))
    ceiling = min(p.v_max, drive.amplitude)
    decay = math.exp(-t_dis / (p.r_discharge * c_load))

    v = float(v0)
    prev_peak = None
    converged = False
    cycles = 0
    for cycles in range(1, max_cycles + 1):
        v_start = v
        v_peak = _charge_phase(v, n_pulses, p, c_load, ceiling)[-1]
        v = v_peak * decay
        if prev_peak is not None:
            scale = max(abs(v_peak), abs(prev_peak))
            if scale == 0.0 or abs(v_peak - prev_peak) <= rtol * scale:
                converged = True
                break
        prev_peak = v_peak

    if samples_per_period is None:
        # resolve individual PWM packets in the sampled current
        samples_per_period = max(SAMPLES_PER_PERIOD, int(math.ceil(4.0 * p.f_pwm / drive.frequency)))
    trace = _cycle_trace(v_start, n_pulses, p, c_load, ceiling, drive, samples_per_period)
    return DriveCycleSummary(
        v_peak=v_peak, v_trough=v, pulses_per_charge=n_pulses, cycles=cycles,
        converged=converged, trace=trace,
    )


def _cycle_trace(v_start, n_pulses, p, c_load, ceiling, drive, n):
    T = drive.period
    t_charge = drive.duty * T
    tau = p.r_discharge * c_load
    levels = np.array(_charge_phase(v_start, n_pulses, p, c_load, ceiling))
    t_levels = np.arange(n_pulses + 1) / p.f_pwm
    v_peak = levels[-1]
    t_last = t_levels[-1]

    t = np.linspace(0.0, T, n + 1)
    u = np.empty_like(t)
    i = np.zeros_like(t)
    charging = t < t_charge
    tc = t[charging]
    u[charging] = np.interp(tc, t_levels, levels)
    if n_pulses > 0:
        k = np.minimum((tc * p.f_pwm).astype(int), n_pulses - 1)
        i[charging] = c_load * (levels[k + 1] - levels[k]) * p.f_pwm
        i[charging & (t >= t_last)] = 0.0
    td = t[~charging] - t_charge
    u[~charging] = v_peak * np.exp(-td / tau)
    return PowerTrace(t=t, u=u, i=i)


def mechanical_power(f_block, delta, f):
    """Linearised output power 0.5 * F_B * delta * f (W)."""
    if not (f_block >= 0.0 and delta >= 0.0 and f >= 0.0):
        raise DomainError("force, displacement and frequency must be >= 0")
    return 0.5 * f_block * delta * f


def input_power(trace, f, rtol=1e-6):
    """Mean electrical power f * integral(U I dt) per period, trapezoidal rule.

    Averages over all periods the trace covers.

    Raises:
        DomainError: if the trace does not span an integer number of periods.
    """
    t = np.asarray(trace.t, dtype=float)
    span = (t[-1] - t[0]) * f
    periods = round(span)
    if periods < 1 or abs(span - periods) > rtol * max(1.0, span):
        raise DomainError(f"trace spans {span:.9g} periods, not an integer number")
    ui = np.asarray(trace.u, dtype=float) * np.asarray(trace.i, dtype=float)
    energy = float(np.sum(0.5 * (ui[1:] + ui[:-1]) * np.diff(t)))
    return energy * f / periods


def efficiency(p_dea, p_in):
    if not p_in > 0.0:
        raise DomainError(f"input power must be > 0, got {p_in!r}")
    if not p_dea >= 0.0:
        raise DomainError(f"mechanical power must be >= 0, got {p_dea!r}")
    return EfficiencyReport(p_dea=p_dea, p_in=p_in, eta=p_dea / p_in)


def attainable_amplitude(p, c_load, drive):
    """Steady-state peak the onboard converter reaches for ``drive``."""
    return simulate_drive_cycle(p, c_load, drive).v_peak


TRACE_HEADER = ("t_s", "u_v", "i_a")


def write_trace_csv(trace, fh):
    fh.write(",".join(TRACE_HEADER) + "\n")
    for row in zip(trace.t, trace.u, trace.i):
        fh.write(",".join(f"{float(x):.9g}" for x in row) + "\n")


def read_trace_csv(fh):
    reader = csv.reader(fh)
    header = next(reader)
    if tuple(h.strip() for h in header) != TRACE_HEADER:
        raise DomainError(f"unexpected trace header {header!r}")
    rows = np.array([[float(x) for x in row] for row in reader if row], dtype=float)
    if rows.size == 0:
        raise DomainError("trace file has no samples")
    return PowerTrace(t=rows[:, 0], u=rows[:, 1], i=rows[:, 2])


def trace_to_csv(trace):
    buf = io.StringIO(newline="")
    write_trace_csv(trace, buf)
    return buf.getvalue()
