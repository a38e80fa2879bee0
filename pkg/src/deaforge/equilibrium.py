"""Force balance of the tensioned stack: free length, actuated length, resonance."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .actuator import (
    actuation_force_y,
    actuation_secant_stiffness,
    actuation_tangent_stiffness,
    maxwell_force_y,
    mech_force,
    mech_stiffness,
)
from .errors import DomainError, InfeasibleDesignError, LockupError
from .material import lockup_lambda_y
from .roots import bisect_secant

FORCE_TOL = 1e-9  # N
MAX_ITER = 200
STIFFNESS_MODES = ("secant", "tangent")


@dataclass(frozen=True)
class EquilibriumState:
    l_dea: float
    lambda_y: float
    residual: float
    voltage: float = 0.0


@dataclass(frozen=True)
class VoltageCurve:
    voltages: tuple = ()
    displacements: tuple = ()
    blocking_forces: tuple = ()

    def __len__(self):
        return len(self.voltages)

    def rows(self):
        return list(zip(self.voltages, self.displacements, self.blocking_forces))


def residual_force(asm, l, U=0.0):
    """Net force F_frame + F_maxwell - F_stack at length ``l`` (N); zero at equilibrium."""
    if not l > asm.layer.L_ay:
        raise DomainError(f"length {l!r} must exceed the unstretched layer length {asm.layer.L_ay!r}")
    lambda_y = l / asm.layer.L_ay
    return mech_force(asm.mech, l) + maxwell_force_y(asm, U, lambda_y) - actuation_force_y(asm, lambda_y)


def _bracket(asm):
    lo = asm.layer.L_ay * (1.0 + 1e-6)
    hi = 1.5 * asm.mech.L_ty
    ly_lock = lockup_lambda_y(asm.mat, asm.layer.prestretch_x)
    hi_lock = asm.layer.L_ay * ly_lock * (1.0 - 1e-9)
    return lo, min(hi, hi_lock)


def _solve(asm, U, ftol, max_iter):
    lo, hi = _bracket(asm)
    if not hi > lo:
        raise InfeasibleDesignError(
            "pre-stretch alone exceeds the stretch limit: no admissible length bracket"
        )

    def f(l):
        return residual_force(asm, l, U)

    try:
        f_lo, f_hi = f(lo), f(hi)
    except LockupError as exc:
        raise InfeasibleDesignError(f"bracket endpoint locked up: {exc}") from exc
    if not (f_lo > 0.0 > f_hi or f_lo == 0.0 or f_hi == 0.0):
        raise InfeasibleDesignError(
            f"no sign change in residual on [{lo:.9g}, {hi:.9g}] m at U = {U:g} V: "
            f"residual(lo) = {f_lo:.6g} N, residual(hi) = {f_hi:.6g} N"
        )
    l, r, _ = bisect_secant(f, lo, hi, ftol=ftol, max_iter=max_iter, fa=f_lo, fb=f_hi)
    return EquilibriumState(l_dea=l, lambda_y=l / asm.layer.L_ay, residual=r, voltage=float(U))


@lru_cache(maxsize=4096)
def _solve_cached(asm, U, ftol, max_iter):
    return _solve(asm, U, ftol, max_iter)


def solve_free_length(asm, ftol=FORCE_TOL, max_iter=MAX_ITER):
    """Un-actuated length where the frame push balances the stack pull.

    Raises:
        InfeasibleDesignError: when the bracket shows no sign change.
    """
    return _solve_cached(asm, 0.0, ftol, max_iter)


def solve_actuated_length(asm, U, ftol=FORCE_TOL, max_iter=MAX_ITER):
    if not U >= 0.0:
        raise DomainError(f"voltage must be >= 0, got {U!r}")
    return _solve_cached(asm, float(U), ftol, max_iter)


def static_displacement(asm, U, ftol=FORCE_TOL):
    """l(U) - l(0) (m)."""
    return solve_actuated_length(asm, U, ftol).l_dea - solve_free_length(asm, ftol).l_dea


def blocking_force(asm, U):
    """Maxwell force with the output clamped at the free length (N)."""
    free = solve_free_length(asm)
    return maxwell_force_y(asm, U, free.lambda_y)


def voltage_sweep(asm, voltages, workers=1):
    """Displacement and blocking force at each voltage.

    ``workers > 1`` evaluates points on a thread pool; results keep input order.
    """
    voltages = [float(u) for u in voltages]
    if any(u < 0.0 for u in voltages):
        raise DomainError("voltages must be non-negative")
    if any(b <= a for a, b in zip(voltages, voltages[1:])):
        raise DomainError("voltages must be strictly increasing")
    if not voltages:
        return VoltageCurve()

    def point(u):
        try:
            return static_displacement(asm, u), blocking_force(asm, u)
        except InfeasibleDesignError as exc:
            raise InfeasibleDesignError(f"voltage sweep failed at U = {u:g} V: {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(point, voltages))
    else:
        out = [point(u) for u in voltages]
    return VoltageCurve(
        voltages=tuple(voltages),
        displacements=tuple(d for d, _ in out),
        blocking_forces=tuple(f for _, f in out),
    )


def stack_stiffness(asm, mode="secant"):
    """Stack stiffness at the free state (N/m): secant or local tangent."""
    free = solve_free_length(asm)
    if mode == "secant":
        return actuation_secant_stiffness(asm, free.lambda_y)
    if mode == "tangent":
        return actuation_tangent_stiffness(asm, free.lambda_y)
    raise DomainError(f"stiffness_mode must be one of {STIFFNESS_MODES}, got {mode!r}")


def natural_frequency(asm, stiffness_mode="secant"):
    """First-mode estimate (1/2pi) sqrt((k_stack + k_frame) / m) in Hz."""
    k = stack_stiffness(asm, stiffness_mode) + mech_stiffness(asm.mech)
    if k < 0.0:
        raise DomainError(f"negative total stiffness {k:.6g} N/m")
    return math.sqrt(k / asm.mass) / (2.0 * math.pi)


def frequency_response(asm, freqs, U, damping_ratio=0.2, stiffness_mode="secant"):
    """Single-mode amplitude curve scaled from the static displacement at ``U``.

    Returns a list of (frequency Hz, amplitude m).
    """
    if not damping_ratio > 0.0:
        raise DomainError(f"damping_ratio must be > 0, got {damping_ratio!r}")
    freqs = [float(f) for f in freqs]
    if not freqs:
        return []
    delta = static_displacement(asm, U)
    fn = natural_frequency(asm, stiffness_mode)
    return [(f, response_amplitude(delta, f / fn, damping_ratio)) for f in freqs]


def response_amplitude(delta_static, r, zeta):
    return delta_static / math.sqrt((1.0 - r * r) ** 2 + (2.0 * zeta * r) ** 2)
