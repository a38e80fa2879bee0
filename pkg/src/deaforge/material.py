"""Incompressible stretch kinematics and the Gent stress of the dielectric layer.

The in-plane stress along Y follows the Gent form

    sigma_y = mu1 * (ly**2 - lz**2) / (1 - (I1 - 3) / J1)

with ``lz = 1 / (lx * ly)``. The printed variant that uses
``lx**-2 * lz**-2`` in place of ``lz**2`` equals ``ly**2`` under
incompressibility and would make the stress vanish identically, so the
thickness stretch ``lz**2 = lx**-2 * ly**-2`` is used instead.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, LockupError

VACUUM_PERMITTIVITY = 8.85e-12  # F/m, value used with eps_r throughout


@dataclass(frozen=True)
class GentMaterial:
    """Gent constants and permittivity of the elastomer.

    Attributes:
        mu1: shear-modulus-like constant (Pa). Zero is accepted and means
            "no elastomer" (bare mechanism studies).
        J1: extensibility limit on I1 - 3 (-).
        eps_r: relative permittivity (-).
    """

    mu1: float = 23000.0
    J1: float = 97.0
    eps_r: float = 3.0

    def __post_init__(self):
        if not self.mu1 >= 0.0:
            raise DomainError(f"mu1 must be >= 0, got {self.mu1!r}")
        if not self.J1 > 0.0:
            raise DomainError(f"J1 must be > 0, got {self.J1!r}")
        if not self.eps_r >= 1.0:
            raise DomainError(f"eps_r must be >= 1, got {self.eps_r!r}")

    @property
    def permittivity(self):
        """Absolute permittivity (F/m)."""
        return self.eps_r * VACUUM_PERMITTIVITY


@dataclass(frozen=True)
class StretchState:
    lambda_x: float
    lambda_y: float
    lambda_z: float

    def __post_init__(self):
        for name in ("lambda_x", "lambda_y", "lambda_z"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if abs(self.lambda_x * self.lambda_y * self.lambda_z - 1.0) > 1e-12:
            raise DomainError("stretch state violates incompressibility")


def stretch_from_xy(lambda_x, lambda_y):
    """Complete an in-plane stretch pair with the incompressible thickness stretch."""
    if not (lambda_x > 0.0 and lambda_y > 0.0):
        raise DomainError(f"stretches must be > 0, got ({lambda_x!r}, {lambda_y!r})")
    return StretchState(lambda_x, lambda_y, 1.0 / (lambda_x * lambda_y))


def first_invariant(state):
    return state.lambda_x ** 2 + state.lambda_y ** 2 + state.lambda_z ** 2


def _lz2(state):
    # lz**2 from the in-plane pair, not from the stored lz, so that the
    # neo-Hookean limit is reproduced to rounding.
    return 1.0 / (state.lambda_x ** 2 * state.lambda_y ** 2)


def _gent_denominator(mat, state):
    excess = state.lambda_x ** 2 + state.lambda_y ** 2 + _lz2(state) - 3.0
    denom = 1.0 - excess / mat.J1
    if denom <= 0.0:
        raise LockupError(state.lambda_x, state.lambda_y, state.lambda_z, excess, mat.J1)
    return denom


def gent_stress_y(mat, state):
    """Gent in-plane stress along Y (Pa, tensile positive).

    Raises:
        LockupError: if I1 - 3 >= J1.
    """
    denom = _gent_denominator(mat, state)
    return mat.mu1 * (state.lambda_y ** 2 - _lz2(state)) / denom


def gent_tangent_y(mat, state, lambda_x_fixed=None):
    """Exact d(sigma_y)/d(lambda_y) holding lambda_x fixed (Pa).

    ``lambda_x_fixed`` overrides the state's lambda_x when given; the
    thickness stretch is always re-derived from incompressibility.
    """
    lx = state.lambda_x if lambda_x_fixed is None else lambda_x_fixed
    st = stretch_from_xy(lx, state.lambda_y)
    denom = _gent_denominator(mat, st)
    ly = st.lambda_y
    lz2 = _lz2(st)
    num = ly ** 2 - lz2
    # d(lz2)/d(ly) = -2 lz2 / ly
    dnum = 2.0 * ly + 2.0 * lz2 / ly
    dexcess = 2.0 * ly - 2.0 * lz2 / ly
    ddenom = -dexcess / mat.J1
    return mat.mu1 * (dnum * denom - num * ddenom) / denom ** 2


def lockup_lambda_y(mat, lambda_x):
    """Stretch along Y at which I1 - 3 reaches J1 for a fixed lambda_x.

    Solves ``lx**2 + s + 1/(lx**2 s) = 3 + J1`` for ``s = ly**2`` and returns
    the upper (tensile) root.
    """
    a = lambda_x ** 2
    b = 3.0 + mat.J1 - a
    disc = b * b - 4.0 / a
    if disc < 0.0:
        return math.inf
    return math.sqrt((b + math.sqrt(disc)) / 2.0)
