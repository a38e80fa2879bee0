"""Force models of the elastomer stack and of the compressible tensioning frame."""

import math
import warnings
from dataclasses import dataclass, field

from .errors import DegeneracyWarning, DegenerateConfigurationError, DomainError
from .material import GentMaterial, gent_stress_y, gent_tangent_y, stretch_from_xy


@dataclass(frozen=True)
class LayerGeometry:
    """Unstretched dimensions and pre-stretch of one dielectric layer (m)."""

    L_ax: float = 16e-3
    L_ay: float = 14e-3
    L_az: float = 0.05e-3
    prestretch_x: float = 2.5
    prestretch_y: float = 2.5
    n_layers: int = 4

    def __post_init__(self):
        for name in ("L_ax", "L_ay", "L_az"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be > 0")
        if not self.L_az < 0.1 * min(self.L_ax, self.L_ay):
            raise DomainError("L_az must be < 0.1 * min(L_ax, L_ay) (thin film)")
        if not (self.prestretch_x >= 1.0 and self.prestretch_y >= 1.0):
            raise DomainError("pre-stretch ratios must be >= 1")
        if not (self.n_layers >= 1 and float(self.n_layers).is_integer()):
            raise DomainError("n_layers must be a positive integer")


@dataclass(frozen=True)
class TensioningMechanism:
    """Compliant tensioning frame. ``theta`` is in radians."""

    L_ty: float = 35e-3
    E: float = 2.4e9
    t_t: float = 1e-3
    w: float = 0.3e-3
    theta: float = math.radians(77.8)
    l_link: float = 16.3e-3
    h: float = 40e-3

    def __post_init__(self):
        for name in ("L_ty", "E", "t_t", "w", "l_link", "h"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be > 0")
        # theta == pi/2 is kept as a legal degenerate (zero stiffness, warned)
        if not 0.0 < self.theta <= math.pi / 2:
            raise DomainError("theta must lie in (0, pi/2]")

    @property
    def I_t(self):
        return self.t_t * self.w ** 3 / 12.0

    @property
    def A_ty(self):
        return self.t_t * self.h


@dataclass(frozen=True)
class DeaAssembly:
    """Full actuator description: layers, frame, elastomer, oscillating mass (kg)."""

    layer: LayerGeometry = field(default_factory=LayerGeometry)
    mech: TensioningMechanism = field(default_factory=TensioningMechanism)
    mat: GentMaterial = field(default_factory=GentMaterial)
    mass: float = 1.2e-3

    def __post_init__(self):
        if not self.mass > 0.0:
            raise DomainError("mass must be > 0")


def layer_area_y(layer, lambda_y):
    """Cross-section of one layer normal to Y (m^2) with lambda_x held at pre-stretch."""
    if not lambda_y > 0.0:
        raise DomainError(f"lambda_y must be > 0, got {lambda_y!r}")
    l_ax = layer.prestretch_x * layer.L_ax
    l_az = layer.L_az / (layer.prestretch_x * lambda_y)
    return l_ax * l_az


def _state(asm, lambda_y):
    return stretch_from_xy(asm.layer.prestretch_x, lambda_y)


def actuation_force_y(asm, lambda_y):
    """Elastic pull of the whole stack along Y (N)."""
    sigma = gent_stress_y(asm.mat, _state(asm, lambda_y))
    return asm.layer.n_layers * sigma * layer_area_y(asm.layer, lambda_y)


def actuation_tangent_stiffness(asm, lambda_y):
    """dF_a/dl at fixed lambda_x (N/m)."""
    layer = asm.layer
    st = _state(asm, lambda_y)
    sigma = gent_stress_y(asm.mat, st)
    dsigma = gent_tangent_y(asm.mat, st, layer.prestretch_x)
    # F = n * sigma * L_ax * L_az / ly
    dF_dly = layer.n_layers * layer.L_ax * layer.L_az * (dsigma / lambda_y - sigma / lambda_y ** 2)
    return dF_dly / layer.L_ay


def actuation_secant_stiffness(asm, lambda_y):
    """Stack force divided by total elongation from the unstretched length (N/m)."""
    elongation = lambda_y * asm.layer.L_ay - asm.layer.L_ay
    if elongation == 0.0:
        raise DegenerateConfigurationError("zero elongation: secant stiffness undefined at lambda_y = 1")
    return actuation_force_y(asm, lambda_y) / elongation


def maxwell_force_y(asm, U, lambda_y):
    """Voltage-induced force along Y (N); quadratic in U."""
    if not U >= 0.0:
        raise DomainError(f"voltage must be >= 0, got {U!r}")
    layer = asm.layer
    lx = layer.prestretch_x
    l_ax = lx * layer.L_ax
    l_az = layer.L_az / (lx * lambda_y)
    return (layer.n_layers * asm.mat.permittivity * U ** 2 * lx ** 2 * l_ax * l_az
            / layer.L_az ** 2)


def mech_stiffness(mech):
    """Frame stiffness along Y (treated as N/m).

    Evaluated literally as 3 E I cos(theta) / (2 A l^2). The expression is
    not dimensionally a stiffness; its magnitude is taken as N/m.
    """
    if math.isclose(mech.theta, math.pi / 2, rel_tol=0.0, abs_tol=1e-12):
        warnings.warn("theta = 90 deg: frame stiffness is zero", DegeneracyWarning, stacklevel=2)
        return 0.0
    return 3.0 * mech.E * mech.I_t * math.cos(mech.theta) / (2.0 * mech.A_ty * mech.l_link ** 2)


def mech_force(mech, l_ay):
    """Frame push along Y (N); positive while compressed below L_ty."""
    if not l_ay > 0.0:
        raise DomainError(f"length must be > 0, got {l_ay!r}")
    return mech_stiffness(mech) * (mech.L_ty - l_ay)
