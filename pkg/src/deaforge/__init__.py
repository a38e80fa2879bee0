"""Design and simulation toolkit for thin in-plane dielectric elastomer actuators."""

from .actuator import (
    DeaAssembly,
    LayerGeometry,
    TensioningMechanism,
    actuation_force_y,
    actuation_secant_stiffness,
    actuation_tangent_stiffness,
    layer_area_y,
    maxwell_force_y,
    mech_force,
    mech_stiffness,
)
from .config import DesignConfig, load_config
from .equilibrium import (
    EquilibriumState,
    VoltageCurve,
    blocking_force,
    frequency_response,
    natural_frequency,
    residual_force,
    solve_actuated_length,
    solve_free_length,
    static_displacement,
    voltage_sweep,
)
from .errors import (
    ConfigError,
    DeaError,
    DegenerateConfigurationError,
    DomainError,
    InfeasibleDesignError,
    IntegrationError,
    LockupError,
    OptimizationError,
)
from .locomotion import (
    FrictionPad,
    LocomotionResult,
    RobotBody,
    build_body,
    pad_friction,
    simulate,
    speed_vs_frequency,
    speed_vs_payload,
)
from .material import GentMaterial, StretchState, first_invariant, gent_stress_y, gent_tangent_y, stretch_from_xy
from .powertrain import (
    DriveSpec,
    EfficiencyReport,
    ElectrodeElectrical,
    FlybackParams,
    PowerTrace,
    charge_step,
    efficiency,
    input_power,
    mechanical_power,
    rc_cutoff,
    simulate_drive_cycle,
)

__version__ = "0.1.0"
