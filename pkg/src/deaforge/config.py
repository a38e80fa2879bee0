"""Design config files: TOML (or JSON) sections mapped onto the model types.

Keys carry their unit in the name (``L_az_m``, ``theta_deg``). Missing keys
fall back to the bundled default profile; unknown keys are rejected. Every
entry is checked before any object is built, and failures name the key.
"""

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import tomli

from .actuator import DeaAssembly, LayerGeometry, TensioningMechanism
from .equilibrium import STIFFNESS_MODES
from .errors import ConfigError, DomainError
from .locomotion import FrictionPad
from .material import GentMaterial
from .powertrain import DriveSpec, ElectrodeElectrical, FlybackParams

_pos = ("> 0", lambda v: v > 0)
_nonneg = (">= 0", lambda v: v >= 0)
_any = ("a number", lambda v: True)

# section -> key -> (type, (description, predicate))
SCHEMA = {
    "material": {
        "mu1_pa": (float, _pos),
        "J1": (float, _pos),
        "eps_r": (float, (">= 1", lambda v: v >= 1)),
    },
    "layer": {
        "L_ax_m": (float, _pos),
        "L_ay_m": (float, _pos),
        "L_az_m": (float, _pos),
        "prestretch_x": (float, (">= 1", lambda v: v >= 1)),
        "prestretch_y": (float, (">= 1", lambda v: v >= 1)),
        "n_layers": (int, (">= 1", lambda v: v >= 1)),
    },
    "mechanism": {
        "L_ty_m": (float, _pos),
        "E_pa": (float, _pos),
        "t_t_m": (float, _pos),
        "w_m": (float, _pos),
        "theta_deg": (float, ("in (0, 90]", lambda v: 0 < v <= 90)),
        "l_link_m": (float, _pos),
        "h_m": (float, _pos),
    },
    "assembly": {
        "mass_kg": (float, _pos),
        "structure_mass_kg": (float, _nonneg),
        "payload_kg": (float, _nonneg),
    },
    "electrical": {
        "R_ohm": (float, _pos),
        "C_f": (float, _pos),
    },
    "flyback": {
        "v_batt_v": (float, _pos),
        "energy_per_pulse_j": (float, _nonneg),
        "f_pwm_hz": (float, _pos),
        "v_max_v": (float, _pos),
        "r_discharge_ohm": (float, _pos),
        "eta_xfer": (float, ("in (0, 1]", lambda v: 0 < v <= 1)),
    },
    "drive": {
        "waveform": (str, ("'square'", lambda v: v == "square")),
        "amplitude_v": (float, _nonneg),
        "frequency_hz": (float, _pos),
        "duty": (float, ("in (0, 1)", lambda v: 0 < v < 1)),
    },
    "pads": {
        "incline_deg": (float, ("in (0, 90)", lambda v: 0 < v < 90)),
        "mu_forward": (float, _pos),
        "mu_backward": (float, _pos),
        "v_reg_mps": (float, _pos),
    },
    "solver": {
        "force_tol_n": (float, _pos),
        "max_iter": (int, (">= 1", lambda v: v >= 1)),
        "stiffness_mode": (str, (f"one of {STIFFNESS_MODES}", lambda v: v in STIFFNESS_MODES)),
        "damping_ratio": (float, _pos),
        "body_damping_ratio": (float, _nonneg),
        "n_cycles": (int, (">= 20", lambda v: v >= 20)),
        "steps_per_cycle": (int, (">= 200", lambda v: v >= 200)),
        "gravity_mps2": (float, _nonneg),
        "workers": (int, (">= 1", lambda v: v >= 1)),
    },
    "measured": {
        "displacement_m": (float, _pos),
        "blocking_force_n": (float, _pos),
        "resonance_hz": (float, _pos),
        "cutoff_hz": (float, _pos),
        "mechanical_power_w": (float, _pos),
        "efficiency": (float, _pos),
        "speed_mps": (float, _pos),
        "untethered_speed_mps": (float, _pos),
    },
}


def default_profile():
    """The bundled default profile as a nested dict (boundary units)."""
    text = resources.files("deaforge").joinpath("data/default.toml").read_text(encoding="utf-8")
    return tomli.loads(text)


@dataclass(frozen=True)
class DesignConfig:
    raw: dict  # resolved values in boundary units
    assembly: DeaAssembly
    electrical: ElectrodeElectrical
    flyback: FlybackParams
    drive: DriveSpec
    pad: FrictionPad

    @property
    def solver(self):
        return self.raw["solver"]

    @property
    def measured(self):
        return self.raw["measured"]

    @property
    def payload(self):
        return self.raw["assembly"]["payload_kg"]

    @property
    def structure_mass(self):
        return self.raw["assembly"]["structure_mass_kg"]

    def is_default(self):
        return self.raw == _coerce_all(default_profile())

    def to_dict(self):
        return copy.deepcopy(self.raw)


def _coerce(section, key, value):
    kind, (desc, check) = SCHEMA[section][key]
    path = f"{section}.{key}"
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
    else:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        if kind is int:
            if float(value) != int(value):
                raise ConfigError(path, f"expected an integer, got {value!r}")
            value = int(value)
        else:
            value = float(value)
            if not math.isfinite(value):
                raise ConfigError(path, f"must be finite, got {value!r}")
    if not check(value):
        raise ConfigError(path, f"must be {desc}, got {value!r}")
    return value


def _coerce_all(tree):
    return {sec: {k: _coerce(sec, k, v) for k, v in keys.items()} for sec, keys in tree.items()}


def merge(base, overrides):
    """Overlay ``overrides`` on ``base``, rejecting unknown sections and keys."""
    out = copy.deepcopy(base)
    for section, keys in overrides.items():
        if section not in SCHEMA:
            raise ConfigError(section, "unknown section")
        if not isinstance(keys, dict):
            raise ConfigError(section, "section must be a table")
        for key, value in keys.items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")
            out[section][key] = value
    return out


def _build(raw):
    def build(section, fn):
        try:
            return fn(raw[section])
        except DomainError as exc:
            raise ConfigError(section, str(exc)) from exc

    mat = build("material", lambda s: GentMaterial(mu1=s["mu1_pa"], J1=s["J1"], eps_r=s["eps_r"]))
    layer = build("layer", lambda s: LayerGeometry(
        L_ax=s["L_ax_m"], L_ay=s["L_ay_m"], L_az=s["L_az_m"],
        prestretch_x=s["prestretch_x"], prestretch_y=s["prestretch_y"], n_layers=s["n_layers"]))
    mech = build("mechanism", lambda s: TensioningMechanism(
        L_ty=s["L_ty_m"], E=s["E_pa"], t_t=s["t_t_m"], w=s["w_m"],
        theta=math.radians(s["theta_deg"]), l_link=s["l_link_m"], h=s["h_m"]))
    asm = build("assembly", lambda s: DeaAssembly(layer=layer, mech=mech, mat=mat, mass=s["mass_kg"]))
    if not layer.prestretch_y * layer.L_ay >= layer.L_ay:
        raise ConfigError("layer.prestretch_y", "pre-stretched length below unstretched length")
    electrical = build("electrical", lambda s: ElectrodeElectrical(R=s["R_ohm"], C=s["C_f"]))
    flyback = build("flyback", lambda s: FlybackParams(
        v_batt=s["v_batt_v"], energy_per_pulse=s["energy_per_pulse_j"], f_pwm=s["f_pwm_hz"],
        v_max=s["v_max_v"], r_discharge=s["r_discharge_ohm"], eta_xfer=s["eta_xfer"]))
    drive = build("drive", lambda s: DriveSpec(
        amplitude=s["amplitude_v"], frequency=s["frequency_hz"], duty=s["duty"], waveform=s["waveform"]))
    if raw["pads"]["mu_backward"] < raw["pads"]["mu_forward"]:
        raise ConfigError("pads.mu_backward", "must be >= pads.mu_forward")
    pad = build("pads", lambda s: FrictionPad(
        incline=math.radians(s["incline_deg"]), mu_forward=s["mu_forward"],
        mu_backward=s["mu_backward"], v_reg=s["v_reg_mps"]))
    return DesignConfig(raw=raw, assembly=asm, electrical=electrical, flyback=flyback,
                        drive=drive, pad=pad)


def from_dict(overrides=None):
    """Build a config from a nested dict of overrides on the default profile."""
    raw = merge(default_profile(), overrides or {})
    return _build(_coerce_all(raw))


def load_config(path=None, overrides=None):
    """Load a ``.toml`` or ``.json`` design file (``None`` = defaults).

    A JSON file may be a bare section mapping or any object carrying one
    under a ``"config"`` key, as emitted by ``deaforge model --json``.
    """
    tree = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(str(path), f"cannot read config: {exc}") from exc
        try:
            if path.suffix.lower() == ".json":
                tree = json.loads(text)
                if "config" in tree and isinstance(tree["config"], dict):
                    tree = tree["config"]
            else:
                tree = tomli.loads(text)
        except (ValueError, tomli.TOMLDecodeError) as exc:
            raise ConfigError(str(path), f"parse error: {exc}") from exc
        if not isinstance(tree, dict):
            raise ConfigError(str(path), "top level must be a table")
    tree = merge(merge(default_profile(), {}), tree)
    if overrides:
        tree = merge(tree, overrides)
    return _build(_coerce_all(tree))
