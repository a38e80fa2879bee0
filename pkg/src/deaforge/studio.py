"""Design-space sweeps and bounded Nelder-Mead search over assembly parameters."""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .actuator import DeaAssembly, LayerGeometry, TensioningMechanism
from .equilibrium import natural_frequency, static_displacement
from .errors import DeaError, DomainError, OptimizationError
from .locomotion import FrictionPad, build_body, simulate
from .material import GentMaterial
from .powertrain import DriveSpec

GRID_CAP = 10 ** 6

# parameter name -> owning group; names are unique across the groups
_GROUPS = {
    "layer": LayerGeometry,
    "mech": TensioningMechanism,
    "mat": GentMaterial,
    "pad": FrictionPad,
    "drive": DriveSpec,
}
PARAMETERS = {"mass": "assembly"}
for _group, _cls in _GROUPS.items():
    for _f in fields(_cls):
        if _f.type in (float, int, "float", "int"):
            PARAMETERS[_f.name] = _group


@dataclass(frozen=True)
class ParamSpace:
    """Named axes. Each axis is ``(min, max, n)`` or an explicit value list."""

    axes: dict

    def __post_init__(self):
        if not self.axes:
            raise DomainError("parameter space has no axes")
        for name, axis in self.axes.items():
            if name not in PARAMETERS:
                raise DomainError(f"unknown parameter {name!r}; allowed: {sorted(PARAMETERS)}")
            if isinstance(axis, tuple) and len(axis) == 3:
                lo, hi, n = axis
                if not lo < hi:
                    raise DomainError(f"{name}: need min < max, got ({lo}, {hi})")
                if not (int(n) == n and n >= 2):
                    raise DomainError(f"{name}: need at least 2 grid points, got {n}")
            elif not len(axis) >= 1:
                raise DomainError(f"{name}: empty value list")

    @property
    def names(self):
        return list(self.axes)

    def values(self, name):
        axis = self.axes[name]
        if isinstance(axis, tuple) and len(axis) == 3:
            lo, hi, n = axis
            return [float(v) for v in np.linspace(lo, hi, int(n))]
        return [float(v) for v in axis]

    def bounds(self, name):
        vals = self.values(name)
        return min(vals), max(vals)

    def size(self):
        return math.prod(len(self.values(n)) for n in self.names)


@dataclass(frozen=True)
class Objective:
    """What a design point is scored by.

    ``kind`` is ``static_displacement_at_U`` (maximise, needs ``voltage``),
    ``resonance_match`` (minimise |f_n - target|), ``locomotion_speed``
    (maximise) or ``custom`` (``func(point) -> float`` with ``sense``).
    """

    kind: str
    voltage: float = 220.0
    target: float = 0.0
    drive: DriveSpec = field(default_factory=DriveSpec)
    pad: FrictionPad = field(default_factory=FrictionPad)
    payload: float = 0.0
    damping_ratio: float = 0.1
    n_cycles: int = 40
    steps_per_cycle: int = 400
    func: object = None
    sense: str = "max"

    def __post_init__(self):
        kinds = ("static_displacement_at_U", "resonance_match", "locomotion_speed", "custom")
        if self.kind not in kinds:
            raise DomainError(f"objective kind must be one of {kinds}")
        if self.kind == "resonance_match":
            if not self.target > 0.0:
                raise DomainError("resonance_match needs target > 0")
            object.__setattr__(self, "sense", "min")
        if self.kind == "custom" and self.func is None:
            raise DomainError("custom objective needs func")
        if self.sense not in ("max", "min"):
            raise DomainError("sense must be 'max' or 'min'")


@dataclass(frozen=True)
class SweepResult:
    names: list
    rows: list  # (values tuple, objective or None, feasible)
    best: object  # row index or None

    def best_row(self):
        return None if self.best is None else self.rows[self.best]


def apply_point(base, point, pad=None, drive=None):
    """Return (assembly, pad, drive) with the point's overrides applied."""
    pad = FrictionPad() if pad is None else pad
    drive = DriveSpec() if drive is None else drive
    groups = {"layer": {}, "mech": {}, "mat": {}, "pad": {}, "drive": {}, "assembly": {}}
    for name, value in point.items():
        if name not in PARAMETERS:
            raise DomainError(f"unknown parameter {name!r}")
        if name == "n_layers":
            value = int(round(value))
        groups[PARAMETERS[name]][name] = value
    asm = replace(
        base,
        layer=replace(base.layer, **groups["layer"]),
        mech=replace(base.mech, **groups["mech"]),
        mat=replace(base.mat, **groups["mat"]),
        **groups["assembly"],
    )
    return asm, replace(pad, **groups["pad"]), replace(drive, **groups["drive"])


def evaluate(obj, base, point):
    """Objective value at ``point``; raises a toolkit error when infeasible."""
    if obj.kind == "custom":
        return float(obj.func(dict(point)))
    asm, pad, drive = apply_point(base, point, obj.pad, obj.drive)
    if obj.kind == "static_displacement_at_U":
        return static_displacement(asm, obj.voltage)
    if obj.kind == "resonance_match":
        return abs(natural_frequency(asm) - obj.target)
    body = build_body(asm, pad, obj.payload, obj.damping_ratio)
    return simulate(body, pad, drive, asm, obj.n_cycles, obj.steps_per_cycle).mean_velocity


def _safe(obj, base, point):
    try:
        value = evaluate(obj, base, point)
    except DeaError:
        return None, False
    if not math.isfinite(value):
        return None, False
    return value, True


def _pick_best(values, sense):
    best, best_val = None, None
    for i, v in enumerate(values):
        if v is None:
            continue
        if best is None or (v > best_val if sense == "max" else v < best_val):
            best, best_val = i, v
    return best


def grid_sweep(space, obj, base, cap=GRID_CAP, workers=1):
    """Evaluate ``obj`` at every grid point, lexicographic over the axes.

    Infeasible points are flagged and carry no value.

    Raises:
        DomainError: if the grid has more than ``cap`` points.
    """
    size = space.size()
    if size > cap:
        raise DomainError(f"grid has {size} points, above the cap of {cap}")
    names = space.names
    points = list(itertools.product(*(space.values(n) for n in names)))

    def run(values):
        return _safe(obj, base, dict(zip(names, values)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, points))
    else:
        results = [run(p) for p in points]
    rows = [(tuple(p), v, ok) for p, (v, ok) in zip(points, results)]
    return SweepResult(names=names, rows=rows, best=_pick_best([v for _, v, _ in rows], obj.sense))


def write_sweep_csv(result, fh):
    fh.write(",".join(list(result.names) + ["objective", "feasible"]) + "\n")
    for values, v, ok in result.rows:
        cells = [f"{x:.9g}" for x in values]
        cells.append("nan" if v is None else f"{v:.9g}")
        cells.append("true" if ok else "false")
        fh.write(",".join(cells) + "\n")


def _reflect(u):
    # fold a unit-box coordinate back inside [0, 1]
    u = math.fmod(abs(u), 2.0)
    return 2.0 - u if u > 1.0 else u


@dataclass(frozen=True)
class OptimizeResult:
    point: dict
    value: float
    trace: list  # (point dict, value or None, feasible) per evaluation
    iterations: int


def optimize(space, obj, base, start, tol=1e-3, max_iter=200, initial_step=0.1):
    """Nelder-Mead on the unit-scaled parameter box with reflection into bounds.

    Stops when the simplex diameter falls below ``tol`` times the box
    diagonal or after ``max_iter`` iterations. Infeasible vertices score
    worst. The returned point is the best evaluated, so never worse than
    ``start``.

    Raises:
        DomainError: if ``start`` lies outside the bounds.
        OptimizationError: if every vertex of the initial simplex is infeasible.
    """
    names = space.names
    lo = np.array([space.bounds(n)[0] for n in names])
    hi = np.array([space.bounds(n)[1] for n in names])
    span = hi - lo
    if np.any(span <= 0.0):
        raise DomainError("optimize needs a non-degenerate range on every axis")
    x0 = np.array([float(start[n]) for n in names])
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise DomainError(f"start {dict(zip(names, x0.tolist()))} outside bounds")

    sign = 1.0 if obj.sense == "max" else -1.0
    trace = []

    def to_point(u):
        return dict(zip(names, (lo + u * span).tolist()))

    def score(u):
        point = to_point(u)
        value, ok = _safe(obj, base, point)
        trace.append((point, value, ok))
        return sign * value if ok else -math.inf

    u0 = (x0 - lo) / span
    s0 = score(u0)
    if max_iter <= 0:
        if not math.isfinite(s0):
            raise OptimizationError("start point is infeasible", trace)
        return OptimizeResult(point=to_point(u0), value=trace[0][1], trace=trace, iterations=0)

    d = len(names)
    simplex = [u0]
    for j in range(d):
        v = u0.copy()
        v[j] = v[j] + initial_step if v[j] + initial_step <= 1.0 else v[j] - initial_step
        simplex.append(v)
    scores = [s0] + [score(v) for v in simplex[1:]]
    if all(s == -math.inf for s in scores):
        raise OptimizationError("all vertices of the initial simplex are infeasible", trace)

    reflect = np.vectorize(_reflect)
    diag = math.sqrt(d)
    it = 0
    for it in range(1, max_iter + 1):
        order = sorted(range(d + 1), key=lambda i: -scores[i])
        simplex = [simplex[i] for i in order]
        scores = [scores[i] for i in order]
        diameter = max(np.linalg.norm(a - b) for a, b in itertools.combinations(simplex, 2))
        if diameter < tol * diag:
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = reflect(centroid + (centroid - worst))
        sr = score(xr)
        if sr > scores[0]:
            xe = reflect(centroid + 2.0 * (centroid - worst))
            se = score(xe)
            simplex[-1], scores[-1] = (xe, se) if se > sr else (xr, sr)
        elif sr > scores[-2]:
            simplex[-1], scores[-1] = xr, sr
        else:
            if sr > scores[-1]:
                xc = reflect(centroid + 0.5 * (xr - centroid))
            else:
                xc = reflect(centroid + 0.5 * (worst - centroid))
            sc = score(xc)
            if sc > max(sr, scores[-1]):
                simplex[-1], scores[-1] = xc, sc
            else:
                best = simplex[0]
                for i in range(1, d + 1):
                    simplex[i] = best + 0.5 * (simplex[i] - best)
                    scores[i] = score(simplex[i])

    feasible = [(p, v) for p, v, ok in trace if ok]
    if not feasible:
        raise OptimizationError("no feasible point evaluated", trace)
    best_point, best_value = feasible[0]
    for p, v in feasible[1:]:
        if sign * v > sign * best_value:
            best_point, best_value = p, v
    return OptimizeResult(point=best_point, value=best_value, trace=trace, iterations=it)
