"""Matplotlib figures written next to the CSV outputs of the CLI."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "savefig.bbox": "tight",
}


def _save(fig, path):
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def _figure(ncols=1, width=4.2, height=3.0):
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, ncols, figsize=(width * ncols, height), squeeze=False)
    for ax in axes[0]:
        ax.grid(True, alpha=0.3)
    return fig, list(axes[0])


def plot_voltage_curve(curve, path, measured=None):
    """Displacement and blocking force against voltage, two panels."""
    fig, (ax1, ax2) = _figure(2)
    u = np.asarray(curve.voltages)
    ax1.plot(u, np.asarray(curve.displacements) * 1e6, "o-", ms=3, label="model")
    ax2.plot(u, np.asarray(curve.blocking_forces) * 1e3, "o-", ms=3, label="model")
    if measured:
        ax1.plot([u[-1]], [measured["displacement_m"] * 1e6], "s", color="C3", label="measured")
        ax2.plot([u[-1]], [measured["blocking_force_n"] * 1e3], "s", color="C3", label="measured")
        ax1.legend()
        ax2.legend()
    ax1.set(xlabel="voltage (V)", ylabel="displacement (um)")
    ax2.set(xlabel="voltage (V)", ylabel="blocking force (mN)")
    return _save(fig, path)


def plot_frequency_response(points, path, fn=None, measured_peak=None):
    fig, (ax,) = _figure()
    f = np.array([p[0] for p in points])
    a = np.array([p[1] for p in points])
    ax.plot(f, a * 1e6)
    if fn is not None:
        ax.axvline(fn, ls="--", color="C1", label=f"model f_n {fn:.1f} Hz")
    if measured_peak is not None:
        ax.axvline(measured_peak, ls=":", color="C3", label=f"measured peak {measured_peak:g} Hz")
    if fn is not None or measured_peak is not None:
        ax.legend()
    ax.set(xlabel="frequency (Hz)", ylabel="amplitude (um)")
    return _save(fig, path)


def plot_trajectory(result, path):
    fig, (ax1, ax2) = _figure(2)
    t = result.t
    ax1.plot(t, result.x_front * 1e3, label="front")
    ax1.plot(t, result.x_rear * 1e3, label="rear")
    ax1.set(xlabel="time (s)", ylabel="position (mm)")
    ax1.legend()
    ax2.plot(t, (result.x_front - result.x_rear) * 1e6, lw=0.6)
    ax2.set(xlabel="time (s)", ylabel="pad separation change (um)")
    fig.suptitle(f"mean speed {result.mean_velocity * 1e3:.3g} mm/s")
    return _save(fig, path)


def plot_speed_table(table, path, xlabel, xscale=1.0):
    fig, (ax,) = _figure()
    x = np.array([r[0] for r in table]) * xscale
    v = np.array([r[1] for r in table]) * 1e3
    ax.plot(x, v, "o-", ms=3)
    ax.set(xlabel=xlabel, ylabel="speed (mm/s)")
    return _save(fig, path)


def plot_power_trace(trace, path):
    fig, (ax1, ax2) = _figure(2)
    ax1.plot(trace.t * 1e3, trace.u)
    ax1.set(xlabel="time (ms)", ylabel="actuator voltage (V)")
    ax2.plot(trace.t * 1e3, trace.i * 1e3, lw=0.6)
    ax2.set(xlabel="time (ms)", ylabel="converter current (mA)")
    return _save(fig, path)


def plot_sweep(result, path):
    """Objective over a one-parameter sweep; multi-axis sweeps plot by row index."""
    fig, (ax,) = _figure()
    ok = [(vals, v) for vals, v, feasible in result.rows if feasible]
    if len(result.names) == 1:
        ax.plot([vals[0] for vals, _ in ok], [v for _, v in ok], "o-", ms=3)
        ax.set(xlabel=result.names[0])
    else:
        idx = [i for i, (_, _, feasible) in enumerate(result.rows) if feasible]
        ax.plot(idx, [v for _, v in ok], ".", ms=3)
        ax.set(xlabel="grid row")
    ax.set(ylabel="objective")
    return _save(fig, path)


def plot_validation(curve, response, fn, measured, path):
    """Three panels: displacement and force vs voltage, amplitude vs frequency."""
    fig, (a, b, c) = _figure(3, width=3.6)
    u = np.asarray(curve.voltages)
    a.plot(u, np.asarray(curve.displacements) * 1e6, label="model")
    a.plot([u[-1]], [measured["displacement_m"] * 1e6], "s", color="C3", label="measured")
    a.set(xlabel="voltage (V)", ylabel="displacement (um)")
    a.legend()
    b.plot(u, np.asarray(curve.blocking_forces) * 1e3)
    b.plot([u[-1]], [measured["blocking_force_n"] * 1e3], "s", color="C3")
    b.set(xlabel="voltage (V)", ylabel="blocking force (mN)")
    f = np.array([p[0] for p in response])
    c.plot(f, np.array([p[1] for p in response]) * 1e6)
    c.axvline(fn, ls="--", color="C1", label="model f_n")
    c.axvline(measured["resonance_hz"], ls=":", color="C3", label="measured peak")
    c.set(xlabel="frequency (Hz)", ylabel="amplitude (um)")
    c.legend()
    return _save(fig, path)
