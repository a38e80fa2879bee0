import io
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deaforge.equilibrium import natural_frequency
from deaforge.errors import DomainError
from deaforge.locomotion import (
    PAYLOAD_GRID,
    FrictionPad,
    RobotBody,
    build_body,
    pad_friction,
    simulate,
    speed_vs_frequency,
    speed_vs_payload,
    write_trajectory_csv,
)
from deaforge.powertrain import DriveSpec

PAD = FrictionPad()
# frozen from a serial run of the default profile at f_n, 220 V, 60 cycles x 400 steps
SPEED_AT_FN = 0.002432630841489895


@pytest.fixture(scope="module")
def drive():
    from deaforge.actuator import DeaAssembly
    return DriveSpec(frequency=natural_frequency(DeaAssembly()))


@pytest.fixture(scope="module")
def base_run(drive):
    from deaforge.actuator import DeaAssembly
    asm = DeaAssembly()
    return simulate(build_body(asm, PAD), PAD, drive, asm)


def test_friction_direction():
    assert pad_friction(PAD, 1.0, 1.0) == pytest.approx(-0.15, rel=1e-12)
    assert pad_friction(PAD, -1.0, 1.0) == pytest.approx(1.0, rel=1e-12)
    assert pad_friction(PAD, 0.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        pad_friction(PAD, 1.0, -1.0)


@given(st.floats(-1.0, 1.0), st.floats(0.0, 10.0), st.floats(0.01, 2.0))
def test_symmetric_friction_is_odd(v, n, mu):
    pad = FrictionPad(mu_forward=mu, mu_backward=mu)
    assert pad_friction(pad, -v, n) == -pad_friction(pad, v, n)


@given(st.floats(-1.0, 1.0), st.floats(0.0, 10.0))
def test_friction_bounded_and_dissipative(v, n):
    f = pad_friction(PAD, v, n)
    assert abs(f) <= PAD.mu_backward * n
    assert f * v <= 0.0


@pytest.mark.parametrize("kw", [dict(mu_forward=0.0), dict(mu_forward=2.0), dict(v_reg=0.0), dict(incline=0.0)])
def test_pad_invariants(kw):
    with pytest.raises(DomainError):
        FrictionPad(**kw)


def test_body_invariants():
    with pytest.raises(DomainError):
        RobotBody(m_front=0.0, m_rear=1.0, k=1.0, c=0.0)
    with pytest.raises(DomainError):
        RobotBody(m_front=1.0, m_rear=1.0, k=0.0, c=0.0)


def test_build_body(asm):
    body = build_body(asm, PAD, payload=1e-3)
    assert body.m_front == body.m_rear == pytest.approx(2.34e-3 / 2, rel=1e-12)
    assert body.rear_total == pytest.approx(2.34e-3 / 2 + 1e-3, rel=1e-12)
    assert body.k == pytest.approx(9.8592939477693 + 161.06466664991608, rel=1e-6)
    reduced = body.m_front / 2
    assert body.c == pytest.approx(0.2 * math.sqrt(body.k * reduced), rel=1e-12)
    with pytest.raises(DomainError):
        build_body(asm, PAD, payload=-1.0)


def test_forward_speed_regression(base_run):
    assert base_run.mean_velocity > 0.0
    assert base_run.mean_velocity == pytest.approx(SPEED_AT_FN, rel=1e-9)
    assert base_run.cycles == 60
    assert len(base_run.t) == 60 * 400 + 1
    assert base_run.stroke > 0.0


def test_speed_order_of_magnitude(base_run):
    # reported measurement is 12.36 mm/s; the lumped model sits within a decade
    assert 1e-3 < base_run.mean_velocity < 1e-1


def test_symmetric_pads_no_drift(asm, drive):
    pad = FrictionPad(mu_forward=1.0, mu_backward=1.0)
    r = simulate(build_body(asm, pad), pad, drive, asm)
    assert abs(r.mean_velocity) < 1e-2 * r.stroke * drive.frequency


def test_zero_drive_no_motion(asm, drive):
    r = simulate(build_body(asm, PAD), PAD, replace(drive, amplitude=0.0), asm)
    assert not np.any(r.x_front) and not np.any(r.x_rear)
    assert r.mean_velocity == 0.0


def test_step_halving(asm, drive, base_run):
    fine = simulate(build_body(asm, PAD), PAD, drive, asm, steps_per_cycle=800)
    assert abs(fine.mean_velocity / base_run.mean_velocity - 1.0) < 0.02


def test_momentum_conserved_without_gravity(asm, drive):
    body = build_body(asm, PAD, payload=0.5e-3, g=0.0)
    r = simulate(body, PAD, drive, asm, n_cycles=20)
    p = body.m_front * r.v_front + body.rear_total * r.v_rear
    scale = body.m_front * np.max(np.abs(r.v_front))
    assert np.max(np.abs(p)) <= 1e-12 * scale


def test_resolution_limits(asm, drive):
    body = build_body(asm, PAD)
    with pytest.raises(DomainError):
        simulate(body, PAD, drive, asm, steps_per_cycle=100)
    with pytest.raises(DomainError):
        simulate(body, PAD, drive, asm, n_cycles=10)


def test_payload_nonincreasing(asm, drive):
    table = speed_vs_payload(asm, PAD, drive, PAYLOAD_GRID)
    speeds = [v for _, v in table]
    assert [p for p, _ in table] == list(PAYLOAD_GRID)
    assert all(b <= a for a, b in zip(speeds, speeds[1:]))
    assert all(v > 0 for v in speeds)


def test_payload_rejects(asm, drive):
    with pytest.raises(DomainError):
        speed_vs_payload(asm, PAD, drive, [1e-3, 0.0])
    with pytest.raises(DomainError):
        speed_vs_frequency(asm, PAD, drive, [0.0])


def test_frequency_peak_at_fn(asm, drive):
    fn = drive.frequency
    ratios = [0.2 * k for k in range(1, 11)]
    table = speed_vs_frequency(asm, PAD, drive, [fn * r for r in ratios])
    best = max(range(len(table)), key=lambda i: table[i][1])
    assert ratios[best] == pytest.approx(1.0)


def test_threaded_sweep_identical(asm, drive):
    grid = PAYLOAD_GRID[:4]
    kw = dict(n_cycles=20)
    assert speed_vs_payload(asm, PAD, drive, grid, workers=4, **kw) == speed_vs_payload(asm, PAD, drive, grid, **kw)


def test_trajectory_csv(base_run):
    buf = io.StringIO()
    write_trajectory_csv(base_run, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t_s,x_front_m,x_rear_m,v_front_mps,v_rear_mps"
    assert len(lines) == len(base_run.t) + 1
    assert lines[1] == "0,0,0,0,0"


def test_build_body_payload_and_undamped(asm):
    body = build_body(asm, PAD, payload=3e-3, damping_ratio=0.0)
    assert body.rear_total == pytest.approx(1.17e-3 + 3e-3, rel=1e-12)
    assert body.m_front + body.m_rear == pytest.approx(2.34e-3, rel=1e-12)
    assert body.c == 0.0


def test_friction_saturates(asm):
    assert pad_friction(PAD, 100 * PAD.v_reg, 2.0) == pytest.approx(-0.15 * 2.0, rel=1e-2)
