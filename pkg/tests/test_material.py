import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deaforge.errors import DomainError, LockupError
from deaforge.material import (
    GentMaterial,
    StretchState,
    first_invariant,
    gent_stress_y,
    gent_tangent_y,
    lockup_lambda_y,
    stretch_from_xy,
)

DEFAULT_MAT = GentMaterial(mu1=23000.0, J1=97.0)
NEO = GentMaterial(mu1=23000.0, J1=1e12)
GRID = (0.5, 1.0, 1.5, 2.5)


@pytest.mark.parametrize("lx, ly, lz", [(1, 1, 1), (2.5, 2.5, 0.16), (2, 0.5, 1)])
def test_stretch_from_xy(lx, ly, lz):
    s = stretch_from_xy(lx, ly)
    assert (s.lambda_x, s.lambda_y) == (lx, ly)
    assert s.lambda_z == pytest.approx(lz, rel=1e-15)


@pytest.mark.parametrize("lx, ly", [(0, 1), (1, -2), (-1, -1)])
def test_stretch_rejects_non_positive(lx, ly):
    with pytest.raises(DomainError):
        stretch_from_xy(lx, ly)


def test_state_rejects_compressible():
    with pytest.raises(DomainError):
        StretchState(1.0, 1.0, 1.1)


@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
def test_incompressibility_holds(lx, ly):
    s = stretch_from_xy(lx, ly)
    assert abs(s.lambda_x * s.lambda_y * s.lambda_z - 1.0) <= 1e-12


@pytest.mark.parametrize("state, expected", [
    ((1, 1, 1), 3.0),
    ((2.5, 2.5, 0.16), 12.5256),
    ((2, 1, 0.5), 5.25),
])
def test_first_invariant(state, expected):
    assert first_invariant(StretchState(*state)) == pytest.approx(expected, rel=1e-14)


def test_stress_zero_at_identity():
    assert gent_stress_y(DEFAULT_MAT, stretch_from_xy(1, 1)) == 0.0


def test_stress_at_prestretch():
    # 50-digit evaluation of the Gent expression with the default constants
    assert gent_stress_y(DEFAULT_MAT, stretch_from_xy(2.5, 2.5)) == pytest.approx(158750.86196647248, rel=1e-12)
    assert gent_stress_y(DEFAULT_MAT, stretch_from_xy(2.5, 2.5)) == pytest.approx(1.587e5, rel=1e-3)


def test_stress_neo_hookean_value():
    assert gent_stress_y(NEO, stretch_from_xy(2.5, 2.5)) == pytest.approx(23000 * 6.2244, rel=1e-9)


@pytest.mark.parametrize("lx", GRID)
@pytest.mark.parametrize("ly", GRID)
def test_neo_hookean_limit(lx, ly):
    got = gent_stress_y(NEO, stretch_from_xy(lx, ly))
    assert abs(got - 23000 * (ly ** 2 - lx ** -2 * ly ** -2)) / 23000 <= 1e-9


@given(st.floats(1.0, 1e6), st.floats(0.5, 500.0))
def test_identity_stress_zero_any_material(mu1, J1):
    assert gent_stress_y(GentMaterial(mu1=mu1, J1=J1), stretch_from_xy(1.0, 1.0)) == 0.0


def _fd(mat, lx, ly, h):
    return (gent_stress_y(mat, stretch_from_xy(lx, ly + h))
            - gent_stress_y(mat, stretch_from_xy(lx, ly - h))) / (2 * h)


def test_tangent_identity_matches_fd():
    an = gent_tangent_y(DEFAULT_MAT, stretch_from_xy(1, 1), 1.0)
    assert an == pytest.approx(_fd(DEFAULT_MAT, 1.0, 1.0, 1e-6), rel=1e-6)


def test_tangent_at_prestretch():
    an = gent_tangent_y(DEFAULT_MAT, stretch_from_xy(2.5, 2.5), 2.5)
    assert an == pytest.approx(_fd(DEFAULT_MAT, 2.5, 2.5, 1e-6), rel=1e-6)
    # mpmath numerical derivative of the 50-digit expression
    assert an == pytest.approx(137082.32319603551, rel=1e-12)


def test_tangent_neo_hookean_closed_form():
    an = gent_tangent_y(NEO, stretch_from_xy(2.5, 2.5), 2.5)
    assert an == pytest.approx(23000 * (2 * 2.5 + 2 * 2.5 ** -2 * 2.5 ** -3), rel=1e-9)


@pytest.mark.parametrize("lx", GRID)
@pytest.mark.parametrize("ly", GRID)
def test_tangent_vs_fd_grid(lx, ly):
    h = 1e-7 * ly
    an = gent_tangent_y(DEFAULT_MAT, stretch_from_xy(lx, ly), lx)
    assert an == pytest.approx(_fd(DEFAULT_MAT, lx, ly, h), rel=1e-5)


def test_tangent_uses_fixed_lambda_x():
    st_ = stretch_from_xy(2.0, 2.0)
    assert gent_tangent_y(DEFAULT_MAT, st_, 2.5) == gent_tangent_y(DEFAULT_MAT, stretch_from_xy(2.5, 2.0))


def test_lockup_raised():
    ly = lockup_lambda_y(DEFAULT_MAT, 2.5)
    I1 = 2.5 ** 2 + ly ** 2 + (2.5 * ly) ** -2
    assert I1 - 3 == pytest.approx(97, rel=1e-12)
    with pytest.raises(LockupError) as info:
        gent_stress_y(DEFAULT_MAT, stretch_from_xy(2.5, ly * 1.0001))
    assert "lock-up" in str(info.value)
    assert info.value.stretch[0] == 2.5
    with pytest.raises(LockupError):
        gent_tangent_y(DEFAULT_MAT, stretch_from_xy(2.5, ly * 1.0001), 2.5)


def test_stress_diverges_toward_lockup():
    lx = 2.5
    a = lx ** 2

    def ly_at(frac):
        # ly with I1 - 3 = frac * J1
        b = 3 + frac * 97 - a
        return math.sqrt((b + math.sqrt(b * b - 4 / a)) / 2)

    s90 = gent_stress_y(DEFAULT_MAT, stretch_from_xy(lx, ly_at(0.9)))
    s99 = gent_stress_y(DEFAULT_MAT, stretch_from_xy(lx, ly_at(0.99)))
    assert s99 > s90 > 0


@settings(max_examples=50)
@given(st.floats(1.0, 4.0), st.floats(1.0, 4.0))
def test_stress_increasing_in_ly_on_tensile_branch(lx, ly):
    mat = DEFAULT_MAT
    a = gent_stress_y(mat, stretch_from_xy(lx, ly))
    b = gent_stress_y(mat, stretch_from_xy(lx, ly * 1.01))
    assert b > a


@pytest.mark.parametrize("kw", [dict(mu1=-1.0), dict(J1=0.0), dict(eps_r=0.5)])
def test_material_invariants(kw):
    with pytest.raises(DomainError):
        GentMaterial(**kw)


def test_permittivity():
    assert GentMaterial().permittivity == pytest.approx(3 * 8.85e-12, rel=1e-15)
