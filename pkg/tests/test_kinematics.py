import numpy as np
import pytest
from hypothesis import given, strategies as st

from adhesive_friction.kinematics import (GapState, RigidSurface, gap_state, normal_gap, project,
                                          slip_increment, surface_stretch, update_slip)
from adhesive_friction.laws import DomainError

coord = st.floats(-50, 50, allow_nan=False)


@given(coord, coord, coord)
def test_projection_is_vertical_drop(x, y, h):
    plate = RigidSurface(height=h)
    xp, n = project(np.array([x, y]), plate)
    assert xp[0] == x and xp[1] == h
    assert np.array_equal(n, [0.0, 1.0])
    assert normal_gap([x, y], plate) == pytest.approx(y - h, abs=1e-12)


def test_gap_sign_and_stack():
    plate = RigidSurface(height=-0.5)
    pts = np.array([[0.0, 1.0], [3.0, -0.5], [1.0, -1.0]])
    assert np.allclose(normal_gap(pts, plate), [1.5, 0.0, -0.5])
    st_ = gap_state(pts[0], plate, j_cl=1.1)
    assert st_.g_n == pytest.approx(1.5) and st_.j_cl == 1.1


def test_slip_increment_relative_to_plate():
    a, b = RigidSurface(0.0, 0.0), RigidSurface(0.0, 0.3)
    # point fixed while the plate moves right: slips left relative to the plate
    assert slip_increment([1.0, 0.1], [1.0, 0.1], a, b) == pytest.approx(-0.3)
    # point carried with the plate: no slip
    assert slip_increment([1.0, 0.1], [1.3, 0.1], a, b) == pytest.approx(0.0)


def test_update_slip_accumulates():
    plate0 = RigidSurface(0.0, 0.0)
    s = gap_state([0.0, 0.2], plate0)
    plates = [RigidSurface(0.0, u) for u in (0.1, 0.2, 0.3)]
    prev = plate0
    for p in plates:
        s = update_slip(s, s.x_k, prev, p)
        prev = p
    assert s.g_t_accumulated == pytest.approx(-0.3)
    assert s.g_t_increment == pytest.approx(-0.1)
    assert s.g_n == pytest.approx(0.2)


def test_rigid_surface_translation_and_kind():
    p = RigidSurface(1.0, 2.0).translated(dx=0.5, dy=-0.25)
    assert (p.height, p.u_bar) == (0.75, 2.5)
    with pytest.raises(NotImplementedError):
        RigidSurface(kind="curved")


def test_surface_stretch():
    assert surface_stretch(2.0, 2.4) == pytest.approx(1.2)
    with pytest.raises(DomainError):
        surface_stretch(0.0, 1.0)
