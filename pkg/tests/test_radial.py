import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from radwave import data, potentials
from radwave.radial import (
    FieldState,
    RadialGrid,
    ReducedState,
    annulus_distance,
    energy,
    exterior_energy,
    lift,
    radial_derivative,
    reduce,
    support_radius,
)


def test_grid_covering_and_snap():
    g = RadialGrid.covering(0.01, 5.0)
    assert g.r_max == pytest.approx(5.0)
    j, d = g.snap(1.2345)
    assert j == 123 and d == pytest.approx(-0.0045)
    with pytest.raises(ValueError):
        RadialGrid(0.0, 100)
    with pytest.raises(ValueError):
        RadialGrid(0.1, 4)


def test_reduce_lift_round_trip():
    g = RadialGrid.covering(0.01, 6.0)
    u = np.exp(-g.r**2)
    ut = (1 - g.r**2) * np.exp(-g.r**2)
    back = lift(reduce(FieldState(g, u, ut)))
    assert np.max(np.abs(back.u - u)) < 1e-5
    assert np.max(np.abs(back.ut - ut)) < 1e-5


def test_reduced_state_rejects_nonzero_origin():
    g = RadialGrid(0.1, 20)
    v = np.ones(20)
    with pytest.raises(ValueError):
        ReducedState(g, v, np.zeros(20))


def test_radial_derivative_is_fourth_order():
    errs = []
    for h in (0.02, 0.01):
        g = RadialGrid.covering(h, 3.0)
        v = np.sin(g.r)
        errs.append(np.max(np.abs(radial_derivative(v, h) - np.cos(g.r))))
    assert errs[0] / errs[1] > 12


def test_energy_functional_of_manufactured_state():
    # J(u*) = -pi/48 per steradian; independent check by quadrature
    u = lambda r: (1 + r * r) ** -0.5
    du = lambda r: -r * (1 + r * r) ** -1.5
    V = lambda r: 4 / (1 + r * r) ** 2
    J_quad = quad(lambda r: (0.5 * du(r) ** 2 - 0.5 * V(r) * u(r) ** 2 + u(r) ** 6 / 6) * r * r, 0, np.inf,
                  limit=200)[0]
    assert J_quad == pytest.approx(-np.pi / 48, abs=1e-12)
    g = RadialGrid.covering(1e-3, 400.0)
    s = ReducedState(g, g.r * u(g.r), np.zeros(g.n))
    rep = energy(s, potentials.manufactured_star())
    # truncation at 400 leaves c^2 / (2 * 400)
    assert rep.functional_J + 1.0 / 800.0 == pytest.approx(J_quad, abs=2e-6)
    assert rep.kinetic == 0.0 and rep.total_E == rep.functional_J


def test_exterior_energy_of_static_tail():
    g = RadialGrid.covering(0.005, 60.0)
    s = ReducedState(g, g.r / np.sqrt(1 + g.r**2), np.zeros(g.n))
    exact = quad(lambda r: (1 + r * r) ** -3, 5.0, 60.0)[0]
    # trapezoid error h^2 |f'(5)| / 12 is about 3e-6 relative
    assert exterior_energy(s, 5.0) == pytest.approx(exact, rel=1e-5)
    with pytest.raises(ValueError):
        exterior_energy(s, 61.0)


def test_support_radius_of_bump():
    h = 0.01
    g = RadialGrid.covering(h, 4.0)
    s = data.bump_state(g, 1.0, 2.0)
    rho = support_radius(s, 1e-8)
    assert 2 - 2 * h <= rho <= 2 + 2 * h


finite = st.floats(-2, 2, allow_nan=False)


@given(st.lists(st.tuples(finite, finite, finite), min_size=3, max_size=3), st.floats(0, 2), st.floats(2.5, 5))
def test_annulus_distance_triangle_inequality(coefs, a, b):
    g = RadialGrid.covering(0.05, 5.0)
    states = []
    for c0, c1, c2 in coefs:
        v = g.r * (c0 * np.exp(-g.r**2) + c1 * np.exp(-((g.r - 2) ** 2)))
        vt = g.r * c2 * np.exp(-((g.r - 1) ** 2))
        states.append(ReducedState(g, v, vt))
    x, y, z = states
    assert annulus_distance(x, z, a, b) <= annulus_distance(x, y, a, b) + annulus_distance(y, z, a, b) + 1e-12
    assert annulus_distance(x, x, a, b) == 0.0
    assert annulus_distance(x, y, a, b) == pytest.approx(annulus_distance(y, x, a, b), abs=1e-14)


@given(st.floats(0.1, 3.0), st.floats(0.5, 4.0))
def test_energy_scales_quadratically_without_nonlinearity(amp, width):
    g = RadialGrid.covering(0.02, 20.0)
    base = ReducedState(g, g.r * np.exp(-(g.r / width) ** 2), np.zeros(g.n))
    V = potentials.zero()
    e1 = energy(base, V).gradient
    e2 = energy(base.scaled(amp), V).gradient
    assert e2 == pytest.approx(amp**2 * e1, rel=1e-12)
