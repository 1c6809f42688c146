import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radwave import potentials as P
from radwave import steady as S


def test_manufactured_profile_and_charge(vstar):
    _, u_star, c_star = P.manufactured_pair()
    shot = S.shoot(1.0, vstar, 200.0, dr=0.01)
    assert shot.decays
    sel = shot.r <= 50.0
    u = np.where(shot.r[sel] > 0, shot.w[sel] / np.where(shot.r[sel] > 0, shot.r[sel], 1.0), 1.0)
    assert np.max(np.abs(u - u_star(shot.r[sel]))) <= 1e-6
    assert shot.classification.c == pytest.approx(c_star, abs=1e-3)


def test_steady_state_diagnostics(vstar):
    st_ = S.steady_from_shot(S.shoot(1.0, vstar, 200.0), vstar, 200.0, 1e-12)
    assert st_.sign_changes == 0
    assert st_.functional_J == pytest.approx(-math.pi / 48, abs=1e-5)
    assert st_.residual < 1e-5
    assert st_.mirrored().a == -1.0 and st_.mirrored().c == -st_.c


@given(st.floats(0.3, 3.0))
def test_free_shot_blows_up_at_closed_form_radius(a):
    # -u'' - 2u'/r + u^5 = 0 has u = a (1 - a^4 r^2 / 3)^(-1/2), singular at sqrt(3) / a^2
    shot = S.shoot(a, P.zero(), 200.0)
    assert isinstance(shot.classification, S.BlowUp)
    assert shot.classification.sign == 1
    assert shot.classification.r_blow == pytest.approx(math.sqrt(3.0) / a**2, rel=1e-6)


def test_free_census_is_trivial():
    cen = S.census(P.zero(), A=5.0, step=0.05)
    assert [e.a for e in cen.all_states()] == [0.0]


def test_star_census(star_census):
    a = [e.a for e in star_census.all_states()]
    assert a == pytest.approx([-1.0, 0.0, 1.0], abs=1e-8)
    assert star_census.find(1.0).c == pytest.approx(1.0, abs=1e-6)
    assert star_census.symmetric


@given(st.floats(0.05, 1.75))
def test_free_exterior_map_matches_kelvin_transform(c):
    # Kelvin transform of the ball solution: u = c / sqrt(r^2 - c^4 / 3) outside c^2 / sqrt(3)
    R = 2.0
    lam = S.lam_of_c(c, P.zero(), R)
    # the map steepens toward the charge ceiling, so relative error grows there
    assert lam == pytest.approx(c / math.sqrt(R * R - c**4 / 3.0), rel=1e-6)


def test_free_exterior_charge_is_bounded():
    R = 2.0
    c_sup = (3.0 * R * R) ** 0.25
    assert S.c_of_lambda(1e3, P.zero(), R) == pytest.approx(c_sup, abs=1e-4)
    assert S.lam_of_c(c_sup * 1.01, P.zero(), R) == math.inf


def test_star_exterior_recovers_manufactured_boundary_value(vstar):
    for R in (1.0, 2.0, 5.0):
        assert S.lam_of_c(1.0, vstar, R) == pytest.approx(1.0 / math.sqrt(1.0 + R * R), rel=1e-8)


@given(st.floats(0.01, 1.9))
def test_star_exterior_round_trip(vstar, c):
    lam = S.lam_of_c(c, vstar, 2.0)
    assert S.c_of_lambda(lam, vstar, 2.0) == pytest.approx(c, abs=1e-6)
    assert S.c_of_lambda(-lam, vstar, 2.0) == pytest.approx(-c, abs=1e-6)


def test_decay_exponent_of_manufactured_state():
    r = np.geomspace(1.0, 400.0, 2000)
    w = r / np.sqrt(1.0 + r * r)
    fit = S.decay_fit(r, w, 10.0, 100.0)
    assert fit.ell == pytest.approx(1.0, abs=1e-4)
    assert fit.gamma == pytest.approx(2.0, abs=0.1)


def test_decay_fit_rejects_flat_tails():
    r = np.geomspace(1.0, 100.0, 100)
    with pytest.raises(S.IllConditionedFit):
        S.decay_fit(r, np.ones_like(r), 5.0, 100.0)


@given(st.floats(-5, 5), st.floats(0.1, 10), st.floats(0.05, 0.9))
def test_aitken_is_exact_on_geometric_tails(ell, C, q):
    w = [ell + C * q**k for k in range(3)]
    assert S.aitken(*w) == pytest.approx(ell, abs=1e-9 * max(1.0, C))


def test_sign_changes():
    assert S.count_sign_changes(np.array([0.0, 1.0, 0.5, -0.2, -1.0, 0.3])) == 2
    assert S.count_sign_changes(np.zeros(5)) == 0


def test_shot_validates_arguments(vstar):
    with pytest.raises(ValueError):
        S.shoot(1.0, vstar, 50.0)
    with pytest.raises(ValueError):
        S.shoot(1.0, vstar, 200.0, tol=1e-6)
