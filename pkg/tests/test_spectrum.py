import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from radwave import _kernels as K
from radwave import potentials as P
from radwave import spectrum as SP
from radwave import steady as S


def zero_energy_coupling(V, lo, hi, R=12.0):
    # alpha with a bounded zero-energy solution: phi'' = -alpha V phi, phi(0) = 0, phi'(R) = 0
    def end_slope(alpha):
        sol = solve_ivp(lambda r, y: [y[1], -alpha * P.evaluate(V, r) * y[0]], (0.0, R), [0.0, 1.0],
                        rtol=1e-12, atol=1e-14)
        return sol.y[1, -1]

    return brentq(end_slope, lo, hi, xtol=1e-13)


@pytest.fixture(scope="module")
def gauss_rep():
    return SP.spectrum(P.gaussian(1.0, 1.0), 3)


def test_gaussian_eigenvalues_match_ode_thresholds(gauss_rep):
    V = P.gaussian(1.0, 1.0)
    a1 = zero_energy_coupling(V, 1.0, 5.0)
    a2 = zero_energy_coupling(V, 10.0, 25.0)
    assert gauss_rep.eigenvalues[0] == pytest.approx(1.0 / a1, rel=1e-6)
    assert gauss_rep.eigenvalues[1] == pytest.approx(1.0 / a2, rel=1e-5)
    assert np.all(np.diff(gauss_rep.eigenvalues) < 0)


def test_star_ground_threshold():
    # -Delta w = 3 w^5 for w = (1 + r^2)^-1/2, so w is a positive zero-energy state of (3/4) V*
    V = P.manufactured_star()
    alpha = zero_energy_coupling(V, 0.5, 2.0, R=400.0)
    lam = SP.spectrum(V, 1, n_quad=600, R_spec=400.0).eigenvalues[0]
    assert alpha == pytest.approx(0.75, rel=1e-3)
    assert lam == pytest.approx(1.0 / alpha, rel=1e-3)


@settings(max_examples=10)
@given(st.floats(0.1, 20.0))
def test_eigenvalues_scale_linearly(gauss_rep, alpha):
    rep = SP.spectrum(P.scaled(alpha, P.gaussian(1.0, 1.0)), 3)
    assert np.max(np.abs(rep.eigenvalues - alpha * gauss_rep.eigenvalues)) <= 1e-10 * alpha


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.integers(2, 30))
def test_jacobi_agrees_with_lapack(seed, n):
    A = np.random.default_rng(seed).standard_normal((n, n))
    A = A + A.T
    w, vec, off, fro, _ = K.jacobi_eigh(A, 1e-14, 60, True)
    assert off <= 1e-14 * fro
    assert np.sort(w) == pytest.approx(np.linalg.eigvalsh(A), abs=1e-11 * fro)
    assert np.max(np.abs(vec @ np.diag(w) @ vec.T - A)) < 1e-10 * fro


def test_quadrature_converges_at_fourth_order():
    V = P.gaussian(1.0, 1.0)
    ref = SP.spectrum(V, 1, n_quad=800).eigenvalues[0]
    e = [abs(SP.spectrum(V, 1, n_quad=n).eigenvalues[0] - ref) for n in (50, 100)]
    assert e[0] / e[1] > 10


def test_negative_potential_refused():
    with pytest.raises(SP.NegativePotential):
        SP.spectrum(P.scaled(-1.0, P.gaussian(1.0, 1.0)))


def test_tail_bound_recorded():
    assert SP.spectrum(P.gaussian(1.0, 1.0), 1).tail_bound > 0
    assert SP.tail_bound(P.zero(), 60.0) == 0.0


def test_resonance_check(gauss_rep):
    V = P.gaussian(1.0, 1.0)
    res = SP.resonance_check(P.scaled(1.0 / gauss_rep.eigenvalues[0], V))
    assert res.resonant
    assert not SP.resonance_check(V).resonant


def test_first_coupling_sits_at_threshold(gauss_rep):
    V = P.gaussian(1.0, 1.0)
    a1 = 1.0 / gauss_rep.eigenvalues[0]
    found = SP.first_nontrivial_coupling(V, a1 * np.array([0.95, 0.97, 0.99, 1.01, 1.03, 1.05]),
                                         lambda W: S.census(W, A=5.0, step=0.05))
    assert found == pytest.approx(1.01 * a1)


def test_k_limited():
    with pytest.raises(ValueError):
        SP.spectrum(P.gaussian(1.0, 1.0), 9)
