"""Radial grids, field states, the u <-> v = r u reduction and energy functionals.

All energies are per steradian: the factor |S^2| = 4 pi is dropped everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid r_j = j h, j = 0..n-1."""

    h: float
    n: int

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        if self.n < 16:
            raise ValueError(f"grid needs at least 16 nodes, got {self.n}")

    @classmethod
    def covering(cls, h: float, r_max: float) -> "RadialGrid":
        """Smallest grid with spacing h whose last node is >= r_max."""
        return cls(h, max(16, int(np.ceil(r_max / h - 1e-9)) + 1))

    @property
    def r(self) -> np.ndarray:
        return self.h * np.arange(self.n)

    @property
    def r_max(self) -> float:
        return (self.n - 1) * self.h

    def snap(self, radius: float) -> tuple[int, float]:
        """Index of the node nearest to radius, and the snap distance."""
        j = int(np.clip(round(radius / self.h), 0, self.n - 1))
        return j, j * self.h - radius


@dataclass(frozen=True, eq=False)
class FieldState:
    grid: RadialGrid
    u: np.ndarray
    ut: np.ndarray
    t: float = 0.0
    blown_up: bool = False

    def __post_init__(self):
        _check_samples(self.grid, self.u, self.ut, self.blown_up)


@dataclass(frozen=True, eq=False)
class ReducedState:
    """(v, v_t) with v = r u; v and v_t vanish at the origin."""

    grid: RadialGrid
    v: np.ndarray
    vt: np.ndarray
    t: float = 0.0
    blown_up: bool = False

    def __post_init__(self):
        _check_samples(self.grid, self.v, self.vt, self.blown_up)
        if self.v[0] != 0.0 or self.vt[0] != 0.0:
            raise ValueError("reduced state must vanish at r = 0 (v = r u is odd)")

    @classmethod
    def zeros(cls, grid: RadialGrid, t: float = 0.0) -> "ReducedState":
        return cls(grid, np.zeros(grid.n), np.zeros(grid.n), t)

    def __add__(self, other: "ReducedState") -> "ReducedState":
        _same_grid(self, other)
        return ReducedState(self.grid, self.v + other.v, self.vt + other.vt, self.t)

    def __sub__(self, other: "ReducedState") -> "ReducedState":
        _same_grid(self, other)
        return ReducedState(self.grid, self.v - other.v, self.vt - other.vt, self.t)

    def scaled(self, factor: float) -> "ReducedState":
        return ReducedState(self.grid, factor * self.v, factor * self.vt, self.t)

    def reflected(self) -> "ReducedState":
        """Time reflection (v, v_t) -> (v, -v_t)."""
        return ReducedState(self.grid, self.v, -self.vt, -self.t)

    def regrid(self, grid: RadialGrid, pad_tol: float = 0.0) -> "ReducedState":
        """Same spacing, different length: truncate, or zero-pad compact data.

        Padding needs the outer samples to vanish, up to pad_tol relative to
        the peak of max(|v|, |v_t|).
        """
        if not np.isclose(grid.h, self.grid.h, rtol=1e-12, atol=0):
            raise ValueError("regrid keeps the spacing fixed")
        if grid.n <= self.grid.n:
            return ReducedState(grid, self.v[: grid.n].copy(), self.vt[: grid.n].copy(), self.t)
        peak = max(np.max(np.abs(self.v)), np.max(np.abs(self.vt)))
        if max(abs(self.v[-1]), abs(self.vt[-1])) > pad_tol * peak:
            raise ValueError("cannot zero-pad data that does not vanish at the outer node")
        v = np.zeros(grid.n)
        vt = np.zeros(grid.n)
        v[: self.grid.n] = self.v
        vt[: self.grid.n] = self.vt
        return ReducedState(grid, v, vt, self.t)


def _check_samples(grid, a, b, blown_up):
    if a.shape != (grid.n,) or b.shape != (grid.n,):
        raise ValueError(f"samples must have shape ({grid.n},), got {a.shape} and {b.shape}")
    if not blown_up and not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite samples in a state not flagged as blown up")


def _same_grid(s1, s2):
    if s1.grid != s2.grid:
        raise ValueError(f"grid mismatch: {s1.grid} vs {s2.grid}")


@dataclass(frozen=True)
class EnergyReport:
    kinetic: float
    gradient: float
    potential_term: float
    sextic: float
    total_E: float
    functional_J: float
    units: str = field(default="per steradian (|S^2| dropped)")


def reduce(state: FieldState) -> ReducedState:
    r = state.grid.r
    v = r * state.u
    vt = r * state.ut
    # r_0 = 0 exactly, so v[0] = 0 * u[0]; force +0.0 in case u[0] is negative
    v[0] = 0.0
    vt[0] = 0.0
    return ReducedState(state.grid, v, vt, state.t, state.blown_up)


def lift(state: ReducedState) -> FieldState:
    if state.v[0] != 0.0:
        raise ValueError("lift needs v[0] = 0")
    r = state.grid.r
    u = np.empty_like(state.v)
    ut = np.empty_like(state.vt)
    u[1:] = state.v[1:] / r[1:]
    ut[1:] = state.vt[1:] / r[1:]
    # quadratic through nodes 1, 2, 3 evaluated at 0
    u[0] = 3.0 * u[1] - 3.0 * u[2] + u[3]
    ut[0] = 3.0 * ut[1] - 3.0 * ut[2] + ut[3]
    return FieldState(state.grid, u, ut, state.t, state.blown_up)


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def radial_derivative(v: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order centred d/dr of odd-in-r samples (v[0] = 0).

    The odd reflection v(-r) = -v(r) supplies the ghost values at the
    origin; the last two nodes use one-sided fourth-order stencils.
    """
    n = v.shape[0]
    ext = np.empty(n + 2)
    ext[2:] = v
    ext[0] = -v[2]
    ext[1] = -v[1]
    d = np.empty(n)
    d[: n - 2] = (ext[0 : n - 2] - 8.0 * ext[1 : n - 1] + 8.0 * ext[3 : n + 1] - ext[4 : n + 2]) / (12.0 * h)
    for j in (n - 2, n - 1):
        # backward fourth-order stencils
        if j == n - 1:
            d[j] = (25 * v[j] - 48 * v[j - 1] + 36 * v[j - 2] - 16 * v[j - 3] + 3 * v[j - 4]) / (12 * h)
        else:
            d[j] = (3 * v[j + 1] + 10 * v[j] - 18 * v[j - 1] + 6 * v[j - 2] - v[j - 3]) / (12 * h)
    return d


def gradient_energy(v: np.ndarray, h: float) -> float:
    """(1/2) int (d_r u)^2 r^2 dr in reduced form.

    Uses the staggered difference quotient (v_{j+1} - v_j)/h, which is the
    form the leapfrog Laplacian is adjoint to, minus the boundary-consistent
    cross term v(R)^2 / R.
    """
    dv = np.diff(v)
    r_end = (v.shape[0] - 1) * h
    return 0.5 * (float(np.dot(dv, dv)) / h - v[-1] ** 2 / r_end)


def energy_parts(grid: RadialGrid, v, vt, a_nodes, nonlinear: bool = True) -> EnergyReport:
    w = trapezoid_weights(grid.n, grid.h)
    kinetic = 0.5 * float(np.dot(w, vt * vt))
    gradient = gradient_energy(v, grid.h)
    potential = -0.5 * float(np.dot(w, a_nodes * v * v))
    sextic = 0.0
    if nonlinear:
        r = grid.r
        dens = np.zeros(grid.n)
        dens[1:] = v[1:] ** 6 / r[1:] ** 4
        sextic = float(np.dot(w, dens)) / 6.0
    total = kinetic + gradient + potential + sextic
    return EnergyReport(kinetic, gradient, potential, sextic, total, total - kinetic)


def energy(state: ReducedState, V) -> EnergyReport:
    """Conserved energy E and static functional J of a reduced state."""
    from .potentials import evaluate

    return energy_parts(state.grid, state.v, state.vt, evaluate(V, state.grid.r), True)


def _region_weights(grid: RadialGrid, lo: int, hi: int) -> np.ndarray:
    w = np.zeros(grid.n)
    if hi > lo:
        w[lo : hi + 1] = grid.h
        w[lo] = w[hi] = 0.5 * grid.h
    return w


def exterior_energy(state: ReducedState, R: float) -> float:
    """int_{r >= R} (d_r v)^2 + (d_t v)^2 dr, R snapped to the nearest node."""
    grid = state.grid
    if R < 0:
        raise ValueError("R must be nonnegative")
    if R > grid.r_max + 1e-12 * max(1.0, grid.r_max):
        raise ValueError(f"R = {R} exceeds r_max = {grid.r_max}")
    j, _ = grid.snap(R)
    dv = radial_derivative(state.v, grid.h)
    w = _region_weights(grid, j, grid.n - 1)
    return float(np.dot(w, dv * dv + state.vt * state.vt))


def annulus_distance(s1: ReducedState, s2: ReducedState, a: float, b: float) -> float:
    """Reduced H^1 x L^2 distance of s1 - s2 restricted to [a, b]."""
    _same_grid(s1, s2)
    grid = s1.grid
    if not (0 <= a < b):
        raise ValueError(f"need 0 <= a < b, got a={a}, b={b}")
    lo, _ = grid.snap(a)
    hi, _ = grid.snap(min(b, grid.r_max))
    dv = radial_derivative(s1.v - s2.v, grid.h)
    dvt = s1.vt - s2.vt
    w = _region_weights(grid, lo, hi)
    return float(np.sqrt(np.dot(w, dv * dv + dvt * dvt)))


def support_radius(state: ReducedState, threshold: float) -> float:
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    m = np.maximum(np.abs(state.v), np.abs(state.vt))
    peak = m.max()
    if peak == 0.0:
        return 0.0
    idx = np.nonzero(m > threshold * peak)[0]
    return float(idx[-1] * state.grid.h)
