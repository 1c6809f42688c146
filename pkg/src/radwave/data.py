"""Initial data: compact bumps, steady profiles plus perturbations, seeded random data."""
from __future__ import annotations

import numpy as np

from .radial import RadialGrid, ReducedState, radial_derivative, trapezoid_weights
from .steady import SteadyState


def smooth_bump(r: np.ndarray, r1: float, r2: float, k: int = 3) -> np.ndarray:
    """((r - r1)(r2 - r))^k normalised to peak 1 on [r1, r2], zero elsewhere."""
    mid = 0.25 * (r2 - r1) ** 2
    x = np.where((r > r1) & (r < r2), (r - r1) * (r2 - r), 0.0)
    return (x / mid) ** k


def reduced_norm(v: np.ndarray, vt: np.ndarray, h: float) -> float:
    """sqrt(int (d_r v)^2 + v_t^2 dr) with the same derivative as the energies."""
    w = trapezoid_weights(v.size, h)
    dv = radial_derivative(v, h)
    return float(np.sqrt(np.dot(w, dv * dv + vt * vt)))


def bump_state(grid: RadialGrid, r1: float, r2: float, amp: float = 1.0, k: int = 3,
               velocity: float = 0.0, t: float = 0.0) -> ReducedState:
    """Compact bump in v = r u; ``velocity`` = -1 makes it purely outgoing, +1 incoming."""
    v = amp * smooth_bump(grid.r, r1, r2, k)
    v[0] = 0.0
    vt = velocity * radial_derivative(v, grid.h)
    return ReducedState(grid, v, vt, t)


def outgoing_bump(grid: RadialGrid, r1: float, r2: float, amp: float = 1.0, k: int = 3) -> ReducedState:
    return bump_state(grid, r1, r2, amp, k, velocity=-1.0)


def steady_plus_bump(st: SteadyState, grid: RadialGrid, r1: float, r2: float, norm: float,
                     k: int = 3, velocity: float = 0.0) -> ReducedState:
    """(u_c, 0) plus a compact bump scaled to the requested reduced norm."""
    b = bump_state(grid, r1, r2, 1.0, k, velocity)
    scale = norm / reduced_norm(b.v, b.vt, grid.h)
    v = grid.r * st.u_at(grid.r) + scale * b.v
    v[0] = 0.0
    return ReducedState(grid, v, scale * b.vt)


def random_bumps(rng: np.random.Generator, grid: RadialGrid, n_bumps: tuple[int, int] = (1, 3),
                 mu: tuple[float, float] = (1.0, 4.0), sigma: tuple[float, float] = (0.25, 1.0),
                 amp: tuple[float, float] = (-1.0, 1.0), with_velocity: bool = True) -> ReducedState:
    """Sum of a (r / mu)^2 exp(-(r - mu)^2 / sigma^2) profiles in u, peak about a.

    Smooth at the origin and below 1e-12 past mu + 5.3 sigma.  The velocity,
    when drawn, is an independent sum of the same kind.
    """
    def draw():
        m = int(rng.integers(n_bumps[0], n_bumps[1] + 1))
        u = np.zeros(grid.n)
        for _ in range(m):
            c = rng.uniform(*mu)
            s = rng.uniform(*sigma)
            u += rng.uniform(*amp) * (grid.r / c) ** 2 * np.exp(-((grid.r - c) ** 2) / s**2)
        return grid.r * u

    v = draw()
    vt = draw() if with_velocity else np.zeros(grid.n)
    v[0] = vt[0] = 0.0
    return ReducedState(grid, v, vt)


def random_compact(rng: np.random.Generator, grid: RadialGrid, r_hi: float = 5.0) -> ReducedState:
    """Random smooth compactly supported (v, v_t): a few polynomial bumps inside (0, r_hi)."""
    def draw():
        v = np.zeros(grid.n)
        for _ in range(int(rng.integers(1, 4))):
            a, b = np.sort(rng.uniform(0.0, r_hi, 2))
            if b - a < 0.2:
                b = min(a + 0.2, r_hi)
            v += rng.uniform(-1.0, 1.0) * smooth_bump(grid.r, a, b, 3)
        v[0] = 0.0
        return v

    return ReducedState(grid, draw(), draw())
