"""Leapfrog evolution of v_tt = v_rr + a(t, r) v - v^5 / r^4 with v(t, 0) = 0."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .potentials import Potential, evaluate
from .radial import (
    RadialGrid,
    ReducedState,
    annulus_distance,
    energy_parts,
    lift,
    support_radius,
    trapezoid_weights,
)


class Variant(enum.Enum):
    ZERO = "zero"
    STATIC = "static"
    TRUNCATED = "truncated"
    LINEARIZED = "linearized"


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """The coefficient a(t, r) multiplying v.

    STATIC: V(r).  TRUNCATED: V(max(r, |t - t_n|)).  LINEARIZED: V - 5 u_c^4,
    meant for the linear flow of a perturbation h around a steady state u_c.
    """

    variant: Variant
    V: Potential | None = None
    t_n: float = 0.0
    u_c: Callable | None = None

    @classmethod
    def zero(cls) -> "CoefficientField":
        return cls(Variant.ZERO)

    @classmethod
    def static(cls, V: Potential) -> "CoefficientField":
        return cls(Variant.STATIC, V)

    @classmethod
    def truncated(cls, V: Potential, t_n: float) -> "CoefficientField":
        return cls(Variant.TRUNCATED, V, float(t_n))

    @classmethod
    def linearized(cls, V: Potential, u_c: Callable) -> "CoefficientField":
        return cls(Variant.LINEARIZED, V, u_c=u_c)

    def static_nodes(self, grid: RadialGrid) -> np.ndarray:
        r = grid.r
        if self.variant is Variant.ZERO:
            return np.zeros(grid.n)
        a = np.asarray(evaluate(self.V, r), dtype=float)
        if self.variant is Variant.LINEARIZED:
            a = a - 5.0 * np.asarray(self.u_c(r), dtype=float) ** 4
        return a

    def cap(self, t: float) -> tuple[float, float]:
        """(radius, value): nodes with r < radius see value instead of a(r)."""
        if self.variant is not Variant.TRUNCATED:
            return -1.0, 0.0
        rc = abs(t - self.t_n)
        return rc, float(evaluate(self.V, rc))

    def nodes(self, grid: RadialGrid, t: float) -> np.ndarray:
        a = self.static_nodes(grid)
        rc, vc = self.cap(t)
        if rc > 0:
            a = np.where(grid.r < rc, vc, a)
        return a

    def reflected(self) -> "CoefficientField":
        """Coefficient seen by w(s) = v(-s)."""
        if self.variant is Variant.TRUNCATED:
            return CoefficientField(Variant.TRUNCATED, self.V, -self.t_n)
        return self


@dataclass(frozen=True)
class SolverConfig:
    h: float = 0.01
    cfl: float = 0.5
    T: float = 10.0
    r_max: float | None = None  # fixed outer radius; None means causal padding
    margin: float = 2.0
    nonlinear: bool = True
    blowup_cap: float = 1e6
    energy_drift_tol: float = 1e-4
    support_threshold: float = 1e-12

    def __post_init__(self):
        if not (0 < self.cfl <= 0.95 or (self.cfl == 1.0 and not self.nonlinear)):
            raise ValueError(f"cfl must lie in (0, 0.95] (or equal 1 for linear runs), got {self.cfl}")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if not self.T >= 0:
            raise ValueError("T must be nonnegative")

    @property
    def dt(self) -> float:
        return self.cfl * self.h


class Status(enum.Enum):
    COMPLETED = "completed"
    BLOWUP = "blowup"


@dataclass(eq=False)
class Trajectory:
    """Snapshots in order of elapsed time; ``direction`` is +1 or -1."""

    times: np.ndarray
    states: list[ReducedState]
    energies: np.ndarray
    status: Status = Status.COMPLETED
    blowup_at: tuple[float, float] | None = None
    direction: int = 1
    dt: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def elapsed(self) -> np.ndarray:
        return np.abs(self.times - self.times[0])

    def at(self, t: float) -> ReducedState:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 0.5 * self.dt + 1e-12:
            raise KeyError(f"no snapshot at t = {t}")
        return self.states[k]

    def energy_drift(self) -> np.ndarray:
        e0 = self.energies[0]
        return (self.energies - e0) / abs(e0) if e0 != 0 else self.energies - e0


class BlowUpError(RuntimeError):
    pass


def _prepare_grid(initial: ReducedState, cfg: SolverConfig) -> ReducedState:
    if not np.isclose(initial.grid.h, cfg.h, rtol=1e-12, atol=0):
        raise ValueError(f"initial grid spacing {initial.grid.h} differs from cfg.h = {cfg.h}")
    if cfg.r_max is not None:
        need = cfg.r_max
    else:
        rho = support_radius(initial, cfg.support_threshold)
        need = rho + cfg.T + cfg.margin
    if need <= initial.grid.r_max + 1e-9:
        if cfg.r_max is not None:
            return initial.regrid(RadialGrid.covering(cfg.h, need))
        return initial
    return initial.regrid(RadialGrid.covering(cfg.h, need), cfg.support_threshold)


def evolve(
    initial: ReducedState,
    coeff: CoefficientField,
    cfg: SolverConfig,
    snapshot_times: Sequence[float] | None = None,
) -> Trajectory:
    """Leapfrog run from initial.t through the requested snapshot times.

    Times on the far side of initial.t are reached by evolving the reflected
    data (v, -v_t) forward and reflecting back.  Snapshot times are rounded
    to whole steps; the recorded times are the rounded ones.
    """
    t0 = initial.t
    if snapshot_times is None:
        snapshot_times = [t0 + cfg.T]
    rel = np.asarray(snapshot_times, dtype=float) - t0
    if np.any(rel > 1e-12) and np.any(rel < -1e-12):
        raise ValueError("snapshot times must lie on one side of the initial time")
    direction = -1 if np.any(rel < -1e-12) else 1
    if coeff.variant is Variant.LINEARIZED and cfg.nonlinear:
        raise ValueError("the linearized coefficient is for the linear flow; set nonlinear=False")
    state = _prepare_grid(initial, cfg)
    if cfg.cfl > 0.95 and np.min(coeff.static_nodes(state.grid)) < 0:
        # the grid-scale mode is only marginally stable at cfl = 1
        raise ValueError("cfl = 1 needs a nonnegative coefficient")
    if direction < 0:
        state = ReducedState(state.grid, state.v, -state.vt, -t0)
        coeff_run = coeff.reflected()
    else:
        coeff_run = coeff
    dt = cfg.dt
    steps = np.unique(np.rint(np.abs(rel) / dt).astype(np.int64))
    traj = _run(state, coeff_run, cfg, steps)
    if direction < 0:
        traj.states = [ReducedState(s.grid, s.v, -s.vt, -s.t, s.blown_up) for s in traj.states]
        traj.times = -traj.times
        if traj.blowup_at is not None:
            traj.blowup_at = (-traj.blowup_at[0], traj.blowup_at[1])
        traj.direction = -1
    traj.meta["coefficient"] = coeff.variant.value
    return traj


def _run(state: ReducedState, coeff: CoefficientField, cfg: SolverConfig, steps: np.ndarray) -> Trajectory:
    grid = state.grid
    r = grid.r
    n = grid.n
    dt = cfg.dt
    h = grid.h
    t0 = state.t
    nl = bool(cfg.nonlinear)
    a = coeff.static_nodes(grid)
    r4inv = np.zeros(n)
    r4inv[1:] = 1.0 / r[1:] ** 4

    def energy_at(v, vt, t):
        return energy_parts(grid, v, vt, coeff.nodes(grid, t), nl).total_E

    def caps(k_from, count):
        cr = np.full(count, -1.0)
        cv = np.zeros(count)
        if coeff.variant is Variant.TRUNCATED:
            for i in range(count):
                cr[i], cv[i] = coeff.cap(t0 + (k_from + i) * dt)
        return cr, cv

    def advance(vm, v, k_from, count):
        if count <= 0:
            return vm, v, 0, False
        cr, cv = caps(k_from, count)
        return K.leapfrog_loop(vm, v, a, r, r4inv, cr, cv, nl, dt, h, int(count), cfg.blowup_cap)

    times = [t0]
    states = [state]
    energies = [energy_at(state.v, state.vt, t0)]
    # Taylor start: v^1 = v^0 + dt v_t + dt^2/2 acc(v^0)
    v0 = state.v
    acc = np.zeros(n)
    acc[1:-1] = (v0[2:] - 2.0 * v0[1:-1] + v0[:-2]) / (h * h) + coeff.nodes(grid, t0)[1:-1] * v0[1:-1]
    if nl:
        acc[1:-1] -= v0[1:-1] ** 5 * r4inv[1:-1]
    v1 = v0 + dt * state.vt + 0.5 * dt * dt * acc
    v1[0] = 0.0
    v1[-1] = v0[-1]
    vm, v, k = v0.copy(), v1, 1  # (v^{k-1}, v^k)
    status = Status.COMPLETED
    blow = None
    for K_snap in steps:
        if K_snap == 0:
            continue
        vm, v, done, blew = advance(vm, v, k, K_snap - k)
        k += done
        if not blew:
            prev = vm
            vm, v, done, blew = advance(vm, v, k, 1)
            k += done
        if blew:
            status = Status.BLOWUP
            j = int(np.nanargmax(np.abs(np.where(np.isfinite(v), v, np.inf))))
            blow = (t0 + k * dt, float(r[j]))
            break
        # (vm, v) = (v^K, v^{K+1}); centred velocity at K
        vt = (v - prev) / (2.0 * dt)
        vt[0] = 0.0
        tK = t0 + K_snap * dt
        snap = ReducedState(grid, vm.copy(), vt, tK)
        times.append(tK)
        states.append(snap)
        energies.append(energy_at(snap.v, snap.vt, tK))
    return Trajectory(np.array(times), states, np.array(energies), status, blow, 1, dt, {"grid_n": n, "h": h})


def discrete_energy(state: ReducedState, coeff: CoefficientField, nonlinear: bool = True) -> float:
    return energy_parts(state.grid, state.v, state.vt, coeff.nodes(state.grid, state.t), nonlinear).total_E


def l10_norm(state: ReducedState) -> float:
    """(int |u|^10 r^2 dr)^(1/10), per steradian."""
    u = lift(state).u
    r = state.grid.r
    w = trapezoid_weights(state.grid.n, state.grid.h)
    return float(np.dot(w, np.abs(u) ** 10 * r * r)) ** 0.1


def spacetime_norm(traj: Trajectory, t_window: tuple[float, float]) -> float:
    """Discrete L^5_t L^10_x over the snapshots inside the window (trapezoid in t)."""
    lo, hi = sorted(t_window)
    tol = 0.5 * traj.dt + 1e-12
    idx = [k for k, t in enumerate(traj.times) if lo - tol <= t <= hi + tol]
    if len(idx) < 2:
        raise ValueError("window needs at least two snapshots")
    ts = traj.times[idx]
    order = np.argsort(ts)
    ts = ts[order]
    vals = np.array([l10_norm(traj.states[idx[i]]) ** 5 for i in order])
    return float(np.sum(0.5 * np.diff(ts) * (vals[1:] + vals[:-1]))) ** 0.2


def energy_distance(s1: ReducedState, s2: ReducedState, a: float = 0.0, b: float | None = None) -> float:
    b = s1.grid.r_max if b is None else b
    return annulus_distance(s1, s2, a, b)


def _check(traj: Trajectory):
    if traj.status is Status.BLOWUP:
        raise BlowUpError(f"blow-up at (t, r) = {traj.blowup_at}")


@dataclass
class DependenceReport:
    eps: list[float]
    distance: list[float]
    ratio: list[float]
    ratio_quotients: list[float]
    bounded: bool
    interior_distance: list[float]


def continuous_dependence_experiment(
    base: ReducedState,
    perturbation: ReducedState,
    coeff: CoefficientField,
    cfg: SolverConfig,
    eps_list: Sequence[float] = (1e-2, 1e-3, 1e-4),
    n_snap: int = 10,
    interior: float | None = None,
) -> DependenceReport:
    """sup_t distance between base and base + eps * perturbation runs, per eps."""
    times = np.linspace(base.t, base.t + cfg.T, n_snap + 1)
    # pin the grid so every run shares it
    rho = max(support_radius(base, cfg.support_threshold), support_radius(perturbation, cfg.support_threshold))
    r_max = cfg.r_max if cfg.r_max is not None else max(base.grid.r_max, rho + cfg.T + cfg.margin)
    pinned = SolverConfig(**{**cfg.__dict__, "r_max": r_max})
    ref = evolve(base, coeff, pinned, times)
    _check(ref)
    dist, ratio, inner = [], [], []
    for eps in eps_list:
        pert = evolve(base + perturbation.scaled(eps), coeff, pinned, times)
        _check(pert)
        d = max(energy_distance(x, y) for x, y in zip(ref.states, pert.states))
        dist.append(d)
        ratio.append(d / eps if eps else 0.0)
        if interior is not None:
            inner.append(max(energy_distance(x, y, 0.0, interior) for x, y in zip(ref.states, pert.states)))
    quot = [ratio[i + 1] / ratio[i] for i in range(len(ratio) - 1) if ratio[i] > 0]
    bounded = all(0.5 <= q <= 2.0 for q in quot)
    return DependenceReport(list(eps_list), dist, ratio, quot, bounded, inner)


@dataclass
class ScaleReport:
    lams: list[float]
    distance: list[float]
    decays_toward_ends: bool


def scale_robustness_experiment(
    profile: Callable,
    lams: Sequence[float],
    V: Potential,
    cfg: SolverConfig,
    n_snap: int = 20,
) -> ScaleReport:
    """d(lam) = sup_t distance between the V-flow and the free nonlinear flow of u_lam.

    u_lam(r) = lam^-1/2 profile(r / lam).  Grid spacing and horizon scale
    with lam (h -> lam h, T -> lam T), so every run resolves its data alike.
    """
    lams = sorted(float(x) for x in lams)
    if lams[-1] / lams[0] < 100:
        raise ValueError("lambda list must span at least two decades")
    d_list = []
    for lam in lams:
        h = lam * cfg.h
        T = lam * cfg.T
        margin = lam * cfg.margin
        probe = RadialGrid.covering(h, lam * 40.0)
        u = lam**-0.5 * np.asarray(profile(probe.r / lam), dtype=float)
        v = probe.r * u
        v[0] = 0.0
        init = ReducedState(probe, v, np.zeros(probe.n))
        c = SolverConfig(**{**cfg.__dict__, "h": h, "T": T, "margin": margin, "r_max": None})
        rho = support_radius(init, c.support_threshold)
        c = SolverConfig(**{**c.__dict__, "r_max": max(rho + T + margin, probe.r_max)})
        times = np.linspace(0.0, T, n_snap + 1)
        with_v = evolve(init, CoefficientField.static(V), c, times)
        free = evolve(init, CoefficientField.zero(), c, times)
        _check(with_v)
        _check(free)
        d_list.append(max(energy_distance(x, y) for x, y in zip(with_v.states, free.states)))
    k = int(np.argmax(d_list))
    ok = 0 < k < len(lams) - 1 or len(lams) < 3
    ok = ok and all(d_list[i] <= d_list[i + 1] for i in range(k)) and all(
        d_list[i] >= d_list[i + 1] for i in range(k, len(lams) - 1)
    )
    return ScaleReport(lams, d_list, bool(ok))


@dataclass
class SupportReport:
    times: list[float]
    rho0: float
    rho_forward: list[float]
    rho_backward: list[float]
    saturates_forward: bool
    saturates_backward: bool
    bounded_forward: bool
    bounded_backward: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return (self.saturates_forward or self.saturates_backward) and self.bounded_forward and self.bounded_backward


def support_growth_experiment(
    initial: ReducedState,
    coeff: CoefficientField,
    cfg: SolverConfig,
    times: Sequence[float] | None = None,
    threshold: float = 1e-8,
) -> SupportReport:
    """Track rho(t) in both directions for the linear flow of compact data."""
    if cfg.nonlinear:
        raise ValueError("support growth is a linear-flow experiment; set nonlinear=False")
    if times is None:
        times = np.linspace(0.0, cfg.T, 11)[1:]
    times = [float(t) for t in times]
    rho0 = support_radius(initial, threshold)
    tol = 2.0 * cfg.h
    fwd = evolve(initial, coeff, cfg, [initial.t + t for t in times])
    bwd = evolve(initial, coeff, cfg, [initial.t - t for t in times])
    _check(fwd)
    _check(bwd)
    rf = [support_radius(s, threshold) for s in fwd.states[1:]]
    rb = [support_radius(s, threshold) for s in bwd.states[1:]]
    tf = fwd.elapsed[1:]
    tb = bwd.elapsed[1:]
    sat_f = all(abs(x - rho0 - t) <= tol for x, t in zip(rf, tf))
    sat_b = all(abs(x - rho0 - t) <= tol for x, t in zip(rb, tb))
    bd_f = all(x <= rho0 + t + tol for x, t in zip(rf, tf))
    bd_b = all(x <= rho0 + t + tol for x, t in zip(rb, tb))
    return SupportReport(list(map(float, tf)), rho0, rf, rb, sat_f, sat_b, bd_f, bd_b, tol)
