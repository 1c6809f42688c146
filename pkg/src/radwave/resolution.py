"""Free-radiation extraction, exterior mismatch, distance to the steady set, channel meters."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import solve_banded

from . import dalembert
from .evolver import CoefficientField, SolverConfig, Trajectory, evolve, BlowUpError, Status
from .potentials import Potential, evaluate
from .radial import RadialGrid, ReducedState, annulus_distance, exterior_energy, radial_derivative
from .steady import Census, SteadyState

# absolute floor of the exterior-energy meters; a channel counts at 10x this
METER_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class RadiationField:
    """Outgoing profile f'(s) read off one snapshot; zero outside the window."""

    pair: dalembert.CharacteristicPair
    T_ex: float
    window: tuple[float, float]
    incoming_residual: float
    outgoing_norm: float

    @property
    def quality(self) -> float:
        """incoming / outgoing L2 ratio on the window (small is good)."""
        return self.incoming_residual / self.outgoing_norm if self.outgoing_norm > 0 else np.inf

    def evaluate(self, t: float, grid: RadialGrid) -> ReducedState:
        """The free wave U^L(t) = f(r - t) - f(-r - t) in reduced form."""
        need = abs(t) + grid.r_max
        pair = self.pair.padded(need) if need > self.pair.L else self.pair
        return dalembert.evolve_free(pair, t, grid)


def extract_radiation(
    traj: Trajectory,
    T_ex: float,
    window: tuple[float, float] | None = None,
    background: ReducedState | None = None,
) -> RadiationField:
    """Read f'(r - T_ex) = (d_r v - d_t v) / 2 off the snapshot at T_ex on the window.

    ``background`` is a static state removed first; without it half of its
    slowly decaying derivative is taken for outgoing radiation.
    """
    T_end = float(np.max(traj.times))
    if T_ex < 0.75 * T_end - 1e-9:
        raise ValueError(f"extraction time {T_ex} is earlier than 3/4 of the run ({T_end})")
    state = traj.at(T_ex)
    grid = state.grid
    if window is None:
        window = (0.5 * T_ex, grid.r_max)
    ra, rb = window
    if ra < 0 or rb > grid.r_max + 1e-9 or rb <= ra:
        raise ValueError(f"window {window} outside the grid [0, {grid.r_max}]")
    ja, _ = grid.snap(ra)
    jb, _ = grid.snap(rb)
    v = state.v if background is None else state.v - background.v
    dv = radial_derivative(v, grid.h)
    out = 0.5 * (dv - state.vt)
    inc = 0.5 * (dv + state.vt)
    w = np.zeros(grid.n)
    w[ja : jb + 1] = grid.h
    w[ja] = w[jb] = 0.5 * grid.h
    inc_norm = float(np.sqrt(np.dot(w, inc * inc)))
    out_norm = float(np.sqrt(np.dot(w, out * out)))
    # f'(s) at s = r - T_ex on the node grid s_k = k h (T_ex need not be a node time)
    h = grid.h
    K = int(np.ceil((grid.r_max + abs(state.t)) / h)) + 2
    s_nodes = h * np.arange(-K, K + 1)
    fp = np.interp(s_nodes + state.t, grid.r[ja : jb + 1], out[ja : jb + 1], left=0.0, right=0.0)
    pair = dalembert.CharacteristicPair(h, fp, fp[::-1].copy())
    return RadiationField(pair, float(state.t), (ja * h, jb * h), inc_norm, out_norm)


def exterior_mismatch(traj: Trajectory, rad: RadiationField, A: float, times: Sequence[float]) -> np.ndarray:
    """annulus distance between u(t) and U^L(t) on r in [t - A, r_max], per time."""
    out = []
    for t in times:
        if t - A < 0:
            raise ValueError(f"t - A must be nonnegative, got t={t}, A={A}")
        s = traj.at(t)
        free = rad.evaluate(s.t, s.grid)
        out.append(annulus_distance(s, free, t - A, s.grid.r_max))
    return np.array(out)


def steady_reduced(st: SteadyState, grid: RadialGrid, t: float = 0.0) -> ReducedState:
    v = grid.r * st.u_at(grid.r)
    v[0] = 0.0
    return ReducedState(grid, v, np.zeros(grid.n), t)


def grid_steady(st: SteadyState, grid: RadialGrid, V: Potential, tol: float = 1e-13, max_iter: int = 30) -> ReducedState:
    """The steady state of the solver's own three-point operator, by Newton from the profile.

    Same outer value as the profile.  Comparing snapshots with this instead of
    the sampled profile removes the O(h^2) static offset of the scheme.
    """
    v = steady_reduced(st, grid).v.copy()
    if st.a == 0.0:
        return ReducedState(grid, v, np.zeros(grid.n))
    h2 = grid.h**2
    r = grid.r[1:-1]
    a = np.asarray(evaluate(V, r), dtype=float)
    for _ in range(max_iter):
        vi = v[1:-1]
        F = (v[2:] - 2.0 * vi + v[:-2]) / h2 + a * vi - vi**5 / r**4
        ab = np.empty((3, r.size))
        ab[0, :] = 1.0 / h2
        ab[2, :] = 1.0 / h2
        ab[1, :] = -2.0 / h2 + a - 5.0 * vi**4 / r**4
        dv = solve_banded((1, 1), ab, -F)
        v[1:-1] += dv
        if np.max(np.abs(dv)) <= tol * max(1.0, np.max(np.abs(v))):
            return ReducedState(grid, v, np.zeros(grid.n))
    raise RuntimeError("Newton iteration for the grid steady state did not converge")


def distance_to_sigma(state: ReducedState, census: Census, R_int: float,
                      V: Potential | None = None) -> tuple[float, str, float]:
    """(distance, label, a) of the census member closest to the state on [0, R_int].

    With ``V`` the members are replaced by their grid steady states.
    """
    best = (np.inf, "", 0.0)
    for st in census.all_states():
        ref = steady_reduced(st, state.grid, state.t) if V is None else grid_steady(st, state.grid, V)
        d = annulus_distance(state, ref, 0.0, R_int)
        if d < best[0]:
            best = (d, st.label or f"a={st.a:.6g}", st.a)
    return best


@dataclass
class ChannelMeter:
    delta_plus: float
    delta_minus: float
    R: float
    T_probe: float
    times: list[float]
    exterior_plus: list[float]
    exterior_minus: list[float]

    @property
    def best(self) -> float:
        return max(self.delta_plus, self.delta_minus)


def channel_meter(
    initial: ReducedState,
    V: Potential,
    R: float,
    T_probe: float,
    cfg: SolverConfig,
    n_samples: int = 20,
) -> ChannelMeter:
    """min over sampled t of the energy outside r >= R + |t|, forward and backward."""
    coeff = CoefficientField.static(V)
    ts = np.linspace(0.0, T_probe, n_samples + 1)
    c = SolverConfig(**{**cfg.__dict__, "T": T_probe})
    fwd = evolve(initial, coeff, c, initial.t + ts)
    bwd = evolve(initial, coeff, c, initial.t - ts)
    for tr in (fwd, bwd):
        if tr.status is Status.BLOWUP:
            raise BlowUpError(f"blow-up at {tr.blowup_at}")
    ep = [exterior_energy(s, R + abs(s.t - initial.t)) for s in fwd.states]
    em = [exterior_energy(s, R + abs(s.t - initial.t)) for s in bwd.states]
    return ChannelMeter(min(ep), min(em), R, T_probe, [float(t) for t in ts], ep, em)


def steady_tail(st: SteadyState, R: float, h: float = 0.01, r_max: float | None = None) -> float:
    """Exterior energy of the static state (u_c, 0) outside R: the meter's noise floor."""
    r_max = max(R + 10.0, 2 * R) if r_max is None else r_max
    grid = RadialGrid.covering(h, r_max)
    return exterior_energy(steady_reduced(st, grid), R)


@dataclass
class ResolutionReport:
    times: list[float]
    mismatch: list[float]
    distance: list[float]
    argmin: list[str]
    selected: str
    initial_perturbation: float
    T_ex: float
    extraction_quality: float
    delta_plus: float | None = None
    delta_minus: float | None = None
    checks: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def resolution_experiment(
    initial: ReducedState,
    V: Potential,
    cfg: SolverConfig,
    census: Census,
    ladder: Sequence[float] = (10.0, 20.0, 30.0, 40.0),
    A_buf: float = 5.0,
    A_mis: float = 5.0,
    slack: float = 0.10,
    final_fraction: float = 0.25,
    meter: tuple[float, float] | None = None,
) -> ResolutionReport:
    """Distance of u(T_k) - U^L_k(T_k) to the steady set on [0, T_k - A_buf].

    U^L_k is read off the snapshot at T_k itself (outgoing part on
    [T_k / 2, r_max], steady component removed), so each rung uses the best
    free wave available at that time.  The exterior mismatch series uses the
    single free wave extracted at the last rung.  ``meter = (R, T_probe)``
    also records the channel meters of the initial data.
    """
    ladder = sorted(float(t) for t in ladder)
    T = ladder[-1]
    t0 = initial.t
    run_cfg = SolverConfig(**{**cfg.__dict__, "T": T})
    traj = evolve(initial, CoefficientField.static(V), run_cfg, [t0] + [t0 + t for t in ladder])
    if traj.status is Status.BLOWUP:
        raise BlowUpError(f"blow-up at {traj.blowup_at}")
    d0, _, _ = distance_to_sigma(initial, census, initial.grid.r_max, V)
    last = traj.at(t0 + T)
    _, _, a_sel = distance_to_sigma(last, census, T - A_buf, V)
    bg = grid_steady(census.find(a_sel, 0.0), last.grid, V)
    times = [t0 + t for t in ladder]
    dist, arg = [], []
    for k, t in enumerate(times):
        upto = k + 2  # snapshots t0 .. T_k
        sub = Trajectory(traj.times[:upto], traj.states[:upto], traj.energies[:upto], dt=traj.dt)
        rad_k = extract_radiation(sub, t, background=bg)
        s = traj.at(t)
        d, lab, _ = distance_to_sigma(s - rad_k.evaluate(s.t, s.grid), census, t - t0 - A_buf, V)
        dist.append(d)
        arg.append(lab)
    rad = extract_radiation(traj, t0 + T, background=bg)
    mism = exterior_mismatch(traj, rad, A_mis, times)
    warnings = []
    if any(dist[k + 1] > dist[k] * (1 + slack) for k in range(len(dist) - 1)):
        warnings.append("distance ladder increases beyond the slack")
    if rad.quality > 0.1:
        warnings.append(f"extraction quality {rad.quality:.3g}: large incoming residual on the window")
    checks = {
        "nonincreasing": all(dist[k + 1] <= dist[k] * (1 + slack) for k in range(len(dist) - 1)),
        "final_fraction": dist[-1] <= final_fraction * d0,
        "mismatch_decreasing": bool(len(mism) < 2 or mism[-1] < mism[-2]),
    }
    rep = ResolutionReport(
        [float(t) for t in times], [float(m) for m in mism], [float(d) for d in dist], arg, arg[-1], float(d0),
        rad.T_ex, rad.quality, checks=checks, warnings=warnings,
    )
    if meter is not None:
        cm = channel_meter(initial, V, meter[0], meter[1], SolverConfig(**{**cfg.__dict__, "T": meter[1]}))
        rep.delta_plus, rep.delta_minus = cm.delta_plus, cm.delta_minus
    return rep
