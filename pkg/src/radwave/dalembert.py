"""Exact free radial waves through characteristics.

A free radial wave in reduced form is v(t, r) = f(r - t) - f(-r - t).  The
profile f' is read off the odd extension of the data, and everything else
(evolution, exterior energies, channel sweeps) is a shift of f'.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .radial import RadialGrid, ReducedState, radial_derivative


@dataclass(frozen=True, eq=False)
class CharacteristicPair:
    """Outgoing and incoming derivative profiles on s_k = (k - K) h, |s| <= L = K h."""

    h: float
    fprime: np.ndarray
    gprime: np.ndarray

    def __post_init__(self):
        m = self.fprime.shape[0]
        if m % 2 != 1 or self.gprime.shape != self.fprime.shape:
            raise ValueError("profiles must share an odd, symmetric sample count")
        if not np.all(np.isfinite(self.fprime)):
            raise ValueError("non-finite characteristic profile")

    @property
    def K(self) -> int:
        return (self.fprime.shape[0] - 1) // 2

    @property
    def L(self) -> float:
        return self.K * self.h

    @property
    def s(self) -> np.ndarray:
        return self.h * np.arange(-self.K, self.K + 1)

    def symmetry_defect(self) -> float:
        """max |g'(s) - f'(-s)|; zero for pairs built by :func:`split`."""
        return float(np.max(np.abs(self.gprime - self.fprime[::-1])))

    def padded(self, L: float) -> "CharacteristicPair":
        """Zero-extend the profiles to |s| <= L (compactly supported data)."""
        K = int(np.ceil(L / self.h - 1e-9))
        if K <= self.K:
            return self
        pad = K - self.K
        z = np.zeros(pad)
        return CharacteristicPair(
            self.h, np.concatenate([z, self.fprime, z]), np.concatenate([z, self.gprime, z])
        )

    def reflected(self) -> "CharacteristicPair":
        """Profiles of the time-reflected data (v, -v_t)."""
        return CharacteristicPair(self.h, self.gprime.copy(), self.fprime.copy())

    def total_energy(self) -> float:
        """int_0^inf (d_r v)^2 + (d_t v)^2 dr = 2 int f'^2, conserved."""
        return 2.0 * float(np.dot(_trap(self.fprime.shape[0], self.h), self.fprime**2))


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    BOTH = "both"
    NEITHER = "neither"


@dataclass(frozen=True)
class ChannelResult:
    direction: Direction
    margin_forward: float
    margin_backward: float
    e0: float
    e_plus: float
    e_minus: float
    R_snapped: float
    t_sweep: float

    @property
    def margin(self) -> float:
        return max(self.margin_forward, self.margin_backward)


def _trap(m: int, h: float) -> np.ndarray:
    w = np.full(m, h)
    w[0] = w[-1] = 0.5 * h
    return w


def split(state: ReducedState, L: float | None = None) -> CharacteristicPair:
    """Characteristic profiles of (v, v_t), zero-padded to |s| <= L if asked."""
    if state.v[0] != 0.0:
        raise ValueError("split needs v[0] = 0")
    h = state.grid.h
    dv = radial_derivative(state.v, h)
    # odd extension: v' is even, v_t is odd
    dv_ext = np.concatenate([dv[:0:-1], dv])
    vt_ext = np.concatenate([-state.vt[:0:-1], state.vt])
    fp = 0.5 * (dv_ext - vt_ext)
    gp = 0.5 * (dv_ext + vt_ext)
    pair = CharacteristicPair(h, fp, gp)
    return pair.padded(L) if L is not None else pair


def profile(pair: CharacteristicPair) -> np.ndarray:
    """f on the s-grid by cumulative trapezoid with f(-L) = 0."""
    fp = pair.fprime
    f = np.zeros_like(fp)
    f[1:] = np.cumsum(0.5 * pair.h * (fp[1:] + fp[:-1]))
    return f


def evolve_free(pair: CharacteristicPair, t: float, grid: RadialGrid) -> ReducedState:
    if abs(t) + grid.r_max > pair.L + 1e-9 * max(1.0, pair.L):
        raise ValueError(f"|t| + r_max = {abs(t) + grid.r_max} exceeds profile half-width L = {pair.L}")
    if not np.isclose(grid.h, pair.h, rtol=1e-12, atol=0):
        raise ValueError("grid spacing must match the profile spacing")
    s = pair.s
    f = profile(pair)
    r = grid.r
    out_arg = r - t
    in_arg = -r - t
    v = np.interp(out_arg, s, f) - np.interp(in_arg, s, f)
    vt = -np.interp(out_arg, s, pair.fprime) + np.interp(in_arg, s, pair.fprime)
    v[0] = 0.0
    vt[0] = 0.0
    return ReducedState(grid, v, vt, t)


def free_derivatives(pair: CharacteristicPair, t: float, grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    """(d_r v, d_t v) of the free wave at time t, straight from f'."""
    s = pair.s
    fo = np.interp(grid.r - t, s, pair.fprime, left=0.0, right=0.0)
    fi = np.interp(-grid.r - t, s, pair.fprime, left=0.0, right=0.0)
    return fo + fi, fi - fo


class _Tails:
    """Trapezoid tail integrals of f'^2 at node resolution.

    upper(k) = int_{s >= s_k} f'^2, lower(k) = int_{s <= s_k} f'^2, with k
    clamped to the sample range (f' vanishes beyond it).
    """

    def __init__(self, pair: CharacteristicPair):
        q = pair.fprime**2
        h = pair.h
        seg = 0.5 * h * (q[1:] + q[:-1])
        self.lo = np.concatenate([[0.0], np.cumsum(seg)])
        self.total = self.lo[-1]
        self.up = self.total - self.lo
        self.K = pair.K
        self.m = q.shape[0]

    def upper(self, k):
        return self.up[np.clip(np.asarray(k) + self.K, 0, self.m - 1)]

    def lower(self, k):
        return self.lo[np.clip(np.asarray(k) + self.K, 0, self.m - 1)]


def exterior_free(pair: CharacteristicPair, t: float, R: float) -> float:
    """int_{r >= R + |t|} (d_r v)^2 + (d_t v)^2 dr at time t (t and R snapped to nodes)."""
    tails = _Tails(pair)
    kR = int(round(R / pair.h))
    m = int(round(abs(t) / pair.h))
    if t >= 0:
        return float(2.0 * tails.upper(kR) + 2.0 * tails.lower(-kR - 2 * m))
    return float(2.0 * tails.upper(kR + 2 * m) + 2.0 * tails.lower(-kR))


def channel_direction(
    pair: CharacteristicPair, R: float, t_sweep: float | None = None, tol: float = 1e-8
) -> ChannelResult:
    """Which time direction keeps half the exterior energy outside r >= R + |t|."""
    if R < 0:
        raise ValueError("R must be nonnegative")
    h = pair.h
    tails = _Tails(pair)
    kR = int(round(R / h))
    if t_sweep is None:
        support = _support(pair)
        t_sweep = 4.0 * (support + R)
    M = int(np.ceil(t_sweep / h))
    ms = np.arange(M + 1)
    e0 = 2.0 * (tails.upper(kR) + tails.lower(-kR))
    fwd = 2.0 * tails.upper(kR) + 2.0 * tails.lower(-kR - 2 * ms)
    bwd = 2.0 * tails.upper(kR + 2 * ms) + 2.0 * tails.lower(-kR)
    e_plus = 2.0 * float(tails.upper(kR))
    e_minus = 2.0 * float(tails.lower(-kR))
    half = 0.5 * e0
    mf = min(float(np.min(fwd)), e_plus) - half
    mb = min(float(np.min(bwd)), e_minus) - half
    ok_f = mf >= -tol
    ok_b = mb >= -tol
    if ok_f and ok_b:
        d = Direction.BOTH
    elif ok_f:
        d = Direction.FORWARD
    elif ok_b:
        d = Direction.BACKWARD
    else:
        d = Direction.NEITHER
    return ChannelResult(d, mf, mb, float(e0), e_plus, e_minus, kR * h, M * h)


def _support(pair: CharacteristicPair) -> float:
    nz = np.nonzero(np.abs(pair.fprime) > 0)[0]
    if nz.size == 0:
        return 0.0
    s = pair.s
    return float(max(abs(s[nz[0]]), abs(s[nz[-1]])))


class SearchExhausted(RuntimeError):
    def __init__(self, message: str, best: float):
        super().__init__(message)
        self.best = best


def forward_time(pair: CharacteristicPair, rtol: float = 1e-10) -> float:
    """Smallest node time t0 >= 0 after which the cone r >= t - t0 keeps half the energy.

    For t >= t0 the exterior energy of r >= t - t0 is
    2 int_{s >= -t0} f'^2 + 2 int_{s <= t0 - 2t} f'^2, which decreases to its
    first term, so the condition reduces to int_{s >= -t0} f'^2 >= half.
    """
    tails = _Tails(pair)
    total = tails.total
    if total == 0.0:
        raise ValueError("forward_time needs a nonzero pair")
    ks = np.arange(0, pair.K + 1)
    ok = tails.upper(-ks) >= 0.5 * total * (1.0 - rtol)
    hit = np.nonzero(ok)[0]
    if hit.size == 0:
        best = float(ks[np.argmax(tails.upper(-ks))] * pair.h)
        raise SearchExhausted("no t0 within the profile range", best)
    return float(hit[0] * pair.h)


def forward_sweep(pair: CharacteristicPair, t0: float, span: float = 50.0) -> np.ndarray:
    """Margins exterior(t; r >= t - t0) - E/2 on node times t in [t0, t0 + span]."""
    tails = _Tails(pair)
    h = pair.h
    k0 = int(round(t0 / h))
    ms = np.arange(k0, k0 + int(np.ceil(span / h)) + 1)
    ext = 2.0 * tails.upper(-k0) + 2.0 * tails.lower(k0 - 2 * ms)
    return ext - tails.total
