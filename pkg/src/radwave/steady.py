"""Static solutions of -u'' - (2/r) u' - V u + u^5 = 0 by shooting in w = r u.

The regular solution with u(0) = a either decays (w -> c, a steady state with
charge c) or blows up at finite radius.  Past the shooting range the
solution is continued in the variables u = r^-1/2 y, s = log r, where the
equation becomes autonomous and the eventual blow-up sign is cheap to read
off; that sign is what the census bisects on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from . import _kernels as K
from .potentials import Potential, evaluate

R_SERIES = 1e-3
W_CAP = 1e6
LOG_SPAN = 200.0


class IntegrationFailure(RuntimeError):
    pass


class BlowUpBeforeR(RuntimeError):
    pass


@dataclass(frozen=True)
class DecayTo:
    c: float


@dataclass(frozen=True)
class BlowUp:
    sign: int
    r_blow: float
    certain_from: str = "cap"  # "cap" (|w| hit the cap) or "log" (certain blow-up past the range)


@dataclass(eq=False)
class Shot:
    a: float
    classification: DecayTo | BlowUp
    r: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    eventual_sign: int
    steps: int = 0

    @property
    def decays(self) -> bool:
        return isinstance(self.classification, DecayTo)


def _series(a: float, V0: float, r: float) -> tuple[float, float]:
    k = (a**5 - V0 * a) / 6.0
    return a * r + k * r**3, a + 3.0 * k * r * r


def aitken(w1: float, w2: float, w3: float) -> float:
    """Limit of a geometric tail sampled at r, 2r, 4r (plain w3 if not geometric)."""
    d1 = w2 - w1
    d2 = w3 - w2
    den = d1 - d2
    if den == 0.0 or d1 == 0.0 or abs(d2) >= abs(d1):
        return w3
    return w3 + d2 * d2 / den


def shoot(
    a: float,
    V: Potential,
    R_big: float = 200.0,
    tol: float = 1e-12,
    dr: float | None = None,
    decay_tol: float = 0.1,
    radii: np.ndarray | None = None,
    max_steps: int = 2_000_000,
) -> Shot:
    """Integrate the regular solution with u(0) = a out to R_big and classify it.

    ``dr`` sets the spacing of the returned profile samples, ``radii`` asks
    for explicit sample radii; by default only the few radii the classifier
    needs are returned.
    """
    if R_big < 100:
        raise ValueError("R_big must be at least 100")
    if tol > 1e-10:
        raise ValueError("tol must be at most 1e-10")
    a = float(a)
    if radii is not None:
        r_out = np.unique(np.concatenate([np.asarray(radii, dtype=float), [R_big / 4, R_big / 2, R_big]]))
        r_out = r_out[(r_out > R_SERIES) & (r_out <= R_big)]
    elif dr is None:
        r_out = np.concatenate([np.geomspace(R_big / 10, R_big / 4, 5)[:-1], [R_big / 4, R_big / 2, R_big]])
    else:
        m = int(round(R_big / dr))
        r_out = dr * np.arange(1, m + 1)
        r_out = r_out[r_out > R_SERIES]
    r_all = np.concatenate([[0.0], r_out])
    if a == 0.0:
        z = np.zeros_like(r_all)
        return Shot(0.0, DecayTo(0.0), r_all, z, z.copy(), 0)
    code, p, tr, tv = V.packed()
    V0 = float(evaluate(V, 0.0))
    w0, dw0 = _series(a, V0, R_SERIES)
    status, x_end, y_end0, y_end1, n_filled, y_out, steps = K.dopri(
        0, R_SERIES, w0, dw0, r_out, tol, 1e-300, 1e-4, W_CAP, code, p, tr, tv, True, max_steps
    )
    w = np.concatenate([[0.0], y_out[:, 0]])
    dw = np.concatenate([[a], y_out[:, 1]])
    if status == 2 and abs(y_end0) > 1e3 and y_end0 * y_end1 > 0:
        # the singularity is closer than the step floor: same as hitting the cap
        status = 1
    if status == 2 or status == 3:
        raise IntegrationFailure(f"shot a={a}: step {'underflow' if status == 2 else 'budget'} at r={x_end}")
    if status == 1:
        sgn = int(np.sign(y_end0))
        return Shot(a, BlowUp(sgn, float(x_end), "cap"), r_all, w, dw, sgn, steps)
    # eventual sign from the log-variable continuation
    s0 = math.log(R_big)
    y0 = w[-1] / math.sqrt(R_big)
    y1 = (R_big * dw[-1] - 0.5 * w[-1]) / math.sqrt(R_big)
    st2, s_end, ye0, _, _, _, steps2 = K.dopri(
        1, s0, y0, y1, np.array([s0 + LOG_SPAN]), 1e-11, 1e-300, 1e-2, W_CAP, code, p, tr, tv, True, max_steps
    )
    if st2 == 2 and abs(ye0) > 1e3:
        st2 = 1
    if st2 == 2:
        raise IntegrationFailure(f"shot a={a}: step underflow in the log continuation")
    eventual = int(np.sign(ye0)) if st2 == 1 else 0
    # classification on the shooting range
    w1, w2, w3 = (float(np.interp(x, r_all, w)) for x in (R_big / 4, R_big / 2, R_big))
    d1, d2 = w2 - w1, w3 - w2
    ell = aitken(w1, w2, w3)
    # w - ell ~ r^-gamma gives d2 / d1 = 2^-gamma in (0, 1); linear growth gives 2
    q = d2 / d1 if d1 != 0.0 else 0.0
    contracting = 0.0 <= q < 1.0
    small = abs(w3 - ell) <= decay_tol * max(1.0, abs(ell))
    dec = _last_decade(r_all, w, R_big)
    monotone = bool(np.all(np.diff(np.abs(dec - ell)) <= 1e-12 * max(1.0, abs(ell))))
    if contracting and small and monotone:
        cls = DecayTo(float(ell))
    else:
        r_blow = math.exp(s_end) if st2 == 1 else math.inf
        cls = BlowUp(eventual if eventual else int(np.sign(w3)), r_blow, "log")
    return Shot(a, cls, r_all, w, dw, eventual, steps + steps2)


def _last_decade(r, w, R_big):
    sel = r >= R_big / 10 - 1e-12
    rs = r[sel]
    ws = w[sel]
    # a handful of geometric probes keeps the monotonicity test insensitive to sampling density
    probes = np.geomspace(R_big / 10, R_big, 6)
    idx = np.clip(np.searchsorted(rs, probes - 1e-9), 0, rs.size - 1)
    return ws[np.unique(idx)]


@dataclass(eq=False)
class SteadyState:
    a: float
    c: float
    r: np.ndarray
    u: np.ndarray
    sign_changes: int
    functional_J: float
    residual: float
    label: str = ""

    def u_at(self, r):
        """Profile interpolated onto r, continued as c / r past the sampled range."""
        r = np.asarray(r, dtype=float)
        if getattr(self, "_spline", None) is None:
            self._spline = CubicSpline(self.r, self.u)
        out = self._spline(np.clip(r, self.r[0], self.r[-1]))
        far = r > self.r[-1]
        out = np.where(far, self.c / np.where(far, r, 1.0), out)
        return out

    def mirrored(self) -> "SteadyState":
        return SteadyState(-self.a, -self.c, self.r, -self.u, self.sign_changes, self.functional_J, self.residual,
                           self.label + "-" if self.label else "")


def count_sign_changes(w: np.ndarray, floor: float = 1e-8) -> int:
    big = w[np.abs(w) > floor * max(np.max(np.abs(w)), 1e-300)]
    if big.size < 2:
        return 0
    return int(np.sum(np.sign(big[1:]) != np.sign(big[:-1])))


def steady_residual(r: np.ndarray, u: np.ndarray, V: Potential, r_lo: float, r_hi: float) -> float:
    """max |-u'' - 2u'/r - V u + u^5| on [r_lo, r_hi], fourth-order differences on the uniform samples."""
    h = r[2] - r[1]
    j = np.arange(2, r.size - 2)
    j = j[(r[j] >= r_lo - 1e-12) & (r[j] <= r_hi + 1e-12)]
    d2 = (-u[j + 2] + 16 * u[j + 1] - 30 * u[j] + 16 * u[j - 1] - u[j - 2]) / (12 * h * h)
    d1 = (-u[j + 2] + 8 * u[j + 1] - 8 * u[j - 1] + u[j - 2]) / (12 * h)
    rj = r[j]
    res = -d2 - 2.0 * d1 / rj - evaluate(V, rj) * u[j] + u[j] ** 5
    return float(np.max(np.abs(res))) if j.size else 0.0


def charge(a: float, V: Potential, R_big: float, tol: float, R_limit: float = 1e6) -> tuple[float, float]:
    """(c, radius used): Aitken charge, pushing the range out until the tail looks geometric."""
    R = R_big
    while True:
        sh = shoot(a, V, R, tol)
        if sh.decays:
            return sh.classification.c, R
        if R * 10 > R_limit:
            raise ValueError(f"a = {a} does not decay on [0, {R}]: {sh.classification}")
        R *= 10


def steady_from_shot(shot: Shot, V: Potential, R_big: float, tol: float, dr: float = 0.01) -> SteadyState:
    """Resample a steady shot on a uniform grid and evaluate its diagnostics."""
    fine = shot if shot.r.size > 10 and np.isclose(shot.r[2] - shot.r[1], dr) else shoot(shot.a, V, R_big, tol, dr=dr)
    if fine.decays:
        c = fine.classification.c
    else:
        if isinstance(fine.classification, BlowUp) and fine.classification.certain_from == "cap":
            raise ValueError(f"a = {shot.a} blows up at r = {fine.classification.r_blow}")
        c, _ = charge(shot.a, V, R_big, tol)
    r, w, dw = fine.r, fine.w, fine.dw
    u = np.empty_like(w)
    u[1:] = w[1:] / r[1:]
    u[0] = fine.a
    # J = int 1/2 (w' - w/r)^2 - 1/2 V w^2 + w^6 / (6 r^4) dr, plus the c/r tail past R_big
    dens = np.zeros_like(w)
    rr = r[1:]
    dens[1:] = 0.5 * (dw[1:] - w[1:] / rr) ** 2 - 0.5 * evaluate(V, rr) * w[1:] ** 2 + w[1:] ** 6 / (6 * rr**4)
    wts = np.full(r.size, dr)
    wts[0] = wts[-1] = 0.5 * dr
    J = float(np.dot(wts, dens)) + c * c / (2.0 * r[-1])
    res = steady_residual(r, u, V, dr, R_big / 2)
    return SteadyState(fine.a, c, r, u, count_sign_changes(w), J, res)


@dataclass(eq=False)
class Census:
    potential: str
    A: float
    step: float
    tol: float
    entries: list[SteadyState]
    symmetric: bool = True
    scanned: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def nontrivial(self) -> list[SteadyState]:
        return [e for e in self.entries if e.a != 0.0]

    def all_states(self) -> list[SteadyState]:
        """Every member of Sigma, including the negative mirrors."""
        out = list(self.entries)
        out += [e.mirrored() for e in self.entries if e.a != 0.0]
        return sorted(out, key=lambda e: e.a)

    def find(self, a: float, tol: float = 1e-6) -> SteadyState | None:
        for e in self.all_states():
            if abs(e.a - a) <= tol:
                return e
        return None


def _zero_state(R_big: float, dr: float = 0.01) -> SteadyState:
    r = dr * np.arange(int(round(R_big / dr)) + 1)
    z = np.zeros_like(r)
    return SteadyState(0.0, 0.0, r, z, 0, 0.0, 0.0, "0")


def census(
    V: Potential,
    A: float = 5.0,
    step: float = 0.05,
    tol: float = 1e-10,
    R_big: float = 200.0,
    shoot_tol: float = 1e-12,
    refine: int = 10,
) -> Census:
    """Steady states with 0 <= u(0) <= A, mirrored by the odd symmetry."""
    if not A > 0:
        raise ValueError("A must be positive")

    def sign_of(a):
        return shoot(a, V, R_big, shoot_tol).eventual_sign

    coarse = [step * 1e-3] + list(np.arange(1, int(math.floor(A / step + 1e-9)) + 1) * step)
    shots = [shoot(a, V, R_big, shoot_tol) for a in coarse]
    scanned = len(shots)
    samples = {a: s.eventual_sign for a, s in zip(coarse, shots)}
    # local 10x re-scan around coarse points that looked steady
    for a, s in zip(coarse, shots):
        if s.decays:
            for x in a + step * np.arange(-refine, refine + 1) / refine:
                if 0 < x <= A and x not in samples:
                    samples[float(x)] = sign_of(float(x))
                    scanned += 1
    grid_a = sorted(samples)
    roots = []
    for x in grid_a:
        if samples[x] == 0:
            roots.append(x)
    for lo, hi in zip(grid_a[:-1], grid_a[1:]):
        slo, shi = samples[lo], samples[hi]
        if slo == 0 or shi == 0 or slo == shi:
            continue
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            sm = sign_of(mid)
            if sm == 0:
                lo = hi = mid
                break
            if sm == slo:
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    roots.sort()
    merged: list[float] = []
    for x in roots:
        if merged and x - merged[-1] <= 10 * tol:
            continue
        merged.append(x)
    entries = [_zero_state(R_big)]
    warnings = []
    for k, x in enumerate(merged):
        try:
            st = steady_from_shot(shoot(x, V, R_big, shoot_tol), V, R_big, shoot_tol)
        except ValueError as exc:
            warnings.append(f"root near a = {x:.12g} not confirmed: {exc}")
            continue
        st.label = f"s{k + 1}"
        entries.append(st)
    gaps = np.diff([e.a for e in entries])
    if gaps.size and np.min(gaps) < step / refine:
        warnings.append("two steady states closer than the refined scan step; possible near-continuum")
    return Census(V.name, float(A), float(step), float(tol), entries, True, scanned, warnings)


@dataclass(eq=False)
class Exterior:
    lam: float
    c: float
    R: float
    r: np.ndarray
    u: np.ndarray
    small_ratio: float  # int V u^2 r^2 / int |u_r|^2 r^2 on the exterior


def _tail_integrals(V: Potential, r: float) -> tuple[float, float]:
    """(int_r^inf (s - r) V ds, int_r^inf V ds)."""
    if V.kind == "zero" or V.coupling == 0:
        return 0.0, 0.0
    f = lambda s: float(evaluate(V, s))  # noqa: E731
    i1 = quad(lambda s: (s - r) * f(s), r, np.inf, limit=200, epsabs=0.0, epsrel=1e-12)[0]
    i0 = quad(f, r, np.inf, limit=200, epsabs=0.0, epsrel=1e-12)[0]
    return i1, i0


def exterior_solve(
    c: float,
    V: Potential,
    R: float,
    R_inf: float | None = None,
    tol: float = 1e-12,
    n_out: int = 400,
) -> Exterior:
    """Integrate inward from R_inf with charge c; return lambda = u(R) and the profile.

    The start values include one sweep of the integral equation
    w(r) = c + int_r^inf (s - r) F ds, F = -V c + c^5 / s^4.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    R_inf = 100.0 * R if R_inf is None else R_inf
    if R_inf < 10 * R:
        raise ValueError("R_inf must be at least 10 R")
    r_out = np.geomspace(R, R_inf, n_out)[::-1]
    if c == 0.0:
        return Exterior(0.0, 0.0, R, r_out[::-1], np.zeros(n_out), 0.0)
    i1, i0 = _tail_integrals(V, R_inf)
    w0 = c - c * i1 + c**5 / (6.0 * R_inf**2)
    dw0 = c * i0 - c**5 / (3.0 * R_inf**3)
    code, p, tr, tv = V.packed()
    status, x_end, _, _, n_filled, y_out, _ = K.dopri(
        0, R_inf, w0, dw0, r_out, tol, 1e-300, -1e-2 * R_inf, W_CAP, code, p, tr, tv, True, 2_000_000
    )
    if status != 0:
        raise BlowUpBeforeR(f"inward solution with c = {c} failed at r = {x_end} (status {status})")
    r = r_out[::-1]
    w = y_out[::-1, 0]
    dw = y_out[::-1, 1]
    u = w / r
    ur = (dw - w / r) / r
    vint = np.trapezoid(evaluate(V, r) * u * u * r * r, r)
    gint = np.trapezoid(ur * ur * r * r, r)
    ratio = float(vint / gint) if gint > 0 else 0.0
    return Exterior(float(u[0]), float(c), R, r, u, ratio)


def lam_of_c(c: float, V: Potential, R: float, R_inf: float | None = None) -> float:
    """u(R) of the exterior solution with charge c; +inf (signed) past the valid branch."""
    try:
        return exterior_solve(c, V, R, R_inf).lam
    except BlowUpBeforeR:
        return math.copysign(math.inf, c)


class BracketError(RuntimeError):
    pass


def c_of_lambda(lam: float, V: Potential, R: float, c_max: float = 100.0, tol: float = 1e-10,
                R_inf: float | None = None) -> float:
    """Invert lambda(c) by bisection on [0, c_max]; odd in lambda."""
    if lam == 0.0:
        return 0.0
    if lam < 0:
        return -c_of_lambda(-lam, V, R, c_max, tol, R_inf)
    if lam_of_c(c_max, V, R, R_inf) < lam:
        raise BracketError(f"lambda = {lam} not reached for c <= {c_max}")
    lo, hi = 0.0, c_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lam_of_c(mid, V, R, R_inf) < lam:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class IllConditionedFit(ValueError):
    pass


@dataclass(frozen=True)
class DecayFit:
    ell: float
    gamma: float
    residual: float
    prefactor: float


def decay_fit(r: np.ndarray, w: np.ndarray, r_lo: float, r_hi: float, floor: float = 1e-12) -> DecayFit:
    """Fit |w - ell| ~ C r^-gamma on [r_lo, r_hi], ell by Aitken on r_hi/4, r_hi/2, r_hi."""
    r = np.asarray(r, dtype=float)
    w = np.asarray(w, dtype=float)
    if r_hi < 10 * r_lo:
        raise ValueError("need r_hi >= 10 r_lo")
    wi = lambda x: float(np.interp(x, r, w))  # noqa: E731
    ell = aitken(wi(r_hi / 4), wi(r_hi / 2), wi(r_hi))
    sel = (r >= r_lo) & (r <= r_hi)
    rs = r[sel]
    dev = np.abs(w[sel] - ell)
    if rs.size < 3 or np.any(dev <= floor * max(1.0, abs(ell))):
        raise IllConditionedFit(f"|w - ell| falls below {floor} on the fit window")
    X = np.vstack([np.ones_like(rs), np.log(rs)]).T
    y = np.log(dev)
    coef, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ coef
    resid = float(np.sqrt(np.mean((y - fitted) ** 2)))
    return DecayFit(float(ell), float(-coef[1]), resid, float(np.exp(coef[0])))
