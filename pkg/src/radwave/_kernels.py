"""Hot inner loops.

Every kernel here exists twice: a scalar-loop version compiled with
``numba.njit`` and a plain numpy path.  Set ``RADWAVE_DISABLE_NUMBA=1``
before import to force the numpy path (numba is also skipped when it is
not installed).  Both paths implement the same arithmetic; the test-suite
checks that they agree.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("RADWAVE_DISABLE_NUMBA", "0") in ("", "0")


def _jit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# potentials
#
# Potentials are packed as (code, params, table_r, table_v):
#   0 zero, 1 manufactured 4/(1+r^2)^2, 2 gaussian a*exp(-(r/s)^2),
#   3 power well a*(1+r)^-b, 4 tabulated (linear interpolation, 0 past table).
# params[0] is always the overall multiplicative coupling.

POT_ZERO, POT_STAR, POT_GAUSS, POT_POWER, POT_TABLE = 0, 1, 2, 3, 4


def _pot_scalar(code, p, tr, tv, r):
    if code == 0:
        return 0.0
    if code == 1:
        q = 1.0 + r * r
        return p[0] * 4.0 / (q * q)
    if code == 2:
        x = r / p[1]
        return p[0] * math.exp(-x * x)
    if code == 3:
        return p[0] * (1.0 + r) ** (-p[1])
    # tabulated
    n = tr.shape[0]
    if r >= tr[n - 1]:
        return 0.0
    if r <= tr[0]:
        return p[0] * tv[0]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tr[mid] <= r:
            lo = mid
        else:
            hi = mid
    w = (r - tr[lo]) / (tr[hi] - tr[lo])
    return p[0] * ((1.0 - w) * tv[lo] + w * tv[hi])


pot_scalar = _jit(_pot_scalar)


# ---------------------------------------------------------------------------
# leapfrog for  v_tt = v_rr + a(t, r) v - nl * v^5 / r^4,  v(t, 0) = 0,
# outer node held at its initial value.
#
# cap_r[k], cap_v[k] encode the truncated coefficient at step k: nodes with
# r < cap_r[k] use the value cap_v[k] instead of a[j].  cap_r < 0 disables it.


def _leapfrog_loop(vm, v, a, r, r4inv, cap_r, cap_v, nl, dt, h, nsteps, blowup_cap):
    n = v.shape[0]
    vm = vm.copy()
    v = v.copy()
    vn = np.empty_like(v)
    dt2 = dt * dt
    ih2 = 1.0 / (h * h)
    for k in range(nsteps):
        cr = cap_r[k]
        cv = cap_v[k]
        peak = 0.0
        for j in range(1, n - 1):
            aj = a[j]
            if r[j] < cr:
                aj = cv
            vj = v[j]
            acc = (v[j + 1] - 2.0 * vj + v[j - 1]) * ih2 + aj * vj
            if nl:
                v2 = vj * vj
                acc -= v2 * v2 * vj * r4inv[j]
            x = 2.0 * vj - vm[j] + dt2 * acc
            vn[j] = x
            ax = abs(x)
            if ax > peak:
                peak = ax
        vn[0] = 0.0
        vn[n - 1] = v[n - 1]
        tmp = vm
        vm = v
        v = vn
        vn = tmp
        if not peak <= blowup_cap:
            return vm, v, k + 1, True
    return vm, v, nsteps, False


def _leapfrog_loop_np(vm, v, a, r, r4inv, cap_r, cap_v, nl, dt, h, nsteps, blowup_cap):
    vm = vm.copy()
    v = v.copy()
    dt2 = dt * dt
    ih2 = 1.0 / (h * h)
    ai = a[1:-1]
    ri = r[1:-1]
    r4i = r4inv[1:-1]
    for k in range(nsteps):
        aj = ai if cap_r[k] < 0.0 else np.where(ri < cap_r[k], cap_v[k], ai)
        vi = v[1:-1]
        acc = (v[2:] - 2.0 * vi + v[:-2]) * ih2 + aj * vi
        if nl:
            acc -= vi**5 * r4i
        vn = np.empty_like(v)
        vn[1:-1] = 2.0 * vi - vm[1:-1] + dt2 * acc
        vn[0] = 0.0
        vn[-1] = v[-1]
        vm, v = v, vn
        if not np.max(np.abs(vn)) <= blowup_cap:
            return vm, v, k + 1, True
    return vm, v, nsteps, False


leapfrog_loop = _jit(_leapfrog_loop) if USE_NUMBA else _leapfrog_loop_np


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) for the steady-state ODE, two forms:
#   mode 0:  w'' = -V(r) w + nl * w^5 / r^4         (w = r u, variable r)
#   mode 1:  y'' = y/4 + nl * y^5 - r^2 V(r) y      (u = r^-1/2 y, s = log r)
# Mode 1 is autonomous once r^2 V is negligible, which makes the eventual
# blow-up sign cheap to resolve however far out it happens.

# past r = e^230, r^2 would overflow; r^2 V is dropped there (tiny for beta >= 2.2)
_S_FAR = 230.0

_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


def _ode_rhs(mode, x, y0, y1, code, p, tr, tv, nl):
    if mode == 0:
        f1 = -pot_scalar(code, p, tr, tv, x) * y0
        if nl:
            x2 = x * x
            y2 = y0 * y0
            f1 += y2 * y2 * y0 / (x2 * x2)
        return y1, f1
    f1 = 0.25 * y0
    if x < _S_FAR:
        r = math.exp(x)
        f1 -= r * r * pot_scalar(code, p, tr, tv, r) * y0
    if nl:
        y2 = y0 * y0
        f1 += y2 * y2 * y0
    return y1, f1


def _ode_event(mode, x, y0, y1, cap, code, p, tr, tv):
    if abs(y0) > cap:
        return True
    if mode == 1 and abs(y0) > 2.0 and y0 * y1 > 0.0:
        if x >= _S_FAR:
            return True
        r = math.exp(x)
        if r * r * abs(pot_scalar(code, p, tr, tv, r)) < 0.25:
            return True
    return False


def _dopri(mode, x0, y0, y1, x_out, rtol, atol, h0, cap, code, p, tr, tv, nl, max_steps):
    """Integrate from x0 through every node of x_out (monotone, same direction).

    Returns (status, x_end, y_end0, y_end1, n_filled, y_out, n_steps) with
    status 0 finished, 1 event (cap or certain blow-up), 2 step underflow,
    3 step budget exhausted.
    """
    nout = x_out.shape[0]
    y_out = np.full((nout, 2), np.nan)
    direction = 1.0 if x_out[nout - 1] >= x0 else -1.0
    h = abs(h0) * direction
    x = x0
    k_out = 0
    while k_out < nout and (x_out[k_out] - x) * direction <= 0.0:
        y_out[k_out, 0] = y0
        y_out[k_out, 1] = y1
        k_out += 1
    f0, f1 = _ode_rhs(mode, x, y0, y1, code, p, tr, tv, nl)
    steps = 0
    while k_out < nout:
        if steps >= max_steps:
            return 3, x, y0, y1, k_out, y_out, steps
        target = x_out[k_out]
        if abs(target - x) <= 1e-14 * max(1.0, abs(x)):
            y_out[k_out, 0] = y0
            y_out[k_out, 1] = y1
            k_out += 1
            continue
        hs = h
        hit = False
        if (x + h - target) * direction >= 0.0:
            hs = target - x
            hit = True
        if abs(hs) < 1e-14 * max(1.0, abs(x)):
            return 2, x, y0, y1, k_out, y_out, steps
        k10, k11 = f0, f1
        k20, k21 = _ode_rhs(mode, x + _C2 * hs, y0 + hs * _A21 * k10, y1 + hs * _A21 * k11, code, p, tr, tv, nl)
        k30, k31 = _ode_rhs(
            mode, x + _C3 * hs, y0 + hs * (_A31 * k10 + _A32 * k20), y1 + hs * (_A31 * k11 + _A32 * k21),
            code, p, tr, tv, nl,
        )
        k40, k41 = _ode_rhs(
            mode, x + _C4 * hs,
            y0 + hs * (_A41 * k10 + _A42 * k20 + _A43 * k30),
            y1 + hs * (_A41 * k11 + _A42 * k21 + _A43 * k31),
            code, p, tr, tv, nl,
        )
        k50, k51 = _ode_rhs(
            mode, x + _C5 * hs,
            y0 + hs * (_A51 * k10 + _A52 * k20 + _A53 * k30 + _A54 * k40),
            y1 + hs * (_A51 * k11 + _A52 * k21 + _A53 * k31 + _A54 * k41),
            code, p, tr, tv, nl,
        )
        k60, k61 = _ode_rhs(
            mode, x + hs,
            y0 + hs * (_A61 * k10 + _A62 * k20 + _A63 * k30 + _A64 * k40 + _A65 * k50),
            y1 + hs * (_A61 * k11 + _A62 * k21 + _A63 * k31 + _A64 * k41 + _A65 * k51),
            code, p, tr, tv, nl,
        )
        n0 = y0 + hs * (_B1 * k10 + _B3 * k30 + _B4 * k40 + _B5 * k50 + _B6 * k60)
        n1 = y1 + hs * (_B1 * k11 + _B3 * k31 + _B4 * k41 + _B5 * k51 + _B6 * k61)
        xn = target if hit else x + hs
        k70, k71 = _ode_rhs(mode, xn, n0, n1, code, p, tr, tv, nl)
        e0 = hs * (_E1 * k10 + _E3 * k30 + _E4 * k40 + _E5 * k50 + _E6 * k60 + _E7 * k70)
        e1 = hs * (_E1 * k11 + _E3 * k31 + _E4 * k41 + _E5 * k51 + _E6 * k61 + _E7 * k71)
        s0 = atol + rtol * max(abs(y0), abs(n0))
        s1 = atol + rtol * max(abs(y1), abs(n1))
        err = max(abs(e0) / s0, abs(e1) / s1)
        steps += 1
        if not err <= 1.0:
            fac = 0.1 if err != err else max(0.1, 0.9 * err ** -0.2)
            h = hs * fac
            continue
        x = xn
        y0 = n0
        y1 = n1
        f0 = k70
        f1 = k71
        if hit:
            while k_out < nout and (x_out[k_out] - x) * direction <= 0.0:
                y_out[k_out, 0] = y0
                y_out[k_out, 1] = y1
                k_out += 1
        if _ode_event(mode, x, y0, y1, cap, code, p, tr, tv):
            return 1, x, y0, y1, k_out, y_out, steps
        fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
        if hit:
            # a step shortened to land on an output node keeps the old proposal
            h = direction * max(abs(h), abs(hs) * fac)
        else:
            h = hs * fac
    return 0, x, y0, y1, k_out, y_out, steps


if USE_NUMBA:
    _ode_rhs = numba.njit(cache=True)(_ode_rhs)
    _ode_event = numba.njit(cache=True)(_ode_event)
dopri = _jit(_dopri)


# ---------------------------------------------------------------------------
# cyclic Jacobi rotations for dense symmetric matrices


def _jacobi_eigh(A, tol, max_sweeps, want_vectors):
    n = A.shape[0]
    a = A.copy()
    vec = np.eye(n) if want_vectors else np.zeros((1, 1))
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j] * a[i, j]
    fro = math.sqrt(fro)
    off = 0.0
    sweeps = 0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        off = math.sqrt(2.0 * off)
        if off <= tol * fro or fro == 0.0:
            break
        if sweep == max_sweeps:
            break
        sweeps += 1
        # skip rotations that cannot matter at this sweep's scale
        thresh = 1e-3 * off / n if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh or apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_vectors:
                    for k in range(n):
                        vkp = vec[k, p]
                        vkq = vec[k, q]
                        vec[k, p] = c * vkp - s * vkq
                        vec[k, q] = s * vkp + c * vkq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i]
    return w, vec, off, fro, sweeps


def _jacobi_eigh_np(A, tol, max_sweeps, want_vectors):
    n = A.shape[0]
    a = np.array(A, dtype=float, copy=True)
    vec = np.eye(n) if want_vectors else np.zeros((1, 1))
    fro = float(np.linalg.norm(a))
    iu = np.triu_indices(n, 1)
    off = 0.0
    sweeps = 0
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= tol * fro or fro == 0.0 or sweep == max_sweeps:
            break
        sweeps += 1
        thresh = 1e-3 * off / n if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh or apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_vectors:
                    vp = vec[:, p].copy()
                    vq = vec[:, q]
                    vec[:, p] = c * vp - s * vq
                    vec[:, q] = s * vp + c * vq
    return np.diag(a).copy(), vec, off, fro, sweeps


jacobi_eigh = _jit(_jacobi_eigh) if USE_NUMBA else _jacobi_eigh_np
