"""Birman-Schwinger operator sqrt(V) (-Delta)^-1 sqrt(V) on radial functions.

In reduced coordinates the radial inverse Laplacian has the kernel
min(r, s), so the operator acts on (0, inf) as
    (K phi)(r) = int sqrt(V(r)) min(r, s) sqrt(V(s)) phi(s) ds.
Quadrature: midpoint rule in x in (0, 1) under r = c x / (1 - b x), which
maps (0, 1) onto (0, R_spec) and clusters nodes where V lives.  The kink of
min(r, s) on the diagonal is corrected cell by cell, which restores fourth
order for smooth V.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .potentials import Potential, evaluate, scaled

MAP_SCALE = 2.0


class NegativePotential(ValueError):
    pass


class NotConverged(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class BSOperator:
    r: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    n_quad: int
    R_spec: float
    tail_bound: float
    potential: str = ""


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    thresholds: np.ndarray
    gaps: np.ndarray
    off_norm: float
    sweeps: int
    n_quad: int = 0
    R_spec: float = 0.0
    tail_bound: float = 0.0

    def records(self) -> list[dict]:
        return [
            {"j": j + 1, "lambda": float(l), "alpha": float(a), "n_quad": self.n_quad, "R_spec": self.R_spec,
             "tail_bound": self.tail_bound}
            for j, (l, a) in enumerate(zip(self.eigenvalues, self.thresholds))
        ]


def quadrature(n_quad: int, R_spec: float, scale: float = MAP_SCALE) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Mapped midpoint nodes: (r, dr/dx, weights, h)."""
    h = 1.0 / n_quad
    x = (np.arange(n_quad) + 0.5) * h
    b = 1.0 - scale / R_spec
    r = scale * x / (1.0 - b * x)
    dr = scale / (1.0 - b * x) ** 2
    return r, dr, h * dr, h


def tail_bound(V: Potential, R_spec: float) -> float:
    """Recorded size of the truncated part, 2 Y R^(2 - beta) / (beta - 2).

    It is twice the bound int_R^inf r |V| dr <= Y R^(2 - beta) / (beta - 2)
    on the trace of the diagonal block beyond R_spec.
    """
    if V.kind == "zero" or V.y_norm_bound == 0:
        return 0.0
    b = V.beta
    return 2.0 * V.y_norm_bound * R_spec ** (2.0 - b) / (b - 2.0)


def assemble(V: Potential, n_quad: int = 400, R_spec: float = 60.0) -> BSOperator:
    if R_spec < 50:
        raise ValueError("R_spec must be at least 50")
    r, dr, w, h = quadrature(n_quad, R_spec)
    Vs = np.asarray(evaluate(V, r), dtype=float)
    if np.any(Vs < 0):
        raise NegativePotential("the Birman-Schwinger operator needs V >= 0 on the quadrature nodes")
    sq = np.sqrt(Vs * w)
    M = np.minimum.outer(r, r) * np.outer(sq, sq)
    # product-integration correction for the diagonal kink of min(r, s)
    M[np.diag_indices(n_quad)] -= Vs * dr * w * h / 12.0
    M = 0.5 * (M + M.T)
    return BSOperator(r, w, M, n_quad, float(R_spec), tail_bound(V, R_spec), V.name)


def eigenvalues(op: BSOperator, k: int = 8, tol: float = 1e-12, max_sweeps: int = 60) -> SpectrumReport:
    """Top-k positive eigenvalues by cyclic Jacobi rotations."""
    if k > 8:
        raise ValueError("k must be at most 8")
    diag, _, off, fro, sweeps = K.jacobi_eigh(np.ascontiguousarray(op.matrix), tol, max_sweeps, False)
    if fro > 0 and off > tol * fro:
        raise NotConverged(f"Jacobi stopped with off-diagonal norm {off:.3e} after {sweeps} sweeps")
    lam = np.sort(diag)[::-1]
    floor = 1e-13 * max(fro, 1e-300)
    lam = lam[lam > floor][:k]
    gaps = lam[:-1] - lam[1:] if lam.size > 1 else np.zeros(0)
    return SpectrumReport(lam, 1.0 / lam, gaps, float(off), int(sweeps), op.n_quad, op.R_spec, op.tail_bound)


def spectrum(V: Potential, k: int = 8, n_quad: int = 400, R_spec: float = 60.0) -> SpectrumReport:
    return eigenvalues(assemble(V, n_quad, R_spec), k)


@dataclass(frozen=True)
class ResonanceReport:
    resonant: bool
    margin: float
    nearest: float | None


def resonance_check(V: Potential, margin: float = 1e-6, n_quad: int = 400, R_spec: float = 60.0) -> ResonanceReport:
    """Is 1 within ``margin`` of the Birman-Schwinger spectrum (a zero-energy state of -Delta - V)?"""
    rep = spectrum(V, 8, n_quad, R_spec)
    if rep.eigenvalues.size == 0:
        return ResonanceReport(False, 1.0, None)
    j = int(np.argmin(np.abs(rep.eigenvalues - 1.0)))
    d = float(abs(rep.eigenvalues[j] - 1.0))
    return ResonanceReport(d <= margin, d, float(rep.eigenvalues[j]))


@dataclass
class BifurcationReport:
    alpha1: float
    alpha2: float
    lambdas: list[float]
    couplings: list[float]
    census_summary: list[dict]
    none_below_alpha1: bool
    ground_above_alpha1: bool
    excited_above_alpha2: bool
    attribution: list[str] = field(default_factory=list)


def bifurcation_crosscheck(
    V_base: Potential,
    census_hook: Callable[[Potential], "object"],
    factors: Sequence[float] = (0.9, 1.1),
    n_quad: int = 400,
    R_spec: float = 60.0,
) -> BifurcationReport:
    """Census just below and above the first two coupling thresholds 1 / lambda_j.

    ``census_hook(V)`` returns a census-like object with ``nontrivial``
    entries carrying ``sign_changes``.
    """
    rep = spectrum(V_base, 2, n_quad, R_spec)
    if rep.eigenvalues.size < 2:
        raise ValueError("need two positive Birman-Schwinger eigenvalues")
    a1, a2 = float(rep.thresholds[0]), float(rep.thresholds[1])
    lo, hi = min(factors), max(factors)
    couplings = [lo * a1, hi * a1, lo * a2, hi * a2]
    summary = []
    results = []
    for alpha in couplings:
        cen = census_hook(scaled(alpha, V_base))
        nt = cen.nontrivial
        results.append(nt)
        summary.append({
            "alpha": alpha,
            "n_nontrivial": len(nt),
            "a": [e.a for e in nt],
            "sign_changes": [e.sign_changes for e in nt],
        })
    none_below = len(results[0]) == 0
    ground = any(e.sign_changes == 0 for e in results[1])
    excited = any(e.sign_changes >= 1 for e in results[3])
    attribution = []
    if not excited:
        attribution.append(
            f"no sign-changing state at alpha = {hi} alpha2: the excited branch may need an overshoot smaller than "
            f"{hi - 1:.0%}, or the scan bound is too small"
        )
    return BifurcationReport(a1, a2, [float(x) for x in rep.eigenvalues[:2]], couplings, summary,
                             none_below, ground, excited, attribution)


def first_nontrivial_coupling(V_base: Potential, alphas: Sequence[float], census_hook) -> float | None:
    """Smallest coupling in the sweep whose census has a nontrivial entry."""
    for alpha in sorted(alphas):
        if census_hook(scaled(alpha, V_base)).nontrivial:
            return float(alpha)
    return None
