"""Radial potentials in the class Y = {V : sup (1+r)^beta |V(r)| < inf, beta > 2}."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import _kernels as K


class AdmissibilityError(ValueError):
    """The potential is not in the class Y along the probes."""


@dataclass(frozen=True, eq=False)
class Potential:
    """A radial potential.

    ``kind`` is one of ``zero``, ``star`` (the manufactured 4/(1+r^2)^2),
    ``gaussian`` (alpha, sigma), ``power`` (alpha, beta), ``tabulated``.
    ``coupling`` multiplies the whole profile; :func:`scaled` composes it.
    """

    kind: str
    params: tuple = ()
    coupling: float = 1.0
    beta: float = 4.0
    y_norm_bound: float = 0.0
    table: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if not self.beta > 2:
            raise AdmissibilityError(f"decay exponent beta must exceed 2, got {self.beta}")

    def __call__(self, r):
        return evaluate(self, r)

    @property
    def name(self) -> str:
        return self.label or self.kind

    def packed(self):
        """(code, params, table_r, table_v) for the compiled kernels."""
        p = np.zeros(4)
        p[0] = self.coupling
        tr = np.zeros(1)
        tv = np.zeros(1)
        if self.kind == "zero":
            code = K.POT_ZERO
        elif self.kind == "star":
            code = K.POT_STAR
        elif self.kind == "gaussian":
            code = K.POT_GAUSS
            p[0] *= self.params[0]
            p[1] = self.params[1]
        elif self.kind == "power":
            code = K.POT_POWER
            p[0] *= self.params[0]
            p[1] = self.params[1]
        elif self.kind == "tabulated":
            code = K.POT_TABLE
            tr, tv = self.table
        else:  # pragma: no cover - constructors guard this
            raise ValueError(f"unknown potential kind {self.kind!r}")
        return code, p, tr, tv

    def is_nonnegative(self) -> bool:
        if self.coupling < 0:
            return self.kind == "zero"
        if self.kind == "tabulated":
            return bool(np.all(self.table[1] >= 0))
        if self.kind in ("gaussian", "power"):
            return self.params[0] >= 0
        return True


def zero() -> Potential:
    return Potential("zero", beta=4.0, y_norm_bound=0.0)


def manufactured_star() -> Potential:
    # sup (1+r)^4 * 4/(1+r^2)^2 = 4 * (1 + 2r/(1+r^2))^2 is attained at r = 1
    return Potential("star", beta=4.0, y_norm_bound=16.0)


def gaussian(alpha: float, sigma: float) -> Potential:
    if not sigma > 0:
        raise ValueError("gaussian width must be positive")
    beta = 4.0
    # maximiser of (1+r)^4 exp(-r^2/sigma^2): r^2 + r - 2 sigma^2 = 0
    rs = 0.5 * (-1.0 + np.sqrt(1.0 + 8.0 * sigma**2))
    bound = abs(alpha) * (1.0 + rs) ** beta * np.exp(-((rs / sigma) ** 2))
    return Potential("gaussian", (float(alpha), float(sigma)), beta=beta, y_norm_bound=float(bound))


def power_well(alpha: float, beta: float) -> Potential:
    return Potential("power", (float(alpha), float(beta)), beta=float(beta), y_norm_bound=abs(float(alpha)))


def tabulated(r, values, beta: float = 4.0) -> Potential:
    r = np.asarray(r, dtype=float)
    values = np.asarray(values, dtype=float)
    if r.ndim != 1 or r.shape != values.shape or r.size < 2:
        raise ValueError("table needs two equal-length columns with at least two rows")
    if r[0] != 0.0:
        raise ValueError("table must start at r = 0")
    if np.any(np.diff(r) <= 0):
        raise ValueError("table radii must be strictly increasing")
    if not np.all(np.isfinite(values)):
        raise ValueError("table values must be finite")
    # clamped to zero past the table, so any beta works; the bound is over the table
    bound = float(np.max((1.0 + r) ** beta * np.abs(values)))
    return Potential("tabulated", beta=beta, y_norm_bound=bound, table=(r, values))


def read_table(path) -> Potential:
    """Two-column ``r value`` text file; ``#`` starts a comment."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'r value', got {line!r}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: empty potential table")
    arr = np.array(rows)
    return tabulated(arr[:, 0], arr[:, 1])


def scaled(alpha: float, base: Potential) -> Potential:
    return Potential(
        base.kind,
        base.params,
        coupling=base.coupling * alpha,
        beta=base.beta,
        y_norm_bound=abs(alpha) * base.y_norm_bound,
        table=base.table,
        label=base.label,
    )


def evaluate(V: Potential, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("potential evaluated at negative radius")
    c = V.coupling
    if V.kind == "zero":
        out = np.zeros_like(r)
    elif V.kind == "star":
        out = c * 4.0 / (1.0 + r * r) ** 2
    elif V.kind == "gaussian":
        alpha, sigma = V.params
        out = c * alpha * np.exp(-((r / sigma) ** 2))
    elif V.kind == "power":
        alpha, beta = V.params
        out = c * alpha * (1.0 + r) ** (-beta)
    elif V.kind == "tabulated":
        tr, tv = V.table
        out = c * np.interp(r, tr, tv)
        out = np.where(r >= tr[-1], 0.0, out)
    else:
        raise ValueError(f"unknown potential kind {V.kind!r}")
    return out if out.ndim else float(out)


def log_probes(r_hi: float = 1e3, n: int = 4001) -> np.ndarray:
    return np.concatenate([[0.0], np.logspace(-4, np.log10(r_hi), n)])


def y_norm(V: Potential, probes=None) -> float:
    """Numerical sup of (1+r)^beta |V(r)| along log-spaced probes."""
    if probes is None:
        probes = log_probes()
    weighted = (1.0 + probes) ** V.beta * np.abs(evaluate(V, probes))
    sup = float(np.max(weighted))
    tail = weighted[probes >= probes[-1] / 10]
    if tail.size > 2 and tail[-1] > 0 and np.all(np.diff(tail) > 0) and tail[-1] > 2 * tail[0]:
        raise AdmissibilityError(f"(1+r)^beta |V| keeps growing along the probes for {V.name}")
    if sup > V.y_norm_bound * (1 + 1e-9) + 1e-300:
        raise AdmissibilityError(f"sup {sup} exceeds the declared bound {V.y_norm_bound} for {V.name}")
    return sup


def manufactured_pair() -> tuple[Potential, Callable, float]:
    """V* = 4 (1+r^2)^-2 with its exact steady state u* = (1+r^2)^-1/2, charge c = 1."""

    def u_star(r):
        r = np.asarray(r, dtype=float)
        return 1.0 / np.sqrt(1.0 + r * r)

    return manufactured_star(), u_star, 1.0


def from_spec(spec: dict) -> Potential:
    """Build a potential from a scenario mapping such as ``{kind: gaussian, alpha: 1, sigma: 1}``."""
    spec = dict(spec)
    kind = spec.pop("kind")
    scale = spec.pop("scale", None)
    if kind == "zero":
        V = zero()
    elif kind in ("star", "manufactured"):
        V = manufactured_star()
    elif kind == "gaussian":
        V = gaussian(spec.pop("alpha"), spec.pop("sigma"))
    elif kind == "power":
        V = power_well(spec.pop("alpha"), spec.pop("beta"))
    elif kind == "tabulated":
        V = read_table(spec.pop("path"))
    else:
        raise ValueError(f"unknown potential kind {kind!r}")
    if spec:
        raise ValueError(f"unknown keys for potential {kind!r}: {sorted(spec)}")
    if scale is not None:
        V = scaled(float(scale), V)
    return V
