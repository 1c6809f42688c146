"""Time the hot kernels with numba and with the plain numpy path.

Each backend runs in its own interpreter because the choice is made at
import time (RADWAVE_DISABLE_NUMBA=1 selects numpy).  Usage:

    python benchmarks/bench_kernels.py            # both backends, table
    python benchmarks/bench_kernels.py --quick    # smaller problems
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _best(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return min(ts)


def child(quick: bool) -> dict:
    import numpy as np

    from radwave import _kernels as K
    from radwave import data, potentials, spectrum, steady
    from radwave.evolver import CoefficientField, SolverConfig, evolve
    from radwave.radial import RadialGrid

    V = potentials.manufactured_star()
    T = 5.0 if quick else 20.0
    grid = RadialGrid.covering(0.01, 12.0)
    init = data.bump_state(grid, 1.0, 3.0, 0.5)
    cfg = SolverConfig(h=0.01, cfl=0.5, T=T)
    n_quad = 120 if quick else 240
    op = spectrum.assemble(potentials.gaussian(1.0, 1.0), n_quad=n_quad)
    out = {
        "numba": K.USE_NUMBA,
        "leapfrog": _best(lambda: evolve(init, CoefficientField.static(V), cfg), 3),
        "shoot": _best(lambda: steady.shoot(1.0, V, 200.0), 3),
        "jacobi": _best(lambda: spectrum.eigenvalues(op), 1 if not quick else 2),
    }
    out["sizes"] = {"leapfrog_steps": int(round(T / cfg.dt)), "jacobi_n": n_quad}
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(child(args.quick)))
        return 0
    rows = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, RADWAVE_DISABLE_NUMBA=flag)
        cmd = [sys.executable, __file__, "--child"] + (["--quick"] if args.quick else [])
        res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        rows[label] = json.loads(res.stdout.strip().splitlines()[-1])
    print(f"{'kernel':<10}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}")
    for k in ("leapfrog", "shoot", "jacobi"):
        a, b = rows["numba"][k], rows["numpy"][k]
        print(f"{k:<10}{a:>12.4f}{b:>12.4f}{b / a:>10.1f}")
    print("sizes:", rows["numba"]["sizes"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
