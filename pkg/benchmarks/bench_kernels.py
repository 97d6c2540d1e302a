"""Compare the compiled and numpy kernel backends on the hot paths.

    python3 benchmarks/bench_kernels.py [--qubits 8 10 12] [--params 50] [--repeat 10]
"""

import argparse
import time

import numpy as np

from pooltile import _kernels
from pooltile.lattice import LatticeSpec, build_xxz
from pooltile.pools import TileSet, tile_pool_1d

TILES = "IXY IYX XYI XIY YXI YIX ZXY YZX YXZ XZY ZYX XYZ".split()


def _time(fn, repeat):
    fn()
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def run(n, m, repeat):
    rng = np.random.default_rng(n)
    psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    psi /= np.linalg.norm(psi)
    h = build_xxz(LatticeSpec.chain(n, 1.0))
    pool = tile_pool_1d(TileSet.from_labels(TILES), n)
    px = np.array([p.x_mask for p in pool.operators], dtype=np.uint64)
    pz = np.array([p.z_mask for p in pool.operators], dtype=np.uint64)
    pick = rng.integers(len(pool), size=m)
    gx, gz = px[pick], pz[pick]
    th = rng.uniform(-np.pi, np.pi, m)
    hx, hz, hc = h.x_masks, h.z_masks, h.coefficients

    rows = []
    backends = [("python", _kernels.python)]
    if _kernels.compiled is not None:
        backends.append(("compiled", _kernels.compiled))
    cases = {
        "energy_and_gradient": lambda k: k.energy_and_gradient(psi, gx, gz, th, hx, hz, hc),
        "pool_screen": lambda k: k.pool_gradients(psi, k.apply_pauli_sum(psi, hx, hz, hc), px, pz),
        "ansatz_state": lambda k: k.ansatz_state(psi, gx, gz, th),
    }
    for case, fn in cases.items():
        times = {name: _time(lambda: fn(k), repeat) for name, k in backends}
        rows.append((case, times))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[8, 10, 12])
    ap.add_argument("--params", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=10)
    args = ap.parse_args()
    print(f"active backend: {_kernels.BACKEND}")
    print(f"{'n':>3} {'kernel':<22} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for n in args.qubits:
        for case, t in run(n, args.params, args.repeat):
            py = t["python"] * 1e3
            if "compiled" in t:
                c = t["compiled"] * 1e3
                print(f"{n:>3} {case:<22} {py:>10.3f} {c:>12.3f} {py / c:>7.2f}x")
            else:
                print(f"{n:>3} {case:<22} {py:>10.3f} {'n/a':>12} {'':>8}")


if __name__ == "__main__":
    main()
