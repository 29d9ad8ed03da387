"""Time the hot kernels with numba and with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each backend runs in its own interpreter because the switch is read once at
import time.  Numba timings exclude the first (compiling) call.
"""
import argparse
import json
import os
import subprocess
import sys
import time

CHILD = r"""
import json, sys, time
import numpy as np
from skindefect import kernels, qr
from skindefect.builders import build_hn
from skindefect.lattice import assemble
from skindefect.presets import hn_reference
from skindefect.spectral import spectral_loop, twist_grid, twisted_eigvals

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
spec = build_hn(hn_reference(50))
slices = twisted_eigvals(spec, twist_grid(512))
slices = np.vstack([slices, slices[:1]])
verts = np.concatenate([slices[:, b] for b in range(10)])
verts = np.append(verts, verts[0])
pts = rng.normal(size=2000) + 1j * rng.normal(size=2000)
A = assemble(spec)

cases = {
    "track_bands (513 x 50)": lambda: kernels.track_bands(slices, 1e-9),
    "polyline_winding (5k verts, 2k pts)": lambda: kernels.polyline_winding(verts, pts),
    "polyline_distance (5k verts, 2k pts)": lambda: kernels.polyline_distance(verts, pts),
    "qr_eigvals (50 x 50)": lambda: qr.qr_eigvals(A),
    "spectral_loop (N=50, n_k=512)": lambda: spectral_loop(spec, 512, workers=1),
}
out = {}
for name, fn in cases.items():
    fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, NHSE_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", CHILD, str(repeat)], env=env, check=True,
                         capture_output=True, text=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    t0 = time.perf_counter()
    nb = run(False, args.repeat)
    np_ = run(True, args.repeat)
    width = max(map(len, nb))
    print(f"{'kernel':<{width}}  {'numba [ms]':>11}  {'numpy [ms]':>11}  {'speedup':>8}")
    for name in nb:
        a, b = 1e3 * nb[name], 1e3 * np_[name]
        print(f"{name:<{width}}  {a:11.2f}  {b:11.2f}  {b / a:7.1f}x")
    print(f"(best of {args.repeat}; total wall time {time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
