"""Time the numba kernels against the pure numpy fallback.

Each backend runs in its own interpreter (the backend is fixed at import by
MRGRID_DISABLE_NUMBA).  Every workload is called once to warm up, so numba
compile time is excluded, then timed ``--repeat`` times; the best is kept.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from mrgrid import _kernels
from mrgrid import patterns as P
from mrgrid.constructions import mr_T102
from mrgrid.cycles import random_labeling
from mrgrid.cycles import count_simple_cycles
from mrgrid.topology import Topology, constraint_matrix

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
inst = mr_T102(4, 5)
H = constraint_matrix(inst).data
masks = P.correctable_masks(inst.topology, "t10h")
all16 = np.arange(1 << 16, dtype=np.int64)
all15 = np.arange(1 << 15, dtype=np.int64)
labels = random_labeling(6, 6, 40, rng).labels
ora = P.oracle_batch(Topology(3, 4, 1, 1, 1), 3, 24, 0)
all12 = np.arange(1 << 12, dtype=np.int64)

work = {
    f"rank of {masks.size} patterns (mr_T102 4x5)": lambda: _kernels.rank_of_columns(H, masks, inst.spec.poly, inst.spec.degree),
    "oracle T(3x4)(1,1,1), 4096 patterns": lambda: ora(all12),
    "regular T(3x5)(1,2,0), 32768 patterns": lambda: P.regular_batch(Topology(3, 5, 1, 2, 0))(all15),
    "t11h T(4x4)(1,1,2), 65536 patterns": lambda: P.t11h_batch(Topology(4, 4, 1, 1, 2))(all16),
    f"cycle scan K_{{6,6}}, {count_simple_cycles(6, 6)} cycles": lambda: _kernels.scan_cycles(labels, 12, False),
}
out = {}
for name, fn in work.items():
    fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps({"backend": _kernels.backend(), "times": out}))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("MRGRID_DISABLE_NUMBA", None)
    if disable:
        env["MRGRID_DISABLE_NUMBA"] = "1"
    res = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(res.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    if args.json:
        print(json.dumps({"numba": fast, "numpy": slow}, indent=2))
        return 0
    if fast["backend"] != "numba":
        print("numba is not installed; only the numpy backend was timed")
    width = max(len(k) for k in slow["times"])
    print(f"{'workload'.ljust(width)}  {fast['backend']:>10}  {'numpy':>10}  {'speedup':>8}")
    for name, t_np in slow["times"].items():
        t_nb = fast["times"][name]
        print(f"{name.ljust(width)}  {t_nb:>9.4f}s  {t_np:>9.4f}s  {t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
