"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each workload runs both backends on identical inputs and checks that the
results agree before reporting timings.
"""

import argparse
import statistics
import time

import numpy as np

from pgnlab import _pykernels, minima
from pgnlab.geometry import Family, exact_rows, make_body, scaled_basis
from pgnlab.realnum import cbrt2, golden_ratio, liouville

try:
    from pgnlab import _kernels as compiled
except ImportError:
    compiled = None


def enumeration_inputs(family, n, Q, target):
    body = make_body(family, n, Q, target)
    lattice = body.default_lattice()
    U = minima.reduced_basis(body)
    B = np.ascontiguousarray(scaled_basis(body, U, lattice), dtype=float)
    Z, groups = exact_rows(body, U, lattice)
    return (B, 1e-9, 10 ** 8, Z, groups)


def enumeration_workloads(quick):
    cases = [
        (Family.LINEAR_FORM, 2, 10 ** 5, cbrt2()),
        (Family.PRIMAL, 2, 10 ** 6, liouville()),
        (Family.PRIMAL, 3, 10 ** 4, cbrt2()),
        (Family.LINEAR_FORM, 3, 10 ** 4, liouville()),
    ]
    if quick:
        cases = cases[:2]
    for fam, n, Q, t in cases:
        yield f"enumerate {fam.value} n={n} Q=1e{len(str(Q)) - 1} {t.label}", "enumerate_min_basis", \
            enumeration_inputs(fam, n, Q, t)


def scan_workloads(quick):
    z = float(golden_ratio())
    cases = [(1, 20000), (2, 200), (3, 30), (4, 10)] if not quick else [(1, 2000), (2, 40)]
    for n, H in cases:
        yield f"ratio scan n={n} H={H}", "best_ratio_scan", (z, 0.0, n, H, 1, H, True, 32)


def same_result(a, b):
    if isinstance(a, tuple):
        return all(same_result(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        if a.dtype.kind == "f":
            return np.allclose(np.sort(a, axis=None), np.sort(b, axis=None), rtol=1e-12)
        return sorted(map(tuple, np.atleast_2d(a).tolist())) == sorted(map(tuple, np.atleast_2d(b).tolist()))
    return a == b


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return out, min(times), statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args(argv)
    if compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    print(f"{'workload':52s} {'compiled ms':>12s} {'python ms':>12s} {'speedup':>8s}  agree")
    for source in (enumeration_workloads, scan_workloads):
        for name, fn, inputs in source(args.quick):
            fast, t_fast, _ = best_of(getattr(compiled, fn), inputs, args.repeat)
            slow, t_slow, _ = best_of(getattr(_pykernels, fn), inputs, 1)
            print(f"{name:52s} {1e3 * t_fast:12.3f} {1e3 * t_slow:12.3f} {t_slow / t_fast:8.1f}  "
                  f"{same_result(fast, slow)}")


if __name__ == "__main__":
    main()
