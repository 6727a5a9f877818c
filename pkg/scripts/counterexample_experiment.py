"""How far the pinched point escapes the four-output orbit image.

For the diagonal pair D = diag(1, -1, 0, ...) and its half-pinched version
D_hat, the map L(X) = (tr E11 X, x*sigma X, ...) sends the orbit of D_hat
through (1, 0, 0, 0) while the orbit of D stays at a positive distance.
Along the orbit the image point has the form (s, omega) with |omega| = s,
so the analytic distance profile to (1, 0, 0, 0) is hypot(1 - s, s):
minimum sqrt(1/2) at s = 1/2 whenever s can move, i.e. for n >= 3.  At
n = 2 the first coordinate is frozen at 1 and the gap widens to 1.

This script sweeps the dimension and prints best-found vs analytic gaps.
"""

import argparse
import pathlib
import sys
import time

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from lrange import DescentOptions, eval_map, orbit_distance
from lrange.verify import counterexample_instance


def analytic_gap(n: int) -> float:
    if n == 2:
        return 1.0
    grid = np.linspace(0.0, 1.0, 400_001)
    return float(np.hypot(1.0 - grid, grid).min())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="2,3,4,5", help="comma list of n")
    parser.add_argument("--restarts", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'n':>3} {'member dist':>12} {'escape dist':>12} "
          f"{'analytic':>10} {'gap':>9} {'time':>7}")
    worst = 0.0
    for n in (int(x) for x in args.dims.split(",")):
        d, dhat, spec, _chain = counterexample_instance(n=n, m=1, l=4)
        target = np.asarray(eval_map(spec, dhat.to_hermitian()))
        opts = DescentOptions(restarts=args.restarts, seed=args.seed)

        start = time.perf_counter()
        member = orbit_distance(spec, dhat.to_hermitian(), target, opts)
        escape = orbit_distance(spec, d.to_hermitian(), target, opts)
        elapsed = time.perf_counter() - start

        expected = analytic_gap(n)
        gap = abs(escape.distance - expected)
        worst = max(worst, gap)
        print(f"{n:>3} {member.distance:>12.3e} {escape.distance:>12.8f} "
              f"{expected:>10.8f} {gap:>9.2e} {elapsed:>6.2f}s")

    print(f"\nworst |found - analytic| = {worst:.3e}")
    return 0 if worst <= 1e-3 else 1


if __name__ == "__main__":
    raise SystemExit(main())
