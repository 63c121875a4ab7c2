"""How wide the mixing window is, and what it costs to ask for more.

Two questions, two tables.  First: across sizes, the gap between the
times where d(t) crosses 0.9 and 0.1 stays proportional to n in both
k-regimes (the window/n column barely moves while n grows eightfold).
Second: at a fixed size, tightening the accuracy demand eps makes the
symmetric window T(eps) - T(1-eps) grow, but only additively in n, never
touching the log-n leading term.
"""

import argparse
import math

from mixlab import ModelParams
from mixlab import lumped


def window(n: int, k: int, eps: float) -> int:
    times = lumped.mixing_times(ModelParams(n, k), (eps, 1.0 - eps))
    return times[eps] - times[1.0 - eps]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 1000, 2000, 4000])
    parser.add_argument("--fixed-n", type=int, default=2000)
    args = parser.parse_args()

    print("window between the d = 0.9 and d = 0.1 crossings")
    print(f"{'n':>6} {'k=n/5':>8} {'window/n':>9}   {'k=ceil(n^0.3)':>14} {'window/n':>9}")
    for n in args.sizes:
        big = window(n, n // 5, 0.1)
        small_k = math.ceil(n**0.3)
        small = window(n, small_k, 0.1)
        print(f"{n:>6} {big:>8} {big / n:>9.3f}   {small_k:>14} {small / n:>9.3f}")

    n = args.fixed_n
    print()
    print(f"window T(eps) - T(1-eps) at n = {n} as eps shrinks")
    print(f"{'eps':>6} {'k=' + str(n // 5):>10} {'k=10':>8}")
    for eps in (0.2, 0.1, 0.05, 0.02):
        print(f"{eps:>6} {window(n, n // 5, eps):>10} {window(n, 10, eps):>8}")


if __name__ == "__main__":
    main()
