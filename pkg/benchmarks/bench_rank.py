"""Compare the compiled and pure-Python dense rank kernels.

    python3 benchmarks/bench_rank.py [--sizes 50 100 200] [--repeat 3]

Also times one end-to-end Betti computation under each backend.
"""

import argparse
import os
import random
import subprocess
import sys
import time

from gctop.linalg import kernels
from gctop.linalg.rank import PRIMARY_PRIME


def random_rows(n: int, rng: random.Random) -> list[list[int]]:
    # Boundary matrices are sparse with +-1 entries; fill in about 5%.
    return [[rng.choice((-1, 1)) % PRIMARY_PRIME if rng.random() < 0.05 else 0 for _ in range(n)] for _ in range(n)]


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def end_to_end(g: int, pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["GCTOP_PURE_PYTHON"] = "1"
    code = (
        "import time; from gctop.complex import betti_numbers; from gctop.linalg.rank import RankConfig;"
        f"t=time.perf_counter(); betti_numbers({g}, 0, 'cv', rank_config=RankConfig(dense_threshold=10**9));"
        "print(time.perf_counter()-t)"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--genus", type=int, default=4, help="genus for the end-to-end run")
    args = parser.parse_args()

    if kernels.compiled_backend is None:
        sys.exit("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
    rng = random.Random(0)
    print(f"{'n':>6} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for n in args.sizes:
        rows = random_rows(n, rng)
        ranks = {
            name: backend.dense_rank_mod_p(rows, n, PRIMARY_PRIME)
            for name, backend in (("py", kernels.python_backend), ("c", kernels.compiled_backend))
        }
        assert ranks["py"] == ranks["c"], ranks
        tp = best_of(lambda: kernels.python_backend.dense_rank_mod_p(rows, n, PRIMARY_PRIME), args.repeat)
        tc = best_of(lambda: kernels.compiled_backend.dense_rank_mod_p(rows, n, PRIMARY_PRIME), args.repeat)
        print(f"{n:>6} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f}")

    tp, tc = end_to_end(args.genus, pure=True), end_to_end(args.genus, pure=False)
    print(f"betti g={args.genus} cv, dense ranks: python {tp:.2f} s, cython {tc:.2f} s")


if __name__ == "__main__":
    main()
