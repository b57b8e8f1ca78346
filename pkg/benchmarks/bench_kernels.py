"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 400]

Times each kernel on random exact inputs, then a full equilibrium solve of
the PULSE(1, 3, 1) gadget with each backend swapped in.
"""
import argparse
import random
import timeit
from fractions import Fraction

from nashflow import gadgets, kernels
from nashflow.engine import solve_equilibrium


def _rats(rng, n, lo=-50, hi=50):
    return [Fraction(rng.randint(lo, hi), rng.randint(1, 40)) for _ in range(n)]


def kernel_cases(size, rng):
    slacks = [abs(x) + 1 for x in _rats(rng, size)]
    rates = _rats(rng, size)
    n = max(4, size // 50)
    matrix = [_rats(rng, n) for _ in range(n + 2)]
    x = _rats(rng, n)
    rhs = [sum(a * b for a, b in zip(row, x)) for row in matrix]
    return {
        "earliest_event": lambda m: m.earliest_event(slacks, rates),
        "axpy": lambda m: m.axpy(slacks, rates, Fraction(3, 7)),
        "solve_exact": lambda m: m.solve_exact(matrix, rhs),
    }


def solve_with(module, inst):
    saved = kernels.earliest_event, kernels.axpy, kernels.solve_exact
    kernels.earliest_event, kernels.axpy, kernels.solve_exact = (
        module.earliest_event, module.axpy, module.solve_exact)
    try:
        return solve_equilibrium(inst)
    finally:
        kernels.earliest_event, kernels.axpy, kernels.solve_exact = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    mods = kernels.backends()
    if "cython" not in mods:
        print("compiled kernels not built; timing the Python backend only")
    cases = kernel_cases(args.size, random.Random(args.seed))
    print(f"{'case':<16}" + "".join(f"{name:>14}" for name in mods) + f"{'speedup':>10}")
    for label, fn in cases.items():
        times = {}
        for name, mod in mods.items():
            times[name] = min(timeit.repeat(lambda: fn(mod), number=20, repeat=args.repeat)) / 20
        row = f"{label:<16}" + "".join(f"{times[n] * 1e3:>12.3f}ms" for n in mods)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>9.2f}x"
        print(row)

    inst = gadgets.pulse(1, 3, 1)
    times = {}
    for name, mod in mods.items():
        times[name] = min(timeit.repeat(lambda: solve_with(mod, inst), number=1, repeat=args.repeat))
    row = f"{'pulse(1,3,1)':<16}" + "".join(f"{times[n] * 1e3:>12.3f}ms" for n in mods)
    if "cython" in times:
        row += f"{times['python'] / times['cython']:>9.2f}x"
    print(row)


if __name__ == "__main__":
    main()
