"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from twirlkit import kernels
from twirlkit.ctqec import bit_flip_generator, codeword, recovery_three_qubit_bitflip
from twirlkit.twirl import ad_twirl_probs


def cases():
    q = tuple(ad_twirl_probs(1e-3))
    gen = bit_flip_generator(1.0) + 10.0 * (recovery_three_qubit_bitflip().superoperator() - np.eye(64))
    psi = codeword()
    y0 = np.outer(psi, psi.conj()).reshape(-1)
    return {
        "pta_orbit (1e5 steps)": lambda k: k.pta_orbit(q, (1.0, 0.0, 0.0, 0.0), 100_000),
        "pta_fixed_point (lambda=1e-3)": lambda k: k.pta_fixed_point(q, q, 1e-12, 1_000_000),
        "rk4_linear (64x64, 1000 steps)": lambda k: k.rk4_linear(gen, y0, 1e-3, 1000, 10),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    names = sorted(kernels.BACKENDS)
    if "cython" not in names:
        print("compiled extension not built; timing the pure-Python kernels only")
    print(f"{'kernel':34s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in cases().items():
        best = {n: min(timeit.repeat(lambda: fn(kernels.BACKENDS[n]), number=1, repeat=args.repeat)) for n in names}
        row = f"{label:34s}" + "".join(f"{best[n] * 1e3:10.1f}ms" for n in names)
        if len(names) == 2:
            row += f"{best['python'] / best['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
