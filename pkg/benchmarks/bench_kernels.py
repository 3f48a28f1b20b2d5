"""Time the numpy and numba implementations of each hot kernel side by side.

    python benchmarks/bench_kernels.py [--repeat 20]

The first numba call (compilation) is excluded; each row reports the best
of ``repeat`` runs and the max absolute difference between the two paths.
"""
import argparse
import time

import numpy as np

from wavetrain import _kernels as K


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases():
    xi = np.linspace(-12.0, 12.0, 200_000)
    psi0 = np.exp(-0.5 * xi ** 2) * np.exp(0.3j * xi)
    v = 0.5e-4 * (0.5 * xi ** 2 + 40.0)

    def kick(fn):
        def run():
            z = psi0.copy()
            fn(z, v, 1e-5)
            return z
        return run

    yield "hermite_function_values n=40", (lambda: K.hermite_function_values_np(40, xi)), \
        (lambda: K.hermite_function_values_nb(40, xi))
    yield "hermite_table n_max=16", (lambda: K.hermite_table_np(16, xi)), (lambda: K.hermite_table_nb(16, xi))
    yield "gauss_hermite_nodes order=200", (lambda: K.gauss_hermite_nodes_np(200)[0]), \
        (lambda: K.gauss_hermite_nodes_nb(200)[0])
    yield "phase_kick 200k points", kick(K.phase_kick_np), kick(K.phase_kick_nb)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is unavailable (or disabled by WAVETRAIN_DISABLE_NUMBA); nothing to compare")
    print(f"{'kernel':34s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, f_np, f_nb in cases():
        diff = float(np.max(np.abs(np.asarray(f_np()) - np.asarray(f_nb()))))  # also warms up the jit
        t_np, t_nb = best_of(f_np, args.repeat), best_of(f_nb, args.repeat)
        print(f"{name:34s} {1e3 * t_np:10.3f} {1e3 * t_nb:10.3f} {t_np / t_nb:8.2f} {diff:10.1e}")


if __name__ == "__main__":
    main()
