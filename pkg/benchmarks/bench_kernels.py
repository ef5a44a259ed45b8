"""Compare the compiled stencil kernels with the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--n 64] [--repeat 5] [--threads 1 2 4]

Times one fused evolution right-hand side (``maxwell_rhs``) and the three
first-order operators on an ``n^3`` grid, and checks both backends agree
bit for bit.
"""

import argparse
import timeit

import numpy as np

from qfield import _backend


def _args(n, rng):
    h = 1.0 / n
    y = rng.normal(size=(7, n, n, n))
    rho = rng.normal(size=(n, n, n))
    J = rng.normal(size=(3, n, n, n))
    v = np.ascontiguousarray(y[1:4])
    f = np.ascontiguousarray(y[:1])
    return {
        "maxwell_rhs": (lambda k, out: k.maxwell_rhs(y, rho, J, 1.0, h, h, h, out), (7, n, n, n)),
        "grad": (lambda k, out: k.grad(f, h, h, h, out), (3, n, n, n)),
        "div": (lambda k, out: k.div(v, h, h, h, out), (n, n, n)),
        "curl": (lambda k, out: k.curl(v, h, h, h, out), (3, n, n, n)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int, nargs="+", default=[1])
    args = ap.parse_args()

    py = _backend.get_kernels("python")
    native = _backend.get_kernels("native") if _backend.native_available() else None
    cases = _args(args.n, np.random.default_rng(0))
    print(f"grid {args.n}^3, best of {args.repeat}")
    print(f"{'kernel':<12} {'python ms':>10} " + " ".join(f"{'native/' + str(t) + ' ms':>14}" for t in args.threads)
          + f" {'speedup':>8}  identical")
    for name, (call, shape) in cases.items():
        out_py = np.empty(shape)
        t_py = min(timeit.repeat(lambda: call(py, out_py), number=1, repeat=args.repeat)) * 1e3
        if native is None:
            print(f"{name:<12} {t_py:10.2f}   (compiled kernels not built)")
            continue
        times, same = [], True
        for t in args.threads:
            native.set_num_threads(t)
            out_nat = np.empty(shape)
            times.append(min(timeit.repeat(lambda: call(native, out_nat), number=1, repeat=args.repeat)) * 1e3)
            same &= out_nat.tobytes() == out_py.tobytes()
        cols = " ".join(f"{t:14.2f}" for t in times)
        print(f"{name:<12} {t_py:10.2f} {cols} {t_py / min(times):8.1f}x  {same}")


if __name__ == "__main__":
    main()
