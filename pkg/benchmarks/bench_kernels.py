"""Time the compiled and pure-Python series kernels side by side.

    python benchmarks/bench_kernels.py [--order 12] [--repeat 2000]

Also times a full ``analyze`` of each built-in under both backends (in
subprocesses, since the backend is chosen at import).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from ruledsurf.kernels import available_backends


def kernel_cases(order):
    rng = np.random.default_rng(0)
    a = rng.standard_normal(order + 1)
    b = rng.standard_normal(order + 1)
    a[0], b[0] = 2.0, 1.5  # keep div and sqrt away from zero
    return {
        "mul": lambda m: m.mul(a, b),
        "div": lambda m: m.div(a, b),
        "sqrt": lambda m: m.sqrt(a),
        "exp": lambda m: m.exp(a),
        "sincos": lambda m: m.sincos(a),
    }


def bench_kernels(order, repeat):
    backends = available_backends()
    rows = []
    for name, fn in kernel_cases(order).items():
        times = {}
        for bname, mod in backends.items():
            times[bname] = min(timeit.repeat(lambda: fn(mod), number=repeat, repeat=3)) / repeat
        rows.append((name, times))
    return list(backends), rows


def bench_analyze(name, pure):
    env = dict(os.environ, RULEDSURF_PURE_PYTHON="1" if pure else "0")
    code = (
        "import time, io, contextlib\n"
        "from ruledsurf.cli import main\n"
        "t = time.perf_counter()\n"
        "with contextlib.redirect_stdout(io.StringIO()):\n"
        f"    main(['analyze', {name!r}])\n"
        "print(time.perf_counter() - t)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--skip-analyze", action="store_true")
    args = ap.parse_args(argv)

    names, rows = bench_kernels(args.order, args.repeat)
    print(f"kernels at order {args.order} (microseconds per call)")
    print(f"{'kernel':8s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for kernel, times in rows:
        line = f"{kernel:8s}" + "".join(f"{times[n] * 1e6:12.2f}" for n in names)
        if "compiled" in times:
            line += f"{times['python'] / times['compiled']:11.1f}x"
        print(line)
    if "compiled" not in names:
        print("compiled extension not importable; only the fallback was timed")

    if not args.skip_analyze:
        print("\nanalyze on built-ins (seconds, includes import)")
        print(f"{'scene':8s}{'python':>12s}{'compiled':>12s}")
        for scene in ("g1", "g2", "g3", "g4", "g5"):
            py = bench_analyze(scene, pure=True)
            co = bench_analyze(scene, pure=False)
            print(f"{scene:8s}{py:12.3f}{co:12.3f}")


if __name__ == "__main__":
    main()
