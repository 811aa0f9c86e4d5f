#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-numpy fallback.

Two layers:

* micro: spec-program evaluation throughput on representative integrands
  (both backends in-process, same compiled programs);
* end-to-end: a soundness sweep run in a subprocess per backend, selected
  via HOPIAL_BACKEND, since the kernel is bound at import time.

Usage: python benchmarks/bench_backends.py [--count 100]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hopial import funcspace as fs  # noqa: E402
from hopial._kernel import backends  # noqa: E402


def _programs():
    iv = fs.Interval(0.0, 1.0)
    pwl = fs.PiecewiseLinear([(0, 0.2), (0.3, 1.0), (0.7, 0.4), (1, 0.9)])
    specs = {
        "piecewise-linear f": pwl,
        "hardy integrand": fs.Product(
            [fs.PowerLaw(1.0, -0.98), fs.Exponential(1.0, 0.5)]
        ),
        "lemma integrand": fs.Product(
            [fs.AbsVal(pwl), fs.Power(fs.AbsVal(fs.derivative(pwl, iv)), 2.0)]
        ),
        "weight kernel": fs.Product(
            [
                fs.Power(fs.Sum([fs.Constant(1.0), fs.PowerLaw(1.5, 1.3)]), 2.5),
                fs.Power(fs.Sum([fs.Constant(1.0), fs.PowerLaw(0.5, 2.0)]), -0.5),
            ]
        ),
    }
    return {name: fs.compile_program(sp, iv) for name, sp in specs.items()}


def micro(repeats=400, n_points=960):
    rng = np.random.default_rng(0)
    xs = rng.uniform(0.001, 0.999, n_points)
    impls = backends()
    print(f"-- micro: eval_program, {n_points} points x {repeats} calls --")
    for name, prog in _programs().items():
        row = {}
        for bname, impl in impls.items():
            impl.eval_program(prog.ops, prog.fargs, prog.iargs, prog.data,
                              xs, prog.stack_depth)  # warm up
            t0 = time.perf_counter()
            for _ in range(repeats):
                impl.eval_program(prog.ops, prog.fargs, prog.iargs, prog.data,
                                  xs, prog.stack_depth)
            row[bname] = time.perf_counter() - t0
        line = f"{name:<22}"
        for bname, dt in sorted(row.items()):
            line += f"  {bname}: {dt * 1e3 / repeats:8.3f} ms/call"
        if "pure" in row and "compiled" in row:
            line += f"  speedup: {row['pure'] / row['compiled']:5.2f}x"
        print(line)


def end_to_end(count):
    if "compiled" not in backends():
        print("-- end-to-end: compiled kernel not built, skipping --")
        return
    print(f"-- end-to-end: sweep of {count} instances per backend --")
    code = (
        "import time, hopial\n"
        "from hopial import funcspace as fs, verify as vf\n"
        "from hopial.constants import ExponentSet\n"
        "iv = fs.Interval(0.0, 1.0)\n"
        "fam = fs.RandomPiecewiseLinear(4, (0.0, 1.0), seed=7, interval=iv)\n"
        "t0 = time.perf_counter()\n"
        f"sw = vf.sweep('T2.27', fam, fs.Sum([fs.Constant(1.0), fs.PowerLaw(1.0, 1.0)]),\n"
        f"              fs.Sum([fs.Constant(1.0), fs.PowerLaw(0.5, 2.0)]),\n"
        f"              ExponentSet(p=2.0), iv, {count})\n"
        "dt = time.perf_counter() - t0\n"
        "print(f'{hopial.kernel_backend}: {dt:.3f}s  "
        "(max_ratio={sw.max_ratio:.6f}, holds={sw.n_holds})')\n"
    )
    for backend in ("pure", "compiled"):
        env = dict(os.environ, HOPIAL_BACKEND=backend)
        env["PYTHONPATH"] = os.pathsep.join(
            [os.path.join(os.path.dirname(__file__), "..", "src"),
             env.get("PYTHONPATH", "")]
        )
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--count", type=int, default=100)
    args = parser.parse_args()
    print(f"available backends: {sorted(backends())}")
    micro()
    end_to_end(args.count)


if __name__ == "__main__":
    main()
