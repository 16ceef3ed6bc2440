"""Compare the compiled and numpy propagation kernels.

    python benchmarks/bench_kernels.py [--repeat N] [--sectors N]

Times one forward run and one adjoint sweep over the demo scenario's blind
matrices, the same on a larger synthetic chain, and reports the speed-up.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from spillplan import _kernels_py
from spillplan.backbone import build_backbone
from spillplan.scenario import load_demo
from spillplan.solver import PlanModel

try:
    from spillplan import _kernels as _compiled
except ImportError:
    _compiled = None


def demo_problem():
    s = load_demo()
    b = build_backbone(s)
    model = PlanModel(s, b)
    fracs = model.plan_fracs(b.first[1], "disperse", b.second_boom("stabilize"))
    return model.blind, model.absorbing, fracs, model.inj, model.w


def synthetic_problem(n: int, T: int = 24, seed: int = 0):
    rng = np.random.default_rng(seed)
    absorbing = (np.arange(n) >= n // 2).astype(float)
    m = rng.random((T, n, n)) * (rng.random((T, n, n)) < 0.2)
    m[:, np.arange(n), np.arange(n)] += 1.0
    m /= m.sum(axis=2, keepdims=True)
    m[:, absorbing > 0, :] = 0.0
    fracs = rng.random((T, n)) * 0.5
    inj = np.zeros((T, n))
    inj[:6, 0] = 1000.0
    w = (rng.random(n) < 0.3) * absorbing
    return (np.ascontiguousarray(m), absorbing, np.ascontiguousarray(fracs), inj, w)


def time_backend(impl, problem, repeat: int) -> tuple[float, float]:
    moff, absorbing, fracs, inj, w = problem
    T, n = fracs.shape
    z = np.zeros(n)
    fwd = min(timeit.repeat(lambda: impl.forward(moff, absorbing, fracs, inj, z, z, 0, T), number=repeat, repeat=3))
    bwd = min(timeit.repeat(lambda: impl.backward(moff, absorbing, fracs, inj, w, 0, T), number=repeat, repeat=3))
    return fwd / repeat * 1e6, bwd / repeat * 1e6


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000)
    parser.add_argument("--sectors", type=int, default=60, help="size of the synthetic problem")
    args = parser.parse_args(argv)

    if _compiled is None:
        print("compiled kernels not built; only the numpy backend is available", file=sys.stderr)
    problems = [("demo (12 sectors)", demo_problem()), (f"synthetic ({args.sectors} sectors)", synthetic_problem(args.sectors))]
    print(f"{'problem':<26}{'kernel':<10}{'numpy us':>12}{'cython us':>12}{'speed-up':>10}")
    for label, problem in problems:
        py = time_backend(_kernels_py, problem, args.repeat)
        cy = time_backend(_compiled, problem, args.repeat) if _compiled else (float("nan"),) * 2
        for kernel, p, c in zip(("forward", "backward"), py, cy):
            print(f"{label:<26}{kernel:<10}{p:>12.1f}{c:>12.1f}{p / c:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
