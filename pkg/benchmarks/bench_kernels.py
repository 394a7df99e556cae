"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--vertices 200] [--repeat 20]

Both paths are called directly, so one run compares them regardless of
RIGISCOPE_DISABLE_JIT.
"""
import argparse
import time

import numpy as np

from rigiscope import _kernels
from rigiscope.rigidity import trivial_generators


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--vertices", type=int, default=200)
    parser.add_argument("--dimension", type=int, default=3)
    parser.add_argument("--edge-prob", type=float, default=0.1)
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    v, n = args.vertices, args.dimension
    pts = rng.uniform(-0.5, 0.5, (v, n))
    H = np.hstack([pts, np.ones((v, 1))])
    iu = np.triu_indices(v, 1)
    keep = rng.random(iu[0].size) < args.edge_prob
    edges = np.column_stack([iu[0][keep], iu[1][keep]]).astype(np.int64)
    coeffs = np.append(np.ones(n), -1.0)
    gens = trivial_generators(coeffs)

    cases = {
        "projective_rows": ((pts, edges, -1.0), _kernels.projective_rows_nb, _kernels.projective_rows_np),
        "ambient_rows": ((H, edges, coeffs, False), _kernels.ambient_rows_nb, _kernels.ambient_rows_np),
        "transfer_blocks": ((pts, -1.0), _kernels.transfer_blocks_nb, _kernels.transfer_blocks_np),
        "restrict_generators": ((gens, H), _kernels.restrict_generators_nb,
                                _kernels.restrict_generators_np),
    }
    print(f"v={v} n={n} edges={len(edges)} repeat={args.repeat}")
    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for name, (inputs, nb, np_fn) in cases.items():
        nb(*inputs)  # compile
        diff = float(np.abs(nb(*inputs) - np_fn(*inputs)).max())
        t_nb = _best(lambda: nb(*inputs), args.repeat)
        t_np = _best(lambda: np_fn(*inputs), args.repeat)
        print(f"{name:<22}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>10.1f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
