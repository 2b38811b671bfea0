#!/usr/bin/env python3
"""Compare both analytic covariance routes against the Monte Carlo oracle.

Equivalent to `gvswap verify` on the bundled base parameter set, with a
compact console table instead of the JSON report.
"""

import argparse
import json
import time
from pathlib import Path

import numpy as np

from gvswap import ModelParams, SimulationConfig, expected_cov_matrix, mc_expected_cov

DEFAULT_PARAMS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "base_params.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--params", default=DEFAULT_PARAMS)
    ap.add_argument("--paths", type=int, default=20000)
    ap.add_argument("--steps", type=int, default=2520)
    ap.add_argument("--seed", type=int, default=20240901)
    args = ap.parse_args()

    params = ModelParams.from_json_dict(json.loads(Path(args.params).read_text()))
    config = SimulationConfig(n_paths=args.paths, n_steps=args.steps, seed=args.seed)

    start = time.perf_counter()
    mc = mc_expected_cov(params, config)
    sim_time = time.perf_counter() - start
    stderr = np.array(mc.diagnostics["stderr"])

    print(f"simulation: {args.paths} paths x {args.steps} steps in {sim_time:.1f}s")
    print(f"{'entry':>6} {'mc':>13} {'stderr':>10} {'series':>13} {'z':>7} {'approx':>13} {'z':>7}")
    matrices = {m: expected_cov_matrix(params, method=m) for m in ("series", "approx")}
    worst = 0.0
    for i in range(3):
        for j in range(i, 3):
            row = [f"({i},{j})", f"{mc.entries[i, j]:13.6e}", f"{stderr[i, j]:10.2e}"]
            for m in ("series", "approx"):
                value = matrices[m].entries[i, j]
                z = (value - mc.entries[i, j]) / stderr[i, j]
                worst = max(worst, abs(z))
                row += [f"{value:13.6e}", f"{z:+7.2f}"]
            print(" ".join(row))
    print(f"max |z| = {worst:.2f}")


if __name__ == "__main__":
    main()
