"""Confidence-interval coverage of the spectrum fit on synthetic noisy data.

    python scripts/coverage_experiment.py --seeds 100 --noise 0.01
"""

import argparse
import time

import numpy as np

from cqedgate import DeviceParams, FitData, FitProblem, PolarizationPair, QdState, fit, synthesize

TRUTH = {"g": 12.9, "kappa": 31.9, "gamma_inhom": 5.2}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--noise", type=float, default=0.01, help="relative noise level")
    ap.add_argument("--points", type=int, default=161)
    ap.add_argument("--span", type=float, default=80.0, help="half-width of the scan (GHz)")
    args = ap.parse_args()

    dev = DeviceParams.from_ghz()
    vh = PolarizationPair.parse("VH")
    grid = dev.nu_cavity + np.linspace(-args.span, args.span, args.points)
    bounds = {"g": (1, 40), "kappa": (5, 80), "gamma_inhom": (0.1, 20), "w0": (0.1, 10)}
    init = {"g": 11.0, "kappa": 29.0, "gamma_inhom": 4.0, "w0": 0.9}

    hits = {k: 0 for k in TRUTH}
    joint = 0
    est = {k: [] for k in TRUTH}
    t0 = time.perf_counter()
    for seed in range(args.seeds):
        spec = synthesize(dev, QdState.GROUND, vh, grid, rel_noise=args.noise, seed=seed)
        res = fit(FitProblem([FitData(spec, vh, "g")], list(bounds), init, bounds, dev))
        inside = {k: abs(res.estimates[k] - v) <= res.ci95[k] for k, v in TRUTH.items()}
        for k in TRUTH:
            hits[k] += inside[k]
            est[k].append(res.estimates[k])
        joint += all(inside.values())
    elapsed = time.perf_counter() - t0

    print(f"{args.seeds} fits, {args.noise:.1%} noise, {elapsed:.1f} s")
    for k, v in TRUTH.items():
        e = np.array(est[k])
        print(f"{k:12} truth {v:6.2f}  mean {e.mean():8.4f}  sd {e.std(ddof=1):.4f}  "
              f"coverage {hits[k]}/{args.seeds}")
    print(f"joint coverage {joint}/{args.seeds} (independent expectation {0.95**3:.2f})")


if __name__ == "__main__":
    main()
