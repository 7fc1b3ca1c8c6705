"""Model truth table at the experimental operating point, next to the measured one.

    python scripts/reproduce_truth_table.py [--config cfg.json] [--fwhm GHZ]
"""

import argparse
from dataclasses import replace

from cqedgate import PolarizationPair, QdState, truth_table
from cqedgate.config import load_config

MEASURED = {
    QdState.GROUND: {"VV": 0.58, "VH": 0.38, "HV": 0.35, "HH": 0.61},
    QdState.MINUS: {"VV": 0.10, "VH": 0.98, "HV": 0.93, "HH": 0.07},
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--fwhm", type=float, help="override probe FWHM (GHz)")
    args = ap.parse_args()
    cfg = load_config(args.config)
    probe = cfg.probe if args.fwhm is None else replace(cfg.probe, fwhm=args.fwhm)
    table = truth_table(cfg.device, probe, cfg.alpha, cfg.backgrounds, cfg.operating_nu, cfg.quad)
    print(f"C = {cfg.device.cooperativity:.2f}, alpha = {cfg.alpha}, probe FWHM = {probe.fwhm} GHz")
    print(f"{'state':6} {'channel':8} {'model':>7} {'measured':>9} {'diff':>7}")
    for state, pair, p, _ in table.rows():
        m = MEASURED[state][pair.label]
        name = "g" if state is QdState.GROUND else "minus"
        print(f"{name:6} {str(pair):8} {p:7.3f} {m:9.2f} {p - m:+7.3f}")


if __name__ == "__main__":
    main()
