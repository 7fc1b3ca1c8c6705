"""Sensitivity of model intensities to the Gauss-Hermite order.

    python scripts/convergence_check.py
"""

import numpy as np

from cqedgate import (CHANNELS, DeviceParams, DiffusionQuadrature, QdState, PulseSpectrum,
                      averaged_kernel, spectrum_scan)


def main():
    dev = DeviceParams.from_ghz()
    grid = dev.nu_cavity + np.linspace(-80, 80, 321)
    probe = PulseSpectrum(0.0, 4.2)
    reference = {p: spectrum_scan(grid, p, QdState.GROUND, dev, probe, DiffusionQuadrature(160))
                 for p in CHANNELS}
    print("probe-bandwidth integral (spectral diffusion in closed form)")
    for n in (5, 10, 20, 40, 80):
        worst = max(np.max(np.abs(spectrum_scan(grid, p, QdState.GROUND, dev, probe,
                                                DiffusionQuadrature(n)).intensity
                                  / reference[p].intensity - 1)) for p in CHANNELS)
        print(f"  nodes {n:4d}: max rel. deviation from 160 nodes {worst:.2e}")

    print("spectral-diffusion average by Gauss-Hermite instead of closed form (cw probe)")
    vh = CHANNELS[1]
    exact = averaged_kernel(grid, vh, QdState.GROUND, dev)
    for n in (10, 20, 40, 80, 160, 320):
        approx = averaged_kernel(grid, vh, QdState.GROUND, dev, DiffusionQuadrature(n, "hermite"))
        print(f"  nodes {n:4d}: max rel. deviation {np.max(np.abs(approx / exact - 1)):.2e}")


if __name__ == "__main__":
    main()
