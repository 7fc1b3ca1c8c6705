"""Unit conversions.

User-facing frequencies and widths are "divided-by-2pi" values in GHz, the way
they are quoted experimentally (g/2pi = 12.9 GHz, ...). Internally every rate
is angular, in rad/ns. 1 GHz (ordinary) == 2*pi rad/ns.
"""

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact
TWO_PI = 2.0 * np.pi


def ghz_to_angular(f_ghz):
    """Ordinary frequency in GHz -> angular rate in rad/ns."""
    return np.multiply(TWO_PI, f_ghz)


def angular_to_ghz(w):
    return np.divide(w, TWO_PI)


def nm_to_ghz(wavelength_nm):
    """Vacuum wavelength (nm) to frequency (GHz), using nu * lambda = c."""
    # c [m/s] / (lambda [nm] * 1e-9) / 1e9 == c / lambda_nm
    return np.divide(SPEED_OF_LIGHT, wavelength_nm)


def ghz_to_nm(f_ghz):
    return np.divide(SPEED_OF_LIGHT, f_ghz)


def ps_to_rate(lifetime_ps):
    """Lifetime in ps -> decay rate in 1/ns. Infinite lifetime gives zero rate."""
    return np.divide(1000.0, lifetime_ps)


def rate_to_ps(rate_per_ns):
    return np.divide(1000.0, rate_per_ns)
