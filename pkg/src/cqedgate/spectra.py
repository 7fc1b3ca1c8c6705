"""Reflected-intensity spectra in the H/V polarization basis.

The photonic qubit basis is rotated 45 degrees from the cavity axis, so with
amplitude reflection r on the cavity-coupled axis a photon is flipped with
intensity |(1 - r)/2|^2 and kept with |(1 + r)/2|^2. On top of that the QD
transition wanders (spectral diffusion, Gaussian offset beta of rms width
gamma_inhom) and the probe has a finite Gaussian bandwidth.
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import wofz

from .errors import ContractError, DegenerateWidthError, NegativeBackgroundWarning
from .model import DeviceParams, detunings, homogeneous_linewidth, reflection
from .states import Mixture, PolarizationPair, QdState, mixture_intensity

FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))


@dataclass(frozen=True)
class Spectrum:
    """Intensities on a strictly increasing frequency grid (GHz)."""

    frequency: np.ndarray
    intensity: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        freq = np.asarray(self.frequency, dtype=float)
        inten = np.asarray(self.intensity, dtype=float)
        object.__setattr__(self, "frequency", freq)
        object.__setattr__(self, "intensity", inten)
        if freq.ndim != 1 or freq.shape != inten.shape:
            raise ContractError("frequency and intensity must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(freq)) and np.all(np.isfinite(inten))):
            raise ContractError("spectrum contains NaN or Inf")
        if np.any(np.diff(freq) <= 0):
            raise ContractError("spectrum frequencies must be strictly increasing")
        if np.any(inten < 0):
            raise ContractError("spectrum intensities must be non-negative")
        if self.sigma is not None:
            sig = np.asarray(self.sigma, dtype=float)
            if sig.shape != freq.shape or not np.all(np.isfinite(sig)) or np.any(sig < 0):
                raise ContractError("sigma must be finite, non-negative and match the grid")
            object.__setattr__(self, "sigma", sig)

    def __len__(self):
        return len(self.frequency)


@dataclass(frozen=True)
class PulseSpectrum:
    """Gaussian probe power spectrum: centre and FWHM in GHz, total energy W0.

    ``fwhm == 0`` is a monochromatic probe.
    """

    center: float
    fwhm: float = 0.0
    total_energy: float = 1.0

    def __post_init__(self):
        if not self.fwhm >= 0:
            raise ContractError(f"fwhm={self.fwhm} must be >= 0")
        if not self.total_energy > 0:
            raise ContractError(f"total_energy={self.total_energy} must be > 0")


@dataclass(frozen=True)
class DiffusionQuadrature:
    """Quadrature settings for the Gaussian averages.

    ``node_count`` is the Gauss-Hermite order used for the probe-bandwidth
    integral and, with ``method="hermite"``, for the spectral-diffusion
    average too. ``method="exact"`` (default) evaluates the spectral-diffusion
    average in closed form with the Faddeeva function.
    """

    node_count: int = 40
    method: str = "exact"

    def __post_init__(self):
        if int(self.node_count) != self.node_count or self.node_count < 1:
            raise ContractError(f"node_count={self.node_count} must be a positive integer")
        if self.method not in ("exact", "hermite"):
            raise ContractError(f"unknown diffusion quadrature method {self.method!r}")


DEFAULT_QUAD = DiffusionQuadrature()


@lru_cache(maxsize=32)
def _hermite_rule(n):
    # probabilists' Hermite: weight exp(-x^2/2); normalize to a unit-mass Gaussian
    x, w = np.polynomial.hermite_e.hermegauss(n)
    return x, w / w.sum()


def diffusion_density(beta, gamma_inhom):
    """Gaussian density of the spectral-diffusion offset, rms width ``gamma_inhom``."""
    if gamma_inhom <= 0:
        raise DegenerateWidthError("gamma_inhom = 0: spectral diffusion is a delta, skip averaging")
    beta = np.asarray(beta, dtype=float)
    return np.exp(-beta**2 / (2 * gamma_inhom**2)) / np.sqrt(2 * np.pi * gamma_inhom**2)


def transfer_kernel(nu, beta, pair: PolarizationPair, state: QdState, params: DeviceParams):
    """|(1 - r)/2|^2 for a polarization flip, |(1 + r)/2|^2 otherwise."""
    r = reflection(nu, beta, state, params)
    amp = (1 - r) / 2 if pair.cross else (1 + r) / 2
    return np.abs(amp) ** 2


def _pole_form(nu, pair: PolarizationPair, params: DeviceParams):
    """Coefficients (a, b, p) with flip/keep amplitude = a + b / (beta - p).

    The |g> reflection coefficient is a Moebius map of beta with a single pole
    p in the upper half plane (Im p = gamma + g^2 Re(1/A) > 0).
    """
    delta_c, delta_a0 = detunings(nu, params)
    big_a = 1j * delta_c + params.kappa / 2
    u = params.kappa / (2 * big_a)
    v = 1j * params.kappa * params.g**2 / (2 * big_a**2)
    p = -delta_a0 + 1j * (homogeneous_linewidth(params) + params.g**2 / big_a)
    if pair.cross:
        return u, v, p
    return 1 - u, -v, p


def _gaussian_average_exact(nu, pair, params):
    a, b, p = _pole_form(nu, pair, params)
    sigma = params.gamma_inhom
    # E[1/(beta - p)] for beta ~ N(0, sigma^2), Im p > 0
    e1 = 1j * np.sqrt(np.pi / 2) / sigma * wofz(p / (np.sqrt(2) * sigma))
    cross_term = 2 * np.real(np.conj(a) * b * e1)
    with np.errstate(divide="ignore", invalid="ignore"):
        pole_term = np.where(b == 0, 0.0, np.abs(b) ** 2 * np.imag(e1) / np.imag(p))
    # exact value is >= 0; clip roundoff near perfect extinction
    return np.maximum(np.abs(a) ** 2 + np.where(b == 0, 0.0, cross_term) + pole_term, 0.0)


def _gaussian_average_hermite(nu, pair, params, node_count):
    x, w = _hermite_rule(node_count)
    nu = np.asarray(nu, dtype=float)
    beta = params.gamma_inhom * x
    k = transfer_kernel(nu[..., None], beta, pair, QdState.GROUND, params)
    return k @ w


def averaged_kernel(nu, pair: PolarizationPair, state: QdState, params: DeviceParams,
                    quad: DiffusionQuadrature = DEFAULT_QUAD):
    """Transfer kernel averaged over the spectral-diffusion offset.

    The bare cavity (|->) does not see the QD and is returned unaveraged, as
    is any device with ``gamma_inhom == 0``.
    """
    if state is QdState.MINUS or params.gamma_inhom == 0:
        return transfer_kernel(nu, 0.0, pair, state, params)
    if state is not QdState.GROUND:
        raise ContractError(f"averaged_kernel needs a pure QdState, got {state!r}")
    if quad.method == "hermite":
        out = _gaussian_average_hermite(nu, pair, params, quad.node_count)
    else:
        out = _gaussian_average_exact(nu, pair, params)
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def _pulse_intensity(centers, fwhm, energy, pair, state, params, quad):
    centers = np.asarray(centers, dtype=float)
    if fwhm == 0:
        return energy * averaged_kernel(centers, pair, state, params, quad)
    x, w = _hermite_rule(quad.node_count)
    nodes = centers[..., None] + fwhm * FWHM_TO_SIGMA * x
    return energy * (averaged_kernel(nodes, pair, state, params, quad) @ w)


def pulse_averaged_intensity(pulse: PulseSpectrum, pair: PolarizationPair, state,
                             params: DeviceParams, quad: DiffusionQuadrature = DEFAULT_QUAD):
    """Reflected energy W_{i->j} for a Gaussian probe pulse.

    Double average over the probe power spectrum (Gauss-Hermite, ``quad.node_count``
    nodes) and the spectral-diffusion offset. ``state`` may be a
    :class:`Mixture`, in which case the conditional energies are mixed.
    """
    if isinstance(state, Mixture):
        w_minus = _pulse_intensity(pulse.center, pulse.fwhm, pulse.total_energy, pair,
                                   QdState.MINUS, params, quad)
        w_ground = _pulse_intensity(pulse.center, pulse.fwhm, pulse.total_energy, pair,
                                    QdState.GROUND, params, quad)
        return float(mixture_intensity(state.alpha, w_minus, w_ground))
    return float(_pulse_intensity(pulse.center, pulse.fwhm, pulse.total_energy, pair,
                                  state, params, quad))


@dataclass(frozen=True)
class BackgroundPoly:
    """Additive background a0 + a1 (nu - nu_cav) + a2 (nu - nu_cav)^2, nu in GHz."""

    a0: float = 0.0
    a1: float = 0.0
    a2: float = 0.0

    def __call__(self, nu, nu_cavity):
        return background_poly(nu, (self.a0, self.a1, self.a2), nu_cavity)

    @property
    def is_zero(self):
        return self.a0 == self.a1 == self.a2 == 0


def background_poly(nu, coeffs, nu_cavity):
    """Quadratic background around the cavity resonance, clamped at zero.

    A :class:`NegativeBackgroundWarning` is issued when clamping happens.
    """
    a0, a1, a2 = coeffs
    x = np.asarray(nu, dtype=float) - nu_cavity
    value = a0 + a1 * x + a2 * x**2
    if np.any(value < 0):
        warnings.warn("background polynomial negative; clamped at 0", NegativeBackgroundWarning,
                      stacklevel=2)
        value = np.maximum(value, 0.0)
    return value[()] if value.ndim == 0 else value


def spectrum_scan(grid, pair: PolarizationPair, state, params: DeviceParams,
                  probe: PulseSpectrum | None = None, quad: DiffusionQuadrature = DEFAULT_QUAD,
                  background: BackgroundPoly | None = None) -> Spectrum:
    """Model spectrum: probe centred on each grid frequency, plus background.

    ``probe`` supplies FWHM and energy (its centre is ignored); ``None`` means a
    monochromatic probe of unit energy. ``state`` is a :class:`QdState` or
    :class:`Mixture`.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ContractError("scan grid must be a strictly increasing 1-d sequence")
    fwhm = 0.0 if probe is None else probe.fwhm
    energy = 1.0 if probe is None else probe.total_energy
    if isinstance(state, Mixture):
        w_minus = _pulse_intensity(grid, fwhm, energy, pair, QdState.MINUS, params, quad)
        w_ground = _pulse_intensity(grid, fwhm, energy, pair, QdState.GROUND, params, quad)
        intensity = mixture_intensity(state.alpha, w_minus, w_ground)
    else:
        intensity = _pulse_intensity(grid, fwhm, energy, pair, state, params, quad)
    if background is not None and not background.is_zero:
        intensity = intensity + background(grid, params.nu_cavity)
    return Spectrum(grid, np.asarray(intensity, dtype=float))
