"""Polarization-flip cNOT gate model for a QD spin coupled to a one-sided micropillar cavity.

Frequencies at the API boundary are in GHz (ordinary frequency); internally
rates are angular (rad/ns). See ``README.md`` for the conventions.
"""

__version__ = "0.1.0"

from .dynamics import (LifetimeModel, RabiModel, excitation_probability, pulse_area,
                       purcell_rate, qubit_lifetime, survival_alpha)
from .errors import (ContractError, CqedError, DegenerateContrastError,
                     DegenerateParametersError, DegenerateWidthError, NegativeBackgroundWarning,
                     NonIdentifiableError)
from .fitting import FitData, FitProblem, FitResult, fit, fit_alpha, synthesize
from .gate import (GateTable, IntensityQuadruple, JonesVector, channel_intensities,
                   ideal_table, polarization_transfer, probability_from_intensities, truth_table)
from .model import (DeviceParams, cooperativity, detunings, homogeneous_linewidth,
                    mean_field_transient, reflection, reflection_bare, reflection_coupled,
                    transient_reflection)
from .spectra import (BackgroundPoly, DiffusionQuadrature, PulseSpectrum, Spectrum,
                      averaged_kernel, background_poly, diffusion_density,
                      pulse_averaged_intensity, spectrum_scan, transfer_kernel)
from .states import CHANNELS, Mixture, Pol, PolarizationPair, QdState, mixture_intensity
