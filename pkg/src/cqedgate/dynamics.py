"""Control-qubit preparation (Rabi) and |-> lifetime (Purcell) models."""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .model import DEFAULT_G_GHZ, DEFAULT_KAPPA_GHZ
from .units import ghz_to_angular, ps_to_rate

DEFAULT_P_PI_UW = 0.12
DEFAULT_GAMMA0_INV_PS = 530.0


@dataclass(frozen=True)
class RabiModel:
    """pi-pulse average pump power (uW) and phenomenological damping eta >= 0."""

    p_pi: float = DEFAULT_P_PI_UW
    damping: float = 0.0

    def __post_init__(self):
        if not self.p_pi > 0:
            raise ContractError(f"p_pi={self.p_pi} must be > 0")
        if not self.damping >= 0:
            raise ContractError(f"damping={self.damping} must be >= 0")


@dataclass(frozen=True)
class LifetimeModel:
    """g and kappa in rad/ns, residual decay rate gamma0 in 1/ns."""

    g: float
    kappa: float
    gamma0: float

    def __post_init__(self):
        if min(self.g, self.kappa, self.gamma0) <= 0:
            raise ContractError("g, kappa and gamma0 must all be positive")

    @classmethod
    def from_ghz(cls, g=DEFAULT_G_GHZ, kappa=DEFAULT_KAPPA_GHZ, gamma0_inv_ps=DEFAULT_GAMMA0_INV_PS):
        return cls(float(ghz_to_angular(g)), float(ghz_to_angular(kappa)),
                   float(ps_to_rate(gamma0_inv_ps)))


def pulse_area(p_avg, model: RabiModel):
    """theta = pi sqrt(P / P_pi): the area scales with field amplitude."""
    p_avg = np.asarray(p_avg, dtype=float)
    if np.any(p_avg < 0):
        raise ContractError("pump power must be >= 0")
    return np.pi * np.sqrt(p_avg / model.p_pi)


def excitation_probability(p_avg, model: RabiModel):
    """Population of |-> after the pump pulse.

    1/2 (1 - cos(theta) exp(-eta theta)); with eta = 0 this is sin^2(theta/2).
    The exponential envelope stands in for excitation-induced dephasing.
    """
    theta = pulse_area(p_avg, model)
    alpha0 = 0.5 * (1 - np.cos(theta) * np.exp(-model.damping * theta))
    return alpha0[()] if alpha0.ndim == 0 else alpha0


def purcell_rate(delta_ghz, model: LifetimeModel):
    """Gamma_sigma = 4 g^2 kappa / (4 Delta^2 + kappa^2) + Gamma_0, in 1/ns."""
    delta = ghz_to_angular(delta_ghz)
    return 4 * model.g**2 * model.kappa / (4 * delta**2 + model.kappa**2) + model.gamma0


def qubit_lifetime(delta_ghz, model: LifetimeModel):
    """Lifetime (ps) of the detuned transition at cavity detuning Delta/2pi (GHz)."""
    return 1000.0 / purcell_rate(delta_ghz, model)


def survival_alpha(alpha0, delay_ps, lifetime_ps):
    """Optional estimate alpha = alpha0 exp(-delay / lifetime).

    The measured alpha after the pi pulse is fitted directly instead; this
    simple decay model underestimates it (exp(-80/460) = 0.84 vs 0.93).
    """
    if np.any(np.asarray(delay_ps) < 0) or not np.all(np.asarray(lifetime_ps) > 0):
        raise ContractError("delay must be >= 0 and lifetime > 0")
    return alpha0 * np.exp(-np.asarray(delay_ps, dtype=float) / lifetime_ps)
