"""Polarization transfer and the controlled-NOT truth table."""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContractError, DegenerateContrastError
from .model import DeviceParams
from .spectra import (DEFAULT_QUAD, BackgroundPoly, DiffusionQuadrature, PulseSpectrum,
                      pulse_averaged_intensity)
from .states import CHANNELS, Mixture, PolarizationPair, QdState, mixture_intensity

__all__ = [
    "JonesVector", "IntensityQuadruple", "GateTable", "polarization_transfer",
    "mixture_intensity", "probability_from_intensities", "channel_intensities", "truth_table",
    "ideal_table",
]

_SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class JonesVector:
    """Polarization amplitudes on the cavity axes x (coupled) and y (uncoupled)."""

    a_x: complex
    a_y: complex

    @classmethod
    def from_hv(cls, h, v):
        # |H> = (|x> + |y>)/sqrt2, |V> = (|y> - |x>)/sqrt2
        return cls(_SQRT_HALF * (h - v), _SQRT_HALF * (h + v))

    @classmethod
    def horizontal(cls):
        return cls.from_hv(1.0, 0.0)

    @classmethod
    def vertical(cls):
        return cls.from_hv(0.0, 1.0)

    @property
    def h(self) -> complex:
        return _SQRT_HALF * (self.a_x + self.a_y)

    @property
    def v(self) -> complex:
        return _SQRT_HALF * (self.a_y - self.a_x)

    @property
    def norm2(self) -> float:
        return abs(self.a_x) ** 2 + abs(self.a_y) ** 2


def polarization_transfer(vec: JonesVector, r: complex) -> JonesVector:
    """Reflect off the sample: the x component picks up r, y is mirrored unchanged."""
    return JonesVector(r * vec.a_x, vec.a_y)


@dataclass(frozen=True)
class IntensityQuadruple:
    """Reference intensities of one channel at the operating frequency.

    i_g: QD in |g>; i_pi: after the pi pulse (mixture); i_inf: g -> infinity;
    i_0: QD fully decoupled (|->).
    """

    i_g: float
    i_pi: float
    i_inf: float
    i_0: float

    def __post_init__(self):
        if min(self.i_g, self.i_pi, self.i_inf, self.i_0) < 0:
            raise ContractError("intensities must be non-negative")


def probability_from_intensities(q: IntensityQuadruple, which: str, orientation: str) -> float:
    """Map a measured intensity onto [I_inf, I_0] as a detection probability.

    ``which`` picks I_g ("g") or I_pi ("pi"); ``orientation`` is "cross" for
    orthogonal input/output polarizations and "same" otherwise.
    """
    if which not in ("g", "pi"):
        raise ContractError(f"which must be 'g' or 'pi', got {which!r}")
    measured = q.i_g if which == "g" else q.i_pi
    scale = max(q.i_g, q.i_pi, q.i_inf, q.i_0)
    if abs(q.i_0 - q.i_inf) <= 1e-12 * scale or scale == 0:
        raise DegenerateContrastError("I_0 and I_inf coincide; probability undefined")
    if orientation == "cross":
        return (measured - q.i_inf) / (q.i_0 - q.i_inf)
    if orientation == "same":
        return (measured - q.i_0) / (q.i_inf - q.i_0)
    raise ContractError(f"orientation must be 'cross' or 'same', got {orientation!r}")


@dataclass
class GateTable:
    """P_{i->j} for control states |g> and |-> (pi-pumped) and the four channels."""

    probability: dict = field(default_factory=dict)
    uncertainty: dict = field(default_factory=dict)

    def __getitem__(self, key):
        state, channel = key
        return self.probability[(state, _channel(channel))]

    def rows(self):
        """(state, pair, probability, uncertainty) in Table order: |g> first, VV VH HV HH."""
        for state in (QdState.GROUND, QdState.MINUS):
            for pair in CHANNELS:
                yield (state, pair, self.probability[(state, pair)],
                       self.uncertainty.get((state, pair), 0.0))

    def as_array(self):
        return np.array([[self.probability[(s, c)] for c in CHANNELS]
                         for s in (QdState.GROUND, QdState.MINUS)])


def _channel(channel):
    return channel if isinstance(channel, PolarizationPair) else PolarizationPair.parse(channel)


def channel_intensities(params: DeviceParams, probe: PulseSpectrum, alpha: float,
                        pair: PolarizationPair, background: BackgroundPoly | None = None,
                        quad: DiffusionQuadrature = DEFAULT_QUAD,
                        g_infinity_factor: float = 1e4) -> IntensityQuadruple:
    """The four reference intensities of one channel at ``probe.center``.

    I_inf reuses the |g> model with g scaled by ``g_infinity_factor``.
    """
    i_g = pulse_averaged_intensity(probe, pair, QdState.GROUND, params, quad)
    i_0 = pulse_averaged_intensity(probe, pair, QdState.MINUS, params, quad)
    strong = replace(params, g=params.g * g_infinity_factor)
    i_inf = pulse_averaged_intensity(probe, pair, QdState.GROUND, strong, quad)
    i_pi = mixture_intensity(alpha, i_0, i_g)
    bg = 0.0 if background is None else float(background(probe.center, params.nu_cavity))
    return IntensityQuadruple(i_g + bg, i_pi + bg, i_inf + bg, i_0 + bg)


def _table_values(params, probe, alpha, backgrounds, quad, g_infinity_factor):
    values = {}
    for pair in CHANNELS:
        q = channel_intensities(params, probe, alpha, pair, backgrounds.get(pair), quad,
                                g_infinity_factor)
        orientation = "cross" if pair.cross else "same"
        values[(QdState.GROUND, pair)] = probability_from_intensities(q, "g", orientation)
        values[(QdState.MINUS, pair)] = probability_from_intensities(q, "pi", orientation)
    return values


# parameters a fit covariance may carry, with how to perturb them
_PARAM_SETTERS = {
    "g": lambda p, a, d: (replace(p, g=p.g + 2 * np.pi * d), a),
    "kappa": lambda p, a, d: (replace(p, kappa=p.kappa + 2 * np.pi * d), a),
    "gamma_inhom": lambda p, a, d: (replace(p, gamma_inhom=p.gamma_inhom + 2 * np.pi * d), a),
    "nu_qd": lambda p, a, d: (replace(p, nu_qd=p.nu_qd + d), a),
    "nu_cavity": lambda p, a, d: (replace(p, nu_cavity=p.nu_cavity + d), a),
    "alpha": lambda p, a, d: (p, a + d),
}


def truth_table(params: DeviceParams, probe: PulseSpectrum, alpha: float,
                backgrounds: dict | None = None, operating_nu: float | None = None,
                quad: DiffusionQuadrature = DEFAULT_QUAD, g_infinity_factor: float = 1e4,
                covariance=None) -> GateTable:
    """Model cNOT truth table at the operating frequency.

    Parameters
    ----------
    params : DeviceParams
    probe : PulseSpectrum
        Probe bandwidth and energy. Its centre is replaced by ``operating_nu``
        when that is given; otherwise the QD resonance is used.
    alpha : float
        Probability that the pi pulse left the QD in |->.
    backgrounds : dict, optional
        ``{PolarizationPair or "VH": BackgroundPoly}`` per channel.
    covariance : tuple (names, matrix), optional
        Fit covariance over parameters among g, kappa, gamma_inhom (GHz),
        nu_qd, nu_cavity (GHz) and alpha. When given, 95% uncertainties are
        propagated to first order; otherwise they are reported as zero.
    """
    mixture_intensity(alpha, 0.0, 0.0)  # validates alpha
    backgrounds = {_channel(k): v for k, v in (backgrounds or {}).items()}
    center = params.nu_qd if operating_nu is None else float(operating_nu)
    probe = replace(probe, center=center)
    values = _table_values(params, probe, alpha, backgrounds, quad, g_infinity_factor)
    table = GateTable(values, {key: 0.0 for key in values})
    if covariance is None:
        return table

    names, cov = covariance
    cov = np.asarray(cov, dtype=float)
    keep = [i for i, n in enumerate(names) if n in _PARAM_SETTERS]
    keys = list(values)
    jac = np.zeros((len(keys), len(keep)))
    for col, i in enumerate(keep):
        step = 1e-5 * max(1.0, np.sqrt(abs(cov[i, i])))
        if names[i] == "alpha":
            step = min(step, 1e-5)
        p_hi, a_hi = _PARAM_SETTERS[names[i]](params, alpha, step)
        p_lo, a_lo = _PARAM_SETTERS[names[i]](params, alpha, -step)
        a_hi, a_lo = min(a_hi, 1.0), max(a_lo, 0.0)
        hi = _table_values(p_hi, probe, a_hi, backgrounds, quad, g_infinity_factor)
        lo = _table_values(p_lo, probe, a_lo, backgrounds, quad, g_infinity_factor)
        width = (a_hi - a_lo) if names[i] == "alpha" else 2 * step
        jac[:, col] = [(hi[k] - lo[k]) / width for k in keys]
    sub = cov[np.ix_(keep, keep)]
    var = np.einsum("ij,jk,ik->i", jac, sub, jac)
    table.uncertainty = {k: 1.96 * float(np.sqrt(max(v, 0.0))) for k, v in zip(keys, var)}
    return table


def ideal_table(params: DeviceParams, operating_nu: float | None = None,
                coupling_boost: float = 1e6) -> GateTable:
    """Ideal-gate limit: C -> infinity, alpha = 1, monochromatic, no background."""
    center = params.nu_qd if operating_nu is None else operating_nu
    strong = replace(params, g=max(params.g, params.kappa) * coupling_boost)
    return truth_table(strong, PulseSpectrum(center, 0.0, 1.0), 1.0, operating_nu=center)
