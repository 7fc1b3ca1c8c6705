"""Least-squares estimation of device parameters from reflection spectra.

Parameters are addressed by name in user units (GHz, divided-by-2pi):

* shared: ``g``, ``kappa``, ``gamma_inhom``, ``nu_qd``, ``nu_cavity``, ``alpha``
* per curve: ``w0`` (intensity scale) and ``a0``, ``a1``, ``a2`` (background);
  a dataset with ``tag="x"`` uses ``w0@x``, ``a0@x``, ...
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContractError, NegativeBackgroundWarning, NonIdentifiableError
from .model import DeviceParams
from .spectra import (DEFAULT_QUAD, BackgroundPoly, DiffusionQuadrature, PulseSpectrum, Spectrum,
                      spectrum_scan)
from .states import Mixture, PolarizationPair, Pol, QdState
from .units import angular_to_ghz, ghz_to_angular

SHARED_PARAMS = ("g", "kappa", "gamma_inhom", "nu_qd", "nu_cavity", "alpha")
CURVE_PARAMS = ("w0", "a0", "a1", "a2")
_FREQUENCY_PARAMS = ("nu_qd", "nu_cavity")
_STATES = {"g": QdState.GROUND, "minus": QdState.MINUS}

LAMBDA0 = 1e-3
REL_STEP = 1e-6
ABS_STEP_FLOOR = 1e-12
FREQ_STEP_FLOOR = 1e-6  # GHz; absolute frequencies are fitted as offsets


@dataclass(frozen=True)
class FitData:
    """One measured curve: polarization channel and control state ('g', 'minus' or 'mixture')."""

    spectrum: Spectrum
    pair: PolarizationPair = PolarizationPair(Pol.V, Pol.H)
    state: str = "g"
    tag: str = ""

    def __post_init__(self):
        if self.state not in ("g", "minus", "mixture"):
            raise ContractError(f"unknown state label {self.state!r}")

    def name(self, base):
        return f"{base}@{self.tag}" if self.tag else base


@dataclass
class FitProblem:
    data: list
    free: list
    init: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    device: DeviceParams = field(default_factory=DeviceParams.from_ghz)
    probe_fwhm: float = 0.0
    quad: DiffusionQuadrature = DEFAULT_QUAD
    max_iter: int = 500

    def parameter_names(self):
        names = list(SHARED_PARAMS)
        for d in self.data:
            names += [d.name(b) for b in CURVE_PARAMS if d.name(b) not in names]
        return names

    def start_values(self):
        """All parameter values (free and fixed) before fitting."""
        dev = self.device
        values = {
            "g": float(angular_to_ghz(dev.g)),
            "kappa": float(angular_to_ghz(dev.kappa)),
            "gamma_inhom": float(angular_to_ghz(dev.gamma_inhom)),
            "nu_qd": dev.nu_qd,
            "nu_cavity": dev.nu_cavity,
        }
        for d in self.data:
            values.setdefault(d.name("w0"), 1.0)
            for b in ("a0", "a1", "a2"):
                values.setdefault(d.name(b), 0.0)
        unknown = set(self.init) - set(self.parameter_names())
        if unknown:
            raise ContractError(f"unknown parameters in init: {sorted(unknown)}")
        values.update({k: float(v) for k, v in self.init.items()})
        if any(d.state == "mixture" for d in self.data) and "alpha" not in values:
            raise ContractError("mixture data needs an 'alpha' value in init")
        return values

    def validate(self):
        names = self.parameter_names()
        values = self.start_values()
        if not self.data:
            raise ContractError("no data")
        if not self.free:
            raise ContractError("no free parameters")
        for name in self.free:
            if name not in names:
                raise ContractError(f"unknown free parameter {name!r}")
            if name not in self.bounds:
                raise ContractError(f"free parameter {name!r} has no bounds")
            lo, hi = self.bounds[name]
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ContractError(f"bounds for {name!r} must be finite with lo < hi")
            if name not in values:
                raise ContractError(f"free parameter {name!r} has no initial value")
            if not lo <= values[name] <= hi:
                raise ContractError(f"initial {name}={values[name]} outside [{lo}, {hi}]")
        if sum(len(d.spectrum) for d in self.data) < len(self.free):
            raise ContractError("fewer data points than free parameters")
        return values


@dataclass
class FitResult:
    names: list
    estimates: dict
    covariance: np.ndarray
    ci95: dict
    residual_norm: float
    iterations: int
    converged: bool
    values: dict
    problem: FitProblem
    history: list = field(default_factory=list)

    @property
    def params(self) -> DeviceParams:
        return device_from_values(self.problem.device, self.values)

    def covariance_for(self, names):
        """(names, matrix) restricted to ``names`` that were free."""
        idx = [self.names.index(n) for n in names if n in self.names]
        return [self.names[i] for i in idx], self.covariance[np.ix_(idx, idx)]


def device_from_values(device: DeviceParams, values: dict) -> DeviceParams:
    return replace(
        device,
        g=float(ghz_to_angular(values["g"])),
        kappa=float(ghz_to_angular(values["kappa"])),
        gamma_inhom=float(ghz_to_angular(values["gamma_inhom"])),
        nu_qd=values["nu_qd"],
        nu_cavity=values["nu_cavity"],
    )


def model_curves(problem: FitProblem, values: dict):
    """Model intensities for every dataset of ``problem`` at parameter ``values``."""
    params = device_from_values(problem.device, values)
    probe = PulseSpectrum(0.0, problem.probe_fwhm, 1.0)
    curves = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NegativeBackgroundWarning)
        for d in problem.data:
            state = Mixture(values["alpha"]) if d.state == "mixture" else _STATES[d.state]
            shape = spectrum_scan(d.spectrum.frequency, d.pair, state, params, probe, problem.quad)
            bg = BackgroundPoly(values[d.name("a0")], values[d.name("a1")], values[d.name("a2")])
            curve = values[d.name("w0")] * shape.intensity
            if not bg.is_zero:
                curve = curve + bg(d.spectrum.frequency, params.nu_cavity)
            curves.append(curve)
    return curves


def numerical_jacobian(fun, x, steps, lo=None, hi=None, method="forward", f0=None):
    """Finite-difference Jacobian of vector ``fun`` at ``x``.

    Forward differences flip to backward where ``x + step`` would leave
    ``[lo, hi]``.
    """
    x = np.asarray(x, dtype=float)
    f0 = fun(x) if f0 is None else f0
    jac = np.empty((f0.size, x.size))
    for j in range(x.size):
        h = steps[j]
        if method == "central":
            xp, xm = x.copy(), x.copy()
            xp[j] += h
            xm[j] -= h
            jac[:, j] = (fun(xp) - fun(xm)) / (2 * h)
            continue
        if hi is not None and x[j] + h > hi[j]:
            h = -h
        xp = x.copy()
        xp[j] += h
        jac[:, j] = (fun(xp) - f0) / h
    return jac


@dataclass
class _LMState:
    x: np.ndarray
    resid: np.ndarray
    cost: float
    jac: np.ndarray
    iterations: int
    converged: bool
    history: list


def levenberg_marquardt(fun, x0, lo, hi, step_fn, max_iter=500, lambda0=LAMBDA0,
                        rtol=1e-10, gtol=1e-12):
    """Bounded Levenberg-Marquardt on the residual vector ``fun(x)``.

    Damping is Marquardt-scaled (lambda * diag(J^T J)); lambda is divided by
    10 after an accepted step and multiplied by 10 after a rejected one.
    Parameters sitting on a bound with the gradient pointing outward are held
    fixed for that iteration. Stops when the accepted relative decrease of the
    cost is below ``rtol`` or the gradient norm is below ``gtol``.
    """
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    r = fun(x)
    cost = float(r @ r)
    history = [cost]
    lam = lambda0
    converged = False
    it = 0
    jac = numerical_jacobian(fun, x, step_fn(x), lo, hi, f0=r)
    while it < max_iter:
        it += 1
        if cost == 0.0:
            converged = True
            break
        grad = jac.T @ r
        active = ((x <= lo) & (grad > 0)) | ((x >= hi) & (grad < 0))
        free = ~active
        if not np.any(free) or np.linalg.norm(grad[free]) < gtol:
            converged = True
            break
        jf = jac[:, free]
        a = jf.T @ jf
        diag = np.maximum(np.diag(a), 1e-30 * max(np.max(np.diag(a)), 1e-300))
        accepted = False
        while lam <= 1e20:
            try:
                step_free = np.linalg.solve(a + lam * np.diag(diag), -grad[free])
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            step = np.zeros_like(x)
            step[free] = step_free
            x_new = np.clip(x + step, lo, hi)
            r_new = fun(x_new)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                accepted = True
                break
            lam *= 10
        if not accepted:
            # no damped step decreases the cost at working precision
            converged = True
            break
        rel = (cost - cost_new) / cost
        x, r, cost = x_new, r_new, cost_new
        history.append(cost)
        lam = max(lam / 10, 1e-12)
        jac = numerical_jacobian(fun, x, step_fn(x), lo, hi, f0=r)
        if rel < rtol:
            converged = True
            break
    return _LMState(x, r, cost, jac, it, converged, history)


def _null_space_parameters(jac, names, tol=1e-8):
    norms = np.linalg.norm(jac, axis=0)
    dead = [names[j] for j in np.flatnonzero(norms == 0)]
    if dead:
        return dead
    _, s, vt = np.linalg.svd(jac / norms, full_matrices=False)
    small = s < tol * s[0]
    if not np.any(small):
        return []
    weight = np.max(np.abs(vt[small]), axis=0)
    return [names[j] for j in np.flatnonzero(weight > 0.3)]


def fit(problem: FitProblem) -> FitResult:
    """Fit the free parameters of ``problem`` by Levenberg-Marquardt.

    Residuals are (model - data) / sigma, with sigma = 1 where a spectrum has
    no uncertainty column. The covariance is s^2 (J^T J)^-1 with
    s^2 = SSR / (N - p), and ``ci95`` is 1.96 sqrt(diag).

    Raises
    ------
    NonIdentifiableError
        If the Jacobian at the solution is rank deficient. The exception's
        ``result`` attribute holds the (uncertainty-free) best estimate.
    """
    start = problem.validate()
    names = list(problem.free)
    offsets = np.array([start[n] if n in _FREQUENCY_PARAMS else 0.0 for n in names])
    lo = np.array([problem.bounds[n][0] for n in names]) - offsets
    hi = np.array([problem.bounds[n][1] for n in names]) - offsets
    x0 = np.array([start[n] for n in names]) - offsets
    floors = np.array([FREQ_STEP_FLOOR if n in _FREQUENCY_PARAMS else ABS_STEP_FLOOR
                       for n in names])

    data = np.concatenate([d.spectrum.intensity for d in problem.data])
    sigma = np.concatenate([np.ones(len(d.spectrum)) if d.spectrum.sigma is None
                            else d.spectrum.sigma for d in problem.data])
    if np.any(sigma <= 0):
        raise ContractError("sigma column contains zero entries")

    def values_at(x):
        v = dict(start)
        v.update(zip(names, x + offsets))
        return v

    def residuals(x):
        return (np.concatenate(model_curves(problem, values_at(x))) - data) / sigma

    def steps(x):
        return np.maximum(REL_STEP * np.abs(x), floors)

    lm = levenberg_marquardt(residuals, x0, lo, hi, steps, max_iter=problem.max_iter)
    values = values_at(lm.x)
    values = {k: float(v) for k, v in values.items()}
    estimates = {n: values[n] for n in names}
    dof = max(data.size - len(names), 1)
    result = FitResult(names, estimates, np.full((len(names), len(names)), np.nan),
                       {n: np.nan for n in names}, lm.cost, lm.iterations, lm.converged,
                       values, problem, lm.history)

    bad = _null_space_parameters(lm.jac, names)
    if bad:
        err = NonIdentifiableError(bad)
        err.result = result
        raise err
    cov = (lm.cost / dof) * np.linalg.inv(lm.jac.T @ lm.jac)
    cov = 0.5 * (cov + cov.T)
    result.covariance = cov
    result.ci95 = {n: 1.96 * float(np.sqrt(max(cov[i, i], 0.0))) for i, n in enumerate(names)}
    return result


def fit_alpha(data_80ps: Spectrum, ground_fit: FitResult, pair: PolarizationPair | None = None,
              alpha_init: float = 0.5) -> FitResult:
    """Fit only the mixture probability alpha, everything else frozen at ``ground_fit``.

    The short-delay spectrum is modelled as alpha W^- + (1 - alpha) W^g using
    the first ground-state curve's channel, scale and background.
    """
    if not ground_fit.converged:
        raise ContractError("ground-state fit did not converge")
    template = next((d for d in ground_fit.problem.data if d.state == "g"),
                    ground_fit.problem.data[0])
    data = FitData(data_80ps, pair or template.pair, "mixture", template.tag)
    init = {k: v for k, v in ground_fit.values.items()
            if k in SHARED_PARAMS or k in {data.name(b) for b in CURVE_PARAMS}}
    init["alpha"] = alpha_init
    problem = replace(ground_fit.problem, data=[data], free=["alpha"], init=init,
                      bounds={"alpha": (0.0, 1.0)})
    return fit(problem)


def synthesize(params: DeviceParams, state, pair: PolarizationPair, grid,
               probe: PulseSpectrum | None = None, background: BackgroundPoly | None = None,
               rel_noise: float = 0.0, abs_noise: float = 0.0, seed=None,
               quad: DiffusionQuadrature = DEFAULT_QUAD) -> Spectrum:
    """Model spectrum with optional Gaussian noise, for round-trip tests.

    Multiplicative noise multiplies each point by (1 + rel_noise N(0,1));
    additive noise adds abs_noise N(0,1). Noisy spectra carry the generating
    standard deviation as their sigma column. Negative samples are clipped to 0.
    """
    clean = spectrum_scan(grid, pair, state, params, probe, quad, background)
    if rel_noise == 0 and abs_noise == 0:
        return clean
    if rel_noise < 0 or abs_noise < 0:
        raise ContractError("noise levels must be non-negative")
    rng = np.random.default_rng(seed)
    model = clean.intensity
    noisy = model * (1 + rel_noise * rng.standard_normal(model.size))
    noisy = noisy + abs_noise * rng.standard_normal(model.size)
    sigma = np.hypot(rel_noise * model, abs_noise)
    sigma = np.where(sigma > 0, sigma, max(abs_noise, rel_noise * np.max(model), 1e-300))
    return Spectrum(clean.frequency, np.maximum(noisy, 0.0), sigma)


def default_bounds(name: str, value: float):
    """Generous finite bounds for a parameter, used by the command line."""
    base = name.split("@")[0]
    if base in ("g", "kappa", "gamma_inhom"):
        return (0.0, max(10 * abs(value), 100.0))
    if base in _FREQUENCY_PARAMS:
        return (value - 100.0, value + 100.0)
    if base == "alpha":
        return (0.0, 1.0)
    if base == "w0":
        return (0.0, max(100 * abs(value), 1.0))
    return (-1e3, 1e3)
