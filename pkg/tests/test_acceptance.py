"""Acceptance criteria 1-10, each reported as one PASS/FAIL line.

The lines are printed by each test and collected again in the terminal
summary under "acceptance criteria".
"""

import csv
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from cqedgate import (CHANNELS, DeviceParams, DiffusionQuadrature, FitData, FitProblem,
                      LifetimeModel, Mixture, PolarizationPair, PulseSpectrum, QdState, fit,
                      ideal_table, pulse_averaged_intensity, qubit_lifetime, reflection_bare,
                      reflection_coupled, spectrum_scan, synthesize, transient_reflection)
from cqedgate.cli import main

from _oracles import mp_reflection, slowest_decay

VH = PolarizationPair.parse("VH")

TABLE_1 = {
    ("g", "VV"): 0.58, ("g", "VH"): 0.38, ("g", "HV"): 0.35, ("g", "HH"): 0.61,
    ("minus", "VV"): 0.10, ("minus", "VH"): 0.98, ("minus", "HV"): 0.93, ("minus", "HH"): 0.07,
}
FIXTURE = Path(__file__).parent / "fixtures" / "cw_reflectivity.csv"


def test_criterion_01_resonant_reflection(acceptance):
    t0 = time.perf_counter()
    dev = DeviceParams.from_ghz()
    dev = replace(dev, nu_qd=dev.nu_cavity)
    c = dev.cooperativity
    r = reflection_coupled(dev.nu_cavity, 0.0, dev)
    oracle = mp_reflection(dev.nu_cavity, dev.nu_cavity, dev.nu_qd, 0.0, dev.g, dev.kappa,
                           dev.gamma)
    closed = (c - 1) / (c + 1)
    err_oracle = abs(r - oracle) / abs(oracle)
    err_closed = abs(r - closed) / closed
    elapsed = time.perf_counter() - t0
    ok = abs(c - 69.5) < 0.1 and err_oracle < 1e-9 and err_closed < 1e-9 and elapsed < 0.5
    acceptance(1, "resonant reflection", ok,
               f"C={c:.3f} r={r.real:.10f} (C-1)/(C+1)={closed:.10f} "
               f"rel.err vs 50-digit oracle={err_oracle:.1e} [{elapsed * 1e3:.1f} ms]")
    assert ok


def test_criterion_02_ode_oracle(acceptance):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        dev = DeviceParams.from_ghz(g=rng.uniform(2, 25), kappa=rng.uniform(15, 40),
                                    spont_lifetime_ps=rng.uniform(20, 300),
                                    gamma_inhom=0.0, nu_cavity=3e5,
                                    nu_qd=3e5 + rng.uniform(-5, 5))
        nu = 3e5 + rng.uniform(-30, 30)
        fastest = max(dev.kappa, dev.g, abs(2 * np.pi * (nu - 3e5)),
                      abs(2 * np.pi * (dev.nu_qd - nu)))
        r_ode = transient_reflection(dev, nu, 32 / slowest_decay(dev, nu), 0.01 / fastest)
        r = reflection_coupled(nu, 0.0, dev)
        worst = max(worst, abs(r_ode - r) / abs(r))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 10
    acceptance(2, "ODE-oracle equivalence", ok,
               f"max rel. deviation over 20 tuples={worst:.2e} (tol 1e-6) [{elapsed:.2f} s]")
    assert ok


def test_criterion_03_unitarity(acceptance):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    bare_dev = DeviceParams.from_ghz()
    nu = bare_dev.nu_cavity + rng.uniform(-1e4, 1e4, 100_000)
    bare = np.max(np.abs(np.abs(reflection_bare(nu, bare_dev)) - 1))
    lossless = DeviceParams.from_ghz(spont_lifetime_ps=np.inf)
    grid = lossless.nu_cavity + np.linspace(-150, 150, 1000)
    atom = np.max(np.abs(np.abs(reflection_coupled(grid, 0.0, lossless)) - 1))
    partition = 0.0
    for _ in range(200):
        pulse = PulseSpectrum(bare_dev.nu_cavity + rng.uniform(-100, 100), rng.uniform(0, 40),
                              rng.uniform(0.01, 100))
        for first, other in (("V", "H"), ("H", "V")):
            w = sum(pulse_averaged_intensity(pulse, PolarizationPair.parse(first + o),
                                             QdState.MINUS, bare_dev) for o in (other, first))
            partition = max(partition, abs(w - pulse.total_energy) / pulse.total_energy)
    elapsed = time.perf_counter() - t0
    ok = bare < 1e-12 and atom < 1e-12 and partition < 1e-10 and elapsed < 5
    acceptance(3, "unitarity suites", ok,
               f"bare max||r|-1|={bare:.1e}, lossless atom={atom:.1e}, "
               f"energy partition={partition:.1e} [{elapsed:.2f} s]")
    assert ok


def test_criterion_04_pulsed_contrast(acceptance):
    dev = DeviceParams.from_ghz()
    pulse = PulseSpectrum(dev.nu_cavity, 4.2)
    i_max = pulse_averaged_intensity(pulse, VH, QdState.MINUS, dev)
    i_min = pulse_averaged_intensity(pulse, VH, QdState.GROUND, dev)
    contrast = (i_max - i_min) / i_max
    ok = abs(contrast - 0.60) <= 0.05
    acceptance(4, "pulsed contrast", ok, f"(I_max-I_min)/I_max={contrast:.3f} (target 0.60 +- 0.05)")
    assert ok


def test_criterion_05_mixture_ratio(acceptance):
    dev = DeviceParams.from_ghz()
    pulse = PulseSpectrum(dev.nu_cavity, 4.2)
    ratio = (pulse_averaged_intensity(pulse, VH, Mixture(0.93), dev)
             / pulse_averaged_intensity(pulse, VH, QdState.MINUS, dev))
    ok = abs(ratio - 0.95) <= 0.02
    acceptance(5, "mixture ratio", ok, f"W^pi/W^-={ratio:.4f} (target 0.95 +- 0.02)")
    assert ok


def test_criterion_06_truth_table(acceptance, tmp_path):
    out = tmp_path / "table.csv"
    t0 = time.perf_counter()
    code = main(["truth-table", "--csv", str(out)])
    elapsed = time.perf_counter() - t0
    rows = list(csv.DictReader(out.open()))
    got = {(r["control_state"], r["in_pol"] + r["out_pol"]): float(r["probability"]) for r in rows}
    misses = {k: got[k] - v for k, v in TABLE_1.items() if abs(got[k] - v) > 0.08}
    ok = code == 0 and not misses and elapsed < 5
    detail = " ".join(f"{s}:{c}={got[(s, c)]:.3f}/{TABLE_1[(s, c)]:.2f}" for s, c in TABLE_1)
    acceptance(6, "truth table", ok,
               f"model/target {detail}; {len(misses)} of 8 outside +-0.08 [{elapsed:.2f} s]")
    assert ok


def test_criterion_07_lifetime(acceptance):
    model = LifetimeModel.from_ghz()
    values = {d: float(qubit_lifetime(d, model)) for d in (113, 169, 230)}
    targets = {113: 230, 169: 350, 230: 460}
    asym = float(qubit_lifetime(1e6, model))
    ok = all(abs(values[d] / targets[d] - 1) <= 0.15 for d in targets) and abs(asym / 530 - 1) < 1e-3
    acceptance(7, "lifetime model", ok,
               ", ".join(f"{d} GHz: {values[d]:.0f} ps (target {targets[d]})" for d in targets)
               + f", 1e6 GHz: {asym:.2f} ps")
    assert ok


def test_criterion_08_ideal_gate(acceptance):
    table = ideal_table(DeviceParams.from_ghz()).as_array()
    err = np.max(np.abs(table - np.array([[1, 0, 0, 1], [0, 1, 1, 0]])))
    ok = err < 1e-9
    acceptance(8, "ideal-gate limit", ok, f"max |P - permutation|={err:.1e}")
    assert ok


def _fit_problem(spec):
    return FitProblem([FitData(spec, VH, "g")], ["g", "kappa", "gamma_inhom", "w0"],
                      {"g": 11.0, "kappa": 29.0, "gamma_inhom": 4.0, "w0": 0.9},
                      {"g": (1, 40), "kappa": (5, 80), "gamma_inhom": (0.1, 20), "w0": (0.1, 10)},
                      DeviceParams.from_ghz())


def test_criterion_09_fit_round_trip(acceptance):
    truth = {"g": 12.9, "kappa": 31.9, "gamma_inhom": 5.2}
    dev = DeviceParams.from_ghz()
    grid = dev.nu_cavity + np.linspace(-80, 80, 161)
    t0 = time.perf_counter()
    clean = fit(_fit_problem(synthesize(dev, QdState.GROUND, VH, grid)))
    rel = max(abs(clean.estimates[k] / v - 1) for k, v in truth.items())
    hits = {k: 0 for k in truth}
    joint = 0
    for seed in range(100):
        spec = synthesize(dev, QdState.GROUND, VH, grid, rel_noise=0.01, seed=seed)
        res = fit(_fit_problem(spec))
        inside = {k: abs(res.estimates[k] - v) <= res.ci95[k] for k, v in truth.items()}
        for k in truth:
            hits[k] += inside[k]
        joint += all(inside.values())
    elapsed = time.perf_counter() - t0
    ok = rel < 1e-3 and min(hits.values()) >= 90 and elapsed < 120
    acceptance(9, "fit round trip", ok,
               f"noiseless max rel.err={rel:.1e}; ci95 coverage per parameter "
               + ", ".join(f"{k} {v}/100" for k, v in hits.items())
               + f" (joint {joint}/100) [{elapsed:.1f} s]")
    assert ok


def test_criterion_10_quadrature_convergence(acceptance):
    dev = DeviceParams.from_ghz()
    grid = dev.nu_cavity + np.linspace(-80, 80, 321)
    probe = PulseSpectrum(0.0, 4.2)
    base, doubled = DiffusionQuadrature(40), DiffusionQuadrature(80)
    worst = 0.0
    for pair in CHANNELS:
        for state in (QdState.GROUND, QdState.MINUS, Mixture(0.93)):
            a = spectrum_scan(grid, pair, state, dev, probe, base).intensity
            b = spectrum_scan(grid, pair, state, dev, probe, doubled).intensity
            worst = max(worst, float(np.max(np.abs(a - b) / np.abs(b))))
    ok = worst < 1e-8
    acceptance(10, "quadrature convergence", ok,
               f"max rel. change 40 -> 80 nodes over 4 channels x 3 states x 321 points="
               f"{worst:.1e}")
    assert ok


@pytest.mark.skipif(not FIXTURE.exists(), reason="no digitized cw reflectivity fixture shipped")
def test_digitized_fixture_fit():
    rows = list(csv.DictReader(FIXTURE.open()))
    from cqedgate import Spectrum
    freq = np.array([float(r["frequency_ghz"]) for r in rows])
    order = np.argsort(freq)
    spec = Spectrum(freq[order], np.array([float(r["intensity"]) for r in rows])[order])
    res = fit(_fit_problem(spec))
    for k, v in {"g": 12.9, "kappa": 31.9, "gamma_inhom": 5.2}.items():
        assert abs(res.estimates[k] - v) <= res.ci95[k]
