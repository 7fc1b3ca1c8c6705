import numpy as np
import pytest
from hypothesis import given, strategies as st

from cqedgate import (CHANNELS, BackgroundPoly, ContractError, DegenerateContrastError,
                      IntensityQuadruple, JonesVector, PolarizationPair, PulseSpectrum, QdState,
                      channel_intensities, ideal_table, mixture_intensity, polarization_transfer,
                      probability_from_intensities, truth_table)

cplx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@given(h=cplx, v=cplx)
def test_jones_basis_round_trip(h, v):
    vec = JonesVector.from_hv(h, v)
    assert vec.h == pytest.approx(h, abs=1e-12)
    assert vec.v == pytest.approx(v, abs=1e-12)
    assert vec.norm2 == pytest.approx(abs(h) ** 2 + abs(v) ** 2, abs=1e-10)


@given(h=cplx, v=cplx, phase=st.floats(0, 2 * np.pi))
def test_unit_reflection_preserves_norm(h, v, phase):
    vec = JonesVector.from_hv(h, v)
    out = polarization_transfer(vec, np.exp(1j * phase))
    assert out.norm2 == pytest.approx(vec.norm2, rel=1e-12, abs=1e-12)


def test_pi_phase_flips_polarization():
    out = polarization_transfer(JonesVector.vertical(), -1.0)
    assert abs(out.h) == pytest.approx(1.0) and abs(out.v) < 1e-15
    out = polarization_transfer(JonesVector.horizontal(), -1.0)
    assert abs(out.v) == pytest.approx(1.0) and abs(out.h) < 1e-15
    same = polarization_transfer(JonesVector.horizontal(), 1.0)
    assert same == JonesVector.horizontal()


def test_probability_orientation():
    q = IntensityQuadruple(i_g=0.3, i_pi=0.9, i_inf=0.1, i_0=1.1)
    assert probability_from_intensities(q, "g", "cross") == pytest.approx(0.2)
    assert probability_from_intensities(q, "pi", "cross") == pytest.approx(0.8)
    assert probability_from_intensities(q, "g", "same") == pytest.approx(0.8)


def test_probability_errors():
    with pytest.raises(DegenerateContrastError):
        probability_from_intensities(IntensityQuadruple(1, 1, 1, 1), "g", "cross")
    q = IntensityQuadruple(0.3, 0.9, 0.1, 1.1)
    with pytest.raises(ContractError):
        probability_from_intensities(q, "x", "cross")
    with pytest.raises(ContractError):
        probability_from_intensities(q, "g", "diag")
    with pytest.raises(ContractError):
        IntensityQuadruple(-1, 0, 0, 0)


def test_mixture_intensity_bounds():
    assert mixture_intensity(0.25, 4.0, 0.0) == 1.0
    with pytest.raises(ContractError):
        mixture_intensity(1.5, 1.0, 1.0)


def test_ideal_table_is_permutation(device):
    table = ideal_table(device)
    expected = np.array([[1, 0, 0, 1], [0, 1, 1, 0]], dtype=float)
    np.testing.assert_allclose(table.as_array(), expected, atol=1e-9)


def test_alpha_zero_collapses_rows(device):
    probe = PulseSpectrum(0.0, 4.2)
    table = truth_table(device, probe, 0.0)
    np.testing.assert_allclose(table.as_array()[0], table.as_array()[1], atol=1e-14)


def test_constant_background_cancels(device):
    probe = PulseSpectrum(0.0, 4.2)
    bg = {p: BackgroundPoly(0.07) for p in CHANNELS}
    a = truth_table(device, probe, 0.93).as_array()
    b = truth_table(device, probe, 0.93, backgrounds=bg).as_array()
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_cross_and_co_rows_complementary(device):
    table = truth_table(device, PulseSpectrum(0.0, 4.2), 0.93)
    for state in (QdState.GROUND, QdState.MINUS):
        for first in "VH":
            other = "H" if first == "V" else "V"
            total = table[(state, first + other)] + table[(state, first + first)]
            assert total == pytest.approx(1.0, abs=0.03)


def test_table_lookup_and_rows(device):
    table = truth_table(device, PulseSpectrum(0.0, 4.2), 0.93)
    rows = list(table.rows())
    assert len(rows) == 8
    assert rows[1][:2] == (QdState.GROUND, PolarizationPair.parse("VH"))
    assert table[(QdState.MINUS, "V->H")] == rows[5][2]
    assert all(u == 0.0 for *_, u in rows)


def test_uncertainty_propagation(device):
    probe = PulseSpectrum(0.0, 4.2)
    cov = (["g", "alpha"], np.diag([0.1**2, 0.02**2]))
    table = truth_table(device, probe, 0.93, covariance=cov)
    u = table.uncertainty[(QdState.MINUS, PolarizationPair.parse("VH"))]
    assert 0 < u < 0.2
    # alpha alone drives the pi row; its sensitivity is (P_minus - P_g)
    only_alpha = truth_table(device, probe, 0.93, covariance=(["alpha"], [[0.02**2]]))
    p_g = table[(QdState.GROUND, "VH")]
    p_m = truth_table(device, probe, 1.0)[(QdState.MINUS, "VH")]
    assert only_alpha.uncertainty[(QdState.MINUS, PolarizationPair.parse("VH"))] == pytest.approx(
        1.96 * 0.02 * (p_m - p_g), rel=1e-4)


def test_channel_intensities_ordering(device, vh):
    q = channel_intensities(device, PulseSpectrum(device.nu_qd, 4.2), 0.93, vh)
    assert q.i_inf < q.i_g < q.i_pi < q.i_0
