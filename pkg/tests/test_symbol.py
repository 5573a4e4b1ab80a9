import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrete_cz.kernel import angular_mode, inverse_x, riesz, zero_kernel
from discrete_cz.symbol import (
    PartialSumPlan, continuous_symbol, discrete_slice, discrete_symbol,
    lemma1_convergence_report, sample_symbol_grid,
)


def sawtooth(xi):
    """sum_{n != 0} e^{-i xi n} / n on (-pi, pi)."""
    return -1j * np.sign(xi) * (np.pi - np.abs(xi))


@pytest.mark.parametrize("xi", [0.3, 1.0, -2.0, 2.9])
def test_inverse_x_discrete_symbol_is_sawtooth(xi):
    s = discrete_symbol(inverse_x(), 0, 1.0, (xi,), PartialSumPlan((2e4, 4e4)))
    assert s.value == pytest.approx(sawtooth(xi), abs=2e-3)


def test_inverse_x_continuous_symbol():
    assert continuous_symbol(inverse_x(), 0, (2.0,)) == pytest.approx(-1j * np.pi)
    assert continuous_symbol(inverse_x(), 0, (-0.1,)) == pytest.approx(1j * np.pi)


@given(st.floats(-10, 10), st.floats(-10, 10))
@settings(max_examples=80, deadline=None)
def test_riesz_continuous_symbol(x, y):
    r = np.hypot(x, y)
    if r < 1e-3:
        return
    assert continuous_symbol(riesz(1, 2), 0, (x, y)) == pytest.approx(-1j * x / r, abs=1e-12)
    assert continuous_symbol(riesz(2, 2), 0, (x, y)) == pytest.approx(-1j * y / r, abs=1e-12)


def test_riesz_m3_continuous_symbol():
    xi = np.array([1.0, -2.0, 0.5])
    got = continuous_symbol(riesz(2, 3), 0.5, xi)
    assert got == pytest.approx(0.5 + 2j / np.linalg.norm(xi), abs=1e-10)


def test_angular_mode_symbol_closed_form():
    phi = np.linspace(-3, 3, 7)
    xi = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    np.testing.assert_allclose(continuous_symbol(angular_mode(2), 0, xi), -np.pi * np.exp(2j * phi), atol=1e-10)


def test_pv_quadrature_oracle_agrees(fixtures_dir):
    data = json.loads((fixtures_dir / "lemma1_oracle.json").read_text())
    for pt in data["points"]:
        assert continuous_symbol(riesz(1, 2), 0, pt["xi"]) == pytest.approx(complex(*pt["sigma"]), abs=1e-6)


@given(st.floats(0.05, 100), st.floats(-np.pi, np.pi))
@settings(max_examples=40, deadline=None)
def test_continuous_symbol_constant_on_rays(t, phi):
    xi = np.array([np.cos(phi), np.sin(phi)])
    for k in (riesz(1, 2), angular_mode(2), angular_mode(3)):
        assert continuous_symbol(k, 0, t * xi) == pytest.approx(continuous_symbol(k, 0, xi), abs=1e-10)


@given(st.sampled_from([0.5, 0.25, 0.125]), st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=30, deadline=None)
def test_scaling_is_exact(h, u, v):
    plan = PartialSumPlan((4.0, 8.0))
    matched = PartialSumPlan((4.0 / h, 8.0 / h))
    xi = np.pi / h * np.array([u, v])
    a = discrete_symbol(riesz(1, 2), 0, h, xi, plan).value
    b = discrete_symbol(riesz(1, 2), 0, 1.0, h * xi, matched).value
    assert abs(a - b) <= 1e-12


def test_discrete_symbol_periodic_and_imaginary():
    plan = PartialSumPlan((16.0, 32.0))
    k = riesz(1, 2)
    s0 = discrete_symbol(k, 0, 1.0, (0.7, -1.1), plan).value
    assert abs(s0.real) < 1e-13
    east = discrete_symbol(k, 0, 1.0, (np.pi, -1.1), plan).value
    west = discrete_symbol(k, 0, 1.0, (-np.pi, -1.1), plan).value
    assert east == pytest.approx(west, abs=1e-12)
    with pytest.raises(ValueError):
        discrete_symbol(k, 0, 1.0, (0.7 + 2 * np.pi, -1.1), plan)


def test_constant_a_shifts_symbol():
    plan = PartialSumPlan((8.0, 16.0))
    base = discrete_symbol(riesz(1, 2), 0, 1.0, (1.0, 0.5), plan).value
    assert discrete_symbol(riesz(1, 2), 2 - 1j, 1.0, (1.0, 0.5), plan).value == pytest.approx(base + 2 - 1j)
    assert discrete_symbol(zero_kernel(2), 3.0, 1.0, (1.0, 0.5), plan).value == 3.0


def test_grid_matches_pointwise():
    plan = PartialSumPlan((8.0, 16.0))
    k = riesz(1, 2)
    grid = sample_symbol_grid(k, 0, 0.5, 8, plan)
    pts = grid.points()
    for idx in [(0, 0), (3, 5), (8, 8), (4, 1)]:
        direct = discrete_symbol(k, 0, 0.5, pts[idx], plan).value
        assert grid.values[idx] == pytest.approx(direct, abs=1e-12)


def test_slice_matches_pointwise():
    plan = PartialSumPlan((8.0, 16.0))
    k = angular_mode(2)
    xi_m, vals, _ = discrete_slice(k, 0.5, 1.0, (1.0,), 16, plan)
    for i in (0, 5, 11):
        direct = discrete_symbol(k, 0.5, 1.0, (1.0, xi_m[i]), plan).value
        assert vals[i] == pytest.approx(direct, abs=1e-12)


def test_lattice_symbol_converges_to_continuous():
    rep = lemma1_convergence_report(riesz(1, 2), (1.0, 1.0), [1, 0.5, 0.25], PartialSumPlan((32.0, 64.0)))
    assert rep.monotone
    # first order in h
    ratios = np.array(rep.errors[:-1]) / np.array(rep.errors[1:])
    assert np.all((ratios > 1.8) & (ratios < 2.2))


def test_plan_reports_nonconvergence():
    s = discrete_symbol(inverse_x(), 0, 1.0, (0.01,), PartialSumPlan((8.0, 16.0), tol=1e-6))
    assert "nonconverged" in s.flags
