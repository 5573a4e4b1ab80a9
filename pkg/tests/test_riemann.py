import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from discrete_cz import riemann as rp
from discrete_cz.verify import random_index_zero, random_trig


def test_grid_requires_power_of_two():
    with pytest.raises(ValueError):
        rp.PeriodicGrid(np.ones(12))
    with pytest.raises(ValueError):
        rp.PeriodicGrid(np.ones(4))
    assert rp.PeriodicGrid(np.ones(8)).n == 8


def test_coefficient_round_trip(rng):
    c = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    np.testing.assert_allclose(rp.PeriodicGrid.from_coefficients(c).coefficients(), c, atol=1e-13)


def test_coefficient_convention():
    # u = sum c_k e^{-i k t}
    g = rp.PeriodicGrid.from_function(lambda t: np.exp(-3j * t), 32)
    c = g.coefficients()
    assert c[3] == pytest.approx(1.0)
    assert np.sum(np.abs(c)) == pytest.approx(1.0)


def test_cotangent_pv_against_quadrature():
    """Subtract u(xi) so the integrand is bounded, then integrate adaptively."""
    rng = np.random.default_rng(2)
    n = 64
    u = random_trig(rng, n, 10)
    coef = u.coefficients()
    k = np.fft.fftfreq(n, 1.0 / n)

    def f(t):
        return np.sum(coef * np.exp(-1j * k * t))

    got = rp.cotangent_pv(u)
    t = u.t
    for i in (0, 7, 33):
        xi = t[i]

        def integrand(s, part):
            val = (f(s) - f(xi)) / np.tan((xi - s) / 2)
            return val.real if part == 0 else val.imag

        re = quad(integrand, -np.pi, np.pi, args=(0,), points=[xi], limit=400)[0]
        im = quad(integrand, -np.pi, np.pi, args=(1,), points=[xi], limit=400)[0]
        assert got[i] == pytest.approx((re + 1j * im) / (2j * np.pi), abs=1e-9)


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([64, 256, 1024]))
@settings(max_examples=25, deadline=None)
def test_projection_identities(seed, n):
    u = random_trig(np.random.default_rng(seed), n, n // 4)
    p, q = rp.project_plus_coeff(u), rp.project_minus(u)
    np.testing.assert_allclose((p + q).values, u.values, atol=1e-10)
    np.testing.assert_allclose(rp.project_plus_coeff(p).values, p.values, atol=1e-10)
    np.testing.assert_allclose(rp.project_plus_coeff(q).values, 0, atol=1e-10)
    np.testing.assert_allclose(rp.project_plus_cot(u).values, p.values, atol=1e-10)
    np.testing.assert_allclose(rp.project_minus_cot(u).values, q.values, atol=1e-10)


@pytest.mark.parametrize("kappa", [-3, -1, 0, 1, 2, 5])
def test_index_of_monomials(kappa):
    assert rp.compute_index(rp.PeriodicGrid.from_function(lambda t: np.exp(1j * kappa * t), 256)) == kappa


def test_index_matches_fine_phase_unwrap():
    """Independent count: unwrap the phase on a much finer sampling."""
    def f(t):
        return (np.exp(1j * t) - 0.5) * (np.exp(1j * t) - 0.3j) / (np.exp(-1j * t) - 3)

    t = np.linspace(-np.pi, np.pi, 1 << 16)
    expected = round((np.unwrap(np.angle(f(t)))[-1] - np.unwrap(np.angle(f(t)))[0]) / (2 * np.pi))
    assert expected == 2
    assert rp.compute_index(rp.PeriodicGrid.from_function(f, 512)) == expected


def test_index_rejects_vanishing_symbol():
    with pytest.raises(rp.WindingError):
        rp.compute_index(rp.PeriodicGrid.from_function(lambda t: np.sin(t) + 0j, 64))


def test_factorization(rng):
    G = random_index_zero(rng, 256)
    f = rp.factorize(G)
    assert f.product_error(G) < 1e-12
    assert max(f.analyticity_defect()) < 1e-12


def test_factorize_requires_index_zero():
    with pytest.raises(rp.IndexObstruction) as exc:
        rp.factorize(rp.PeriodicGrid.from_function(lambda t: np.exp(-2j * t), 64))
    assert exc.value.kappa == -2


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=20, deadline=None)
def test_riemann_manufactured(seed):
    rng = np.random.default_rng(seed)
    n = 256
    G = random_index_zero(rng, n)
    phi_p = rp.project_plus_coeff(random_trig(rng, n, 6))
    phi_m = rp.project_minus(random_trig(rng, n, 6))
    sol = rp.solve_riemann(rp.RiemannProblem(G, phi_p - G * phi_m))
    np.testing.assert_allclose(sol.Phi_plus.values, phi_p.values, atol=1e-9)
    np.testing.assert_allclose(sol.Phi_minus.values, phi_m.values, atol=1e-9)
    assert sol.residual < 1e-10


def test_riemann_linear_in_g(rng):
    n = 128
    G = random_index_zero(rng, n)
    g1, g2 = random_trig(rng, n, 5), random_trig(rng, n, 5)
    s1 = rp.solve_riemann(rp.RiemannProblem(G, g1))
    s2 = rp.solve_riemann(rp.RiemannProblem(G, g2))
    s = rp.solve_riemann(rp.RiemannProblem(G, g1 + g2 * rp.PeriodicGrid(np.full(n, 2.0))))
    np.testing.assert_allclose(s.Phi_plus.values, s1.Phi_plus.values + 2 * s2.Phi_plus.values, atol=1e-10)


def test_nonzero_index_obstruction_message():
    G = rp.PeriodicGrid.from_function(lambda t: np.exp(1j * t), 64)
    with pytest.raises(rp.IndexObstruction) as exc:
        rp.solve_riemann(rp.RiemannProblem(G, rp.PeriodicGrid(np.ones(64))))
    assert exc.value.kappa == 1
    assert "kernel dimension 1" in str(exc.value)
    G = rp.PeriodicGrid.from_function(lambda t: np.exp(-1j * t), 64)
    with pytest.raises(rp.IndexObstruction, match="cokernel"):
        rp.solve_riemann(rp.RiemannProblem(G, rp.PeriodicGrid(np.ones(64))))
