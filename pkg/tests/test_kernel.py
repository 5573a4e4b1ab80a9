import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from discrete_cz.kernel import (
    KernelError, angular_mode, eval_kernel, inverse_x, make_kernel, riesz, riesz_constant, zero_kernel,
)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_riesz_constant_matches_gamma(m):
    assert riesz_constant(m) == pytest.approx(gamma((m + 1) / 2) / np.pi ** ((m + 1) / 2), rel=1e-14)


def test_riesz_values():
    k = riesz(1, 2)
    x = np.array([[3.0, 4.0], [-1.0, 0.0]])
    c = riesz_constant(2)
    np.testing.assert_allclose(eval_kernel(k, x), [c * 3 / 125, -c], rtol=1e-14)
    assert eval_kernel(k, np.zeros(2)) == 0


def test_inverse_x_is_one_over_x():
    x = np.array([[-2.0], [0.5], [3.0]])
    np.testing.assert_allclose(eval_kernel(inverse_x(), x), 1 / x[:, 0])


@given(st.floats(0.1, 50), st.floats(-np.pi, np.pi), st.sampled_from([(1, 2), (2, 2)]))
@settings(max_examples=60, deadline=None)
def test_homogeneity_degree_minus_m(t, th, jm):
    k = riesz(*jm)
    x = np.array([np.cos(th), np.sin(th)])
    assert eval_kernel(k, t * x) == pytest.approx(eval_kernel(k, x) / t ** 2, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("k", [riesz(1, 2), riesz(2, 2), angular_mode(2), angular_mode(3), inverse_x()])
def test_zero_spherical_mean(k):
    assert abs(k.spherical_integral()) < 1e-12


def test_rejects_nonzero_mean_density():
    with pytest.raises(KernelError):
        make_kernel("custom", 2, omega=np.ones(8))
    with pytest.raises(KernelError):
        make_kernel("custom", 1, omega=[1.0, 1.0])


def test_rejects_bad_riesz_index():
    with pytest.raises(KernelError):
        riesz(3, 2)
    with pytest.raises(KernelError):
        riesz(0, 2)


def test_zero_kernel_and_complex_flag():
    z = zero_kernel(2)
    assert z.is_zero and np.all(eval_kernel(z, np.ones((3, 2))) == 0)
    assert angular_mode(2).is_complex
    assert not riesz(1, 2).is_complex
