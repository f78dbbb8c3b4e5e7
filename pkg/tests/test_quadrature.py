import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerblow.quadrature import DivergenceError, finite_integral, panel_integral, tail_integral


def test_panel_polynomial_exact():
    # 20-point Gauss-Legendre is exact for degree 39
    val = panel_integral(lambda x: x**9 - 3 * x**2, 0.0, 2.0)
    assert val == pytest.approx(2.0**10 / 10 - 8.0, rel=1e-14)


@given(a=st.floats(1e-3, 1e3), p=st.floats(1.1, 6.0))
@settings(max_examples=40, deadline=None)
def test_tail_power_law(a, p):
    got = tail_integral(lambda x: x**-p, np.array(a))
    assert got == pytest.approx(a ** (1 - p) / (p - 1), rel=1e-10)


def test_tail_exponential():
    assert tail_integral(lambda x: np.exp(-x), np.array(0.5)) == pytest.approx(np.exp(-0.5), rel=1e-11)


def test_tail_vectorised_shapes():
    a = np.array([[0.5, 1.0], [2.0, 4.0]])
    got = tail_integral(lambda x: x**-2.0, a)
    assert got.shape == a.shape
    np.testing.assert_allclose(got, 1.0 / a, rtol=1e-11)


def test_tail_divergent_raises():
    with pytest.raises(DivergenceError):
        tail_integral(lambda x: x**-0.5, np.array(1.0))


@given(a=st.floats(1e-4, 10.0), b=st.floats(1e-4, 10.0))
@settings(max_examples=40, deadline=None)
def test_finite_log_integrand(a, b):
    got = finite_integral(lambda x: 1.0 / x, a, b)
    assert got == pytest.approx(np.log(b / a), rel=1e-11, abs=1e-13)


def test_finite_rejects_nonpositive():
    with pytest.raises(ValueError):
        finite_integral(lambda x: x, 0.0, 1.0)
