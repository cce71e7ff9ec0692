import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jkwalk.errors import SingularSeriesError
from jkwalk.series import Series

small = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


def test_difference_of_squares():
    z = Series.z(4)
    assert np.allclose(((1 + z) * (1 - z)).coeffs, [1, 0, -1, 0, 0])


def test_sqrt_binomial():
    s = (1 + Series.z(6, 4)).sqrt()
    assert np.allclose(s.coeffs, [1, 0, 0, 0, 0.5, 0, 0])


def test_geometric_inverse():
    assert np.allclose((1 - Series.z(3)).invert().coeffs, [1, 1, 1, 1])


def test_singular_operations():
    with pytest.raises(SingularSeriesError):
        Series.z(3).invert()
    with pytest.raises(SingularSeriesError):
        (2 + Series.z(3)).sqrt()
    with pytest.raises(SingularSeriesError):
        (1 + Series.z(3)).shift(-1)


def test_shift_and_eval():
    s = Series([1, 2, 3])
    assert np.allclose(s.shift(1).coeffs, [0, 1, 2])
    assert np.allclose(s.shift(5).coeffs, 0)
    assert np.allclose(s.shift(1).shift(-1).coeffs, [1, 2, 0])
    assert s(2.0) == pytest.approx(17)


def test_mixed_orders_truncate():
    assert (Series([1, 1, 1]) + Series([1, 1])).order == 1


@given(st.lists(small, min_size=6, max_size=6), st.lists(small, min_size=6, max_size=6))
def test_ring_laws(a, b):
    x, y = Series(a), Series(b)
    assert (x * y).allclose(y * x, atol=1e-9)
    assert ((x + y) - y).allclose(x, atol=1e-12)


@given(st.lists(small, min_size=8, max_size=8), small)
def test_inverse_roundtrip(tail, c0):
    if abs(c0) < 0.1:
        c0 = 1.0
    s = Series([c0] + tail[:7])
    one = s * s.invert()
    assert np.allclose(one.coeffs, [1] + [0] * 7, atol=1e-6 * max(1, np.abs(s.coeffs).max()) ** 8)


@given(st.lists(small, min_size=8, max_size=8))
def test_sqrt_squares_back(tail):
    s = Series([1.0] + tail[:7])
    r = s.sqrt()
    assert (r * r).allclose(s, atol=1e-6 * max(1, np.abs(s.coeffs).max()) ** 8)
