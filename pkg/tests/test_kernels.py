import numpy as np
import pytest

from ajt import _kernels as K

pytestmark = pytest.mark.skipif(not K.HAS_NUMBA, reason="numba not installed")


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def test_convolve_backends_agree(rng):
    a = rng.integers(-1000, 1000, 257)
    b = rng.integers(-1000, 1000, 91)
    assert np.array_equal(K.convolve_nb(a, b), K.convolve_np(a, b))


def test_add_brackets_backends_agree(rng):
    tops = np.array([40, 52, 60], dtype=np.int64)
    counts = np.array([3, 11, 5], dtype=np.int64)
    signs = np.array([1, -1, 1], dtype=np.int64)
    a = K.add_brackets_nb(np.zeros(61, dtype=np.int64), tops, counts, signs)
    b = K.add_brackets_np(np.zeros(61, dtype=np.int64), tops, counts, signs)
    assert np.array_equal(a, b)
    assert a.sum() == 3 - 11 + 5


@pytest.mark.parametrize("d,s", [(1, 1), (4, 1), (6, -1), (13, 1)])
def test_div_binomial_backends_agree(rng, d, s):
    c = rng.integers(-50, 50, 200)
    q1, r1 = K.div_binomial_nb(c, d, s)
    q2, r2 = K.div_binomial_np(c, d, s)
    assert np.array_equal(q1, q2) and np.array_equal(r1, r2)
    # c = q * (x^d - s) + r
    back = np.zeros(c.size, dtype=np.int64)
    back[d:d + q1.size] += q1
    back[:q1.size] -= s * q1
    back[:d] += r1
    assert np.array_equal(back, c)


def test_div_binomial_on_object_arrays():
    c = np.array([-(10**40), 0, 0, 10**40], dtype=object)
    q, r = K.div_binomial_np(c, 3, 1)
    assert list(q) == [10**40] and not any(r)


def test_alt_sum_backends_agree(rng):
    c = rng.integers(-9, 9, 101)
    for odd in (False, True):
        assert K.alt_sum_nb(c, odd) == K.alt_sum_np(c, odd)
