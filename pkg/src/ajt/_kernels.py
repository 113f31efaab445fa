"""Hot integer kernels for dense Laurent coefficient arrays.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical results.  Set ``AJT_NUMBA=0`` in the environment
(before import) to force the numpy path.  Callers only pass int64 arrays
whose results are known to fit in int64; wider arithmetic is handled in
:mod:`ajt.ring` with object arrays and Kronecker substitution.
"""

import os

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("AJT_NUMBA", "1").lower() not in ("0", "false", "no", "off")
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path

def convolve_np(a, b):
    return np.convolve(a, b)


def add_brackets_np(out, tops, counts, signs):
    # [c] contributes t^top, t^(top-4), ..., c terms in total
    for j in range(tops.shape[0]):
        c = counts[j]
        if c <= 0:
            continue
        top = tops[j]
        out[top - 4 * (c - 1): top + 1: 4] += signs[j]
    return out


def div_binomial_np(c, d, s):
    """Quotient and remainder of c(x) by x^d - s, s = +1 or -1."""
    n = c.shape[0]
    if n <= d:
        return np.zeros(0, dtype=c.dtype), c.copy()
    # acc_i = c_i + s*acc_{i+d}; quotient q_j = acc_{j+d}, remainder acc_0..acc_{d-1}
    m = -(-n // d) * d
    padded = np.zeros(m, dtype=c.dtype)
    padded[:n] = c
    lanes = padded.reshape(-1, d)
    if s == 1:
        acc = np.cumsum(lanes[::-1], axis=0)[::-1]
    else:
        w = np.ones(lanes.shape[0], dtype=np.int64)
        w[1::2] = -1
        w = w.astype(c.dtype)[:, None]
        acc = np.cumsum((lanes * w)[::-1], axis=0)[::-1] * w
    acc = acc.reshape(-1)
    return acc[d:n].copy(), acc[:d].copy()


def alt_sum_np(c, start_odd):
    s = int(c[0::2].sum()) - int(c[1::2].sum())
    return -s if start_odd else s


# ---------------------------------------------------------------- numba path

if HAS_NUMBA:

    @njit(cache=True)
    def convolve_nb(a, b):
        na = a.shape[0]
        nb = b.shape[0]
        out = np.zeros(na + nb - 1, dtype=np.int64)
        for i in range(na):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(nb):
                out[i + j] += ai * b[j]
        return out

    @njit(cache=True)
    def add_brackets_nb(out, tops, counts, signs):
        for j in range(tops.shape[0]):
            top = tops[j]
            s = signs[j]
            for i in range(counts[j]):
                out[top - 4 * i] += s
        return out

    @njit(cache=True)
    def _div_binomial_nb(c, d, s):
        n = c.shape[0]
        q = np.zeros(n - d, dtype=np.int64)
        rem = np.zeros(d, dtype=np.int64)
        for i in range(n - 1, -1, -1):
            v = c[i]
            if i < n - d:
                v += s * q[i]
            if i >= d:
                q[i - d] = v
            else:
                rem[i] = v
        return q, rem

    def div_binomial_nb(c, d, s):
        if c.shape[0] <= d:
            return np.zeros(0, dtype=c.dtype), c.copy()
        return _div_binomial_nb(c, d, s)

    @njit(cache=True)
    def _alt_sum_nb(c):
        s = 0
        for i in range(c.shape[0]):
            if i % 2 == 0:
                s += c[i]
            else:
                s -= c[i]
        return s

    def alt_sum_nb(c, start_odd):
        s = int(_alt_sum_nb(c))
        return -s if start_odd else s


if USE_NUMBA:
    convolve = convolve_nb
    add_brackets = add_brackets_nb
    div_binomial = div_binomial_nb
    alt_sum = alt_sum_nb
else:
    convolve = convolve_np
    add_brackets = add_brackets_np
    div_binomial = div_binomial_np
    alt_sum = alt_sum_np
