"""Exact Laurent polynomials in ``t`` over the integers.

A :class:`LaurentScalar` stores a dense coefficient array together with the
exponent of its first entry.  Arrays are int64 while every coefficient is
below 2**62 in absolute value and Python-int object arrays otherwise, so
arithmetic is always exact.  Large products go through Kronecker
substitution on GMP integers.
"""

import re
from fractions import Fraction

import gmpy2
import numpy as np

from . import _kernels

__all__ = [
    "LaurentScalar",
    "RatScalar",
    "NotDivisible",
    "ZeroBase",
    "scalar_arith",
    "epsilon_scalar",
    "specialize_scalar",
    "lsum",
    "t",
    "ZERO",
    "ONE",
]

_SMALL = 1 << 62
_I64_LIMIT = 1 << 63
# direct convolution below this many multiply-adds, Kronecker above
_DIRECT_WORK = 1 << 21


class NotDivisible(ArithmeticError):
    """Exact division was requested but the divisor does not divide."""


class ZeroBase(ValueError):
    """Specialization at t = 0 of a polynomial with negative exponents."""


def _maxabs_array(arr):
    if arr.size == 0:
        return 0
    if arr.dtype == np.int64:
        return int(np.abs(arr).max())
    return max(abs(int(x)) for x in arr)


def _freeze(arr):
    arr.flags.writeable = False
    return arr


class LaurentScalar:
    """Element of Z[t, 1/t]."""

    __slots__ = ("_lo", "_c", "_m", "_hash")

    def __init__(self, terms=None):
        if not terms:
            self._set(0, np.zeros(0, dtype=np.int64))
            return
        if isinstance(terms, LaurentScalar):
            self._set(terms._lo, terms._c, terms._m)
            return
        items = [(int(e), int(c)) for e, c in dict(terms).items() if c]
        if not items:
            self._set(0, np.zeros(0, dtype=np.int64))
            return
        lo = min(e for e, _ in items)
        hi = max(e for e, _ in items)
        big = any(abs(c) >= _SMALL for _, c in items)
        arr = np.zeros(hi - lo + 1, dtype=object if big else np.int64)
        if big:
            arr[:] = 0
        for e, c in items:
            arr[e - lo] = c
        self._set(lo, arr)

    def _set(self, lo, arr, m=None):
        self._lo = lo
        self._c = _freeze(arr)
        self._m = m
        self._hash = None

    @classmethod
    def _make(cls, lo, arr):
        """Normalize: trim zero ends and choose int64/object storage."""
        obj = cls.__new__(cls)
        if arr.size == 0:
            obj._set(0, np.zeros(0, dtype=np.int64), 0)
            return obj
        nz = np.flatnonzero(arr)
        if nz.size == 0:
            obj._set(0, np.zeros(0, dtype=np.int64), 0)
            return obj
        a, b = int(nz[0]), int(nz[-1])
        if a != 0 or b != arr.size - 1:
            arr = arr[a:b + 1]
        m = _maxabs_array(arr)
        if arr.dtype == np.int64:
            if m >= _SMALL:
                arr = arr.astype(object)
        elif m < _SMALL:
            arr = arr.astype(np.int64)
        if not arr.flags.owndata or not arr.flags.writeable:
            arr = arr.copy()
        obj._set(lo + a, arr, m)
        return obj

    @classmethod
    def monomial(cls, e, c=1):
        return cls({e: c})

    @classmethod
    def constant(cls, c):
        return cls({0: c})

    # ------------------------------------------------------------ accessors
    @property
    def terms(self):
        lo = self._lo
        return {lo + int(i): int(self._c[i]) for i in np.flatnonzero(self._c)}

    @property
    def valuation(self):
        """Lowest exponent (None for zero)."""
        return self._lo if self._c.size else None

    @property
    def degree(self):
        return self._lo + self._c.size - 1 if self._c.size else None

    @property
    def coefficients(self):
        """Dense read-only coefficient array starting at :attr:`valuation`."""
        return self._c

    @property
    def maxabs(self):
        if self._m is None:
            self._m = _maxabs_array(self._c)
        return self._m

    @property
    def nterms(self):
        return int(np.count_nonzero(self._c))

    def is_monomial(self):
        return self._c.size == 1

    def __bool__(self):
        return self._c.size > 0

    def __len__(self):
        return self.nterms

    def coeff(self, e):
        i = e - self._lo
        if 0 <= i < self._c.size:
            return int(self._c[i])
        return 0

    # ----------------------------------------------------------- arithmetic
    def __neg__(self):
        return LaurentScalar._make(self._lo, -self._c)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return lsum(((self, 0, 1), (other, 0, 1)))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return lsum(((self, 0, 1), (other, 0, -1)))

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return lsum(((other, 0, 1), (self, 0, -1)))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self or not other:
            return ZERO
        if other._c.size == 1:
            return self.scale(int(other._c[0])).shift(other._lo)
        if self._c.size == 1:
            return other.scale(int(self._c[0])).shift(self._lo)
        return LaurentScalar._make(self._lo + other._lo, _mul_arrays(self, other))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if self.is_monomial() and abs(int(self._c[0])) == 1:
                c = int(self._c[0])
                return LaurentScalar.monomial(-self._lo * -k, c ** (-k))
            raise ValueError("negative power of a non-unit Laurent polynomial")
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, k):
        if k == 0 or not self:
            return ZERO
        if k == 1:
            return self
        if self._c.dtype == np.int64 and abs(k) * self.maxabs < _I64_LIMIT:
            return LaurentScalar._make(self._lo, self._c * k)
        return LaurentScalar._make(self._lo, self._c.astype(object) * k)

    def shift(self, k):
        """Multiply by t**k."""
        if k == 0 or not self:
            return self
        obj = LaurentScalar.__new__(LaurentScalar)
        obj._set(self._lo + k, self._c, self._m)
        return obj

    def reflect(self):
        """Substitute t -> 1/t."""
        if not self:
            return self
        return LaurentScalar._make(-self.degree, self._c[::-1].copy())

    # ---------------------------------------------------------- comparisons
    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = LaurentScalar.constant(int(other))
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        if self._c.size != other._c.size:
            return False
        if self._c.size == 0:
            return True
        return self._lo == other._lo and bool(np.array_equal(self._c, other._c))

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._lo, tuple(int(x) for x in self._c)))
        return self._hash

    # ------------------------------------------------------ specializations
    def epsilon(self):
        """Value at t = -1."""
        if not self:
            return 0
        c = self._c
        if c.dtype == np.int64 and self.maxabs * c.size < _I64_LIMIT:
            return _kernels.alt_sum(c, self._lo % 2 == 1)
        s = sum(int(x) for x in c[0::2]) - sum(int(x) for x in c[1::2])
        return -s if self._lo % 2 else s

    def at(self, t0):
        """Exact value at a rational (or integer) t0."""
        t0 = Fraction(t0)
        if not self:
            return Fraction(0)
        if t0 == 0:
            if self._lo < 0:
                raise ZeroBase("cannot evaluate negative powers of t at t = 0")
            return Fraction(self.coeff(0))
        a, b = t0.numerator, t0.denominator
        # value = H * a^lo / b^hi with H = sum c_i a^i b^(n-1-i)
        h = _homogeneous_eval([int(x) for x in self._c], gmpy2.mpz(a), gmpy2.mpz(b), {}, {})
        return Fraction(int(h)) * Fraction(a) ** self._lo / Fraction(b) ** self.degree

    # ------------------------------------------------------------- division
    def divexact(self, other):
        """Return q with self == q*other, or raise NotDivisible."""
        other = _coerce(other)
        if not other:
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if not self:
            return ZERO
        if other.is_monomial():
            c = int(other._c[0])
            if c in (1, -1):
                return self.scale(c).shift(-other._lo)
            arr = self._c.astype(object)
            if any(int(x) % c for x in arr):
                raise NotDivisible(f"{self} is not divisible by {other}")
            return LaurentScalar._make(self._lo - other._lo, np.array([int(x) // c for x in arr], dtype=object))
        oc = other._c
        if other.nterms == 2 and abs(int(oc[0])) == 1 and abs(int(oc[-1])) == 1:
            # u * t^lo * (t^d - s) with unit u and s = +-1
            u = int(oc[-1])
            s = -int(oc[0]) * u
            return self._div_binomial(oc.size - 1, s).scale(u).shift(-other._lo)
        return self._long_divide(other)

    def _div_binomial(self, d, s):
        c = self._c
        if c.dtype == np.int64 and self.maxabs * c.size < _I64_LIMIT:
            q, rem = _kernels.div_binomial(c, d, s)
        else:
            q, rem = _kernels.div_binomial_np(c.astype(object), d, s)
        if np.any(rem != 0):
            raise NotDivisible(f"not divisible by t^{d} - ({s})")
        return LaurentScalar._make(self._lo, q)

    def _long_divide(self, other):
        num = [int(x) for x in self._c]
        den = [int(x) for x in other._c]
        lead = den[-1]
        dn = len(den)
        q = [0] * max(len(num) - dn + 1, 0)
        for i in range(len(num) - 1, dn - 2, -1):
            c = num[i]
            if c == 0:
                continue
            if c % lead:
                raise NotDivisible(f"{self} is not divisible by {other}")
            k = c // lead
            j = i - dn + 1
            q[j] = k
            for r in range(dn):
                num[j + r] -= k * den[r]
        if any(num):
            raise NotDivisible(f"{self} is not divisible by {other}")
        return LaurentScalar._make(self._lo - other._lo, np.array(q, dtype=object))

    # -------------------------------------------------------------- text
    def __str__(self):
        if not self:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                mono = "t" if e == 1 else f"t^{e}"
                body = mono if a == 1 else f"{a}*{mono}"
            if not parts:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self):
        return f"LaurentScalar({str(self)!r})"

    @classmethod
    def parse(cls, text):
        """Parse the canonical rendering (and small variations of it)."""
        s = text.replace(" ", "").replace("{", "").replace("}", "")
        if not s:
            raise ValueError("empty Laurent polynomial")
        terms = {}
        for tok in _split_terms(s):
            m = _TERM_RE.fullmatch(tok)
            if not m:
                raise ValueError(f"cannot parse term {tok!r} in {text!r}")
            sign, coef, var, exp = m.groups()
            if coef is None and var is None:
                raise ValueError(f"cannot parse term {tok!r} in {text!r}")
            c = int(coef) if coef is not None else 1
            if sign == "-":
                c = -c
            e = 0
            if var is not None:
                e = int(exp) if exp is not None else 1
            terms[e] = terms.get(e, 0) + c
        return cls(terms)


_TERM_RE = re.compile(r"([+-]?)(\d+)?\*?(t(?:\^([+-]?\d+))?)?")


def _split_terms(s):
    out = []
    start = 0
    for i in range(1, len(s)):
        if s[i] in "+-" and s[i - 1] not in "^*(":
            out.append(s[start:i])
            start = i
    out.append(s[start:])
    return out


def _coerce(x):
    if isinstance(x, LaurentScalar):
        return x
    if isinstance(x, (int, np.integer)):
        return LaurentScalar.constant(int(x))
    return NotImplemented


def lsum(items):
    """Sum of ``(scalar, shift, multiplier)`` triples, allocated once."""
    items = [(x, k, m) for x, k, m in items if x and m]
    if not items:
        return ZERO
    if len(items) == 1:
        x, k, m = items[0]
        return x.scale(m).shift(k)
    lo = min(x._lo + k for x, k, _ in items)
    hi = max(x._lo + x._c.size - 1 + k for x, k, _ in items)
    bound = sum(abs(m) * x.maxabs for x, _, m in items)
    small = bound < _I64_LIMIT and all(x._c.dtype == np.int64 for x, _, _ in items)
    if small:
        out = np.zeros(hi - lo + 1, dtype=np.int64)
    else:
        out = np.empty(hi - lo + 1, dtype=object)
        out[:] = 0
    for x, k, m in items:
        a = x._lo + k - lo
        src = x._c if small else x._c.astype(object)
        if m == 1:
            out[a:a + x._c.size] += src
        elif m == -1:
            out[a:a + x._c.size] -= src
        else:
            out[a:a + x._c.size] += src * m
    return LaurentScalar._make(lo, out)


# ------------------------------------------------------------ multiplication

def _mul_arrays(x, y):
    a, b = x._c, y._c
    if a.dtype == np.int64 and b.dtype == np.int64:
        bound = x.maxabs * y.maxabs * min(a.size, b.size)
        if bound < _I64_LIMIT and a.size * b.size <= _DIRECT_WORK:
            return _kernels.convolve(a, b)
    if a.size * b.size <= 64 * 64:
        return np.convolve(a.astype(object), b.astype(object))
    return _kronecker(x, y)


def _slot_bytes(x, y):
    bound = x.maxabs * y.maxabs * min(x._c.size, y._c.size)
    bits = bound.bit_length() + 2
    return max(8, -(-bits // 8))


def _pack(arr, wbytes):
    """Nonnegative packing of sum_i c_i 2^(8 wbytes i) for a signed array."""
    n = arr.size
    if arr.dtype == np.int64:
        pos = np.where(arr > 0, arr, 0).astype("<u8")
        neg = np.where(arr < 0, -arr, 0).astype("<u8")
        buf_p = np.zeros((n, wbytes), dtype=np.uint8)
        buf_n = np.zeros((n, wbytes), dtype=np.uint8)
        buf_p[:, :8] = pos.view(np.uint8).reshape(n, 8)
        buf_n[:, :8] = neg.view(np.uint8).reshape(n, 8)
        p = int.from_bytes(buf_p.tobytes(), "little")
        q = int.from_bytes(buf_n.tobytes(), "little")
    else:
        p = int.from_bytes(b"".join(int(v).to_bytes(wbytes, "little") if v > 0 else bytes(wbytes) for v in arr), "little")
        q = int.from_bytes(b"".join((-int(v)).to_bytes(wbytes, "little") if v < 0 else bytes(wbytes) for v in arr), "little")
    return gmpy2.mpz(p) - gmpy2.mpz(q)


def _unpack(z, n, wbytes):
    w = 8 * wbytes
    bias = int.from_bytes((b"\x00" * (wbytes - 1) + b"\x80") * n, "little")
    raw = int(z + bias).to_bytes(n * wbytes, "little")
    slots = np.frombuffer(raw, dtype=np.uint8).reshape(n, wbytes)
    if wbytes == 8:
        u = slots.copy().view("<u8").reshape(n)
        return (u ^ np.uint64(1 << 63)).view(np.int64)
    limbs = np.zeros((n, -(-wbytes // 8) * 8), dtype=np.uint8)
    limbs[:, :wbytes] = slots
    limbs = limbs.view("<u8")
    out = limbs[:, -1].astype(object)
    for k in range(limbs.shape[1] - 2, -1, -1):
        out = (out << 64) + limbs[:, k].astype(object)
    return out - (1 << (w - 1))


def _kronecker(x, y):
    wbytes = _slot_bytes(x, y)
    z = _pack(x._c, wbytes) * _pack(y._c, wbytes)
    return _unpack(z, x._c.size + y._c.size - 1, wbytes)


def _homogeneous_eval(c, a, b, apow, bpow):
    """sum_i c_i a^i b^(n-1-i) by divide and conquer."""
    n = len(c)
    if n <= 32:
        h = gmpy2.mpz(c[-1])
        for i in range(n - 2, -1, -1):
            h = h * a + c[i] * _pow_cached(b, n - 1 - i, bpow)
        return h
    k = n // 2
    low = _homogeneous_eval(c[:k], a, b, apow, bpow)
    high = _homogeneous_eval(c[k:], a, b, apow, bpow)
    return low * _pow_cached(b, n - k, bpow) + high * _pow_cached(a, k, apow)


def _pow_cached(x, e, cache):
    v = cache.get(e)
    if v is None:
        v = x ** e
        cache[e] = v
    return v


# ----------------------------------------------------------------- module API

ZERO = LaurentScalar()
ONE = LaurentScalar.constant(1)
t = LaurentScalar.monomial(1)


def scalar_arith(x, y, op):
    """Apply ``op`` in {'add', 'sub', 'mul'} to two Laurent scalars."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown scalar operation {op!r}")


def epsilon_scalar(x):
    """Reduction t -> -1."""
    return x.epsilon()


def specialize_scalar(x, t0):
    """Exact rational value of x at t = t0 (t0 nonzero)."""
    if Fraction(t0) == 0:
        raise ZeroBase("t0 must be nonzero")
    return x.at(t0)


class RatScalar:
    """Quotient of two Laurent scalars; used only for exact linear solving."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _coerce(num)
        den = ONE if den is None else _coerce(den)
        if not den:
            raise ZeroDivisionError("RatScalar with zero denominator")
        # normalize the denominator to valuation 0 with positive leading coefficient
        k = den.valuation
        sign = 1 if int(den.coefficients[-1]) > 0 else -1
        self.num = num.scale(sign).shift(-k)
        self.den = den.scale(sign).shift(-k)

    def reduce(self):
        """Cancel the denominator when it divides the numerator."""
        if self.den == ONE:
            return self
        try:
            return RatScalar(self.num.divexact(self.den))
        except NotDivisible:
            return self

    def is_laurent(self):
        return self.reduce().den == ONE

    def as_laurent(self):
        r = self.reduce()
        if r.den != ONE:
            raise NotDivisible(f"{self} is not a Laurent polynomial")
        return r.num

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, (LaurentScalar, int)):
            other = RatScalar(other)
        if not isinstance(other, RatScalar):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        r = self.reduce()
        return hash((r.num, r.den))

    def __neg__(self):
        return RatScalar(-self.num, self.den)

    def __add__(self, other):
        other = _rat(other)
        if self.den == other.den:
            return RatScalar(self.num + other.num, self.den)
        return RatScalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_rat(other))

    def __rsub__(self, other):
        return _rat(other) - self

    def __mul__(self, other):
        other = _rat(other)
        return RatScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _rat(other)
        return RatScalar(self.num * other.den, self.den * other.num)

    def at(self, t0):
        return self.num.at(t0) / self.den.at(t0)

    def __str__(self):
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatScalar({str(self)!r})"

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text.startswith("(") and ")/(" in text and text.endswith(")"):
            a, b = text[1:-1].split(")/(", 1)
            return cls(LaurentScalar.parse(a), LaurentScalar.parse(b))
        return cls(LaurentScalar.parse(text))


def _rat(x):
    if isinstance(x, RatScalar):
        return x
    return RatScalar(x)
