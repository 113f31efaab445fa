"""Evaluation domains for sequences and operators.

Colored Jones values and operator coefficients can be handled in three
interchangeable domains:

* :class:`SymbolicDomain` - full Laurent polynomials in ``t``;
* :class:`RationalPoint` - exact values at a rational ``t0``;
* :class:`ModularPoint` - values at ``t0`` reduced modulo a large prime
  (used only for pruning, never for certificates).

All three expose the same small vocabulary (``mono``, ``lin``, ``mul``,
``scalar`` ...), so the sequence evaluators in :mod:`ajt.jones` and the
operator action in :mod:`ajt.qtorus` are written once.
"""

from fractions import Fraction

import gmpy2

from .ring import ONE, ZERO, LaurentScalar, ZeroBase, _homogeneous_eval, lsum

__all__ = ["SymbolicDomain", "RationalPoint", "ModularPoint", "SpecValue", "SYMBOLIC", "DegenerateNodes"]


class DegenerateNodes(ValueError):
    """Two interpolation nodes coincide at the chosen specialization."""


class SymbolicDomain:
    name = "symbolic"
    zero = ZERO
    one = ONE

    def mono(self, e):
        return LaurentScalar.monomial(e)

    def const(self, c):
        return LaurentScalar.constant(c)

    def scalar(self, x):
        return x

    def shift(self, v, e):
        return v.shift(e)

    def mul(self, v, w):
        return v * w

    def add(self, v, w):
        return v + w

    def neg(self, v):
        return -v

    def lin(self, items):
        """sum of m * t^e * v over ``(v, e, m)`` with integer m."""
        return lsum(items)

    def is_zero(self, v):
        return not v

    def key(self):
        return ("symbolic",)

    def __repr__(self):
        return "SymbolicDomain()"


SYMBOLIC = SymbolicDomain()


class SpecValue:
    """The rational number ``n * a**ea * b**eb`` for a point t0 = a/b."""

    __slots__ = ("n", "ea", "eb")

    def __init__(self, n, ea=0, eb=0):
        self.n = gmpy2.mpz(n)
        self.ea = ea
        self.eb = eb

    def __repr__(self):
        return f"SpecValue(n~{self.n.bit_length()} bits, ea={self.ea}, eb={self.eb})"


class RationalPoint:
    """Exact arithmetic at t = t0 for a nonzero rational t0.

    Values are kept as ``n * a^ea * b^eb`` without gcd normalization, so
    sums only need multiplications by cached powers of ``a`` and ``b``.
    """

    name = "rational"

    def __init__(self, t0):
        t0 = Fraction(t0)
        if t0 == 0:
            raise ZeroBase("t0 must be nonzero")
        self.t0 = t0
        self.a = gmpy2.mpz(t0.numerator)
        self.b = gmpy2.mpz(t0.denominator)
        self._apow = {}
        self._bpow = {}
        self.zero = SpecValue(0)
        self.one = SpecValue(1)

    def _pa(self, k):
        v = self._apow.get(k)
        if v is None:
            v = self.a ** k
            if len(self._apow) < 4096:
                self._apow[k] = v
        return v

    def _pb(self, k):
        v = self._bpow.get(k)
        if v is None:
            v = self.b ** k
            if len(self._bpow) < 4096:
                self._bpow[k] = v
        return v

    def mono(self, e):
        return SpecValue(1, e, -e)

    def const(self, c):
        return SpecValue(c)

    def scalar(self, x):
        if not x:
            return self.zero
        h = _homogeneous_eval([int(c) for c in x.coefficients], self.a, self.b, {}, {})
        return SpecValue(h, x.valuation, -x.degree)

    def shift(self, v, e):
        return SpecValue(v.n, v.ea + e, v.eb - e) if v.n else v

    def mul(self, v, w):
        if not v.n or not w.n:
            return self.zero
        return SpecValue(v.n * w.n, v.ea + w.ea, v.eb + w.eb)

    def add(self, v, w):
        return self.lin(((v, 0, 1), (w, 0, 1)))

    def neg(self, v):
        return SpecValue(-v.n, v.ea, v.eb)

    def lin(self, items):
        items = [(v, e, m) for v, e, m in items if v.n and m]
        if not items:
            return self.zero
        if len(items) > 8:
            # pairwise tree keeps the alignment products balanced
            items.sort(key=lambda it: it[0].ea + it[1])
            h = len(items) // 2
            return self.lin(((self.lin(items[:h]), 0, 1), (self.lin(items[h:]), 0, 1)))
        if len(items) == 1:
            v, e, m = items[0]
            return SpecValue(m * v.n, v.ea + e, v.eb - e)
        ea = min(v.ea + e for v, e, _ in items)
        eb = min(v.eb - e for v, e, _ in items)
        total = gmpy2.mpz(0)
        for v, e, m in items:
            term = v.n * m
            da = v.ea + e - ea
            db = v.eb - e - eb
            if da:
                term *= self._pa(da)
            if db:
                term *= self._pb(db)
            total += term
        return SpecValue(total, ea, eb)

    def is_zero(self, v):
        return v.n == 0

    def to_fraction(self, v):
        return Fraction(int(v.n)) * Fraction(int(self.a)) ** v.ea * Fraction(int(self.b)) ** v.eb

    def key(self):
        return ("rational", self.t0.numerator, self.t0.denominator)

    def __repr__(self):
        return f"RationalPoint({self.t0})"


_DEFAULT_PRIME = int(gmpy2.next_prime(1 << 62))


class ModularPoint:
    """Values at t0 reduced modulo a prime p (p must not divide t0's parts)."""

    name = "modular"

    def __init__(self, t0, p=_DEFAULT_PRIME):
        t0 = Fraction(t0)
        if t0 == 0:
            raise ZeroBase("t0 must be nonzero")
        if t0.numerator % p == 0 or t0.denominator % p == 0:
            raise DegenerateNodes(f"t0 = {t0} degenerates modulo {p}")
        self.t0 = t0
        self.p = p
        self.tv = t0.numerator * pow(t0.denominator, -1, p) % p
        self.zero = 0
        self.one = 1

    def mono(self, e):
        return pow(self.tv, e, self.p)

    def const(self, c):
        return c % self.p

    def scalar(self, x):
        if not x:
            return 0
        p, tv = self.p, self.tv
        h = 0
        for c in reversed(x.coefficients.tolist()):
            h = (h * tv + int(c)) % p
        return h * pow(tv, x.valuation, p) % p

    def shift(self, v, e):
        return v * pow(self.tv, e, self.p) % self.p

    def mul(self, v, w):
        return v * w % self.p

    def add(self, v, w):
        return (v + w) % self.p

    def neg(self, v):
        return -v % self.p

    def lin(self, items):
        p, tv = self.p, self.tv
        total = 0
        for v, e, m in items:
            if v and m:
                total += m * v * pow(tv, e, p)
        return total % p

    def is_zero(self, v):
        return v % self.p == 0

    def key(self):
        return ("modular", self.t0.numerator, self.t0.denominator, self.p)

    def __repr__(self):
        return f"ModularPoint({self.t0}, p={self.p})"
