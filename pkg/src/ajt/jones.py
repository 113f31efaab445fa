"""Colored Jones polynomials of iterated cables of the unknot.

For the (r, s)-cable of a knot K and a color n,

    J(n) = t^(-rs(n^2-1)) * sum_{twoj} t^(rs*twoj^2 + 2r*twoj) J_K(s*twoj + 1)

where twoj runs over -(n-1), -(n-3), ..., n-1 (twice the half-integer
summation index, so every exponent is an integer).  Torus knots are the
cables of the unknot, and J_U(n) = [n].

Two evaluators are provided.  :func:`colored_jones` sums the formula
directly in Laurent polynomials.  :func:`jones_sequence` instead climbs in
steps of two colors,

    J(n+2) = t^(-4rs(n+1)) J(n)
             + t^(-rs((n+2)^2-1)) (t^(rs(n+1)^2 + 2r(n+1)) J_K(s(n+1)+1)
                                  + t^(rs(n+1)^2 - 2r(n+1)) J_K(-s(n+1)+1)),

and works in any evaluation domain from :mod:`ajt.points`.  The two are
cross-checked in the tests.
"""

import math
import re
import threading
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .points import SYMBOLIC
from .qtorus import ColorSequence
from .ring import ZERO, LaurentScalar, lsum

__all__ = [
    "CableKnot",
    "CableParams",
    "InvalidKnot",
    "InvalidParams",
    "InadmissibleParams",
    "bracket",
    "colored_jones",
    "torus_jones",
    "jones_sequence",
    "half_integer_exponent",
    "parse_knot",
]


class InvalidKnot(ValueError):
    pass


class InvalidParams(ValueError):
    pass


class InadmissibleParams(InvalidParams):
    """r lies strictly between 0 and pqs."""


@dataclass(frozen=True)
class CableKnot:
    """Iterated cable (((U^(r1,s1))^(r2,s2))...); no slopes means the unknot."""

    slopes: tuple = ()

    def __post_init__(self):
        slopes = tuple((int(r), int(s)) for r, s in self.slopes)
        object.__setattr__(self, "slopes", slopes)
        for r, s in slopes:
            if s < 2:
                raise InvalidKnot(f"slope ({r},{s}): need s >= 2")
            if math.gcd(r, s) != 1:
                raise InvalidKnot(f"slope ({r},{s}): need gcd(r, s) = 1")

    @classmethod
    def unknot(cls):
        return cls(())

    @classmethod
    def torus(cls, p, q):
        return cls(((p, q),))

    @property
    def is_unknot(self):
        return not self.slopes

    def companion(self):
        return CableKnot(self.slopes[:-1])

    def key(self):
        return self.slopes

    def __str__(self):
        if not self.slopes:
            return "U"
        if len(self.slopes) == 1:
            return "T(%d,%d)" % self.slopes[0]
        if len(self.slopes) == 2:
            (p, q), (r, s) = self.slopes
            return f"C({p},{q};{r},{s})"
        return "U" + "".join(f"^({r},{s})" for r, s in self.slopes)


@dataclass(frozen=True)
class CableParams:
    """The (r, s)-cable of the torus knot T(p, q)."""

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        p, q, r, s = self.p, self.q, self.r, self.s
        if q < 2:
            raise InvalidParams(f"q = {q}: need q >= 2")
        if abs(p) <= q:
            raise InvalidParams(f"(p,q) = ({p},{q}): need |p| > q")
        if math.gcd(p, q) != 1:
            raise InvalidParams(f"(p,q) = ({p},{q}): need gcd(p, q) = 1")
        if s < 2:
            raise InvalidParams(f"s = {s}: need s >= 2")
        if math.gcd(r, s) != 1:
            raise InvalidParams(f"(r,s) = ({r},{s}): need gcd(r, s) = 1")

    @property
    def pqs(self):
        return self.p * self.q * self.s

    @property
    def admissible(self):
        lo, hi = sorted((0, self.pqs))
        return not (lo < self.r < hi)

    def require_admissible(self):
        if not self.admissible:
            raise InadmissibleParams(
                f"r = {self.r} lies strictly between 0 and pqs = {self.pqs}; "
                "the cable is outside the verified range")

    @property
    def torus(self):
        return CableKnot.torus(self.p, self.q)

    @property
    def knot(self):
        return CableKnot(((self.p, self.q), (self.r, self.s)))

    def as_tuple(self):
        return (self.p, self.q, self.r, self.s)

    def __str__(self):
        return f"({self.p},{self.q},{self.r},{self.s})"


def half_integer_exponent(r, s, twoj):
    """rs*twoj^2 + 2r*twoj, i.e. 4rj(js+1) with twoj = 2j."""
    return r * s * twoj * twoj + 2 * r * twoj


def bracket(n):
    """Quantum integer [n] = sum_{i<n} t^(2(n-1-2i)); odd in n."""
    if n == 0:
        return ZERO
    if n < 0:
        return -bracket(-n)
    c = np.zeros(4 * (n - 1) + 1, dtype=np.int64)
    c[::4] = 1
    return LaurentScalar._make(-2 * (n - 1), c)


# ------------------------------------------------------------ symbolic memo

_memo = {}
_memo_lock = threading.Lock()


def clear_cache():
    with _memo_lock:
        _memo.clear()
        _sequences.clear()


def colored_jones(K, n):
    """J_K(n) as a Laurent polynomial, by direct summation."""
    if not isinstance(K, CableKnot):
        raise InvalidKnot(f"expected a CableKnot, got {type(K).__name__}")
    if n == 0:
        return ZERO
    if n < 0:
        return -colored_jones(K, -n)
    if K.is_unknot:
        return bracket(n)
    key = (K.slopes, n)
    v = _memo.get(key)
    if v is not None:
        return v
    r, s = K.slopes[-1]
    pre = -r * s * (n * n - 1)
    twojs = range(-(n - 1), n, 2)
    if len(K.slopes) == 1:
        v = _torus_direct(r, s, n, pre, twojs)
    else:
        comp = K.companion()
        v = lsum([(colored_jones(comp, s * tj + 1), pre + half_integer_exponent(r, s, tj), 1) for tj in twojs])
    with _memo_lock:
        return _memo.setdefault(key, v)


def _torus_direct(r, s, n, pre, twojs):
    # every summand is +-t^e [c]; accumulate them all in one array
    tops, counts, signs = [], [], []
    for tj in twojs:
        c = s * tj + 1
        e = pre + half_integer_exponent(r, s, tj)
        if c == 0:
            continue
        sign = 1 if c > 0 else -1
        c = abs(c)
        tops.append(e + 2 * (c - 1))
        counts.append(c)
        signs.append(sign)
    if not tops:
        return ZERO
    tops = np.array(tops, dtype=np.int64)
    counts = np.array(counts, dtype=np.int64)
    lo = int((tops - 4 * (counts - 1)).min())
    hi = int(tops.max())
    out = np.zeros(hi - lo + 1, dtype=np.int64)
    _kernels.add_brackets(out, tops - lo, counts, np.array(signs, dtype=np.int64))
    return LaurentScalar._make(lo, out)


# ------------------------------------------------------- domain sequences

_sequences = {}


def jones_sequence(K, domain=SYMBOLIC):
    """Memoized odd ColorSequence n -> J_K(n) in the given domain.

    Values come from the two-step recursion, so the symbolic version is an
    independent evaluator from :func:`colored_jones`.
    """
    if not isinstance(K, CableKnot):
        raise InvalidKnot(f"expected a CableKnot, got {type(K).__name__}")
    key = (K.slopes, domain.key())
    seq = _sequences.get(key)
    if seq is not None:
        return seq
    if K.is_unknot:
        gen = _bracket_generator(domain)
    else:
        gen = _CableGenerator(K, domain)
    seq = ColorSequence(gen, domain, parity_rule=True, name=f"J[{K}]")
    gen.seq = seq
    with _memo_lock:
        return _sequences.setdefault(key, seq)


class _bracket_generator:
    # [n+1] = t^2 [n] + t^(-2n)
    def __init__(self, domain):
        self.domain = domain
        self.seq = None

    def __call__(self, n):
        dom = self.domain
        if dom is SYMBOLIC:
            return bracket(n)
        if n == 1:
            return dom.one
        start = max((k for k in self.seq.cached() if k < n), default=1)
        v = self.seq(start)
        for k in range(start, n):
            v = dom.lin(((v, 2, 1), (dom.one, -2 * k, 1)))
            if k + 1 < n:
                self.seq._cache.setdefault(k + 1, v)
        return v


class _CableGenerator:
    def __init__(self, K, domain):
        self.domain = domain
        self.r, self.s = K.slopes[-1]
        self.comp = jones_sequence(K.companion(), domain)
        self.seq = None

    def __call__(self, n):
        dom = self.domain
        if n == 1:
            return dom.one
        if n == 2:
            return self._step(0, dom.zero)
        cached = self.seq.cached()
        start = n - 2
        while start > 2 and start not in cached:
            start -= 2
        v = self.seq(start)
        for k in range(start, n, 2):
            v = self._step(k, v)
            if k + 2 < n:
                self.seq._cache.setdefault(k + 2, v)
        return v

    def _step(self, k, v):
        # J(k+2) from J(k)
        r, s, dom = self.r, self.s, self.domain
        a = k + 1
        pre = -r * s * ((k + 2) ** 2 - 1)
        base = r * s * a * a
        return dom.lin((
            (v, -4 * r * s * a, 1),
            (self.comp(s * a + 1), pre + base + 2 * r * a, 1),
            (self.comp(-s * a + 1), pre + base - 2 * r * a, 1),
        ))


def torus_jones(p, q, domain=SYMBOLIC):
    """J_{T(p,q)} as a memoized odd ColorSequence."""
    if q < 2 or abs(p) <= q:
        raise InvalidParams(f"(p,q) = ({p},{q}): need |p| > q >= 2")
    if math.gcd(p, q) != 1:
        raise InvalidParams(f"(p,q) = ({p},{q}): need gcd(p, q) = 1")
    return jones_sequence(CableKnot.torus(p, q), domain)


# ----------------------------------------------------------------- notation

_INT = r"\s*([+-]?\d+)\s*"
_T_RE = re.compile(rf"^\s*T\s*\({_INT},{_INT}\)\s*$")
_C_RE = re.compile(rf"^\s*C\s*\({_INT},{_INT};{_INT},{_INT}\)\s*$")


def parse_knot(text):
    """Parse ``U``, ``T(p,q)`` or ``C(p,q;r,s)``.

    Returns a CableKnot, or CableParams for the cable notation.  Invalid
    parameters raise InvalidParams / InvalidKnot naming the failed condition.
    """
    if text.strip() == "U":
        return CableKnot.unknot()
    m = _T_RE.match(text)
    if m:
        p, q = map(int, m.groups())
        if q < 2 or abs(p) <= q:
            raise InvalidParams(f"T({p},{q}): need |p| > q >= 2")
        if math.gcd(p, q) != 1:
            raise InvalidParams(f"T({p},{q}): need gcd(p, q) = 1")
        return CableKnot.torus(p, q)
    m = _C_RE.match(text)
    if m:
        return CableParams(*map(int, m.groups()))
    raise InvalidKnot(f"cannot parse knot {text!r}; expected U, T(p,q) or C(p,q;r,s)")
