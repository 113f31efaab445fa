"""The quantum torus Z[t^{+-1}]<M^{+-1}, L^{+-1}>/(LM - t^2 ML).

Elements are stored in the normal form sum c_{a,b}(t) M^a L^b with M
written before L.  The module also provides the commutative ring of plane
curve polynomials in (M, L), the involution sigma, the reduction
epsilon (t -> -1), discrete sequences n -> value and the action

    (L f)(n) = f(n + 1),    (M f)(n) = t^(2n) f(n).
"""

import heapq
import json
import re
import threading

from .points import SYMBOLIC
from .ring import ZERO, LaurentScalar, NotDivisible, lsum

__all__ = [
    "TorusElement",
    "PlaneCurvePoly",
    "PointOperator",
    "ColorSequence",
    "torus_mul",
    "sigma_torus",
    "epsilon_torus",
    "apply_to_sequence",
    "plane_arith",
    "plane_exact_divide",
    "sigma_plane",
    "ZeroDivisor",
    "SequenceUndefined",
]


class ZeroDivisor(ZeroDivisionError):
    pass


class SequenceUndefined(LookupError):
    """The sequence generator has no value at the requested color."""


def _scalar(c):
    if isinstance(c, LaurentScalar):
        return c
    if isinstance(c, int):
        return LaurentScalar.constant(c)
    if isinstance(c, str):
        return LaurentScalar.parse(c)
    raise TypeError(f"cannot use {type(c).__name__} as a torus coefficient")


class TorusElement:
    """Finite sum of c(t) M^a L^b in M-before-L normal form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        d = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for (a, b), c in items:
                c = _scalar(c)
                if not c:
                    continue
                key = (int(a), int(b))
                if key in d:
                    c = d[key] + c
                    if not c:
                        del d[key]
                        continue
                d[key] = c
        self._terms = d
        self._hash = None

    @classmethod
    def _raw(cls, d):
        obj = cls.__new__(cls)
        obj._terms = d
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, a=0, b=0, c=1):
        return cls({(a, b): c})

    @classmethod
    def scalar(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def M(cls, k=1):
        return cls.monomial(k, 0)

    @classmethod
    def L(cls, k=1):
        return cls.monomial(0, k)

    @property
    def terms(self):
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms.items(), key=lambda kv: (kv[0][1], kv[0][0])))

    def coeff(self, a, b):
        return self._terms.get((a, b), ZERO)

    def l_range(self):
        bs = [b for _, b in self._terms]
        return (min(bs), max(bs)) if bs else (0, 0)

    # ----------------------------------------------------------- arithmetic
    def __add__(self, other):
        other = _coerce_torus(other)
        if other is NotImplemented:
            return other
        d = dict(self._terms)
        for k, c in other._terms.items():
            v = d.get(k)
            v = c if v is None else v + c
            if v:
                d[k] = v
            else:
                d.pop(k, None)
        return TorusElement._raw(d)

    __radd__ = __add__

    def __neg__(self):
        return TorusElement._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce_torus(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_torus(other) - self

    def __mul__(self, other):
        other = _coerce_torus(other)
        if other is NotImplemented:
            return other
        return torus_mul(self, other)

    def __rmul__(self, other):
        other = _coerce_torus(other)
        if other is NotImplemented:
            return other
        return torus_mul(other, self)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = TorusElement.scalar(1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        other = _coerce_torus(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sigma(self):
        return sigma_torus(self)

    def epsilon(self):
        return epsilon_torus(self)

    def specialize(self, domain):
        return PointOperator(domain, {k: domain.scalar(c) for k, c in self._terms.items()})

    # ----------------------------------------------------------------- text
    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"({c}) M^{a} L^{b}" for (a, b), c in self)

    def __repr__(self):
        return f"TorusElement({str(self)!r})"

    def to_json(self):
        return [{"a": a, "b": b, "coeff": str(c)} for (a, b), c in self]

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls({(d["a"], d["b"]): LaurentScalar.parse(d["coeff"]) for d in data})

    @classmethod
    def parse(cls, text):
        """Parse sums of products of factors.

        Factors are a parenthesized scalar ``(t^2 - 1)``, an integer, ``t^k``,
        ``M^a`` or ``L^b``; each term's factors are multiplied left to right in
        the quantum torus, so both ``(c) M^a L^b`` and ``L^2 M^6`` are accepted.
        """
        s = text.replace(" ", "").replace("{", "").replace("}", "")
        if not s:
            raise ValueError("empty operator text")
        total = TorusElement()
        for tok in _split_top(s):
            sign = 1
            if tok[0] in "+-":
                sign = -1 if tok[0] == "-" else 1
                tok = tok[1:]
            if not tok:
                raise ValueError(f"dangling sign in {text!r}")
            term = TorusElement.scalar(sign)
            pos = 0
            while pos < len(tok):
                if tok[pos] == "*":
                    pos += 1
                    continue
                if tok[pos] == "(":
                    depth, end = 0, pos
                    while end < len(tok):
                        depth += tok[end] == "("
                        depth -= tok[end] == ")"
                        if depth == 0:
                            break
                        end += 1
                    if depth:
                        raise ValueError(f"unbalanced parentheses in {text!r}")
                    inner = tok[pos + 1:end]
                    try:
                        term = term * TorusElement.scalar(LaurentScalar.parse(inner))
                    except ValueError:
                        term = term * TorusElement.parse(inner)
                    pos = end + 1
                    continue
                m = _FACTOR_RE.match(tok, pos)
                if not m or m.end() == pos:
                    raise ValueError(f"cannot parse {tok[pos:]!r} in {text!r}")
                num, var, exp = m.groups()
                if num is not None:
                    factor = TorusElement.scalar(int(num))
                else:
                    e = int(exp) if exp is not None else 1
                    if var == "t":
                        factor = TorusElement.scalar(LaurentScalar.monomial(e))
                    elif var == "M":
                        factor = TorusElement.M(e)
                    else:
                        factor = TorusElement.L(e)
                term = term * factor
                pos = m.end()
            total = total + term
        return total


_FACTOR_RE = re.compile(r"(\d+)|([tML])(?:\^([+-]?\d+))?")


def _split_top(s):
    out, start, depth = [], 0, 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0 and s[i - 1] not in "^*(":
            out.append(s[start:i])
            start = i
    out.append(s[start:])
    return out


def _coerce_torus(x):
    if isinstance(x, TorusElement):
        return x
    if isinstance(x, (int, LaurentScalar)):
        return TorusElement.scalar(x)
    return NotImplemented


def torus_mul(x, y):
    """Skew product: (M^a L^b)(M^c L^d) = t^(2bc) M^(a+c) L^(b+d)."""
    if not x or not y:
        return TorusElement()
    groups = {}
    for (a, b), cx in x._terms.items():
        for (c, d), cy in y._terms.items():
            groups.setdefault((a + c, b + d), []).append((cx, cy, 2 * b * c))
    out = {}
    for key, items in groups.items():
        v = lsum([(cx * cy, sh, 1) for cx, cy, sh in items])
        if v:
            out[key] = v
    return TorusElement._raw(out)


def sigma_torus(x):
    """The involution M^a L^b -> M^-a L^-b, coefficients fixed."""
    return TorusElement._raw({(-a, -b): c for (a, b), c in x._terms.items()})


def epsilon_torus(x):
    """Reduction t -> -1 into the commutative ring of (M, L)."""
    return PlaneCurvePoly({k: c.epsilon() for k, c in x._terms.items()})


class PointOperator:
    """A quantum-torus element with coefficients evaluated in a domain."""

    __slots__ = ("domain", "terms")

    def __init__(self, domain, terms):
        self.domain = domain
        self.terms = {k: v for k, v in terms.items() if not domain.is_zero(v)}

    def __mul__(self, other):
        dom = self.domain
        groups = {}
        for (a, b), cx in self.terms.items():
            for (c, d), cy in other.terms.items():
                groups.setdefault((a + c, b + d), []).append((dom.mul(cx, cy), 2 * b * c, 1))
        return PointOperator(dom, {k: dom.lin(v) for k, v in groups.items()})

    def __add__(self, other):
        dom = self.domain
        d = dict(self.terms)
        for k, v in other.terms.items():
            d[k] = dom.add(d[k], v) if k in d else v
        return PointOperator(dom, d)

    def __neg__(self):
        return PointOperator(self.domain, {k: self.domain.neg(v) for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __len__(self):
        return len(self.terms)

    def sigma(self):
        return PointOperator(self.domain, {(-a, -b): v for (a, b), v in self.terms.items()})

    def equals(self, other):
        dom = self.domain
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            u = self.terms.get(k, dom.zero)
            v = other.terms.get(k, dom.zero)
            if not dom.is_zero(dom.lin(((u, 0, 1), (v, 0, -1)))):
                return False
        return True

    def l_range(self):
        bs = [b for _, b in self.terms]
        return (min(bs), max(bs)) if bs else (0, 0)


def apply_to_sequence(x, f, n):
    """(x f)(n) = sum_{a,b} c_{a,b} t^(2an) f(n+b), evaluated in f's domain."""
    dom = f.domain
    if isinstance(x, TorusElement):
        if dom is SYMBOLIC:
            by_b = {}
            for (a, b), c in x._terms.items():
                by_b.setdefault(b, []).append((c, 2 * a * n, 1))
            return lsum([(lsum(items) * f(n + b), 0, 1) for b, items in by_b.items()])
        x = x.specialize(dom)
    by_b = {}
    for (a, b), c in x.terms.items():
        by_b.setdefault(b, []).append((c, 2 * a * n, 1))
    return dom.lin([(dom.mul(dom.lin(items), f(n + b)), 0, 1) for b, items in by_b.items()])


class ColorSequence:
    """Memoized discrete function n -> value in a given domain.

    With ``parity_rule`` set the sequence is odd: f(0) = 0 and
    f(-n) = -f(n); only positive colors reach the generator.
    """

    def __init__(self, generator, domain=SYMBOLIC, parity_rule=False, name=None):
        self.generator = generator
        self.domain = domain
        self.parity_rule = parity_rule
        self.name = name or getattr(generator, "__name__", "sequence")
        self._cache = {}
        self._lock = threading.Lock()

    def __call__(self, n):
        if self.parity_rule:
            if n == 0:
                return self.domain.zero
            if n < 0:
                return self.domain.neg(self(-n))
        v = self._cache.get(n)
        if v is not None:
            return v
        v = self.generator(n)
        if v is None:
            raise SequenceUndefined(f"{self.name} is undefined at n = {n}")
        with self._lock:
            return self._cache.setdefault(n, v)

    value = __call__

    def cached(self):
        return dict(self._cache)

    def apply(self, x, name=None):
        """The sequence n -> (x self)(n)."""
        if isinstance(x, TorusElement) and self.domain is not SYMBOLIC:
            x = x.specialize(self.domain)
        return ColorSequence(lambda n: apply_to_sequence(x, self, n), self.domain, name=name or f"op*{self.name}")

    def __repr__(self):
        return f"ColorSequence({self.name}, {self.domain!r}, parity={self.parity_rule})"


# ------------------------------------------------------------------ plane ring

class PlaneCurvePoly:
    """Commutative Laurent polynomial in (M, L) with integer coefficients.

    Keys are (M-exponent, L-exponent).
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        self._terms = {(int(a), int(b)): int(c) for (a, b), c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, d):
        obj = cls.__new__(cls)
        obj._terms = d
        return obj

    @classmethod
    def monomial(cls, a=0, b=0, c=1):
        return cls({(a, b): c})

    @classmethod
    def M(cls, k=1):
        return cls.monomial(k, 0)

    @classmethod
    def L(cls, k=1):
        return cls.monomial(0, k)

    @property
    def terms(self):
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = _coerce_plane(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        other = _coerce_plane(other)
        if other is NotImplemented:
            return other
        d = dict(self._terms)
        for k, c in other._terms.items():
            v = d.get(k, 0) + c
            if v:
                d[k] = v
            else:
                d.pop(k, None)
        return PlaneCurvePoly._raw(d)

    __radd__ = __add__

    def __neg__(self):
        return PlaneCurvePoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce_plane(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_plane(other) - self

    def __mul__(self, other):
        other = _coerce_plane(other)
        if other is NotImplemented:
            return other
        if len(self._terms) < len(other._terms):
            small, big = self._terms, other._terms
        else:
            small, big = other._terms, self._terms
        d = {}
        for (a, b), c in small.items():
            for (a2, b2), c2 in big.items():
                k = (a + a2, b + b2)
                d[k] = d.get(k, 0) + c * c2
        return PlaneCurvePoly._raw({k: v for k, v in d.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if len(self._terms) == 1:
                ((a, b), c), = self._terms.items()
                if c in (1, -1):
                    return PlaneCurvePoly.monomial(-a * -k, -b * -k, c ** (-k))
            raise ValueError("negative power of a non-unit")
        result = PlaneCurvePoly.monomial()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def sigma(self):
        return sigma_plane(self)

    def as_monomial(self):
        """(c, a, b) if this is c M^a L^b, else None."""
        if len(self._terms) != 1:
            return None
        ((a, b), c), = self._terms.items()
        return c, a, b

    def divexact(self, other):
        return plane_exact_divide(self, other)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self._terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = []
            if a:
                mono.append("M" if a == 1 else f"M^{a}")
            if b:
                mono.append("L" if b == 1 else f"L^{b}")
            body = "*".join(mono)
            if not body:
                body = str(abs(c))
            elif abs(c) != 1:
                body = f"{abs(c)}*{body}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"PlaneCurvePoly({str(self)!r})"

    def to_json(self):
        return [{"a": a, "b": b, "coeff": c} for (a, b), c in sorted(self._terms.items())]


def _coerce_plane(x):
    if isinstance(x, PlaneCurvePoly):
        return x
    if isinstance(x, int):
        return PlaneCurvePoly.monomial(0, 0, x)
    return NotImplemented


def plane_arith(x, y, op):
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown plane operation {op!r}")


def sigma_plane(x):
    return PlaneCurvePoly._raw({(-a, -b): c for (a, b), c in x._terms.items()})


def _order_key(k):
    # graded lexicographic on (L, M)
    a, b = k
    return (a + b, b, a)


def plane_exact_divide(x, y):
    """Return q with x = q*y, or raise NotDivisible.

    Leading-term reduction in graded lex order.  Candidate quotient
    monomials are confined to the exponent box allowed by x and y, which
    bounds the loop when y does not divide x.
    """
    if not y:
        raise ZeroDivisor("division by the zero plane polynomial")
    if not x:
        return PlaneCurvePoly()
    ykeys = list(y._terms)
    lead_y = max(ykeys, key=_order_key)
    cy = y._terms[lead_y]
    xa = [a for a, _ in x._terms]
    xb = [b for _, b in x._terms]
    ya = [a for a, _ in ykeys]
    yb = [b for _, b in ykeys]
    amin, amax = min(xa) - min(ya), max(xa) - max(ya)
    bmin, bmax = min(xb) - min(yb), max(xb) - max(yb)
    r = dict(x._terms)
    heap = [tuple(-v for v in _order_key(k)) + (k,) for k in r]
    heapq.heapify(heap)
    q = {}
    while r:
        while True:
            item = heapq.heappop(heap)
            k = item[-1]
            if k in r:
                break
        c = r[k]
        qa, qb = k[0] - lead_y[0], k[1] - lead_y[1]
        if c % cy or not (amin <= qa <= amax and bmin <= qb <= bmax):
            raise NotDivisible(f"{y} does not divide {x}")
        qc = c // cy
        q[(qa, qb)] = qc
        for (a, b), cc in y._terms.items():
            kk = (a + qa, b + qb)
            v = r.get(kk, 0) - qc * cc
            if v:
                if kk not in r:
                    heapq.heappush(heap, tuple(-w for w in _order_key(kk)) + (kk,))
                r[kk] = v
            else:
                r.pop(kk, None)
        # the popped key may have been re-added only if it did not cancel
        if k in r:
            heapq.heappush(heap, tuple(-w for w in _order_key(k)) + (k,))
    return PlaneCurvePoly._raw(q)
