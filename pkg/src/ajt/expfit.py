"""Exponential polynomials in the color n and their annihilators.

A sequence h lies in R[t^{+-2n}] when h(n) = sum_j lambda_j t^(2 k_j n) for
finitely many integer frequencies k_j.  Such an h satisfies the linear
recurrence whose characteristic polynomial is N(y) = prod_j (y - t^(2 k_j)),
and is killed by the operator prod_j (L + L^-1 - t^(2k_j) - t^(-2k_j)).

Two fitting methods are provided.

``dense``
    solve for all frequencies in [-K, K] on 2K+1 consecutive colors.

``probe`` (default)
    reduce the sequence modulo a prime at one or two rational points t0,
    run Berlekamp-Massey to find the recurrence order and read the
    frequencies off the roots t0^(2k).  The exact coefficients are then
    found from a Vandermonde system on the probed nodes only.  Exact
    checks on extra colors certify the result, so a bad probe can only
    lose a fit, never fake one.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .points import DegenerateNodes, ModularPoint
from .qtorus import SequenceUndefined, TorusElement
from .ring import ONE, ZERO, LaurentScalar, NotDivisible, RatScalar, lsum

__all__ = [
    "ExpPolynomial",
    "FitReport",
    "InsufficientSamples",
    "fit",
    "support_probe",
    "annihilator_from_support",
    "berlekamp_massey",
]

MEMBER = "Member"
NOT_MEMBER = "NotMember"
INCONCLUSIVE = "Inconclusive"

DEFAULT_T0 = (Fraction(2), Fraction(3, 2))


class InsufficientSamples(ValueError):
    pass


class ExpPolynomial:
    """sum_j lambda_j t^(2 k_j n); coefficients are Laurent or rational in t."""

    def __init__(self, terms=None):
        self.terms = {}
        for k, c in (terms or {}).items():
            if isinstance(c, int):
                c = LaurentScalar.constant(c)
            if c:
                self.terms[int(k)] = c

    @property
    def support(self):
        return sorted(self.terms)

    def is_laurent(self):
        return all(isinstance(c, LaurentScalar) or c.is_laurent() for c in self.terms.values())

    def __call__(self, n):
        lau = [(c, 2 * k * n, 1) for k, c in self.terms.items() if isinstance(c, LaurentScalar)]
        rat = [(c, 2 * k * n) for k, c in self.terms.items() if not isinstance(c, LaurentScalar)]
        total = lsum(lau)
        if not rat:
            return total
        acc = RatScalar(total)
        for c, e in rat:
            acc = acc + RatScalar(c.num.shift(e), c.den)
        return acc.reduce()

    def at(self, n, t0):
        t0 = Fraction(t0)
        return sum((c.at(t0) * t0 ** (2 * k * n) for k, c in self.terms.items()), Fraction(0))

    def to_json(self):
        return {str(k): str(c) for k, c in sorted(self.terms.items())}

    def __eq__(self, other):
        if not isinstance(other, ExpPolynomial):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(_rat(self.terms[k]) == _rat(other.terms[k]) for k in self.terms)

    def __repr__(self):
        return f"ExpPolynomial({self.to_json()})"


def _rat(c):
    return c if isinstance(c, RatScalar) else RatScalar(c)


@dataclass
class FitReport:
    status: str
    support: list = field(default_factory=list)
    coefficients: ExpPolynomial = None
    window: tuple = (1, 1)
    extra_checks_passed: int = 0
    method: str = "probe"
    K: int = 0
    laurent_coefficients: bool = None
    probes: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def is_member(self):
        return self.status == MEMBER

    def to_json(self):
        out = {
            "status": self.status,
            "window": list(self.window),
            "support": list(self.support),
            "extra_checks_passed": self.extra_checks_passed,
            "method": self.method,
            "K": self.K,
            "laurent_coefficients": self.laurent_coefficients,
            "probes": {str(k): v for k, v in self.probes.items()},
            "notes": list(self.notes),
            "elapsed_ms": round(self.elapsed_ms, 1),
        }
        if self.coefficients is not None:
            out["coefficients"] = self.coefficients.to_json()
        return out


# ------------------------------------------------------------ modular probe

def berlekamp_massey(seq, p):
    """Shortest recurrence of a sequence over Z/p.

    Returns (L, C) with C = [1, c1, ..., cL] and s_n + sum c_i s_(n-i) = 0.
    """
    C, B = [1], [1]
    L, m, b = 0, 1, 1
    for n, sn in enumerate(seq):
        d = sn
        for i in range(1, L + 1):
            d += C[i] * seq[n - i]
        d %= p
        if d == 0:
            m += 1
            continue
        coef = d * pow(b, -1, p) % p
        T = list(C)
        if len(C) < len(B) + m:
            C.extend([0] * (len(B) + m - len(C)))
        for i, bi in enumerate(B):
            C[i + m] = (C[i + m] - coef * bi) % p
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1
    C = (C + [0] * (L + 1))[:L + 1]
    return L, C


def _frequency_roots(C, dom, bound):
    """Integers k in [-bound, bound] with t0^(2k) a root of the BM polynomial."""
    p = dom.p
    z = dom.mono(-2 * bound)
    step = dom.mono(2)
    seen = {}
    roots = []
    for k in range(-bound, bound + 1):
        if z in seen:
            raise DegenerateNodes(f"t0^{2 * seen[z]} = t0^{2 * k} modulo {p}")
        seen[z] = k
        v = 0
        for c in C:
            v = (v * z + c) % p
        if v == 0:
            roots.append(k)
        z = z * step % p
    return roots


def _probe_one(values, dom, K, extra, bound):
    """Probe outcome for one modular point: ('ok', support) / ('order', L) / ('roots', n)."""
    L, C = berlekamp_massey(values, dom.p)
    if L > K or len(values) - 2 * L < extra:
        return "order", L
    roots = _frequency_roots(C, dom, bound)
    if len(roots) != L:
        return "roots", len(roots)
    return "ok", roots


def support_probe(f, window, t0_samples=DEFAULT_T0, K=8, extra=5, freq_bound=4096, prime=None):
    """Candidate frequencies from modular probes.

    ``f`` maps a domain to a sequence accessor in that domain.  Returns
    (support or None, details) where details holds the per-t0 outcome.
    The support is the union over all probes; it is None when a probe
    fails.  Disagreeing probes are reported in ``details['agree']``.
    """
    details = {}
    supports = []
    for t0 in t0_samples:
        dom = ModularPoint(t0) if prime is None else ModularPoint(t0, prime)
        acc = f(dom)
        values = [acc(n) % dom.p for n in window]
        kind, res = _probe_one(values, dom, K, extra, freq_bound)
        details[str(Fraction(t0))] = {"outcome": kind, "result": res}
        if kind != "ok":
            return None, details
        supports.append(frozenset(res))
    details["agree"] = len(set(supports)) <= 1
    return sorted(set().union(*supports)) if supports else [], details


# ---------------------------------------------------------- exact solving

@lru_cache(maxsize=None)
def _cyclotomic_cofactor(e):
    """(t^e - 1) / Phi_e(t) as a LaurentScalar."""
    out = ONE
    for d in range(1, e):
        if e % d == 0:
            out = out * cyclotomic(d)
    return out


@lru_cache(maxsize=None)
def cyclotomic(e):
    """The cyclotomic polynomial Phi_e(t)."""
    top = LaurentScalar({e: 1, 0: -1})
    return top.divexact(_cyclotomic_cofactor(e)) if e > 1 else top


def _divide_binomials(num, ds):
    """Cancel prod (t^d - 1) against num as far as possible.

    Returns (quotient, den) with num / prod = quotient / den and den a
    product of cyclotomic polynomials none of which divides quotient.
    """
    den = ONE
    for d in ds:
        try:
            num = num.divexact(LaurentScalar({d: 1, 0: -1}))
            continue
        except NotDivisible:
            pass
        for e in range(1, d + 1):
            if d % e:
                continue
            cand = num * _cyclotomic_cofactor(e)
            try:
                num = cand.divexact(LaurentScalar({e: 1, 0: -1}))
            except NotDivisible:
                den = den * cyclotomic(e)
    return num, den


def _node_polynomial(ks):
    """Coefficients e_0..e_L of prod_j (y - t^(2 k_j))."""
    e = [ONE]
    for k in ks:
        nxt = [ZERO] * (len(e) + 1)
        for i, c in enumerate(e):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c.shift(2 * k)
        e = nxt
    return e


def _solve_on_support(values, ks, n0, e=None):
    """Exact lambda_j with values[i] = sum_j lambda_j t^(2 k_j (n0+i)).

    Transposed Vandermonde solve on the nodes z_j = t^(2 k_j).
    """
    L = len(ks)
    if L == 0:
        return {}
    if e is None:
        e = _node_polynomial(ks)
    lam = {}
    for j, kj in enumerate(ks):
        # coefficients of N(y) / (y - z_j) by synthetic division
        ct = [ZERO] * L
        ct[L - 1] = ONE
        for i in range(L - 1, 0, -1):
            ct[i - 1] = e[i] + ct[i].shift(2 * kj)
        num = lsum([(ct[i] * values[i], 0, 1) for i in range(L) if ct[i]])
        # D_j = prod_{l != j} (z_j - z_l) = unit * prod (t^d - 1)
        ds, unit_e, sign = [], 2 * kj * n0, 1
        for kl in ks:
            if kl == kj:
                continue
            if kj > kl:
                ds.append(2 * (kj - kl))
                unit_e += 2 * kl
            else:
                ds.append(2 * (kl - kj))
                unit_e += 2 * kj
                sign = -sign
        ds.sort(reverse=True)
        q, den = _divide_binomials(num, ds)
        q = q.scale(sign).shift(-unit_e)
        lam[kj] = q if den == ONE else RatScalar(q, den)
    return lam


def _recurrence_residual(e, values, top):
    """sum_i e_i f(top - L + i) for the recurrence with coefficients e."""
    L = len(e) - 1
    return lsum([(e[i] * values(top - L + i), 0, 1) for i in range(L + 1) if e[i]])


# -------------------------------------------------------------------- fit

def fit(f, window_start=1, K=8, extra=5, *, K_max=256, method="probe",
        t0_samples=DEFAULT_T0, specialize=None, freq_bound=4096, prime=None,
        max_shift=8):
    """Decide whether n -> f(n) is an exponential polynomial in t^(2n).

    ``f`` returns LaurentScalars.  ``specialize(domain)`` may supply a
    faster accessor for modular values; by default f's values are reduced.
    For ``method='probe'`` K bounds the number of frequencies, for
    ``method='dense'`` their absolute value.  K doubles on failure up to
    K_max.
    """
    if K < 1 or extra < 1:
        raise InsufficientSamples("K and extra must be positive")
    start = time.perf_counter()
    memo = {}

    def value(n):
        v = memo.get(n)
        if v is None:
            v = memo[n] = f(n)
        return v

    n0 = window_start
    for _ in range(max_shift + 1):
        try:
            value(n0)
            break
        except SequenceUndefined:
            n0 += 1
    else:
        raise InsufficientSamples(f"sequence undefined on [{window_start}, {n0}]")

    if method == "dense":
        report = _fit_dense(value, n0, K, extra, K_max)
    elif method == "probe":
        if specialize is None:
            def specialize(dom):
                return lambda n: dom.scalar(value(n))
        report = _fit_probe(value, specialize, n0, K, extra, K_max, t0_samples, freq_bound, prime)
    else:
        raise ValueError(f"unknown fit method {method!r}")
    report.elapsed_ms = 1000 * (time.perf_counter() - start)
    return report


def _certify(value, e, n1, extra):
    passed = 0
    for i in range(extra):
        if _recurrence_residual(e, value, n1 + 1 + i):
            return passed, n1 + 1 + i
        passed += 1
    return passed, None


def _fit_probe(value, specialize, n0, K, extra, K_max, t0_samples, freq_bound, prime):
    probes = {}
    while True:
        window = range(n0, n0 + 2 * K + extra)
        try:
            support, details = support_probe(specialize, window, t0_samples, K, extra, freq_bound, prime)
        except DegenerateNodes as exc:
            return FitReport(INCONCLUSIVE, window=(n0, window[-1]), K=K, notes=[str(exc)])
        probes[K] = details
        if support is not None:
            break
        outcomes = [d["outcome"] for k, d in details.items() if k != "agree"]
        if "roots" in outcomes:
            return FitReport(INCONCLUSIVE, window=(n0, window[-1]), K=K, probes=probes,
                             notes=[f"recurrence roots are not of the form t0^(2k) with |k| <= {freq_bound}"])
        if K >= K_max:
            return FitReport(NOT_MEMBER, window=(n0, window[-1]), K=K, probes=probes,
                             notes=[f"recurrence order exceeds {K_max} at a modular point"])
        K = min(2 * K, K_max)

    L = len(support)
    n1 = n0 + L - 1
    if not details["agree"]:
        return FitReport(INCONCLUSIVE, support=support, window=(n0, n1), K=K, probes=probes,
                         notes=["probes at different t0 disagree"])
    e = _node_polynomial(support)
    lam = _solve_on_support([value(n0 + i) for i in range(L)], support, n0, e)
    poly = ExpPolynomial(lam)
    passed, bad = _certify(value, e, n1, extra)
    if bad is not None:
        return FitReport(INCONCLUSIVE, support=support, window=(n0, n1), K=K, probes=probes,
                         extra_checks_passed=passed,
                         notes=[f"probed support fails the exact check at n = {bad}"])
    return FitReport(MEMBER, support=poly.support, coefficients=poly, window=(n0, n1),
                     extra_checks_passed=passed, K=K, laurent_coefficients=poly.is_laurent(),
                     probes=probes)


def _fit_dense(value, n0, K, extra, K_max):
    while True:
        ks = list(range(-K, K + 1))
        n1 = n0 + 2 * K
        lam = _solve_on_support([value(n0 + i) for i in range(len(ks))], ks, n0)
        poly = ExpPolynomial(lam)
        passed = 0
        bad = None
        for n in range(n1 + 1, n1 + 1 + extra):
            g = poly(n)
            if (g.reduce() if isinstance(g, RatScalar) else RatScalar(g)) != RatScalar(value(n)):
                bad = n
                break
            passed += 1
        if bad is None:
            return FitReport(MEMBER, support=poly.support, coefficients=poly, window=(n0, n1),
                             extra_checks_passed=passed, method="dense", K=K,
                             laurent_coefficients=poly.is_laurent())
        if K >= K_max:
            return FitReport(NOT_MEMBER, window=(n0, n1), method="dense", K=K, extra_checks_passed=passed,
                             notes=[f"fit with |k| <= {K} disagrees at n = {bad}"])
        K = min(2 * K, K_max)


# -------------------------------------------------------------- annihilator

def annihilator_from_support(supports):
    """Q = prod over the multiset of frequencies of (L + L^-1 - t^2k - t^-2k).

    Frequencies are deduplicated within each support and repeated across
    supports.  When every support is empty one k = 0 factor is used, so
    that m >= 1.  Returns (Q, m).
    """
    ks = []
    for s in supports:
        ks.extend(sorted(set(s)))
    if not ks:
        ks = [0]
    Q = TorusElement.scalar(1)
    for k in ks:
        Q = Q * _q_factor(k)
    return Q, len(ks)


def _q_factor(k):
    c = LaurentScalar({2 * k: 1}) + LaurentScalar({-2 * k: 1})
    return TorusElement({(0, 1): 1, (0, -1): 1, (0, 0): -c})
