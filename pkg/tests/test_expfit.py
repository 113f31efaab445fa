from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ajt.expfit import (
    INCONCLUSIVE,
    MEMBER,
    NOT_MEMBER,
    ExpPolynomial,
    InsufficientSamples,
    annihilator_from_support,
    berlekamp_massey,
    cyclotomic,
    fit,
    support_probe,
)
from ajt.jones import bracket, torus_jones
from ajt.points import ModularPoint
from ajt.qtorus import ColorSequence, PlaneCurvePoly, TorusElement, apply_to_sequence
from ajt.ring import LaurentScalar, RatScalar

t = LaurentScalar.monomial


def from_terms(terms):
    poly = ExpPolynomial(terms)
    return poly, (lambda n: poly(n))


def test_two_frequency_example():
    _, f = from_terms({1: 1, -1: 1})
    for method in ("probe", "dense"):
        rep = fit(f, K=2, method=method)
        assert rep.status == MEMBER
        assert rep.support == [-1, 1]
        assert rep.coefficients == ExpPolynomial({1: 1, -1: 1})
        assert rep.extra_checks_passed == 5


def test_constant_example():
    c = t(4).scale(5)
    rep = fit(lambda n: c, K=1)
    assert rep.status == MEMBER and rep.support == [0]
    assert rep.coefficients.terms[0] == c


def test_zero_sequence():
    rep = fit(lambda n: LaurentScalar(), K=1)
    assert rep.status == MEMBER and rep.support == []


def test_quantum_integer_is_member():
    # [n] = (t^2n - t^-2n) / (t^2 - t^-2): rational coefficients
    rep = fit(bracket, K=4)
    assert rep.status == MEMBER
    assert rep.support == [-1, 1]
    assert rep.laurent_coefficients is False
    assert rep.coefficients(7) == RatScalar(bracket(7))


def test_torus_shift_operator_is_member():
    JT = torus_jones(3, 2)
    op = TorusElement.parse("L^2 - t^-24 M^-12")
    rep = fit(lambda n: apply_to_sequence(op, JT, n), K=32)
    assert rep.status == MEMBER
    assert rep.extra_checks_passed >= 5
    for n in range(1, 12):
        assert rep.coefficients(n) == apply_to_sequence(op, JT, n)


def test_torus_knot_is_not_member():
    # J_T itself has t^(2 n^2)-type growth
    JT = torus_jones(3, 2)
    rep = fit(JT, K=4, K_max=16)
    assert rep.status == NOT_MEMBER
    rep = fit(JT, K=2, K_max=4, method="dense")
    assert rep.status == NOT_MEMBER


def test_specialize_hook_used():
    JT = torus_jones(3, 2)
    calls = []

    def spec(dom):
        calls.append(dom)
        seq = torus_jones(3, 2, dom)
        return seq

    rep = fit(JT, K=4, K_max=8, specialize=spec)
    assert rep.status == NOT_MEMBER
    assert calls and all(isinstance(d, ModularPoint) for d in calls)


def test_support_probe_example():
    _, f = from_terms({1: 1, -1: 1})
    sup, details = support_probe(lambda dom: (lambda n: dom.scalar(f(n))), range(1, 10), (Fraction(2),), K=2)
    assert sup == [-1, 1]
    assert details["agree"]


def test_berlekamp_massey_fibonacci():
    p = 1_000_003
    fib = [0, 1]
    for _ in range(20):
        fib.append((fib[-1] + fib[-2]) % p)
    order, C = berlekamp_massey(fib, p)
    assert order == 2
    assert C == [1, p - 1, p - 1]


def test_cyclotomic():
    assert cyclotomic(1) == LaurentScalar.parse("t - 1")
    assert cyclotomic(6) == LaurentScalar.parse("t^2 - t + 1")
    prod = LaurentScalar.constant(1)
    for d in (1, 2, 3, 4, 6, 12):
        prod = prod * cyclotomic(d)
    assert prod == LaurentScalar.parse("t^12 - 1")


def test_insufficient_samples():
    with pytest.raises(InsufficientSamples):
        fit(bracket, K=0)
    with pytest.raises(ValueError):
        fit(bracket, method="nope")


def test_window_shift_over_undefined():
    from ajt.qtorus import SequenceUndefined

    def f(n):
        if n < 3:
            raise SequenceUndefined(n)
        return t(2 * n)

    rep = fit(f, K=2)
    assert rep.status == MEMBER and rep.window[0] == 3


coeff = st.builds(lambda e, c: t(e).scale(c), st.integers(-6, 6), st.integers(-4, 4).filter(bool))


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.integers(-6, 6), coeff, max_size=5))
def test_round_trip(terms):
    poly, f = from_terms(terms)
    rep = fit(f, K=2)
    assert rep.status == MEMBER
    assert rep.support == poly.support
    assert rep.coefficients == poly


@settings(max_examples=25, deadline=None)
@given(st.dictionaries(st.integers(-4, 4), coeff, max_size=4))
def test_annihilator_kills_member(terms):
    poly, f = from_terms(terms)
    rep = fit(f, K=2)
    Q, m = annihilator_from_support([rep.support])
    seq = ColorSequence(f)
    for n in range(1, 5):
        assert apply_to_sequence(Q, seq, n) == LaurentScalar()
    assert Q.sigma() == Q
    assert Q.epsilon() == (PlaneCurvePoly.L() + PlaneCurvePoly.L(-1) - 2) ** m


def test_annihilator_padding_and_multiplicity():
    Q, m = annihilator_from_support([[], []])
    assert m == 1
    Q2, m2 = annihilator_from_support([[1, 1, -2], [1]])
    assert m2 == 3
    assert Q2.sigma() == Q2


def test_report_json():
    rep = fit(bracket, K=2)
    js = rep.to_json()
    assert js["status"] == MEMBER and js["support"] == [-1, 1]
    assert set(js["coefficients"]) == {"-1", "1"}


def test_inconclusive_on_large_frequency():
    # frequency beyond the probe bound cannot be read off
    rep = fit(lambda n: t(2 * 50 * n), K=2, freq_bound=10)
    assert rep.status == INCONCLUSIVE
