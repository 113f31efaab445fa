from fractions import Fraction

import pytest

from ajt.conjecture import (
    DEFAULT_PARAMS,
    CaseTag,
    NotSymmetric,
    a_polynomial_cable,
    a_polynomial_factors,
    build_G,
    build_P,
    build_P_factors,
    build_witness,
    case_of,
    shift_lemma_operator,
    strong_aj_verify,
    symmetry_exponents,
    verify_annihilation,
    verify_cable_splitting,
    verify_epsilon_identity,
    verify_P_membership,
    verify_shift_lemmas,
)
from ajt.expfit import MEMBER
from ajt.jones import CableParams, InadmissibleParams, InvalidParams, torus_jones
from ajt.points import RationalPoint
from ajt.qtorus import PlaneCurvePoly, TorusElement
from ajt.ring import LaurentScalar

L, M = PlaneCurvePoly.L, PlaneCurvePoly.M
C1, C2, C3, C4 = (DEFAULT_PARAMS[c] for c in CaseTag)


def test_case_classification():
    assert case_of(C1) is CaseTag.OddS_QBig
    assert case_of(C2) is CaseTag.OddS_Q2
    assert case_of(C3) is CaseTag.EvenS_Big
    assert case_of(C4) is CaseTag.S2
    assert case_of(CableParams(5, 3, 61, 2)) is CaseTag.S2


def test_a_polynomial_examples():
    one = PlaneCurvePoly.monomial()
    assert a_polynomial_factors(C4) == [L() - one, L() - M(-24), L() + M(-26)]
    assert a_polynomial_factors(C2) == [L() - one, L() + M(-54), L(2) - M(-114)]
    A = a_polynomial_cable(C4)
    assert A == (L() - 1) * (L() - M(-24)) * (L() + M(-26))
    with pytest.raises(InadmissibleParams):
        a_polynomial_cable(CableParams(3, 2, 7, 2))
    assert a_polynomial_cable(CableParams(3, 2, 7, 2), strict=False)


@pytest.mark.parametrize("params,expected", [
    (C4, (1, 50, -3)), (C2, (1, 168, -4)), (C3, (-1, 296, -4)), (C1, (-1, 438, -5)),
])
def test_symmetry(params, expected):
    assert symmetry_exponents(a_polynomial_cable(params)) == expected


def test_symmetry_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        symmetry_exponents(L() + 2)
    with pytest.raises(NotSymmetric):
        symmetry_exponents(PlaneCurvePoly())


def test_build_G_examples():
    (G,) = build_G(C4)
    JT = torus_jones(3, 2)
    assert G(0) == LaurentScalar.constant(1)
    assert G(3) == JT(7)
    G1, G2 = build_G(C2)
    assert G1(0) == JT(4).shift(38)
    assert G2(0) == JT(2).shift(-38)
    with pytest.raises(InvalidParams):
        build_G((3, 2, 13, 2))


@pytest.mark.parametrize("params", [C1, C2, C3, C4, CableParams(-5, 2, -7, 3)], ids=str)
def test_cable_splitting(params):
    rep = verify_cable_splitting(params, range(0, 11))
    assert rep["status"] == "pass" and rep["first_failure"] is None


def test_splitting_detects_wrong_knot():
    # splitting for (3,2,13,2) must fail against the wrong r
    from ajt import conjecture
    rep = conjecture.verify_cable_splitting(C4, range(1, 4))
    assert rep["status"] == "pass"
    bad = conjecture._splitting_lhs(CableParams(3, 2, 15, 2))
    from ajt.jones import jones_sequence
    from ajt.qtorus import apply_to_sequence
    JC = jones_sequence(C4.knot)
    assert apply_to_sequence(bad, JC, 2) != build_G(C4)[0](2)


@pytest.mark.parametrize("params", [C1, C2, C3, C4], ids=str)
def test_P_is_sigma_invariant(params):
    P = build_P(params)
    assert P.sigma() == P
    for f in build_P_factors(params):
        assert f.sigma() == f


def test_case1_factors_commute():
    P1, P2 = build_P_factors(C1)
    assert P1 * P2 == P2 * P1


def test_membership_case4():
    (rep,) = verify_P_membership(C4)
    assert rep.status == MEMBER and rep.extra_checks_passed >= 5


def test_membership_case2_full_P():
    reps = verify_P_membership(C2, full_P=True)
    assert [r.status for r in reps] == [MEMBER, MEMBER]


def test_shift_lemma_operators():
    assert shift_lemma_operator(3, 2, 1, "L2m") == TorusElement.parse("L^2 - t^-24 M^-12")
    assert shift_lemma_operator(3, 2, 1, "Lm") == TorusElement.parse("L + t^-6 M^-6")
    with pytest.raises(InvalidParams):
        shift_lemma_operator(4, 3, 1, "Lm")
    with pytest.raises(ValueError):
        shift_lemma_operator(3, 2, 1, "L3m")


@pytest.mark.parametrize("p,q,m_max", [(3, 2, 3), (5, 3, 2), (4, 3, 2)])
def test_shift_lemmas(p, q, m_max):
    reps = verify_shift_lemmas(p, q, m_max)
    assert reps and all(r.status == MEMBER for r in reps)


@pytest.fixture(scope="module")
def witness4():
    return build_witness(C4)


def test_witness_case4(witness4):
    w = witness4
    assert w.m == 8 and w.k == 8
    assert w.R.sigma() == w.R
    assert w.S.sigma() == w.S
    rep = verify_epsilon_identity(w)
    assert rep["status"] == "pass" and rep["method"] == "expanded"
    assert rep["monomial"] == {"eta": 1, "a_exp": 400, "b_exp": -24}
    assert rep["checks"]["closed_form"]


def test_factored_certificate_matches_expanded(witness4):
    a = verify_epsilon_identity(witness4, expanded=False)
    b = verify_epsilon_identity(witness4, expanded=True)
    assert a["monomial"] == b["monomial"]


def test_annihilation_case4(witness4):
    rep = verify_annihilation(witness4, range(1, 9))
    assert rep["status"] == "pass" and rep["all_zero"]
    mut = verify_annihilation(witness4, range(1, 5), mutate=True)
    assert not mut["all_zero"] and mut["status"] == "pass"


def test_specialized_agrees_with_symbolic(witness4):
    dom = RationalPoint(Fraction(3, 2))
    Rd = witness4.R_at(dom)
    assert Rd.equals(witness4.R.specialize(dom))
    rep = verify_annihilation(witness4, range(1, 4), mode="specialized", workers=2)
    assert rep["all_zero"] and len(rep["rows"]) == 9


def test_pipeline_case2():
    rep = strong_aj_verify(C2)
    assert rep.ok, rep.to_json()
    assert rep.mode == "specialized" and rep.m == 48
    assert rep.monomial == {"eta": 1, "a_exp": 8064, "b_exp": -192}
    js = rep.to_json()
    assert [s["name"] for s in js["stages"]] == [
        "cable_splitting", "P_membership", "witness", "annihilation", "epsilon_identity"]


def test_pipeline_rejects_inadmissible():
    with pytest.raises(InadmissibleParams):
        strong_aj_verify(CableParams(3, 2, 7, 2))
