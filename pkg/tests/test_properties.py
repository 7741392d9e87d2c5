"""Property suites; run on their own with ``pytest -m property``."""

from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from sullivan.algebra import CDGA, FreeGCA
from sullivan.cohomology import cohomology
from sullivan.corpus import load_fixture, read_manifest
from sullivan.elliptic import (
    PureModel,
    check_hplus_zero,
    complete_intersection_series,
    pure_model_from_presentation,
    regularity_certificate,
)
from sullivan.errors import NotRegular
from sullivan.oracle import dense_betti, dense_quotient_dimensions

from strategies import MIXED, elements, homogeneous, koszul_sign, presentations, pure_models

pytestmark = pytest.mark.property

WINDOW_LIMIT = 12

# valid models with a nontrivial differential or ideal, used for the d^2 and normal-form laws
MODELS = [
    CDGA(FreeGCA.on("v2:2 v3:3 w4:4 w7:7"), {"v3": "v2^2 - w4", "w7": "w4^2"}),
    CDGA(FreeGCA.on("a:2 b:2 x:3 y:5"), {"x": "a^2 + a*b", "y": "b^3"}),
    CDGA(FreeGCA.on("u3:3 u5:5 x2:2 v4:4 y5:5"), {"v4": "u5", "y5": "x2^3"}, ideal=["u3*u5"]),
    CDGA(FreeGCA.on("a:2 b:2"), ideal=["a^2 - b^2", "a*b"]),
]


def _model_elements():
    return st.sampled_from(MODELS).flatmap(lambda c: st.tuples(st.just(c), elements(c.algebra)))


# -- Koszul sign laws ----------------------------------------------------------------


@given(homogeneous(), homogeneous())
def test_graded_commutativity(a, b):
    assume(a and b)
    assert a * b == koszul_sign(a, b) * (b * a)


@given(homogeneous(), homogeneous(), homogeneous())
def test_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(homogeneous())
def test_odd_elements_square_to_zero(a):
    assume(a and a.degree % 2 == 1)
    assert a * a == MIXED.zero()


@given(st.permutations(["x", "y", "z", "a"]))
def test_sign_of_a_permuted_word_is_the_odd_inversion_parity(order):
    word = MIXED.one()
    for name in order:
        word = word * MIXED.gen(name)
    odd = [n for n in order if MIXED.generator(n).odd]
    inversions = sum(1 for i in range(len(odd)) for j in range(i + 1, len(odd)) if odd[i] > odd[j])
    assert word == MIXED.element("a*x*y*z") * Fraction(-1) ** inversions


# -- d^2 = 0 and Leibniz -----------------------------------------------------------


@given(_model_elements())
def test_d_squared_vanishes_on_valid_models(pair):
    cdga, e = pair
    assert not cdga.d(cdga.d(e))


@given(pure_models(), st.data())
def test_d_squared_vanishes_on_random_pure_models(cdga, data):
    e = data.draw(elements(cdga.algebra))
    assert not cdga.d(cdga.d(e))


@given(_model_elements(), st.data())
def test_leibniz_rule(pair, data):
    cdga, a = pair
    a = data.draw(homogeneous(cdga.algebra))
    b = data.draw(elements(cdga.algebra))
    assume(a)
    sign = Fraction(-1) ** a.degree
    assert cdga.equal(cdga.d(a * b), cdga.d(a) * b + sign * (a * cdga.d(b)))


# -- normal forms --------------------------------------------------------------------


@given(_model_elements(), st.data())
def test_normal_form_is_idempotent_and_ideal_invariant(pair, data):
    cdga, e = pair
    r = cdga.reduce(e)
    assert cdga.reduce(r) == r
    if cdga.ideal:
        gen = data.draw(st.sampled_from(cdga.ideal))
        mult = data.draw(elements(cdga.algebra))
        assert cdga.reduce(e + mult * gen) == r
        pivots = set()
        for k in {cdga.algebra.degree(m) for m in r.terms}:
            pivots |= set(cdga.ideal_echelon(k).pivots)
        assert not pivots & r.terms.keys()


# -- H_+ = 0 on certified pure elliptic fixtures ------------------------------------


def _certified_pure_fixtures():
    for entry in read_manifest():
        doc = load_fixture(entry["file"])
        name = entry["file"].removesuffix(".json")
        if doc.kind == "presentation" and entry["expect"].get("regular") is True:
            yield pytest.param(doc.payload, id=name)
        if doc.kind == "ks-extension" and entry["expect"].get("valid") and entry["expect"].get("tncz"):
            yield pytest.param(doc.extension.fiber, id=f"{name}-fiber")


@pytest.mark.parametrize("source", list(_certified_pure_fixtures()))
def test_hplus_vanishes_on_certified_fixtures(source):
    if isinstance(source, CDGA):
        model = PureModel(source)
    else:
        model = pure_model_from_presentation(source)
    assert check_hplus_zero(model).ok


@given(presentations())
def test_hplus_vanishes_on_random_regular_presentations(p):
    try:
        model = pure_model_from_presentation(p)
    except NotRegular:
        assume(False)
    assert check_hplus_zero(model).ok


# -- engine against the dense oracle ----------------------------------------------


def _oracle_window(cdga: CDGA) -> int:
    """Largest cap whose cochain window has total dimension at most WINDOW_LIMIT."""
    total, cap = 0, -1
    while cap < 40:
        total += len(cdga.basis(cap + 1))
        if total > WINDOW_LIMIT:
            break
        cap += 1
    return cap


@given(pure_models())
def test_cohomology_matches_dense_oracle_on_pure_models(cdga):
    cap = _oracle_window(cdga)
    assume(cap >= 2)
    assert cohomology(cdga, cap).betti == dense_betti(cdga, cap)


@pytest.mark.parametrize("index", range(len(MODELS)))
def test_cohomology_matches_dense_oracle_on_fixed_models(index):
    cdga = MODELS[index]
    cap = _oracle_window(cdga)
    assert cohomology(cdga, cap).betti == dense_betti(cdga, cap)


@given(st.sampled_from([0, 1, 2]), st.data())
def test_cohomology_matches_dense_oracle_on_quotients(which, data):
    alg = [FreeGCA.on("a:2 b:2"), FreeGCA.on("a:2 x:3"), FreeGCA.on("u:3 v:5 w:4")][which]
    ideal = [data.draw(homogeneous(alg, (4, 8))) for _ in range(data.draw(st.integers(1, 2)))]
    cdga = CDGA(alg, {}, [r for r in ideal if r])
    cap = _oracle_window(cdga)
    assert cohomology(cdga, cap).betti == dense_betti(cdga, cap)


# -- regularity certificate against the Hilbert series ------------------------------


@given(presentations())
def test_regularity_agrees_with_hilbert_series(p):
    cert = regularity_certificate(p)
    fd = p.expected_formal_dimension
    top = max(fd, 0) + max(p.algebra.degrees)
    dense = dense_quotient_dimensions(p, top)
    # a square graded system is regular exactly when its quotient is finite, and a
    # vanishing band as wide as the largest generator degree forces finiteness
    finite = all(d == 0 for d in dense[max(fd, 0) + 1: top + 1])
    assert cert.regular == finite
    if cert.regular:
        series = complete_intersection_series(p.algebra.degrees, [r.degree for r in p.relations], top)
        assert dense[: fd + 1] == series[: fd + 1]
        assert all(c == 0 for c in series[fd + 1:])
