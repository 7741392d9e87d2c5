from fractions import Fraction

import pytest
from hypothesis import given

from sullivan.algebra import CDGA, FreeGCA, Generator, check_d_squared
from sullivan.errors import DomainMismatch, ParseError

from strategies import MIXED, elements, homogeneous, koszul_sign


def test_generators_are_sorted_by_degree_then_name():
    alg = FreeGCA.on("z:5 b:2 a:2")
    assert alg.names == ("a", "b", "z")
    assert FreeGCA.on("z:5 b:2", canonical=False).names == ("z", "b")


def test_odd_generators_square_to_zero_and_anticommute():
    alg = FreeGCA.on("x:3 y:5 a:2")
    x, y, a = (alg.gen(n) for n in "xya")
    assert x * x == alg.zero()
    assert x * y == -(y * x)
    assert a * x == x * a
    assert alg.element("y*x") == -alg.element("x*y")


def test_monomial_enumeration_respects_exterior_exponents():
    alg = FreeGCA.on("x:2 y:3 z:4 u:5")
    assert [len(alg.monomials(k)) for k in range(10)] == [1, 0, 1, 1, 2, 2, 2, 3, 4, 4]
    assert all(m[alg.index["y"]] <= 1 for m in alg.monomials(20))


def test_parser_handles_fractions_powers_and_parentheses():
    alg = FreeGCA.on("a:2 b:2 x:3")
    e = alg.element("-3/2*a^2 + (a - b)*(a + b) x")
    want = alg.element("-3/2*a^2 + a^2*x - b^2*x")
    assert e == want
    assert alg.element("") == alg.zero()


@pytest.mark.parametrize("text, column", [("a + q", 5), ("a^x", 3), ("(a + b", 7), ("a $ b", 3)])
def test_parser_errors_carry_a_column(text, column):
    alg = FreeGCA.on("a:2 b:2")
    with pytest.raises(ParseError) as info:
        alg.element(text)
    assert info.value.column == column


def test_elements_of_different_algebras_do_not_mix():
    with pytest.raises(DomainMismatch):
        FreeGCA.on("a:2").gen("a") + FreeGCA.on("b:2").gen("b")


def test_to_reexpresses_in_a_larger_algebra():
    small = FreeGCA.on("x:3 y:3")
    big = FreeGCA.on("y:3 x:3", canonical=False)
    e = small.element("x*y")
    assert e.to(big) == -big.element("y*x")


def test_differential_degree_is_checked():
    alg = FreeGCA.on("x:2 y:3")
    with pytest.raises(ValueError):
        CDGA(alg, {"y": "x"})


def test_d_squared_reports_the_first_failing_generator():
    bad = CDGA(FreeGCA.on("x2:2 y3:3 z4:4"), {"y3": "x2^2", "z4": "x2*y3"})
    verdict = check_d_squared(bad)
    assert not verdict and verdict.generator == "z4"
    assert verdict.residual == bad.algebra.element("x2^3")
    assert check_d_squared(CDGA(FreeGCA.on("x:2 y:3"), {"y": "x^2"}))


def test_ideal_reduction_gives_normal_forms():
    cdga = CDGA(FreeGCA.on("a:2 b:2"), ideal=["a^2 - b^2", "a*b"])
    assert cdga.equal(cdga.e("a^2"), cdga.e("b^2"))
    assert cdga.in_ideal(cdga.e("a^3"))
    assert [cdga.dimension(k) for k in range(7)] == [1, 0, 2, 0, 1, 0, 0]


def test_generator_parity_and_lower_degree():
    g = Generator("v", 3, 1)
    assert g.odd and g.relabel(2).lower == 2


@given(homogeneous(), homogeneous())
def test_graded_commutativity(a, b):
    if a and b:
        assert a * b == b * a * koszul_sign(a, b)


@given(elements(), elements(), elements())
def test_associativity_and_distributivity(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_leibniz_on_a_twisted_model():
    cdga = CDGA(FreeGCA.on("v2:2 v3:3 w4:4 w7:7"), {"v3": "v2^2 - w4", "w7": "w4^2"})
    a, b = cdga.e("v3*v2"), cdga.e("w7 + v2*v3*v2")
    sign = Fraction(-1) ** a.degree
    assert cdga.d(a * b) == cdga.d(a) * b + a * cdga.d(b) * sign
    assert not cdga.d(cdga.d(b))


def test_mixed_algebra_has_expected_odd_slots():
    assert [MIXED.generators[i].name for i in MIXED.odd] == ["x", "y", "z"]
