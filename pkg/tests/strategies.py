"""Hypothesis strategies shared by the unit tests and the property suite."""

from fractions import Fraction

from hypothesis import strategies as st

from sullivan.algebra import CDGA, Element, FreeGCA, Generator
from sullivan.elliptic import Presentation

MIXED = FreeGCA.on("a:2 b:2 x:3 y:3 w:4 z:5")

coefficients = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def homogeneous(draw, algebra=MIXED, degrees=(0, 12)):
    """A nonzero homogeneous element, or zero when the drawn degree is empty."""
    k = draw(st.integers(*degrees))
    basis = algebra.monomials(k)
    if not basis:
        return algebra.zero()
    picks = draw(st.lists(st.sampled_from(basis), min_size=1, max_size=4, unique=True))
    return Element(algebra, {m: draw(coefficients.filter(bool)) for m in picks})


@st.composite
def elements(draw, algebra=MIXED):
    out = algebra.zero()
    for _ in range(draw(st.integers(1, 3))):
        out = out + draw(homogeneous(algebra))
    return out


@st.composite
def pure_models(draw):
    """Free pure CDGA: even generators in degree 2/4, ``d(odd)`` a random even polynomial."""
    evens = draw(st.sampled_from([["a:2"], ["a:2", "b:2"], ["a:2", "c:4"]]))
    even_alg = FreeGCA.on(" ".join(evens))
    odd = []
    images = {}
    for i in range(draw(st.integers(1, 2))):
        degree = draw(st.sampled_from([3, 5, 7]))
        name = f"y{i}"
        odd.append(Generator(name, degree))
        poly = draw(homogeneous(even_alg, (degree + 1, degree + 1)))
        if poly:
            images[name] = poly
    alg = FreeGCA(list(even_alg.generators) + odd)
    return CDGA(alg, {n: p.to(alg) for n, p in images.items()})


@st.composite
def presentations(draw):
    """Square presentations with random degree-homogeneous relations."""
    signature = draw(st.sampled_from([[("a", 2)], [("a", 2), ("b", 2)], [("a", 2), ("b", 4)]]))
    probe = Presentation(signature, [])
    lowest = min(d for _, d in signature)
    rels = []
    for _ in signature:
        degree = draw(st.sampled_from(range(2 * lowest, 2 * lowest + 7, 2)))
        basis = probe.algebra.monomials(degree)
        picks = draw(st.lists(st.sampled_from(basis), min_size=1, max_size=3, unique=True))
        rel = Element(probe.algebra, {m: draw(st.integers(-2, 2).filter(bool)) for m in picks})
        rels.append(probe.algebra.format(rel))
    return Presentation(signature, rels)


def koszul_sign(a: Element, b: Element) -> Fraction:
    return Fraction(-1) ** (a.degree * b.degree)
