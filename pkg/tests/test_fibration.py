import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sullivan.algebra import CDGA, FreeGCA, Generator
from sullivan.cohomology import DGMorphism, cohomology
from sullivan.errors import PreconditionError
from sullivan.fibration import (
    EVEN_BASE_OBSTRUCTION,
    BasisChange,
    KSExtension,
    change_basis,
    check_pure,
    check_tncz,
    filtered_normalize,
    filtration_holds,
    formality_certificate_of_total,
    normalize_over_odd_sphere,
    product_extension,
    pushout,
    random_basis_change,
    trivialize_over_odd_wedge,
    validate,
    verify_certificate,
)

S3 = CDGA(FreeGCA.on("u3:3"))
WEDGE = CDGA(FreeGCA.on("u3:3 u5:5"), ideal=["u3*u5"])
S4_COHOMOLOGY = CDGA(FreeGCA.on("w4:4"), ideal=["w4^2"])


def pure(signature, images):
    gens = [Generator(n, int(d), int(d) % 2) for n, d in (t.split(":") for t in signature.split())]
    return CDGA(FreeGCA(gens, canonical=False), images)


S2XS6 = pure("a2:2 b6:6 y3:3 z11:11", {"y3": "a2^2", "z11": "b6^2"})


def test_fixture_verdicts(fixture_doc):
    hopf = fixture_doc("cp3-over-s4").extension
    assert validate(hopf) and check_pure(hopf) and check_tncz(hopf)
    rev = validate(fixture_doc("cp3-over-s4-reversed").extension)
    assert not rev and rev.generator == "v3"
    sq = validate(fixture_doc("d-squared-over-s3").extension)
    assert not sq and sq.generator == "y3"
    circle = check_tncz(fixture_doc("circle-bundle-over-s2").extension)
    assert not circle and circle.degree == 1


def test_total_differential_must_restrict_to_the_base():
    base = CDGA(FreeGCA.on("x2:2 y3:3"), {"y3": "x2^2"})
    ext = KSExtension(base, [Generator("u1", 1, 1)], {"u1": "x2"})
    assert ext.D("u1*x2") == ext.total_algebra.element("x2^2")
    assert validate(ext)


@given(st.integers(0, 10_000))
def test_basis_change_inverse_round_trip(seed):
    ext = product_extension(WEDGE, S2XS6)
    bc = random_basis_change(ext, random.Random(seed))
    twisted = change_basis(ext, bc)
    assert validate(twisted)
    assert change_basis(twisted, BasisChange(twisted, bc.inverse().substitutions)).same_differential(ext)
    assert not bc.then(bc.inverse())
    assert verify_certificate(ext, bc, twisted)


def test_basis_change_rejects_bad_substitutions():
    ext = product_extension(S3, S2XS6, order=["a2", "b6", "y3", "z11"])
    with pytest.raises(ValueError, match="degree"):
        BasisChange(ext, {"y3": "u3*a2"})
    with pytest.raises(ValueError, match="base factor"):
        BasisChange(ext, {"b6": "a2^3"})
    with pytest.raises(ValueError, match="not earlier"):
        BasisChange(ext, {"b6": "u3*y3"})


def test_trivialize_over_odd_wedge():
    ext = product_extension(WEDGE, S2XS6)
    twisted = change_basis(ext, random_basis_change(ext, random.Random(3)))
    assert not twisted.is_product()
    res = trivialize_over_odd_wedge(twisted)
    assert res.extension.is_product()
    assert change_basis(twisted, res.change).is_product()
    phi = DGMorphism(res.extension.total, twisted.total, res.change.forward_images())
    assert phi.check()


def test_even_base_is_refused_with_the_obstruction():
    ext = product_extension(S4_COHOMOLOGY, S2XS6)
    with pytest.raises(PreconditionError) as info:
        trivialize_over_odd_wedge(ext)
    assert EVEN_BASE_OBSTRUCTION in str(info.value)


def test_base_with_differential_is_refused():
    s4 = CDGA(FreeGCA.on("w4:4 w7:7"), {"w7": "w4^2"})
    with pytest.raises(PreconditionError, match="push out"):
        trivialize_over_odd_wedge(product_extension(s4, S2XS6))


def test_normalize_over_odd_sphere(fixture_doc):
    ext = fixture_doc("s2-cubed-times-s12-twisted-over-s3").extension
    res = normalize_over_odd_sphere(ext)
    alg = res.extension.total_algebra
    u = alg.index["u3"]
    for g in res.extension.fiber_generators:
        if not g.odd:
            img = res.extension.images[g.name]
            assert all(m[u] == 1 for m in img.terms)
            assert all(alg.lower_degree(m) == 0 for m in img.terms)
    assert verify_certificate(ext, res.change, res.extension)


def test_odd_sphere_normalization_needs_a_single_odd_generator():
    with pytest.raises(PreconditionError):
        normalize_over_odd_sphere(product_extension(WEDGE, S2XS6))


def test_pushout_and_filtered_normalization_of_the_hopf_fibration(fixture_doc):
    doc = fixture_doc("cp3-over-s4")
    pushed = pushout(doc.extension, doc.base_formality, require_quasi_iso=True)
    assert pushed.quasi_iso_certified
    ext = pushed.extension
    assert cohomology(ext.total, 8).betti == [1, 0, 1, 0, 1, 0, 1, 0, 0]
    res = filtered_normalize(ext)
    assert filtration_holds(res.extension)
    assert formality_certificate_of_total(res.extension)


def test_pushout_refuses_a_non_quasi_iso(fixture_doc):
    ext = fixture_doc("cp3-over-s4").extension
    zero = DGMorphism(ext.base, CDGA(FreeGCA.on("w4:4"), ideal=["w4"]), {})
    with pytest.raises(PreconditionError):
        pushout(ext, zero, require_quasi_iso=True)


def test_certificate_needs_the_filtration():
    ext = product_extension(S3, S2XS6)
    bad = ext.with_images(dict(ext.images, b6=ext.total_algebra.element("u3*a2^2")))
    assert not filtration_holds(bad)
    with pytest.raises(PreconditionError):
        formality_certificate_of_total(bad)
