"""Acceptance criteria, one marker per criterion; the terminal summary prints PASS/FAIL lines."""

import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from sullivan.algebra import CDGA, FreeGCA, Generator
from sullivan.cohomology import DGMorphism, cohomology, is_quasi_iso
from sullivan.corpus import load_fixture, read_manifest
from sullivan.derivations import derivation_space, meier_verdict
from sullivan.elliptic import check_hplus_zero, pure_model_from_presentation
from sullivan.errors import PreconditionError
from sullivan.fibration import (
    EVEN_BASE_OBSTRUCTION,
    KSExtension,
    change_basis,
    check_pure,
    check_tncz,
    filtered_normalize,
    formality_certificate_of_total,
    product_extension,
    pushout,
    random_basis_change,
    trivialize_over_odd_wedge,
    validate,
    verify_certificate,
)
from sullivan.invariants import check_fibration_inequalities, cup_length, nil0, toomer
from sullivan.oracle import dense_derivation_dimension
from sullivan.pipeline import analyze

ROOT = Path(__file__).resolve().parents[1]

WEDGE = CDGA(FreeGCA.on("u3:3 u5:5"), ideal=["u3*u5"])
S4_COHOMOLOGY = CDGA(FreeGCA.on("w4:4"), ideal=["w4^2"])


def pure(signature, images):
    gens = [Generator(n, int(d), int(d) % 2) for n, d in (t.split(":") for t in signature.split())]
    return CDGA(FreeGCA(gens, canonical=False), images)


FIBERS = {
    "cp2": pure("x2:2 y5:5", {"y5": "x2^3"}),
    "s2xs4": pure("a2:2 b4:4 y3:3 z7:7", {"y3": "a2^2", "z7": "b4^2"}),
    "s2xs6": pure("a2:2 b6:6 y3:3 z11:11", {"y3": "a2^2", "z11": "b6^2"}),
}


def hopf_pushout():
    doc = load_fixture("cp3-over-s4")
    return pushout(doc.extension, doc.base_formality, require_quasi_iso=True).extension


def is_odd_wedge(base: CDGA) -> bool:
    alg = base.algebra
    gens = alg.generators
    return (not base.images and all(g.odd for g in gens)
            and all(not base.reduce(alg.gen(a.name) * alg.gen(b.name)) for a in gens for b in gens))


# -- 1 -------------------------------------------------------------------------------


@pytest.mark.acceptance(1, "Hopf fibration CP^1 -> CP^3 -> S^4 end to end")
def test_hopf_fibration_end_to_end():
    start = time.perf_counter()
    doc = load_fixture("cp3-over-s4")
    ext = doc.extension
    assert validate(ext)
    assert check_pure(ext) is True
    assert check_tncz(ext)
    win = cohomology(ext.total, 8)
    assert win.betti[:7] == [1, 0, 1, 0, 1, 0, 1]
    assert cup_length(win) == 3

    # the degree-2 class squares to a nonzero class in the total space ...
    (c,) = win.classes(2)
    assert any(win.coordinates(ext.total.reduce(c * c)))
    # ... but to zero in H(S^4) (x) H(S^2), which has the same Betti numbers
    tensor = CDGA(FreeGCA.on("x2:2 w4:4"), ideal=["w4^2", "x2^2"])
    twin = cohomology(tensor, 8)
    assert twin.betti == win.betti
    (t,) = twin.classes(2)
    assert not any(twin.coordinates(tensor.reduce(t * t)))
    assert time.perf_counter() - start < 1.0


# -- 2 -------------------------------------------------------------------------------

MEIER_SUITE = ["cp1", "cp2", "cp3", "cp4", "s2xs2", "s2xs4", "hp2", "flag-u3"]


@pytest.mark.acceptance(2, "negative-derivation criterion suite")
def test_negative_derivation_criterion_suite():
    start = time.perf_counter()
    for name in MEIER_SUITE:
        verdict = meier_verdict(load_fixture(name).payload)
        assert verdict.holds, name
        assert verdict.scanned_shifts, name
    p = load_fixture("truncated-two-generator").payload
    assert p.test_mode and not p.square
    assert derivation_space(p, -2).dimension == 1
    assert dense_derivation_dimension(p, -2) == 1
    assert time.perf_counter() - start < 5.0


# -- 3 -------------------------------------------------------------------------------


def _twists(fiber, count, nontrivial):
    """``count`` seeded basis changes of the product; with ``nontrivial`` only genuine twists."""
    prod = product_extension(WEDGE, fiber)
    seed = 0
    out = []
    while len(out) < count:
        twisted = change_basis(prod, random_basis_change(prod, random.Random(seed)))
        seed += 1
        if nontrivial and twisted.is_product():
            continue
        out.append(twisted)
        assert seed < 50 * count, "too few genuine twists"
    return prod, out


def _formal_projection(ext: KSExtension) -> DGMorphism:
    """``H(B) (x) ΛV -> H(B) (x) H(F)``: odd fiber generators to zero, relations imposed."""
    alg = ext.total_algebra
    odd = [n for n in ext.order if ext.generator(n).odd]
    relations = [ext.embed_fiber(ext.fiber.images[n]) for n in odd]
    ideal = list(ext.total.ideal) + [alg.gen(n) for n in odd] + relations
    target = CDGA(alg, {}, ideal)
    images = {g.name: alg.gen(g.name) for g in alg.generators if g.name not in odd}
    return DGMorphism(ext.total, target, images)


def _betti_convolution(a, b, cap):
    return [sum(a[i] * b[k - i] for i in range(k + 1) if i < len(a) and k - i < len(b)) for k in range(cap + 1)]


@pytest.mark.acceptance(3, "trivialization over a wedge of odd spheres, round trip")
@pytest.mark.parametrize("fiber, nontrivial", [("cp2", False), ("s2xs4", False), ("s2xs6", True)])
def test_odd_wedge_round_trip(fiber, nontrivial):
    start = time.perf_counter()
    prod, twists = _twists(FIBERS[fiber], 20, nontrivial)
    fd = prod.fiber_formal_dimension()
    cap = prod.base_top_degree() + fd + 2
    base_betti = cohomology(WEDGE, cap).betti
    fiber_betti = cohomology(prod.fiber, cap).betti
    kuenneth = _betti_convolution(base_betti, fiber_betti, cap)
    for ext in twists:
        res = trivialize_over_odd_wedge(ext)
        out = res.extension
        for n in out.order:
            want = out.embed_fiber(out.fiber.images.get(n, out.fiber_algebra.zero()))
            assert out.images[n] == want, n
        assert out.same_differential(prod)
        assert cohomology(ext.total, cap).betti == kuenneth
        # algebra isomorphisms H(twisted) <- H(product) -> H(B) (x) H(F) give matching products
        phi = DGMorphism(out.total, ext.total, res.change.forward_images())
        assert is_quasi_iso(phi, cap)
        assert is_quasi_iso(_formal_projection(out), cap)
    assert time.perf_counter() - start < 10.0


@pytest.mark.acceptance(3, "trivialization over a wedge of odd spheres, round trip")
def test_even_sphere_base_is_refused():
    prod = product_extension(S4_COHOMOLOGY, FIBERS["cp2"])
    for ext in (prod, load_fixture("s2xs6-twisted-over-s4-cohomology").extension):
        with pytest.raises(PreconditionError) as info:
            trivialize_over_odd_wedge(ext)
        assert EVEN_BASE_OBSTRUCTION in str(info.value)


# -- 4 -------------------------------------------------------------------------------


def _round_trip_extensions():
    yield "hopf-pushout", hopf_pushout()
    for entry in read_manifest():
        expect = entry["expect"]
        if entry["kind"] == "ks-extension" and "ok" in (expect.get("trivialize"), expect.get("filter_normalize")):
            doc = load_fixture(entry["file"])
            if doc.base_formality is not None:
                continue  # the Hopf fixture, covered by its pushout above
            yield entry["file"], doc.extension
    for fiber in FIBERS:
        _, twists = _twists(FIBERS[fiber], 3, fiber == "s2xs6")
        for i, ext in enumerate(twists):
            yield f"{fiber}-twist-{i}", ext


def _assert_literal_filtration(ext: KSExtension):
    tot = ext.total_algebra
    for n in ext.order:
        g = ext.generator(n)
        img = ext.images[n]
        if g.lower == 0:
            assert not img, f"D({n}) = {img} on a lower-degree-0 generator"
        else:
            assert g.lower == 1
            for m in img.terms:
                # every term lies in H(B) (x) (ΛV)_0: only lower-degree-0 fiber factors
                assert tot.lower_degree(m) == 0, f"D({n}) has a term of lower degree {tot.lower_degree(m)}"


@pytest.mark.acceptance(4, "filtered normalization and total-space formality certificate")
def test_filtered_normalization_and_certificate():
    names = []
    for name, ext in _round_trip_extensions():
        res = filtered_normalize(ext)
        _assert_literal_filtration(res.extension)
        assert verify_certificate(ext, res.change, res.extension), name
        cert = formality_certificate_of_total(res.extension)
        assert cert.hplus_zero and cert.verified_cap >= ext.fiber_formal_dimension(), name
        names.append(name)
    assert "hopf-pushout" in names and len(names) >= 15


# -- 5 -------------------------------------------------------------------------------


def _sphere(n):
    if n % 2:
        return CDGA(FreeGCA.on(f"u:{n}"))
    return CDGA(FreeGCA.on(f"x:{n} y:{2 * n - 1}"), {"y": "x^2"})


@pytest.mark.acceptance(5, "invariant table and fibration inequalities")
def test_invariant_table():
    start = time.perf_counter()
    for n in range(2, 9):
        model = _sphere(n)
        cap = 2 * n + 2
        assert toomer(model, cap).value == 1 == cup_length(cohomology(model, cap)), n
    for n in range(1, 5):
        model = pure_model_from_presentation(load_fixture(f"cp{n}").payload)
        cap = 2 * n + 2
        assert nil0(cohomology(model.cdga, cap), model.cdga, check_hplus_zero(model).ok, cap) == n
    cp2_s3 = CDGA(FreeGCA.on("x2:2 y5:5 u3:3"), {"y5": "x2^3"})
    assert toomer(cp2_s3, 10).value == 3

    wedge_fixtures, applicable = 0, set()
    for entry in read_manifest():
        if entry["kind"] != "ks-extension" or entry["expect"].get("valid") is False:
            continue
        doc = load_fixture(entry["file"])
        rep = analyze(doc)
        for rule in rep.rules:
            if rule.applicable:
                assert rule.passed, (entry["file"], rule.rule, rule.detail)
                applicable.add(rule.rule)
        if is_odd_wedge(doc.extension.base) and check_tncz(doc.extension):
            total, fiber = rep.invariants["total"], rep.invariants["fiber"]
            assert total.e0 == total.cl0_upper == fiber.nil0 + 1, entry["file"]
            wedge_fixtures += 1
    assert wedge_fixtures >= 6
    assert {"nil-superadditivity", "cup-superadditivity", "toomer-superadditivity"} <= applicable
    assert time.perf_counter() - start < 10.0


@pytest.mark.acceptance(5, "invariant table and fibration inequalities")
def test_corrupted_report_is_caught():
    rep = analyze(load_fixture("cp2-over-s3-wedge-s5"))
    reports = {"E": rep.invariants["total"], "B": rep.invariants["base"], "F": rep.invariants["fiber"]}
    flags = {"tncz": True, "base_formal": True, "base_odd_wedge": True, "fiber_positively_elliptic": True}
    assert all(r.passed for r in check_fibration_inequalities(reports, flags))
    forged = type(reports["E"]).__new__(type(reports["E"]))
    forged.__dict__.update(vars(reports["E"]), e0=1)
    verdicts = check_fibration_inequalities(dict(reports, E=forged), flags)
    assert any(r.applicable and r.passed is False for r in verdicts)


# -- 6 -------------------------------------------------------------------------------


@pytest.mark.acceptance(6, "property suites run standalone")
def test_property_suites_standalone():
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-m", "property", "-q", "-p", "no:cacheprovider",
         "tests/test_properties.py"],
        cwd=ROOT, capture_output=True, text=True, timeout=600,
    )
    tail = proc.stdout.strip().splitlines()[-1]
    assert proc.returncode == 0, proc.stdout[-3000:]
    assert "passed" in tail and "failed" not in tail and "error" not in tail
