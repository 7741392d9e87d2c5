"""Evenly generated presentations ``Q[x_1..x_n]/(R_1..R_n)`` and their pure models.

A presentation is certified regular by comparing the Hilbert series of the
quotient with ``prod(1 - t^|R|) / prod(1 - t^|x|)`` and checking that the
quotient dies in a band of ``max|x|`` consecutive degrees past the expected
top; once it dies there it is zero in all higher degrees, because every
monomial of higher degree has a factor landing in that band.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import CDGA, Element, FreeGCA, Generator
from .cohomology import cohomology, lower_slice_cohomology
from .errors import CapError, NotMaximalSequence, NotRegular, PreconditionError


class Presentation:
    """Generators of even degree and homogeneous relations in ``Q[x]``.

    ``relations`` may be strings in the generator names.  ``test_mode``
    allows a relation count different from the generator count; such
    presentations are never certified regular.
    """

    def __init__(self, generators, relations, test_mode: bool = False, name: str | None = None):
        gens = [g if isinstance(g, Generator) else Generator(*g) for g in generators]
        for g in gens:
            if g.odd:
                raise ValueError(f"presentation generator {g.name} has odd degree {g.degree}")
        self.algebra = FreeGCA([Generator(g.name, g.degree) for g in gens])
        rels = []
        for r in relations:
            r = self.algebra.element(r)
            if not r:
                raise ValueError("zero relation")
            if not r.is_homogeneous():
                raise ValueError(f"relation {r} mixes degrees")
            rels.append(r)
        lowest = min((g.degree for g in gens), default=0)
        for r in rels:
            if r.degree < 2 * lowest:
                raise ValueError(f"relation {r} has degree below twice the lowest generator degree")
        self.relations = tuple(rels)
        self.test_mode = test_mode
        self.name = name
        self.quotient = CDGA(self.algebra, ideal=rels)

    @property
    def generators(self):
        return self.algebra.generators

    @property
    def homogeneous(self) -> bool:
        """True when every relation is homogeneous in word length as well."""
        return all(len({sum(m) for m in r.terms}) == 1 for r in self.relations)

    @property
    def square(self) -> bool:
        return len(self.relations) == len(self.generators)

    @property
    def expected_formal_dimension(self) -> int:
        return sum(r.degree for r in self.relations) - sum(self.algebra.degrees)

    def __repr__(self):
        rels = ", ".join(map(str, self.relations))
        return f"Presentation(Q[{', '.join(self.algebra.names)}]/({rels}))"


def quotient_basis(p: Presentation, cap: int) -> list[list]:
    """Standard monomials of ``Q[x]/(R)`` in each degree ``0..cap``."""
    if cap < 0:
        raise ValueError("cap must be non-negative")
    return [p.quotient.basis(k) for k in range(cap + 1)]


def quotient_dimensions(p: Presentation, cap: int) -> list[int]:
    return [len(b) for b in quotient_basis(p, cap)]


def complete_intersection_series(gen_degrees, rel_degrees, cap: int) -> list[int]:
    """Coefficients of ``prod(1 - t^r) / prod(1 - t^x)`` through ``t^cap``."""
    coeffs = [0] * (cap + 1)
    coeffs[0] = 1
    for r in rel_degrees:
        for k in range(cap, r - 1, -1):
            coeffs[k] -= coeffs[k - r]
    for x in gen_degrees:
        for k in range(x, cap + 1):
            coeffs[k] += coeffs[k - x]
    return coeffs


@dataclass
class RegularityVerdict:
    status: str  # "regular" | "notRegular" | "inconclusive"
    formal_dimension: int | None = None
    witness_degree: int | None = None
    cap: int | None = None
    dimensions: list = field(default_factory=list)
    expected: list = field(default_factory=list)

    @property
    def regular(self) -> bool:
        return self.status == "regular"

    def __bool__(self):
        return self.regular


def regularity_certificate(p: Presentation, cap: int | None = None) -> RegularityVerdict:
    """Decide whether the relations form a maximal regular sequence.

    The comparison runs through ``fd + max|x|``; a user ``cap`` below that
    yields ``inconclusive`` unless a mismatch already shows up.
    """
    if not p.square:
        raise NotMaximalSequence(
            f"{len(p.relations)} relations for {len(p.generators)} generators"
        )
    if not p.generators:
        return RegularityVerdict("regular", 0, dimensions=[1], expected=[1])
    fd = p.expected_formal_dimension
    bound = max(fd, 0) + max(p.algebra.degrees)
    top = bound if cap is None else min(cap, bound)
    dims = quotient_dimensions(p, top)
    expected = complete_intersection_series(p.algebra.degrees, [r.degree for r in p.relations], top)
    for k in range(top + 1):
        want = expected[k] if k <= fd else 0
        if dims[k] != want:
            return RegularityVerdict("notRegular", witness_degree=k, cap=top, dimensions=dims, expected=expected)
    if top < bound:
        return RegularityVerdict("inconclusive", cap=top, dimensions=dims, expected=expected)
    return RegularityVerdict("regular", fd, cap=top, dimensions=dims, expected=expected)


def partial_derivative(e: Element, name: str) -> Element:
    """Derivative along an even generator (no signs arise)."""
    alg = e.algebra
    i = alg.index[name]
    if alg.generators[i].odd:
        raise ValueError("partial derivative along an odd generator")
    out = {}
    for m, c in e.terms.items():
        if m[i]:
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = c * m[i]
    return Element(alg, out)


class PureModel:
    """A pure Sullivan algebra ``(Λ(V^even ⊕ V^odd), d)``.

    ``d`` vanishes on even generators and sends odd ones into ``Λ(V^even)``.
    Even generators sit in lower degree 0 and odd ones in lower degree 1, so
    the differential lowers the lower degree by one.
    """

    def __init__(self, cdga: CDGA, presentation: Presentation | None = None):
        alg = cdga.algebra
        if cdga.ideal:
            raise PreconditionError("a pure model is a free algebra")
        for g in alg.generators:
            img = cdga.images.get(g.name)
            if not g.odd and img:
                raise PreconditionError(f"even generator {g.name} is not closed")
            if g.odd and img:
                for m in img.terms:
                    if any(m[i] for i in alg.odd):
                        raise PreconditionError(f"d({g.name}) involves odd generators")
        if alg.grading != "pure-split":
            alg = alg.with_lower({g.name: 1 if g.odd else 0 for g in alg.generators})
            cdga = CDGA(alg, {k: v.to(alg) for k, v in cdga.images.items()})
        self.cdga = cdga
        self.presentation = presentation

    @property
    def algebra(self) -> FreeGCA:
        return self.cdga.algebra

    @property
    def even(self):
        return [g for g in self.algebra.generators if not g.odd]

    @property
    def odd(self):
        return [g for g in self.algebra.generators if g.odd]

    @property
    def chi_pi(self) -> int:
        return len(self.even) - len(self.odd)

    @property
    def formal_dimension(self) -> int:
        return sum(g.degree for g in self.odd) - sum(g.degree - 1 for g in self.even)

    @property
    def max_odd_degree(self) -> int:
        return max((g.degree for g in self.odd), default=0)

    def __repr__(self):
        return f"PureModel({self.cdga!r})"


def pure_model_from_presentation(p: Presentation, odd_names=None, verify: bool = True) -> PureModel:
    """The pure model ``Λ(x, y)`` with ``d(y_j) = R_j`` of a regular presentation."""
    cert = regularity_certificate(p)
    if not cert.regular:
        raise NotRegular(f"presentation is not certified regular ({cert.status})")
    n = len(p.relations)
    if odd_names is None:
        taken = set(p.algebra.names)
        odd_names, i = [], 1
        while len(odd_names) < n:
            if f"y{i}" not in taken:
                odd_names.append(f"y{i}")
            i += 1
    gens = [Generator(g.name, g.degree, 0) for g in p.generators]
    gens += [Generator(nm, r.degree - 1, 1) for nm, r in zip(odd_names, p.relations)]
    alg = FreeGCA(gens)
    cdga = CDGA(alg, {nm: r.to(alg) for nm, r in zip(odd_names, p.relations)})
    model = PureModel(cdga, p)
    if verify:
        fd = cert.formal_dimension
        got = cohomology(cdga, fd).betti
        want = quotient_dimensions(p, fd)
        if got != want:
            raise AssertionError(f"pure model cohomology {got} differs from quotient {want}")
    return model


@dataclass
class HPlusVerdict:
    ok: bool
    cap: int
    degree: int | None = None
    lower: int | None = None
    witness: Element | None = None

    def __bool__(self):
        return self.ok


def check_hplus_zero(model: PureModel, cap: int | None = None) -> HPlusVerdict:
    """Every cocycle of positive lower degree within ``cap`` is a coboundary."""
    need = model.formal_dimension + model.max_odd_degree
    if cap is None:
        cap = need
    if cap < need:
        raise PreconditionError(f"cap {cap} below formal dimension + max odd degree = {need}")
    cdga = model.cdga
    for k in range(1, cap + 1):
        for low in range(1, len(model.odd) + 1):
            _, bad = lower_slice_cohomology(cdga, k, low)
            if bad:
                return HPlusVerdict(False, cap, k, low, bad[0])
    return HPlusVerdict(True, cap)


@dataclass
class EulerReport:
    euler: int
    chi_pi: int
    formal_dimension: int
    betti: list
    odd_betti_vanish: bool
    violations: list = field(default_factory=list)

    @property
    def positively_elliptic(self) -> bool:
        return self.euler > 0 and self.chi_pi == 0 and self.odd_betti_vanish and not self.violations


def euler_report(model: PureModel, cap: int | None = None) -> EulerReport:
    """Euler characteristics of a pure model, with the three-way consistency check.

    Positive Euler characteristic, ``chi_pi == 0`` and vanishing odd
    cohomology must agree; a disagreement is recorded as a violation.
    """
    fd = model.formal_dimension
    if cap is None:
        cap = fd + 2
    if cap < fd + 2:
        raise PreconditionError(f"cap {cap} must reach formal dimension + 2 = {fd + 2}")
    win = cohomology(model.cdga, cap)
    tail = [k for k in range(fd + 1, cap + 1) if win.betti[k]]
    if tail:
        raise CapError(f"cohomology nonzero in degree {tail[0]} above formal dimension {fd}")
    betti = win.betti[: fd + 1]
    euler = sum((-1) ** k * b for k, b in enumerate(betti))
    odd_zero = all(b == 0 for b in betti[1::2])
    flags = [euler > 0, model.chi_pi == 0, odd_zero]
    violations = []
    if len(set(flags)) > 1:
        violations.append(
            f"inconsistent: euler>0={flags[0]}, chi_pi=0={flags[1]}, odd betti vanish={flags[2]}"
        )
    return EulerReport(euler, model.chi_pi, fd, betti, odd_zero, violations)
