"""Numerical invariants: cup length, the Toomer invariant and a cone-length bound.

Only cup length and the Toomer invariant are computed from scratch.  The
common value on formal spaces and the LS category are reported when a
verified formality certificate pins them; nothing here estimates category
directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import CDGA, Element, FreeGCA, Generator
from .cohomology import CohomologyWindow, DGMorphism, cohomology, is_quasi_iso
from .errors import CapError, IncompleteContext, PreconditionError, TheoryViolation
from .fibration import KSExtension, _base_is_odd_wedge, fiber_is_pure, validate
from .linalg import Echelon, kernel

MODEL_DEPENDENT = "model-dependent unless minimal"


def _require_vanishing_top(win: CohomologyWindow):
    if win.cap >= 1 and (win.betti[win.cap] or win.betti[win.cap - 1]):
        raise CapError(f"cohomology does not vanish at the top of the window (cap {win.cap})")


def cup_length(win: CohomologyWindow) -> int:
    """Largest ``n`` with a nonzero ``n``-fold product of positive-degree classes."""
    _require_vanishing_top(win)
    cdga = win.cdga
    layer = {k: list(h.classes) for k, h in enumerate(win.per_degree) if k > 0 and h.betti}
    gens = [c for k in sorted(layer) for c in layer[k]]
    n = 0
    while layer:
        n += 1
        nxt: dict = {}
        echs: dict = {}
        for reps in layer.values():
            for a in reps:
                for g in gens:
                    p = cdga.reduce(a * g)
                    if not p:
                        continue
                    k = p.degree
                    h = cohomology(cdga, k)[k] if k > win.cap else win[k]
                    if not h.betti:
                        continue
                    coords = h.coordinates(p)
                    vec = {i: v for i, v in enumerate(coords) if v}
                    if not vec:
                        continue
                    ech = echs.setdefault(k, Echelon())
                    res, _ = ech.insert(vec)
                    if res:
                        nxt.setdefault(k, []).append(p)
        layer = nxt
    return n


def is_minimal(cdga: CDGA) -> bool:
    """Free with decomposable differential."""
    if cdga.ideal:
        return False
    return all(sum(m) >= 2 for img in cdga.images.values() for m in img.terms)


@dataclass
class ToomerResult:
    value: int
    per_degree: dict
    minimal: bool

    def __int__(self):
        return self.value


def toomer(cdga: CDGA, cap: int) -> ToomerResult:
    """Largest word length ``n`` such that some nonzero class has a representative in ``Λ^{>=n}V``.

    For each degree, cocycles supported on monomials of word length ``>= n``
    are tested against the coboundaries, ``n`` descending.  On a non-minimal
    free model the result is an invariant of that presentation only.
    """
    if cdga.ideal:
        raise PreconditionError("the Toomer invariant needs a free model")
    win = cohomology(cdga, cap)
    _require_vanishing_top(win)
    alg = cdga.algebra
    per_degree = {}
    for k in range(1, cap + 1):
        h = win[k]
        if not h.betti:
            continue
        basis = alg.monomials(k)
        top = max(sum(m) for m in basis)
        for n in range(top, 0, -1):
            sub = [m for m in basis if sum(m) >= n]
            images = [cdga.d_monomial(m) for m in sub]
            hit = False
            for vec in kernel(images):
                z = Element(alg, {sub[i]: c for i, c in vec.items()})
                if not h.is_exact(z):
                    hit = True
                    break
            if hit:
                per_degree[k] = n
                break
    value = max(per_degree.values(), default=0)
    return ToomerResult(value, per_degree, is_minimal(cdga))


def nil0(win: CohomologyWindow, model: CDGA, certificate_ok: bool, cap: int | None = None) -> int:
    """Common value of cup length and Toomer invariant on a certified formal space.

    ``win`` is the cohomology that the certificate identifies with the model's;
    a mismatch between the two computations is a bug trap.
    """
    if not certificate_ok:
        raise PreconditionError("formality certificate not verified")
    cup = cup_length(win)
    e0 = toomer(model, cap if cap is not None else win.cap).value
    if cup != e0:
        raise TheoryViolation(f"formal space with cup length {cup} but Toomer invariant {e0}")
    return cup


# -- free models of wedges ---------------------------------------------------


def wedge_minimal_model(base: CDGA, cap: int) -> CDGA:
    """Minimal model through degree ``cap`` of a zero-differential algebra with trivial products.

    Starts from the generators of ``base`` and, degree by degree, adds
    generators killing every class that does not come from a base generator.
    """
    if base.images:
        raise PreconditionError("base must have zero differential")
    alg = base.algebra
    for i, a in enumerate(alg.generators):
        for b in alg.generators[i:]:
            if base.reduce(alg.gen(a.name) * alg.gen(b.name)):
                raise PreconditionError(f"base product {a.name}*{b.name} is nonzero")
    gens = [Generator(g.name, g.degree) for g in alg.generators]
    images: dict = {}
    count = 0
    for k in range(2, cap + 2):
        malg = FreeGCA(gens)
        model = CDGA(malg, {n: e.to(malg) for n, e in images.items()})
        ech = Echelon()
        for m in model.basis(k - 1):
            img = model.d_monomial(m)
            if img:
                ech.insert(img)
        for g in malg.generators:
            if g.degree == k and g.name in alg.index:
                ech.insert(malg.gen(g.name).terms)
        basis = model.basis(k)
        new = []
        for vec in kernel([model.d_monomial(m) for m in basis]):
            z = {basis[i]: c for i, c in vec.items()}
            res, _ = ech.insert(z)
            if res:
                new.append(Element(malg, res))
        for z in new:
            count += 1
            name = f"w{k - 1}_{count}"
            gens.append(Generator(name, k - 1))
            images[name] = z
    final = FreeGCA(gens)
    return CDGA(final, {n: e.to(final) for n, e in images.items()})


def lift_to_free_base(ext: KSExtension, cap: int) -> KSExtension:
    """Replace a trivial-product cohomology base by its free model.

    Valid when every base monomial in ``D`` is a single generator or 1 and
    the lifted differential still squares to zero (pure extensions).
    """
    W = wedge_minimal_model(ext.base, cap)
    images = {n: e for n, e in ext.images.items()}
    out = KSExtension(W, ext.fiber_generators, {}, ext.order, ext.name)
    out = out.with_images({n: e.to(out.total_algebra) for n, e in images.items()})
    v = validate(out)
    if not v:
        raise PreconditionError(f"lifted extension is invalid at {v.generator}: {v.reason}")
    return out


# -- cone-length bound ---------------------------------------------------------


@dataclass
class AcyclicIdealQuotient:
    ideal_generators: list
    quotient: CDGA
    nilpotency_length: int
    cap: int
    betti: list
    witnesses: list = field(default_factory=list)


def nilpotency_length(cdga: CDGA, top: int) -> int:
    """Largest ``n`` with ``(A+)^n != 0`` for a finite-dimensional quotient ``A``."""
    alg = cdga.algebra
    for k in (top + 1, top + 2):
        if cdga.basis(k):
            raise CapError(f"quotient nonzero in degree {k} beyond {top}")
    layer = {k: [Element(alg, {m: Fraction(1)}) for m in cdga.basis(k)] for k in range(1, top + 1)}
    layer = {k: v for k, v in layer.items() if v}
    gens = [alg.gen(g.name) for g in alg.generators]
    n = 0
    while layer:
        n += 1
        nxt: dict = {}
        echs: dict = {}
        for reps in layer.values():
            for a in reps:
                for g in gens:
                    p = cdga.reduce(a * g)
                    if not p:
                        continue
                    k = p.degree
                    res, _ = echs.setdefault(k, Echelon()).insert(p.terms)
                    if res:
                        nxt.setdefault(k, []).append(p)
        layer = nxt
    return n


def cl0_upper_via_acyclic_quotient(ext: KSExtension, cap: int | None = None) -> AcyclicIdealQuotient:
    """Quotient of ``H(B) (x) ΛV`` by ``H(B) (x) ker(rho)``, ``rho`` the fiber's bigraded model map.

    The ideal is generated by the odd fiber generators and their fiber
    differentials.  Checks D-stability, that the projection is a
    quasi-isomorphism through ``cap`` and returns the quotient's
    nilpotency length, an upper bound for rational cone length.
    """
    _base_is_odd_wedge(ext.base)
    if not fiber_is_pure(ext):
        raise PreconditionError("fiber model is not pure")
    tot = ext.total
    alg = tot.algebra
    odd = [n for n in ext.order if ext.generator(n).odd]
    relations = [ext.embed_fiber(ext.fiber.images[n]) for n in odd if ext.fiber.images.get(n)]
    ideal = list(tot.ideal) + [alg.gen(n) for n in odd] + relations
    diff = {n: e for n, e in tot.images.items()}
    quotient = CDGA(alg, diff, ideal=ideal)
    for r in ideal:
        img = quotient.d(r)
        if img:
            raise TheoryViolation(f"ideal is not D-stable: D({r}) = {img} modulo the ideal")
    top = ext.base_top_degree() + ext.fiber_formal_dimension()
    if cap is None:
        cap = top + 2
    p = DGMorphism(tot, quotient, {g.name: alg.gen(g.name) for g in alg.generators})
    verdict = is_quasi_iso(p, cap)
    if not verdict:
        raise TheoryViolation(f"ideal is not acyclic: projection fails in degree {verdict.degree}")
    src = cohomology(tot, cap).betti
    length = nilpotency_length(quotient, top)
    witnesses = [(k, b) for k, b in enumerate(src)]
    return AcyclicIdealQuotient(ideal, quotient, length, cap, src, witnesses)


# -- reports ---------------------------------------------------------------------


@dataclass
class InvariantReport:
    cup0: int
    e0: int
    cl0_upper: int | None = None
    nil0: int | None = None
    cat0: int | None = None
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        if self.cup0 > self.e0:
            raise TheoryViolation(f"cup length {self.cup0} exceeds Toomer invariant {self.e0}")
        if self.nil0 is not None and not (self.cup0 == self.e0 == self.nil0):
            raise TheoryViolation("formal space with disagreeing cup length and Toomer invariant")
        if self.cl0_upper is not None and self.e0 > self.cl0_upper:
            raise TheoryViolation(f"Toomer invariant {self.e0} exceeds cone-length bound {self.cl0_upper}")

    def as_dict(self):
        return {
            "cup0": self.cup0,
            "e0": self.e0,
            "cl0_upper": self.cl0_upper,
            "nil0": self.nil0,
            "cat0": self.cat0,
            "provenance": [list(p) for p in self.provenance],
        }


def make_report(cup0, e0, nil0_value=None, cl0_upper=None, minimal=True) -> InvariantReport:
    prov = [("cup0", cup0, "cup-length: iterated products of classes")]
    rule = "toomer: word-length filtration of cocycles"
    if not minimal:
        rule += f" ({MODEL_DEPENDENT})"
    prov.append(("e0", e0, rule))
    cat0 = None
    if nil0_value is not None:
        prov.append(("nil0", nil0_value, "formal-agreement: verified formality certificate"))
        cat0 = nil0_value
        prov.append(("cat0", cat0, "formal-agreement: category equals the common value on formal spaces"))
    if cl0_upper is not None:
        prov.append(("cl0_upper", cl0_upper, "acyclic-ideal-quotient: nilpotency length of the quotient"))
    return InvariantReport(cup0, e0, cl0_upper, nil0_value, cat0, prov)


# -- fibration inequalities ---------------------------------------------------


@dataclass
class RuleVerdict:
    rule: str
    anchor: str
    applicable: bool
    passed: bool | None
    detail: str

    def as_row(self):
        status = "n/a" if not self.applicable else ("pass" if self.passed else "FAIL")
        return (self.rule, status, self.detail, self.anchor)


RULES = {
    "nil-superadditivity": "TNCZ, positively elliptic fiber, formal base: nil0(E) >= nil0(B) + nil0(F)",
    "cup-superadditivity": "TNCZ, formal fiber: cup0(E) >= cup0(B) + nil0(F)",
    "toomer-superadditivity": "TNCZ, formal fiber: e0(E) >= e0(B) + nil0(F)",
    "odd-wedge-nil": "TNCZ, positively elliptic fiber, base a wedge of odd spheres: nil0(E) = 1 + nil0(F)",
    "toomer-step": "Poincare duality fiber, base a wedge of odd spheres: e0(E) >= 1 + e0(F)",
    "odd-wedge-cone-length": "positively elliptic fiber, base a wedge of odd spheres: e0(E) = cl0(E) = nil0(F) + 1",
}


def _need(reports, key, attr):
    r = reports.get(key)
    if r is None or getattr(r, attr) is None:
        raise IncompleteContext(f"report {key} lacks {attr}")
    return getattr(r, attr)


def check_fibration_inequalities(reports: dict, flags: dict) -> list[RuleVerdict]:
    """Evaluate every applicable inequality for one fibration.

    ``reports`` maps ``"E"``, ``"B"``, ``"F"`` to :class:`InvariantReport`;
    ``flags`` has booleans ``tncz``, ``base_formal``, ``base_odd_wedge``,
    ``fiber_positively_elliptic`` and optionally ``fiber_poincare``.
    """
    tncz = flags.get("tncz", False)
    pe = flags.get("fiber_positively_elliptic", False)
    formal_b = flags.get("base_formal", False)
    wedge = flags.get("base_odd_wedge", False)
    pd = flags.get("fiber_poincare", pe)
    formal_f = flags.get("fiber_formal", pe)
    out = []

    def add(rule, applicable, compute):
        if not applicable:
            out.append(RuleVerdict(rule, RULES[rule], False, None, "hypotheses not met"))
            return
        ok, detail = compute()
        out.append(RuleVerdict(rule, RULES[rule], True, ok, detail))

    def nil_super():
        e, b, f = (_need(reports, k, "nil0") for k in "EBF")
        return e >= b + f, f"{e} >= {b} + {f}"

    def cup_super():
        e, b, f = _need(reports, "E", "cup0"), _need(reports, "B", "cup0"), _need(reports, "F", "nil0")
        return e >= b + f, f"{e} >= {b} + {f}"

    def toomer_super():
        e, b, f = _need(reports, "E", "e0"), _need(reports, "B", "e0"), _need(reports, "F", "nil0")
        return e >= b + f, f"{e} >= {b} + {f}"

    def wedge_nil():
        c, t, f = _need(reports, "E", "cup0"), _need(reports, "E", "e0"), _need(reports, "F", "nil0")
        n = reports["E"].nil0
        ok = c == t == 1 + f and (n is None or n == c)
        return ok, f"cup0(E)={c}, e0(E)={t}, 1 + nil0(F)={1 + f}"

    def toomer_step():
        e, f = _need(reports, "E", "e0"), _need(reports, "F", "e0")
        return e >= 1 + f, f"{e} >= 1 + {f}"

    def cone_length():
        e, c, f = _need(reports, "E", "e0"), _need(reports, "E", "cl0_upper"), _need(reports, "F", "nil0")
        return e == c == f + 1, f"e0(E)={e}, cl0_upper(E)={c}, nil0(F)+1={f + 1}"

    add("nil-superadditivity", tncz and pe and formal_b, nil_super)
    add("cup-superadditivity", tncz and formal_f, cup_super)
    add("toomer-superadditivity", tncz and formal_f, toomer_super)
    add("odd-wedge-nil", tncz and pe and wedge, wedge_nil)
    add("toomer-step", pd and wedge, toomer_step)
    add("odd-wedge-cone-length", pe and wedge, cone_length)
    return out
