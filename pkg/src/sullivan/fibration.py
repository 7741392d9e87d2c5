"""Relative Sullivan algebras ``B -> B (x) ΛV -> ΛV`` modelling fibrations.

A :class:`KSExtension` keeps the base CDGA, the fiber generators in their
well order and the total differential on fiber generators.  Monomials of the
total algebra list the base exponents first, so a term ``b (x) f`` carries
no sign when split into its base and fiber parts.

The normalizations return :class:`Normalized` values holding the new
extension together with the composite :class:`BasisChange` that produced
it, so every result can be replayed and checked independently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import CDGA, Element, FreeGCA, Generator, check_d_squared
from .cohomology import DGMorphism, cohomology, is_quasi_iso, lower_slice_cohomology, solve_exact
from .errors import (
    CapError,
    GradingUnavailable,
    PreconditionError,
    TheoryViolation,
)
from .linalg import solve

EVEN_BASE_OBSTRUCTION = (
    "even-base-obstruction: trivialization needs a base that is a wedge of odd "
    "spheres; over an even sphere the Hopf-type fibration S^2 -> CP^3 -> S^4 is TNCZ "
    "with positively elliptic fiber and is still not a product"
)


class KSExtension:
    """Total algebra ``B (x) ΛV`` with a differential extending ``d_B``.

    ``fiber_generators`` are listed in any order; ``order`` (names) fixes the
    well order, defaulting to ascending degree with ties broken by listing
    order.  ``images`` maps fiber generator names to elements of the total
    algebra (strings are parsed there).
    """

    def __init__(self, base: CDGA, fiber_generators, images, order=None, name=None):
        self.base = base
        self.name = name
        gens = list(fiber_generators)
        if order is None:
            order = [g.name for g in sorted(gens, key=lambda g: (g.degree, gens.index(g)))]
        by_name = {g.name: g for g in gens}
        if sorted(order) != sorted(by_name):
            raise ValueError("KS order must list every fiber generator exactly once")
        clash = set(by_name) & set(base.algebra.names)
        if clash:
            raise ValueError(f"base and fiber share generator names {sorted(clash)}")
        self.order = tuple(order)
        fiber_gens = [by_name[n] for n in order]
        self.fiber_algebra = FreeGCA(fiber_gens, canonical=False)
        base_gens = list(base.algebra.generators)
        if all(g.lower is not None for g in fiber_gens) and fiber_gens:
            base_gens = [Generator(g.name, g.degree, 0) for g in base_gens]
        self.total_algebra = FreeGCA(base_gens + fiber_gens, canonical=False)
        self.nb = len(base_gens)
        tot = self.total_algebra
        parsed = {}
        for nm, img in images.items():
            if nm not in by_name:
                raise KeyError(f"differential given on unknown fiber generator {nm}")
            parsed[nm] = tot.element(img) if isinstance(img, str) else img.to(tot)
        self.images = {n: parsed.get(n, tot.zero()) for n in order}
        diff = {n: e.to(tot) for n, e in base.images.items()}
        diff.update({n: e for n, e in self.images.items() if e})
        self.total = CDGA(tot, diff, ideal=[r.to(tot) for r in base.ideal])
        fib = {}
        for n, e in self.images.items():
            p = self.project(e)
            if p:
                fib[n] = p
        self.fiber = CDGA(self.fiber_algebra, fib)

    # -- bookkeeping -----------------------------------------------------
    def __repr__(self):
        lines = [f"{n} -> {self.images[n]}" for n in self.order]
        return f"KSExtension(base={self.base!r}; " + "; ".join(lines) + ")"

    @property
    def fiber_generators(self):
        return self.fiber_algebra.generators

    def generator(self, name) -> Generator:
        return self.fiber_algebra.generator(name)

    def split(self, e: Element) -> dict:
        """``{base monomial: fiber element}`` with ``e = sum b (x) f``."""
        out: dict = {}
        nb = self.nb
        for m, c in e.terms.items():
            out.setdefault(m[:nb], {})[m[nb:]] = c
        return {b: Element(self.fiber_algebra, f) for b, f in out.items()}

    def join(self, base_mono, f: Element) -> Element:
        return Element(self.total_algebra, {tuple(base_mono) + m: c for m, c in f.terms.items()})

    def base_degree(self, m) -> int:
        return sum(e * d for e, d in zip(m[: self.nb], self.total_algebra.degrees))

    def project(self, e: Element) -> Element:
        """Image under ``B+ -> 0``."""
        zero = (0,) * self.nb
        return Element(self.fiber_algebra, {m[self.nb:]: c for m, c in e.terms.items() if m[: self.nb] == zero})

    def embed_fiber(self, f: Element) -> Element:
        return self.join((0,) * self.nb, f)

    def embed_base(self, b: Element) -> Element:
        return b.to(self.total_algebra)

    def D(self, e) -> Element:
        return self.total.d(self.total_algebra.element(e))

    def fiber_lower(self, name):
        g = self.generator(name)
        return g.lower

    def with_images(self, images, name=None) -> KSExtension:
        return KSExtension(self.base, self.fiber_generators, images, self.order, name or self.name)

    def same_differential(self, other: KSExtension) -> bool:
        return self.order == other.order and all(
            self.total.equal(self.images[n], other.images[n].to(self.total_algebra)) for n in self.order
        )

    def is_product(self) -> bool:
        """``D = d_B (x) 1 + 1 (x) d`` exactly."""
        return all(self.images[n] == self.embed_fiber(self.fiber.images.get(n, self.fiber_algebra.zero())) for n in self.order)

    def fiber_formal_dimension(self) -> int:
        gens = self.fiber_generators
        return sum(g.degree for g in gens if g.odd) - sum(g.degree - 1 for g in gens if not g.odd)

    def base_top_degree(self) -> int:
        """Top degree of the base when it is finite with zero differential."""
        top = 0
        if not self.base.images:
            degs = self.base.algebra.degrees
            bound = sum(degs) + 2 * max(degs, default=0)
            for k in range(bound + 1):
                if self.base.basis(k):
                    top = k
        return top


def product_extension(base: CDGA, fiber: CDGA, order=None, name=None) -> KSExtension:
    """``B (x) ΛV`` with ``D = d_B (x) 1 + 1 (x) d``."""
    images = {n: e for n, e in fiber.images.items()}
    ext = KSExtension(base, fiber.algebra.generators, {}, order, name)
    return ext.with_images({n: ext.embed_fiber(e.to(ext.fiber_algebra)) for n, e in images.items()}, name)


# -- verdicts ----------------------------------------------------------------


@dataclass
class Verdict:
    ok: bool
    generator: str | None = None
    reason: str | None = None
    witness: object = None

    def __bool__(self):
        return self.ok


def validate(ext: KSExtension) -> Verdict:
    """KS condition, ``D^2 = 0`` and ``D|_B = d_B``; first failure wins."""
    nb = ext.nb
    for i, n in enumerate(ext.order):
        for m in ext.images[n].terms:
            late = [ext.order[j] for j in range(i, len(ext.order)) if m[nb + j]]
            if late:
                return Verdict(False, n, f"D({n}) involves {late[0]}, which is not earlier in the KS order", m)
    for g in ext.base.algebra.generators:
        img = ext.total.images.get(g.name)
        want = ext.base.images.get(g.name)
        want = want.to(ext.total_algebra) if want is not None else None
        if (img is None) != (want is None) or (img is not None and img != want):
            return Verdict(False, g.name, "total differential differs from the base differential")
    sq = check_d_squared(ext.total)
    if not sq:
        return Verdict(False, sq.generator, "D^2 is not zero", sq.residual)
    return Verdict(True)


def _require_pure_split(ext: KSExtension):
    for g in ext.fiber_generators:
        if g.lower is None:
            raise GradingUnavailable(f"fiber generator {g.name} carries no even/odd split")
        if g.lower != (1 if g.odd else 0):
            raise GradingUnavailable(f"fiber generator {g.name} breaks the even/odd split")


def check_pure(ext: KSExtension) -> bool:
    """``D(V^even) = 0`` and ``D(V^odd)`` inside ``B (x) Λ(V^even)``."""
    _require_pure_split(ext)
    nb = ext.nb
    odd_slots = [nb + i for i, g in enumerate(ext.fiber_generators) if g.odd]
    for g in ext.fiber_generators:
        img = ext.images[g.name]
        if not g.odd:
            if img:
                return False
        elif any(m[j] for m in img.terms for j in odd_slots):
            return False
    return True


def fiber_is_pure(ext: KSExtension) -> bool:
    for g in ext.fiber_generators:
        img = ext.fiber.images.get(g.name)
        if not img:
            continue
        if not g.odd:
            return False
        if any(m[i] for m in img.terms for i in ext.fiber_algebra.odd):
            return False
    return True


def fiber_projection(ext: KSExtension) -> DGMorphism:
    images = {g.name: ext.fiber_algebra.zero() for g in ext.base.algebra.generators}
    images.update({n: ext.fiber_algebra.gen(n) for n in ext.order})
    return DGMorphism(ext.total, ext.fiber, images)


@dataclass
class TNCZVerdict:
    ok: bool
    cap: int
    degree: int | None = None
    fiber_class: Element | None = None
    fiber_betti: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_tncz(ext: KSExtension, cap: int | None = None) -> TNCZVerdict:
    """Surjectivity of ``H(B (x) ΛV) -> H(ΛV)`` through ``cap``.

    ``cap`` defaults to the fiber's formal dimension; the fiber cohomology
    must vanish in the two degrees past it, otherwise a :class:`CapError`
    is raised rather than deciding on a truncated window.
    """
    if cap is None:
        cap = ext.fiber_formal_dimension()
    fw = cohomology(ext.fiber, cap + 2)
    tail = [k for k in (cap + 1, cap + 2) if fw.betti[k]]
    if tail:
        raise CapError(f"fiber cohomology nonzero in degree {tail[0]} beyond cap {cap}")
    q = fiber_projection(ext)
    tw = cohomology(ext.total, cap)
    for k in range(cap + 1):
        fh = fw[k]
        if not fh.betti:
            continue
        image = [fh.coordinates(q(c)) for c in tw[k].classes]
        rows = [{i: v for i, v in enumerate(r) if v} for r in image]
        for j, rep in enumerate(fh.classes):
            unit = {j: Fraction(1)}
            if solve(rows, unit) is None:
                return TNCZVerdict(False, cap, k, rep, fw.betti[: cap + 1])
    return TNCZVerdict(True, cap, fiber_betti=fw.betti[: cap + 1])


# -- change of basis ---------------------------------------------------------


class BasisChange:
    """Triangular substitution ``v -> v + eta_v`` on fiber generators.

    Each ``eta_v`` has the degree of ``v``, positive base part in every term
    and fiber part built from generators strictly earlier than ``v``.
    """

    def __init__(self, ext: KSExtension, substitutions: dict):
        self.ext = ext
        tot = ext.total_algebra
        subs = {}
        for n, eta in substitutions.items():
            if n not in ext.order:
                raise KeyError(f"substitution for unknown fiber generator {n}")
            eta = ext.total.reduce(tot.element(eta) if isinstance(eta, str) else eta.to(tot))
            if not eta:
                continue
            g = ext.generator(n)
            if not eta.is_homogeneous() or eta.degree != g.degree:
                raise ValueError(f"substitution for {n} must have degree {g.degree}")
            pos = ext.order.index(n)
            for m in eta.terms:
                if not any(m[: ext.nb]):
                    raise ValueError(f"substitution for {n} has a term without base factor")
                if any(m[ext.nb + j] for j in range(pos, len(ext.order))):
                    raise ValueError(f"substitution for {n} uses a generator not earlier in the KS order")
            subs[n] = eta
        self.substitutions = subs

    def __bool__(self):
        return bool(self.substitutions)

    def __repr__(self):
        return "BasisChange(" + ", ".join(f"{n} -> {n} + ({e})" for n, e in self.substitutions.items()) + ")"

    def forward_images(self) -> dict:
        tot = self.ext.total_algebra
        out = {g.name: tot.gen(g.name) for g in tot.generators}
        for n, eta in self.substitutions.items():
            out[n] = out[n] + eta
        return out

    def inverse_images(self) -> dict:
        """Images of ``phi^{-1}`` by back-substitution along the KS order."""
        ext = self.ext
        tot = ext.total_algebra
        out = {g.name: tot.gen(g.name) for g in tot.generators}
        for n in ext.order:
            eta = self.substitutions.get(n)
            if eta is not None:
                out[n] = tot.gen(n) - _substitute(ext.total, eta, out)
        return out

    def inverse(self) -> BasisChange:
        inv = self.inverse_images()
        tot = self.ext.total_algebra
        return BasisChange(self.ext, {n: inv[n] - tot.gen(n) for n in self.substitutions})

    def then(self, other: BasisChange) -> BasisChange:
        """Composite ``self o other``: applying ``self`` and then ``other``."""
        fwd = self.forward_images()
        tot = self.ext.total_algebra
        subs = dict(self.substitutions)
        for n, eta in other.substitutions.items():
            extra = _substitute(self.ext.total, eta.to(tot), fwd)
            subs[n] = subs.get(n, tot.zero()) + extra
        return BasisChange(self.ext, subs)


def _substitute(cdga: CDGA, e: Element, images: dict) -> Element:
    """Algebra map given by generator ``images`` applied to ``e``."""
    alg = cdga.algebra
    gens = [images[g.name] for g in e.algebra.generators]
    out = alg.zero()
    for m, c in e.terms.items():
        term = alg.one() * c
        for k, img in zip(m, gens):
            for _ in range(k):
                term = term * img
        out = out + term
    return cdga.reduce(out)


def change_basis(ext: KSExtension, bc: BasisChange, name=None) -> KSExtension:
    """The isomorphic extension with differential ``phi^{-1} D phi``."""
    if bc.ext is not ext and not ext.same_differential(bc.ext):
        raise ValueError("basis change was built for a different extension")
    if not bc:
        return ext
    fwd = bc.forward_images()
    inv = bc.inverse_images()
    images = {}
    for n in ext.order:
        images[n] = _substitute(ext.total, ext.total.d(fwd[n]), inv)
    out = ext.with_images(images, name)
    v = validate(out)
    if not v:
        raise TheoryViolation(f"basis change produced an invalid extension at {v.generator}: {v.reason}")
    for n in ext.order:
        if out.fiber.images.get(n) != ext.fiber.images.get(n):
            raise TheoryViolation(f"basis change altered the fiber differential at {n}")
    return out


def random_basis_change(ext: KSExtension, rng: random.Random, density: float = 0.7, bound: int = 3) -> BasisChange:
    """Random valid triangular substitution with small integer coefficients."""
    tot = ext.total_algebra
    subs = {}
    for pos, n in enumerate(ext.order):
        g = ext.generator(n)
        terms = {}
        for m in ext.total.basis(g.degree):
            if not any(m[: ext.nb]) or any(m[ext.nb + j] for j in range(pos, len(ext.order))):
                continue
            if rng.random() < density:
                c = rng.randint(-bound, bound)
                if c:
                    terms[m] = c
        if terms:
            subs[n] = Element(tot, terms)
    return BasisChange(ext, subs)


# -- pushout -----------------------------------------------------------------


@dataclass
class PushoutResult:
    extension: KSExtension
    quasi_iso_certified: bool
    verified_cap: int | None = None


def pushout(ext: KSExtension, phi: DGMorphism, require_quasi_iso: bool = False, cap: int | None = None,
            name=None) -> PushoutResult:
    """Push ``ext`` forward along ``phi: B -> B'``; the fiber differential is kept."""
    if phi.source.algebra != ext.base.algebra:
        raise ValueError("morphism does not start at the extension's base")
    phi.check()
    certified = False
    if require_quasi_iso:
        if cap is None:
            cap = ext.base_top_degree() or max(phi.source.algebra.degrees, default=0) + 2
            cap = max(cap, max(phi.source.algebra.degrees, default=0) + 2)
        verdict = is_quasi_iso(phi, cap)
        if not verdict:
            raise PreconditionError(f"base map is not a quasi-isomorphism (degree {verdict.degree})")
        certified = True
    new_base = phi.target
    skeleton = KSExtension(new_base, ext.fiber_generators, {}, ext.order)
    tot = skeleton.total_algebra
    gen_images = {n: img.to(tot) for n, img in phi.images.items()}
    gen_images.update({n: tot.gen(n) for n in ext.order})
    images = {n: _substitute(skeleton.total, ext.images[n], gen_images) for n in ext.order}
    out = skeleton.with_images(images, name or ext.name)
    return PushoutResult(out, certified, cap if certified else None)


# -- normalizations ----------------------------------------------------------


@dataclass
class Normalized:
    extension: KSExtension
    change: BasisChange
    notes: list = field(default_factory=list)


def _solve_by_lower(fiber: CDGA, target: Element):
    """Solve ``d(eta) = target`` componentwise in the lower grading."""
    alg = fiber.algebra
    eta = alg.zero()
    comps: dict = {}
    for m, c in target.terms.items():
        comps.setdefault(alg.lower_degree(m), {})[m] = c
    for low, terms in sorted(comps.items()):
        piece = solve_exact(fiber, Element(alg, terms), lower_degree=low + 1)
        if piece is None:
            return None
        eta = eta + piece
    return eta


def _fiber_with_split(ext: KSExtension) -> CDGA:
    if ext.fiber_algebra.grading == "none":
        raise GradingUnavailable("fiber generators carry no lower degree")
    return ext.fiber


def normalize_over_odd_sphere(ext: KSExtension) -> Normalized:
    """Bring an extension over ``Λ(u)``, ``|u|`` odd, to ``D(V^even) ⊆ u·Λ(V^even)``.

    For each even ``v``, write ``D(v) = u*chi_0 + u*chi_plus`` by lower degree,
    solve ``d(eta) = chi_plus`` in positive lower degree and substitute
    ``v -> v + u*eta``.
    """
    base = ext.base
    if len(base.algebra) != 1 or not base.algebra.generators[0].odd or base.images or base.ideal:
        raise PreconditionError("base must be a free algebra on one odd generator")
    _require_pure_split(ext)
    if not fiber_is_pure(ext):
        raise PreconditionError("fiber model is not pure")
    fiber = _fiber_with_split(ext)
    u = base.algebra.generators[0].name
    current = ext
    total_change = BasisChange(ext, {})
    notes = []
    for n in ext.order:
        g = ext.generator(n)
        if g.odd:
            continue
        parts = current.split(current.images[n])
        chi = fiber.algebra.zero()
        for bm, f in parts.items():
            if any(bm):
                chi = chi + f
            elif f:
                raise PreconditionError(f"fiber differential of even generator {n} is nonzero")
        chi_plus = chi.filter(lambda m: fiber.algebra.lower_degree(m) > 0)
        chi_zero = chi - chi_plus
        if fiber.algebra.unit in chi_zero.terms:
            notes.append(f"D({n}) has a linear part {u}: input is not decomposable")
        if not chi_plus:
            continue
        eta = _solve_by_lower(fiber, chi_plus)
        if eta is None:
            raise TheoryViolation(f"chi_plus of {n} is not exact: fiber is not positively elliptic")
        ubase = current.embed_base(base.algebra.gen(u))
        step = BasisChange(current, {n: ubase * current.embed_fiber(eta)})
        current = change_basis(current, step)
        total_change = total_change.then(BasisChange(ext, step.substitutions))
    for n in ext.order:
        if not ext.generator(n).odd:
            for bm, f in current.split(current.images[n]).items():
                if any(fiber.algebra.lower_degree(m) for m in f.terms):
                    raise TheoryViolation(f"normalization left lower-degree terms in D({n})")
    return Normalized(current, total_change, notes)


def _base_is_odd_wedge(base: CDGA):
    """Raise unless the base has zero differential, odd generators and trivial products."""
    if base.images:
        raise PreconditionError("base must have zero differential; push out to its cohomology first")
    alg = base.algebra
    even = [g.name for g in alg.generators if not g.odd]
    if even:
        raise PreconditionError(f"base has even-degree classes ({', '.join(even)}); {EVEN_BASE_OBSTRUCTION}")
    for i, a in enumerate(alg.generators):
        for b in alg.generators[i + 1:]:
            if base.reduce(alg.gen(a.name) * alg.gen(b.name)):
                raise PreconditionError(f"base product {a.name}*{b.name} is nonzero; base is not a wedge of spheres")


def _even_stage(ext: KSExtension, names) -> tuple[KSExtension, BasisChange, list]:
    """Replace each listed generator ``v`` with a cocycle ``v + beta``, ``beta`` in ``B+ (x) ΛV``."""
    current = ext
    total = BasisChange(ext, {})
    notes = []
    for n in names:
        img = current.images[n]
        if not img:
            continue
        g = ext.generator(n)
        cands = [m for m in current.total.basis(g.degree)
                 if any(m[: current.nb]) and not any(m[current.nb + current.order.index(n):])]
        coeffs = solve([current.total.d_monomial(m) for m in cands], (-img).terms)
        if coeffs is None:
            raise PreconditionError(f"no cocycle of the form {n} + beta: the extension is not TNCZ")
        beta = Element(current.total_algebra, {cands[i]: c for i, c in coeffs.items()})
        step = BasisChange(current, {n: beta})
        current = change_basis(current, step)
        total = total.then(BasisChange(ext, step.substitutions))
        notes.append(f"made {n} a cocycle")
    return current, total, notes


def trivialize_over_odd_wedge(ext: KSExtension, check_tncz_first: bool = True) -> Normalized:
    """Change basis until ``D = 1 (x) d`` over a base that is a wedge of odd spheres.

    Even generators are first made into cocycles; then each odd ``v`` has
    ``D(v) = dv + sum_i b_i Omega_i(v)`` with each ``Omega_i(v)`` a cocycle
    of positive lower degree, hence ``d(eta_i)``, and ``v`` is replaced
    by ``v + sum_i b_i eta_i``.
    """
    _base_is_odd_wedge(ext.base)
    _require_pure_split(ext)
    if not fiber_is_pure(ext):
        raise PreconditionError("fiber model is not pure")
    if check_tncz_first and not check_tncz(ext):
        raise PreconditionError("extension is not TNCZ")
    fiber = ext.fiber
    even = [n for n in ext.order if not ext.generator(n).odd]
    current, total, notes = _even_stage(ext, even)
    if not check_pure(current):
        raise PreconditionError("extension is not pure after making even generators cocycles")
    for n in ext.order:
        if not ext.generator(n).odd:
            continue
        subs = current.total_algebra.zero()
        for bm, omega in current.split(current.images[n]).items():
            if not any(bm) or not omega:
                continue
            if fiber.d(omega):
                raise TheoryViolation(f"Omega({n}) at base {bm} is not a cocycle")
            eta = _solve_by_lower(fiber, omega)
            if eta is None:
                raise TheoryViolation(f"Omega({n}) at base {bm} is not exact")
            b = Element(current.total_algebra, {tuple(bm) + (0,) * len(ext.order): Fraction(1)})
            subs = subs + b * current.embed_fiber(eta)
        if subs:
            step = BasisChange(current, {n: subs})
            current = change_basis(current, step)
            total = total.then(BasisChange(ext, step.substitutions))
    if not current.is_product():
        raise TheoryViolation("trivialization did not reach the product differential")
    replay = change_basis(ext, total)
    if not replay.is_product():
        raise TheoryViolation("composite basis change does not reproduce the product differential")
    return Normalized(current, total, notes)


def _check_bigraded_fiber(ext: KSExtension):
    alg = _fiber_with_split(ext).algebra
    for g in alg.generators:
        if g.lower not in (0, 1):
            raise PreconditionError(f"fiber generator {g.name} has lower degree {g.lower}; need a two-stage model")
        img = ext.fiber.images.get(g.name)
        if img and any(alg.lower_degree(m) != g.lower - 1 for m in img.terms):
            raise PreconditionError(f"fiber differential of {g.name} does not lower the lower degree by one")


def filtration_holds(ext: KSExtension) -> Verdict:
    """Syntactic check: ``D(V_0) = 0`` and ``D(V_i)`` inside ``H(B) (x) (ΛV)_{(i-1)}``."""
    tot = ext.total_algebra
    for n in ext.order:
        g = ext.generator(n)
        img = ext.images[n]
        if g.lower == 0 and img:
            return Verdict(False, n, "D of a lower-degree-0 generator is nonzero", img)
        for m in img.terms:
            if tot.lower_degree(m) > g.lower - 1:
                return Verdict(False, n, "term of too high lower degree", m)
    return Verdict(True)


def filtered_normalize(ext: KSExtension, check_tncz_first: bool = True) -> Normalized:
    """Make ``D(V_0) = 0`` and ``D(V_1)`` land in ``H(B) (x) (ΛV)_0``.

    Stage 0 turns each ``v`` in ``V_0`` into a cocycle ``v + beta``.  Stage 1
    strips, for each ``v`` in ``V_1``, the terms of positive lower degree,
    lowest base degree first: the base-degree-``m`` part ``sum_j b_j chi_j``
    has ``d(chi_j) = 0``, so ``d(eta_j) = (-1)^m chi_j`` is solvable and
    ``D(sum_j b_j eta_j)`` removes it up to terms of higher base degree.
    """
    if ext.base.images:
        raise PreconditionError("base must have zero differential")
    _check_bigraded_fiber(ext)
    if check_tncz_first and not check_tncz(ext):
        raise PreconditionError("extension is not TNCZ")
    fiber = ext.fiber
    falg = fiber.algebra
    v0 = [n for n in ext.order if ext.generator(n).lower == 0]
    current, total, notes = _even_stage(ext, v0)
    tot = current.total_algebra
    for n in ext.order:
        g = ext.generator(n)
        if g.lower == 0:
            continue
        dv = current.embed_fiber(fiber.images.get(n, falg.zero()))
        eta_total = tot.zero()
        rest = current.images[n] - dv
        for _ in range(64):
            bad = {bm: f.filter(lambda m: falg.lower_degree(m) >= g.lower)
                   for bm, f in current.split(rest).items() if any(bm)}
            bad = {bm: f for bm, f in bad.items() if f}
            if not bad:
                break
            m = min(current.base_degree(bm + (0,) * len(ext.order)) for bm in bad)
            sign = -1 if m % 2 else 1
            step = tot.zero()
            for bm, chi in bad.items():
                if current.base_degree(bm + (0,) * len(ext.order)) != m:
                    continue
                if fiber.d(chi):
                    raise TheoryViolation(f"lowest term of D({n}) at base degree {m} is not a cocycle")
                eta = _solve_by_lower(fiber, chi * sign)
                if eta is None:
                    raise TheoryViolation(f"lowest term of D({n}) at base degree {m} is not exact")
                b = Element(tot, {tuple(bm) + (0,) * len(ext.order): Fraction(1)})
                step = step + b * current.embed_fiber(eta)
            eta_total = eta_total + step
            rest = rest - current.total.d(step)
        else:
            raise TheoryViolation(f"filtration of D({n}) did not terminate")
        if eta_total:
            sub = BasisChange(current, {n: -eta_total})
            current = change_basis(current, sub)
            total = total.then(BasisChange(ext, sub.substitutions))
    verdict = filtration_holds(current)
    if not verdict:
        raise TheoryViolation(f"filtered normalization failed at {verdict.generator}: {verdict.reason}")
    return Normalized(current, total, notes)


@dataclass
class FormalityCertificate:
    morphism: DGMorphism
    verified_cap: int
    hplus_zero: bool
    target: CDGA

    def __bool__(self):
        return self.hplus_zero


def formality_certificate_of_total(ext: KSExtension, cap: int | None = None) -> FormalityCertificate:
    """Verify that ``B (x) ΛV -> (B (x) ΛV)/(V_1, D V_1)`` is a quasi-isomorphism.

    Requires a filtered two-stage extension over a base with zero
    differential, so that the total algebra is bigraded.  Also checks that
    no cocycle of positive lower degree survives in the window.
    """
    if ext.base.images:
        raise PreconditionError("base must have zero differential")
    _check_bigraded_fiber(ext)
    v = filtration_holds(ext)
    if not v:
        raise PreconditionError(f"extension is not filtered at {v.generator}")
    if cap is None:
        cap = ext.base_top_degree() + ext.fiber_formal_dimension() + 2
    tot = ext.total
    alg = tot.algebra
    v1 = [n for n in ext.order if ext.generator(n).lower == 1]
    ideal = list(tot.ideal) + [alg.gen(n) for n in v1] + [ext.images[n] for n in v1 if ext.images[n]]
    target = CDGA(alg, {}, ideal=ideal)
    p = DGMorphism(tot, target, {g.name: alg.gen(g.name) for g in alg.generators})
    verdict = is_quasi_iso(p, cap)
    if not verdict:
        raise TheoryViolation(f"projection is not a quasi-isomorphism in degree {verdict.degree}")
    top_lower = len(v1)
    for k in range(1, cap + 1):
        for low in range(1, top_lower + 1):
            _, bad = lower_slice_cohomology(tot, k, low)
            if bad:
                raise TheoryViolation(f"non-exact cocycle of lower degree {low} in degree {k}: {bad[0]}")
    return FormalityCertificate(p, cap, True, target)


def verify_certificate(ext: KSExtension, change: BasisChange, expected: KSExtension) -> bool:
    """Replay a basis change and compare differentials."""
    return change_basis(ext, change).same_differential(expected)


__all__ = [
    "BasisChange",
    "EVEN_BASE_OBSTRUCTION",
    "FormalityCertificate",
    "KSExtension",
    "Normalized",
    "PushoutResult",
    "TNCZVerdict",
    "Verdict",
    "change_basis",
    "check_pure",
    "check_tncz",
    "filtered_normalize",
    "filtration_holds",
    "formality_certificate_of_total",
    "normalize_over_odd_sphere",
    "product_extension",
    "pushout",
    "random_basis_change",
    "trivialize_over_odd_wedge",
    "validate",
    "verify_certificate",
]
