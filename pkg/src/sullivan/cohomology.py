"""Degreewise cocycles, coboundaries and cohomology of a :class:`CDGA`.

Everything is exact: each degree is one sparse elimination over the standard
monomials of that degree.  Class representatives are cocycles in normal form
modulo coboundaries, so they are reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import CDGA, Element
from .errors import ChainMapViolation, DomainMismatch, PreconditionError
from .linalg import Echelon, kernel, solve


def _vec(e: Element) -> dict:
    return e.terms


class DegreeCohomology:
    """Cohomology data of one degree ``k``."""

    def __init__(self, cdga: CDGA, degree: int, where=None):
        self.cdga = cdga
        self.degree = degree
        alg = cdga.algebra
        basis = cdga.basis(degree, where=where)
        below = cdga.basis(degree - 1, where=where) if degree > 0 else []
        images = [cdga.d_monomial(m) for m in basis]
        self.cocycles = [
            Element(alg, {basis[i]: c for i, c in v.items()}) for v in kernel(images)
        ]
        bech = Echelon()
        for m in below:
            img = cdga.d_monomial(m)
            if img:
                bech.insert(img)
        self._boundaries = bech
        self.coboundaries = [Element(alg, row) for row in bech.rows()]
        cech = bech.copy()
        self.classes: list[Element] = []
        for z in self.cocycles:
            rep, _ = bech.reduce(z.terms)
            res, _ = cech.insert(rep, {len(self.classes): Fraction(1)})
            if res:
                self.classes.append(Element(alg, rep))
        self._classes = cech

    @property
    def betti(self) -> int:
        return len(self.classes)

    def is_cocycle(self, e: Element) -> bool:
        return not self.cdga.d(e)

    def is_exact(self, e: Element) -> bool:
        return self._boundaries.contains(self.cdga.reduce(e).terms)

    def coordinates(self, e: Element) -> list[Fraction]:
        """Coordinates of the class of the cocycle ``e`` in the class basis."""
        e = self.cdga.reduce(e)
        if e.terms and e.degree != self.degree:
            raise ValueError(f"element of degree {e.degree} given to degree {self.degree}")
        if self.cdga.d(e):
            raise PreconditionError(f"{e} is not a cocycle")
        res, tag = self._classes.reduce(e.terms, {})
        if res:
            raise PreconditionError(f"{e} is outside the window's cocycle space")
        return [-tag.get(i, Fraction(0)) for i in range(self.betti)]

    def __repr__(self):
        return f"H^{self.degree}: betti {self.betti}"


class CohomologyWindow:
    """Cohomology of ``cdga`` in degrees ``0..cap``."""

    def __init__(self, cdga: CDGA, cap: int, where=None):
        if cap < 0:
            raise ValueError("cap must be non-negative")
        self.cdga = cdga
        self.cap = cap
        self.per_degree = [DegreeCohomology(cdga, k, where) for k in range(cap + 1)]

    def __getitem__(self, k) -> DegreeCohomology:
        return self.per_degree[k]

    @property
    def betti(self) -> list[int]:
        return [h.betti for h in self.per_degree]

    @property
    def total_dimension(self) -> int:
        return sum(self.betti)

    @property
    def euler(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))

    def top_degree(self) -> int:
        nz = [k for k, b in enumerate(self.betti) if b]
        return max(nz) if nz else 0

    def vanishes_at_top(self, width: int = 2) -> bool:
        return all(b == 0 for b in self.betti[-width:])

    def coordinates(self, e: Element) -> list[Fraction]:
        k = e.degree if e else 0
        return self[k].coordinates(e)

    def classes(self, degree: int) -> list[Element]:
        return self[degree].classes

    def product(self, a: Element, b: Element) -> Element:
        return self.cdga.reduce(a * b)

    def positive_classes(self):
        for h in self.per_degree[1:]:
            for c in h.classes:
                yield c

    def products_vanish(self) -> bool:
        """True when every product of two positive-degree classes is zero."""
        pos = list(self.positive_classes())
        for i, a in enumerate(pos):
            for b in pos[i:]:
                p = self.product(a, b)
                k = p.degree if p else None
                if k is not None and k <= self.cap and not self[k].is_exact(p):
                    return False
        return True


_cache_attr = "_cohomology_cache"


def cohomology(cdga: CDGA, cap: int) -> CohomologyWindow:
    """Cohomology window of ``cdga`` through ``cap`` (memoized per CDGA)."""
    if cap < 0:
        raise ValueError("cap must be non-negative")
    cache = cdga.__dict__.setdefault(_cache_attr, {})
    win = cache.get("window")
    if win is not None and win.cap >= cap:
        if win.cap == cap:
            return win
        sub = CohomologyWindow.__new__(CohomologyWindow)
        sub.cdga, sub.cap, sub.per_degree = cdga, cap, win.per_degree[: cap + 1]
        return sub
    win = CohomologyWindow.__new__(CohomologyWindow)
    win.cdga, win.cap = cdga, cap
    old = cache.get("window")
    done = old.per_degree if old is not None else []
    win.per_degree = list(done) + [DegreeCohomology(cdga, k) for k in range(len(done), cap + 1)]
    cache["window"] = win
    return win


def lower_slice_cohomology(cdga: CDGA, degree: int, lower: int) -> tuple[list[Element], list[Element]]:
    """Cocycles of the ``(degree, lower)`` slice that are not coboundaries.

    Assumes the differential lowers the lower degree by exactly one, so the
    relevant coboundaries come from the slice ``(degree - 1, lower + 1)``.
    Returns ``(cocycles, non_exact_witnesses)``.
    """
    alg = cdga.algebra
    basis = cdga.basis(degree, lower_degree=lower)
    images = [cdga.d_monomial(m) for m in basis]
    cocycles = [Element(alg, {basis[i]: c for i, c in v.items()}) for v in kernel(images)]
    bech = Echelon()
    for m in cdga.basis(degree - 1, lower_degree=lower + 1) if degree > 0 else []:
        img = cdga.d_monomial(m)
        if img:
            bech.insert(img)
    witnesses = []
    for z in cocycles:
        res, _ = bech.insert(z.terms)
        if res:
            witnesses.append(z)
    return cocycles, witnesses


def solve_exact(cdga: CDGA, target: Element, where=None, min_word_length=None, lower_degree=None):
    """Some ``eta`` with ``d(eta) == target``, searched in the given slice, or None.

    ``where`` filters candidate monomials; ``lower_degree`` and
    ``min_word_length`` restrict the slice in the usual way.
    """
    if target.algebra != cdga.algebra:
        raise DomainMismatch("target lives in another algebra")
    target = cdga.reduce(target)
    if not target:
        return cdga.algebra.zero()
    if not target.is_homogeneous():
        raise PreconditionError(f"target {target} is not homogeneous")
    if cdga.d(target):
        raise PreconditionError(f"target {target} is not a cocycle")
    k = target.degree
    basis = cdga.algebra.basis_slice(k - 1, min_word_length, lower_degree)
    if cdga.ideal:
        piv = cdga.ideal_echelon(k - 1).pivots
        basis = [m for m in basis if m not in piv]
    if where is not None:
        basis = [m for m in basis if where(m)]
    coeffs = solve([cdga.d_monomial(m) for m in basis], target.terms)
    if coeffs is None:
        return None
    return Element(cdga.algebra, {basis[i]: c for i, c in coeffs.items()})


class DGMorphism:
    """Algebra map ``source -> target`` given on generators.

    Images may be strings, parsed in the target algebra.  The map must send
    the source ideal into the target ideal and commute with differentials;
    :meth:`check` verifies both and raises :class:`ChainMapViolation`.
    """

    def __init__(self, source: CDGA, target: CDGA, images: dict, check: bool = True):
        self.source = source
        self.target = target
        tgt = target.algebra
        out = {}
        for g in source.algebra.generators:
            img = images.get(g.name, tgt.zero())
            img = tgt.element(img)
            img = target.reduce(img)
            if img and img.degree != g.degree:
                raise ValueError(f"image of {g.name} has degree {img.degree}, expected {g.degree}")
            out[g.name] = img
        unknown = set(images) - set(out)
        if unknown:
            raise KeyError(f"images given for unknown generators {sorted(unknown)}")
        self.images = out
        self._gens = [out[g.name] for g in source.algebra.generators]
        self._mono: dict = {}
        if check:
            self.check()

    @classmethod
    def identity(cls, cdga: CDGA):
        return cls(cdga, cdga, {g.name: cdga.algebra.gen(g.name) for g in cdga.algebra.generators})

    @classmethod
    def inclusion(cls, source: CDGA, target: CDGA):
        return cls(source, target, {g.name: target.algebra.gen(g.name) for g in source.algebra.generators})

    def apply_monomial(self, m) -> Element:
        hit = self._mono.get(m)
        if hit is None:
            tgt = self.target.algebra
            hit = tgt.one()
            for e, img in zip(m, self._gens):
                for _ in range(e):
                    hit = hit * img
            hit = self.target.reduce(hit)
            self._mono[m] = hit
        return hit

    def __call__(self, e) -> Element:
        e = self.source.algebra.element(e)
        if e.algebra != self.source.algebra:
            raise DomainMismatch("element outside the morphism's source")
        out = self.target.algebra.zero()
        for m, c in e.terms.items():
            out = out + self.apply_monomial(m) * c
        return out

    def check(self):
        for r in self.source.ideal:
            img = self(r)
            if img:
                raise ChainMapViolation(f"ideal:{r}", img)
        for g in self.source.algebra.generators:
            x = self.source.algebra.gen(g.name)
            res = self(self.source.d(x)) - self.target.d(self(x))
            res = self.target.reduce(res)
            if res:
                raise ChainMapViolation(g.name, res)
        return True

    def compose(self, other: DGMorphism) -> DGMorphism:
        """``other o self``."""
        return DGMorphism(self.source, other.target, {n: other(img) for n, img in self.images.items()})

    def induced_matrix(self, degree: int, source_window=None, target_window=None):
        sw = source_window or cohomology(self.source, degree)
        tw = target_window or cohomology(self.target, degree)
        return [tw[degree].coordinates(self(c)) for c in sw[degree].classes]


@dataclass
class QuasiIsoVerdict:
    ok: bool
    degree: int | None = None
    source_betti: int | None = None
    target_betti: int | None = None
    image_rank: int | None = None
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def induced_rank(matrix) -> int:
    ech = Echelon()
    for row in matrix:
        ech.insert({i: v for i, v in enumerate(row) if v})
    return len(ech)


def is_quasi_iso(phi: DGMorphism, cap: int) -> QuasiIsoVerdict:
    """Whether ``phi`` is bijective on cohomology in every degree ``<= cap``."""
    phi.check()
    sw = cohomology(phi.source, cap)
    tw = cohomology(phi.target, cap)
    for k in range(cap + 1):
        bs, bt = sw[k].betti, tw[k].betti
        r = induced_rank(phi.induced_matrix(k, sw, tw)) if bs and bt else 0
        if not (bs == bt == r):
            return QuasiIsoVerdict(False, k, bs, bt, r)
    return QuasiIsoVerdict(True)
