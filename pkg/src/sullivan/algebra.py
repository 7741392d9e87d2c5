"""Free graded-commutative algebras over Q and their quotient CDGAs.

A :class:`FreeGCA` is polynomial on even generators and exterior on odd
ones.  Monomials are exponent tuples aligned with the algebra's generator
order; products restore that order with the Koszul sign.  A :class:`CDGA`
adds a differential (generator images, extended by the Leibniz rule) and an
optional homogeneous ideal that must be stable under the differential; all
computations then happen on normal forms modulo that ideal, degree by degree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from .errors import DomainMismatch, GradingUnavailable, ParseError, PreconditionError
from .linalg import Echelon, axpy

Monomial = tuple

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    lower: int | None = None

    def __post_init__(self):
        if not _NAME.match(self.name):
            raise ValueError(f"bad generator name {self.name!r}")
        if not isinstance(self.degree, int) or self.degree < 1:
            raise ValueError(f"generator {self.name} must have positive degree")
        if self.lower is not None and self.lower < 0:
            raise ValueError(f"generator {self.name} has negative lower degree")

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    def relabel(self, lower):
        return Generator(self.name, self.degree, lower)


GRADING_MODES = ("none", "lower-graded", "pure-split")


class FreeGCA:
    """Free graded-commutative algebra on an ordered list of generators.

    By default generators are put in canonical order (ascending degree, then
    name).  ``canonical=False`` keeps the given order; tensor products use it
    so that every monomial of ``A (x) B`` reads as an ``A``-part followed by a
    ``B``-part with no sign.
    """

    def __init__(self, generators=(), grading: str | None = None, canonical: bool = True):
        gens = tuple(generators)
        if canonical:
            gens = tuple(sorted(gens, key=lambda g: (g.degree, g.name)))
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        labelled = [g.lower is not None for g in gens]
        if any(labelled) and not all(labelled):
            raise ValueError("either all generators carry a lower degree or none do")
        if grading is None:
            if not gens or not all(labelled):
                grading = "none" if not all(labelled) or not gens else "pure-split"
            elif all(g.lower == (1 if g.odd else 0) for g in gens):
                grading = "pure-split"
            else:
                grading = "lower-graded"
        if grading not in GRADING_MODES:
            raise ValueError(f"unknown grading mode {grading!r}")
        if grading != "none" and not all(labelled):
            raise ValueError(f"grading mode {grading} needs lower degrees on all generators")
        if grading == "pure-split":
            for g in gens:
                if g.lower != (1 if g.odd else 0):
                    raise ValueError(f"generator {g.name} breaks the even/odd split")
        self.generators = gens
        self.grading = grading
        self.index = {g.name: i for i, g in enumerate(gens)}
        self.degrees = tuple(g.degree for g in gens)
        self.odd = tuple(i for i, g in enumerate(gens) if g.odd)
        self._key = (gens, grading)
        self._products: dict = {}
        self._slices: dict = {}

    # -- identity -------------------------------------------------------
    def __eq__(self, other):
        return self is other or (isinstance(other, FreeGCA) and self._key == other._key)

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "Λ(" + ", ".join(f"{g.name}:{g.degree}" for g in self.generators) + ")"

    def __len__(self):
        return len(self.generators)

    @property
    def names(self):
        return tuple(g.name for g in self.generators)

    def generator(self, name) -> Generator:
        return self.generators[self.index[name]]

    # -- constructors ---------------------------------------------------
    @classmethod
    def on(cls, signature: str, **kw):
        """``FreeGCA.on("x:2 y:5")``; an optional ``/k`` suffix sets the lower degree."""
        gens = []
        for token in signature.split():
            name, _, rest = token.partition(":")
            deg, _, low = rest.partition("/")
            gens.append(Generator(name, int(deg), int(low) if low else None))
        return cls(gens, **kw)

    def tensor(self, other: FreeGCA) -> FreeGCA:
        gens = self.generators + other.generators
        return FreeGCA(gens, canonical=False)

    def with_lower(self, lowers: dict) -> FreeGCA:
        """Copy of this algebra (same order) with lower degrees assigned by name."""
        return FreeGCA([g.relabel(lowers[g.name]) for g in self.generators], canonical=False)

    # -- elements -------------------------------------------------------
    def zero(self) -> Element:
        return Element(self, {})

    def one(self) -> Element:
        return Element(self, {self.unit: Fraction(1)})

    @cached_property
    def unit(self) -> Monomial:
        return (0,) * len(self.generators)

    def gen(self, name) -> Element:
        m = [0] * len(self.generators)
        m[self.index[name]] = 1
        return Element(self, {tuple(m): Fraction(1)})

    def monomial(self, exponents: dict) -> Monomial:
        m = [0] * len(self.generators)
        for name, e in exponents.items():
            if name not in self.index:
                raise KeyError(name)
            i = self.index[name]
            if e < 0 or (e > 1 and self.generators[i].odd):
                raise ValueError(f"bad exponent {e} for {name}")
            m[i] = e
        return tuple(m)

    def element(self, text) -> Element:
        """Parse a polynomial written like ``"v2^2 - w4"`` or ``"-3/2*u*y5"``.

        Factors are multiplied in the order written, so Koszul signs apply.
        """
        if isinstance(text, Element):
            return text
        if isinstance(text, (int, Fraction)):
            return self.one() * Fraction(text)
        return _parse_polynomial(self, str(text))

    # -- monomial data --------------------------------------------------
    def degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def word_length(self, m: Monomial) -> int:
        return sum(m)

    def lower_degree(self, m: Monomial) -> int:
        if self.grading == "none":
            raise GradingUnavailable("algebra has no lower grading")
        return sum(e * g.lower for e, g in zip(m, self.generators))

    def mono_product(self, a: Monomial, b: Monomial):
        """Return ``(sign, a*b)`` or ``None`` when an odd generator repeats."""
        key = (a, b)
        hit = self._products.get(key)
        if hit is not None or key in self._products:
            return hit
        result = None
        for i in self.odd:
            if a[i] and b[i]:
                break
        else:
            inversions = 0
            for j in self.odd:
                if b[j]:
                    inversions += sum(1 for i in self.odd if i > j and a[i])
            result = (-1 if inversions % 2 else 1, tuple(x + y for x, y in zip(a, b)))
        self._products[key] = result
        return result

    def multiply(self, a: Element, b: Element) -> Element:
        if a.algebra != self or b.algebra != self:
            raise DomainMismatch(f"cannot multiply elements of {a.algebra} and {b.algebra} in {self}")
        out: dict = {}
        for ma, ca in a.terms.items():
            for mb, cb in b.terms.items():
                hit = self.mono_product(ma, mb)
                if hit is None:
                    continue
                sign, m = hit
                v = out.get(m, 0) + sign * ca * cb
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Element(self, out, _clean=True)

    def monomials(self, degree: int) -> list:
        """All monomials of the given cohomological degree, sorted."""
        if degree < 0:
            return []
        hit = self._slices.get(degree)
        if hit is not None:
            return hit
        n = len(self.generators)
        out = []
        # reach[i][r]: degree r is a sum over generators i.. (odd ones at most once)
        reach = [[False] * (degree + 1) for _ in range(n + 1)]
        reach[n][0] = True
        for i in range(n - 1, -1, -1):
            d, nxt, cur = self.degrees[i], reach[i + 1], reach[i]
            for r in range(degree + 1):
                if nxt[r] or (d <= r and (cur[r - d] if not self.generators[i].odd else nxt[r - d])):
                    cur[r] = True

        def rec(i, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc) + (0,) * (n - i))
                return
            d = self.degrees[i]
            top = 1 if self.generators[i].odd else remaining // d
            for e in range(min(top, remaining // d), -1, -1):
                if reach[i + 1][remaining - e * d]:
                    acc.append(e)
                    rec(i + 1, remaining - e * d, acc)
                    acc.pop()

        if not reach[0][degree]:
            self._slices[degree] = out
            return out

        rec(0, degree, [])
        out.sort()
        self._slices[degree] = out
        return out

    def basis_slice(self, degree, min_word_length=None, lower_degree=None) -> list:
        if lower_degree is not None and self.grading == "none":
            raise GradingUnavailable("lower-degree slice requested on an algebra without lower grading")
        out = self.monomials(degree)
        if min_word_length is not None:
            out = [m for m in out if sum(m) >= min_word_length]
        if lower_degree is not None:
            out = [m for m in out if self.lower_degree(m) == lower_degree]
        return out

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for e, g in zip(m, self.generators):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    def format(self, e: Element) -> str:
        if not e.terms:
            return "0"
        pieces = []
        for m in sorted(e.terms, key=lambda m: (-self.degree(m), tuple(-x for x in m))):
            c = e.terms[m]
            mono = self.format_monomial(m)
            mag = abs(c)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text


class Element:
    """Finite Q-linear combination of monomials of one :class:`FreeGCA`.

    Treated as immutable: arithmetic always returns new elements.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: FreeGCA, terms=None, _clean=False):
        self.algebra = algebra
        if _clean:
            self.terms = terms
        else:
            self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    def _check(self, other):
        if not isinstance(other, Element):
            return self.algebra.one() * other
        if other.algebra != self.algebra:
            raise DomainMismatch(f"elements of {self.algebra} and {other.algebra}")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        axpy(out, 1, other.terms)
        return Element(self.algebra, out, _clean=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        axpy(out, -1, other.terms)
        return Element(self.algebra, out, _clean=True)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Element(self.algebra, {m: -c for m, c in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        if isinstance(other, Element):
            return self.algebra.multiply(self, other)
        c = Fraction(other)
        if not c:
            return self.algebra.zero()
        return Element(self.algebra, {m: v * c for m, v in self.terms.items()}, _clean=True)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, n: int):
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.algebra.one() * other
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Element({self.algebra.format(self)})"

    def __str__(self):
        return self.algebra.format(self)

    @property
    def degree(self):
        """Common degree of the terms; None for zero, ValueError if inhomogeneous."""
        degs = {self.algebra.degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"{self} is not homogeneous")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len({self.algebra.degree(m) for m in self.terms}) <= 1

    def components(self) -> dict:
        """Split into homogeneous components keyed by degree."""
        out: dict = {}
        for m, c in self.terms.items():
            out.setdefault(self.algebra.degree(m), {})[m] = c
        return {k: Element(self.algebra, v, _clean=True) for k, v in out.items()}

    def filter(self, keep) -> Element:
        return Element(self.algebra, {m: c for m, c in self.terms.items() if keep(m)}, _clean=True)

    def coefficient(self, m) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def to(self, algebra: FreeGCA) -> Element:
        """Re-express in another algebra sharing the generator names used here."""
        if algebra == self.algebra:
            return self
        src = self.algebra
        try:
            factors = [algebra.gen(g.name) for g in src.generators]
        except KeyError as exc:
            raise DomainMismatch(f"generator {exc} missing from {algebra}") from None
        out = algebra.zero()
        for m, c in self.terms.items():
            term = algebra.one() * c
            for e, f in zip(m, factors):
                for _ in range(e):
                    term = term * f
            out = out + term
        return out


def multiply(a: Element, b: Element) -> Element:
    return a.algebra.multiply(a, b)


def basis_slice(algebra: FreeGCA, degree, min_word_length=None, lower_degree=None):
    return algebra.basis_slice(degree, min_word_length, lower_degree)


class CDGA:
    """``(ΛV / I, d)`` with ``d`` given on generators and ``I`` a d-stable ideal.

    ``differential`` maps generator names to elements (parsed from strings if
    needed); missing generators are closed.  ``ideal`` lists homogeneous
    generators of the ideal.  Elements are handled as representatives in the
    free algebra and reduced to normal form by :meth:`reduce`.
    """

    def __init__(self, algebra: FreeGCA, differential=None, ideal=()):
        self.algebra = algebra
        images = {}
        for name, img in (differential or {}).items():
            if name not in algebra.index:
                raise KeyError(f"differential given on unknown generator {name}")
            img = algebra.element(img)
            if img.algebra != algebra:
                raise DomainMismatch(f"image of {name} lives in {img.algebra}")
            g = algebra.generator(name)
            if img and img.degree != g.degree + 1:
                raise ValueError(f"d({name}) has degree {img.degree}, expected {g.degree + 1}")
            if img:
                images[name] = img
        self.images = images
        self._gen_images = [images.get(g.name) for g in algebra.generators]
        gens = []
        for r in ideal:
            r = algebra.element(r)
            if not r:
                continue
            if not r.is_homogeneous():
                raise ValueError(f"ideal generator {r} is not homogeneous")
            gens.append(r)
        self.ideal = tuple(gens)
        self._ideal_ech: dict = {}
        self._dmono: dict = {}
        self._basis: dict = {}

    def __repr__(self):
        parts = [f"d({k}) = {v}" for k, v in self.images.items()]
        if self.ideal:
            parts.append("I = (" + ", ".join(map(str, self.ideal)) + ")")
        return f"CDGA({self.algebra}; " + "; ".join(parts) + ")"

    @property
    def is_free(self) -> bool:
        return not self.ideal

    @property
    def has_zero_differential(self) -> bool:
        return not self.images

    def e(self, text) -> Element:
        return self.algebra.element(text)

    # -- ideal ------------------------------------------------------------
    def ideal_echelon(self, degree) -> Echelon:
        ech = self._ideal_ech.get(degree)
        if ech is None:
            ech = Echelon()
            alg = self.algebra
            odd = alg.odd
            # monomial generators first, so every existing pivot is a bare monomial row
            for r in sorted(self.ideal, key=lambda r: len(r.terms) != 1):
                k = degree - r.degree
                if len(r.terms) == 1:
                    # a monomial generator spans monomials; sign and scale are irrelevant
                    (rm,) = r.terms
                    for m in alg.monomials(k):
                        prod = tuple(a + b for a, b in zip(m, rm))
                        if prod not in ech.pivots and all(prod[i] < 2 for i in odd):
                            ech.insert({prod: Fraction(1)})
                    continue
                for m in alg.monomials(k):
                    prod = alg.multiply(Element(alg, {m: Fraction(1)}, _clean=True), r)
                    ech.insert(prod.terms)
            self._ideal_ech[degree] = ech
        return ech

    def reduce(self, e: Element) -> Element:
        if not self.ideal or not e.terms:
            return e
        out: dict = {}
        for k, comp in e.components().items():
            res, _ = self.ideal_echelon(k).reduce(comp.terms)
            out.update(res)
        return Element(self.algebra, out, _clean=True)

    def in_ideal(self, e: Element) -> bool:
        return not self.reduce(e)

    def equal(self, a: Element, b: Element) -> bool:
        return not self.reduce(a - b)

    # -- slices -----------------------------------------------------------
    def basis(self, degree, min_word_length=None, lower_degree=None, where=None) -> list:
        """Standard monomials spanning the requested slice of ``ΛV / I``."""
        key = (degree, min_word_length, lower_degree)
        out = self._basis.get(key)
        if out is None:
            out = self.algebra.basis_slice(degree, min_word_length, lower_degree)
            if self.ideal:
                piv = self.ideal_echelon(degree).pivots
                out = [m for m in out if m not in piv]
            self._basis[key] = out
        if where is not None:
            out = [m for m in out if where(m)]
        return out

    def dimension(self, degree) -> int:
        return len(self.basis(degree))

    # -- differential -----------------------------------------------------
    def d_monomial(self, m: Monomial) -> dict:
        hit = self._dmono.get(m)
        if hit is not None:
            return hit
        alg = self.algebra
        out: dict = {}
        prefix_deg = 0
        for i, e in enumerate(m):
            if not e:
                continue
            img = self._gen_images[i]
            if img is not None:
                left = list(m[:i]) + [e - 1] + [0] * (len(m) - i - 1)
                right = [0] * (i + 1) + list(m[i + 1:])
                coeff = Fraction(e * (-1 if prefix_deg % 2 else 1))
                piece = alg.multiply(Element(alg, {tuple(left): coeff}, _clean=True), img)
                piece = alg.multiply(piece, Element(alg, {tuple(right): Fraction(1)}, _clean=True))
                axpy(out, 1, piece.terms)
            prefix_deg += e * alg.degrees[i]
        if self.ideal and out:
            out = self.reduce(Element(alg, out, _clean=True)).terms
        self._dmono[m] = out
        return out

    def d(self, e: Element) -> Element:
        if e.algebra != self.algebra:
            raise DomainMismatch(f"element of {e.algebra} given to differential on {self.algebra}")
        out: dict = {}
        for m, c in e.terms.items():
            axpy(out, c, self.d_monomial(m))
        return self.reduce(Element(self.algebra, out, _clean=True))

    def max_generator_degree(self) -> int:
        return max(self.algebra.degrees, default=0)


def apply_differential(cdga: CDGA, e: Element) -> Element:
    return cdga.d(e)


@dataclass
class DSquaredVerdict:
    ok: bool
    generator: str | None = None
    residual: Element | None = None

    def __bool__(self):
        return self.ok


def check_d_squared(cdga: CDGA, cap: int | None = None) -> DSquaredVerdict:
    """Check ``d(d(g)) = 0`` on generators (enough by Leibniz) and ideal stability.

    Generators are checked in algebra order; the first failure is reported
    with its nonzero residual.
    """
    need = cdga.max_generator_degree() + 2
    if cap is None:
        cap = need
    if cap < need:
        raise PreconditionError(f"cap {cap} below max generator degree + 2 = {need}")
    alg = cdga.algebra
    for g in alg.generators:
        r = cdga.d(cdga.d(alg.gen(g.name)))
        if r:
            return DSquaredVerdict(False, g.name, r)
    for r in cdga.ideal:
        img = cdga.d(r)
        if img:
            return DSquaredVerdict(False, f"ideal:{r}", img)
    return DSquaredVerdict(True)


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_']*)|(\^)|(\*)|([+-])|(\()|(\)))")


def _parse_polynomial(algebra: FreeGCA, text: str) -> Element:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        while text[pos].isspace():
            pos += 1
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} in {text!r}", 1, pos + 1)
        pos = mt.end()
        kind = mt.lastindex
        tokens.append((kind, mt.group(kind), mt.start(kind)))
    it = 0

    def peek():
        return tokens[it] if it < len(tokens) else (None, None, len(text))

    def take():
        nonlocal it
        tok = peek()
        it += 1
        return tok

    def factor():
        kind, val, where = take()
        if kind == 1:
            out = algebra.one() * Fraction(val)
        elif kind == 2:
            if val not in algebra.index:
                raise ParseError(f"unknown generator {val!r} in {text!r}", 1, where + 1)
            out = algebra.gen(val)
        elif kind == 6:
            out = expr()
            k, _, w = take()
            if k != 7:
                raise ParseError(f"missing ')' in {text!r}", 1, w + 1)
        else:
            raise ParseError(f"unexpected token {val!r} in {text!r}", 1, where + 1)
        if peek()[0] == 3:
            take()
            k, v, w = take()
            if k != 1 or "/" in v:
                raise ParseError(f"bad exponent in {text!r}", 1, w + 1)
            out = out ** int(v)
        return out

    def term():
        out = factor()
        while True:
            k = peek()[0]
            if k == 4:
                take()
                out = out * factor()
            elif k in (1, 2, 6):
                out = out * factor()
            else:
                return out

    def expr():
        sign = 1
        if peek()[0] == 5:
            sign = -1 if take()[1] == "-" else 1
        out = term() * sign
        while peek()[0] == 5:
            sign = -1 if take()[1] == "-" else 1
            out = out + term() * sign
        return out

    if not tokens:
        return algebra.zero()
    result = expr()
    if it != len(tokens):
        raise ParseError(f"trailing input in {text!r}", 1, peek()[2] + 1)
    return result


def odd_pairs_vanish(cdga: CDGA, top: int) -> bool:
    """True when all products of two positive-degree basis elements vanish up to ``top``."""
    alg = cdga.algebra
    pos = [m for k in range(1, top + 1) for m in cdga.basis(k)]
    for a, b in combinations(pos + pos, 2):
        if alg.degree(a) + alg.degree(b) > top:
            continue
        p = alg.multiply(Element(alg, {a: Fraction(1)}), Element(alg, {b: Fraction(1)}))
        if cdga.reduce(p):
            return False
    return True
