"""Brute-force cross-checks on dense sympy matrices.

Nothing here calls the sparse engine's arithmetic.  Monomials are sorted
words of generator indices, products are formed by concatenation followed
by an explicit bubble sort that tracks Koszul signs, and every dimension is
a rank of a dense matrix.  Engine objects are read only for their generator
lists, differential images and relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import sympy

from .algebra import CDGA, Element
from .elliptic import Presentation


class _Words:
    """Graded-commutative arithmetic on words over a fixed generator list."""

    def __init__(self, algebra):
        self.degrees = [g.degree for g in algebra.generators]
        self.names = [g.name for g in algebra.generators]

    def sort(self, word):
        """Bubble sort ``word``; return ``(sign, sorted word)`` or ``(0, None)``."""
        w = list(word)
        sign = 1
        for i in range(len(w)):
            for j in range(len(w) - 1 - i):
                if w[j] > w[j + 1]:
                    if self.degrees[w[j]] % 2 and self.degrees[w[j + 1]] % 2:
                        sign = -sign
                    w[j], w[j + 1] = w[j + 1], w[j]
        for a, b in zip(w, w[1:]):
            if a == b and self.degrees[a] % 2:
                return 0, None
        return sign, tuple(w)

    def degree(self, word):
        return sum(self.degrees[i] for i in word)

    def from_element(self, e: Element) -> dict:
        out = {}
        for mono, c in e.terms.items():
            word = tuple(i for i, k in enumerate(mono) for _ in range(k))
            out[word] = out.get(word, 0) + Fraction(c)
        return out

    def mul(self, p: dict, q: dict) -> dict:
        out = {}
        for a, ca in p.items():
            for b, cb in q.items():
                s, w = self.sort(a + b)
                if s:
                    out[w] = out.get(w, 0) + s * ca * cb
        return {w: c for w, c in out.items() if c}

    def words(self, degree):
        """All nonzero sorted words of the given degree."""
        if degree == 0:
            return [()]
        low = min(self.degrees, default=0)
        if not low:
            return []
        out = []
        for n in range(1, degree // low + 1):
            for w in combinations_with_replacement(range(len(self.degrees)), n):
                if self.degree(w) == degree and self.sort(w)[0]:
                    out.append(w)
        return out

    def d(self, word, images: dict) -> dict:
        out = {}
        sign = 1
        for pos, g in enumerate(word):
            img = images.get(g)
            if img:
                left = {word[:pos]: Fraction(sign)}
                right = {word[pos + 1:]: Fraction(1)}
                for w, c in self.mul(self.mul(left, img), right).items():
                    out[w] = out.get(w, 0) + c
            if self.degrees[g] % 2:
                sign = -sign
        return {w: c for w, c in out.items() if c}


def _matrix(columns, index):
    """Dense matrix whose columns are the given sparse vectors."""
    m = sympy.zeros(len(index), max(len(columns), 1))
    for j, col in enumerate(columns):
        for w, c in col.items():
            m[index[w], j] = sympy.Rational(c.numerator, c.denominator)
    return m


def _rank(columns, index):
    if not columns or not index:
        return 0
    return _matrix(columns, index).rank()


class _Model:
    def __init__(self, cdga: CDGA):
        self.w = _Words(cdga.algebra)
        self.images = {cdga.algebra.index[n]: self.w.from_element(e) for n, e in cdga.images.items() if e}
        self.ideal = [self.w.from_element(r) for r in cdga.ideal]
        self._cache = {}

    def space(self, k):
        if k not in self._cache:
            words = self.w.words(k) if k >= 0 else []
            index = {w: i for i, w in enumerate(words)}
            ideal = []
            for r in self.ideal:
                rd = self.w.degree(next(iter(r)))
                if rd <= k:
                    for u in self.w.words(k - rd):
                        v = self.w.mul({u: Fraction(1)}, r)
                        if v:
                            ideal.append(v)
            self._cache[k] = (words, index, ideal)
        return self._cache[k]

    def d_columns(self, k):
        words, _, _ = self.space(k)
        return [self.w.d(w, self.images) for w in words]


def dense_betti(cdga: CDGA, cap: int) -> list[int]:
    """Betti numbers of ``cdga`` in degrees ``0..cap`` by dense rank counts."""
    model = _Model(cdga)
    betti = []
    for k in range(cap + 1):
        words, index, ideal = model.space(k)
        _, index_up, ideal_up = model.space(k + 1)
        ideal_rank = _rank(ideal, index)
        quotient = len(words) - ideal_rank
        up_rank = _rank(ideal_up, index_up)
        d_mod = _rank(model.d_columns(k) + ideal_up, index_up) - up_rank
        cycles = quotient - d_mod
        _, index_dn, _ = model.space(k - 1)
        boundaries = _rank(model.d_columns(k - 1) + ideal, index) - ideal_rank if k else 0
        betti.append(cycles - boundaries)
    return betti


def dense_quotient_dimensions(p: Presentation, cap: int) -> list[int]:
    model = _Model(p.quotient)
    out = []
    for k in range(cap + 1):
        words, index, ideal = model.space(k)
        out.append(len(words) - _rank(ideal, index))
    return out


class _Quotient:
    """Coordinates in ``Q[x]/(R)`` relative to a complement of the ideal."""

    def __init__(self, p: Presentation, top: int):
        self.model = _Model(p.quotient)
        self.top = top
        self.basis = {}
        self.solvers = {}
        for k in range(top + 1):
            words, index, ideal = self.model.space(k)
            if not words:
                self.basis[k] = []
                continue
            span = _matrix(ideal, index) if ideal else sympy.zeros(len(words), 0)
            basis, current = [], span
            for w in words:
                col = sympy.zeros(len(words), 1)
                col[index[w]] = 1
                trial = current.row_join(col)
                if trial.rank() > (current.rank() if current.cols else 0):
                    basis.append(w)
                    current = trial
            self.basis[k] = basis
            self.solvers[k] = (current, len(ideal) if ideal else 0)

    def coords(self, vec: dict, k: int) -> list:
        if k < 0 or k > self.top or not self.basis[k]:
            return []
        _, index, _ = self.model.space(k)
        full, skip = self.solvers[k]
        rhs = sympy.zeros(len(index), 1)
        for w, c in vec.items():
            rhs[index[w]] = sympy.Rational(c.numerator, c.denominator)
        sol, params = full.gauss_jordan_solve(rhs)
        sol = sol.subs({t: 0 for t in params})
        return list(sol[skip:, 0])


def _top_degree(p: Presentation, limit: int = 64) -> int:
    """Highest degree where the quotient is nonzero, found by scanning."""
    if p.square:
        return max(p.expected_formal_dimension, 0)
    band = max(p.algebra.degrees, default=1)
    dims = dense_quotient_dimensions(p, limit)
    for k in range(limit + 1 - band):
        if not any(dims[k + 1:k + 1 + band]):
            return k
    raise ValueError(f"quotient does not die below degree {limit}")


def dense_derivation_dimension(p: Presentation, k: int) -> int:
    """Dimension of degree-``k`` derivations of the quotient, via full Leibniz.

    The unknown is the whole linear map on a basis of the quotient, and the
    constraints impose the product rule on every pair of basis elements.
    """
    top = _top_degree(p)
    q = _Quotient(p, top)
    w = q.model.w
    unknowns = {}
    for d in range(1, top + 1):
        for m in q.basis[d]:
            for b in range(len(q.basis.get(d + k, [])) if d + k >= 0 else 0):
                unknowns[(m, b)] = len(unknowns)
    if not unknowns:
        return 0
    rows = []

    def theta_of(vec, d):
        """Linear form (dict unknown index -> {target coordinate: coeff}) of theta(vec)."""
        out = {}
        for j, c in enumerate(q.coords(vec, d)):
            if c:
                m = q.basis[d][j]
                for b in range(len(q.basis.get(d + k, []))):
                    key = unknowns[(m, b)]
                    out.setdefault(b, {})
                    out[b][key] = out[b].get(key, 0) + c
        return out

    # products above the top degree vanish, but their images need not
    for d1 in range(1, top + 1):
        for d2 in range(d1, top + 1):
            if d1 + d2 + k > top:
                continue
            for m1 in q.basis[d1]:
                for m2 in q.basis[d2]:
                    if d2 == d1 and m2 < m1:
                        continue
                    product = w.mul({m1: Fraction(1)}, {m2: Fraction(1)})
                    lhs = theta_of(product, d1 + d2)
                    eq = {}
                    for b, form in lhs.items():
                        for key, c in form.items():
                            eq[(b, key)] = eq.get((b, key), 0) + c
                    target_deg = d1 + d2 + k
                    for (mx, dx), (my, _) in (((m1, d1), (m2, d2)), ((m2, d2), (m1, d1))):
                        for b, bw in enumerate(q.basis.get(dx + k, []) if dx + k >= 0 else []):
                            prod = w.mul({bw: Fraction(1)}, {my: Fraction(1)})
                            for t, c in enumerate(q.coords(prod, target_deg)):
                                if c:
                                    key = unknowns[(mx, b)]
                                    eq[(t, key)] = eq.get((t, key), 0) - c
                    by_target = {}
                    for (t, key), c in eq.items():
                        if c:
                            by_target.setdefault(t, {})[key] = c
                    rows.extend(by_target.values())
    if not rows:
        return len(unknowns)
    mat = sympy.zeros(len(rows), len(unknowns))
    for i, row in enumerate(rows):
        for key, c in row.items():
            mat[i, key] = c
    return len(unknowns) - mat.rank()


@dataclass
class OracleComparison:
    quantity: str
    engine: object
    oracle: object

    @property
    def agree(self) -> bool:
        return self.engine == self.oracle


@dataclass
class OracleReport:
    comparisons: list = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return all(c.agree for c in self.comparisons)

    def add(self, quantity, engine, oracle):
        self.comparisons.append(OracleComparison(quantity, engine, oracle))
