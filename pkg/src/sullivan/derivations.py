"""Negative-degree derivations of an evenly generated cohomology algebra.

A derivation ``theta`` of ``Q[x]/(R)`` is fixed by the images ``theta(x_i)``;
it is well defined exactly when ``theta(R_j) = sum_i dR_j/dx_i * theta(x_i)``
vanishes in the quotient for every ``j``.  For an even shift no Koszul signs
enter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Element
from .elliptic import Presentation, partial_derivative, regularity_certificate
from .errors import NotRegular
from .linalg import kernel


@dataclass
class DerivationSpace:
    shift: int
    basis: list  # each entry: dict generator name -> Element of the quotient
    unknowns: int = 0

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __bool__(self):
        return bool(self.basis)


def _require_regular(p: Presentation):
    if p.test_mode:
        return
    cert = regularity_certificate(p)
    if not cert.regular:
        raise NotRegular(f"presentation is not certified regular ({cert.status})")


def derivation_space(p: Presentation, k: int, check_regular: bool = True) -> DerivationSpace:
    """Basis of the derivations of ``Q[x]/(R)`` of degree ``k < 0``."""
    if k >= 0:
        raise ValueError("shift must be negative")
    if check_regular:
        _require_regular(p)
    if k % 2:
        return DerivationSpace(k, [])
    alg, quot = p.algebra, p.quotient
    unknowns = []
    for g in alg.generators:
        for m in quot.basis(g.degree + k) if g.degree + k >= 0 else []:
            unknowns.append((g.name, m))
    partials = [[partial_derivative(r, g.name) for g in alg.generators] for r in p.relations]
    images = []
    for name, m in unknowns:
        i = alg.index[name]
        col = {}
        mono = Element(alg, {m: 1})
        for j, row in enumerate(partials):
            if not row[i]:
                continue
            for mm, c in quot.reduce(row[i] * mono).terms.items():
                col[(j, mm)] = c
        images.append(col)
    basis = []
    for vec in kernel(images):
        theta = {g.name: alg.zero() for g in alg.generators}
        for idx, c in vec.items():
            name, m = unknowns[idx]
            theta[name] = theta[name] + Element(alg, {m: c})
        basis.append(theta)
    return DerivationSpace(k, basis, len(unknowns))


def apply_derivation(p: Presentation, theta: dict, e: Element) -> Element:
    """Leibniz extension of ``theta`` evaluated on ``e`` and reduced in the quotient."""
    out = p.algebra.zero()
    for g in p.algebra.generators:
        img = theta.get(g.name)
        if img:
            out = out + partial_derivative(e, g.name) * img
    return p.quotient.reduce(out)


@dataclass
class HalperinVerdict:
    holds: bool
    evidence: list
    scanned_shifts: list
    skipped_odd_shifts: list = field(default_factory=list)
    certificate: dict | None = None

    def __bool__(self):
        return self.holds


def meier_verdict(p: Presentation) -> HalperinVerdict:
    """Scan every shift that can carry a nonzero negative derivation.

    Images ``theta(x_i)`` live in degree ``|x_i| + k``, so only
    ``-max|x| <= k <= -2`` matter; odd shifts land in odd degrees, where the
    quotient vanishes, and are recorded as skipped.
    """
    _require_regular(p)
    top = max(p.algebra.degrees, default=0)
    scanned, skipped, evidence = [], [], []
    certificate = None
    for k in range(-top, 0):
        if k % 2:
            skipped.append(k)
            continue
        space = derivation_space(p, k, check_regular=False)
        scanned.append(k)
        evidence.append(space)
        if space and certificate is None:
            certificate = space.basis[0]
    holds = all(not s for s in evidence)
    return HalperinVerdict(holds, evidence, scanned, skipped, certificate)
