"""Sparse exact linear algebra over Q.

A vector is a ``dict`` mapping sortable keys (monomial exponent tuples,
indices, ...) to nonzero :class:`fractions.Fraction` values.  Every row of an
:class:`Echelon` has its largest key as pivot, normalized to 1, so reduction
by the echelon yields a canonical normal form: the residual contains no
pivot keys.
"""

from __future__ import annotations

from fractions import Fraction


def axpy(target: dict, scale, source: dict) -> None:
    """In place ``target += scale * source``, dropping zeros."""
    for key, value in source.items():
        new = target.get(key, 0) + scale * value
        if new:
            target[key] = new
        else:
            target.pop(key, None)


class Echelon:
    """Incrementally built echelon basis of a subspace.

    When ``tag`` dictionaries are passed to :meth:`insert` and :meth:`reduce`,
    they are carried through every row operation.  This records which
    combination of inserted vectors produced each row and is how kernels and
    particular solutions are recovered.
    """

    def __init__(self):
        self._rows: dict = {}

    def __len__(self):
        return len(self._rows)

    @property
    def pivots(self):
        return self._rows.keys()

    def rows(self):
        return [vec for vec, _ in self._rows.values()]

    def reduce(self, vec: dict, tag: dict | None = None):
        vec = dict(vec)
        tag = dict(tag) if tag is not None else None
        rows = self._rows
        while True:
            hits = [k for k in vec if k in rows]
            if not hits:
                return vec, tag
            p = max(hits)
            row, row_tag = rows[p]
            c = vec[p]
            axpy(vec, -c, row)
            if tag is not None and row_tag is not None:
                axpy(tag, -c, row_tag)

    def insert(self, vec: dict, tag: dict | None = None):
        """Reduce ``vec`` and keep it as a new row if nonzero.

        Returns the residual pair ``(vec, tag)``; an empty residual vector
        means ``vec`` was already in the span.
        """
        vec, tag = self.reduce(vec, tag)
        if vec:
            p = max(vec)
            inv = 1 / Fraction(vec[p])
            vec = {k: v * inv for k, v in vec.items()}
            if tag is not None:
                tag = {k: v * inv for k, v in tag.items()}
            self._rows[p] = (vec, tag)
        return vec, tag

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]

    def copy(self):
        other = Echelon()
        other._rows = dict(self._rows)
        return other


def kernel(images: list[dict]) -> list[dict]:
    """Basis of the kernel of the map sending basis vector ``i`` to ``images[i]``.

    Kernel vectors are returned as dicts over the indices, in the order in
    which elimination discovers them.
    """
    ech = Echelon()
    out = []
    for i, img in enumerate(images):
        res, tag = ech.insert(img, {i: Fraction(1)})
        if not res:
            out.append(tag)
    return out


def solve(images: list[dict], target: dict):
    """Coefficients ``c`` (dict over indices) with ``sum c[i] images[i] == target``, or None."""
    ech = Echelon()
    for i, img in enumerate(images):
        ech.insert(img, {i: Fraction(1)})
    res, tag = ech.reduce(target, {})
    if res:
        return None
    return {k: -v for k, v in tag.items()}


def rank(vectors) -> int:
    ech = Echelon()
    for v in vectors:
        ech.insert(v)
    return len(ech)
