from fractions import Fraction

import sympy
from hypothesis import given
from hypothesis import strategies as st

from sullivan.linalg import Echelon, axpy, kernel, rank, solve

small = st.integers(-3, 3)
vectors = st.dictionaries(st.integers(0, 5), small.filter(bool), max_size=6)


def _apply(images, coeffs):
    out = {}
    for i, c in coeffs.items():
        axpy(out, c, images[i])
    return out


def test_axpy_drops_cancelled_keys():
    v = {0: Fraction(1), 1: Fraction(2)}
    axpy(v, -2, {1: 1})
    assert v == {0: 1}


def test_echelon_reduction_is_canonical():
    ech = Echelon()
    ech.insert({0: 1, 1: 1})
    ech.insert({1: 2, 2: 1})
    a, _ = ech.reduce({0: 1, 2: 5})
    b, _ = ech.reduce({0: 1, 2: 5, 1: 3, 0: 4})
    assert not set(a) & set(ech.pivots)
    assert ech.contains({0: 2, 1: 2})
    assert not ech.contains({0: 1})
    assert b.keys().isdisjoint(ech.pivots)


@given(st.lists(vectors, max_size=6))
def test_rank_matches_sympy(vecs):
    m = sympy.Matrix([[v.get(k, 0) for k in range(6)] for v in vecs]) if vecs else sympy.zeros(0, 6)
    assert rank(vecs) == m.rank()


@given(st.lists(vectors, max_size=6))
def test_kernel_vectors_are_independent_and_annihilated(images):
    ker = kernel(images)
    assert len(ker) == len(images) - rank(images)
    for vec in ker:
        assert _apply(images, vec) == {}
    assert rank(ker) == len(ker)


@given(st.lists(vectors, min_size=1, max_size=5), st.dictionaries(st.integers(0, 4), small, max_size=5))
def test_solve_reproduces_target_in_the_span(images, coeffs):
    coeffs = {i % len(images): c for i, c in coeffs.items()}
    target = _apply(images, coeffs)
    sol = solve(images, target)
    assert sol is not None
    assert _apply(images, sol) == target


def test_solve_reports_targets_outside_the_span():
    assert solve([{0: 1}, {0: 2}], {1: 1}) is None
