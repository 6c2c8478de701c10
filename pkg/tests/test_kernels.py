from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from biderive import _pykernels as py
from biderive import kernels
from biderive.exactpoly import Poly, Ring
from biderive.ideals import _as_triples, groebner_basis

try:
    from biderive import _ckernels as cy
except ImportError:  # extension not built
    cy = None

needs_c = pytest.mark.skipif(cy is None, reason="compiled kernels not built")

N = 3
exps = st.tuples(*[st.integers(0, 3)] * N)
coeffs = st.one_of(st.integers(-5, 5), st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4)))
term_dicts = st.dictionaries(exps, coeffs, max_size=6).map(lambda d: {e: c for e, c in d.items() if c})


def test_backend_names():
    assert py.BACKEND == "python"
    assert kernels.BACKEND in ("python", "cython")
    if cy is not None:
        assert cy.BACKEND == "cython"


@needs_c
@given(term_dicts, term_dicts)
def test_mul_add_agree(a, b):
    assert cy.mul_terms(a, b) == py.mul_terms(a, b)
    assert cy.add_terms(a, b) == py.add_terms(a, b)
    assert cy.add_terms(a, b, Fraction(-1, 2), (1, 0, 2)) == py.add_terms(a, b, Fraction(-1, 2), (1, 0, 2))
    assert cy.shift_terms(a, (0, 2, 1), 3) == py.shift_terms(a, (0, 2, 1), 3)


@needs_c
@given(term_dicts, st.integers(0, N - 1))
def test_diff_agrees(a, i):
    assert cy.diff_terms(a, i) == py.diff_terms(a, i)


@needs_c
@given(exps, exps)
def test_divides_agrees(a, b):
    assert cy.divides(a, b) == py.divides(a, b) == all(x <= y for x, y in zip(a, b))


small = st.dictionaries(st.tuples(*[st.integers(0, 2)] * N), st.integers(-3, 3), max_size=3)


@needs_c
@given(st.lists(small, min_size=1, max_size=2), term_dicts)
def test_normal_form_agrees(gens, f):
    ring = Ring(("x", "y", "z"))
    gens = [{e: c for e, c in g.items() if c} for g in gens]
    gens = [g for g in gens if g] or [{(1, 0, 0): 1}]
    gb = groebner_basis([Poly(ring, g) for g in gens], ring=ring)
    tri = _as_triples(gb.basis)
    got_c = cy.normal_form(f, tri, ring.sortkey)
    got_py = py.normal_form(f, tri, ring.sortkey)
    assert got_c == got_py
    # the remainder has no term divisible by a leading monomial
    for e in got_py:
        assert not any(py.divides(lead, e) for lead, _, _ in tri)


@given(term_dicts, term_dicts, term_dicts)
def test_python_kernel_ring_laws(a, b, c):
    assert py.mul_terms(a, py.add_terms(b, c)) == py.add_terms(py.mul_terms(a, b), py.mul_terms(a, c))
    assert py.mul_terms(a, b) == py.mul_terms(b, a)
