"""Hypothesis strategies for small exact polynomials."""

from fractions import Fraction

from hypothesis import strategies as st

from biderive.exactpoly import Poly, Ring

RING3 = Ring(("x", "y", "z"))
RING2 = Ring(("x", "y"))

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def exps(n, deg):
    return st.lists(st.integers(0, deg), min_size=n, max_size=n).filter(lambda e: sum(e) <= deg).map(tuple)


def polys(ring=RING3, deg=3, max_terms=4):
    return st.dictionaries(exps(ring.nvars, deg), coeffs, max_size=max_terms).map(
        lambda d: Poly(ring, {e: Fraction(c) for e, c in d.items() if c}))


def nonzero_polys(ring=RING3, deg=3, max_terms=4):
    return polys(ring, deg, max_terms).filter(bool)


def points(n):
    return st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=3), min_size=n, max_size=n).map(tuple)
