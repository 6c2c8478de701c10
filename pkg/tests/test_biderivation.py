import itertools

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

import oracles
from biderive.biderivation import (
    AlgebraPresentation, BidifferentialIdealPair, BracketTable, DerivationSpec, IllDefinedTable,
    IllegalDenominator, MetadataMissing, bidifferential_witness, bracket, check_well_defined,
    darboux_principal_search, generator_hamiltonians, hamiltonian, is_algebraic_over_scalars,
    is_bidifferential_ideal, is_bidifferential_pair, is_poisson, is_scalar, pair_witness,
    polynomial_constants_up_to, rational_constants_probe, tables_equal,
)
from biderive.extend import extend_localisation
from biderive.exactpoly import Poly, Ring, format_element
from biderive.ideals import IdealHandle
from strategies import RING2, RING3, polys

RUN = {"x,y": "x", "y,x": "-x"}
SO3 = {"x,y": "z", "y,x": "-z", "y,z": "x", "z,y": "-x", "z,x": "y", "x,z": "-y"}


@pytest.fixture
def running():
    return BracketTable.from_strings(AlgebraPresentation(["x", "y"]), RUN)


@pytest.fixture
def so3():
    return BracketTable.from_strings(AlgebraPresentation(["x", "y", "z"]), SO3)


def ideal(B, *gens):
    return IdealHandle(B.ring, [B.algebra.poly(g) for g in gens])


def s(f):
    return format_element(f)


def test_bracket_examples(running):
    assert s(bracket(running, "x^2", "y")) == "2*x^2"
    assert s(bracket(running, "x - 1", "y")) == "x"
    assert s(bracket(running, "3/2", "x*y")) == "0"
    loc = extend_localisation(running, "x")
    assert s(bracket(loc, "1/x", "y")) == "(-1)/(x)"


def test_illegal_denominator(running):
    with pytest.raises(IllegalDenominator):
        bracket(running, "1/(x - 1)", "y")
    with pytest.raises(IllegalDenominator):
        bracket(running, "1/x", "y")


def test_hamiltonians(running):
    h = hamiltonian(running, "y", "right")
    assert {z: s(v) for z, v in h.values.items()} == {"x": "x"}
    assert hamiltonian(running, "5", "left").is_zero()
    h = hamiltonian(running, "x", "left")
    assert {z: s(v) for z, v in h.values.items()} == {"y": "x"}
    with pytest.raises(ValueError):
        hamiltonian(running, "x", "middle")
    assert len(generator_hamiltonians(running)) == 4


def test_well_defined_reports():
    A = AlgebraPresentation(["x", "y"], relations=["y"])
    with pytest.raises(IllDefinedTable):
        BracketTable.from_strings(A, RUN)
    rep = check_well_defined(BracketTable.from_strings(A, RUN, validate=False))
    assert not rep.passed and any(s(f[3]) == "-x" for f in rep.failures)
    B = BracketTable.from_strings(AlgebraPresentation(["x", "y"], relations=["x"]), RUN)
    assert B.well_defined.passed
    assert BracketTable.from_strings(AlgebraPresentation(["x", "y"]), RUN).well_defined.passed


def test_bidifferential_ideals(running):
    assert is_bidifferential_ideal(running, ideal(running, "x"))
    w = bidifferential_witness(running, ideal(running, "x - 1"))
    assert w is not None and s(w[3]) == "x"
    assert is_bidifferential_ideal(running, ideal(running))
    assert is_bidifferential_ideal(running, ideal(running, "x^2", "x*y"))


def test_one_sided_slots():
    # {x, z} = x only: (x) is closed on the left, {z, x} = 0 so also right
    A = AlgebraPresentation(["x", "y"])
    B = BracketTable.from_strings(A, {"y,x": "y"})
    I = ideal(B, "x")
    assert bidifferential_witness(B, I, slots=("left",)) is None
    assert bidifferential_witness(B, I, slots=("right",)) is not None


def test_pairs(running):
    base = AlgebraPresentation(["x"])
    Ix = IdealHandle(base.ring, [base.poly("x - 1")])
    w = pair_witness(running, BidifferentialIdealPair(left=Ix))
    assert w is not None and w[0] == "left" and s(w[4]) == "x"
    zero = IdealHandle(base.ring, [])
    assert is_bidifferential_pair(running, BidifferentialIdealPair(zero, zero))
    trivial = BracketTable(AlgebraPresentation(["x", "y"]))
    assert is_bidifferential_pair(trivial, BidifferentialIdealPair(left=Ix, right=Ix))
    other = AlgebraPresentation(["w"])
    with pytest.raises(MetadataMissing):
        pair_witness(running, BidifferentialIdealPair(left=IdealHandle(other.ring, [other.poly("w")])))


def test_poisson(running, so3):
    assert is_poisson(running)
    assert not is_poisson(BracketTable.from_strings(AlgebraPresentation(["x", "y"]), {"x,y": "x"}))
    assert is_poisson(so3)
    bad = dict(SO3, **{"x,y": "z + x"}, **{"y,x": "-z - x"})
    assert not is_poisson(BracketTable.from_strings(AlgebraPresentation(["x", "y", "z"]), bad))


def test_constants(running, so3):
    assert [s(c) for c in polynomial_constants_up_to(running, 5)] == ["1"]
    assert [s(c) for c in polynomial_constants_up_to(so3, 2)] == ["1", "x^2 + y^2 + z^2"]
    trivial = BracketTable(AlgebraPresentation(["x", "y", "z"]))
    assert len(polynomial_constants_up_to(trivial, 1)) == 4
    with pytest.raises(ValueError):
        polynomial_constants_up_to(running, -1)


def test_constants_have_zero_hamiltonians(so3):
    for c in polynomial_constants_up_to(so3, 4):
        for z in "xyz":
            assert bracket(so3, c, z).is_zero() and bracket(so3, z, c).is_zero()


def test_rational_probe():
    # x and z scale the same way under y, so z/x is a rational constant
    A = AlgebraPresentation(["x", "y", "z"])
    B = BracketTable.from_strings(A, {"x,y": "x", "y,x": "-x", "z,y": "z", "y,z": "-z"})
    found = [s(c) for c in rational_constants_probe(B, 1, ["x"])]
    assert found == ["(z)/(x)"]
    loc = extend_localisation(B, "x")
    for c in rational_constants_probe(B, 1, ["x"]):
        assert all(bracket(loc, c, v).is_zero() and bracket(loc, v, c).is_zero() for v in "xyz")


def test_scalars_and_algebraicity():
    A = AlgebraPresentation(["x", "y", "a"], base_vars=["a"], relations=["a^2 - 2"])
    assert is_scalar(A, "a + 1") and not is_scalar(A, "x")
    assert is_algebraic_over_scalars(A, "a")
    assert not is_algebraic_over_scalars(A, "x")
    T = AlgebraPresentation(["x", "s"], base_vars=["s"])
    assert is_algebraic_over_scalars(T, "s^2 + 1")


def test_darboux_examples(running, so3):
    res = darboux_principal_search(running, 2)
    assert [str(p) for p in res] == ["x"]
    assert list(darboux_principal_search(so3, 1)) == []
    triv = darboux_principal_search(BracketTable(AlgebraPresentation(["x", "y"])), 1)
    assert triv.overflow and triv.families
    skipped = darboux_principal_search(BracketTable(AlgebraPresentation(["x", "s"], base_vars=["s"])), 1)
    assert skipped.skipped


def _darboux_brute(B, coeffs=range(-2, 3)):
    """Monic-lead linear polynomials with small coefficients dividing all
    their generator brackets."""
    ring = B.ring
    n = ring.nvars
    out = set()
    for cs in itertools.product(coeffs, repeat=n + 1):
        if not any(cs[:n]):
            continue
        p = Poly(ring, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(cs[:n]) if c})
        p = p + cs[n]
        p = p.monic()
        ok = True
        for z in ring.names:
            for val in (bracket(B, p, z, False), bracket(B, z, p, False)):
                if val and val.num.exact_div(p) is None:
                    ok = False
        if ok:
            out.add(str(p))
    return out


def test_darboux_against_brute_force(running, so3):
    rand = BracketTable.from_strings(AlgebraPresentation(["x", "y"]), {"x,y": "x*y", "y,x": "-x*y", "x,x": "x"})
    for B in (running, so3, rand):
        found = {str(p.monic()) for p in darboux_principal_search(B, 1)}
        assert _darboux_brute(B) <= found


@given(polys(RING3, 2, 3), polys(RING3, 2, 3))
def test_bracket_matches_chain_rule_oracle(f, g):
    B = BracketTable.from_strings(AlgebraPresentation(["x", "y", "z"]), dict(SO3, **{"x,x": "x*y"}))
    syms = {n: sympy.Symbol(n) for n in "xyz"}
    table = {k: sympy.sympify(format_element(v).replace("^", "**"), locals=syms) for k, v in B.entries.items()}
    fs = sympy.sympify(str(f).replace("^", "**"), locals=syms)
    gs = sympy.sympify(str(g).replace("^", "**"), locals=syms)
    want = oracles.bracket_oracle(fs, gs, table, "xyz")
    got = sympy.sympify(format_element(bracket(B, f, g)).replace("^", "**"), locals=syms)
    assert sympy.expand(got - want) == 0


@given(polys(RING2, 2, 3), polys(RING2, 2, 3), polys(RING2, 2, 3))
def test_leibniz_property(f, g, h):
    B = BracketTable.from_strings(AlgebraPresentation(["x", "y"]), RUN)
    assert bracket(B, f * g, h) == bracket(B, f, h) * g + f * bracket(B, g, h)
    assert bracket(B, f, g * h) == bracket(B, f, g) * h + g * bracket(B, f, h)


def test_derivation_spec():
    A = AlgebraPresentation(["x", "y"], relations=["x*y - 1"])
    d = DerivationSpec(A, {"x": "x", "y": "-y"})
    assert not d.violations()
    assert s(d.apply("x^2")) == "2*x^2"
    bad = DerivationSpec(A, {"x": "1"})
    assert bad.violations()


def test_tables_equal_modulo_relations():
    A = AlgebraPresentation(["x", "y"], relations=["x - y"])
    t1 = BracketTable.from_strings(A, {"x,y": "x - y", "y,x": "y - x"})
    t2 = BracketTable(A)
    assert tables_equal(t1, t2)
