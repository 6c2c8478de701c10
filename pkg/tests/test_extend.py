import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biderive.biderivation import (
    AlgebraPresentation, BracketTable, bidifferential_witness, bracket, check_well_defined,
    is_bidifferential_ideal,
)
from biderive.exactpoly import format_element
from biderive.extend import (
    AlgebraMorphism, ExtensionError, InseparableError, NoetherData, NoetherError, NotBidifferential,
    NotDominant, canonical_tensor_bracket, extend_algebraic, extend_localisation, extend_transcendental,
    find_noether_data, forcing_residual, theorem_tensor, verify_noether, with_canonical_bracket,
)
from biderive.ideals import IdealHandle
from biderive.reports import FAIL, PASS

RUN = {"x,y": "x", "y,x": "-x"}


def s(f):
    return format_element(f)


@pytest.fixture
def running():
    return BracketTable.from_strings(AlgebraPresentation(["x", "y"]), RUN)


def ideal(B, *gens):
    return IdealHandle(B.ring, [B.algebra.poly(g) for g in gens])


def test_localisation_keeps_entries(running):
    L = extend_localisation(running, "x")
    assert L.algebra.inverted and s(bracket(L, "1/x", "y")) == "(-1)/(x)"
    assert is_bidifferential_ideal(L, ideal(L, "x^2"))
    assert L.history[-1]["step"] == "localisation"


def test_localisation_rejects_nilpotent():
    B = BracketTable(AlgebraPresentation(["x", "y"], relations=["x^2"]))
    with pytest.raises(ExtensionError):
        extend_localisation(B, "x")
    with pytest.raises(ExtensionError):
        extend_localisation(B, "0")


def test_algebraic_square_root(running):
    T, f = extend_algebraic(running, "b", "t^2 - x")
    assert s(f) == "2*b"
    assert s(bracket(T, "b", "y")) == "1/2*b"
    assert s(bracket(T, "y", "b")) == "-1/2*b"
    assert T.algebra.is_zero(bracket(T, "b", "b"))
    assert check_well_defined(T).passed
    for slot in ("left", "right"):
        assert T.algebra.is_zero(forcing_residual(T, "y", "b", "b^2 - x", slot))
    # the bidifferential ideal (x) still generates one
    assert bidifferential_witness(T, ideal(T, "x")) is None


def test_algebraic_errors(running):
    nil = BracketTable(AlgebraPresentation(["x"], relations=["x^2"]))
    with pytest.raises(InseparableError):
        extend_algebraic(nil, "b", "t^2 - x")
    with pytest.raises(ExtensionError):
        extend_algebraic(running, "x", "t^2 - y")
    with pytest.raises(ExtensionError):
        extend_algebraic(running, "b", "x - 1")


def test_algebraic_localises_leading_coefficient(running):
    T, _ = extend_algebraic(running, "b", "y*t - 1")
    assert T.history[-1]["localized_at"] == "y"
    assert T.algebra.is_zero(T.algebra.poly("y*b - 1"))
    assert check_well_defined(T).passed


def test_transcendental(running):
    T = extend_transcendental(running, {"x": "x"}, {"y": "1", "t": "0"}, "t")
    assert s(bracket(T, "x", "t")) == "x"
    assert s(bracket(T, "t", "y")) == "1"
    assert T.algebra.is_zero(bracket(T, "t", "x"))
    with pytest.raises(ExtensionError):
        extend_transcendental(running, {}, {}, "x")
    rel = BracketTable(AlgebraPresentation(["x"], relations=["x^2"]))
    with pytest.raises(ExtensionError):
        extend_transcendental(rel, {"x": "1"}, {}, "t")


def test_transcendental_can_break_lifting():
    # negative control: the trivial line extended by y with {x, y} = x
    line = BracketTable(AlgebraPresentation(["x"]))
    assert is_bidifferential_ideal(line, ideal(line, "x - 1"))
    T = extend_transcendental(line, {"x": "x"}, {}, "y")
    w = bidifferential_witness(T, ideal(T, "x - 1"))
    assert w is not None and s(w[3]) == "x"


@settings(max_examples=25)
@given(st.integers(-3, 3), st.integers(1, 3))
def test_localisation_preserves_bidifferential(c, k):
    # (x) and (x^k) stay closed after inverting y - c
    B = BracketTable.from_strings(AlgebraPresentation(["x", "y"]), RUN)
    L = extend_localisation(B, f"y - ({c})")
    assert bidifferential_witness(L, ideal(L, f"x^{k}")) is None


def test_morphism_kernel_and_dominance(running):
    S = AlgebraPresentation(["u", "v"])
    phi = AlgebraMorphism(S, running.algebra, {"u": "x", "v": "x^2"})
    assert [str(g) for g in phi.kernel().basis] in (["-u^2 + v"], ["u^2 - v"])
    assert not phi.verify_embedding()
    B_S = BracketTable(S)
    with pytest.raises(NotDominant):
        theorem_tensor(running, B_S, phi, NoetherData(("u", "v")))
    with pytest.raises(ExtensionError):
        AlgebraMorphism(S, running.algebra, {"u": "x"})


def test_non_bidifferential_iota(running):
    swap = AlgebraMorphism(running.algebra, running.algebra, {"x": "y", "y": "x"})
    assert swap.verify_embedding()
    with pytest.raises(NotBidifferential):
        theorem_tensor(running, running, swap, NoetherData(("x", "y")))


def test_noether_data():
    A = AlgebraPresentation(["x", "y"], relations=["y^2 - x"])
    data = find_noether_data(A)
    assert data.y_list and data.b_list and not verify_noether(data, A)
    assert verify_noether(NoetherData(("x", "y")), A)
    assert verify_noether(NoetherData(("x",), ("y",), ("t^4 - x^2",)), A)
    nil = AlgebraPresentation(["x"], relations=["x^2"])
    with pytest.raises(NoetherError):
        find_noether_data(nil)


def test_self_tensor(running):
    T = theorem_tensor(running, running, AlgebraMorphism.identity(running.algebra), NoetherData(("x", "y")))
    assert T.report.passed
    assert all(c.status == PASS for c in T.report.checks)
    assert T.algebra.is_zero(bracket(T.table, "L.x - R.x", "L.y"))
    assert bidifferential_witness(T.table, T.diagonal) is None


def test_canonical_tensor_diagonal(running):
    T = theorem_tensor(running, running, AlgebraMorphism.identity(running.algebra), NoetherData(("x", "y")))
    C = with_canonical_bracket(T)
    assert C.report.d.status == FAIL and C.report.d.witness == ["x⊗1"]
    plain = canonical_tensor_bracket(running, running)
    assert s(bracket(plain, "L.x", "L.y")) == "L.x" and s(bracket(plain, "R.x", "R.y")) == "R.x"
    assert plain.algebra.is_zero(bracket(plain, "L.x", "R.y"))


def test_projection_tensor(running):
    line = BracketTable(AlgebraPresentation(["u"]))
    iota = AlgebraMorphism(line.algebra, running.algebra, {"u": "x"})
    T = theorem_tensor(running, line, iota, NoetherData(("u",)))
    assert T.report.passed
    assert s(bracket(T.table, "L.y", "R.u")) == "-L.x"
    assert bidifferential_witness(T.table, T.diagonal) is None


def test_tensor_with_algebraic_factor(running):
    # S = Q[u, w]/(w^2 - u) with u -> x^2, w -> x; w is forced from its minimal polynomial
    S = BracketTable(AlgebraPresentation(["u", "w"], relations=["w^2 - u"]))
    iota = AlgebraMorphism(S.algebra, running.algebra, {"u": "x^2", "w": "x"})
    T = theorem_tensor(running, S, iota, NoetherData(("u",), ("w",), ("t^2 - u",)))
    assert T.report.passed
    assert check_well_defined(T.table).passed
    assert s(bracket(T.table, "L.y", "R.u")) == "-2*L.x^2"
    want = T.algebra.element("-L.x^2") / T.algebra.element("R.w")
    assert T.algebra.equal(bracket(T.table, "L.y", "R.w"), want)
    assert bidifferential_witness(T.table, T.diagonal) is None
