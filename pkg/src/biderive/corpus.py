"""Bundled worked examples with their expected outcomes.

Each entry is a set of system descriptions (plain dicts, so a harness can
perturb them) and a runner returning ``Check`` records.  An entry passes
when every expected outcome is reproduced exactly.
"""

from __future__ import annotations

import copy

from .biderivation import bracket, bidifferential_witness, is_bidifferential_ideal
from .exactpoly import format_element
from .extend import AlgebraMorphism, NoetherData, theorem_tensor, with_canonical_bracket
from .geometry import (
    b_point_witness, bidifferential_core, check_b_rational, check_compatible_base_extension,
    core_zero_certificate, fibre_over_point, generic_b_fibre,
)
from .ideals import IdealHandle
from .reports import FAIL, PASS, Check, render_tensor
from .systems import system_from_dict

RUNNING = {"version": "biderive-system/1", "name": "running", "variables": ["x", "y"],
           "bracket_table": {"x,y": "x", "y,x": "-x"}}
LINE = {"version": "biderive-system/1", "name": "line", "variables": ["x"]}
LINE_U = {"version": "biderive-system/1", "name": "line-u", "variables": ["u"]}
LINE_OVER_Y = {"version": "biderive-system/1", "name": "line-over-Q(y)",
               "variables": ["x", {"name": "y", "base": True}], "bracket_table": {"x,y": "x"}}
LINE_OVER_Y_TRIVIAL = {"version": "biderive-system/1", "name": "line-over-Q(y)-trivial",
                       "variables": ["x", {"name": "y", "base": True}]}
SO3 = {"version": "biderive-system/1", "name": "so3", "variables": ["x", "y", "z"],
       "bracket_table": {"x,y": "z", "y,x": "-z", "y,z": "x", "z,y": "-x", "z,x": "y", "x,z": "-y"}}

SYSTEMS = {"running": RUNNING, "line": LINE, "line-u": LINE_U, "line-over-Q(y)": LINE_OVER_Y,
           "line-over-Q(y)-trivial": LINE_OVER_Y_TRIVIAL, "so3": SO3}

CORE_CAP = 4


def _check(name, ok, anchor, detail="", witness=()):
    return Check(name, PASS if ok else FAIL, list(witness), detail, anchor)


def _ideal(table, *gens):
    return IdealHandle(table.ring, [table.algebra.poly(g) for g in gens])


def non_lifting_extension(sys):
    """Trivial bracket on Q[x] extended to Q[x,y] with {x,y} = x: the ideal
    (x-1) stops being bidifferential."""
    base, ext = sys["line"].table, sys["running"].table
    out = []
    out.append(_check("(x-1) bidifferential in Q[x]", is_bidifferential_ideal(base, _ideal(base, "x-1")),
                      "non-lifting"))
    val = bracket(ext, "x-1", "y")
    out.append(_check("{x-1, y} = x", format_element(val) == "x", "non-lifting", "", [format_element(val)]))
    w = bidifferential_witness(ext, _ideal(ext, "x-1"))
    got = format_element(w[3]) if w else None
    out.append(_check("(x-1) not bidifferential in Q[x,y]", got == "x", "non-lifting",
                      "witness x expected", [got] if got else []))
    return out


def canonical_diagonal(sys):
    """The canonical bracket on R⊗R does not make the diagonal bidifferential."""
    B = sys["running"].table
    T = theorem_tensor(B, B, AlgebraMorphism.identity(B.algebra), NoetherData(("x", "y")))
    C = with_canonical_bracket(T)
    d = C.report.d
    return [_check("canonical diagonal fails with witness x⊗1",
                   d.status == FAIL and d.witness == ["x⊗1"], "canonical-diagonal", d.detail, d.witness)]


def noncompatible_base_extension(sys):
    base = sys["line"].table
    bad, good = sys["line-over-Q(y)"].table, sys["line-over-Q(y)-trivial"].table
    W = [_ideal(base, "x-1")]
    rep = check_compatible_base_extension(base, bad, W)
    lift = [c for c in rep.checks if c.anchor == "compatible-lifting"]
    out = [_check("nontrivial extension not compatible on (x-1)",
                  rep.status == FAIL and lift and lift[0].witness == ["x"], "noncompatible",
                  lift[0].detail if lift else "", lift[0].witness if lift else [])]
    rep2 = check_compatible_base_extension(base, good, W)
    out.append(_check("trivial extension compatible", rep2.status == PASS, "noncompatible"))
    return out


def concrete_fibre(sys):
    base, total = sys["line-u"].table, sys["running"].table
    phi = AlgebraMorphism(base.algebra, total.algebra, {"u": "x"})
    pw = b_point_witness(base, {"u": 1})
    w = bidifferential_witness(total, fibre_over_point(phi, {"u": 1}))
    got = format_element(w[3]) if w else None
    return [_check("u = 1 is a B-point of the base", pw is None, "concrete-fibre"),
            _check("fibre over 1 is not a B-subvariety", got == "x", "concrete-fibre",
                   "witness {x-1, y} = x", [got] if got else [])]


def self_tensor(sys):
    B = sys["running"].table
    T = theorem_tensor(B, B, AlgebraMorphism.identity(B.algebra), NoetherData(("x", "y")))
    out = [Check(f"self-tensor {c.name}", c.status, c.witness, c.detail, c.anchor) for c in T.report.checks]
    v = bracket(T.table, "L.x - R.x", "L.y")
    out.append(_check("{x⊗1 - 1⊗x, y⊗1} = 0", T.algebra.is_zero(v), "tensor-diagonal",
                      "", [render_tensor(format_element(v))]))
    return out


def generic_fibre(sys):
    BX, BY = sys["running"].table, sys["line-u"].table
    phi = AlgebraMorphism(BY.algebra, BX.algebra, {"u": "x"})
    fib = generic_b_fibre(phi, BX, BY, NoetherData(("u",)))
    out = [_check(k, v, "generic-fibre", fib.witnesses.get(k, "")) for k, v in sorted(fib.flags.items())]
    v = bracket(fib.table, "L.x - R.u", "L.y")
    out.append(_check("{x⊗1 - 1⊗u, y⊗1} = 0 over Q(u)", fib.table.algebra.is_zero(v), "generic-fibre",
                      "", [render_tensor(format_element(v))]))
    return out


def core_certificate(sys, cap=CORE_CAP):
    B = sys["running"].table
    m = _ideal(B, "x-1", "y")
    core = bidifferential_core(B, m, cap)
    power = m
    for _ in range(cap):
        power = power * m
    out = [_check(f"core of (x-1, y) is LowerBoundAfter({cap}) = (x-1, y)^{cap + 1}",
                  core.status == "LowerBoundAfter" and core.iterations == cap and core.ideal == power,
                  "core-chain", core.status)]
    cert = core_zero_certificate(B, {"x": 1, "y": 0})
    out.append(_check("zero-core certificate at (1,0)", cert.certified and cert.rank == 2, "core-certificate",
                      cert.reason))
    return out


def so3_casimir(sys):
    B = sys["so3"].table
    res = check_b_rational(B, IdealHandle(B.ring, ()), 2)
    got = format_element(res.witness) if res.kind == "Witness" else str(res)
    return [_check("constant x^2 + y^2 + z^2 found", got == "x^2 + y^2 + z^2", "casimir", "", [got])]


ENTRIES = [
    ("non-lifting-extension", non_lifting_extension),
    ("canonical-tensor-diagonal", canonical_diagonal),
    ("noncompatible-base-extension", noncompatible_base_extension),
    ("concrete-fibre-over-point", concrete_fibre),
    ("self-tensor-positive-control", self_tensor),
    ("generic-fibre-positive-control", generic_fibre),
    ("core-chain-and-certificate", core_certificate),
    ("so3-casimir", so3_casimir),
]


def names():
    return [n for n, _ in ENTRIES]


def run_corpus(systems=None, only=None):
    """``[(entry name, [Check, ...])]``; a system that fails to parse or an
    exception inside a runner is reported as a failed check of that entry."""
    raw = copy.deepcopy(SYSTEMS if systems is None else systems)
    parsed, errors = {}, {}
    for k, v in raw.items():
        try:
            parsed[k] = system_from_dict(v)
        except Exception as exc:  # reported per entry
            errors[k] = f"{type(exc).__name__}: {exc}"
    results = []
    for name, fn in ENTRIES:
        if only and name not in only:
            continue
        try:
            checks = fn(parsed)
        except Exception as exc:
            detail = "; ".join(f"{k}: {e}" for k, e in sorted(errors.items())) or f"{type(exc).__name__}: {exc}"
            checks = [Check(f"{name} ran", FAIL, [], detail, name)]
        results.append((name, checks))
    return results
