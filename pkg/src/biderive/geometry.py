"""B-varieties, B-points, morphisms, generic fibres, bidifferential cores and
the Dixmier-Moeglin probes.

Irreducibility of presenting ideals and of witness primes is always a user
assertion; results that depend on it say so in their ``assumes`` field.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from . import ideals as _ideals
from .biderivation import (
    AlgebraPresentation, BracketTable, KReducer, _bracket_raw, bidifferential_witness,
    darboux_principal_search, generator_hamiltonians, is_algebraic_over_scalars,
    is_bidifferential_ideal, polynomial_constants_up_to, rational_constants_probe,
)
from .exactpoly import PoleError, RationalFunction, format_element
from .extend import (
    AlgebraMorphism, ExtensionError, NotBidifferential, NotDominant, extend_algebraic,
    theorem_tensor,
)
from .ideals import IdealHandle, ideal_intersect, stable_refine
from .reports import FAIL, PARTIAL, PASS, Check, render_tensor

PRIMALITY = "assumes asserted primality"


class NotOnVariety(ValueError):
    pass


class WitnessError(ValueError):
    pass


class ComponentError(ValueError):
    pass


@dataclass
class BVariety:
    table: BracketTable
    label: str = "X"

    def __post_init__(self):
        if not self.table.well_defined.passed:
            raise ValueError(f"{self.label}: bracket table is not well defined")

    @property
    def algebra(self):
        return self.table.algebra


def _table(X):
    return X.table if isinstance(X, BVariety) else X


def is_b_subvariety(X, Z):
    return is_bidifferential_ideal(_table(X), Z)


def point_ideal(alg, p):
    """The ideal of the point ``p`` (values may involve base variables)."""
    gens = []
    for z in alg.vars:
        if z in p:
            v = alg.element(p[z])
            gens.append(v.den * alg.ring.gen(z) - v.num)
        elif z not in alg.base_vars:
            raise NotOnVariety(f"no coordinate given for {z!r}")
    return IdealHandle(alg.ring, gens)


def _check_on(alg, p):
    values = {z: alg.element(v) for z, v in p.items()}
    for rel in alg.relations:
        try:
            val = RationalFunction.from_poly(rel).substitute(values, alg.ring)
        except PoleError as exc:
            raise NotOnVariety(str(exc)) from None
        if not alg.is_zero(val):
            raise NotOnVariety(f"relation {rel} does not vanish at the point")


def b_point_witness(X, p):
    B = _table(X)
    _check_on(B.algebra, p)
    return bidifferential_witness(B, point_ideal(B.algebra, p))


def is_b_point(X, p):
    return b_point_witness(X, p) is None


def is_b_morphism(phi, B_source, B_target):
    """``phi`` maps the source algebra into the target; brackets must commute."""
    if not phi.respects_relations():
        raise ExtensionError("morphism does not respect the source relations")
    return not phi.bidifferential_failures(B_source, B_target)


def preimage(phi, Z):
    """``phi^{-1}(Z)`` as an ideal of the source polynomial ring."""
    src, tgt = phi.source, phi.target
    if Z.ring.names != tgt.ring.names:
        raise ValueError("ideal does not live in the target algebra")
    sub = AlgebraMorphism(src, tgt.replace(relations=tgt.relations + tuple(
        g.rename(tgt.ring) for g in Z.generators)), {v: phi.images[v] for v in src.vars})
    return sub.kernel()


def fibre_over_point(phi, p):
    """Ideal of ``phi^{-1}(p)`` in the target algebra, for a point ``p`` of
    the source (the extension of the point's maximal ideal)."""
    m = point_ideal(phi.source, p)
    _check_on(phi.source, p)
    return phi.target.closure([phi.apply(g).num for g in m.generators])


def image_closure_b(phi, Z, B_source=None, B_target=None):
    """Closure of the image of ``V(Z)``, i.e. the contraction along ``phi``.

    When both tables are given and ``Z`` is bidifferential, the result is
    rechecked to be bidifferential in the source.
    """
    J = preimage(phi, Z)
    if B_source is not None and B_target is not None:
        if not is_bidifferential_ideal(B_target, Z):
            warnings.warn("ideal is not bidifferential; closure computed anyway")
        elif not is_bidifferential_ideal(B_source, J):
            raise RuntimeError("contraction of a bidifferential ideal failed the recheck")
    return J


@dataclass
class CompatibilityReport:
    status: str
    checks: list


def check_compatible_base_extension(base, ext, witnesses=(), scalar_table=None):
    """``ext`` is the base algebra with scalars adjoined; see the checks."""
    Bb = _table(base)
    A, E = Bb.algebra, ext.algebra
    checks = []
    old = [v for v in A.vars]
    missing = [v for v in old if v not in E.ring]
    if missing:
        raise ValueError(f"extension lacks base generators {missing}")
    bad = []
    for u in old:
        for v in old:
            if not E.equal(ext.entry(u, v), Bb.entry(u, v).rename(E.ring)):
                bad.append(f"{{{u},{v}}} = {format_element(E.reduce(ext.entry(u, v)))}")
    checks.append(Check("restricts to base table", FAIL if bad else PASS, bad, "", "compatible-restriction"))
    scal = {k: E.element(v) for k, v in (scalar_table or {}).items()}
    bad = []
    for u in E.base_vars:
        for v in E.base_vars:
            want = scal.get((u, v), RationalFunction.from_poly(E.ring.zero()))
            if not E.equal(ext.entry(u, v), want):
                bad.append(f"{{{u},{v}}} = {format_element(E.reduce(ext.entry(u, v)))}")
    checks.append(Check("restricts to scalar table", FAIL if bad else PASS, bad, "", "compatible-scalars"))
    for W in witnesses:
        label = ", ".join(str(g) for g in W.generators) or "0"
        if not is_bidifferential_ideal(Bb, W):
            checks.append(Check(f"witness ({label})", FAIL, [], "witness is not bidifferential in the base",
                                "compatible-lifting"))
            continue
        w = bidifferential_witness(ext, [g.rename(E.ring) for g in W.generators])
        if w is None:
            checks.append(Check(f"witness ({label})", PASS, [], "", "compatible-lifting"))
        else:
            g, z, slot, val = w
            br = f"{{{g},{z}}}" if slot == "left" else f"{{{z},{g}}}"
            checks.append(Check(f"witness ({label})", FAIL, [format_element(val)],
                                f"{br} = {format_element(val)}", "compatible-lifting"))
    if any(c.status == FAIL for c in checks):
        status = FAIL
    elif not witnesses:
        status = PARTIAL
    else:
        status = PASS
    return CompatibilityReport(status, checks)


def extend_base_algebraic(X, minpoly, newvar="a"):
    """Adjoin an algebraic scalar; the new table is forced."""
    B = _table(X)
    table, _f = extend_algebraic(B, newvar, minpoly, base=True)
    label = X.label if isinstance(X, BVariety) else "X"
    return BVariety(table, f"{label}[{newvar}]")


# generic fibres


def promote_right(T):
    """The tensor algebra with the right factor turned into scalars: the
    Noether ``y`` become transcendental, the ``b`` algebraic."""
    alg = T.algebra
    rmap = alg.factors["right"]
    rvars = tuple(rmap[v] for v in T.B_S.algebra.vars if rmap[v] not in alg.base_vars)
    ys = tuple(rmap[y] for y in T.noether.y_list)
    trans = tuple(alg.free_base_vars) + ys
    A_L = alg.replace(base_vars=alg.base_vars + rvars, transcendental=trans)
    return T.table.with_algebra(A_L)


@dataclass
class GenericFibre:
    base_field: dict
    total: object
    table: BracketTable
    alpha: dict
    fibre_ideal: IdealHandle
    point_table: BracketTable
    flags: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)


def generic_b_fibre(phi, B_X, B_Y, noether):
    """Generic B-fibre of the dominant B-morphism with comorphism ``phi``
    (``phi.source`` is k[Y], ``phi.target`` is k[X])."""
    B_X, B_Y = _table(B_X), _table(B_Y)
    if not phi.verify_embedding():
        raise NotDominant("morphism is not dominant")
    if not phi.verify_bidifferential(B_Y, B_X):
        raise NotBidifferential("morphism is not a B-morphism")
    T = theorem_tensor(B_X, B_Y, phi, noether)
    table_L = promote_right(T)
    alg_L = table_L.algebra
    rmap = T.algebra.factors["right"]
    svars = [v for v in B_Y.algebra.vars if v not in B_Y.algebra.base_vars]
    alpha = {s: rmap[s] for s in svars}
    fibre = IdealHandle(alg_L.ring, [g.rename(alg_L.ring) for g in T.diagonal.generators])
    # alpha as an L-point of Y_L
    TY = theorem_tensor(B_Y, B_Y, AlgebraMorphism.identity(B_Y.algebra), noether)
    point_table = promote_right(TY)
    lmapY, rmapY = TY.algebra.factors["left"], TY.algebra.factors["right"]
    p = {lmapY[s]: rmapY[s] for s in svars}
    pw = b_point_witness(point_table, p)
    fw = bidifferential_witness(table_L, fibre)
    lmapX = T.algebra.factors["left"]
    images = {}
    for v in point_table.algebra.vars:
        if v in point_table.algebra.base_vars:
            images[v] = v
    for s in svars:
        images[lmapY[s]] = phi.images[s].rename(alg_L.ring, lmapX)
    phi_L = AlgebraMorphism(point_table.algebra, alg_L, images)
    morph_ok = not phi_L.bidifferential_failures(point_table, table_L)
    flags = {"is_b_point(alpha)": pw is None, "is_b_subvariety(fibre)": fw is None,
             "phi_L is a B-morphism": morph_ok}
    wit = {}
    if pw is not None:
        wit["is_b_point(alpha)"] = render_tensor(format_element(pw[3]))
    if fw is not None:
        wit["is_b_subvariety(fibre)"] = render_tensor(format_element(fw[3]))
    base = {"transcendental": list(alg_L.free_base_vars),
            "algebraic": [v for v in alg_L.base_vars if v not in alg_L.free_base_vars]}
    return GenericFibre(base, T, table_L, alpha, fibre, point_table, flags, wit)


# bidifferential core


@dataclass
class CoreResult:
    status: str  # "Exact" or "LowerBoundAfter"
    iterations: int
    ideal: IdealHandle
    trace: list

    @property
    def exact(self):
        return self.status == "Exact"


def _distinct_derivations(B):
    seen = set()
    out = []
    for d in generator_hamiltonians(B):
        key = tuple(sorted((z, format_element(v)) for z, v in d.values.items()))
        neg = tuple(sorted((z, format_element(-v)) for z, v in d.values.items()))
        if key in seen or neg in seen:
            continue
        seen.add(key)
        out.append(d)
    return out


def bidifferential_core(B, I, cap=6):
    """Iterate the stable refinement until it stabilizes or ``cap`` rounds."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    alg = B.algebra
    ders = _distinct_derivations(B)
    cur = alg.closure(I)
    trace = [cur]
    for n in range(cap):
        nxt = alg.closure(stable_refine(cur, ders))
        if nxt == cur:
            if not is_bidifferential_ideal(B, cur):
                raise RuntimeError("stabilized ideal failed the bidifferential recheck")
            return CoreResult("Exact", n, cur, trace)
        cur = nxt
        trace.append(cur)
    return CoreResult("LowerBoundAfter", cap, cur, trace)


@dataclass
class Certificate:
    certified: bool
    rank: int
    matrix: list
    reason: str = ""


def _rank(rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                factor = rows[i][c] / rows[rank][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def core_zero_certificate(B, p):
    """Rank of the generator hamiltonian fields at ``p``.

    If the fields span the tangent space at ``p`` then every ideal inside
    ``m_p`` that is stable under them lies in every power of ``m_p``, hence
    is zero by Krull's intersection theorem.  Only offered on polynomial
    rings (no relations).
    """
    B = _table(B)
    alg = B.algebra
    _check_on(alg, p)
    if alg.relations:
        return Certificate(False, 0, [], "certificate only offered without relations")
    point = {z: alg.element(p[z]) for z in alg.vars if z in p}
    missing = [z for z in alg.vars if z not in point]
    if missing:
        raise NotOnVariety(f"no coordinate given for {missing}")
    rows = []
    for z in alg.vars:
        for slot in ("left", "right"):
            row = []
            for w in alg.vars:
                v = B.entry(z, w) if slot == "left" else B.entry(w, z)
                val = v.evaluate(point)
                if not val.is_constant():
                    return Certificate(False, 0, [], "point coordinates are not rational")
                row.append(Fraction(val.num.constant_value()) / val.den.constant_value())
            rows.append(row)
    rank = _rank(rows)
    n = len(alg.vars)
    shown = [[str(c) for c in r] for r in rows]
    return Certificate(rank == n, rank, shown, f"rank {rank} of {n}")


# Dixmier-Moeglin probes


def quotient_table(B, P):
    B = _table(B)
    alg = B.algebra
    gens = [g.rename(alg.ring) for g in P.generators] if isinstance(P, IdealHandle) else \
        [alg.poly(g) for g in P]
    if not gens:
        return B
    new = alg.replace(relations=alg.relations + tuple(gens))
    return B.with_algebra(new)


@dataclass
class RationalResult:
    kind: str  # NoneUpTo | Witness | Unknown
    degree: int
    witness: object = None
    assumes: str = PRIMALITY

    def __str__(self):
        if self.kind == "Witness":
            return f"Witness({format_element(self.witness)})"
        if self.kind == "NoneUpTo":
            return f"NoneUpTo({self.degree})"
        return "Unknown"


def _hamiltonians_vanish(B, c):
    alg = B.algebra
    for z in alg.vars:
        zr = RationalFunction.from_poly(alg.ring.gen(z))
        if not alg.is_zero(_bracket_raw(B, c, zr)) or not alg.is_zero(_bracket_raw(B, zr, c)):
            return False
    return True


def check_b_rational(B, P, d, denominators=None):
    """Search for a constant of ``Frac(R/P)`` outside the algebraic closure
    of the scalars: polynomial constants up to degree ``d`` and numerators of
    degree ``d`` over each fixed denominator."""
    B = _table(B)
    if isinstance(P, IdealHandle) and not is_bidifferential_ideal(B, P):
        raise WitnessError("P is not bidifferential")
    Q = quotient_table(B, P)
    alg = Q.algebra
    if alg.loc_ideal.is_unit():
        return RationalResult("Unknown", d)
    cands = polynomial_constants_up_to(Q, d)
    if denominators is None:
        denominators = [v for v in alg.vars if v not in alg.base_vars]
    dens = [alg.poly(q) for q in denominators]
    dens = [q for q in dens if not alg.is_zero(q)]
    cands = cands + rational_constants_probe(Q, d, dens)
    for c in cands:
        c = alg.simplify(c)
        if is_algebraic_over_scalars(alg, c):
            continue
        if not _hamiltonians_vanish(Q, c):
            raise RuntimeError("constant failed the hamiltonian recheck")
        return RationalResult("Witness", d, c)
    return RationalResult("NoneUpTo", d)


@dataclass
class PrimitiveResult:
    kind: str  # CertifiedZeroCore | CoreStabilized | Unknown
    point: dict
    ideal: IdealHandle | None = None
    equals_P: bool | None = None
    evidence: object = None
    assumes: str = PRIMALITY

    def __str__(self):
        if self.kind == "CoreStabilized":
            return f"CoreStabilized({[str(g) for g in self.ideal.basis]})"
        return self.kind


def check_b_primitive(B, P, point, cap=6):
    B = _table(B)
    alg = B.algebra
    m = point_ideal(alg, point)
    _check_on(alg, point)
    Pgens = P.generators if isinstance(P, IdealHandle) else [alg.poly(g) for g in P]
    vals = {z: alg.element(v) for z, v in point.items()}
    for g in Pgens:
        if not alg.is_zero(RationalFunction.from_poly(g.rename(alg.ring)).substitute(vals, alg.ring)):
            raise WitnessError("P is not contained in the maximal ideal")
    if not Pgens and not alg.relations:
        cert = core_zero_certificate(B, point)
        if cert.certified:
            return PrimitiveResult("CertifiedZeroCore", dict(point), IdealHandle(alg.ring, ()), True, cert)
    Q = quotient_table(B, P)
    core = bidifferential_core(Q, m, cap)
    if core.exact:
        closedP = Q.algebra.loc_ideal
        equals = _ideals.ideal_equal(core.ideal, closedP)
        return PrimitiveResult("CoreStabilized", dict(point), core.ideal, equals, core)
    return PrimitiveResult("Unknown", dict(point), core.ideal, None, core)


def is_zero_dimensional(alg, closed):
    if closed.is_unit():
        return True
    red = KReducer(alg, closed)
    n = len(red.other)
    leads = red.leads if red.basis is not None else [tuple(l[i] for i in red.other_idx) for l in red.leads]
    for i in range(n):
        if not any(l[i] > 0 and all(l[j] == 0 for j in range(n) if j != i) for l in leads):
            return False
    return True


@dataclass
class LocallyClosedResult:
    kind: str  # WitnessChecked | Failed | Unknown
    intersection: IdealHandle | None
    exact: bool = False
    darboux_found_outside: list = field(default_factory=list)
    darboux_overflow: bool = False
    darboux_skipped: str | None = None
    caveat: str = "witness list not certified exhaustive"
    assumes: str = PRIMALITY

    def __str__(self):
        return self.kind


def locally_closed_probe(B, P, witnesses=(), d=3):
    B = _table(B)
    alg = B.algebra
    Pc = alg.closure(P)
    closed = []
    for W in witnesses:
        if not is_bidifferential_ideal(B, W):
            raise WitnessError(f"witness {[str(g) for g in W.generators]} is not bidifferential")
        Wc = alg.closure(W)
        if not _ideals.ideal_contains(Wc, Pc) or _ideals.ideal_contains(Pc, Wc):
            raise WitnessError(f"witness {[str(g) for g in W.generators]} does not strictly contain P")
        if Wc.is_unit():
            raise WitnessError("witness is not proper")
        closed.append(Wc)
    Q = quotient_table(B, P)
    dar = darboux_principal_search(Q, d)
    outside = []
    for f in dar.polynomials:
        Fc = alg.closure(list(Pc.generators) + [f.rename(alg.ring)])
        if Fc.is_unit() or _ideals.ideal_equal(Fc, Pc):
            continue
        if not any(_ideals.ideal_equal(Fc, Wc) for Wc in closed):
            outside.append(str(f))
    if not closed:
        if is_zero_dimensional(alg, Pc):
            return LocallyClosedResult("WitnessChecked", _ideals.unit_ideal(alg.ring), True, outside,
                                       dar.overflow, dar.skipped, "no proper overideals: P is maximal")
        return LocallyClosedResult("Unknown", None, False, outside, dar.overflow, dar.skipped)
    inter = closed[0]
    for Wc in closed[1:]:
        inter = ideal_intersect(inter, Wc)
    strict = not _ideals.ideal_contains(Pc, inter)
    return LocallyClosedResult("WitnessChecked" if strict else "Failed", inter, False, outside,
                               dar.overflow, dar.skipped)


@dataclass
class ComponentsReport:
    passed: bool
    checks: list


def verify_components_bidifferential(B, I, components):
    """Check a user-supplied decomposition of the radical of ``I`` and that
    every component is bidifferential."""
    B = _table(B)
    alg = B.algebra
    Ic = alg.closure(I)
    comps = [alg.closure(C) for C in components]
    if not comps:
        raise ComponentError("no components supplied")
    for i, a in enumerate(comps):
        for j, b in enumerate(comps):
            if i != j and _ideals.ideal_contains(b, a):
                raise ComponentError(f"component {j} contains component {i}")
    inter = comps[0]
    for c in comps[1:]:
        inter = ideal_intersect(inter, c)
    checks = []
    contains = all(_ideals.ideal_contains(c, Ic) for c in comps)
    checks.append(Check("I inside every component", PASS if contains else FAIL))
    in_radical = all(_ideals.radical_membership(g, Ic) for g in inter.generators)
    if not (contains and in_radical):
        raise ComponentError("intersection of components is not the radical of I")
    checks.append(Check("intersection equals radical", PASS, [], PRIMALITY))
    checks.append(Check("I bidifferential", PASS if is_bidifferential_ideal(B, Ic) else FAIL))
    for k, C in enumerate(components):
        w = bidifferential_witness(B, C)
        checks.append(Check(f"component {k} bidifferential", PASS if w is None else FAIL,
                            [] if w is None else [format_element(w[3])]))
    return ComponentsReport(all(c.status == PASS for c in checks), checks)


@dataclass
class DMEReport:
    locally_closed: LocallyClosedResult
    primitive: PrimitiveResult
    rational: RationalResult
    flags: list = field(default_factory=list)


def dme_report(B, P, point, witnesses=(), d=3, constants_degree=5, cap=6):
    B = _table(B)
    lc = locally_closed_probe(B, P, witnesses, d)
    pr = check_b_primitive(B, P, point, cap)
    ra = check_b_rational(B, P, constants_degree)
    flags = []
    if lc.kind == "WitnessChecked" and pr.kind == "Unknown":
        flags.append("attention: locally closed by witnesses but primitivity unknown")
    if B.algebra.free_base_vars:
        flags.append("primitive => rational not applicable over a nonconstant base")
    return DMEReport(lc, pr, ra, flags)


@dataclass
class FibreImageReport:
    fibre: GenericFibre
    base_rational: RationalResult
    base_locally_closed: LocallyClosedResult
    fibre_rational: RationalResult
    fibre_locally_closed: LocallyClosedResult


def fibre_image_reduction(phi, B_X, B_Y, noether, d=3, cap=6, constants_degree=None):
    """Probe the base's zero ideal and the generic fibre side by side."""
    B_X, B_Y = _table(B_X), _table(B_Y)
    fib = generic_b_fibre(phi, B_X, B_Y, noether)
    cd = d if constants_degree is None else constants_degree
    zero_Y = IdealHandle(B_Y.ring, ())
    base_r = check_b_rational(B_Y, zero_Y, cd)
    base_lc = locally_closed_probe(B_Y, zero_Y, (), d)
    fr = check_b_rational(fib.table, fib.fibre_ideal, cd)
    flc = locally_closed_probe(fib.table, fib.fibre_ideal, (), d)
    return FibreImageReport(fib, base_r, base_lc, fr, flc)
