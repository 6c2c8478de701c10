"""Biderivations on finitely presented localized Q-algebras.

A biderivation is stored as its values on pairs of generators; the value on
arbitrary elements follows from the chain rule, which is legitimate in
characteristic zero.  All "for every element" conditions are reduced to
finitely many generator checks:

* a relation ideal P gives a well-defined quotient table iff {p, z} and
  {z, p} lie in P for relation generators p and variables z (Leibniz);
* an ideal I is bidifferential iff {g, z}, {z, g} lie in I for generators g
  of I and variables z (Leibniz plus chain rule);
* for a skew table the Jacobiator is a derivation in each slot, so it
  vanishes identically iff it vanishes on triples of variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import ideals as _ideals
from .exactpoly import (
    AmbientMismatch, Poly, RationalFunction, Ring, as_element, format_element,
)
from .ideals import IdealHandle, localized_closure


class IllegalDenominator(ValueError):
    pass


class IllDefinedTable(ValueError):
    def __init__(self, report):
        super().__init__(f"bracket table is not well defined: {report.failures[:1]}")
        self.report = report


class MetadataMissing(ValueError):
    pass


def _to_poly(p, ring):
    if isinstance(p, str):
        p = as_element(p, ring)
    if isinstance(p, RationalFunction):
        if not p.is_polynomial():
            raise ValueError(f"expected a polynomial, got {format_element(p)}")
        return p.num * (Fraction(1) / p.den.constant_value())
    if isinstance(p, (int, Fraction)):
        return ring.const(p)
    if p.ring != ring:
        return p.rename(ring)
    return p


class AlgebraPresentation:
    """``Q[vars]/P`` localized at ``inverted`` and at nonzero polynomials in
    the base variables that occur in no relation (the transcendental part of
    the scalar field)."""

    def __init__(self, vars, base_vars=(), relations=(), inverted=(), asserted_domain=True,
                 factors=None, transcendental=None):
        self.ring = Ring(vars)
        self.vars = self.ring.names
        for v in base_vars:
            self.ring.index(v)
        self.base_vars = tuple(v for v in self.vars if v in set(base_vars))
        self.relations = tuple(p for p in (_to_poly(p, self.ring) for p in relations) if p)
        self.inverted = tuple(p for p in (_to_poly(p, self.ring) for p in inverted)
                              if not (p.is_constant() and p))
        for p in self.inverted:
            if not p:
                raise ValueError("cannot invert zero")
        self.asserted_domain = bool(asserted_domain)
        # factors: {"left": {orig: new}, "right": {orig: new}} for two-factor algebras
        self.factors = factors
        # base variables treated as independent transcendentals; by default
        # those that occur in no relation
        if transcendental is not None:
            transcendental = tuple(v for v in self.base_vars if v in set(transcendental))
        self._transcendental = transcendental

    def replace(self, **kw):
        args = dict(vars=self.vars, base_vars=self.base_vars, relations=self.relations,
                    inverted=self.inverted, asserted_domain=self.asserted_domain,
                    factors=self.factors, transcendental=self._transcendental)
        args.update(kw)
        ring = Ring(args["vars"])
        if ring != self.ring:
            args["relations"] = [p.rename(ring) if isinstance(p, Poly) else p for p in args["relations"]]
            args["inverted"] = [p.rename(ring) if isinstance(p, Poly) else p for p in args["inverted"]]
        return AlgebraPresentation(**args)

    @cached_property
    def free_base_vars(self):
        if self._transcendental is not None:
            return self._transcendental
        used = set()
        for p in self.relations:
            used.update(p.variables())
        return tuple(v for v in self.base_vars if v not in used)

    @cached_property
    def relation_ideal(self):
        return IdealHandle(self.ring, self.relations)

    @cached_property
    def loc_ideal(self):
        """The relation ideal contracted from the localization."""
        return localized_closure(self.relation_ideal, self.inverted, self.free_base_vars)

    def closure(self, ideal):
        """Contraction of the extension of ``ideal`` to the localization."""
        if isinstance(ideal, IdealHandle):
            gens = ideal.generators
            if ideal.ring != self.ring:
                gens = [g.rename(self.ring) for g in gens]
        else:
            gens = [_to_poly(g, self.ring) for g in ideal]
        if not gens:
            return self.loc_ideal
        return localized_closure(IdealHandle(self.ring, tuple(gens) + self.relations),
                                 self.inverted, self.free_base_vars)

    def element(self, value):
        return as_element(value, self.ring)

    def poly(self, value):
        return _to_poly(value, self.ring)

    def reduce(self, f):
        f = self.element(f)
        num = self.loc_ideal.reduce(f.num)
        return RationalFunction(num, f.den)

    @cached_property
    def _inverse_cache(self):
        return {}

    def simplify(self, f):
        """Reduce ``f``; if its denominator is a unit with a polynomial
        inverse modulo the relations, return a polynomial representative."""
        f = self.element(f)
        if f.den.is_constant():
            return self.reduce(f)
        key = tuple(sorted(f.den.terms.items()))
        hit = self._inverse_cache.get(key)
        if hit is None:
            w = "_w"
            while w in self.ring:
                w += "_"
            big = Ring((w,) + self.ring.names, (("degrevlex", 1), ("degrevlex", self.ring.nvars)))
            gens = [g.rename(big) for g in self.loc_ideal.generators]
            gens.append(f.den.rename(big) * big.gen(w) - 1)
            hit = self._inverse_cache[key] = (big, IdealHandle(big, gens))
        big, ideal = hit
        r = ideal.reduce(f.num.rename(big) * big.gen(big.names[0]))
        if all(e[0] == 0 for e in r.terms):
            return RationalFunction.from_poly(r.rename(self.ring))
        return self.reduce(f)

    def is_zero(self, f):
        f = self.element(f)
        return self.loc_ideal.contains(f.num)

    def equal(self, f, g):
        return self.is_zero(self.element(f) - self.element(g))

    def in_ideal(self, f, closed_ideal):
        """Membership of ``f`` in a localized ideal given by its closure."""
        return closed_ideal.contains(self.element(f).num)

    @cached_property
    def _unit_cache(self):
        return {}

    def is_unit(self, p):
        p = self.poly(p)
        if not p:
            return False
        if p.is_constant():
            return True
        rest = p
        changed = True
        while changed and not rest.is_constant():
            changed = False
            for q in self.inverted:
                d = rest.exact_div(q)
                if d is not None:
                    rest, changed = d, True
        if rest.is_constant():
            return True
        if set(rest.variables()) <= set(self.free_base_vars):
            return True
        key = tuple(sorted(rest.monic().terms.items()))
        hit = self._unit_cache.get(key)
        if hit is None:
            hit = self.closure([rest]).is_unit()
            self._unit_cache[key] = hit
        return hit

    def check_legal(self, f):
        f = self.element(f)
        if not f.den.is_constant() and not self.is_unit(f.den):
            raise IllegalDenominator(f"denominator {f.den} is not invertible in the algebra")
        return f

    def __eq__(self, other):
        return (isinstance(other, AlgebraPresentation) and self.vars == other.vars
                and self.base_vars == other.base_vars
                and self.relation_ideal == other.relation_ideal
                and set(map(str, self.inverted)) == set(map(str, other.inverted)))

    def __hash__(self):
        return hash((self.vars, self.base_vars))

    def __repr__(self):
        return (f"AlgebraPresentation(vars={list(self.vars)}, base_vars={list(self.base_vars)}, "
                f"relations={[str(p) for p in self.relations]}, "
                f"inverted={[str(p) for p in self.inverted]})")


@dataclass
class WellDefinedReport:
    passed: bool
    failures: list = field(default_factory=list)  # (relation, variable, slot, value)


class BracketTable:
    """Generator bracket values ``{z_a, z_b}``; absent entries are zero."""

    def __init__(self, algebra, entries=None, validate=True):
        self.algebra = algebra
        ring = algebra.ring
        clean = {}
        for (a, b), v in (entries or {}).items():
            ring.index(a)
            ring.index(b)
            v = algebra.check_legal(as_element(v, ring))
            if v:
                clean[(a, b)] = v
        self.entries = clean
        self._wd = None
        if validate and algebra.relations:
            rep = self.well_defined
            if not rep.passed:
                raise IllDefinedTable(rep)

    @classmethod
    def from_strings(cls, algebra, table, validate=True):
        entries = {}
        for key, value in table.items():
            a, b = (s.strip() for s in key.split(","))
            entries[(a, b)] = as_element(value, algebra.ring)
        return cls(algebra, entries, validate)

    @property
    def ring(self):
        return self.algebra.ring

    @property
    def well_defined(self):
        if self._wd is None:
            self._wd = check_well_defined(self)
        return self._wd

    def entry(self, a, b):
        v = self.entries.get((a, b))
        return v if v is not None else RationalFunction.from_poly(self.ring.zero())

    def max_degree(self):
        return max((max(v.num.degree(), 0) for v in self.entries.values()), default=0)

    def is_trivial(self):
        return all(self.algebra.is_zero(v) for v in self.entries.values())

    def with_algebra(self, algebra, validate=False):
        ring = algebra.ring
        return BracketTable(algebra, {k: v.rename(ring) for k, v in self.entries.items()}, validate)

    def to_strings(self):
        return {f"{a},{b}": format_element(v) for (a, b), v in sorted(
            self.entries.items(), key=lambda kv: (self.ring.index(kv[0][0]), self.ring.index(kv[0][1])))}

    def __repr__(self):
        return f"BracketTable({self.to_strings()})"


def tables_equal(t1, t2, variables=None):
    """Entry-wise equality modulo the relations of ``t1``'s algebra."""
    alg = t1.algebra
    names = variables if variables is not None else alg.vars
    for a in names:
        for b in names:
            v2 = t2.entry(a, b)
            if v2.ring != alg.ring:
                v2 = v2.rename(alg.ring)
            if not alg.equal(t1.entry(a, b), v2):
                return False
    return True


@dataclass
class DerivationSpec:
    algebra: AlgebraPresentation
    values: dict

    def __post_init__(self):
        ring = self.algebra.ring
        self.values = {z: as_element(v, ring) for z, v in self.values.items()
                       if not (isinstance(v, (int, Fraction)) and v == 0)}
        for z in self.values:
            ring.index(z)

    def value(self, z):
        v = self.values.get(z)
        return v if v is not None else RationalFunction.from_poly(self.algebra.ring.zero())

    def apply(self, f, reduce=True):
        f = self.algebra.element(f)
        acc = RationalFunction.from_poly(self.algebra.ring.zero())
        for z, v in self.values.items():
            if v:
                d = f.diff(z)
                if d:
                    acc = acc + d * v
        return self.algebra.reduce(acc) if reduce else acc

    def is_zero(self):
        return all(self.algebra.is_zero(v) for v in self.values.values())

    def violations(self):
        """Relations whose chain-rule image is not zero in the algebra."""
        return [p for p in self.algebra.relations if not self.algebra.is_zero(self.apply(p, False))]


def _bracket_raw(B, f, g):
    df = {}
    dg = {}
    acc = RationalFunction.from_poly(B.ring.zero())
    for (a, b), v in B.entries.items():
        da = df.get(a)
        if da is None:
            da = df[a] = f.diff(a)
        if not da:
            continue
        db = dg.get(b)
        if db is None:
            db = dg[b] = g.diff(b)
        if db:
            acc = acc + da * db * v
    return acc


def bracket(B, f, g, reduce=True):
    """``{f, g}`` by the chain rule, reduced modulo the relations."""
    alg = B.algebra
    f = alg.check_legal(alg.element(f))
    g = alg.check_legal(alg.element(g))
    val = _bracket_raw(B, f, g)
    return alg.reduce(val) if reduce else val


def hamiltonian(B, f, slot="left"):
    """``{f, .}`` (``slot="left"``) or ``{., f}`` (``slot="right"``)."""
    alg = B.algebra
    f = alg.check_legal(alg.element(f))
    if slot not in ("left", "right"):
        raise ValueError("slot must be 'left' or 'right'")
    values = {}
    for z in alg.vars:
        zr = RationalFunction.from_poly(alg.ring.gen(z))
        v = _bracket_raw(B, f, zr) if slot == "left" else _bracket_raw(B, zr, f)
        v = alg.reduce(v)
        if v:
            values[z] = v
    return DerivationSpec(alg, values)


def generator_hamiltonians(B):
    """All hamiltonians ``{z, .}`` and ``{., z}`` of generators, as specs."""
    alg = B.algebra
    out = []
    for z in alg.vars:
        for slot in ("left", "right"):
            values = {}
            for w in alg.vars:
                v = B.entry(z, w) if slot == "left" else B.entry(w, z)
                if v:
                    values[w] = v
            if values:
                out.append(DerivationSpec(alg, values))
    return out


def check_well_defined(B):
    alg = B.algebra
    fails = []
    loc = alg.loc_ideal
    for p in alg.relations:
        pr = RationalFunction.from_poly(p)
        for z in alg.vars:
            zr = RationalFunction.from_poly(alg.ring.gen(z))
            for slot, val in (("left", _bracket_raw(B, pr, zr)), ("right", _bracket_raw(B, zr, pr))):
                if not loc.contains(val.num):
                    fails.append((p, z, slot, val))
    return WellDefinedReport(not fails, fails)


def _ideal_in(alg, ideal):
    if isinstance(ideal, IdealHandle):
        if ideal.ring != alg.ring:
            if ideal.ring.names != alg.ring.names:
                raise AmbientMismatch(f"{ideal.ring!r} vs {alg.ring!r}")
            ideal = ideal.to_ring(alg.ring)
        return ideal
    return IdealHandle(alg.ring, [_to_poly(g, alg.ring) for g in ideal])


def bidifferential_witness(B, ideal, slots=("left", "right")):
    """First ``(generator, variable, slot, value)`` violating closure, or None.

    ``slots`` restricts the test to ``{I, R}`` (left) and/or ``{R, I}`` (right).
    """
    alg = B.algebra
    ideal = _ideal_in(alg, ideal)
    closed = alg.closure(ideal)
    if closed.is_unit():
        return None
    for g in ideal.generators:
        gr = RationalFunction.from_poly(g)
        for z in alg.vars:
            zr = RationalFunction.from_poly(alg.ring.gen(z))
            if "left" in slots:
                v = _bracket_raw(B, gr, zr)
                if not closed.contains(v.num):
                    return (g, z, "left", alg.reduce(v))
            if "right" in slots:
                v = _bracket_raw(B, zr, gr)
                if not closed.contains(v.num):
                    return (g, z, "right", alg.reduce(v))
    return None


def is_bidifferential_ideal(B, ideal):
    return bidifferential_witness(B, ideal) is None


@dataclass
class BidifferentialIdealPair:
    """``left`` must satisfy ``{I, R} ⊆ I``, ``right`` must satisfy ``{R, J} ⊆ J``.

    ``left_map``/``right_map`` place the ideals' variables in the algebra;
    by default the algebra's factor metadata is used, and plain name
    matching when the algebra has no factors.
    """
    left: IdealHandle | None = None
    right: IdealHandle | None = None
    left_map: dict | None = None
    right_map: dict | None = None


def pair_witness(B, pair):
    """Witness ``(side, generator, variable, slot, value)`` or ``None``."""
    alg = B.algebra
    for side, slot in (("left", "left"), ("right", "right")):
        ideal = getattr(pair, side)
        if ideal is None or ideal.is_zero():
            continue
        mapping = getattr(pair, f"{side}_map")
        if mapping is None:
            if alg.factors is not None:
                if side not in alg.factors:
                    raise MetadataMissing(f"algebra has no {side} factor")
                mapping = alg.factors[side]
            else:
                mapping = {}
        missing = [v for v in ideal.ring.names if mapping.get(v, v) not in alg.ring]
        if missing:
            raise MetadataMissing(f"cannot place variables {missing} in the algebra")
        gens = [g.rename(alg.ring, mapping) for g in ideal.generators]
        w = bidifferential_witness(B, gens, slots=(slot,))
        if w is not None:
            return (side,) + w
    return None


def is_bidifferential_pair(B, pair):
    return pair_witness(B, pair) is None


@dataclass
class PoissonReport:
    skew: bool
    jacobi: bool
    scalar_bilinear: bool
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return self.skew and self.jacobi and self.scalar_bilinear


def poisson_report(B):
    alg = B.algebra
    names = alg.vars
    fails = []
    skew = True
    for a, b in itertools.combinations_with_replacement(names, 2):
        if not alg.is_zero(B.entry(a, b) + B.entry(b, a)):
            skew = False
            fails.append(("skew", a, b))
    jac = True
    if skew:
        gens = {z: RationalFunction.from_poly(alg.ring.gen(z)) for z in names}
        for a, b, c in itertools.combinations(names, 3):
            total = (_bracket_raw(B, gens[a], B.entry(b, c))
                     + _bracket_raw(B, gens[b], B.entry(c, a))
                     + _bracket_raw(B, gens[c], B.entry(a, b)))
            if not alg.is_zero(total):
                jac = False
                fails.append(("jacobi", a, b, c))
    else:
        jac = False
    scal = True
    for beta in alg.base_vars:
        for z in names:
            if not (alg.is_zero(B.entry(beta, z)) and alg.is_zero(B.entry(z, beta))):
                scal = False
                fails.append(("scalar", beta, z))
    return PoissonReport(skew, jac, scal, fails)


def is_poisson(B):
    return poisson_report(B).passed


# linear algebra over K = Q(free base variables)


class _KField:
    """Arithmetic helpers for coefficients in Q or Q(free)."""

    def __init__(self, free_ring):
        self.ring = free_ring

    def zero(self):
        return Fraction(0) if self.ring is None else RationalFunction.from_poly(self.ring.zero())

    def one(self):
        return Fraction(1) if self.ring is None else RationalFunction.from_poly(self.ring.one())

    @staticmethod
    def is_zero(c):
        return not c


class KReducer:
    """Normal forms of polynomials over the scalar field K.

    The polynomial is viewed in the non-free variables with coefficients in
    K = Q(free base variables).  Without free variables this is the usual
    normal form with rational coefficients.
    """

    def __init__(self, alg, ideal=None):
        self.alg = alg
        ideal = ideal if ideal is not None else alg.loc_ideal
        self.ideal = ideal
        ring = alg.ring
        free = alg.free_base_vars
        self.free = free
        self.other = tuple(v for v in ring.names if v not in set(free))
        self.other_idx = [ring.index(v) for v in self.other]
        self.free_idx = [ring.index(v) for v in free]
        self.other_ring = Ring(self.other) if self.other else None
        self.free_ring = Ring(free) if free else None
        self.K = _KField(self.free_ring)
        if not free:
            self.leads = [g.lead_exp() for g in ideal.basis]
            self.basis = None
            return
        block, other, free_names, gb = _ideals.l_reducer(ideal, free)
        n = len(other)
        self.basis = []
        self.leads = []
        okey = self.other_ring.sortkey
        for g in gb:
            groups = {}
            for e, c in g.terms.items():
                groups.setdefault(e[:n], {})[e[n:]] = c
            lead = min(groups, key=okey)
            lc = Poly(self.free_ring, groups[lead])
            tail = {oe: RationalFunction(Poly(self.free_ring, cs), lc) for oe, cs in groups.items()
                    if oe != lead}
            self.basis.append((lead, tail))
            self.leads.append(lead)

    def split(self, poly):
        """Poly over the algebra ring -> {other_exp: K coefficient}."""
        if self.free_ring is None:
            return {e: Fraction(c) for e, c in poly.terms.items()}
        groups = {}
        for e, c in poly.terms.items():
            oe = tuple(e[i] for i in self.other_idx)
            fe = tuple(e[i] for i in self.free_idx)
            groups.setdefault(oe, {})[fe] = c
        return {oe: RationalFunction.from_poly(Poly(self.free_ring, cs)) for oe, cs in groups.items()}

    def nf(self, poly):
        if self.basis is None:
            return {e: Fraction(c) for e, c in self.ideal.reduce(poly).terms.items()}
        terms = self.split(poly)
        key = self.other_ring.sortkey
        rem = {}
        while terms:
            e = min(terms, key=key)
            c = terms.pop(e)
            if not c:
                continue
            for lead, tail in self.basis:
                if all(a >= b for a, b in zip(e, lead)):
                    q = tuple(a - b for a, b in zip(e, lead))
                    for te, tc in tail.items():
                        ne = tuple(a + b for a, b in zip(te, q))
                        nv = terms.get(ne)
                        nv = -(c * tc) if nv is None else nv - c * tc
                        if nv:
                            terms[ne] = nv
                        else:
                            terms.pop(ne, None)
                    break
            else:
                rem[e] = c
        return rem

    def standard_monomials(self, d, min_degree=0):
        """Monomials in the non-free variables of degree <= d, not divisible by
        any leading monomial; ascending degree, then ambient order."""
        n = len(self.other)
        out = []
        for deg in range(min_degree, d + 1):
            layer = []
            for combo in itertools.combinations_with_replacement(range(n), deg):
                e = [0] * n
                for i in combo:
                    e[i] += 1
                layer.append(tuple(e))
            if self.other_ring is not None:
                layer.sort(key=self.other_ring.sortkey, reverse=True)
            out.extend(layer)
        leads = self.leads if self.basis is not None else [
            tuple(l[i] for i in self.other_idx) for l in self.leads]
        return [e for e in out if not any(all(a >= b for a, b in zip(e, l)) for l in leads)]

    def monomial_poly(self, oe):
        ring = self.alg.ring
        e = [0] * ring.nvars
        for i, k in zip(self.other_idx, oe):
            e[i] = k
        return Poly(ring, {tuple(e): 1})

    def coeff_to_element(self, c):
        if isinstance(c, Fraction) or isinstance(c, int):
            return RationalFunction.from_poly(self.alg.ring.const(c))
        return c.rename(self.alg.ring)


def _kernel(columns, K):
    """Kernel of the linear map given by sparse columns {key: coeff}.

    Returns a list of combination dicts ``{column index: coeff}``; the
    column index with the largest position in each combination has
    coefficient 1.
    """
    pivots = {}
    kernel = []
    for j, col in enumerate(columns):
        v = {k: c for k, c in col.items() if c}
        combo = {j: K.one()}
        while v:
            p = min(v)
            if p not in pivots:
                pv = v[p]
                inv = K.one() / pv
                pivots[p] = ({k: c * inv for k, c in v.items()}, {i: c * inv for i, c in combo.items()})
                break
            pvec, pcombo = pivots[p]
            factor = v[p]
            for k, c in pvec.items():
                nv = v.get(k)
                nv = -(factor * c) if nv is None else nv - factor * c
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
            for i, c in pcombo.items():
                nv = combo.get(i)
                nv = -(factor * c) if nv is None else nv - factor * c
                if nv:
                    combo[i] = nv
                else:
                    combo.pop(i, None)
        else:
            kernel.append(combo)
    return kernel


def _column_dens(B):
    """Per variable and slot, a common denominator of the table entries."""
    ring = B.ring
    dens = {}
    for z in B.algebra.vars:
        for slot in ("left", "right"):
            den = ring.one()
            for w in B.algebra.vars:
                v = B.entry(w, z) if slot == "left" else B.entry(z, w)
                if not v.den.is_constant() and den.exact_div(v.den) is None:
                    den = den * v.den
            dens[(z, slot)] = den
    return dens


def _constant_columns(B, red, monos, denominator=None):
    """Equation columns (one per candidate numerator monomial) expressing that
    ``m/denominator`` has zero hamiltonians on every generator."""
    alg = B.algebra
    ring = alg.ring
    dens = _column_dens(B)
    zi = {z: i for i, z in enumerate(alg.vars)}
    q = denominator
    qbr = {}
    if q is not None:
        qr = RationalFunction.from_poly(q)
        for z in alg.vars:
            zr = RationalFunction.from_poly(ring.gen(z))
            qbr[(z, "left")] = _bracket_raw(B, qr, zr)
            qbr[(z, "right")] = _bracket_raw(B, zr, qr)
    cols = []
    for oe in monos:
        m = red.monomial_poly(oe)
        mr = RationalFunction.from_poly(m)
        col = {}
        for z in alg.vars:
            zr = RationalFunction.from_poly(ring.gen(z))
            for si, slot in enumerate(("left", "right")):
                v = _bracket_raw(B, mr, zr) if slot == "left" else _bracket_raw(B, zr, mr)
                if q is not None:
                    v = v * q - mr * qbr[(z, slot)]
                if not v:
                    continue
                num = v * dens[(z, slot)]
                if not num.is_polynomial():
                    num = num * num.den
                p = num.num * (Fraction(1) / num.den.constant_value())
                for e, c in red.nf(p).items():
                    col[(zi[z], si, red.other_ring.sortkey(e) if red.other_ring else e)] = c
        cols.append(col)
    return cols


def _combine(red, monos, combo, denominator=None):
    alg = red.alg
    acc = RationalFunction.from_poly(alg.ring.zero())
    items = sorted(combo.items())
    lead = items[-1][1]
    for j, c in items:
        acc = acc + red.coeff_to_element(c / lead) * red.monomial_poly(monos[j])
    if denominator is not None:
        acc = acc / denominator
    return acc


def polynomial_constants_up_to(B, d):
    """Basis (over the scalar field) of constants of degree <= d.

    The first element is always 1.
    """
    if d < 0:
        raise ValueError("degree bound must be non-negative")
    red = KReducer(B.algebra)
    monos = red.standard_monomials(d)
    cols = _constant_columns(B, red, monos)
    return [_combine(red, monos, combo) for combo in _kernel(cols, red.K)]


def rational_constants_probe(B, d, denominators):
    """Constants of the shape ``p/q`` for each fixed ``q`` with deg p <= d."""
    red = KReducer(B.algebra)
    monos = red.standard_monomials(d)
    found = []
    for q in denominators:
        q = B.algebra.poly(q)
        if B.algebra.is_zero(q):
            continue
        cols = _constant_columns(B, red, monos, q)
        for combo in _kernel(cols, red.K):
            c = _combine(red, monos, combo, q)
            if not is_scalar(B.algebra, c):
                found.append(c)
    return found


def is_scalar(alg, f):
    """True if ``f`` is visibly a scalar: it involves base variables only
    after reduction."""
    f = alg.reduce(alg.element(f))
    used = set(f.num.variables()) | set(f.den.variables())
    return used <= set(alg.base_vars)


def is_algebraic_over_scalars(alg, f):
    """True iff ``f`` is algebraic over K = Q(free base variables) in the
    fraction field of the algebra (which is assumed to be a domain)."""
    f = alg.element(f)
    ring = alg.ring
    t = "_c0"
    k = 0
    while t in ring:
        k += 1
        t = f"_c{k}"
    big = Ring(ring.names + (t,))
    gens = [g.rename(big) for g in alg.loc_ideal.generators]
    gens.append(f.den.rename(big) * big.gen(t) - f.num.rename(big))
    sat = _ideals.ideal_saturation(IdealHandle(big, gens), f.den.rename(big))
    keep = list(alg.free_base_vars) + [t]
    elim = _ideals.elimination_ideal(sat, keep)
    return any(g.degree_in(t) > 0 for g in elim.basis)


# Darboux search


@dataclass
class DarbouxFamily:
    lead: Poly
    template: str
    constraints: list


@dataclass
class DarbouxResult:
    polynomials: list = field(default_factory=list)
    families: list = field(default_factory=list)
    overflow: bool = False
    skipped: str | None = None

    def __iter__(self):
        return iter(self.polynomials)

    def __len__(self):
        return len(self.polynomials)


def _rational_roots(p, var):
    """Rational roots of a univariate polynomial (a Poly using only ``var``)."""
    i = p.ring.index(var)
    coeffs = {}
    for e, c in p.terms.items():
        coeffs[e[i]] = Fraction(c)
    den = 1
    for c in coeffs.values():
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = {k: int(c * den) for k, c in coeffs.items()}
    low = min(ints)
    roots = [Fraction(0)] if low > 0 else []
    ints = {k - low: c for k, c in ints.items()}
    deg = max(ints)
    if deg == 0:
        return roots
    a0, an = ints[0], ints[deg]
    for pnum in _divisors(abs(a0)):
        for qden in _divisors(abs(an)):
            for s in (1, -1):
                r = Fraction(s * pnum, qden)
                if r in roots:
                    continue
                if sum(c * r ** k for k, c in ints.items()) == 0:
                    roots.append(r)
    return sorted(roots)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n):
    if n == 0:
        return [0]
    small = []
    large = []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def _solve_rational(gens, ring, variables, depth=0):
    """Rational points of a polynomial system.

    Returns ``(points, positive_dimensional_pieces)`` where points are dicts
    variable -> Fraction and pieces are lists of polynomials.
    """
    ideal = IdealHandle(ring, gens)
    if ideal.is_unit():
        return [], []
    if not variables:
        return [{}], []
    if ideal.is_zero():
        return [], [[]]
    var = variables[-1]
    uni = [g for g in ideal.basis if set(g.variables()) <= {var}]
    if not uni:
        elim = _ideals.elimination_ideal(ideal, [var])
        uni = [g for g in elim.basis if g]
    if not uni:
        return [], [list(ideal.basis)]
    points = []
    pieces = []
    for r in _rational_roots(uni[0], var):
        sub = []
        for g in ideal.basis:
            s = g.substitute({var: r}).num
            if s:
                sub.append(s)
        pts, pcs = _solve_rational(sub, ring, variables[:-1], depth + 1)
        for p in pts:
            p = dict(p)
            p[var] = r
            points.append(p)
        pieces.extend(pcs)
    return points, pieces


def _is_product_of(f, smaller):
    if f.is_constant():
        return True
    for g in smaller:
        if g.degree() <= f.degree():
            q = f.exact_div(g)
            if q is not None and (q.is_constant() or _is_product_of(q, smaller)):
                return True
    return False


def darboux_principal_search(B, d, cofactor_degree=None):
    """Polynomials ``f`` of degree 1..d with ``(f)`` bidifferential.

    Each candidate is normalized so that its leading monomial has
    coefficient 1.  Positive-dimensional solution sets are reported as
    families and set ``overflow``; products of smaller solutions are dropped.
    """
    if d < 1:
        raise ValueError("degree bound must be at least 1")
    alg = B.algebra
    if alg.free_base_vars:
        return DarbouxResult(skipped="function-field scalars")
    red = KReducer(alg)
    dc = cofactor_degree if cofactor_degree is not None else max(B.max_degree() - 1, 0)
    monos = red.standard_monomials(d)
    cof_monos = red.standard_monomials(dc)
    nonconst = [m for m in monos if any(m)]
    dens = _column_dens(B)
    ring = alg.ring
    zs = list(alg.vars)
    slots = [(z, s) for z in zs for s in ("left", "right")]
    # bracket images of monomials, cleared of denominators
    images = {}
    for oe in monos:
        mr = RationalFunction.from_poly(red.monomial_poly(oe))
        for z, s in slots:
            zr = RationalFunction.from_poly(ring.gen(z))
            v = _bracket_raw(B, mr, zr) if s == "left" else _bracket_raw(B, zr, mr)
            v = v * dens[(z, s)]
            if not v.is_polynomial():
                v = v * v.den
            images[(oe, z, s)] = v.num * (Fraction(1) / v.den.constant_value())
    result = DarbouxResult()
    found = []
    pnames = [f"_a{i}" for i in range(len(monos))]
    lnames = [f"_l{k}" for k in range(len(slots) * len(cof_monos))]
    for lead in reversed(nonconst):
        li = monos.index(lead)
        # coefficients of monomials above the lead are zero; those below are unknown
        okey = red.other_ring.sortkey
        free_idx = [i for i, m in enumerate(monos) if okey(m) > okey(lead)]
        unknowns = [pnames[i] for i in free_idx]
        sys_ring = Ring(lnames + unknowns, (("degrevlex", len(lnames)), ("lex", len(unknowns)))
                        if unknowns else "degrevlex")
        coef = {li: sys_ring.one()}
        for i in free_idx:
            coef[i] = sys_ring.gen(pnames[i])
        eqs = []
        for k, (z, s) in enumerate(slots):
            lhs = {}
            for i, cpoly in coef.items():
                for e, c in red.nf(images[(monos[i], z, s)]).items():
                    lhs[e] = lhs.get(e, sys_ring.zero()) + cpoly * c
            for ci, cm in enumerate(cof_monos):
                lam = sys_ring.gen(lnames[k * len(cof_monos) + ci])
                for i, cpoly in coef.items():
                    prod = red.monomial_poly(tuple(a + b for a, b in zip(cm, monos[i])))
                    for e, c in red.nf(prod).items():
                        lhs[e] = lhs.get(e, sys_ring.zero()) - lam * cpoly * c
            eqs.extend(p for p in lhs.values() if p)
        elim = _ideals.elimination_ideal(IdealHandle(sys_ring, eqs), unknowns) if unknowns else \
            IdealHandle(sys_ring, eqs)
        if elim.is_unit():
            continue
        if not unknowns:
            pts, pieces = [{}], []
        else:
            ur = Ring(unknowns, "lex")
            gens = [g.rename(ur) for g in elim.basis]
            pts, pieces = _solve_rational(gens, ur, unknowns)
        for pt in pts:
            f = red.monomial_poly(lead)
            for i in free_idx:
                c = pt[pnames[i]]
                if c:
                    f = f + red.monomial_poly(monos[i]) * c
            found.append(f)
        for piece in pieces:
            parts = [str(red.monomial_poly(lead))]
            for i in reversed(free_idx):
                m = red.monomial_poly(monos[i])
                parts.append(pnames[i] if m.is_constant() else f"{pnames[i]}*{m}")
            tmpl = " + ".join(parts)
            result.families.append(DarbouxFamily(red.monomial_poly(lead), tmpl,
                                                 [str(g) for g in piece]))
            result.overflow = True
    found.sort(key=lambda p: (p.degree(), ring.sortkey(p.lead_exp())))
    kept = []
    for f in found:
        if not _is_product_of(f, [g for g in kept if g.degree() < f.degree()]):
            kept.append(f)
    result.polynomials = kept
    return result
