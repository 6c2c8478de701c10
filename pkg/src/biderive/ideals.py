"""Gröbner bases, ideal operations and module syzygies over Q.

Everything is exact.  Bases are reduced and monic and are returned sorted
by leading monomial (largest first), so equal inputs give identical output.
"""

from __future__ import annotations

import heapq
from collections import OrderedDict
from fractions import Fraction
from operator import add, le, sub

from . import kernels
from .exactpoly import AmbientMismatch, Poly, RationalFunction, Ring

_CACHE_SIZE = 1024
_gb_cache = OrderedDict()


def _lcm(a, b):
    return tuple(map(max, a, b))


def _as_triples(basis):
    return [(g.lead_exp(), g.lead_coeff(), [(e, c) for e, c in g.terms.items() if e != g.lead_exp()])
            for g in basis]


def _buchberger(ring, gens, npos=0):
    """Reduced Gröbner basis of ``gens`` (non-zero Polys in ``ring``).

    ``npos > 0`` means the first ``npos`` variables are module positions:
    every term has exactly one of them and pairs are only formed between
    elements with the same leading position.
    """
    key = ring.sortkey
    polys = []
    leads = []
    triples = []
    active = []
    pairs = []

    def pair_key(i, j, lcm):
        return (sum(lcm[npos:]), tuple(-x for x in key(lcm)), i, j)

    def reduce(terms):
        return kernels.normal_form(terms, [triples[i] for i in active], key)

    def insert(p):
        p = p.monic()
        h = len(polys)
        lh = p.lead_exp()
        polys.append(p)
        leads.append(lh)
        triples.append((lh, 1, [(e, c) for e, c in p.terms.items() if e != lh]))
        # Gebauer-Moller update
        cand = []
        for i in active:
            li = leads[i]
            if npos and li[:npos] != lh[:npos]:
                continue
            cand.append((i, _lcm(li, lh)))
        keep = []
        for idx, (i, l) in enumerate(cand):
            coprime = not npos and not any(map(min, leads[i], lh))
            if coprime:
                keep.append((i, l, True))
                continue
            dominated = False
            for j, l2 in cand[idx + 1:]:
                if all(map(le, l2, l)):
                    dominated = True
                    break
            if not dominated:
                for j, l2, _ in keep:
                    if all(map(le, l2, l)):
                        dominated = True
                        break
            if not dominated:
                keep.append((i, l, False))
        new_pairs = []
        for i, l, coprime in keep:
            if not coprime:
                new_pairs.append((i, l))
        # drop old pairs made redundant by the new lead
        survivors = []
        for entry in pairs:
            _, _, i, j, l = entry
            if (all(map(le, lh, l)) and _lcm(leads[i], lh) != l and _lcm(leads[j], lh) != l):
                continue
            survivors.append(entry)
        pairs[:] = survivors
        for i, l in new_pairs:
            a, b = (i, h) if i < h else (h, i)
            pairs.append(pair_key(a, b, l) + (l,))
        heapq.heapify(pairs)
        active[:] = [i for i in active if not all(map(le, lh, leads[i]))] + [h]

    for g in sorted(gens, key=lambda p: key(p.lead_exp()), reverse=True):
        r = reduce(g.terms) if active else g.terms
        if r:
            insert(Poly(ring, r))

    while pairs:
        _, _, i, j, l = heapq.heappop(pairs)
        pi, pj = polys[i], polys[j]
        si = tuple(map(sub, l, leads[i]))
        sj = tuple(map(sub, l, leads[j]))
        s = kernels.add_terms(kernels.shift_terms(pi.terms, si), pj.terms, -1, sj)
        r = reduce(s)
        if r:
            insert(Poly(ring, r))

    # interreduce
    basis = [polys[i] for i in active]
    basis.sort(key=lambda p: key(p.lead_exp()), reverse=True)
    minimal = []
    for p in basis:
        lp = p.lead_exp()
        if not any(all(map(le, q.lead_exp(), lp)) for q in minimal):
            minimal.append(p)
    out = []
    trip = _as_triples(minimal)
    for k, p in enumerate(minimal):
        lp = p.lead_exp()
        others = trip[:k] + trip[k + 1:]
        tail = {e: c for e, c in p.terms.items() if e != lp}
        tail = kernels.normal_form(tail, others, key)
        tail[lp] = 1
        out.append(Poly(ring, tail))
    out.sort(key=lambda p: key(p.lead_exp()))
    return out


def _cache_key(ring, gens):
    return (ring, tuple(sorted(tuple(sorted(g.terms.items())) for g in gens)))


def _reduced_basis(ring, gens):
    gens = [g for g in gens if g]
    if not gens:
        return ()
    ck = _cache_key(ring, gens)
    hit = _gb_cache.get(ck)
    if hit is not None:
        _gb_cache.move_to_end(ck)
        return hit
    basis = tuple(_buchberger(ring, gens))
    _gb_cache[ck] = basis
    if len(_gb_cache) > _CACHE_SIZE:
        _gb_cache.popitem(last=False)
    return basis


class IdealHandle:
    """An ideal of ``ring`` with a lazily computed reduced Gröbner basis."""

    __slots__ = ("ring", "generators", "_basis", "_triples")

    def __init__(self, ring, generators=(), basis=None):
        gens = []
        for g in generators:
            if isinstance(g, RationalFunction):
                if not g.is_polynomial():
                    raise ValueError("ideal generators must be polynomials")
                g = g.num * (Fraction(1) / g.den.constant_value())
            if g.ring != ring:
                raise AmbientMismatch(f"{g.ring!r} vs {ring!r}")
            if g:
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)
        self._basis = basis
        self._triples = None

    @property
    def basis(self):
        if self._basis is None:
            self._basis = _reduced_basis(self.ring, self.generators)
        return self._basis

    def _tri(self):
        if self._triples is None:
            self._triples = _as_triples(self.basis)
        return self._triples

    def reduce(self, f):
        if isinstance(f, (int, Fraction)):
            f = self.ring.const(f)
        if f.ring != self.ring:
            raise AmbientMismatch(f"{f.ring!r} vs {self.ring!r}")
        if not self.basis:
            return f
        return Poly(self.ring, kernels.normal_form(f.terms, self._tri(), self.ring.sortkey))

    def contains(self, f):
        return not self.reduce(f)

    __contains__ = contains

    def is_zero(self):
        return not self.basis

    def is_unit(self):
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def contains_ideal(self, other):
        return all(self.contains(g) for g in other.generators)

    def __eq__(self, other):
        if not isinstance(other, IdealHandle):
            return NotImplemented
        return self.ring == other.ring and self.basis == other.basis

    def __hash__(self):
        return hash((self.ring, self.basis))

    def with_order(self, order):
        ring = self.ring.with_order(order)
        return IdealHandle(ring, [g.rename(ring) for g in self.generators])

    def to_ring(self, ring, mapping=None):
        return IdealHandle(ring, [g.rename(ring, mapping) for g in self.generators])

    def __add__(self, other):
        if isinstance(other, IdealHandle):
            other = other.generators
        return IdealHandle(self.ring, self.generators + tuple(other))

    def __mul__(self, other):
        return IdealHandle(self.ring, [a * b for a in self.generators for b in other.generators])

    def __repr__(self):
        return f"IdealHandle({[str(g) for g in self.basis]})"


def zero_ideal(ring):
    return IdealHandle(ring, ())


def unit_ideal(ring):
    return IdealHandle(ring, (ring.one(),))


def groebner_basis(gens, order=None, ring=None):
    """Reduced Gröbner basis of ``gens`` as an :class:`IdealHandle`.

    ``order`` re-orders the ambient ring; ``ring`` is needed for empty input.
    """
    gens = list(gens)
    if ring is None:
        if not gens:
            raise ValueError("ring is required for an empty generator list")
        ring = gens[0].ring
    for g in gens:
        if g.ring.names != ring.names:
            raise AmbientMismatch(f"{g.ring!r} vs {ring!r}")
    if order is not None:
        ring = ring.with_order(order)
    gens = [g if g.ring == ring else g.rename(ring) for g in gens]
    handle = IdealHandle(ring, gens)
    handle.basis
    return handle


def normal_form(f, ideal):
    return ideal.reduce(f)


def ideal_membership(f, ideal):
    return ideal.contains(f)


def ideal_contains(big, small):
    if big.ring.names != small.ring.names:
        raise AmbientMismatch(f"{big.ring!r} vs {small.ring!r}")
    if big.ring != small.ring:
        small = small.to_ring(big.ring)
    return big.contains_ideal(small)


def ideal_equal(a, b):
    return ideal_contains(a, b) and ideal_contains(b, a)


def _fresh(ring, stem):
    k = 0
    while f"{stem}{k}" in ring:
        k += 1
    return f"{stem}{k}"


def elimination_ideal(ideal, keep):
    """``I ∩ Q[keep]``, returned in the original ambient ring."""
    ring = ideal.ring
    keep = [v for v in ring.names if v in set(keep)]
    for v in keep:
        ring.index(v)
    elim = [v for v in ring.names if v not in set(keep)]
    if not elim:
        return ideal
    if not keep:
        return ideal if ideal.is_unit() else zero_ideal(ring)
    block = Ring(elim + keep, (("degrevlex", len(elim)), ("degrevlex", len(keep))))
    gb = _reduced_basis(block, [g.rename(block) for g in ideal.generators])
    n = len(elim)
    out = [g.rename(ring) for g in gb if all(not any(e[:n]) for e in g.terms)]
    return IdealHandle(ring, out)


def eliminate_with_new(ring, gens, extra, keep=None):
    """Eliminate the extra variables ``extra`` from ``gens`` given in a ring
    extending ``ring`` by ``extra`` (placed first).  Returns a handle in ``ring``."""
    keep = list(ring.names) if keep is None else keep
    big = Ring(list(extra) + list(ring.names),
               (("degrevlex", len(extra)), ("degrevlex", ring.nvars)))
    gb = _reduced_basis(big, [g.rename(big) for g in gens])
    n = len(extra)
    out = [g.rename(ring) for g in gb if all(not any(e[:n]) for e in g.terms)]
    res = IdealHandle(ring, out)
    if set(keep) != set(ring.names):
        res = elimination_ideal(res, keep)
    return res


def ideal_intersect(a, b):
    if a.ring != b.ring:
        raise AmbientMismatch(f"{a.ring!r} vs {b.ring!r}")
    ring = a.ring
    if a.is_zero() or b.is_zero():
        return zero_ideal(ring)
    t = _fresh(ring, "_t")
    big = Ring((t,) + ring.names)
    tv = big.gen(t)
    gens = [tv * g.rename(big) for g in a.generators]
    gens += [(1 - tv) * g.rename(big) for g in b.generators]
    return eliminate_with_new(ring, gens, [t])


def ideal_quotient(ideal, f):
    """``I : f``."""
    if not f:
        raise ValueError("quotient by the zero polynomial")
    ring = ideal.ring
    meet = ideal_intersect(ideal, IdealHandle(ring, [f]))
    return IdealHandle(ring, [g.exact_div(f) for g in meet.basis])


def ideal_saturation(ideal, f):
    """``I : f^∞`` via elimination of ``t`` from ``I + (1 - t f)``."""
    if isinstance(f, (list, tuple)):
        prod = ideal.ring.one()
        for g in f:
            prod = prod * g
        f = prod
    if not f:
        raise ValueError("saturation by the zero polynomial")
    if f.is_constant() or ideal.is_zero():
        return ideal
    ring = ideal.ring
    t = _fresh(ring, "_t")
    big = Ring((t,) + ring.names)
    gens = [g.rename(big) for g in ideal.generators]
    gens.append(1 - big.gen(t) * f.rename(big))
    return eliminate_with_new(ring, gens, [t])


def radical_membership(f, ideal):
    """True iff some power of ``f`` lies in ``I`` (Rabinowitsch trick)."""
    if not f:
        return True
    ring = ideal.ring
    t = _fresh(ring, "_t")
    big = Ring((t,) + ring.names)
    gens = [g.rename(big) for g in ideal.generators]
    gens.append(1 - big.gen(t) * f.rename(big))
    return IdealHandle(big, gens).is_unit()


def localized_closure(ideal, inverted=(), free_vars=()):
    """Contraction to the polynomial ring of the extension of ``I`` to the
    localization at ``inverted`` and at every nonzero polynomial in
    ``free_vars``.

    The second part uses a block order with the non-free variables first:
    the reduced basis is then a basis over the field of fractions in the free
    variables, and saturating at its leading coefficients gives the
    contraction.
    """
    ring = ideal.ring
    inverted = [g for g in inverted if not g.is_constant()]
    cur = ideal_saturation(ideal, inverted) if inverted else ideal
    free = [v for v in ring.names if v in set(free_vars)]
    if not free or cur.is_zero() or cur.is_unit():
        return cur
    other = [v for v in ring.names if v not in set(free)]
    if not other:
        return cur if cur.is_zero() else unit_ideal(ring)
    block = Ring(other + free, (("degrevlex", len(other)), ("degrevlex", len(free))))
    n = len(other)
    for _ in range(8):
        gb = _reduced_basis(block, [g.rename(block) for g in cur.generators])
        lcs = []
        for g in gb:
            lead = g.lead_exp()
            lc = Poly(block, {e: c for e, c in g.terms.items() if e[:n] == lead[:n]})
            if not lc.is_constant():
                lcs.append(lc.rename(ring))
        if not lcs:
            return cur
        nxt = ideal_saturation(cur, lcs)
        if ideal_contains(cur, nxt):
            return cur
        cur = nxt
    return cur


class ModuleElement:
    """A vector of polynomials of fixed rank."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = tuple(coords)
        if not coords:
            raise ValueError("module elements need positive rank")
        ring = coords[0].ring
        for c in coords:
            if c.ring != ring:
                raise AmbientMismatch(f"{c.ring!r} vs {ring!r}")
        self.coords = coords

    @property
    def rank(self):
        return len(self.coords)

    @property
    def ring(self):
        return self.coords[0].ring

    def is_zero(self):
        return not any(self.coords)

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"ModuleElement({[str(c) for c in self.coords]})"


def _module_gb(ring, vectors, rank):
    """Gröbner basis of the submodule of ``ring^rank`` spanned by ``vectors``
    under position-over-term order (position 0 largest).  Returns vectors."""
    pos = []
    k = 0
    while len(pos) < rank:
        name = f"_e{k}"
        if name not in ring:
            pos.append(name)
        k += 1
    big = Ring(pos + list(ring.names), (("lex", rank), ("degrevlex", ring.nvars)))
    n = ring.nvars
    encoded = []
    for vec in vectors:
        terms = {}
        for p, comp in enumerate(vec):
            unit = [0] * rank
            unit[p] = 1
            unit = tuple(unit)
            for e, c in comp.terms.items():
                terms[unit + e] = c
        if terms:
            encoded.append(Poly(big, terms))
    if not encoded:
        return []
    gb = _buchberger(big, encoded, npos=rank)
    out = []
    for g in gb:
        comps = [dict() for _ in range(rank)]
        for e, c in g.terms.items():
            p = e[:rank].index(1)
            comps[p][e[rank:]] = c
        out.append([Poly(ring, d) for d in comps])
    return out


def syzygy_basis(columns):
    """Generators of the kernel of ``R^m -> R^r``, ``e_i -> columns[i]``."""
    columns = [c if isinstance(c, ModuleElement) else ModuleElement(c) for c in columns]
    if not columns:
        return []
    r = columns[0].rank
    ring = columns[0].ring
    for c in columns:
        if c.rank != r:
            raise ValueError("rank mismatch among columns")
        if c.ring != ring:
            raise AmbientMismatch(f"{c.ring!r} vs {ring!r}")
    m = len(columns)
    zero = ring.zero()
    vecs = []
    for i, c in enumerate(columns):
        tail = [zero] * m
        tail[i] = ring.one()
        vecs.append(list(c.coords) + tail)
    gb = _module_gb(ring, vecs, r + m)
    return [ModuleElement(v[r:]) for v in gb if not any(v[:r])]


def _apply_derivation(values, f):
    """Chain rule: ``sum_z df/dz * values[z]`` with polynomial values."""
    ring = f.ring
    acc = {}
    for z, v in values.items():
        if not v:
            continue
        d = f.diff(z)
        if d:
            acc = kernels.add_terms(acc, kernels.mul_terms(d.terms, v.terms))
    return Poly(ring, acc)


def _polynomial_values(der, ring):
    """Clear denominators of a derivation's values; returns a dict of Polys."""
    values = der.values if hasattr(der, "values") and not isinstance(der, dict) else der
    fracs = {}
    for z, v in values.items():
        if isinstance(v, Poly):
            v = RationalFunction.from_poly(v)
        if v.ring != ring:
            raise AmbientMismatch(f"{v.ring!r} vs {ring!r}")
        fracs[z] = v
    den = ring.one()
    for v in fracs.values():
        if not v.den.is_constant() and den.exact_div(v.den) is None:
            den = den * v.den
    out = {}
    for z, v in fracs.items():
        q = (den * v.num).exact_div(v.den) if not v.den.is_constant() else \
            den * v.num * (Fraction(1) / v.den.constant_value())
        out[z] = q
    return out


def stable_refine(ideal, ders):
    """``{f in I : d(f) in I for every d in ders}``.

    Derivation values may carry denominators; these are cleared, which is
    exact when ``I`` is saturated with respect to them.
    """
    ring = ideal.ring
    ders = [_polynomial_values(d, ring) for d in ders]
    ders = [d for d in ders if any(d.values())]
    if not ders or ideal.is_zero() or ideal.is_unit():
        return ideal
    gens = list(ideal.basis)
    s = len(ders)
    m = len(gens)
    zero = ring.zero()
    vecs = []
    for i, g in enumerate(gens):
        top = [ideal.reduce(_apply_derivation(d, g)) for d in ders]
        tail = [zero] * m
        tail[i] = ring.one()
        vecs.append(top + tail)
    for j in range(s):
        for h in gens:
            top = [zero] * s
            top[j] = h
            vecs.append(top + [zero] * m)
    gb = _module_gb(ring, vecs, s + m)
    out = []
    for v in gb:
        if any(v[:s]):
            continue
        f = zero
        for a, g in zip(v[s:], gens):
            if a:
                f = f + a * g
        if f:
            out.append(f)
    return IdealHandle(ring, out)


def l_reducer(ideal, free_vars):
    """Normal form over the field of fractions in ``free_vars``.

    Returns ``(block_ring, other, free, gb)``: the block order ring with the
    non-free variables first, both name lists and the reduced basis in that
    ring.  Over the fractions in ``free`` it is a Gröbner basis of the
    extended ideal.
    """
    ring = ideal.ring
    free = [v for v in ring.names if v in set(free_vars)]
    other = [v for v in ring.names if v not in set(free)]
    if free and other:
        block = Ring(other + free, (("degrevlex", len(other)), ("degrevlex", len(free))))
    else:
        block = ring
    gb = _reduced_basis(block, [g.rename(block) for g in ideal.generators])
    return block, other, free, gb
