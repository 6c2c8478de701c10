"""Pure-Python term kernels.

Polynomials are handled here as plain ``dict`` objects mapping exponent
tuples to exact coefficients (``int`` or ``Fraction``).  The compiled twin
in ``_ckernels.pyx`` exposes exactly the same functions.
"""

from heapq import heapify, heappop, heappush
from operator import add, le, sub

BACKEND = "python"


def mul_terms(a, b):
    """Product of two term dicts."""
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = tuple(map(add, ea, eb))
            c = get(e, 0) + ca * cb
            if c:
                out[e] = c
            else:
                out.pop(e, None)
    return out


def add_terms(a, b, scale=1, shift=None):
    """Return ``a + scale * x^shift * b``."""
    out = dict(a)
    get = out.get
    for eb, cb in b.items():
        e = tuple(map(add, eb, shift)) if shift is not None else eb
        c = get(e, 0) + scale * cb
        if c:
            out[e] = c
        else:
            out.pop(e, None)
    return out


def shift_terms(a, shift, scale=1):
    """Return ``scale * x^shift * a``."""
    return {tuple(map(add, e, shift)): scale * c for e, c in a.items()}


def divides(a, b):
    """True if monomial ``a`` divides monomial ``b``."""
    return all(map(le, a, b))


def normal_form(f, basis, sortkey):
    """Fully reduce ``f`` by ``basis``.

    ``basis`` is a sequence of ``(lead, lead_coeff, tail)`` where ``tail`` is
    a list of ``(exp, coeff)`` pairs.  Terms of ``f`` are processed from the
    largest down, so each monomial is reduced at most once.
    """
    f = dict(f)
    if not basis or not f:
        return f
    heap = [(sortkey(e), e) for e in f]
    heapify(heap)
    rem = {}
    while heap:
        e = heappop(heap)[1]
        c = f.pop(e, None)
        if c is None:
            continue
        for lead, lc, tail in basis:
            if all(map(le, lead, e)):
                q = tuple(map(sub, e, lead))
                factor = c if lc == 1 else c / lc
                for te, tc in tail:
                    ne = tuple(map(add, te, q))
                    old = f.get(ne)
                    if old is None:
                        f[ne] = -factor * tc
                        heappush(heap, (sortkey(ne), ne))
                    else:
                        nv = old - factor * tc
                        if nv:
                            f[ne] = nv
                        else:
                            del f[ne]
                break
        else:
            rem[e] = c
    return rem


def diff_terms(a, i):
    """Partial derivative of ``a`` with respect to variable index ``i``."""
    out = {}
    for e, c in a.items():
        k = e[i]
        if k:
            ne = e[:i] + (k - 1,) + e[i + 1:]
            out[ne] = c * k
    return out
