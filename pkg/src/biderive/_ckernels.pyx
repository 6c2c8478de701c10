# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernels; same API as ``_pykernels``."""

from cpython.long cimport PyLong_AsLong, PyLong_FromLong
from cpython.ref cimport Py_INCREF
from cpython.tuple cimport PyTuple_GET_ITEM, PyTuple_GET_SIZE, PyTuple_New, PyTuple_SET_ITEM
from heapq import heapify, heappop, heappush

BACKEND = "cython"


cdef inline tuple _add(tuple a, tuple b):
    cdef Py_ssize_t i, n = PyTuple_GET_SIZE(a)
    cdef tuple r = PyTuple_New(n)
    cdef object v
    for i in range(n):
        v = PyLong_FromLong(PyLong_AsLong(<object>PyTuple_GET_ITEM(a, i))
                            + PyLong_AsLong(<object>PyTuple_GET_ITEM(b, i)))
        Py_INCREF(v)
        PyTuple_SET_ITEM(r, i, v)
    return r


cdef inline tuple _sub(tuple a, tuple b):
    cdef Py_ssize_t i, n = PyTuple_GET_SIZE(a)
    cdef tuple r = PyTuple_New(n)
    cdef object v
    for i in range(n):
        v = PyLong_FromLong(PyLong_AsLong(<object>PyTuple_GET_ITEM(a, i))
                            - PyLong_AsLong(<object>PyTuple_GET_ITEM(b, i)))
        Py_INCREF(v)
        PyTuple_SET_ITEM(r, i, v)
    return r


cdef inline bint _divides(tuple a, tuple b):
    cdef Py_ssize_t i, n = PyTuple_GET_SIZE(a)
    for i in range(n):
        if PyLong_AsLong(<object>PyTuple_GET_ITEM(a, i)) > PyLong_AsLong(<object>PyTuple_GET_ITEM(b, i)):
            return False
    return True


def mul_terms(dict a, dict b):
    if len(a) < len(b):
        a, b = b, a
    cdef dict out = {}
    cdef tuple ea, eb, e
    cdef object ca, cb, c
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = _add(ea, eb)
            c = out.get(e, 0) + ca * cb
            if c:
                out[e] = c
            else:
                out.pop(e, None)
    return out


def add_terms(dict a, dict b, scale=1, shift=None):
    cdef dict out = dict(a)
    cdef tuple eb, e
    cdef object cb, c
    for eb, cb in b.items():
        e = _add(eb, shift) if shift is not None else eb
        c = out.get(e, 0) + scale * cb
        if c:
            out[e] = c
        else:
            out.pop(e, None)
    return out


def shift_terms(dict a, tuple shift, scale=1):
    cdef dict out = {}
    cdef tuple e
    cdef object c
    for e, c in a.items():
        out[_add(e, shift)] = scale * c
    return out


def divides(tuple a, tuple b):
    return _divides(a, b)


def normal_form(f, basis, sortkey):
    cdef dict terms = dict(f)
    if not basis or not terms:
        return terms
    cdef list heap = [(sortkey(e), e) for e in terms]
    heapify(heap)
    cdef dict rem = {}
    cdef tuple e, lead, q, te, ne
    cdef object c, lc, tail, factor, tc, old, nv
    cdef list blist = list(basis)
    cdef Py_ssize_t k, nb = len(blist)
    cdef bint found
    while heap:
        e = heappop(heap)[1]
        c = terms.pop(e, None)
        if c is None:
            continue
        found = False
        for k in range(nb):
            lead, lc, tail = blist[k]
            if _divides(lead, e):
                q = _sub(e, lead)
                factor = c if lc == 1 else c / lc
                for te, tc in tail:
                    ne = _add(te, q)
                    old = terms.get(ne)
                    if old is None:
                        terms[ne] = -factor * tc
                        heappush(heap, (sortkey(ne), ne))
                    else:
                        nv = old - factor * tc
                        if nv:
                            terms[ne] = nv
                        else:
                            del terms[ne]
                found = True
                break
        if not found:
            rem[e] = c
    return rem


def diff_terms(dict a, Py_ssize_t i):
    cdef dict out = {}
    cdef tuple e
    cdef object c, k
    for e, c in a.items():
        k = e[i]
        if k:
            out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
    return out
