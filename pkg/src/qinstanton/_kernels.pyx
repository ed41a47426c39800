# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled rewriting kernels; same API and semantics as ``_kernels_py``."""

BACKEND = "cython"


class ReductionLimit(RuntimeError):
    """Raised when a reduction exceeds its step budget."""


cdef inline object _match(tuple word, Py_ssize_t n, dict rules, tuple lengths):
    cdef Py_ssize_t i, L, k, nl = len(lengths)
    cdef object rhs
    for i in range(n):
        for k in range(nl):
            L = <Py_ssize_t>lengths[k]
            if i + L <= n:
                rhs = rules.get(word[i:i + L])
                if rhs is not None:
                    return (i, L, rhs)
    return None


def find_redex(tuple word, dict rules, tuple lengths):
    hit = _match(word, len(word), rules, lengths)
    if hit is None:
        return None
    return hit[0], hit[1]


def is_irreducible(tuple word, dict rules, tuple lengths):
    return _match(word, len(word), rules, lengths) is None


def suffix_reducible(tuple word, dict rules, tuple lengths):
    cdef Py_ssize_t n = len(word), L, k, nl = len(lengths)
    for k in range(nl):
        L = <Py_ssize_t>lengths[k]
        if L <= n and word[n - L:] in rules:
            return True
    return False


def reduce_terms(dict terms, dict rules, tuple lengths, Py_ssize_t max_passes):
    cdef dict result = {}
    cdef dict current = terms
    cdef dict nxt
    cdef Py_ssize_t passes = 0, i, L, n
    cdef tuple w, pre, post, nw, v
    cdef object c, cv, val, old, hit, rhs
    while current:
        passes += 1
        if passes > max_passes:
            raise ReductionLimit(f"reduction did not terminate within {max_passes} passes")
        nxt = {}
        for w, c in current.items():
            n = len(w)
            hit = _match(w, n, rules, lengths)
            if hit is None:
                old = result.get(w)
                if old is not None:
                    val = old + c
                    if val:
                        result[w] = val
                    else:
                        del result[w]
                else:
                    result[w] = c
                continue
            i = <Py_ssize_t>hit[0]
            L = <Py_ssize_t>hit[1]
            rhs = hit[2]
            pre = w[:i]
            post = w[i + L:]
            for v, cv in rhs:
                nw = pre + v + post
                val = c * cv
                old = nxt.get(nw)
                if old is not None:
                    val = old + val
                    if val:
                        nxt[nw] = val
                    else:
                        del nxt[nw]
                elif val:
                    nxt[nw] = val
        current = nxt
    return result


def multiply_terms(dict a, dict b):
    cdef dict out = {}
    cdef tuple wa, wb, w
    cdef object ca, cb, v, old
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            v = ca * cb
            old = out.get(w)
            if old is not None:
                v = old + v
                if v:
                    out[w] = v
                else:
                    del out[w]
            elif v:
                out[w] = v
    return out


def irreducible_words(alphabet, dict rules, tuple lengths, Py_ssize_t max_len):
    cdef list prev = [()]
    cdef list layers = [prev]
    cdef list nxt
    cdef tuple w, nw
    cdef Py_ssize_t step
    alpha = tuple(alphabet)
    for step in range(max_len):
        nxt = []
        for w in prev:
            for a in alpha:
                nw = w + (a,)
                if not suffix_reducible(nw, rules, lengths):
                    nxt.append(nw)
        layers.append(nxt)
        prev = nxt
    return layers
