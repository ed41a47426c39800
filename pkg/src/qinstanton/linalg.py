"""Exact sparse linear algebra over :class:`Scalar`.

Vectors are dicts ``{column: Scalar}``.  Columns may be any hashable keys;
callers pass an explicit column order so pivots are chosen deterministically
(the first column in the order that is present becomes the pivot).
"""
from __future__ import annotations

from .scalar import ONE, Scalar

__all__ = ["row_reduce", "rank", "in_span", "kernel", "solve_combination"]


def _axpy(dst: dict, src: dict, f: Scalar) -> dict:
    out = dict(dst)
    for k, v in src.items():
        nv = out.get(k)
        t = f * v
        if nv is None:
            if t:
                out[k] = t
        else:
            nv = nv + t
            if nv:
                out[k] = nv
            else:
                del out[k]
    return out


def row_reduce(rows, order, reduced=True):
    """Reduced row echelon form.

    ``order`` ranks columns; the pivot of a row is its lowest-ranked column.
    Returns a list of ``(pivot, row)`` with each pivot coefficient equal to 1,
    sorted by pivot rank.  With ``reduced`` the pivot columns are also cleared
    from every other row.
    """
    rank_of = order if isinstance(order, dict) else {c: k for k, c in enumerate(order)}
    pivots: dict = {}
    for row in rows:
        r = {k: v for k, v in row.items() if v}
        while r:
            piv = min(r, key=rank_of.__getitem__)
            if piv in pivots:
                r = _axpy(r, pivots[piv], -r[piv])
                continue
            inv = r[piv].inverse()
            r = {k: v * inv for k, v in r.items()}
            pivots[piv] = r
            break
    keys = sorted(pivots, key=rank_of.__getitem__)
    if reduced:
        for k in reversed(keys):
            pk = pivots[k]
            for j in keys:
                if j == k:
                    continue
                pj = pivots[j]
                c = pj.get(k)
                if c:
                    pivots[j] = _axpy(pj, pk, -c)
    return [(k, pivots[k]) for k in keys]


def rank(rows, order=None) -> int:
    rows = list(rows)
    if order is None:
        cols = []
        seen = set()
        for r in rows:
            for k in r:
                if k not in seen:
                    seen.add(k)
                    cols.append(k)
        order = sorted(cols, key=repr)
    return len(row_reduce(rows, order, reduced=False))


def in_span(vec: dict, basis_rows, order) -> bool:
    ech = row_reduce(basis_rows, order, reduced=False)
    table = dict(ech)
    rank_of = {c: k for k, c in enumerate(order)}
    r = {k: v for k, v in vec.items() if v}
    while r:
        piv = min(r, key=rank_of.__getitem__)
        if piv not in table:
            return False
        r = _axpy(r, table[piv], -r[piv])
    return True


def kernel(vectors, order):
    """Linear relations among ``vectors``.

    Returns a basis of coefficient vectors ``{index: Scalar}`` with
    ``sum(c[i] * vectors[i]) == 0``.
    """
    tagged = []
    ext_order = list(order) + [("__tag__", i) for i in range(len(vectors))]
    for i, v in enumerate(vectors):
        row = dict(v)
        row[("__tag__", i)] = ONE
        tagged.append(row)
    ech = row_reduce(tagged, ext_order, reduced=True)
    out = []
    for piv, row in ech:
        if isinstance(piv, tuple) and len(piv) == 2 and piv[0] == "__tag__":
            out.append({k[1]: v for k, v in row.items()})
    return out


def solve_combination(target: dict, vectors, order):
    """Coefficients expressing ``target`` in terms of ``vectors`` or ``None``."""
    rel = kernel(list(vectors) + [target], order)
    t = len(vectors)
    for r in rel:
        c = r.get(t)
        if c:
            inv = -c.inverse()
            return {i: v * inv for i, v in r.items() if i != t}
    return None
