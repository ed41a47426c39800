"""Commutative oracles for the classical limit ``q = 1``.

Independent of the rewriting engine: relations are specialized to
``s = 1``, read as commutative polynomials, and the graded pieces of the
quotient are measured by exact elimination on monomial coordinates.
"""
from __future__ import annotations

import itertools
from math import comb

from .scalar import GaussianRational

__all__ = ["commutative_relations", "commutative_hilbert", "quadric_counts"]


def _exponents(pres, w):
    e = [0] * len(pres.names)
    for a in w:
        e[a] += 1
    return tuple(e)


def commutative_relations(pres, relations=None):
    """Relations ``lhs - rhs`` of ``pres`` at ``s = 1`` as ``{exponent: coeff}`` dicts.

    Relations whose coefficients have a pole at ``s = 1`` are skipped and
    counted in the second return value.
    """
    if relations is None:
        relations = [({r.lhs: None}, r.rhs.terms) for r in pres.rules]
    out, skipped = [], 0
    for lhs, rhs in relations:
        poly: dict = {}
        try:
            for w, c in lhs.items():
                e = _exponents(pres, w)
                v = GaussianRational(1) if c is None else c.specialize(1)
                poly[e] = poly.get(e, GaussianRational(0)) + v
            for w, c in rhs.items():
                e = _exponents(pres, w)
                poly[e] = poly.get(e, GaussianRational(0)) - c.specialize(1)
        except ZeroDivisionError:
            skipped += 1
            continue
        poly = {e: c for e, c in poly.items() if c}
        if poly:
            out.append(poly)
    return out, skipped


def _monomials(nvars, degree):
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for a in combo:
            e[a] += 1
        yield tuple(e)


def _rank(rows):
    pivots: dict = {}
    for row in rows:
        r = dict(row)
        while r:
            piv = min(r)
            if piv not in pivots:
                inv = r[piv].inverse()
                pivots[piv] = {k: v * inv for k, v in r.items()}
                break
            f = r[piv]
            for k, v in pivots[piv].items():
                nv = r.get(k, GaussianRational(0)) - f * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return len(pivots)


def commutative_hilbert(pres, max_degree, multigraded=False, relations=None):
    """Dimensions of the commutative quotient by degree (or multidegree)."""
    grading = pres.grading
    nvars = len(pres.names)
    rels, _ = commutative_relations(pres, relations)

    def mdeg(e):
        return tuple(sum(k * g[t] for k, g in zip(e, grading)) for t in range(len(grading[0])))

    rel_deg = []
    for r in rels:
        degs = {mdeg(e) for e in r}
        if len(degs) != 1:
            raise ValueError("relations must be homogeneous")
        rel_deg.append((degs.pop(), r))
    counts: dict = {}
    for d in range(max_degree + 1):
        by_key: dict = {}
        for m in _monomials(nvars, d):
            by_key.setdefault(mdeg(m), []).append(m)
        if not multigraded and len(grading[0]) > 1:
            by_key = {(d,): [m for ms in by_key.values() for m in ms]}
        for key, monos in sorted(by_key.items()):
            rows = []
            for gdeg, r in rel_deg:
                rd = sum(gdeg)
                if rd > d:
                    continue
                for m in _monomials(nvars, d - rd):
                    if multigraded and tuple(a + b for a, b in zip(mdeg(m), gdeg)) != key:
                        continue
                    rows.append({tuple(a + b for a, b in zip(m, e)): c for e, c in r.items()})
            dim = len(monos) - _rank(rows)
            counts[key if multigraded else d] = dim
    return counts


def quadric_counts(nvars, max_degree):
    """Graded dimensions of a polynomial ring in ``nvars`` variables modulo one quadric."""
    return {d: comb(d + nvars - 1, nvars - 1) - (comb(d + nvars - 3, nvars - 1) if d >= 2 else 0)
            for d in range(max_degree + 1)}
