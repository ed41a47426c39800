from fractions import Fraction
from math import comb

import pytest

from qinstanton import ncengine as nc
from qinstanton import oracles
from qinstanton.qalgebras import AlgebraId, build
from qinstanton.scalar import ONE, PMode


def _schur_dim(partition, n):
    """Dimension of the GL(n) irreducible with the given partition (hook content formula)."""
    cols = [sum(1 for p in partition if p > k) for k in range(partition[0])] if partition else []
    num = den = 1
    for r, row in enumerate(partition):
        for c in range(row):
            num *= n + c - r
            den *= (row - c - 1) + (cols[c] - r - 1) + 1
    return Fraction(num, den)


def test_quadric_counts():
    assert oracles.quadric_counts(6, 6) == {0: 1, 1: 6, 2: 20, 3: 50, 4: 105, 5: 196, 6: 336}


def test_quadric_counts_match_closed_form():
    # one quadric in six variables: C(d+5,5) - C(d+3,5)
    for d, v in oracles.quadric_counts(6, 8).items():
        assert v == comb(d + 5, 5) - comb(d + 3, 5)


def test_grassmannian_is_six_dimensional_representation_sum():
    # degree-d piece of the Plucker ring is the GL4 irreducible (d, d)
    for d, v in oracles.quadric_counts(6, 5).items():
        assert _schur_dim((d, d), 4) == v


def test_mpq_commutative_oracle(mode):
    M = build(AlgebraId.Mpq, mode)
    comm = oracles.commutative_hilbert(M, 6)
    assert comm == oracles.quadric_counts(6, 6)
    assert nc.hilbert_dimensions(M, 6) == comm


def test_fpq_bidegrees(mode):
    F = build(AlgebraId.Fpq, mode)
    nc_counts = nc.hilbert_dimensions(F, 4, multigraded=True)
    comm = oracles.commutative_hilbert(F, 4, multigraded=True)
    assert nc_counts == comm
    assert comm[(1, 1)] == 20 and comm[(2, 2)] == 126


def test_fpq_matches_flag_representations(mode):
    # bidegree (a, b) of the flag coordinate ring is the GL4 irreducible (a + b, a)
    F = build(AlgebraId.Fpq, mode)
    comm = oracles.commutative_hilbert(F, 4, multigraded=True)
    assert len(comm) == 15
    for key, v in comm.items():
        a, b = _flag_degrees(F, key)
        assert _schur_dim(tuple(x for x in (a + b, a) if x), 4) == v, key


def _flag_degrees(F, key):
    """(Grassmannian degree, point degree) from the presentation's bigrading."""
    zi = F.grading[F.index["z11"]]
    if zi == (1, 0):
        return key
    return key[1], key[0]


def test_skipped_relations_counted():
    M = build(AlgebraId.MIq)
    rels, skipped = oracles.commutative_relations(M)
    assert skipped == 0
    # every relation becomes a commutator at q = 1
    for r in rels:
        assert sorted(v for v in r.values()) in ([-1, 1], [])


def test_inhomogeneous_rejected():
    P = nc.Presentation("inh", ["a"])
    with pytest.raises(ValueError):
        oracles.commutative_hilbert(P, 2, relations=[({(0, 0): None}, {(0,): ONE})])
