from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qinstanton import ncengine as nc
from qinstanton import qalgebras as qa
from qinstanton import rmatrix as rm
from qinstanton.scalar import GaussianRational as GR, ONE, PMode, q, qpow


@pytest.fixture(scope="module", params=list(PMode), ids=lambda m: m.value)
def Rs(request):
    return rm.build_rmatrices(request.param)


def test_tabulated_ri_entries():
    RI = rm.tabulated_ri(PMode.P_EQ_Q)
    assert RI[1, 1] == qpow(-1) and RI[2, 2] == q


def test_q_conjugation_reproduces_tables(Rs):
    assert (Rs.RI - Rs.RI_tab).is_zero()
    assert (Rs.RJ - Rs.RJ_tab).is_zero()


def test_rj_is_ri_with_middle_block_inverted(Rs):
    for r in (1, 2):
        assert Rs.RJ[r, r] == Rs.RI[r, r].substitute_s(-1)


@pytest.mark.parametrize("mode", list(PMode), ids=lambda m: m.value)
def test_classical_limit_is_identity(mode):
    R = rm.r12(mode).specialize(1)
    for i in range(4):
        for j in range(4):
            assert R[i][j] == GR(1 if i == j else 0)


def test_hecke(Rs):
    m = Rs.mode
    assert rm.check_hecke(Rs.R12, m)
    assert rm.check_hecke(Rs.RI, m, Rs.RI21)
    assert rm.check_hecke(Rs.RJ, m, Rs.RJ21)


def test_patch_matrices_need_their_own_companion(Rs):
    # with the plain transpose the first identity fails for RI and RJ
    assert not rm.hecke_residuals(Rs.RI, Rs.mode)[0].is_zero()
    assert rm.hecke_residuals(Rs.RI, Rs.mode)[1].is_zero()


def test_perturbed_entry_breaks_hecke():
    m = PMode.P_EQ_Q
    R = rm.r12(m)
    rows = [list(r) for r in R.rows]
    rows[0][0] = m.p(1)
    assert not rm.check_hecke(rm.RMat(rows), m)


def test_mode_swap_with_inverted_parameter():
    for m in PMode:
        R = rm.r12(m).map(lambda c: c.substitute_s(-1))
        assert rm.check_hecke(R, m.other)


def test_projectors(Rs):
    for R in (Rs.R12, Rs.RI, Rs.RJ):
        Pp, Pm = rm.build_projectors(R, Rs.mode)
        assert (Pp @ Pp - Pp).is_zero()
        assert (Pm @ Pm - Pm).is_zero()
        assert (Pp + Pm - rm.identity(4)).is_zero()
        assert (Pp @ Pm).is_zero()
        D = Pp - Pm
        assert (D @ D - rm.identity(4)).is_zero()


def _rank(M):
    rows = [{j: M[i][j] for j in range(len(M[i])) if M[i][j]} for i in range(len(M))]
    from qinstanton.oracles import _rank
    return _rank(rows)


def test_projector_ranks_at_numeric_point(Rs):
    Pp, Pm = rm.build_projectors(Rs.R12, Rs.mode)
    s0 = GR(Fraction(1, 2))
    assert _rank(Pp.specialize(s0)) == 3
    assert _rank(Pm.specialize(s0)) == 1


def test_projector_rejects_non_hecke():
    with pytest.raises(ValueError):
        rm.build_projectors(rm.identity(4).scale(2), PMode.P_EQ_Q)


def test_yang_baxter(Rs):
    for R in (Rs.R12, Rs.RI, Rs.RJ):
        assert rm.yang_baxter_residual(R).is_zero()


def test_rtt_over_gl2q():
    R = rm.r12(PMode.P_EQ_QINV)
    GL = qa.build(qa.AlgebraId.GL2q)
    entries = rm.expand_matrix_relation(R, rm.GeneratorMatrix.named("g"),
                                        rm.GeneratorMatrix.named("g"), GL)
    assert len(entries) == 16
    assert all(e.is_zero() for e in entries)


def test_rtt_span_equals_relation_span():
    R = rm.r12(PMode.P_EQ_QINV)
    F = nc.Presentation("free", list(qa.G4))
    M = rm.GeneratorMatrix.named("g")
    rtt = rm.expand_matrix_relation(R, M, M, F)
    GL = qa.build(qa.AlgebraId.GL2q)
    rels = [F.poly({r.lhs: ONE, **{w: -c for w, c in r.rhs.terms.items()}}) for r in GL.rules]
    a, b, ab = rm.span_rank(rtt, F), rm.span_rank(rels, F), rm.span_rank(rtt + rels, F)
    assert a == b == ab == 6


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_kron_mixed_product(a, b):
    A = rm.matrix_q().scale(qpow(a))
    B = rm.matrix_q().inverse().scale(qpow(b))
    lhs = A.kron(B) @ B.kron(A)
    rhs = (A @ B).kron(B @ A)
    assert (lhs - rhs).is_zero()


def test_embeddings():
    Q = rm.matrix_q()
    assert (rm.embed1(Q) - rm.identity(2).kron(Q)).is_zero()
    assert (rm.embed2(Q) - Q.kron(rm.identity(2))).is_zero()
    P = rm.permutation()
    assert (P @ rm.embed1(Q) @ P - rm.embed2(Q)).is_zero()
