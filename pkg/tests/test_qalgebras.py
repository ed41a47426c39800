import pytest

from qinstanton import ncengine as nc
from qinstanton import qalgebras as qa
from qinstanton.qalgebras import AlgebraId, build, catalog_ids
from qinstanton.scalar import ONE, PMode


def _eq(P, a, b):
    return P.parse(a) == P.parse(b)


def test_miq_has_six_swap_rules():
    P = build(AlgebraId.MIq)
    assert len(P.base_generators) == 4
    assert len(P.rules) == 6
    assert P.added_rules == []


def test_mpq_normal_words_avoid_d_dp(mode):
    P = build(AlgebraId.Mpq, mode)
    D, Dp = P.index["D"], P.index["Dp"]
    layers = nc.kernels.irreducible_words(tuple(range(len(P.names))), P._rules, P._lengths, 4)
    for layer in layers:
        for w in layer:
            assert not (D in w and Dp in w)


@pytest.mark.parametrize("aid", [AlgebraId.GL2q, AlgebraId.MIq, AlgebraId.MJq])
def test_classical_limit_is_commutative(aid):
    P = build(aid)
    for r in P.rules:
        (w, c), = [(w, c) for w, c in r.rhs.terms.items() if sorted(w) == sorted(r.lhs)]
        assert c.specialize(1) == 1
        for v, cv in r.rhs.terms.items():
            if v != w:
                assert cv.specialize(1) == 0


def test_confluent_to_degree_four():
    for aid, m in catalog_ids():
        P = build(aid, m)
        assert nc.check_local_confluence(P, 4) == [], P.name


def test_no_added_rules_for_matrix_algebras():
    for aid in (AlgebraId.GL2q, AlgebraId.MIq, AlgebraId.MJq):
        assert build(aid).added_rules == []


def test_dagger_swaps_modes():
    src = build(AlgebraId.Mpq, PMode.P_EQ_Q)
    dst = build(AlgebraId.Mpq, PMode.P_EQ_QINV)
    imgs = {k: dst.poly(v.terms) for k, v in qa._mpq_involution_images(dst).items()}
    rep = nc.verify_homomorphism(src, dst, imgs, anti=True, conjugate_coeffs=True)
    assert rep.passed
    # and not onto the same mode for q != 1
    same = {k: src.poly(v.terms) for k, v in qa._mpq_involution_images(src).items()}
    assert not nc.verify_homomorphism(src, src, same, anti=True, conjugate_coeffs=True).passed


def test_xy_realization():
    rep = qa.verify_xy_realization()
    assert rep.passed, rep.failures()
    labels = [l for l, _ in rep.residuals]
    assert "x: x21*x11 -> q^2*x11*x21" in labels
    assert "x22*x11 - x21*x12 = delta^2" in labels


def test_xy_classical_limit():
    S = build(AlgebraId.SL2q_ext)
    xs, _ = qa.xy_images(S)
    # at q = 1 the half-power prefactors become 1 and x = delta * g
    for x, g in zip(qa.X4, qa.G4):
        (w, c), = xs[x].terms.items()
        assert c.specialize(1) == 1
        assert w == S.word("delta", g) or w == S.word(g, "delta")


def test_eta_realization():
    rep = qa.verify_eta("realization")
    assert rep.passed, rep.failures()
    labels = [l for l, _ in rep.residuals]
    assert "eta^-1(eta(x21)) = x21" in labels


def test_eta_printed_is_inconsistent():
    rep = qa.verify_eta("printed")
    assert not rep.passed
    res = dict(rep.residuals)
    # diagonal entries are compatible with the involution, off-diagonal ones are not
    for n in ("x11", "x22"):
        assert res[f"eta(({n})^dagger) = eta({n})^dagger"].is_zero()
    assert not res["eta((x12)^dagger) = eta(x12)^dagger"].is_zero()


def test_eta_printed_dagger_example():
    MJ = build(AlgebraId.MJq_deltaloc)
    imgs = qa._eta_images(MJ, "printed")
    assert imgs["x22"] == MJ.parse("delta^2*y11")
    assert imgs["x22"] == (MJ.parse("delta^2*y22")).dagger()


def test_hopf_structure():
    rep = qa.verify_hopf_structure()
    assert rep.passed, rep.failures()


def test_qdet_central():
    P = build(AlgebraId.GL2q)
    det = P.parse("g11*g22 - q^-1*g12*g21")
    for g in P.base_generators:
        assert (P.gen(g) * det - det * P.gen(g)).is_zero()


def test_sphere_involution():
    assert qa.verify_sphere_involution().passed


def test_flag_realization(mode):
    rep = qa.verify_flag_realization(mode)
    assert rep.passed, rep.failures()


def test_twistor_patches(mode):
    rep = qa.verify_twistor_patches(mode, "left")
    assert rep.passed, rep.failures()


def test_twistor_symmetric_coordinates_fail(mode):
    assert not qa.verify_twistor_patches(mode, "symmetric").passed


def test_flag_discrepancies_reported(mode):
    rep = qa.flag_discrepancies(mode)
    assert rep.residuals and not rep.passed


def test_fpq_added_rules_listed(mode):
    P = build(AlgebraId.Fpq, mode)
    assert P.completion_degree >= 4
    for w in P.added_rules:
        assert w in P._rules


def test_report_summary():
    rep = qa.StructureReport("demo")
    P = build(AlgebraId.MIq)
    rep.add("zero", P.zero())
    rep.add("one", P.one())
    rep.add_flag("flag", True)
    s = rep.summary()
    assert not rep.passed
    assert [f["relation"] for f in s["failures"]] == ["one"]


def test_algebra_id_parse():
    assert AlgebraId.parse("MIq") is AlgebraId.MIq
    with pytest.raises(ValueError):
        AlgebraId.parse("nope")


def test_one_generator_check():
    P = build(AlgebraId.Mpq, PMode.P_EQ_Q)
    assert P.parse("D*Dp") == P.parse("q^0*(z11*z22 - z12*z21)").scale(PMode.P_EQ_Q.p(1) * qa.qi)
    assert P.parse("Dp*D") == P.parse("D*Dp").scale(PMode.P_EQ_Q.p(-2))
    assert ONE
