import random

import pytest
from hypothesis import given, settings, strategies as st

from qinstanton import instanton as inst
from qinstanton import qforms
from qinstanton.instanton import AdhmDatum, GMat
from qinstanton.scalar import GaussianRational as GR, PMode


@pytest.fixture(scope="module")
def ref():
    return inst.reference_datum()


def _any_datum(rng, c, n):
    """Arbitrary (generally non-solving) datum."""
    def m(r, k):
        return GMat.of(r, k, [GR(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(r * k)])
    return AdhmDatum(n, c, m(c, c), m(c, c), m(c, n), m(n, c))


# -- equations and regularity ------------------------------------------------------

def test_reference_solves_equations(ref):
    r1, r2 = inst.check_adhm_equations(ref)
    assert r1.is_zero() and r2.is_zero()
    assert inst.check_regularity(ref) == {"stable": True, "costable": True}


def test_empty_datum():
    d = AdhmDatum.make(1, 0, [], [], [], [])
    r1, r2 = inst.check_adhm_equations(d)
    assert r1.shape == (0, 0) and r1.is_zero() and r2.is_zero()


def test_real_moment_map_detects_framing():
    d = AdhmDatum.make(1, 1, [0], [0], [1], [0])
    r1, r2 = inst.check_adhm_equations(d)
    assert r1.is_zero()
    assert r2 == GMat.of(1, 1, [1])


def test_zero_datum_is_unstable():
    d = AdhmDatum.make(1, 1, [0], [0], [0], [0])
    assert inst.check_regularity(d) == {"stable": False, "costable": False}


def test_shape_validation():
    with pytest.raises(ValueError):
        AdhmDatum.make(2, 1, [0], [0], [1], [0])
    with pytest.raises(ValueError):
        AdhmDatum.make(0, 1, [0], [0], [], [])


def test_random_data_solve_equations():
    rng = random.Random(5)
    for _ in range(20):
        d = inst.random_adhm_datum(rng)
        r1, r2 = inst.check_adhm_equations(d)
        assert r1.is_zero() and r2.is_zero()


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_stable_iff_costable(seed):
    d = inst.random_adhm_datum(random.Random(seed))
    reg = inst.check_regularity(d)
    assert reg["stable"] == reg["costable"]


def test_stable_iff_costable_on_degenerate_family():
    # repeated diagonal entries make some data unstable; the equivalence still holds
    rng = random.Random(0)
    seen = set()
    for _ in range(60):
        d = inst.random_adhm_datum(rng, c=2, k=1, extra=0, gauge=rng.random() < 0.5)
        reg = inst.check_regularity(d)
        assert reg["stable"] == reg["costable"]
        seen.add(reg["stable"])
    assert seen == {True, False}


# -- gauge --------------------------------------------------------------------------

def test_identity_gauge(ref):
    assert inst.gauge_act(GMat.eye(1), ref) == ref


def test_phase_gauge(ref):
    d = inst.gauge_act([[GR(0, 1)]], ref)
    assert d.i == GMat.of(1, 2, [GR(0, 1), 0])
    r1, r2 = inst.check_adhm_equations(d)
    assert r1.is_zero() and r2.is_zero()


def test_non_unitary_gauge_rejected(ref):
    with pytest.raises(ValueError):
        inst.gauge_act([[GR(2)]], ref)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_gauge_invariance(seed):
    rng = random.Random(seed)
    d = _any_datum(rng, rng.randint(1, 3), rng.randint(1, 3))
    g = inst.random_unitary(d.c, rng)
    assert g @ g.dagger() == GMat.eye(d.c)
    d2 = inst.gauge_act(g, d)
    r1, r2 = inst.check_adhm_equations(d)
    s1, s2 = inst.check_adhm_equations(d2)
    gi = g.dagger()
    assert s1 == g @ r1 @ gi and s2 == g @ r2 @ gi
    assert inst.check_regularity(d) == inst.check_regularity(d2)


@pytest.mark.parametrize("patch", ["I", "J"])
def test_gauge_diagram(patch):
    rng = random.Random(2)
    d = inst.random_adhm_datum(rng, c=2)
    rep = inst.verify_gauge_diagram(inst.random_unitary(2, rng), d, patch)
    assert rep.passed, rep.failures()


# -- monads -------------------------------------------------------------------------

def test_reference_monad_entries(ref):
    m = inst.build_monad(ref, "I")
    P = m.pres
    assert [r[0] for r in m.alpha] == [-P.gen("x21"), -P.gen("x22"), P.zero(), P.one()]
    assert m.beta[0] == [P.gen("x22"), -P.gen("x21"), P.one(), P.zero()]


def test_beta_dagger_first_entry():
    d = AdhmDatum.make(2, 1, [GR(1, 1)], [GR(2, -1)], [1, 0], [0, 1])
    m = inst.build_monad(d, "I")
    P = m.pres
    assert m.beta_dagger()[0][0] == P.scalar(-GR(2, 1)) + P.gen("x11")


def test_patch_j_letters(ref):
    mj = inst.build_monad(ref, "J")
    assert mj.alpha[0][0] == -mj.pres.gen("y12")
    assert mj.alpha[1][0] == -mj.pres.gen("y22")


@pytest.mark.parametrize("patch", ["I", "J"])
def test_reference_complex(ref, patch):
    rep = inst.verify_complex(inst.build_monad(ref, patch), ref)
    assert rep.passed, rep.failures()


def test_failing_complex_gives_constant():
    d = AdhmDatum.make(2, 1, [0], [0], [1, 0], [1, 0])
    m = inst.build_monad(d, "I")
    ba = inst._mat_mul(m.beta, m.alpha, m.pres)
    assert ba == [[m.pres.one()]]
    rep = inst.verify_complex(m, d)
    assert rep.passed  # the residuals match ([B1,B2]+ij) x 1 exactly


def test_complex_residuals_track_adhm_residuals():
    rng = random.Random(9)
    for _ in range(50):
        d = _any_datum(rng, rng.randint(1, 2), rng.randint(1, 3))
        for patch in ("I", "J"):
            rep = inst.verify_complex(inst.build_monad(d, patch), d)
            assert rep.passed, rep.failures()


def test_dirac_pair_shape(ref):
    dp = inst.dirac_pair(inst.build_monad(ref))
    assert len(dp.D) == 2 and len(dp.D[0]) == 4
    assert len(dp.Ddag) == 4 and len(dp.Ddag[0]) == 2


# -- curvature ----------------------------------------------------------------------

def _block(F, c):
    return [[str(F[r][k]) for k in range(2 * c)] for r in range(2 * c)]


def test_curvature_entries(ref):
    dga, F = inst.curvature_matrix(ref, "I", PMode.P_EQ_Q)
    e = dga.element
    # frozen from the symbolic computation
    assert F[0][1] == e("-2*d_x11*d_x21")
    assert F[1][0] == e("2*d_x12*d_x22")
    assert F[1][1] == e("-(d_x11*d_x22 + d_x12*d_x21)")
    assert F[0][0] == e("q^2*d_x12*d_x21 + (2 - q^2)*d_x11*d_x22")
    for r in range(4):
        for k in range(4):
            if r >= 2 or k >= 2:
                assert F[r][k].is_zero()


def test_curvature_off_diagonal_anti_self_dual(ref):
    _, F = inst.curvature_matrix(ref, "I", PMode.P_EQ_Q)
    for r, k in ((0, 1), (1, 0)):
        sd, _ = qforms.decompose_2form(F[r][k])
        assert sd.is_zero()


def test_curvature_classical_limit_is_anti_self_dual(ref):
    rep = inst.curvature_asd_check(ref, "I", PMode.P_EQ_Q)
    res = dict(rep.residuals)
    for r in range(1, 5):
        for k in range(1, 5):
            assert res[f"q=1: F[{r},{k}] - display"].is_zero()
            assert res[f"q=1: SD part of F[{r},{k}]"].is_zero()


def test_curvature_datum_independent(mode):
    rng = random.Random(4)
    ref_block = None
    for _ in range(10):
        d = inst.random_adhm_datum(rng, c=1)
        _, F = inst.curvature_matrix(d, "I", mode)
        b = _block(F, 1)
        ref_block = ref_block or b
        assert b == ref_block


# -- rank oracle --------------------------------------------------------------------

def test_rank_full_for_reference(ref):
    rk = inst.pointwise_rank_oracle(ref)
    assert rk.passed and len(rk.points) == 25
    assert set(rk.beta_ranks) == {1} and set(rk.alpha_ranks) == {1}


def test_rank_drop_at_origin():
    d = AdhmDatum.make(1, 1, [0], [0], [0], [0])
    origin = {n: GR(0) for n in ("x11", "x12", "x21", "x22")}
    rk = inst.pointwise_rank_oracle(d, [origin])
    assert not rk.passed and rk.drops


def test_rank_profile_gauge_invariant():
    rng = random.Random(8)
    d = inst.random_adhm_datum(rng, c=2)
    d2 = inst.gauge_act(inst.random_unitary(2, rng), d)
    a, b = inst.pointwise_rank_oracle(d), inst.pointwise_rank_oracle(d2)
    assert a.beta_ranks == b.beta_ranks and a.alpha_ranks == b.alpha_ranks


def test_rank_oracle_needs_classical_point(ref):
    with pytest.raises(ValueError):
        inst.pointwise_rank_oracle(ref, q0=2)


# -- gluing -------------------------------------------------------------------------

@pytest.mark.parametrize("variant", ["realization", "printed"])
def test_gluing_reports_obstruction(ref, variant):
    g = inst.verify_consistency_gluing(ref, variant=variant)
    assert g.report.passed
    assert not g.found
    assert g.obstructions
    assert any("alpha[1,1]" in o for o in g.obstructions)


def test_gluing_constants_fixed(ref):
    g = inst.verify_consistency_gluing(ref)
    assert all(r.is_zero() for l, r in g.report.residuals if l.startswith("eta(const"))


# -- file format --------------------------------------------------------------------

def test_format_round_trip():
    rng = random.Random(1)
    for _ in range(10):
        d = inst.random_adhm_datum(rng)
        assert inst.parse_adhm(inst.format_adhm(d)) == d


def test_parse_example():
    text = """# reference datum
n = 2
c = 1
B1 = [0]
B2 = [0]
i = [1, 0]
j = [0, 1]
"""
    assert inst.parse_adhm(text) == inst.reference_datum()


def test_parse_gaussian_entries():
    d = inst.parse_adhm("n=1\nc=1\nB1=[1/2+3i]\nB2=[-i]\ni=[2]\nj=[0]\n")
    assert d.B1[0, 0] == GR("1/2+3i") and d.B2[0, 0] == GR(0, -1)


@pytest.mark.parametrize("text", [
    "n=1\nc=1\nB1=[0]\nB2=[0]\ni=[1]\n",
    "n=1\nc=1\nB1=[0]\nB2=[0]\ni=[1]\nj=[0]\nj=[0]\n",
    "n=1\nc=1\nB1=[0, 1]\nB2=[0]\ni=[1]\nj=[0]\n",
    "n=1\nc=1\nB1=[x]\nB2=[0]\ni=[1]\nj=[0]\n",
    "n=1\nc=1\nB1=[0]\nB2=[0]\ni=[1]\nj=[0]\nk=3\n",
    "garbage\n",
])
def test_parse_errors(text):
    with pytest.raises(inst.AdhmFormatError):
        inst.parse_adhm(text)
