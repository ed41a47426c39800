"""Catalog of concrete presentations and the structure maps among them.

Generator orders are part of the contract:

* ``GL2q``: g11 < g12 < g21 < g22, optionally followed by ``det`` and ``delta``;
* ``MIq``/``MJq``: x11 < x12 < x21 < x22 (resp. y), optionally ``delta``;
* ``Mpq``: z11 < z12 < z21 < z22 < D < Dp;
* ``Fpq``: the ``Mpq`` alphabet followed by z1 < z2 < z1p < z2p.

``det`` is a formal invertible central generator standing for the quantum
determinant; zero tests clear its negative powers and substitute the
quantum determinant (see :meth:`Presentation.set_elimination`).  Identities
of the determinant-one quotients are therefore verified up to explicit
powers of ``det``.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field

from . import ncengine as nc
from .ncengine import NCPoly, Presentation
from .scalar import ONE, ZERO, PMode, Scalar, qpow, spow

__all__ = [
    "AlgebraId",
    "StructureReport",
    "build",
    "catalog_ids",
    "verify_xy_realization",
    "verify_eta",
    "verify_hopf_structure",
    "verify_flag_realization",
    "verify_twistor_patches",
    "verify_sphere_involution",
    "eta_variant_search",
]

G4 = ["g11", "g12", "g21", "g22"]
X4 = ["x11", "x12", "x21", "x22"]
Y4 = ["y11", "y12", "y21", "y22"]
Z4 = ["z11", "z12", "z21", "z22"]


class AlgebraId(enum.Enum):
    GL2q = "GL2q"
    GL2q_detloc = "GL2q_detloc"
    SL2q_ext = "SL2q_ext"
    MIq = "MIq"
    MJq = "MJq"
    MIq_deltaloc = "MIq_deltaloc"
    MJq_deltaloc = "MJq_deltaloc"
    Mpq = "Mpq"
    Fpq = "Fpq"
    Ftilde = "Ftilde"
    LR_corep = "LR_corep"

    @property
    def needs_mode(self) -> bool:
        return self in (AlgebraId.Mpq, AlgebraId.Fpq, AlgebraId.Ftilde, AlgebraId.LR_corep)

    @classmethod
    def parse(cls, text: str) -> "AlgebraId":
        for a in cls:
            if a.value.lower() == text.strip().lower():
                return a
        raise ValueError(f"unknown algebra {text!r}; choose from {[a.value for a in cls]}")


def catalog_ids():
    """All (id, mode) pairs shipped by the catalog."""
    out = []
    for a in AlgebraId:
        if a.needs_mode:
            out.extend((a, m) for m in PMode)
        else:
            out.append((a, None))
    return out


@dataclass
class StructureReport:
    name: str
    residuals: list = field(default_factory=list)  # (label, NCPoly or None)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r is None or r.is_zero() for _, r in self.residuals)

    def add(self, label, residual):
        if isinstance(residual, NCPoly) and residual.pres.eliminations:
            residual = residual.pres.canonical(residual)
        self.residuals.append((label, residual))

    def add_flag(self, label, ok: bool, detail=""):
        """Record a non-polynomial check; ``ok`` False shows as a failure."""
        self.residuals.append((label, _Flag(ok, detail)))

    def extend(self, prefix, hom_report):
        for text, res in hom_report.entries:
            self.add(f"{prefix}: {text}" if prefix else text, res)

    def failures(self):
        return [(l, r) for l, r in self.residuals if r is not None and not r.is_zero()]

    def summary(self) -> dict:
        return {
            "check": self.name,
            "pass": self.passed,
            "relations": len(self.residuals),
            "failures": [{"relation": l, "residual": str(r)} for l, r in self.failures()],
            "notes": list(self.notes),
        }

    def __str__(self):
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for l, r in self.residuals:
            lines.append(f"  {l}: {'0' if r is None or r.is_zero() else r}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


class _Flag:
    """Boolean check result that quacks like a residual."""

    def __init__(self, ok, detail=""):
        self.ok = ok
        self.detail = detail

    def is_zero(self):
        return self.ok

    def __str__(self):
        return "ok" if self.ok else (self.detail or "failed")


q = qpow(1)
qi = qpow(-1)


def _hq(k) -> Scalar:
    """``q**(k/2)``."""
    return spow(2 * k)


# ---------------------------------------------------------------------------
# builders


def _gl_rules(P: Presentation, names=G4):
    a, b, c, d = names
    P.add_qcommutation(b, a, q)
    P.add_qcommutation(c, a, q)
    P.add_qcommutation(d, b, q)
    P.add_qcommutation(d, c, q)
    P.add_qcommutation(c, b, ONE)
    P.add_rule([d, a], {P.word(a, d): ONE, P.word(b, c): q - qi})


def _detq_terms(P: Presentation, names=G4):
    a, b, c, d = names
    return {P.word(a, d): ONE, P.word(b, c): -qi}


def _delta_rules(P: Presentation, names, coeffs):
    for n, c in zip(names, coeffs):
        P.add_qcommutation("delta", n, c)


def _finish(P: Presentation, degree=4) -> Presentation:
    C = nc.complete(P, degree)
    return C


def _gl_involution(P, extra=None):
    img = {"g11": P.gen("g22"), "g12": -P.gen("g21"), "g21": -P.gen("g12"), "g22": P.gen("g11")}
    if extra:
        img.update(extra)
    P.set_involution(img, conjugate=True)


def build_gl2q():
    P = Presentation("GL2q", G4, description="quantum 2x2 matrices")
    _gl_rules(P)
    _gl_involution(P)
    return _finish(P)


def build_gl2q_detloc():
    P = Presentation("GL2q_detloc", G4 + ["det"], invertible=["det"],
                     grading={"g11": (1,), "g12": (1,), "g21": (1,), "g22": (1,), "det": (2,)})
    _gl_rules(P)
    for g in G4:
        P.add_qcommutation("det", g, ONE)
    P.set_elimination("det", _detq_terms(P))
    _gl_involution(P, {"det": P.gen("det")})
    return _finish(P)


DELTA_G = (ONE, q, qi, ONE)  # delta g = c g delta


def build_sl2q_ext():
    P = Presentation("SL2q_ext", G4 + ["det", "delta"], invertible=["det", "delta"],
                     grading={"g11": (1,), "g12": (1,), "g21": (1,), "g22": (1,), "det": (2,),
                              "delta": (0,)})
    _gl_rules(P)
    for g in G4:
        P.add_qcommutation("det", g, ONE)
    _delta_rules(P, G4, DELTA_G)
    P.add_qcommutation("delta", "det", ONE)
    P.set_elimination("det", _detq_terms(P))
    _gl_involution(P, {"det": P.gen("det"), "delta": P.gen("delta")})
    return _finish(P)


def _mi_rules(P: Presentation, names=X4):
    a, b, c, d = names  # x11 x12 x21 x22
    q2 = qpow(2)
    P.add_qcommutation(b, a, ONE)
    P.add_qcommutation(d, c, ONE)
    P.add_qcommutation(c, a, q2)
    P.add_qcommutation(d, b, q2)
    P.add_qcommutation(c, b, q2)
    P.add_rule([d, a], {P.word(a, d): ONE, P.word(b, c): q2 - ONE})


def _mj_rules(P: Presentation, names=Y4):
    a, b, c, d = names  # y11 y12 y21 y22
    q2, qm2 = qpow(2), qpow(-2)
    P.add_qcommutation(c, a, ONE)
    P.add_qcommutation(d, b, ONE)
    P.add_qcommutation(b, a, q2)
    P.add_qcommutation(d, c, q2)
    P.add_qcommutation(c, b, qm2)
    P.add_rule([d, a], {P.word(a, d): ONE, P.word(b, c): ONE - qm2})


def _patch_involution(P, names, extra=None):
    a, b, c, d = names
    img = {a: P.gen(d), b: -P.gen(c), c: -P.gen(b), d: P.gen(a)}
    if extra:
        img.update(extra)
    P.set_involution(img, conjugate=True)


def build_miq(delta=False):
    gens = X4 + (["delta"] if delta else [])
    P = Presentation("MIq_deltaloc" if delta else "MIq", gens,
                     invertible=["delta"] if delta else (),
                     grading={**{x: (1,) for x in X4}, **({"delta": (0,)} if delta else {})})
    _mi_rules(P)
    if delta:
        _delta_rules(P, X4, DELTA_G)
        _patch_involution(P, X4, {"delta": P.gen("delta")})
    else:
        _patch_involution(P, X4)
    return _finish(P)


def build_mjq(delta=False):
    gens = Y4 + (["delta"] if delta else [])
    P = Presentation("MJq_deltaloc" if delta else "MJq", gens,
                     invertible=["delta"] if delta else (),
                     grading={**{y: (1,) for y in Y4}, **({"delta": (0,)} if delta else {})})
    _mj_rules(P)
    if delta:
        _delta_rules(P, Y4, DELTA_G)
        _patch_involution(P, Y4, {"delta": P.gen("delta")})
    else:
        _patch_involution(P, Y4)
    return _finish(P)


def _mpq_rules(P: Presentation, mode: PMode):
    p = mode.p
    z11, z12, z21, z22 = Z4
    for a, b in [(z12, z11), (z21, z11), (z22, z12), (z22, z21), (z21, z12)]:
        P.add_qcommutation(a, b, ONE)
    qm2 = qpow(-2)
    P.add_rule([z22, z11], {P.word(z11, z22): qm2, P.word(z12, z21): ONE - qm2})
    dcoef = {z11: p(1) * qi, z12: p(1) * qi, z21: p(1) * q, z22: p(1) * q}
    dpcoef = {z11: p(-1) * qi, z12: p(-1) * q, z21: p(-1) * qi, z22: p(-1) * q}
    for z in Z4:
        P.add_qcommutation("D", z, dcoef[z])
        P.add_qcommutation("Dp", z, dpcoef[z])
    P.add_qcommutation("Dp", "D", p(-2))
    c = p(1) * qi
    P.add_rule(["D", "Dp"], {P.word(z11, z22): c, P.word(z12, z21): -c})


def _mpq_involution_images(P):
    return {"z11": P.gen("z22"), "z12": -P.gen("z21"), "z21": -P.gen("z12"),
            "z22": P.gen("z11"), "D": P.gen("D"), "Dp": P.gen("Dp")}


def build_mpq(mode: PMode):
    P = Presentation(f"Mpq[{mode.value}]", Z4 + ["D", "Dp"])
    _mpq_rules(P, mode)
    P.pmode = mode
    return _finish(P)


_BUILDERS = {
    AlgebraId.GL2q: lambda m: build_gl2q(),
    AlgebraId.GL2q_detloc: lambda m: build_gl2q_detloc(),
    AlgebraId.SL2q_ext: lambda m: build_sl2q_ext(),
    AlgebraId.MIq: lambda m: build_miq(False),
    AlgebraId.MJq: lambda m: build_mjq(False),
    AlgebraId.MIq_deltaloc: lambda m: build_miq(True),
    AlgebraId.MJq_deltaloc: lambda m: build_mjq(True),
    AlgebraId.Mpq: build_mpq,
}


@functools.lru_cache(maxsize=None)
def _build_cached(aid: AlgebraId, mode):
    return _BUILDERS[aid](mode)


def build(aid, mode: PMode | None = None) -> Presentation:
    """Completed catalog presentation (cached; treat as immutable)."""
    if isinstance(aid, str):
        aid = AlgebraId.parse(aid)
    if aid.needs_mode:
        mode = mode or PMode.P_EQ_Q
    else:
        mode = None
    pres = _build_cached(aid, mode)
    ambs = nc.check_local_confluence(pres, max(4, pres.completion_degree))
    if ambs:
        raise nc.CompletionError(f"{pres.name} is not confluent", ambs)
    return pres


# ---------------------------------------------------------------------------
# structure checks on the quantum group and the two patches

# x = c * delta * g and y = c * delta^-1 * g, coefficients in the order of G4
X_OF_G = (ONE, _hq(-1), _hq(1), ONE)
Y_OF_G = (ONE, _hq(1), _hq(-1), ONE)


def xy_images(S: Presentation | None = None):
    """Images of the x and y generators in ``SL2q_ext``."""
    S = S or build(AlgebraId.SL2q_ext)
    d = S.gen("delta")
    di = d ** -1
    xs = {x: (d * S.gen(g)).scale(c) for x, g, c in zip(X4, G4, X_OF_G)}
    ys = {y: (di * S.gen(g)).scale(c) for y, g, c in zip(Y4, G4, Y_OF_G)}
    return xs, ys


def verify_xy_realization() -> StructureReport:
    S = build(AlgebraId.SL2q_ext)
    MI, MJ = build(AlgebraId.MIq), build(AlgebraId.MJq)
    xs, ys = xy_images(S)
    rep = StructureReport("xy_realization")
    rep.extend("x", nc.verify_homomorphism(MI, S, xs))
    rep.extend("y", nc.verify_homomorphism(MJ, S, ys))
    d2 = S.gen("delta") ** 2
    det = S.gen("det")
    x11, x12, x21, x22 = (xs[n] for n in X4)
    y11, y12, y21, y22 = (ys[n] for n in Y4)
    rep.add("x11*x22 - x12*x21 = delta^2", x11 * x22 - x12 * x21 - d2 * det)
    rep.add("x22*x11 - x21*x12 = delta^2", x22 * x11 - x21 * x12 - d2 * det)
    rep.add("y11*y22 - y21*y12 = delta^-2", y11 * y22 - y21 * y12 - (d2 ** -1) * det)
    rep.add("y22*y11 - y12*y21 = delta^-2", y22 * y11 - y12 * y21 - (d2 ** -1) * det)
    # the involution of SL2q_ext restricts to the printed one on x and y
    for P, imgs in ((MI, xs), (MJ, ys)):
        table, _ = P.involution
        for n, img in imgs.items():
            want = nc.map_poly(NCPoly(P, table[P.index[n]]), S, nc.image_table(P, S, imgs))
            rep.add(f"({n})^dagger", img.dagger() - want)
    return rep


def _eta_images(MJ, variant):
    d2 = MJ.gen("delta") ** 2
    y = MJ.gen
    if variant == "printed":
        return {"x11": d2 * y("y22"), "x12": -(d2 * y("y12")),
                "x21": -(d2 * y("y21")), "x22": d2 * y("y11")}
    # identification inside SL2q_ext: x = delta^2 * y up to the half powers
    return {x: (d2 * y(yn)).scale(cx * cy.inverse())
            for x, yn, cx, cy in zip(X4, Y4, X_OF_G, Y_OF_G)}


def _eta_inverse_images(MI, variant):
    dm2 = MI.gen("delta") ** -2
    x = MI.gen
    if variant == "printed":
        return {"y11": x("x22") * dm2, "y12": -(x("x12") * dm2),
                "y21": -(x("x21") * dm2), "y22": x("x11") * dm2}
    return {yn: (x(xn) * dm2).scale(cy * cx.inverse() * _delta_shift(k, -2))
            for k, (xn, yn, cx, cy) in enumerate(zip(X4, Y4, X_OF_G, Y_OF_G))}


def _delta_shift(k, e):
    """c with ``delta^e * g_k = c * g_k * delta^e``."""
    return DELTA_G[k] ** e


ETA_VARIANTS = ("realization", "printed")


def verify_eta(variant: str = "realization") -> StructureReport:
    """Gluing isomorphism between the delta-localized patches.

    ``variant="printed"`` uses the adjugate coordinate formulas
    ``x11 -> delta^2 y22, x12 -> -delta^2 y12, ...``; these do not respect
    the patch relations and the report fails.  The default is the
    isomorphism induced by both patches sitting inside ``SL2q_ext``.
    """
    if variant not in ETA_VARIANTS:
        raise ValueError(f"variant must be one of {ETA_VARIANTS}")
    MI, MJ = build(AlgebraId.MIq_deltaloc), build(AlgebraId.MJq_deltaloc)
    fwd = dict(_eta_images(MJ, variant))
    fwd["delta"] = MJ.gen("delta")
    bwd = dict(_eta_inverse_images(MI, variant))
    bwd["delta"] = MI.gen("delta")
    rep = StructureReport(f"eta[{variant}]")
    rep.extend("eta", nc.verify_homomorphism(MI, MJ, fwd))
    rep.extend("eta^-1", nc.verify_homomorphism(MJ, MI, bwd))
    tf = nc.image_table(MI, MJ, fwd)
    tb = nc.image_table(MJ, MI, bwd)
    for n in X4:
        g = MI.gen(n)
        rep.add(f"eta(({n})^dagger) = eta({n})^dagger",
                nc.map_poly(g.dagger(), MJ, tf) - nc.map_poly(g, MJ, tf).dagger())
        rep.add(f"eta^-1(eta({n})) = {n}", nc.map_poly(nc.map_poly(g, MJ, tf), MI, tb) - g)
    return rep


def eta_variant_search(max_half_power: int = 8):
    """Search maps ``x_ij -> c * delta^2 * y_kl`` that are (anti)homomorphisms.

    Covers the printed adjugate pattern and the entrywise pattern with a
    relative factor ``+-q^(k/2)`` on the off-diagonal images (the only
    scaling the homogeneous relations can see).  Returns a list of dicts.
    """
    MI, MJ = build(AlgebraId.MIq), build(AlgebraId.MJq_deltaloc)
    d2 = MJ.gen("delta") ** 2
    patterns = {"adjugate": ("y22", "y12", "y21", "y11"), "entrywise": tuple(Y4)}
    found = []
    for pname, target in patterns.items():
        for anti in (False, True):
            for k in range(-max_half_power, max_half_power + 1):
                for sign in (1, -1):
                    c = _hq(k) * sign
                    imgs = {X4[0]: d2 * MJ.gen(target[0]),
                            X4[1]: (d2 * MJ.gen(target[1])).scale(c),
                            X4[2]: d2 * MJ.gen(target[2]),
                            X4[3]: d2 * MJ.gen(target[3])}
                    ok = nc.verify_homomorphism(MI, MJ, imgs, anti=anti).passed
                    if ok:
                        found.append({"pattern": pname, "anti": anti,
                                      "offdiag_factor": str(c)})
    return found


def _gl_antipode(P):
    det_i = P.gen("det") ** -1
    g = P.gen
    return {"g11": g("g22") * det_i, "g12": (g("g12") * det_i).scale(-q),
            "g21": (g("g21") * det_i).scale(-qi), "g22": g("g11") * det_i,
            "det": det_i}


def verify_hopf_structure() -> StructureReport:
    A = build(AlgebraId.GL2q_detloc)
    rep = StructureReport("hopf_structure")
    g = A.gen
    detq = A.poly(_detq_terms(A))
    # coproduct
    T = nc.tensor_square(A)
    for side in ("L", "R"):
        T.set_elimination(f"det_{side}", _detq_terms(T, [f"{n}_{side}" for n in G4]))
    gl = {(i, j): T.gen(f"g{i}{j}_L") for i in (1, 2) for j in (1, 2)}
    gr = {(i, j): T.gen(f"g{i}{j}_R") for i in (1, 2) for j in (1, 2)}
    cop = {f"g{i}{j}": gl[i, 1] * gr[1, j] + gl[i, 2] * gr[2, j] for i in (1, 2) for j in (1, 2)}
    cop["det"] = T.gen("det_L") * T.gen("det_R")
    det_rel = [g("det") - detq]
    rep.extend("coproduct", nc.verify_homomorphism(A, T, cop))
    rep.extend("coproduct", nc.verify_homomorphism(A, T, cop, relations=det_rel))
    tab = nc.image_table(A, T, cop)
    rep.add("Delta(det_q) = det_q (x) det_q",
            nc.map_poly(detq, T, tab) - T.gen("det_L") * T.gen("det_R"))
    # centrality of the quantum determinant
    for n in G4:
        rep.add(f"[{n}, det_q]", g(n) * detq - detq * g(n))
    # antipode
    gam = _gl_antipode(A)
    rep.extend("antipode", nc.verify_homomorphism(A, A, gam, anti=True))
    rep.extend("antipode", nc.verify_homomorphism(A, A, gam, anti=True, relations=det_rel))
    for i in (1, 2):
        for j in (1, 2):
            lhs = sum((gam[f"g{i}{k}"] * g(f"g{k}{j}") for k in (1, 2)), A.zero())
            rhs = sum((g(f"g{i}{k}") * gam[f"g{k}{j}"] for k in (1, 2)), A.zero())
            unit = A.one() if i == j else A.zero()
            rep.add(f"sum_k gamma(g{i}k) gk{j}", lhs - unit)
            rep.add(f"sum_k g{i}k gamma(gk{j})", rhs - unit)
    # gamma^2 is conjugation by delta^2
    S = build(AlgebraId.SL2q_ext)
    gs = _gl_antipode(S)
    gs["delta"] = S.gen("delta")
    ts = nc.image_table(S, S, gs)
    d2 = S.gen("delta") ** 2
    for n in G4:
        x = S.gen(n)
        twice = nc.map_poly(nc.map_poly(x, S, ts, anti=True), S, ts, anti=True)
        rep.add(f"gamma^2({n}) = delta^2 {n} delta^-2", twice - d2 * x * d2 ** -1)
    # the involution is compatible with the relations
    rep.extend("dagger", nc.verify_homomorphism(
        A, A, {A.names[k]: NCPoly(A, v) for k, v in A.involution[0].items()
               if k in (A.index[n] for n in A.base_generators)},
        anti=True, conjugate_coeffs=True))
    return rep


# ---------------------------------------------------------------------------
# corepresentations, the extended flag algebra and the flag variety

from fractions import Fraction  # noqa: E402

from . import linalg  # noqa: E402
from . import rmatrix as rm  # noqa: E402

GP = ["g1p", "g2p"]
GL_ = ["g1", "g2"]
ZK = ["z1", "z2", "z1p", "z2p"]
MPQ_GENS = Z4 + ["D", "Dp"]
FPQ_GENS = MPQ_GENS + ZK


def _ix(u, v):
    # R-matrix entries are addressed with the corepresentation index first
    return 2 * (v - 1) + (u - 1)


def _right_semidirect(P: Presentation, mode: PMode, s_names=GP):
    """``t_ij s_l = p^(1/2) sum_ab R[ba, lj] s_b t_ia`` (``S'`` a row vector)."""
    R = rm.r12(mode)
    c = mode.p(Fraction(1, 2))
    t = lambda i, j: P.index[f"g{i}{j}"]
    s = lambda l: P.index[s_names[l - 1]]
    rels = []
    for i in (1, 2):
        for j in (1, 2):
            for l in (1, 2):
                terms = {(t(i, j), s(l)): ONE}
                for a in (1, 2):
                    for b in (1, 2):
                        m = R[_ix(a, b), _ix(j, l)]
                        if m:
                            w = (s(b), t(i, a))
                            terms[w] = terms.get(w, ZERO) - c * m
                rels.append(terms)
    P.add_relations(rels)


def _left_semidirect(P: Presentation, mode: PMode, s_names=GL_):
    """``s_k t_ij = p^(1/2) sum_ab R[ki, ba] t_aj s_b`` (``S`` a column vector)."""
    R = rm.r12(mode)
    c = mode.p(Fraction(1, 2))
    t = lambda i, j: P.index[f"g{i}{j}"]
    s = lambda l: P.index[s_names[l - 1]]
    rels = []
    for i in (1, 2):
        for j in (1, 2):
            for k in (1, 2):
                terms = {(s(k), t(i, j)): ONE}
                for a in (1, 2):
                    for b in (1, 2):
                        m = R[_ix(i, k), _ix(a, b)]
                        if m:
                            w = (t(a, j), s(b))
                            terms[w] = terms.get(w, ZERO) - c * m
                rels.append(terms)
    P.add_relations(rels)


# (partial, partial') g = c g (partial, partial')
DD_GRS = {"g11": (_hq(-1), _hq(-1)), "g12": (_hq(-1), _hq(1)),
          "g21": (_hq(1), _hq(-1)), "g22": (_hq(1), _hq(1))}


def _dd_gp(mode):
    h = Fraction(1, 2)
    return {"g1p": (mode.p(-h), mode.p(h) * _hq(-1)), "g2p": (mode.p(-h), mode.p(h) * _hq(1))}


def _corep_involution(P, extra=None):
    img = {"g11": P.gen("g22"), "g12": -P.gen("g21"), "g21": -P.gen("g12"), "g22": P.gen("g11")}
    for a, b in (GP, GL_):
        if a in P.index:
            img[a] = P.gen(b)
            img[b] = -P.gen(a)
    if extra:
        img.update(extra)
    return img


def build_lr_corep(mode: PMode):
    """``R_q x GL(2)_q x L_q`` with the cross relations ``g_k g_l' = p^(1/2) g_l' g_k``.

    Order: g11 < g12 < g21 < g22 < g1 < g2 < g1p < g2p.
    """
    gens = G4 + GL_ + GP
    P = Presentation(f"LR_corep[{mode.value}]", gens)
    _gl_rules(P)
    P.add_qcommutation("g2", "g1", q)
    P.add_qcommutation("g2p", "g1p", q)
    _left_semidirect(P, mode)
    _right_semidirect(P, mode)
    for gp in GP:
        for gk in GL_:
            P.add_qcommutation(gp, gk, mode.p(Fraction(-1, 2)))
    P.pmode = mode
    return _finish(P)


def build_ftilde(mode: PMode):
    """Right corepresentation, quantum group and the degree operators.

    Order: g11 < g12 < g21 < g22 < g1p < g2p < dd < ddp, with ``dd`` and
    ``ddp`` (partial, partial') invertible.  The left generators g1, g2 are the
    expressions :func:`kappa_images`.  Grading: (t-degree, corep degree).
    """
    gens = G4 + GP + ["dd", "ddp"]
    grading = {g: (1, 0) for g in G4}
    grading.update(g1p=(0, 1), g2p=(0, 1), dd=(0, 0), ddp=(0, 0))
    P = Presentation(f"Ftilde[{mode.value}]", gens, invertible=["dd", "ddp"], grading=grading)
    _gl_rules(P)
    P.add_qcommutation("g2p", "g1p", q)
    _right_semidirect(P, mode)
    for g, (a, b) in DD_GRS.items():
        P.add_qcommutation("dd", g, a)
        P.add_qcommutation("ddp", g, b)
    for g, (a, b) in _dd_gp(mode).items():
        P.add_qcommutation("dd", g, a)
        P.add_qcommutation("ddp", g, b)
    P.add_qcommutation("ddp", "dd", mode.p(Fraction(-1, 2)))
    P.pmode = mode
    return _finish(P)


def kappa_images(P: Presentation, mode: PMode) -> dict:
    """``g_r -> p^(-3/4) (-q^(1/2) g_r1 g_2' + q^(-1/2) g_r2 g_1')``."""
    g = P.gen
    c = mode.p(Fraction(-3, 4))
    return {f"g{r}": ((g(f"g{r}1") * g("g2p")).scale(-_hq(1) * c)
                      + (g(f"g{r}2") * g("g1p")).scale(_hq(-1) * c)) for r in (1, 2)}


def commutation_scalar(u: NCPoly, a: NCPoly):
    """``lam`` with ``u a = lam a u``, or ``None`` if there is none."""
    ua, au = u * a, a * u
    if au.is_zero():
        return None
    w, c = au.leading()
    lam = ua.coefficient(w) / c
    return lam if (ua - au.scale(lam)).is_zero() else None


def _half(c: Scalar) -> Scalar:
    """Square root of a monomial ``s^(2k)``."""
    if not c.is_monomial():
        raise ValueError(f"{c} is not a monomial")
    (e, g), = c.num.items()
    if e % 2 or g != 1:
        raise ValueError(f"{c} has no monomial square root")
    return spow(e // 2)


def sym_product(u: NCPoly, a: NCPoly) -> NCPoly:
    """The symmetrized product ``lam^(-1/2) u a`` where ``u a = lam a u``."""
    lam = commutation_scalar(u, a)
    if lam is None:
        raise ValueError("elements do not q-commute")
    return (u * a).scale(_half(lam).inverse())


def fraction(a: NCPoly, u: NCPoly) -> NCPoly:
    """``a / u = c^(-1/2) u^-1 a`` where ``u^-1 a = c a u^-1``."""
    ui = u ** -1
    c = commutation_scalar(ui, a)
    if c is None:
        raise ValueError("elements do not q-commute")
    return (ui * a).scale(_half(c).inverse())


def flag_images(F: Presentation, mode: PMode) -> dict:
    """Images of the flag generators ``z_rs', D, D', z_k, z_k'`` in Ftilde."""
    dd, ddp = F.gen("dd"), F.gen("ddp")
    Delta = (ddp * dd).scale(mode.p(Fraction(1, 4)))
    kap = kappa_images(F, mode)
    out = {z: sym_product(Delta, F.gen(g)) for z, g in zip(Z4, G4)}
    out["D"] = dd * dd
    out["Dp"] = ddp * ddp
    out["z1"] = sym_product(dd, kap["g1"])
    out["z2"] = sym_product(dd, kap["g2"])
    out["z1p"] = sym_product(ddp, F.gen("g1p"))
    out["z2p"] = sym_product(ddp, F.gen("g2p"))
    return out


def sl_homogenize(p: NCPoly) -> NCPoly:
    """Multiply each t-degree piece by powers of det_q to the top t-degree.

    Valid as a zero test modulo ``det_q = 1`` because det_q is central and
    regular; pieces of different parity are left alone.
    """
    P = p.pres
    if not p.terms:
        return p
    detq = P.poly(_detq_terms(P))
    pieces: dict = {}
    for w, c in p.terms.items():
        d = P.multidegree(w)[0]
        pieces.setdefault(d, {})[w] = c
    out = P.zero()
    for par in (0, 1):
        ds = [d for d in pieces if d % 2 == par]
        if not ds:
            continue
        top = max(ds)
        for d in ds:
            out = out + NCPoly(P, pieces[d]) * detq ** ((top - d) // 2)
    return out


def _fpq_presentation(mode: PMode) -> Presentation:
    grading = {z: (1, 0) for z in MPQ_GENS}
    grading.update({z: (0, 1) for z in ZK})
    return Presentation(f"Fpq[{mode.value}]", FPQ_GENS, grading=grading)


def _words_of_bidegree(P: Presentation, bideg):
    gens = [P.index[n] for n in P.base_generators]
    out = []
    for a in gens:
        for b in gens:
            w = (a, b)
            if P.multidegree(w) == bideg:
                out.append(w)
    return out


def derive_flag_relations(mode: PMode, bideg):
    """Basis of the quadratic relations of the flag generators in one bidegree.

    Computed as the kernel of the map from free words into Ftilde modulo
    ``det_q = 1``.  Returns a list of term dicts over the Fpq alphabet.
    """
    F = build(AlgebraId.Ftilde, mode)
    Pf = _fpq_presentation(mode)
    imgs = flag_images(F, mode)
    tab = {Pf.index[n]: imgs[n] for n in FPQ_GENS}
    words = _words_of_bidegree(Pf, bideg)
    vecs = []
    for w in words:
        img = tab[w[0]] * tab[w[1]]
        vecs.append(img)
    # homogenize all images jointly within each parity class
    tdeg = lambda p: {F.multidegree(v)[0] for v in p.terms}
    degs = [tdeg(v) for v in vecs]
    detq = F.poly(_detq_terms(F))
    top = {0: -1, 1: -1}
    for ds in degs:
        for d in ds:
            top[d % 2] = max(top[d % 2], d)
    hom = []
    for v, ds in zip(vecs, degs):
        (d,) = ds  # every image is t-homogeneous
        hom.append((v * detq ** ((top[d % 2] - d) // 2)).terms)
    cols = sorted({c for v in hom for c in v}, key=F.order_key)
    ker = linalg.kernel(hom, cols)
    return [{words[i]: c for i, c in r.items()} for r in ker], Pf


@functools.lru_cache(maxsize=None)
def _fpq_relations(mode):
    rels = []
    Pf = None
    for bideg in ((2, 0), (1, 1), (0, 2)):
        r, Pf = derive_flag_relations(mode, bideg)
        rels.append((bideg, r))
    return rels


def build_fpq(mode: PMode):
    """Flag variety with relations derived from the Ftilde realization."""
    P = _fpq_presentation(mode)
    for _, rels in _fpq_relations(mode):
        P.add_relations(rels)
    P.pmode = mode
    return _finish(P)


_BUILDERS.update({
    AlgebraId.LR_corep: build_lr_corep,
    AlgebraId.Ftilde: build_ftilde,
    AlgebraId.Fpq: build_fpq,
})


# relations of the flag variety as printed, ``(lhs, rhs)`` in the surface syntax
FLAG_COMMUTING = [
    ("z1*z11", "z11*z1"), ("z1*z12", "z12*z1"), ("z2*z21", "z21*z2"), ("z2*z22", "z22*z2"),
    ("z1p*z11", "z11*z1p"), ("z1p*z21", "z21*z1p"), ("z2p*z12", "z12*z2p"),
    ("z2p*z22", "z22*z2p"),
]
FLAG_MIXED_PRINTED = [
    ("z1*z21", "p*q*z21*z1 + (1 - p*q)*z11*z2"),
    ("z1*z22", "p*q*z22*z1 + (1 - p*q)*z12*z2"),
    ("z2*z11", "p*q^-1*z11*z2 + (1 - p*q^-1)*z21*z1"),
    ("z2*z12", "p*q^-1*z22*z2 + (1 - p*q^-1)*z22*z1"),
    ("z1p*z12", "p^-1*q*z12*z1p + (1 - p^-1*q)*z11*z2p"),
    ("z1p*z12", "p^-1*q*z22*z1p + (1 - p^-1*q)*z21*z2p"),
    ("z2p*z11", "p^-1*q^-1*z11*z2p + (1 - p^-1*q^-1)*z12*z1p"),
    ("z2p*z21", "p^-1*q^-1*z21*z2p + (1 - p^-1*q^-1)*z22*z1p"),
]
# the fourth and sixth mixed relations, rebuilt from the realization
FLAG_MIXED = list(FLAG_MIXED_PRINTED)
FLAG_MIXED[3] = ("z2*z12", "p*q^-1*z12*z2 + (1 - p*q^-1)*z22*z1")
FLAG_MIXED[5] = ("z1p*z22", "p^-1*q*z22*z1p + (1 - p^-1*q)*z21*z2p")
FLAG_WEIGHTS = [
    ("D*z1", "p^-1*q^-1*z1*D"), ("D*z2", "p^-1*q*z2*D"), ("D*z1p", "z1p*D"), ("D*z2p", "z2p*D"),
    ("Dp*z1", "z1*Dp"), ("Dp*z2", "z2*Dp"), ("Dp*z1p", "p*q^-1*z1p*Dp"),
    ("Dp*z2p", "p*q*z2p*Dp"),
]
FLAG_INCIDENCE = [
    ("D*z1p", "p*(z11*z2 - z21*z1)"), ("D*z2p", "p*(z12*z2 - z22*z1)"),
    ("Dp*z1", "p^-1*(-z11*z2p + z12*z1p)"), ("Dp*z2", "p^-1*(-z21*z2p + z22*z1p)"),
]
# partial g_k = c g_k partial as printed: (generator, exponent of p, exponent of q), halves
DD_GK_PRINTED = {"g1": (1, -1), "g2": (-1, 1)}


def _flag_context(mode):
    F = build(AlgebraId.Ftilde, mode)
    Pf = _fpq_presentation(mode)
    imgs = flag_images(F, mode)
    return F, Pf, imgs, nc.image_table(Pf, F, imgs)


def verify_flag_realization(mode: PMode | None = None) -> StructureReport:
    modes = [mode] if mode else list(PMode)
    rep = StructureReport("flag_realization")
    for m in modes:
        _flag_realization_one(m, rep)
    return rep


def _flag_realization_one(mode: PMode, rep: StructureReport):
    tag = f"[{mode.value}]"
    F, Pf, imgs, tab = _flag_context(mode)
    g = F.gen
    half = mode.p(Fraction(1, 2))
    kap = kappa_images(F, mode)
    # the left corepresentation relation and g.commut follow from kappa
    rep.add(f"{tag} g1*g2 = q^-1 g2*g1", kap["g1"] * kap["g2"] - (kap["g2"] * kap["g1"]).scale(qi))
    for k in GL_:
        for l in GP:
            rep.add(f"{tag} {k}*{l} = p^(1/2) {l}*{k}", kap[k] * g(l) - (g(l) * kap[k]).scale(half))
    LR = build(AlgebraId.LR_corep, mode)
    kimgs = {n: g(n) for n in G4 + GP}
    kimgs.update(kap)
    rep.extend(f"{tag} kappa", nc.verify_homomorphism(LR, F, kimgs))
    # relations of Mpq, modulo det_q = 1
    M = build(AlgebraId.Mpq, mode)
    mt = nc.image_table(M, F, {n: imgs[n] for n in MPQ_GENS})
    for rule in M.rules:
        r = NCPoly(M, {rule.lhs: ONE}) - rule.rhs
        rep.add(f"{tag} Mpq: {rule}", sl_homogenize(nc.map_poly(r, F, mt)))
    # printed flag relations
    for n1, a in enumerate(ZK):
        for b in ZK[n1 + 1:]:
            rep.add(f"{tag} [{a}, {b}]", imgs[a] * imgs[b] - imgs[b] * imgs[a])
    for group, rels in (("commuting", FLAG_COMMUTING), ("mixed", FLAG_MIXED), ("weights", FLAG_WEIGHTS),
                        ("incidence", FLAG_INCIDENCE)):
        for lhs, rhs in rels:
            r = _raw_rel(Pf, lhs, rhs, mode)
            rep.add(f"{tag} ({group}) {lhs} = {rhs}", sl_homogenize(nc.map_poly(r, F, tab)))
    # the derived presentation is exactly the printed one
    Fq = build(AlgebraId.Fpq, mode)
    for group, rels in (("commuting", FLAG_COMMUTING), ("mixed", FLAG_MIXED),
                        ("weights", FLAG_WEIGHTS), ("incidence", FLAG_INCIDENCE)):
        for lhs, rhs in rels:
            rep.add(f"{tag} Fpq ({group}) {lhs} = {rhs}", Fq.parse(lhs, mode) - Fq.parse(rhs, mode))
    mixed = [_raw_rel(Pf, l, r, mode).terms for grp in (FLAG_COMMUTING, FLAG_MIXED,
                                                        FLAG_WEIGHTS, FLAG_INCIDENCE)
             for l, r in grp]
    n11 = dict(_fpq_relations(mode))[(1, 1)]
    cols = sorted({w for v in mixed for w in v}, key=Pf.order_key)
    rk = linalg.rank(mixed, cols)
    rep.add_flag(f"{tag} printed (1,1) relations span the derived ones", rk == len(n11),
                 f"rank {rk} vs {len(n11)}")
    # the patch coordinates are fractions by D and D'
    MI, MJ = build(AlgebraId.MIq), build(AlgebraId.MJq)
    D, Dp = imgs["D"], imgs["Dp"]
    xs = {x: fraction(imgs[z], D) for x, z in zip(X4, Z4)}
    ys = {y: fraction(imgs[z], Dp) for y, z in zip(Y4, Z4)}
    rep.extend(f"{tag} z/D", nc.verify_homomorphism(MI, F, xs))
    rep.extend(f"{tag} z/D'", nc.verify_homomorphism(MJ, F, ys))
    d2 = fraction(Dp, D)
    for k, n in enumerate(G4):
        lam = commutation_scalar(d2, g(n))
        ok = lam is not None and lam == DELTA_G[k] ** 2
        rep.add_flag(f"{tag} D'/D {n} = delta^2 {n} weight", ok, f"weight {lam}")
    return rep


def _raw_rel(P: Presentation, lhs: str, rhs: str, mode):
    """Relation ``lhs - rhs`` over the free alphabet of ``P`` (no rewriting)."""
    from .expr import parse_terms

    a = parse_terms(lhs, P, mode)
    b = parse_terms(rhs, P, mode)
    out = dict(a)
    for w, c in b.items():
        v = out.get(w, ZERO) - c
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return NCPoly(P, out)


def flag_discrepancies(mode: PMode | None = None) -> StructureReport:
    """Printed lines that the realization does not satisfy, with corrections.

    Covers the partial-g_k weights and the mixed z_k z_rs' relations.
    """
    modes = [mode] if mode else list(PMode)
    rep = StructureReport("flag_discrepancies")
    for m in modes:
        tag = f"[{m.value}]"
        F, Pf, imgs, tab = _flag_context(m)
        kap = kappa_images(F, m)
        for k, (ep, eq) in DD_GK_PRINTED.items():
            lam = commutation_scalar(F.gen("dd"), kap[k])
            printed = m.p(Fraction(ep, 2)) * _hq(eq)
            rep.add_flag(f"{tag} partial {k} = ({printed}) {k} partial", lam == printed,
                         f"realization gives {lam}")
        for (lhs, rhs), (clhs, crhs) in zip(FLAG_MIXED_PRINTED, FLAG_MIXED):
            r = _raw_rel(Pf, lhs, rhs, m)
            ok = sl_homogenize(nc.map_poly(r, F, tab)).is_zero()
            rep.add_flag(f"{tag} (mixed) {lhs} = {rhs}", ok, f"replaced by {clhs} = {crhs}")
    return rep


TWISTOR_COORDINATES = ("left", "symmetric")


def verify_twistor_patches(mode: PMode | None = None, coordinates: str = "left") -> StructureReport:
    """The affine twistor coordinates of both patches commute pairwise.

    ``coordinates="left"`` embeds the patch generators as ``D^-1 z`` and
    ``D'^-1 z``; with these, the incidence relations identify the mixed generators
    with multiples of ``z1', z2'`` and ``z1, z2``.  ``"symmetric"`` uses the
    normalized fractions of :func:`fraction`, which differ by a row scaling
    and do not give commuting generators.
    """
    if coordinates not in TWISTOR_COORDINATES:
        raise ValueError(f"coordinates must be one of {TWISTOR_COORDINATES}")
    modes = [mode] if mode else list(PMode)
    rep = StructureReport(f"twistor_patches[{coordinates}]")
    for m in modes:
        tag = f"[{m.value}]"
        F, Pf, imgs, _ = _flag_context(m)
        if coordinates == "left":
            Di, Dpi = imgs["D"] ** -1, imgs["Dp"] ** -1
            x = {n: Di * imgs[z] for n, z in zip(X4, Z4)}
            y = {n: Dpi * imgs[z] for n, z in zip(Y4, Z4)}
        else:
            x = {n: fraction(imgs[z], imgs["D"]) for n, z in zip(X4, Z4)}
            y = {n: fraction(imgs[z], imgs["Dp"]) for n, z in zip(Y4, Z4)}
        MI, MJ = build(AlgebraId.MIq), build(AlgebraId.MJq)
        rep.extend(f"{tag} x", nc.verify_homomorphism(MI, F, x))
        rep.extend(f"{tag} y", nc.verify_homomorphism(MJ, F, y))
        z1, z2, z1p, z2p = (imgs[n] for n in ZK)
        patches = {
            "I": [("z1", z1), ("z2", z2),
                  ("x11*z2 - x21*z1", x["x11"] * z2 - x["x21"] * z1),
                  ("x12*z2 - x22*z1", x["x12"] * z2 - x["x22"] * z1)],
            "J": [("y12*z1p - y11*z2p", y["y12"] * z1p - y["y11"] * z2p),
                  ("y22*z1p - y21*z2p", y["y22"] * z1p - y["y21"] * z2p),
                  ("z1p", z1p), ("z2p", z2p)],
        }
        for name, gens in patches.items():
            for i, (la, a) in enumerate(gens):
                for lb, b in gens[i + 1:]:
                    rep.add(f"{tag} {name}: [{la}, {lb}]", a * b - b * a)
    return rep


def _sphere_images(src: Presentation, dst: Presentation):
    g = dst.gen
    img = {"z11": g("z22"), "z12": -g("z21"), "z21": -g("z12"), "z22": g("z11"),
           "D": g("D"), "Dp": g("Dp")}
    if "z1" in src.index:
        img.update(z1=g("z2"), z2=-g("z1"), z1p=g("z2p"), z2p=-g("z1p"))
    return img


def verify_sphere_involution() -> StructureReport:
    """The involution maps the p=q algebras onto the p=q^-1 ones and back."""
    rep = StructureReport("sphere_involution")
    for aid in (AlgebraId.Mpq, AlgebraId.Fpq):
        for m in PMode:
            A, B = build(aid, m), build(aid, m.other)
            imgs = _sphere_images(A, B)
            rep.extend(f"{A.name} -> {B.name}",
                       nc.verify_homomorphism(A, B, imgs, anti=True, conjugate_coeffs=True))
            # applying it twice is the identity
            ta, tb = nc.image_table(A, B, imgs), nc.image_table(B, A, _sphere_images(B, A))
            for n in A.base_generators:
                back = nc.map_poly(nc.map_poly(A.gen(n), B, ta, anti=True, conjugate_coeffs=True),
                                   A, tb, anti=True, conjugate_coeffs=True)
                sign = -1 if n in ("z1", "z2", "z1p", "z2p") else 1
                rep.add(f"{A.name}: ({n})^dagger^dagger = {'-' if sign < 0 else ''}{n}",
                        back - A.gen(n).scale(sign))
    for m in PMode:
        A, B = build(AlgebraId.Ftilde, m), build(AlgebraId.Ftilde, m.other)
        g = B.gen
        imgs = {"g11": g("g22"), "g12": -g("g21"), "g21": -g("g12"), "g22": g("g11"),
                "g1p": g("g2p"), "g2p": -g("g1p"), "dd": g("dd"), "ddp": g("ddp")}
        rep.extend(f"{A.name} -> {B.name}",
                   nc.verify_homomorphism(A, B, imgs, anti=True, conjugate_coeffs=True))
    return rep
