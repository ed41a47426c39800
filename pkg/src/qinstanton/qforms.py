"""Differential forms of degree at most two over the catalog algebras.

A :class:`DGAPresentation` adjoins one degree-1 letter ``d_<name>`` per base
generator.  Words are ordered so that every normal form carries its
differentials rightmost, in base generator order; the 2-form normal words of a
patch are therefore the six increasing pairs ``d_a*d_b``.

The graded rules come from matrix relations of the shape::

    R T_1 dT_2 = dT_2 T_1 R21^-1        R dT_1 dT_2 = -dT_2 dT_1 R21^-1

with ``(R, R21)`` the R-matrix pair of the patch.  Only form degrees 0, 1, 2
are certified: rules are homogeneous in form degree, so the confluence check
skips overlap words of higher form degree.
"""
from __future__ import annotations

import enum
import functools
import random
from dataclasses import dataclass

from . import ncengine as nc
from . import rmatrix as rm
from .ncengine import NCPoly, Presentation
from .qalgebras import (DELTA_G, G4, X4, Y4, AlgebraId, StructureReport, _delta_rules,
                        _gl_rules, build)
from .scalar import ONE, ZERO, PMode, as_scalar

__all__ = [
    "Patch",
    "DGAPresentation",
    "FormElement",
    "FormDegreeError",
    "build_dga",
    "derham",
    "hodge_star",
    "decompose_2form",
    "sd_basis",
    "asd_basis",
    "printed_basis",
    "eigenbasis",
    "coordinates",
    "form_dagger",
    "verify_form_modules",
    "verify_hodge",
    "leibniz_consistency",
]

D_PREFIX = "d_"


class FormDegreeError(ValueError):
    pass


class Patch(enum.Enum):
    GL = "GL"
    GLext = "GLext"
    MI = "MI"
    MJ = "MJ"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip()
        aliases = {"I": "MI", "J": "MJ", "MIQ": "MI", "MJQ": "MJ", "GL2Q": "GL"}
        key = aliases.get(key.upper(), key)
        for m in cls:
            if m.value.upper() == key.upper():
                return m
        raise ValueError(f"unknown patch {text!r}")


_MATRIX_NAMES = {Patch.GL: G4, Patch.GLext: G4, Patch.MI: X4, Patch.MJ: Y4}


def dname(name: str) -> str:
    return D_PREFIX + name


@dataclass(frozen=True)
class FormElement:
    """Polynomial of a :class:`DGAPresentation`, homogeneous in form degree."""

    dga: "DGAPresentation"
    poly: NCPoly
    degree: int

    def __post_init__(self):
        for w in self.poly.terms:
            if self.dga.form_degree(w) != self.degree:
                raise FormDegreeError(f"{self.poly} is not homogeneous of form degree {self.degree}")

    def _check(self, other):
        if not isinstance(other, FormElement) or other.dga is not self.dga:
            raise TypeError("forms of different algebras")

    def __add__(self, other):
        self._check(other)
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise FormDegreeError("sum of forms of different degree")
        deg = self.degree if not self.is_zero() else other.degree
        return FormElement(self.dga, self.poly + other.poly, deg)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FormElement(self.dga, -self.poly, self.degree)

    def scale(self, c):
        return FormElement(self.dga, self.poly.scale(as_scalar(c)), self.degree)

    def __mul__(self, other):
        if isinstance(other, FormElement):
            self._check(other)
            return FormElement(self.dga, self.poly * other.poly, self.degree + other.degree)
        return self.scale(other)

    __rmul__ = scale

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __eq__(self, other):
        if not isinstance(other, FormElement):
            return NotImplemented
        return self.dga is other.dga and (self.poly - other.poly).is_zero()

    def __hash__(self):
        return hash((id(self.dga), tuple(sorted(self.poly.terms.items(), key=repr))))

    def __str__(self):
        return str(self.poly)

    __repr__ = __str__


class DGAPresentation:
    """Forms of degree <= 2 over a base presentation."""

    def __init__(self, patch: Patch, mode: PMode, pres: Presentation, base: Presentation,
                 R: rm.RMat, R21: rm.RMat, matrix_names):
        self.patch = patch
        self.mode = mode
        self.pres = pres
        self.base = base
        self.R = R
        self.R21 = R21
        self.matrix_names = list(matrix_names)
        self.dnames = {n: dname(n) for n in base.base_generators}
        self.d_index = {pres.index[n]: pres.index[dn] for n, dn in self.dnames.items()}
        self.d_letters = frozenset(self.d_index.values())
        self.inverse_of = {pres.index[nc._inv_name(n)]: pres.index[n]
                           for n in base.invertible_names}

    @property
    def name(self):
        return self.pres.name

    def form_degree(self, w) -> int:
        return sum(1 for a in w if a in self.d_letters)

    def element(self, p, degree=None) -> FormElement:
        if isinstance(p, str):
            p = self.pres.parse(p, self.mode)
        elif not isinstance(p, NCPoly):
            p = self.pres.poly(p)
        if degree is None:
            degs = {self.form_degree(w) for w in p.terms}
            if len(degs) > 1:
                raise FormDegreeError(f"{p} mixes form degrees {sorted(degs)}")
            degree = degs.pop() if degs else 0
        return FormElement(self, p, degree)

    def gen(self, name) -> FormElement:
        return self.element(self.pres.gen(name))

    def d(self, name) -> FormElement:
        return self.element(self.pres.gen(dname(name)))

    def dmatrix(self):
        return [[self.pres.gen(dname(self.matrix_names[2 * r + c])) for c in range(2)]
                for r in range(2)]

    def matrix(self):
        return [[self.pres.gen(self.matrix_names[2 * r + c]) for c in range(2)] for r in range(2)]

    def pair_words(self):
        """The six normal 2-form words ``d_a*d_b`` with ``a < b``."""
        ds = [self.pres.index[dname(n)] for n in self.matrix_names]
        return [(ds[i], ds[j]) for i in range(4) for j in range(i + 1, 4)]

    def pair_str(self, w) -> str:
        return "*".join(self.pres.names[a] for a in w)

    def __repr__(self):
        return f"DGAPresentation({self.patch.value}, {self.mode.value})"


def _free_copy(P: Presentation) -> Presentation:
    """Same alphabet and order without rules (for unreduced expansions)."""
    F = Presentation(P.name + "_free", P.base_generators, invertible=P.invertible_names,
                     weights=P._raw_weights or None)
    return F


def _relation_pair(patch: Patch, mode: PMode):
    Rs = rm.build_rmatrices(mode)
    if patch in (Patch.GL, Patch.GLext):
        return Rs.R12, Rs.R21
    if patch is Patch.MI:
        return Rs.RI, Rs.RI21
    return Rs.RJ, Rs.RJ21


def _base_of(patch: Patch) -> Presentation:
    if patch is Patch.GL:
        return build(AlgebraId.GL2q)
    if patch is Patch.MI:
        return build(AlgebraId.MIq)
    if patch is Patch.MJ:
        return build(AlgebraId.MJq)
    P = Presentation("GL2q_delta", G4 + ["delta"], invertible=["delta"],
                     grading={"g11": (1,), "g12": (1,), "g21": (1,), "g22": (1,),
                              "delta": (0,)})
    _gl_rules(P)
    _delta_rules(P, G4, DELTA_G)
    return nc.complete(P, 4)


def _expand(R, M, N, F: Presentation, sign, Rp):
    return rm.expand_matrix_relation(R, M, N, F, sign=sign, Rprime=Rp)


@functools.lru_cache(maxsize=None)
def build_dga(patch, mode: PMode = PMode.P_EQ_Q) -> DGAPresentation:
    patch = Patch.parse(patch)
    base = _base_of(patch)
    names = list(base.base_generators)
    dn = [dname(n) for n in names]
    grading = {}
    for n in names:
        v = base.grading[base.index[n]]
        grading[n] = tuple(v) + (0,)
        grading[dname(n)] = tuple(v) + (1,)
    P = Presentation(f"Omega_{patch.value}[{mode.value}]", names + dn,
                     invertible=base.invertible_names, grading=grading)
    for lhs, rhs in base._rules.items():
        if lhs not in P._rules:
            P._install(lhs, dict(rhs), check=True)
    R, R21 = _relation_pair(patch, mode)
    R21i = R21.inverse()
    mats = _MATRIX_NAMES[patch]
    F = _free_copy(P)
    T = rm.GeneratorMatrix([[mats[0], mats[1]], [mats[2], mats[3]]])
    dT = rm.GeneratorMatrix([[dname(mats[0]), dname(mats[1])], [dname(mats[2]), dname(mats[3])]])
    one_forms = _expand(R, T, dT, F, 1, R21i)
    two_forms = _expand(R, dT, dT, F, -1, R21i)
    P.add_relations([P.poly(r.terms) for r in one_forms])
    P.add_relations([P.poly(r.terms) for r in two_forms])
    if patch is Patch.GLext:
        for g, c in zip(G4, DELTA_G):
            P.add_qcommutation(dname(g), "delta", c.inverse())
            P.add_qcommutation("d_delta", g, c)
            P.add_qcommutation("d_delta", dname(g), -c)
        P.add_qcommutation("d_delta", "delta", ONE)
        P.add_rule(["d_delta", "d_delta"], {})
    dga = DGAPresentation(patch, mode, P, base, R, R21, mats)
    accept = lambda w: dga.form_degree(w) <= 2  # noqa: E731
    C = nc.complete(P, 4, accept=accept)
    C.name = P.name
    dga.pres = C
    if patch is not Patch.GLext:
        _install_form_involution(dga)
    return dga


# -- de Rham operator ----------------------------------------------------------


def _d_word(dga: DGAPresentation, w, c) -> dict:
    """Graded Leibniz expansion of ``d`` on one word (unreduced)."""
    out: dict = {}
    P = dga.pres
    sign = ONE
    for k, a in enumerate(w):
        if a in dga.d_letters:
            sign = -sign
            continue
        pre, post = w[:k], w[k + 1:]
        if a in dga.d_index:
            pieces = [((dga.d_index[a],), ONE)]
        elif a in dga.inverse_of:
            b = dga.inverse_of[a]
            # d(b^-1) = -b^-1 db b^-1
            pieces = [((a, dga.d_index[b], a), -ONE)]
        else:
            raise FormDegreeError(f"no differential for {P.names[a]}")
        for mid, cm in pieces:
            nw = pre + mid + post
            v = out.get(nw, ZERO) + sign * cm * c
            if v:
                out[nw] = v
            else:
                out.pop(nw, None)
    return out


def derham(f: FormElement) -> FormElement:
    """``d`` on forms of degree 0 or 1, with ``d(d_g) = 0``."""
    if f.degree >= 2:
        raise FormDegreeError("d is modeled only on forms of degree 0 and 1")
    dga = f.dga
    acc: dict = {}
    for w, c in f.poly.terms.items():
        for v, cv in _d_word(dga, w, c).items():
            val = acc.get(v, ZERO) + cv
            if val:
                acc[v] = val
            else:
                acc.pop(v, None)
    return FormElement(dga, dga.pres.poly(acc), f.degree + 1)


def derham_raw(dga: DGAPresentation, terms: dict) -> NCPoly:
    """``d`` applied to an unreduced terms dict, then normalized."""
    acc: dict = {}
    for w, c in terms.items():
        for v, cv in _d_word(dga, tuple(w), as_scalar(c)).items():
            val = acc.get(v, ZERO) + cv
            if val:
                acc[v] = val
            else:
                acc.pop(v, None)
    return dga.pres.poly(acc)


# -- Hodge star ----------------------------------------------------------------


def _pair_matrix(dga: DGAPresentation):
    """Raw words of the 4x4 matrix ``dX_1 dX_2``."""
    F = _free_copy(dga.pres)
    dM = rm.GeneratorMatrix([[dname(dga.matrix_names[2 * r + c]) for c in range(2)]
                             for r in range(2)]).resolve(F)
    M1 = rm._embed_poly(dM, F, 1)
    M2 = rm._embed_poly(dM, F, 2)
    E = rm._mm(M1, M2, F)
    out = []
    for row in E:
        r = []
        for e in row:
            (w, c), = e.terms.items()
            assert c.is_one()
            r.append(w)
        out.append(r)
    return out


@functools.lru_cache(maxsize=None)
def _star_table(dga: DGAPresentation):
    """``*`` on all sixteen raw pair words, as normalized terms."""
    E = _pair_matrix(dga)
    Pp, Pm = rm.build_projectors(dga.R, dga.mode)
    S = Pp - Pm
    table = {}
    for r in range(4):
        for c in range(4):
            acc: dict = {}
            for e in range(4):
                k = S[r, e]
                if k:
                    w = E[e][c]
                    acc[w] = acc.get(w, ZERO) + k
            table[E[r][c]] = dga.pres.normalize_terms(acc)
    return table


@functools.lru_cache(maxsize=None)
def _projector_images(dga: DGAPresentation, sign: int):
    """Normalized entries of ``P+ dX_1 dX_2`` (sign +1) or ``P- dX_1 dX_2``."""
    E = _pair_matrix(dga)
    Pp, Pm = rm.build_projectors(dga.R, dga.mode)
    Pr = Pp if sign > 0 else Pm
    out = []
    for r in range(4):
        for c in range(4):
            acc: dict = {}
            for e in range(4):
                k = Pr[r, e]
                if k:
                    acc[E[e][c]] = acc.get(E[e][c], ZERO) + k
            out.append(dga.pres.poly(acc))
    return out


def _check_two_form(w: FormElement):
    if not isinstance(w, FormElement):
        raise TypeError("expected a FormElement")
    if w.degree != 2 and not w.is_zero():
        raise FormDegreeError(f"expected a 2-form, got form degree {w.degree}")


def _hodge_patch_check(w: FormElement, patch):
    if patch is not None and Patch.parse(patch) is not w.dga.patch:
        raise ValueError(f"form lives on {w.dga.patch.value}, not {Patch.parse(patch).value}")
    if w.dga.patch is Patch.GLext:
        raise ValueError("the Hodge operator is defined on GL, MI and MJ")


def hodge_star(w: FormElement, patch=None) -> FormElement:
    """``* = P+ - P-`` acting on the differential pair of each normal term."""
    _check_two_form(w)
    _hodge_patch_check(w, patch)
    dga = w.dga
    table = _star_table(dga)
    acc: dict = {}
    for word, c in w.poly.terms.items():
        k = len(word) - 2
        head, pair = word[:k], word[k:]
        if pair not in table:
            raise FormDegreeError(f"term {dga.pres.word_str(word)} is not in 2-form normal form")
        for v, cv in table[pair].items():
            nw = head + v
            val = acc.get(nw, ZERO) + c * cv
            if val:
                acc[nw] = val
            else:
                acc.pop(nw, None)
    return FormElement(dga, dga.pres.poly(acc), 2)


def _basis(dga: DGAPresentation, sign: int):
    a, b, c, d = (dga.pres.gen(dname(n)) for n in dga.matrix_names)
    if sign > 0:
        polys = [a * b, c * d, a * d - b * c]
    else:
        polys = [a * c, b * d, a * d + b * c]
    return [FormElement(dga, p, 2) for p in polys]


def printed_basis(dga: DGAPresentation, kind: str):
    """Classical-looking bases in the patch letters.

    ``sd``: ``d11 d12, d21 d22, d11 d22 - d12 d21``;
    ``asd``: ``d11 d21, d12 d22, d11 d22 + d12 d21``.
    """
    return _basis(dga, 1 if kind == "sd" else -1)


@functools.lru_cache(maxsize=None)
def eigenbasis(dga: DGAPresentation, kind: str):
    """Row-reduced basis of the span of the ``P+`` (``sd``) or ``P-`` (``asd``) entries."""
    from . import linalg

    imgs = _projector_images(dga, 1 if kind == "sd" else -1)
    order = dga.pair_words()
    ech = linalg.row_reduce([i.terms for i in imgs], order)
    return tuple(FormElement(dga, dga.pres.poly(row), 2) for _, row in ech)


def sd_basis(dga: DGAPresentation):
    return list(eigenbasis(dga, "sd"))


def asd_basis(dga: DGAPresentation):
    return list(eigenbasis(dga, "asd"))


def same_span(a, b, dga: DGAPresentation) -> bool:
    from . import linalg

    order = dga.pair_words()
    A = [x.poly.terms for x in a]
    B = [x.poly.terms for x in b]
    return (all(linalg.in_span(v, B, order) for v in A)
            and all(linalg.in_span(v, A, order) for v in B))


def _coordinates(w: FormElement, basis):
    """Left coefficients of ``w`` over a basis of 2-forms, or None."""
    dga = w.dga
    pairs = dga.pair_words()
    # split by degree-0 prefix; each basis element is scalar on the six pairs
    by_head: dict = {}
    for word, c in w.poly.terms.items():
        head, pair = word[:-2], word[-2:]
        by_head.setdefault(head, {})[pair] = c
    vecs = [b.poly.terms for b in basis]
    out = [dict() for _ in basis]
    for head, vec in by_head.items():
        sol = _solve(vec, vecs, pairs)
        if sol is None:
            return None
        for k, v in sol.items():
            out[k][head] = v
    return [dga.element(dga.pres.poly(t), 0) for t in out]


def _solve(target, vecs, order):
    from . import linalg

    return linalg.solve_combination(target, vecs, order)


def decompose_2form(w: FormElement, patch=None):
    """``(sd, asd)`` with ``w = sd + asd``, ``*sd = sd`` and ``*asd = -asd``."""
    _check_two_form(w)
    dga = w.dga
    if w.is_zero():
        z = FormElement(dga, dga.pres.zero(), 2)
        return z, z
    _hodge_patch_check(w, patch)
    s = hodge_star(w)
    half = as_scalar("1/2")
    return (w + s).scale(half), (w - s).scale(half)


def coordinates(w: FormElement, kind: str, printed: bool = False):
    """Degree-0 coefficients of ``w`` on an SD or ASD basis, or None.

    The default basis is :func:`eigenbasis`; ``printed=True`` uses
    :func:`printed_basis`.
    """
    basis = printed_basis(w.dga, kind) if printed else list(eigenbasis(w.dga, kind))
    return _coordinates(w, basis)


# -- involution on forms ---------------------------------------------------------


def _install_form_involution(dga: DGAPresentation):
    base = dga.base
    if base.involution is None:
        return
    table, conj = base.involution
    P = dga.pres
    img = {}
    for n in base.base_generators:
        a = base.index[n]
        img[P.index[n]] = dict(table[a])
        # d commutes with the involution on generators
        dimg = {}
        for w, c in table[a].items():
            for v, cv in _d_word(dga, w, c).items():
                dimg[v] = dimg.get(v, ZERO) + cv
        img[P.index[dname(n)]] = {w: c for w, c in dimg.items() if c}
    for a, b in base.inverse.items():
        img[P.index[base.names[a]]] = dict(table[a])
    dga.involution = (img, conj)


def form_dagger(w: FormElement) -> FormElement:
    """Graded anti-linear involution: ``(a b)^+ = (-1)^{|a||b|} b^+ a^+``."""
    dga = w.dga
    if getattr(dga, "involution", None) is None:
        raise ValueError(f"no involution on {dga.name}")
    table, conj = dga.involution
    P = dga.pres
    acc: dict = {}
    for word, c in w.poly.terms.items():
        k = dga.form_degree(word)
        sgn = -ONE if (k * (k - 1) // 2) % 2 else ONE
        img = nc._image_of_word(word, table, P, True, conj, c * sgn)
        for v, cv in img.items():
            val = acc.get(v, ZERO) + cv
            if val:
                acc[v] = val
            else:
                acc.pop(v, None)
    return FormElement(dga, P.poly(acc), w.degree)


# -- verification ------------------------------------------------------------------


def specialize_form(w: FormElement, s0=1) -> dict:
    """Coefficients at ``s = s0`` keyed by word strings (for classical limits)."""
    out = {}
    for word, c in w.poly.terms.items():
        v = c.specialize(s0)
        if v:
            out[w.dga.pres.word_str(word)] = v
    return out


def _rule_residual(P: Presentation, rule):
    terms = {rule.lhs: ONE}
    for w, c in rule.rhs.terms.items():
        terms[w] = terms.get(w, ZERO) - c
    return terms


def _three_slot(M, pos, F):
    """Embed a 2x2 polynomial matrix into slot ``pos`` (1, 2 or 3) of 8x8."""
    Z = F.zero()
    out = [[Z] * 8 for _ in range(8)]
    # Kronecker index (i3, i2, i1); slot 1 is the rightmost factor
    for r in range(8):
        for c in range(8):
            ri = ((r >> 2) & 1, (r >> 1) & 1, r & 1)
            ci = ((c >> 2) & 1, (c >> 1) & 1, c & 1)
            k = 3 - pos
            if all(ri[t] == ci[t] for t in range(3) if t != k):
                out[r][c] = M[ri[k]][ci[k]]
    return out


def _scalar_three_slot(R: rm.RMat, a, b):
    """4x4 scalar matrix acting on slots ``a`` (outer index) and ``b``."""
    out = [[ZERO] * 8 for _ in range(8)]
    for r in range(8):
        for c in range(8):
            ri = {3: (r >> 2) & 1, 2: (r >> 1) & 1, 1: r & 1}
            ci = {3: (c >> 2) & 1, 2: (c >> 1) & 1, 1: c & 1}
            rest = [t for t in (1, 2, 3) if t not in (a, b)][0]
            if ri[rest] != ci[rest]:
                continue
            out[r][c] = R[2 * ri[a] + ri[b], 2 * ci[a] + ci[b]]
    return rm.RMat(out)


def three_slot_identity(dga: DGAPresentation):
    """Entries of ``dT3 dT2 T1 - (R12 R13) T1 dT3 dT2 (R31 R21)`` (all should vanish).

    In the two-slot convention ``R`` acts on (slot 2, slot 1); ``R21`` is the
    companion matrix of the patch, and ``R31`` its copy on slots (1, 3).
    """
    P = dga.pres
    T = dga.matrix()
    dT = dga.dmatrix()
    T1 = _three_slot(T, 1, P)
    dT2 = _three_slot(dT, 2, P)
    dT3 = _three_slot(dT, 3, P)
    R12 = _scalar_three_slot(dga.R, 2, 1)
    R13 = _scalar_three_slot(dga.R, 3, 1)
    R21 = _scalar_three_slot(dga.R21, 2, 1)
    R31 = _scalar_three_slot(dga.R21, 3, 1)
    L = rm._mm(rm._mm(dT3, dT2, P), T1, P)
    A = [list(r) for r in (R12 @ R13).rows]
    B = [list(r) for r in (R31 @ R21).rows]
    Rt = rm._mm(rm._mm(rm._mm(rm._mm(A, T1, P), dT3, P), dT2, P), B, P)
    return [L[i][j] - Rt[i][j] for i in range(8) for j in range(8)]


def _two_slot_check(dga: DGAPresentation):
    """The defining matrix relations, re-expanded inside the completed DGA."""
    P = dga.pres
    R21i = dga.R21.inverse()
    T, dT = dga.matrix(), dga.dmatrix()
    one = rm.expand_matrix_relation(dga.R, T, dT, P, sign=1, Rprime=R21i)
    two = rm.expand_matrix_relation(dga.R, dT, dT, P, sign=-1, Rprime=R21i)
    return one, two


def _realization_images(mode: PMode, patch: Patch):
    from .qalgebras import X_OF_G, Y_OF_G

    E = build_dga(Patch.GLext, mode).pres
    d = E.gen("delta")
    dd = d if patch is Patch.MI else d ** -1
    names = X4 if patch is Patch.MI else Y4
    coef = X_OF_G if patch is Patch.MI else Y_OF_G
    img = {}
    for n, g, c in zip(names, G4, coef):
        img[n] = (dd * E.gen(g)).scale(c)
        img[dname(n)] = (dd * E.gen(dname(g))).scale(c)
    return E, img


def verify_form_modules(mode: PMode | None = None) -> StructureReport:
    """Matrix-form relations, d, the three-slot identity and the form involution."""
    modes = [mode] if mode else list(PMode)
    rep = StructureReport("form_modules")
    for m in modes:
        tag = f"[{m.value}]"
        for patch in (Patch.GL, Patch.MI, Patch.MJ):
            dga = build_dga(patch, m)
            P = dga.pres
            pt = f"{tag} {patch.value}"
            a, b = rm.hecke_residuals(dga.R, m, dga.R21)
            rep.add_flag(f"{pt} Hecke pair (R, R21)", a.is_zero() and b.is_zero())
            rep.add_flag(f"{pt} confluent in form degree <= 2", P.confluent and not P.added_rules,
                         f"added {len(P.added_rules)} rules")
            one, two = _two_slot_check(dga)
            for k, r in enumerate(one):
                rep.add(f"{pt} R T1 dT2 = dT2 T1 R21^-1 entry {k}", r)
            for k, r in enumerate(two):
                rep.add(f"{pt} R dT1 dT2 = -dT2 dT1 R21^-1 entry {k}", r)
            for k, r in enumerate(three_slot_identity(dga)):
                rep.add(f"{pt} dT3 dT2 T1 three-slot entry {k}", r)
            # d respects the base relations and the 1-form relations
            for rule in dga.base.rules:
                if any(x in dga.inverse_of for x in rule.lhs):
                    continue
                rep.add(f"{pt} d({P.word_str(rule.lhs)} - ...)",
                        derham_raw(dga, _rule_residual(P, rule)))
            for rule in P.rules:
                if dga.form_degree(rule.lhs) == 1:
                    rep.add(f"{pt} d({P.word_str(rule.lhs)} - ...)",
                            derham_raw(dga, _rule_residual(P, rule)))
            # d^2 = 0 on all degree-0 words of length <= 3
            letters = [P.index[n] for n in dga.base.base_generators]
            nonzero = 0
            for L in range(1, 4):
                for w in nc.free_words(P, L, letters):
                    f = dga.element(P.poly({w: ONE}), 0)
                    if not derham(derham(f)).is_zero():
                        nonzero += 1
            rep.add_flag(f"{pt} d^2 = 0 on words of length <= 3", nonzero == 0,
                         f"{nonzero} words with d^2 != 0")
            # q = 1: 2-form rules become anticommutation
            ok = True
            for rule in P.rules:
                if dga.form_degree(rule.lhs) != 2:
                    continue
                u, v = rule.lhs
                spec = {w: c.specialize(1) for w, c in rule.rhs.terms.items()}
                spec = {w: c for w, c in spec.items() if c}
                want = {} if u == v else {(v, u): -1}
                ok &= spec == want
            rep.add_flag(f"{pt} q=1 2-form rules are anticommutation", ok)
            _involution_checks(dga, rep, pt)
        for patch in (Patch.MI, Patch.MJ):
            D = build_dga(patch, m)
            E, img = _realization_images(m, patch)
            rep.extend(f"{tag} {patch.value} -> GLext", nc.verify_homomorphism(D.pres, E, img))
        E = build_dga(Patch.GLext, m)
        for rule in E.base.rules:
            if any(x in E.inverse_of for x in rule.lhs):
                continue
            rep.add(f"{tag} GLext d({E.pres.word_str(rule.lhs)} - ...)",
                    derham_raw(E, _rule_residual(E.pres, rule)))
        for rule in E.pres.rules:
            if E.form_degree(rule.lhs) == 1:
                rep.add(f"{tag} GLext d({E.pres.word_str(rule.lhs)} - ...)",
                        derham_raw(E, _rule_residual(E.pres, rule)))
        dl = E.gen("delta")
        rep.add(f"{tag} d(delta^2) = d_delta delta + delta d_delta",
                (derham(dl * dl) - (E.d("delta") * dl + dl * E.d("delta"))).poly)
    return rep


def _involution_checks(dga: DGAPresentation, rep: StructureReport, pt: str):
    if getattr(dga, "involution", None) is None:
        return
    P = dga.pres
    bad = []
    for rule in P.rules:
        k = dga.form_degree(rule.lhs)
        f = FormElement(dga, P.poly(_rule_residual(P, rule)), k)
        if not form_dagger(f).is_zero():
            bad.append(P.word_str(rule.lhs))
    rep.add_flag(f"{pt} form involution preserves the relations", not bad,
                 "fails on " + ", ".join(bad[:6]))
    twice = []
    for n in dga.base.base_generators:
        for x in (dga.gen(n), dga.d(n)):
            if not (form_dagger(form_dagger(x)) - x).is_zero():
                twice.append(str(x))
    rep.add_flag(f"{pt} involution squares to the identity", not twice, ", ".join(twice))
    a, b = dga.matrix_names[0], dga.matrix_names[1]
    lhs = form_dagger(dga.d(a) * dga.d(b))
    rhs = -(form_dagger(dga.d(b)) * form_dagger(dga.d(a)))
    rep.add(f"{pt} (d{a} d{b})^+ = -(d{b})^+ (d{a})^+", (lhs - rhs).poly)
    f = dga.gen(b) * dga.d(a)
    rep.add(f"{pt} ({b} d{a})^+ = (d{a})^+ {b}^+",
            (form_dagger(f) - form_dagger(dga.d(a)) * form_dagger(dga.gen(b))).poly)


def verify_hodge(mode: PMode | None = None) -> StructureReport:
    """``*^2 = 1``, well-definedness of ``*`` and the SD/ASD bases per patch."""
    modes = [mode] if mode else list(PMode)
    rep = StructureReport("hodge")
    for m in modes:
        for patch in (Patch.GL, Patch.MI, Patch.MJ):
            dga = build_dga(patch, m)
            P = dga.pres
            pt = f"[{m.value}] {patch.value}"
            table = _star_table(dga)
            for pair in sorted(table):
                w = FormElement(dga, P.poly({pair: ONE}), 2)
                rep.add(f"{pt} *^2 {dga.pair_str(pair)}", (hodge_star(hodge_star(w)) - w).poly)
            # * preserves the 2-form relations, so it is defined on the quotient
            F = _free_copy(P)
            dT = rm.GeneratorMatrix([[dname(dga.matrix_names[2 * r + c]) for c in range(2)]
                                     for r in range(2)])
            rels = rm.expand_matrix_relation(dga.R, dT, dT, F, sign=-1,
                                             Rprime=dga.R21.inverse())
            for k, rel in enumerate(rels):
                acc: dict = {}
                for w, c in rel.terms.items():
                    for v, cv in table[w].items():
                        acc[v] = acc.get(v, ZERO) + c * cv
                rep.add(f"{pt} * on 2-form relation {k}", P.poly(acc))
            normal = {v for t in table.values() for v in t} <= set(dga.pair_words())
            rep.add_flag(f"{pt} sixteen pairs normalize into the six normal words", normal)
            rep.add_flag(f"{pt} rank P+ = 3, rank P- = 3",
                         len(eigenbasis(dga, "sd")) == 3 and len(eigenbasis(dga, "asd")) == 3)
            if patch is Patch.GL:
                continue
            for kind in ("sd", "asd"):
                pb = printed_basis(dga, kind)
                ok = same_span(pb, eigenbasis(dga, kind), dga)
                detail = "eigenbasis " + ", ".join(str(b) for b in eigenbasis(dga, kind))
                rep.add_flag(f"{pt} {kind.upper()} entries span the printed basis", ok, detail)
                lim = all(_limit_in_span(dga, kind))
                rep.add_flag(f"{pt} {kind.upper()} eigenbasis at q=1 equals the classical basis",
                             lim)
    return rep


def _limit_in_span(dga, kind):
    """Each eigenbasis vector at ``q = 1`` lies in the span of the printed basis."""
    from . import linalg

    order = dga.pair_words()
    pb = [{w: c for w, c in b.poly.terms.items()} for b in printed_basis(dga, kind)]
    pb = [{w: as_scalar(c.specialize(1)) for w, c in v.items()} for v in pb]
    out = []
    for b in eigenbasis(dga, kind):
        v = {w: as_scalar(c.specialize(1)) for w, c in b.poly.terms.items()}
        v = {w: c for w, c in v.items() if c}
        out.append(linalg.in_span(v, pb, order))
    return out


def _random_degree0(dga: DGAPresentation, rng: random.Random, max_len=2, terms=3):
    P = dga.pres
    letters = [P.index[n] for n in dga.base.base_generators]
    acc: dict = {}
    for _ in range(rng.randint(1, terms)):
        L = rng.randint(0, max_len)
        w = tuple(rng.choice(letters) for _ in range(L))
        c = as_scalar(rng.randint(-3, 3))
        if c:
            acc[w] = acc.get(w, ZERO) + c
    return FormElement(dga, P.poly(acc), 0)


def leibniz_consistency(dga: DGAPresentation, pairs: int = 100, seed: int = 0):
    """Compare ``d(fg)`` (normalize, then d) with ``df g + f dg`` on random pairs.

    Half the pairs use a 1-form ``f = u dv`` so the graded sign is exercised.
    Returns the list of failing pairs (empty on success).
    """
    rng = random.Random(seed)
    bad = []
    for k in range(pairs):
        f = _random_degree0(dga, rng)
        g = _random_degree0(dga, rng)
        if k % 2:
            f = f * derham(_random_degree0(dga, rng, max_len=1, terms=2))
        lhs = derham(f * g)
        sign = ONE if f.degree == 0 else -ONE
        rhs = derham(f) * g + (f * derham(g)).scale(sign)
        if not (lhs - rhs).is_zero():
            bad.append((str(f.poly), str(g.poly)))
    return bad
