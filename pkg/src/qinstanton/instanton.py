"""ADHM data and the quantum monads built from them.

A datum ``(B1, B2, i, j)`` over the Gaussian rationals gives, on each
Minkowski patch, a monad ``beta * alpha = 0`` whose entries have degree at
most one in the patch generators.  The checks here are exact: matrix
products are normalized in the patch algebra and compared with constant
matrices tensored with the identity.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field

from . import linalg
from . import ncengine as nc
from . import qforms
from .qalgebras import AlgebraId, StructureReport, build, _eta_images
from .scalar import GaussianRational, PMode, as_scalar

__all__ = [
    "GMat",
    "AdhmDatum",
    "AdhmFormatError",
    "MonadPair",
    "DiracPair",
    "RankReport",
    "GluingResult",
    "reference_datum",
    "check_adhm_equations",
    "check_regularity",
    "gauge_act",
    "random_unitary",
    "random_adhm_datum",
    "build_monad",
    "dirac_pair",
    "verify_complex",
    "verify_gauge_diagram",
    "curvature_matrix",
    "curvature_asd_check",
    "pointwise_rank_oracle",
    "random_points",
    "verify_consistency_gluing",
    "parse_adhm",
    "format_adhm",
    "read_adhm",
]

G0 = GaussianRational(0)
G1 = GaussianRational(1)


# -- exact matrices -----------------------------------------------------------


@dataclass(frozen=True)
class GMat:
    """Dense matrix over the Gaussian rationals with an explicit shape."""

    rows: int
    cols: int
    data: tuple  # row-major, length rows * cols

    def __post_init__(self):
        if len(self.data) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.data)}")

    @classmethod
    def of(cls, rows, cols, entries) -> "GMat":
        return cls(rows, cols, tuple(GaussianRational.coerce(e) if not isinstance(e, str)
                                     else GaussianRational.parse(e) for e in entries))

    @classmethod
    def from_rows(cls, rows) -> "GMat":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls.of(len(rows), ncols, [e for r in rows for e in r])

    @classmethod
    def zeros(cls, r, c) -> "GMat":
        return cls(r, c, (G0,) * (r * c))

    @classmethod
    def eye(cls, n) -> "GMat":
        return cls(n, n, tuple(G1 if a == b else G0 for a in range(n) for b in range(n)))

    def __getitem__(self, rc):
        r, c = rc
        return self.data[r * self.cols + c]

    def row(self, r):
        return self.data[r * self.cols:(r + 1) * self.cols]

    def tolist(self):
        return [list(self.row(r)) for r in range(self.rows)]

    def _same(self, o):
        if (self.rows, self.cols) != (o.rows, o.cols):
            raise ValueError(f"shape mismatch {self.shape} vs {o.shape}")

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __add__(self, o):
        self._same(o)
        return GMat(self.rows, self.cols, tuple(a + b for a, b in zip(self.data, o.data)))

    def __sub__(self, o):
        self._same(o)
        return GMat(self.rows, self.cols, tuple(a - b for a, b in zip(self.data, o.data)))

    def __neg__(self):
        return GMat(self.rows, self.cols, tuple(-a for a in self.data))

    def __matmul__(self, o):
        if self.cols != o.rows:
            raise ValueError(f"cannot multiply {self.shape} by {o.shape}")
        out = []
        for r in range(self.rows):
            for c in range(o.cols):
                acc = G0
                for k in range(self.cols):
                    acc = acc + self[r, k] * o[k, c]
                out.append(acc)
        return GMat(self.rows, o.cols, tuple(out))

    def scale(self, a):
        a = GaussianRational.coerce(a)
        return GMat(self.rows, self.cols, tuple(a * e for e in self.data))

    def dagger(self) -> "GMat":
        return GMat(self.cols, self.rows,
                    tuple(self[r, c].conjugate() for c in range(self.cols) for r in range(self.rows)))

    def is_zero(self) -> bool:
        return not any(self.data)

    def __eq__(self, o):
        return isinstance(o, GMat) and self.shape == o.shape and self.data == o.data

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __str__(self):
        return "[" + "; ".join(", ".join(str(e) for e in self.row(r)) for r in range(self.rows)) + "]"


def _comm(a: GMat, b: GMat) -> GMat:
    return a @ b - b @ a


def _columns_rank(vectors, dim) -> int:
    rows = [{k: as_scalar(v[k]) for k in range(dim) if v[k]} for v in vectors]
    return linalg.rank(rows, list(range(dim)))


def _krylov_dim(mats, start_cols, dim) -> int:
    """Dimension of the smallest subspace containing ``start_cols`` and stable under ``mats``."""
    basis: list = []
    rows, order = [], list(range(dim))

    def add(v):
        nonlocal rows
        trial = rows + [{k: as_scalar(v[k]) for k in range(dim) if v[k]}]
        if linalg.rank(trial, order) > len(basis):
            basis.append(v)
            rows = trial
            return True
        return False

    frontier = [v for v in start_cols if add(v)]
    while frontier and len(basis) < dim:
        nxt = []
        for v in frontier:
            for m in mats:
                w = tuple(sum((m[r, k] * v[k] for k in range(dim)), G0) for r in range(dim))
                if add(w):
                    nxt.append(w)
        frontier = nxt
    return len(basis)


# -- ADHM data ------------------------------------------------------------------


@dataclass(frozen=True)
class AdhmDatum:
    n: int
    c: int
    B1: GMat
    B2: GMat
    i: GMat
    j: GMat

    def __post_init__(self):
        if self.n < 1 or self.c < 0:
            raise ValueError("need n >= 1 and c >= 0")
        want = {"B1": (self.c, self.c), "B2": (self.c, self.c),
                "i": (self.c, self.n), "j": (self.n, self.c)}
        for k, shp in want.items():
            if getattr(self, k).shape != shp:
                raise ValueError(f"{k} has shape {getattr(self, k).shape}, expected {shp}")

    @classmethod
    def make(cls, n, c, B1, B2, i, j) -> "AdhmDatum":
        def m(x, r, k):
            if isinstance(x, GMat):
                return x
            x = list(x)
            flat = [e for row in x for e in row] if x and isinstance(x[0], (list, tuple)) else x
            return GMat.of(r, k, flat)
        return cls(n, c, m(B1, c, c), m(B2, c, c), m(i, c, n), m(j, n, c))

    def __str__(self):
        return f"AdhmDatum(n={self.n}, c={self.c}, B1={self.B1}, B2={self.B2}, i={self.i}, j={self.j})"


def reference_datum() -> AdhmDatum:
    """``c = 1, n = 2``, ``B = 0``, ``i = (1, 0)``, ``j = (0, 1)^T``."""
    return AdhmDatum.make(2, 1, [0], [0], [1, 0], [0, 1])


def check_adhm_equations(d: AdhmDatum):
    """``(res1, res2)`` with ``res1 = [B1,B2] + ij`` and the real moment map ``res2``."""
    res1 = _comm(d.B1, d.B2) + d.i @ d.j
    res2 = (_comm(d.B1, d.B1.dagger()) + _comm(d.B2, d.B2.dagger())
            + d.i @ d.i.dagger() - d.j.dagger() @ d.j)
    return res1, res2


def _stable(c, B1, B2, i) -> bool:
    cols = [tuple(i[r, k] for r in range(c)) for k in range(i.cols)]
    return _krylov_dim([B1, B2], cols, c) == c


def check_regularity(d: AdhmDatum) -> dict:
    """Stability via the Krylov closure of ``Im i``; costability via the daggered datum."""
    return {"stable": _stable(d.c, d.B1, d.B2, d.i),
            "costable": _stable(d.c, d.B1.dagger(), d.B2.dagger(), d.j.dagger())}


def _check_unitary(g: GMat, c: int):
    if g.shape != (c, c):
        raise ValueError(f"gauge matrix must be {c}x{c}")
    if g @ g.dagger() != GMat.eye(c):
        raise ValueError("gauge matrix is not unitary")


def gauge_act(g, d: AdhmDatum) -> AdhmDatum:
    """``(g B1 g^-1, g B2 g^-1, g i, j g^-1)`` for exactly unitary ``g``."""
    if not isinstance(g, GMat):
        g = GMat.from_rows(g)
    _check_unitary(g, d.c)
    gi = g.dagger()
    return AdhmDatum(d.n, d.c, g @ d.B1 @ gi, g @ d.B2 @ gi, g @ d.i, d.j @ gi)


# exact rational rotations from Pythagorean triples
_TRIPLES = ((3, 4, 5), (5, 12, 13), (8, 15, 17))
_UNITS = (GaussianRational(1), GaussianRational(-1), GaussianRational(0, 1), GaussianRational(0, -1))


def random_unitary(c: int, rng: random.Random) -> GMat:
    """Product of a phase matrix, a permutation and planar rational rotations."""
    g = GMat(c, c, tuple(rng.choice(_UNITS) if a == b else G0 for a in range(c) for b in range(c)))
    perm = list(range(c))
    rng.shuffle(perm)
    g = g @ GMat(c, c, tuple(G1 if perm[a] == b else G0 for a in range(c) for b in range(c)))
    for _ in range(c - 1 if c > 1 else 0):
        a, b = rng.sample(range(c), 2)
        x, y, h = rng.choice(_TRIPLES)
        rot = list(GMat.eye(c).data)
        co, si = GaussianRational(x, 0) * GaussianRational(h).inverse(), \
            GaussianRational(y, 0) * GaussianRational(h).inverse()
        rot[a * c + a], rot[a * c + b], rot[b * c + a], rot[b * c + b] = co, -si, si, co
        g = g @ GMat(c, c, tuple(rot))
    return g


def _rand_gr(rng, lo=-3, hi=3, den=(1, 2)):
    return GaussianRational(rng.randint(lo, hi), rng.randint(lo, hi)) * \
        GaussianRational(rng.choice(den)).inverse()


def random_adhm_datum(rng: random.Random, c: int = None, k: int = None, extra: int = None,
                      gauge: bool = True) -> AdhmDatum:
    """Datum solving both ADHM equations exactly.

    Diagonal ``B1, B2`` (so the commutator terms vanish), ``i = (A, 0, 0)`` and
    ``j = (0; A^+; 0)`` so that ``ij = 0`` and ``i i^+ = j^+ j``; then an
    optional random exact unitary gauge makes the data non-diagonal.
    """
    c = rng.randint(1, 3) if c is None else c
    k = rng.randint(1, 2) if k is None else k
    extra = rng.randint(0, 1) if extra is None else extra
    n = 2 * k + extra
    B1 = GMat(c, c, tuple(_rand_gr(rng) if a == b else G0 for a in range(c) for b in range(c)))
    B2 = GMat(c, c, tuple(_rand_gr(rng) if a == b else G0 for a in range(c) for b in range(c)))
    A = GMat(c, k, tuple(_rand_gr(rng) for _ in range(c * k)))
    Ad = A.dagger()
    i = GMat(c, n, tuple(A[r, col] if col < k else G0 for r in range(c) for col in range(n)))
    j = GMat(n, c, tuple(Ad[row - k, col] if k <= row < 2 * k else G0
                         for row in range(n) for col in range(c)))
    d = AdhmDatum(n, c, B1, B2, i, j)
    if gauge:
        d = gauge_act(random_unitary(c, rng), d)
    r1, r2 = check_adhm_equations(d)
    if not (r1.is_zero() and r2.is_zero()):  # pragma: no cover - construction guarantees this
        raise AssertionError("generated datum violates the ADHM equations")
    return d


# -- monads -----------------------------------------------------------------------

# generator pairs (first column entry, second column entry) in alpha and their duals
_PATCH_GENS = {
    qforms.Patch.MI: ("x21", "x22"),
    qforms.Patch.MJ: ("y12", "y22"),
}
_LABEL = {qforms.Patch.MI: "I", qforms.Patch.MJ: "J"}
_PATCH_ALGEBRA = {qforms.Patch.MI: AlgebraId.MIq, qforms.Patch.MJ: AlgebraId.MJq}
_PATCH_DELTA = {qforms.Patch.MI: AlgebraId.MIq_deltaloc, qforms.Patch.MJ: AlgebraId.MJq_deltaloc}


def _patch(patch) -> qforms.Patch:
    p = qforms.Patch.parse(patch) if isinstance(patch, str) else patch
    if p not in _PATCH_GENS:
        raise ValueError("monads live on the patches I and J")
    return p


def _const(P, a) -> nc.NCPoly:
    return P.scalar(as_scalar(a))


def _mat_mul(A, B, P):
    rows, inner = len(A), len(B)
    cols = len(B[0]) if B else 0
    out = []
    for r in range(rows):
        row = []
        for c in range(cols):
            acc = P.zero()
            for k in range(inner):
                acc = acc + A[r][k] * B[k][c]
            row.append(acc)
        out.append(row)
    return out


def _mat_dagger(M):
    rows = len(M)
    cols = len(M[0]) if M else 0
    return [[M[r][c].dagger() for r in range(rows)] for c in range(cols)]


def _gmat_poly(g: GMat, P):
    return [[_const(P, g[r, c]) for c in range(g.cols)] for r in range(g.rows)]


def _block_diag(blocks, P):
    n = sum(b.rows for b in blocks)
    out = [[P.zero()] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for r in range(b.rows):
            for c in range(b.cols):
                out[off + r][off + c] = _const(P, b[r, c])
        off += b.rows
    return out


@dataclass
class MonadPair:
    alpha: list  # (2c+n) x c
    beta: list  # c x (2c+n)
    patch: qforms.Patch
    pres: nc.Presentation
    datum: AdhmDatum

    def alpha_dagger(self):
        return _mat_dagger(self.alpha)

    def beta_dagger(self):
        return _mat_dagger(self.beta)

    def entry_strings(self):
        return {"alpha": [[str(e) for e in r] for r in self.alpha],
                "beta": [[str(e) for e in r] for r in self.beta]}


@dataclass
class DiracPair:
    D: list  # 2c x (2c+n): rows beta then alpha^+
    Ddag: list  # (2c+n) x 2c


def _monad_entries(d: AdhmDatum, patch: qforms.Patch, P) -> tuple:
    u, v = (P.gen(n) for n in _PATCH_GENS[patch])
    c, n = d.c, d.n
    Z = P.zero()

    def diag(g):
        return lambda r, k: g if r == k else Z

    du, dv = diag(u), diag(v)
    alpha = []
    for r in range(c):
        alpha.append([_const(P, d.B1[r, k]) - du(r, k) for k in range(c)])
    for r in range(c):
        alpha.append([_const(P, d.B2[r, k]) - dv(r, k) for k in range(c)])
    for r in range(n):
        alpha.append([_const(P, d.j[r, k]) for k in range(c)])
    beta = []
    for r in range(c):
        beta.append([_const(P, -d.B2[r, k]) + dv(r, k) for k in range(c)]
                    + [_const(P, d.B1[r, k]) - du(r, k) for k in range(c)]
                    + [_const(P, d.i[r, k]) for k in range(n)])
    return alpha, beta


def build_monad(d: AdhmDatum, patch="I", pres: nc.Presentation | None = None) -> MonadPair:
    """``alpha = (B1 - u; B2 - v; j)`` and ``beta = (-B2 + v, B1 - u, i)``.

    ``(u, v) = (x21, x22)`` on patch I and ``(y12, y22)`` on patch J.  By
    default the entries live in the undeformed-delta patch algebra.
    """
    patch = _patch(patch)
    P = pres or build(_PATCH_ALGEBRA[patch])
    alpha, beta = _monad_entries(d, patch, P)
    return MonadPair(alpha, beta, patch, P, d)


def dirac_pair(m: MonadPair) -> DiracPair:
    D = [list(r) for r in m.beta] + m.alpha_dagger()
    Ddag = [list(bd) + list(a) for bd, a in zip(m.beta_dagger(), m.alpha)]
    return DiracPair(D, Ddag)


def _tensor_one(M: GMat, P):
    return [[_const(P, M[r, c]) for c in range(M.cols)] for r in range(M.rows)]


def _mat_residuals(rep, label, A, B):
    for r, (ra, rb) in enumerate(zip(A, B)):
        for c, (a, b) in enumerate(zip(ra, rb)):
            rep.add(f"{label}[{r + 1},{c + 1}]", a - b)


def _is_zero_matrix(A):
    return all(e.is_zero() for r in A for e in r)


def verify_complex(m: MonadPair, d: AdhmDatum | None = None) -> StructureReport:
    """``beta alpha = res1 (x) 1`` and ``beta beta^+ - alpha^+ alpha = res2 (x) 1``."""
    d = d or m.datum
    P = m.pres
    res1, res2 = check_adhm_equations(d)
    rep = StructureReport(f"monad[{_LABEL[m.patch]}]")
    ba = _mat_mul(m.beta, m.alpha, P)
    _mat_residuals(rep, "beta*alpha - ([B1,B2]+ij)x1", ba, _tensor_one(res1, P))
    bb = _mat_mul(m.beta, m.beta_dagger(), P)
    aa = _mat_mul(m.alpha_dagger(), m.alpha, P)
    lap = [[x - y for x, y in zip(rb, ra)] for rb, ra in zip(bb, aa)]
    _mat_residuals(rep, "beta*beta^+ - alpha^+*alpha - res2 x 1", lap, _tensor_one(res2, P))
    rep.add_flag("beta*alpha = 0 iff res1 = 0", _is_zero_matrix(ba) == res1.is_zero())
    rep.add_flag("beta*beta^+ = alpha^+*alpha iff res2 = 0", _is_zero_matrix(lap) == res2.is_zero())
    rep.add_flag("xi = beta*beta^+ and alpha^+*alpha have a common value",
                 not res2.is_zero() or all((x - y).is_zero() for rb, ra in zip(bb, aa)
                                           for x, y in zip(rb, ra)))
    # the dagger of beta agrees with the printed dual entries
    bd = m.beta_dagger()
    u, v = _PATCH_GENS[m.patch]
    ud, vd = P.gen(u).dagger(), P.gen(v).dagger()
    for r in range(d.c):
        for k in range(d.c):
            e1 = -_const(P, d.B2.dagger()[r, k]) + (vd if r == k else P.zero())
            e2 = _const(P, d.B1.dagger()[r, k]) - (ud if r == k else P.zero())
            rep.add(f"beta^+ block 1 [{r + 1},{k + 1}]", bd[r][k] - e1)
            rep.add(f"beta^+ block 2 [{r + 1},{k + 1}]", bd[d.c + r][k] - e2)
    return rep


def verify_gauge_diagram(g, d: AdhmDatum, patch="I") -> StructureReport:
    """``alpha' = (G x 1) alpha (g^-1 x 1)`` and ``beta' = (g x 1) beta (G^-1 x 1)``, ``G = g + g + 1``."""
    if not isinstance(g, GMat):
        g = GMat.from_rows(g)
    patch = _patch(patch)
    d2 = gauge_act(g, d)
    m, m2 = build_monad(d, patch), build_monad(d2, patch)
    P = m.pres
    gi = g.dagger()
    G = _block_diag([g, g, GMat.eye(d.n)], P)
    Gi = _block_diag([gi, gi, GMat.eye(d.n)], P)
    rep = StructureReport(f"gauge_diagram[{_LABEL[patch]}]")
    _mat_residuals(rep, "alpha'", m2.alpha, _mat_mul(_mat_mul(G, m.alpha, P), _gmat_poly(gi, P), P))
    _mat_residuals(rep, "beta'", m2.beta, _mat_mul(_mat_mul(_gmat_poly(g, P), m.beta, P), Gi, P))
    r1, r2 = check_adhm_equations(d)
    s1, s2 = check_adhm_equations(d2)
    rep.add_flag("ADHM residuals transform by conjugation",
                 s1 == g @ r1 @ gi and s2 == g @ r2 @ gi)
    rep.add_flag("regularity flags invariant", check_regularity(d) == check_regularity(d2))
    return rep


# -- curvature -------------------------------------------------------------------


def _lift(p: nc.NCPoly, dga: qforms.DGAPresentation) -> qforms.FormElement:
    src, dst = p.pres, dga.pres
    table = {k: dst.index[src.names[k]] for k in range(len(src.names))}
    return dga.element(dst.poly({tuple(table[a] for a in w): c for w, c in p.terms.items()}), 0)


def curvature_matrix(d: AdhmDatum, patch="I", mode: PMode = PMode.P_EQ_Q):
    """``dD^+ ^ dD`` as a (2c+n) x (2c+n) matrix of 2-forms on the patch."""
    patch = _patch(patch)
    dga = qforms.build_dga(patch, mode)
    dp = dirac_pair(build_monad(d, patch))
    dDd = [[qforms.derham(_lift(e, dga)) for e in r] for r in dp.Ddag]
    dD = [[qforms.derham(_lift(e, dga)) for e in r] for r in dp.D]
    size, inner = len(dDd), len(dD)
    zero = qforms.FormElement(dga, dga.pres.zero(), 2)
    out = []
    for r in range(size):
        row = []
        for c in range(size):
            acc = zero
            for k in range(inner):
                acc = acc + dDd[r][k] * dD[k][c]
            row.append(acc)
        out.append(row)
    return dga, out


def _displayed_block(dga):
    """Matrix shown for the V+V block, 2x2 in units of the identity."""
    e = dga.element
    return [[e("d_x11*d_x22 + d_x12*d_x21"), e("-2*d_x11*d_x21")],
            [e("2*d_x12*d_x22"), e("-(d_x11*d_x22 + d_x12*d_x21)")]]


def curvature_asd_check(d: AdhmDatum, patch="I", mode: PMode = PMode.P_EQ_Q) -> StructureReport:
    """Compare the curvature with the displayed matrix and test anti-self-duality.

    Three groups of checks: equality with the displayed V+V block (patch I
    only, W block zero), vanishing of every SD component, and the classical
    limit of the displayed block.
    """
    patch = _patch(patch)
    dga, F = curvature_matrix(d, patch, mode)
    c, n = d.c, d.n
    rep = StructureReport(f"curvature[{_LABEL[patch]},{mode.value}]")
    disp = _displayed_block(dga) if patch is qforms.Patch.MI else None
    zero = qforms.FormElement(dga, dga.pres.zero(), 2)
    for r in range(2 * c + n):
        for k in range(2 * c + n):
            w = F[r][k]
            br, bk = r // c if c else 2, k // c if c else 2
            if disp is not None:
                want = disp[br][bk] if (br < 2 and bk < 2 and r % c == k % c) else zero
                rep.add(f"F[{r + 1},{k + 1}] - display", (w - want).poly)
                rep.add(f"q=1: F[{r + 1},{k + 1}] - display",
                        _specialized_difference(w, want))
            else:
                rep.add_flag(f"F[{r + 1},{k + 1}] vanishes off the V+V block",
                             not (br >= 2 or bk >= 2) or w.is_zero())
            sd, _ = qforms.decompose_2form(w)
            rep.add(f"SD part of F[{r + 1},{k + 1}]", sd.poly)
            rep.add(f"q=1: SD part of F[{r + 1},{k + 1}]", _specialized_form(sd))
    return rep


def _specialized_form(w: qforms.FormElement):
    """``w`` at ``q = 1`` as a polynomial with constant coefficients."""
    P = w.dga.pres
    return P.poly({word: as_scalar(c.specialize(1)) for word, c in w.poly.terms.items()
                   if c.specialize(1)})


def _specialized_difference(a, b):
    return _specialized_form(a - b)


# -- pointwise rank oracle ----------------------------------------------------------


@dataclass
class RankReport:
    points: list
    beta_ranks: list
    alpha_ranks: list
    expected: int
    drops: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.drops

    def summary(self) -> dict:
        return {"check": "pointwise_rank", "pass": self.passed, "points": len(self.points),
                "expected_rank": self.expected,
                "drops": [{"point": {k: str(v) for k, v in p.items()}, "beta": b, "alpha": a}
                          for p, b, a in self.drops]}


def random_points(count: int = 25, seed: int = 0, names=("x11", "x12", "x21", "x22")):
    rng = random.Random(seed)
    return [{nm: _rand_gr(rng, -4, 4, (1, 2, 3)) for nm in names} for _ in range(count)]


def _evaluate(p: nc.NCPoly, point: dict) -> GaussianRational:
    acc = G0
    for w, c in p.terms.items():
        v = c.specialize(1)
        for a in w:
            v = v * GaussianRational.coerce(point[p.pres.names[a]])
        acc = acc + v
    return acc


def _numeric_rank(M, point) -> int:
    rows = []
    for r in M:
        vals = [_evaluate(e, point) for e in r]
        rows.append({k: as_scalar(v) for k, v in enumerate(vals) if v})
    cols = len(M[0]) if M else 0
    return linalg.rank(rows, list(range(cols)))


def pointwise_rank_oracle(d: AdhmDatum, samples=None, q0=1, patch="I") -> RankReport:
    """Ranks of ``beta(x)`` and ``alpha(x)`` at commutative sample points (``q0 = 1`` only)."""
    if q0 != 1:
        raise ValueError("the pointwise oracle evaluates generators as commuting numbers (q0 = 1)")
    patch = _patch(patch)
    m = build_monad(d, patch)
    if samples is None:
        samples = random_points(names=tuple(m.pres.base_generators))
    rep = RankReport(list(samples), [], [], d.c)
    for pt in samples:
        rb, ra = _numeric_rank(m.beta, pt), _numeric_rank(m.alpha, pt)
        rep.beta_ranks.append(rb)
        rep.alpha_ranks.append(ra)
        if rb < d.c or ra < d.c:
            rep.drops.append((pt, rb, ra))
    return rep


# -- gluing -------------------------------------------------------------------------


@dataclass
class GluingResult:
    variant: str
    window: int
    alpha_twist: tuple | None  # (row exponents, column exponents)
    beta_twist: tuple | None
    obstructions: list = field(default_factory=list)
    report: StructureReport | None = None

    @property
    def found(self) -> bool:
        return self.alpha_twist is not None and self.beta_twist is not None


def _twisted(P, e, r, c):
    dl = P.gen("delta")
    return P.poly(((dl ** r) * e * (dl ** c)).terms)


def _letters(p: nc.NCPoly):
    return sorted({p.pres.names[a] for w in p.terms for a in w if p.pres.names[a] != "delta"
                   and not p.pres.names[a].startswith("delta")})


def _twist_search(src, dst, P, window):
    """Exponent vectors ``(a, b)`` with ``delta^a_r src[r][c] delta^b_c = dst[r][c]``."""
    rows, cols = len(src), len(src[0]) if src else 0
    rng = range(-window, window + 1)
    allowed = {}
    blocked = []
    for r in range(rows):
        for c in range(cols):
            ok = {(a, b) for a in rng for b in rng
                  if (_twisted(P, src[r][c], a, b) - dst[r][c]).is_zero()}
            allowed[r, c] = ok
            if not ok:
                blocked.append((r, c))
    if blocked:
        return None, blocked
    # backtrack over rows; a row exponent fixes the compatible column exponents
    for a in itertools.product(rng, repeat=rows):
        cand = [set(rng) for _ in range(cols)]
        for r in range(rows):
            for c in range(cols):
                cand[c] &= {b for (x, b) in allowed[r, c] if x == a[r]}
        if all(cand):
            return (tuple(a), tuple(min(s, key=abs) for s in cand)), []
    return None, []


def verify_consistency_gluing(d: AdhmDatum, window: int = 4, variant: str = "realization"):
    """Search diagonal delta twists relating ``eta(alpha_I)`` to ``alpha_J`` (and beta).

    Returns a :class:`GluingResult`; its ``report`` always passes when the
    search ran to completion, and the outcome (twists or the blocking
    entries) is carried in ``notes`` and ``obstructions``.
    """
    MI, MJ = build(_PATCH_DELTA[qforms.Patch.MI]), build(_PATCH_DELTA[qforms.Patch.MJ])
    fwd = dict(_eta_images(MJ, variant))
    fwd["delta"] = MJ.gen("delta")
    table = nc.image_table(MI, MJ, fwd)
    mi = build_monad(d, "I", MI)
    mj = build_monad(d, "J", MJ)

    def eta(M):
        return [[MJ.poly(nc.map_poly(e, MJ, table).terms) for e in r] for r in M]

    ea, eb = eta(mi.alpha), eta(mi.beta)
    rep = StructureReport(f"gluing[{variant}]")
    # constants are fixed by eta
    for r, row in enumerate(mi.alpha):
        for k, e in enumerate(row):
            const = MI.scalar(e.coefficient(()))
            rep.add(f"eta(const alpha[{r + 1},{k + 1}]) = const",
                    MJ.poly(nc.map_poly(const, MJ, table).terms) - MJ.scalar(e.coefficient(())))
    ta, blocked_a = _twist_search(ea, mj.alpha, MJ, window)
    tb, blocked_b = _twist_search(eb, mj.beta, MJ, window)
    res = GluingResult(variant, window, ta, tb, report=rep)
    for name, twist, blocked, src, dst in (("alpha", ta, blocked_a, ea, mj.alpha),
                                           ("beta", tb, blocked_b, eb, mj.beta)):
        if twist is not None:
            rep.notes.append(f"{name}: twist rows {twist[0]} columns {twist[1]}")
        else:
            rep.notes.append(f"{name}: no diagonal delta twist with exponents in "
                             f"[-{window}, {window}]")
            for r, c in blocked:
                ob = (f"{name}[{r + 1},{c + 1}]: eta image {src[r][c]} involves "
                      f"{_letters(src[r][c])}, patch J entry {dst[r][c]} involves "
                      f"{_letters(dst[r][c])}")
                res.obstructions.append(ob)
                rep.notes.append(ob)
    rep.add_flag("beta diagram found iff alpha diagram found", (ta is None) == (tb is None))
    rep.add_flag("search completed over the exponent window", True,
                 f"{(2 * window + 1) ** 2} exponent pairs per entry")
    return res


# -- ADHM text format -----------------------------------------------------------------


class AdhmFormatError(ValueError):
    pass


_FIELDS = ("n", "c", "B1", "B2", "i", "j")
_LINE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9]*)\s*=\s*(.*?)\s*$")


def parse_adhm(text: str) -> AdhmDatum:
    """Read ``key = value`` lines; matrices are row-major ``[a+bi, ...]`` lists."""
    vals = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise AdhmFormatError(f"line {ln}: expected 'key = value'")
        key, body = m.groups()
        if key not in _FIELDS:
            raise AdhmFormatError(f"line {ln}: unknown field {key!r}")
        if key in vals:
            raise AdhmFormatError(f"line {ln}: duplicate field {key!r}")
        vals[key] = (ln, body)
    missing = [k for k in _FIELDS if k not in vals]
    if missing:
        raise AdhmFormatError(f"missing fields {missing}")
    try:
        n, c = int(vals["n"][1]), int(vals["c"][1])
    except ValueError as e:
        raise AdhmFormatError("n and c must be integers") from e
    shapes = {"B1": (c, c), "B2": (c, c), "i": (c, n), "j": (n, c)}
    mats = {}
    for key, (r, k) in shapes.items():
        ln, body = vals[key]
        if not (body.startswith("[") and body.endswith("]")):
            raise AdhmFormatError(f"line {ln}: {key} must be a bracketed list")
        toks = [t for t in re.split(r"[,\s]+", body[1:-1].strip()) if t]
        if len(toks) != r * k:
            raise AdhmFormatError(f"line {ln}: {key} needs {r * k} entries, found {len(toks)}")
        try:
            mats[key] = GMat.of(r, k, [GaussianRational.parse(t) for t in toks])
        except (ValueError, ZeroDivisionError) as e:
            raise AdhmFormatError(f"line {ln}: bad entry in {key}: {e}") from e
    try:
        return AdhmDatum(n, c, mats["B1"], mats["B2"], mats["i"], mats["j"])
    except ValueError as e:
        raise AdhmFormatError(str(e)) from e


def _gr_text(g: GaussianRational) -> str:
    if not g.im:
        return str(g.re)
    sign = "+" if g.im > 0 else "-"
    return f"{g.re}{sign}{abs(g.im)}i" if g.re else f"{g.im}i"


def format_adhm(d: AdhmDatum) -> str:
    lines = [f"n = {d.n}", f"c = {d.c}"]
    for key in ("B1", "B2", "i", "j"):
        lines.append(f"{key} = [" + ", ".join(_gr_text(e) for e in getattr(d, key).data) + "]")
    return "\n".join(lines) + "\n"


def read_adhm(path) -> AdhmDatum:
    with open(path, encoding="utf-8") as fh:
        return parse_adhm(fh.read())
