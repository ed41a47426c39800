"""R-matrices, Hecke relations, projectors and matrix-form relations.

Embedding convention: for a 2x2 matrix ``M`` we set ``M_1 = 1 (x) M`` and
``M_2 = M (x) 1`` as Kronecker products.  This is the ordering under which
``R T_1 T_2 = T_2 T_1 R`` reproduces the quantum matrix relations with the
printed ``R`` and under which the Q-conjugate of ``R`` has the tabulated
middle block.  The permutation ``P`` and the two-index basis are the same
either way; only the labelling of tensor slots changes.
"""
from __future__ import annotations

from dataclasses import dataclass

from .scalar import ONE, ZERO, PMode, Scalar, as_scalar, qpow
from . import linalg

__all__ = [
    "RMat",
    "identity",
    "permutation",
    "matrix_q",
    "r12",
    "build_rmatrices",
    "check_hecke",
    "hecke_residuals",
    "build_projectors",
    "embed1",
    "embed2",
    "GeneratorMatrix",
    "expand_matrix_relation",
    "yang_baxter_residual",
]


class RMat:
    """Square or rectangular matrix with :class:`Scalar` entries."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(as_scalar(x) for x in r) for r in rows)

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "RMat") -> "RMat":
        n, m = self.shape
        m2, k = other.shape
        if m != m2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for i in range(n):
            row = []
            for j in range(k):
                acc = ZERO
                for t in range(m):
                    a = self.rows[i][t]
                    if a:
                        b = other.rows[t][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return RMat(out)

    def __add__(self, other):
        return RMat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return RMat([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return RMat([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "RMat":
        c = as_scalar(c)
        return RMat([[a * c for a in r] for r in self.rows])

    def __rmul__(self, c):
        return self.scale(c)

    def transpose(self) -> "RMat":
        n, m = self.shape
        return RMat([[self.rows[i][j] for i in range(n)] for j in range(m)])

    @property
    def t(self):
        return self.transpose()

    def inverse(self) -> "RMat":
        n, m = self.shape
        if n != m:
            raise ValueError("inverse of a non-square matrix")
        aug = [list(self.rows[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = aug[col][col].inverse()
            aug[col] = [x * inv for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return RMat([row[n:] for row in aug])

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def kron(self, other: "RMat") -> "RMat":
        n, m = self.shape
        a, b = other.shape
        return RMat([[self.rows[i // a][j // b] * other.rows[i % a][j % b]
                      for j in range(m * b)] for i in range(n * a)])

    def specialize(self, s0):
        return [[x.specialize(s0) for x in r] for r in self.rows]

    def map(self, f) -> "RMat":
        return RMat([[f(x) for x in r] for r in self.rows])

    def __eq__(self, other):
        return isinstance(other, RMat) and self.rows == other.rows

    __hash__ = None

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)

    def __repr__(self):
        return f"RMat({self.shape[0]}x{self.shape[1]})"


def identity(n: int) -> RMat:
    return RMat([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])


def permutation() -> RMat:
    """Flip of the two tensor slots on the basis 11, 12, 21, 22."""
    P = [[ZERO] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            P[2 * i + j][2 * j + i] = ONE
    return RMat(P)


def matrix_q() -> RMat:
    return RMat([[qpow("1/4"), ZERO], [ZERO, qpow("-1/4")]])


def embed1(M: RMat) -> RMat:
    """First tensor slot: ``1 (x) M``."""
    return identity(M.shape[0]).kron(M)


def embed2(M: RMat) -> RMat:
    """Second tensor slot: ``M (x) 1``."""
    return M.kron(identity(M.shape[0]))


def r12(mode: PMode) -> RMat:
    p = mode.p
    q1, qm = qpow(1), qpow(-1)
    pm = p(-1)
    return RMat([
        [pm, ZERO, ZERO, ZERO],
        [ZERO, ONE, pm - q1, ZERO],
        [ZERO, pm - qm, ONE, ZERO],
        [ZERO, ZERO, ZERO, pm],
    ])


def tabulated_ri(mode: PMode) -> RMat:
    p = mode.p
    pm = p(-1)
    return RMat([
        [pm, ZERO, ZERO, ZERO],
        [ZERO, qpow(-1), pm - qpow(1), ZERO],
        [ZERO, pm - qpow(-1), qpow(1), ZERO],
        [ZERO, ZERO, ZERO, pm],
    ])


def tabulated_rj(mode: PMode) -> RMat:
    p = mode.p
    pm = p(-1)
    return RMat([
        [pm, ZERO, ZERO, ZERO],
        [ZERO, qpow(1), pm - qpow(1), ZERO],
        [ZERO, pm - qpow(-1), qpow(-1), ZERO],
        [ZERO, ZERO, ZERO, pm],
    ])


@dataclass
class RMatrices:
    mode: PMode
    R12: RMat
    R21: RMat
    RI: RMat
    RI21: RMat
    RJ: RMat
    RJ21: RMat
    P: RMat
    Q: RMat
    Q1: RMat
    Q2: RMat
    RI_tab: RMat
    RJ_tab: RMat

    def hat(self, R: RMat) -> RMat:
        return self.P @ R


def build_rmatrices(mode: PMode) -> RMatrices:
    """All R-matrices for one value of ``p``.

    ``RI``/``RJ`` are computed from the Q-conjugation formulas and carried
    next to the tabulated versions so callers can compare them.  The
    companions ``RI21``/``RJ21`` are the conjugations of ``R21`` that make
    the 1-form relations of each patch agree with the realization inside the
    extended quantum group (see ``qforms``).
    """
    R = r12(mode)
    R21 = R.t
    Q = matrix_q()
    Qi = Q.inverse()
    Q1, Q2 = embed1(Q), embed2(Q)
    Q1i, Q2i = embed1(Qi), embed2(Qi)
    RI = Q2i @ Q1 @ R @ Q1 @ Q2i
    RJ = Q2 @ Q1i @ R @ Q1i @ Q2
    RI21 = Q1i @ Q2 @ R21 @ Q2 @ Q1i
    RJ21 = Q1 @ Q2i @ R21 @ Q1 @ Q2i
    return RMatrices(mode, R, R21, RI, RI21, RJ, RJ21, permutation(), Q, Q1, Q2,
                     tabulated_ri(mode), tabulated_rj(mode))


def hecke_residuals(R: RMat, mode: PMode, R21: RMat | None = None):
    """Residual matrices of the two Hecke identities (both zero when they hold)."""
    P = permutation()
    R21 = R.t if R21 is None else R21
    c = mode.p(-1) - mode.p(1)
    first = R - R21.inverse() - P.scale(c)
    Rh = P @ R
    second = Rh @ Rh - Rh.scale(c) - identity(4)
    return first, second


def check_hecke(R: RMat, mode: PMode, R21: RMat | None = None) -> bool:
    a, b = hecke_residuals(R, mode, R21)
    return a.is_zero() and b.is_zero()


def build_projectors(R: RMat, mode: PMode):
    """``P+ = (R^ + p)/(p + 1/p)`` and ``P- = (-R^ + 1/p)/(p + 1/p)``."""
    _, second = hecke_residuals(R, mode)
    if not second.is_zero():
        raise ValueError("R does not satisfy the Hecke relation; projectors undefined")
    P = permutation()
    Rh = P @ R
    p, pm = mode.p(1), mode.p(-1)
    norm = (p + pm).inverse()
    Id = identity(4)
    Pp = (Rh + Id.scale(p)).scale(norm)
    Pm = (Id.scale(pm) - Rh).scale(norm)
    return Pp, Pm


def yang_baxter_residual(R: RMat) -> RMat:
    """``R12 R13 R23 - R23 R13 R12`` on three two-dimensional slots."""
    I2 = identity(2)
    P = permutation()
    R12 = R.kron(I2)
    R23 = I2.kron(R)
    P23 = I2.kron(P)
    R13 = P23 @ R12 @ P23
    return R12 @ R13 @ R23 - R23 @ R13 @ R12


# -- matrices of generators --------------------------------------------------


class GeneratorMatrix:
    """2x2 (or general) matrix whose entries are generator names or polynomials."""

    def __init__(self, entries):
        self.entries = [list(r) for r in entries]

    @classmethod
    def named(cls, prefix, suffix=""):
        return cls([[f"{prefix}11{suffix}", f"{prefix}12{suffix}"],
                    [f"{prefix}21{suffix}", f"{prefix}22{suffix}"]])

    def resolve(self, pres):
        out = []
        for r in self.entries:
            row = []
            for e in r:
                if isinstance(e, str):
                    row.append(pres.gen(e))
                else:
                    row.append(e)
            out.append(row)
        return out


def _embed_poly(M, pres, slot):
    """Kronecker embedding of a 2x2 polynomial matrix into 4x4."""
    n = len(M)
    Z = pres.zero()
    out = [[Z for _ in range(n * n)] for _ in range(n * n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    if slot == 1:
                        # 1 (x) M: block-diagonal copies of M
                        if a == c:
                            out[n * a + b][n * c + d] = M[b][d]
                    else:
                        if b == d:
                            out[n * a + b][n * c + d] = M[a][c]
    return out


def _mm(A, B, pres):
    """Product of matrices whose entries are NCPolys or Scalars."""
    n, m, k = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = pres.zero()
            for t in range(m):
                a, b = A[i][t], B[t][j]
                if isinstance(a, Scalar):
                    if not a:
                        continue
                    if isinstance(b, Scalar):
                        if b:
                            acc = acc + pres.scalar(a * b)
                    elif b:
                        acc = acc + b.scale(a)
                else:
                    if not a:
                        continue
                    if isinstance(b, Scalar):
                        if b:
                            acc = acc + a.scale(b)
                    elif b:
                        acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def expand_matrix_relation(R: RMat, M, N, pres, sign: int = 1, Rprime: RMat | None = None):
    """Entries of ``R M_1 N_2 - sign * N_2 M_1 R'``.

    ``M`` and ``N`` are 2x2 matrices of NCPolys (or generator names) in
    ``pres``.  Products are taken in ``pres`` so passing a presentation
    without rules gives the unreduced expansion.  Returns 16 NCPolys in
    row-major order.
    """
    Rprime = R if Rprime is None else Rprime
    if R.shape != (4, 4) or Rprime.shape != (4, 4):
        raise ValueError("R-matrices must be 4x4")
    if isinstance(M, GeneratorMatrix):
        M = M.resolve(pres)
    if isinstance(N, GeneratorMatrix):
        N = N.resolve(pres)
    if len(M) != 2 or len(N) != 2 or any(len(r) != 2 for r in list(M) + list(N)):
        raise ValueError("generator matrices must be 2x2")
    M1 = _embed_poly(M, pres, 1)
    N2 = _embed_poly(N, pres, 2)
    Rr = [list(r) for r in R.rows]
    Rp = [list(r) for r in Rprime.rows]
    left = _mm(_mm(Rr, M1, pres), N2, pres)
    right = _mm(_mm(N2, M1, pres), Rp, pres)
    out = []
    for i in range(4):
        for j in range(4):
            r = right[i][j]
            out.append(left[i][j] - (r if sign > 0 else -r))
    return out


def span_rank(polys, pres) -> int:
    words = sorted({w for p in polys for w in p.terms}, key=pres.order_key)
    return linalg.rank([p.terms for p in polys], words)
