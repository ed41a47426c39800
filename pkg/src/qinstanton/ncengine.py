"""Finitely presented graded associative algebras over :class:`Scalar`.

A :class:`Presentation` is an ordered alphabet plus rewrite rules
``lhs -> rhs``; elements are :class:`NCPoly` values kept in normal form.
Words are compared by a weighted degree-lexicographic order: optional
weight vectors first, then length, then lexicographic in generator order.
Every rule must strictly decrease its left word, which makes reduction
terminate.

Invertible generators get a companion symbol ``name^-1`` placed right after
them in the alphabet together with the two cancellation rules.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import kernels
from .linalg import row_reduce
from .scalar import ONE, ZERO, Scalar, as_scalar

__all__ = [
    "EngineError",
    "UnknownGenerator",
    "OrientationError",
    "CompletionError",
    "DegreeBoundError",
    "Presentation",
    "RewriteRule",
    "NCPoly",
    "Ambiguity",
    "HomomorphismReport",
    "normalize",
    "complete",
    "check_local_confluence",
    "hilbert_dimensions",
    "apply_involution",
    "verify_homomorphism",
    "tensor_square",
]

DEFAULT_COMPLETION_DEGREE = 6
MAX_PASSES = 100000


class EngineError(Exception):
    pass


class UnknownGenerator(EngineError, KeyError):
    pass


class OrientationError(EngineError):
    """A rule would not decrease its left word, so rewriting might cycle."""


class CompletionError(EngineError):
    def __init__(self, message, ambiguities=()):
        super().__init__(message)
        self.ambiguities = list(ambiguities)


class DegreeBoundError(EngineError):
    pass


def _inv_name(name: str) -> str:
    return f"{name}^-1"


@dataclass(frozen=True)
class RewriteRule:
    lhs: tuple
    rhs: "NCPoly"

    def __str__(self):
        return f"{self.rhs.pres.word_str(self.lhs)} -> {self.rhs}"


@dataclass
class Ambiguity:
    overlap_word: tuple
    left_reduction: "NCPoly"
    right_reduction: "NCPoly"

    def difference(self) -> "NCPoly":
        return self.left_reduction - self.right_reduction

    def __str__(self):
        pres = self.left_reduction.pres
        return (f"{pres.word_str(self.overlap_word)}: {self.left_reduction} "
                f"!= {self.right_reduction}")


class Presentation:
    """Generators, grading, word order and rewrite rules of an algebra."""

    def __init__(self, name, generators, *, invertible=(), grading=None, weights=None,
                 description=""):
        self.name = name
        self.description = description
        invertible = list(invertible)
        for g in invertible:
            if g not in generators:
                raise UnknownGenerator(g)
        names = []
        self.inverse = {}
        for g in generators:
            names.append(g)
            if g in invertible:
                names.append(_inv_name(g))
        self.names = names
        self.index = {n: k for k, n in enumerate(names)}
        for g in invertible:
            a, b = self.index[g], self.index[_inv_name(g)]
            self.inverse[a] = b
            self.inverse[b] = a
        self.base_generators = list(generators)
        self.invertible_names = invertible

        # grading: name -> tuple; inverse symbols get the negated vector
        grading = dict(grading or {})
        width = len(next(iter(grading.values()))) if grading else 1
        vecs = []
        for n in names:
            if n in grading:
                v = tuple(int(x) for x in grading[n])
            elif n.endswith("^-1") and n[:-3] in grading:
                v = tuple(-int(x) for x in grading[n[:-3]])
            elif n.endswith("^-1"):
                v = (-1,) + (0,) * (width - 1)
            else:
                v = (1,) + (0,) * (width - 1)
            if len(v) != width:
                raise EngineError(f"grading of {n} has wrong length")
            vecs.append(v)
        self.grading = vecs
        self.grading_width = width

        weights = [dict(w) for w in (weights or [])]
        self.weight_vectors = []
        for w in weights:
            vec = []
            for n in names:
                base = n[:-3] if n.endswith("^-1") else n
                val = int(w.get(n, w.get(base, 0)))
                if val < 0:
                    raise EngineError("order weights must be nonnegative")
                vec.append(val)
            self.weight_vectors.append(tuple(vec))
        self._raw_weights = weights

        self._rules: dict = {}
        self._lengths: tuple = ()
        self._cache: dict = {}
        self.completion_degree = 0
        self.confluent = False
        self.added_rules: list = []
        self.involution = None  # (images: dict index -> terms, conjugate: bool)
        self.eliminations: dict = {}  # index of invertible g -> terms of its value
        for a, b in sorted(self.inverse.items()):
            self._install((a, b), {(): ONE}, check=False)

    # -- words ------------------------------------------------------------
    def word(self, *names) -> tuple:
        out = []
        for n in names:
            if n not in self.index:
                raise UnknownGenerator(n)
            out.append(self.index[n])
        return tuple(out)

    def order_key(self, w: tuple):
        return tuple(sum(wv[a] for a in w) for wv in self.weight_vectors) + (len(w), w)

    def multidegree(self, w: tuple) -> tuple:
        if not w:
            return (0,) * self.grading_width
        return tuple(sum(self.grading[a][k] for a in w) for k in range(self.grading_width))

    def word_str(self, w: tuple) -> str:
        if not w:
            return "1"
        parts = []
        for a, grp in itertools.groupby(w):
            k = len(list(grp))
            n = self.names[a]
            if n.endswith("^-1"):
                parts.append(n if k == 1 else f"{n[:-3]}^-{k}")
            else:
                parts.append(n if k == 1 else f"{n}^{k}")
        return "*".join(parts)

    # -- rules ------------------------------------------------------------
    @property
    def rules(self) -> list:
        return [RewriteRule(l, NCPoly(self, dict(r))) for l, r in
                sorted(self._rules.items(), key=lambda kv: self.order_key(kv[0]))]

    def rule_table(self) -> dict:
        return {l: dict(r) for l, r in self._rules.items()}

    def _install(self, lhs: tuple, rhs: dict, check=True):
        lhs = tuple(lhs)
        if not lhs:
            raise EngineError("empty left-hand side")
        if check:
            k = self.order_key(lhs)
            for w in rhs:
                if self.order_key(w) >= k:
                    raise OrientationError(
                        f"rule {self.word_str(lhs)} -> ... has right word {self.word_str(w)} "
                        f"not smaller than the left word; rewriting could cycle")
        self._rules[lhs] = tuple((w, c) for w, c in rhs.items() if c)
        self._lengths = tuple(sorted({len(l) for l in self._rules}, reverse=True))
        self._cache.clear()
        self.confluent = False

    def add_rule(self, lhs, rhs) -> None:
        """Add ``lhs -> rhs``; ``lhs`` is a word or list of names, ``rhs`` terms."""
        if isinstance(lhs, str):
            lhs = lhs.split("*")
        if lhs and isinstance(lhs[0], str):
            lhs = self.word(*lhs)
        if isinstance(rhs, NCPoly):
            rhs = rhs.terms
        rhs = {tuple(w): as_scalar(c) for w, c in rhs.items()}
        rhs = {w: c for w, c in rhs.items() if c}
        self._install(lhs, rhs)

    def add_qcommutation(self, a: str, b: str, coeff) -> None:
        """Rule ``a*b -> coeff*b*a`` plus its variants for inverse symbols."""
        ia, ib = self.index[a], self.index[b]
        c = as_scalar(coeff)
        self._install((ia, ib), {(ib, ia): c})
        if ia in self.inverse:
            ja = self.inverse[ia]
            self._install((ja, ib), {(ib, ja): c.inverse()})
        if ib in self.inverse:
            jb = self.inverse[ib]
            self._install((ia, jb), {(jb, ia): c.inverse()})
            if ia in self.inverse:
                self._install((self.inverse[ia], jb), {(jb, self.inverse[ia]): c})

    def add_relation(self, terms) -> bool:
        """Orient ``terms == 0`` into a rule after reducing it; False if redundant."""
        if isinstance(terms, NCPoly):
            terms = terms.terms
        red = self.normalize_terms(terms)
        if not red:
            return False
        lead = max(red, key=self.order_key)
        inv = red[lead].inverse()
        rhs = {w: -c * inv for w, c in red.items() if w != lead}
        self._install(lead, rhs)
        return True

    def add_relations(self, relations) -> list:
        """Row-reduce a family of relations and install one rule per pivot."""
        vecs = [self.normalize_terms(r.terms if isinstance(r, NCPoly) else r) for r in relations]
        words = sorted({w for v in vecs for w in v}, key=self.order_key, reverse=True)
        ech = row_reduce(vecs, words)
        out = []
        for piv, row in ech:
            rhs = {w: -c for w, c in row.items() if w != piv}
            self._install(piv, rhs)
            out.append(piv)
        return out

    def set_elimination(self, name: str, value) -> None:
        """Declare an invertible central generator equal to a polynomial.

        Zero tests clear its negative powers and substitute ``value``.
        """
        a = self.index[name]
        if a not in self.inverse:
            raise EngineError(f"{name} must be invertible to be eliminated")
        if isinstance(value, NCPoly):
            value = value.terms
        self.eliminations[a] = dict(value)

    def copy(self, name=None) -> "Presentation":
        new = Presentation.__new__(Presentation)
        new.__dict__.update(self.__dict__)
        new.name = name or self.name
        new._rules = dict(self._rules)
        new._cache = {}
        new.added_rules = list(self.added_rules)
        new.eliminations = dict(self.eliminations)
        return new

    # -- normalization ----------------------------------------------------
    def _resolve(self, terms):
        if isinstance(terms, NCPoly):
            if terms.pres is not self:
                raise EngineError(f"polynomial belongs to {terms.pres.name}, not {self.name}")
            return terms.terms
        return terms

    def check_degree(self, w: tuple) -> None:
        if not self.confluent and self.completion_degree and len(w) > self.completion_degree \
                and self.added_rules:
            raise DegreeBoundError(
                f"word of length {len(w)} exceeds completion degree "
                f"{self.completion_degree} of {self.name}; recomplete first")

    def normalize_word(self, w: tuple) -> dict:
        nf = self._cache.get(w)
        if nf is None:
            self.check_degree(w)
            nf = kernels.reduce_terms({w: ONE}, self._rules, self._lengths, MAX_PASSES)
            if len(self._cache) > 400000:
                self._cache.clear()
            self._cache[w] = nf
        return nf

    def normalize_terms(self, terms) -> dict:
        terms = self._resolve(terms)
        acc: dict = {}
        for w, c in terms.items():
            if not c:
                continue
            c = as_scalar(c)
            for v, cv in self.normalize_word(tuple(w)).items():
                val = c * cv if not c.is_one() else cv
                old = acc.get(v)
                if old is not None:
                    val = old + val
                    if val:
                        acc[v] = val
                    else:
                        del acc[v]
                elif val:
                    acc[v] = val
        return acc

    def normalize_unordered(self, terms, rng) -> dict:
        """Reduce with randomly chosen redexes (for uniqueness tests)."""
        current = {tuple(w): as_scalar(c) for w, c in self._resolve(terms).items() if c}
        out: dict = {}
        steps = 0
        while current:
            steps += 1
            if steps > MAX_PASSES:
                raise kernels.ReductionLimit("random reduction did not terminate")
            w = rng.choice(sorted(current, key=self.order_key))
            c = current.pop(w)
            hits = [(i, L) for i in range(len(w)) for L in self._lengths
                    if i + L <= len(w) and w[i:i + L] in self._rules]
            if not hits:
                v = out.get(w, ZERO) + c
                if v:
                    out[w] = v
                else:
                    out.pop(w, None)
                continue
            i, L = rng.choice(hits)
            for v, cv in self._rules[w[i:i + L]]:
                nw = w[:i] + v + w[i + L:]
                val = current.get(nw, ZERO) + c * cv
                if val:
                    current[nw] = val
                else:
                    current.pop(nw, None)
        return out

    # -- elements ---------------------------------------------------------
    def poly(self, terms=None) -> "NCPoly":
        if terms is None:
            return NCPoly(self, {})
        return NCPoly(self, self.normalize_terms(terms))

    def gen(self, name: str) -> "NCPoly":
        if name not in self.index:
            raise UnknownGenerator(name)
        return self.poly({(self.index[name],): ONE})

    def gens(self, *names):
        return [self.gen(n) for n in names]

    def scalar(self, c) -> "NCPoly":
        c = as_scalar(c)
        return NCPoly(self, {(): c} if c else {})

    def one(self) -> "NCPoly":
        return self.scalar(ONE)

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def parse(self, text: str, pmode=None) -> "NCPoly":
        from .expr import parse_expression

        return parse_expression(text, self, pmode=pmode)

    # -- zero test with eliminations -------------------------------------
    def canonical(self, p) -> "NCPoly":
        """Representative without eliminated generators.

        Negative powers are cleared by a central factor, which does not affect
        whether the element vanishes.
        """
        terms = self.normalize_terms(p)
        for a, value in self.eliminations.items():
            ainv = self.inverse[a]
            need = max((w.count(ainv) for w in terms), default=0)
            if need:
                terms = self.normalize_terms(kernels.multiply_terms(terms, {(a,) * need: ONE}))
            if any(a in w for w in terms):
                terms = self._substitute_letter(terms, a, value)
        return NCPoly(self, terms)

    def _substitute_letter(self, terms, a, value):
        out: dict = {}
        for w, c in terms.items():
            piece = {(): c}
            run: list = []
            for x in w:
                if x == a:
                    if run:
                        piece = kernels.multiply_terms(piece, {tuple(run): ONE})
                        run = []
                    piece = self.normalize_terms(kernels.multiply_terms(piece, value))
                else:
                    run.append(x)
            if run:
                piece = kernels.multiply_terms(piece, {tuple(run): ONE})
            for v, cv in self.normalize_terms(piece).items():
                val = out.get(v, ZERO) + cv
                if val:
                    out[v] = val
                else:
                    out.pop(v, None)
        return out

    def is_zero(self, p) -> bool:
        if not self.eliminations:
            return not self.normalize_terms(p)
        return self.canonical(p).is_zero()

    # -- involution -------------------------------------------------------
    def set_involution(self, images: dict, conjugate: bool = True) -> None:
        table = {}
        for n, img in images.items():
            table[self.index[n]] = dict(img.terms if isinstance(img, NCPoly) else img)
        for a, b in self.inverse.items():
            if a in table and b not in table:
                img = table[a]
                if len(img) != 1:
                    raise EngineError(f"cannot invert image of {self.names[a]}")
                (w, c), = img.items()
                if any(x not in self.inverse for x in w):
                    raise EngineError(f"image of {self.names[a]} is not invertible")
                table[b] = {tuple(self.inverse[x] for x in reversed(w)): c.inverse()}
        missing = [self.names[k] for k in range(len(self.names)) if k not in table]
        if missing:
            raise EngineError(f"involution undefined on {missing}")
        self.involution = (table, conjugate)

    def word_str_list(self):
        return list(self.names)

    # -- serialization ----------------------------------------------------
    def to_text(self) -> str:
        from .expr import format_terms

        lines = [f"presentation {self.name}"]
        lines.append("generators " + " ".join(self.base_generators))
        if self.invertible_names:
            lines.append("invertible " + " ".join(self.invertible_names))
        for n in self.base_generators:
            vec = self.grading[self.index[n]]
            lines.append(f"grading {n} " + " ".join(str(x) for x in vec))
        for w in self._raw_weights:
            items = " ".join(f"{k}={v}" for k, v in sorted(w.items(), key=lambda kv: self.index[kv[0]]))
            lines.append("weights " + items)
        for lhs, rhs in sorted(self._rules.items(), key=lambda kv: self.order_key(kv[0])):
            lines.append(f"rule {self.word_str(lhs)} -> {format_terms(self, dict(rhs))}")
        if self.involution is not None:
            table, conj = self.involution
            for n in self.base_generators:
                lines.append(f"involution {n} -> {format_terms(self, table[self.index[n]])}")
            lines.append(f"involution_conjugate {'yes' if conj else 'no'}")
        for a, val in sorted(self.eliminations.items()):
            lines.append(f"eliminate {self.names[a]} = {format_terms(self, val)}")
        lines.append(f"completion_degree {self.completion_degree}")
        lines.append(f"confluent {'yes' if self.confluent else 'no'}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        from .expr import parse_terms

        fields: dict = {"grading": {}, "weights": [], "rules": [], "inv": {}, "elim": [],
                        "invertible": []}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, rest = line.partition(" ")
            if key == "presentation":
                fields["name"] = rest.strip()
            elif key == "generators":
                fields["generators"] = rest.split()
            elif key == "invertible":
                fields["invertible"] = rest.split()
            elif key == "grading":
                parts = rest.split()
                fields["grading"][parts[0]] = tuple(int(x) for x in parts[1:])
            elif key == "weights":
                fields["weights"].append({k: int(v) for k, v in
                                          (item.split("=") for item in rest.split())})
            elif key == "rule":
                lhs, _, rhs = rest.partition("->")
                fields["rules"].append((lhs.strip(), rhs.strip()))
            elif key == "involution":
                g, _, img = rest.partition("->")
                fields["inv"][g.strip()] = img.strip()
            elif key == "involution_conjugate":
                fields["inv_conj"] = rest.strip() == "yes"
            elif key == "eliminate":
                g, _, val = rest.partition("=")
                fields["elim"].append((g.strip(), val.strip()))
            elif key == "completion_degree":
                fields["completion_degree"] = int(rest)
            elif key == "confluent":
                fields["confluent"] = rest.strip() == "yes"
            else:
                raise EngineError(f"unknown presentation field {key!r}")
        pres = cls(fields["name"], fields["generators"], invertible=fields["invertible"],
                   grading=fields["grading"] or None, weights=fields["weights"] or None)
        for lhs, rhs in fields["rules"]:
            (word, _c), = parse_terms(lhs, pres).items()
            if word in pres._rules:
                continue
            pres._install(word, parse_terms(rhs, pres))
        if fields["inv"]:
            pres.set_involution({g: parse_terms(v, pres) for g, v in fields["inv"].items()},
                                conjugate=fields.get("inv_conj", True))
        for g, val in fields["elim"]:
            pres.set_elimination(g, parse_terms(val, pres))
        pres.completion_degree = fields.get("completion_degree", 0)
        pres.confluent = fields.get("confluent", False)
        return pres

    def __repr__(self):
        return f"<Presentation {self.name}: {len(self.names)} symbols, {len(self._rules)} rules>"


class NCPoly:
    """Element of a presented algebra, stored in normal form."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: Presentation, terms: dict):
        self.pres = pres
        self.terms = terms

    def _coerce(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            if other.pres is not self.pres:
                raise EngineError(f"mixing elements of {self.pres.name} and {other.pres.name}")
            return other
        return self.pres.scalar(other)

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for w, c in o.terms.items():
            v = out.get(w)
            if v is None:
                out[w] = c
            else:
                v = v + c
                if v:
                    out[w] = v
                else:
                    del out[w]
        return NCPoly(self.pres, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.pres, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "NCPoly":
        c = as_scalar(c)
        if not c:
            return NCPoly(self.pres, {})
        return NCPoly(self.pres, {w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            return self.scale(other)
        o = self._coerce(other)
        prod = kernels.multiply_terms(self.terms, o.terms)
        return NCPoly(self.pres, self.pres.normalize_terms(prod))

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(as_scalar(other).inverse())

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) == 1:
                (w, c), = self.terms.items()
                if all(a in self.pres.inverse for a in w):
                    inv = NCPoly(self.pres, {tuple(self.pres.inverse[a] for a in reversed(w)):
                                             c.inverse()})
                    return inv ** (-n)
            raise EngineError("negative power of a non-invertible element")
        out = self.pres.one()
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except EngineError:
            return NotImplemented
        if self.pres.eliminations:
            return self.pres.is_zero(self - o)
        return self.terms == o.terms

    __hash__ = None

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def multidegrees(self) -> set:
        return {self.pres.multidegree(w) for w in self.terms}

    def leading(self):
        if not self.terms:
            return None
        w = max(self.terms, key=self.pres.order_key)
        return w, self.terms[w]

    def coefficient(self, word) -> Scalar:
        if isinstance(word, str):
            word = self.pres.word(*word.split("*")) if word != "1" else ()
        return self.terms.get(tuple(word), ZERO)

    def map_coefficients(self, f) -> "NCPoly":
        return self.pres.poly({w: f(c) for w, c in self.terms.items()})

    def dagger(self) -> "NCPoly":
        return apply_involution(self, self.pres)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self.pres.order_key(kv[0]), reverse=True)

    def __str__(self):
        from .expr import format_terms

        return format_terms(self.pres, self.terms)

    def __repr__(self):
        return f"NCPoly({self.pres.name}: {self})"


# ---------------------------------------------------------------------------
# module-level operations


def normalize(p, pres: Presentation) -> NCPoly:
    """Normal form of ``p`` (an NCPoly, a terms dict, or an expression string)."""
    if isinstance(p, str):
        return pres.parse(p)
    if isinstance(p, NCPoly) and p.pres is not pres:
        raise EngineError("polynomial belongs to another presentation")
    return pres.poly(p.terms if isinstance(p, NCPoly) else p)


def _overlaps(pres: Presentation, max_degree: int):
    lhss = sorted(pres._rules, key=pres.order_key)
    out = []
    for a in lhss:
        for b in lhss:
            # suffix of a equals prefix of b
            for k in range(1, min(len(a), len(b))):
                if a[-k:] == b[:k]:
                    w = a + b[k:]
                    if len(w) <= max_degree:
                        out.append((w, a, 0, b, len(a) - k))
            # b strictly inside a
            if a != b and len(b) < len(a):
                for j in range(len(a) - len(b) + 1):
                    if a[j:j + len(b)] == b and len(a) <= max_degree:
                        out.append((a, a, 0, b, j))
    return out


def _max_overlap_length(pres: Presentation) -> int:
    lens = [len(l) for l in pres._rules]
    return 2 * max(lens) - 1 if lens else 0


def _reduce_at(pres, w, lhs, pos):
    rhs = pres._rules[lhs]
    pre, post = w[:pos], w[pos + len(lhs):]
    terms = {}
    for v, c in rhs:
        nw = pre + v + post
        terms[nw] = terms.get(nw, ZERO) + c
    return pres.normalize_terms(terms)


def check_local_confluence(pres: Presentation, max_degree: int, accept=None) -> list:
    """Unresolved overlap ambiguities with overlap word length <= max_degree.

    ``accept`` optionally restricts the check to overlap words it returns
    True for; with rules homogeneous for some grading this certifies the
    graded pieces the filter keeps.
    """
    found = []
    seen = set()
    for w, a, pa, b, pb in _overlaps(pres, max_degree):
        key = (w, a, pa, b, pb)
        if key in seen or (accept is not None and not accept(w)):
            continue
        seen.add(key)
        left = _reduce_at(pres, w, a, pa)
        right = _reduce_at(pres, w, b, pb)
        if left != right:
            found.append(Ambiguity(w, NCPoly(pres, left), NCPoly(pres, right)))
    found.sort(key=lambda amb: pres.order_key(amb.overlap_word))
    return found


def _interreduce(pres: Presentation) -> None:
    changed = True
    while changed:
        changed = False
        for lhs in sorted(pres._rules, key=pres.order_key, reverse=True):
            rhs = dict(pres._rules[lhs])
            others = {l: r for l, r in pres._rules.items() if l != lhs}
            lens = tuple(sorted({len(l) for l in others}, reverse=True))
            if kernels.find_redex(lhs, others, lens) is not None:
                del pres._rules[lhs]
                pres._lengths = tuple(sorted({len(l) for l in pres._rules}, reverse=True))
                pres._cache.clear()
                rel = {lhs: ONE}
                for w, c in rhs.items():
                    rel[w] = rel.get(w, ZERO) - c
                pres.add_relation(rel)
                changed = True
                break
        if not changed:
            for lhs, rhs in list(pres._rules.items()):
                red = pres.normalize_terms(dict(rhs))
                if red != dict(rhs):
                    pres._rules[lhs] = tuple(red.items())
                    pres._cache.clear()


def complete(pres: Presentation, max_degree: int = DEFAULT_COMPLETION_DEGREE,
             max_new_rules: int = 500, accept=None) -> Presentation:
    """Degree-truncated overlap completion; returns a completed copy."""
    if max_degree < 2:
        raise EngineError("max_degree must be at least 2")
    out = pres.copy()
    new_count = 0
    while True:
        ambs = check_local_confluence(out, max_degree, accept)
        if not ambs:
            break
        progress = False
        for amb in ambs:
            diff = out.normalize_terms(amb.difference().terms)
            if diff:
                out.add_relation(diff)
                lead = max(diff, key=out.order_key)
                out.added_rules.append(lead)
                new_count += 1
                progress = True
                if new_count > max_new_rules:
                    raise CompletionError(
                        f"completion of {pres.name} exceeded {max_new_rules} new rules", ambs)
                break
        if not progress:
            break
        _interreduce(out)
    out.completion_degree = max_degree
    out.confluent = max_degree >= _max_overlap_length(out) and not check_local_confluence(
        out, max_degree, accept)
    return out


def hilbert_dimensions(pres: Presentation, max_degree: int, multigraded: bool = False) -> dict:
    """Number of normal words per degree (total, or multidegree if requested)."""
    if pres.inverse:
        raise EngineError("graded pieces are infinite-dimensional with invertible generators")
    if not pres.confluent and pres.completion_degree < max_degree:
        raise DegreeBoundError(f"{pres.name} is certified only to degree {pres.completion_degree}")
    if any(min(v) < 0 or sum(v) <= 0 for v in pres.grading):
        raise EngineError("hilbert_dimensions needs positive grading")
    layers = kernels.irreducible_words(tuple(range(len(pres.names))), pres._rules,
                                       pres._lengths, max_degree)
    counts: dict = {}
    for layer in layers:
        for w in layer:
            md = pres.multidegree(w)
            if sum(md) > max_degree:
                continue
            key = md if multigraded else sum(md)
            counts[key] = counts.get(key, 0) + 1
    if not multigraded:
        return {d: counts.get(d, 0) for d in range(max_degree + 1)}
    return dict(sorted(counts.items()))


def _image_of_word(w, table, dst: Presentation, anti: bool, conj: bool, coeff: Scalar):
    seq = reversed(w) if anti else w
    acc = {(): coeff.conjugate() if conj else coeff}
    for a in seq:
        img = table[a]
        acc = dst.normalize_terms(kernels.multiply_terms(acc, img))
        if not acc:
            break
    return acc


def apply_involution(p: NCPoly, pres: Presentation | None = None) -> NCPoly:
    """Anti-linear anti-automorphism installed on the presentation."""
    pres = pres or p.pres
    if pres.involution is None:
        raise EngineError(f"no involution defined on {pres.name}")
    table, conj = pres.involution
    out: dict = {}
    for w, c in p.terms.items():
        for v, cv in _image_of_word(w, table, pres, True, conj, c).items():
            val = out.get(v, ZERO) + cv
            if val:
                out[v] = val
            else:
                out.pop(v, None)
    return NCPoly(pres, out)


@dataclass
class HomomorphismReport:
    name: str
    entries: list = field(default_factory=list)  # (relation text, residual NCPoly)

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for _, r in self.entries)

    def failures(self):
        return [(t, r) for t, r in self.entries if not r.is_zero()]

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.name}: {status}"]
        for t, r in self.entries:
            lines.append(f"  {t}: {'0' if r.is_zero() else r}")
        return "\n".join(lines)


def image_table(src: Presentation, dst: Presentation, images: dict) -> dict:
    table = {}
    for n, img in images.items():
        if n not in src.index:
            raise UnknownGenerator(n)
        if isinstance(img, str):
            img = dst.parse(img)
        if isinstance(img, NCPoly):
            if img.pres is not dst:
                raise EngineError("images must lie in the target presentation")
            img = img.terms
        table[src.index[n]] = dict(img)
    for a, b in src.inverse.items():
        if a in table and b not in table:
            img = table[a]
            if len(img) == 1:
                (w, c), = img.items()
                if all(x in dst.inverse for x in w):
                    table[b] = {tuple(dst.inverse[x] for x in reversed(w)): c.inverse()}
    missing = [src.names[k] for k in range(len(src.names)) if k not in table]
    if missing:
        raise EngineError(f"images missing for {missing}")
    return table


def map_poly(p: NCPoly, dst: Presentation, table: dict, anti=False, conjugate_coeffs=False):
    out: dict = {}
    for w, c in p.terms.items():
        for v, cv in _image_of_word(w, table, dst, anti, conjugate_coeffs, c).items():
            val = out.get(v, ZERO) + cv
            if val:
                out[v] = val
            else:
                out.pop(v, None)
    return NCPoly(dst, out)


def verify_homomorphism(src: Presentation, dst: Presentation, images: dict, anti: bool = False,
                        conjugate_coeffs: bool = False, name: str | None = None,
                        relations=None) -> HomomorphismReport:
    """Residual of every source relation under the generator images.

    ``relations`` defaults to the source rules (``lhs - rhs``); extra defining
    relations can be passed as NCPolys of ``src``.
    """
    table = image_table(src, dst, images)
    report = HomomorphismReport(name or f"{src.name} -> {dst.name}")
    rels = []
    if relations is None:
        for lhs, rhs in sorted(src._rules.items(), key=lambda kv: src.order_key(kv[0])):
            terms = {lhs: ONE}
            for w, c in rhs:
                terms[w] = terms.get(w, ZERO) - c
            rels.append((f"{src.word_str(lhs)} -> {NCPoly(src, dict(rhs))}", terms))
    else:
        for r in relations:
            rels.append((str(r), r.terms))
    for text, terms in rels:
        img = map_poly(NCPoly(src, terms), dst, table, anti, conjugate_coeffs)
        if dst.eliminations:
            img = dst.canonical(img)
        report.entries.append((text, img))
    return report


def tensor_square(pres: Presentation) -> Presentation:
    """``A (x) A`` with generators ``g_L = g(x)1`` and ``g_R = 1(x)g``."""
    gens = [f"{g}_L" for g in pres.base_generators] + [f"{g}_R" for g in pres.base_generators]
    inv = [f"{g}_L" for g in pres.invertible_names] + [f"{g}_R" for g in pres.invertible_names]
    grading = {}
    for g in pres.base_generators:
        v = pres.grading[pres.index[g]]
        grading[f"{g}_L"] = v + (0,) * len(v)
        grading[f"{g}_R"] = (0,) * len(v) + v
    weights = []
    for w in pres._raw_weights:
        ww = {}
        for k, v in w.items():
            ww[f"{k}_L"] = v
            ww[f"{k}_R"] = v
        weights.append(ww)
    out = Presentation(f"{pres.name}_tensor2", gens, invertible=inv, grading=grading,
                       weights=weights or None)
    for side in ("L", "R"):
        mp = {k: out.index[f"{n[:-3]}_{side}^-1" if n.endswith("^-1") else f"{n}_{side}"]
              for k, n in enumerate(pres.names)}
        for lhs, rhs in pres._rules.items():
            wl = tuple(mp[a] for a in lhs)
            if wl in out._rules:
                continue
            out._install(wl, {tuple(mp[a] for a in w): c for w, c in rhs})
    nl = len(pres.names)
    left_syms = [out.index[f"{n[:-3]}_L^-1" if n.endswith("^-1") else f"{n}_L"]
                 for n in pres.names]
    right_syms = [out.index[f"{n[:-3]}_R^-1" if n.endswith("^-1") else f"{n}_R"]
                  for n in pres.names]
    assert len(left_syms) == nl
    for r in right_syms:
        for l in left_syms:
            out._install((r, l), {(l, r): ONE})
    out.completion_degree = pres.completion_degree
    out.confluent = pres.confluent
    return out


def free_words(pres: Presentation, length: int, alphabet=None):
    alphabet = alphabet if alphabet is not None else [k for k in range(len(pres.names))]
    return [tuple(w) for w in itertools.product(alphabet, repeat=length)]
