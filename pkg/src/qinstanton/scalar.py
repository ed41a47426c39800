"""Exact coefficients: rational functions in ``s = q**(1/4)`` over Q(i).

Every algebra in the package is defined over this field.  ``q`` and the
second parameter ``p = q**(+-1)`` are derived notations; only ``s`` is
atomic, so fractional powers such as ``q**(1/2)`` or ``p**(3/4)`` are plain
integer powers of ``s``.

A :class:`Scalar` is stored as ``num / den`` where ``num`` is a Laurent
polynomial in ``s`` and ``den`` an ordinary polynomial with nonzero constant
term and leading coefficient 1, coprime to ``num``.  Most coefficients that
occur in practice have ``den == 1``; that case never touches the gcd code.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from numbers import Rational

__all__ = [
    "GaussianRational",
    "Scalar",
    "PMode",
    "ZERO",
    "ONE",
    "I",
    "S",
    "q",
    "qpow",
    "spow",
    "as_scalar",
]

_F0 = Fraction(0)
_F1 = Fraction(1)


class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, str):
            other = GaussianRational.parse(re)
            re, im = other.re, other.im
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _make(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Rational)):
            return cls._make(Fraction(value), _F0)
        if isinstance(value, complex):
            if value.real != int(value.real) or value.imag != int(value.imag):
                raise TypeError("only integral complex literals are exact")
            return cls._make(Fraction(int(value.real)), Fraction(int(value.imag)))
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to GaussianRational")

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi`` with rational ``a``, ``b``."""
        t = text.strip().replace(" ", "")
        if t.startswith("(") and t.endswith(")"):
            t = t[1:-1]
        if not t:
            raise ValueError("empty Gaussian rational literal")
        if not t.endswith("i"):
            return cls._make(Fraction(t), _F0)
        body = t[:-1]
        # split at the last sign that is not the leading one or part of an exponent
        cut = -1
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-":
                cut = k
                break
        if cut == -1:
            re_txt, im_txt = "0", body
        else:
            re_txt, im_txt = body[:cut], body[cut:]
        if im_txt in ("", "+"):
            im_txt = "1"
        elif im_txt == "-":
            im_txt = "-1"
        return cls._make(Fraction(re_txt), Fraction(im_txt))

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GaussianRational._make(a * c, _F0)
        return GaussianRational._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("GaussianRational division by zero")
            return GaussianRational._make(1 / a, _F0)
        n = a * a + b * b
        return GaussianRational._make(a / n, -b / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._make(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({str(self)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        return f"{self.re}{sign}{'' if mag == 1 else mag}i"


GR = GaussianRational
_G0 = GR._make(_F0, _F0)
_G1 = GR._make(_F1, _F0)
_GI = GR._make(_F0, _F1)


# ---------------------------------------------------------------------------
# dense polynomial helpers (coefficient lists, lowest degree first)


def _trim(a):
    while a and not a[-1]:
        a.pop()
    return a


def _dense(terms: dict, shift: int) -> list:
    top = max(terms) - shift
    out = [_G0] * (top + 1)
    for e, c in terms.items():
        out[e - shift] = c
    return out


def _sparse(a: list, shift: int = 0) -> dict:
    return {k + shift: c for k, c in enumerate(a) if c}


def _divmod(a: list, b: list):
    a = list(a)
    lead_inv = b[-1].inverse()
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], _trim(a)
    quo = [_G0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if not c:
            continue
        f = c * lead_inv
        quo[k - db] = f
        for j in range(db + 1):
            if b[j]:
                a[k - db + j] = a[k - db + j] - f * b[j]
    return _trim(quo), _trim(a[:db])


def _gcd(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if not a:
        return [_G1]
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _mul_sparse(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            v = ca * cb
            if e in out:
                v = out[e] + v
                if v:
                    out[e] = v
                else:
                    del out[e]
            else:
                out[e] = v
    return out


def _add_sparse(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        if sign < 0:
            c = -c
        if e in out:
            v = out[e] + c
            if v:
                out[e] = v
            else:
                del out[e]
        else:
            out[e] = c
    return out


# ---------------------------------------------------------------------------


class Scalar:
    """Element of Q(i)(s), kept in canonical reduced form.

    ``num`` and ``den`` are dicts ``{exponent: GaussianRational}``; ``den`` is
    ``None`` when it equals 1.  Instances are immutable.
    """

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, value=0):
        if isinstance(value, Scalar):
            self._num, self._den, self._hash = value._num, value._den, None
            return
        if isinstance(value, str):
            from .expr import parse_scalar

            other = parse_scalar(value)
            self._num, self._den, self._hash = other._num, other._den, None
            return
        c = GR.coerce(value)
        self._num = {0: c} if c else {}
        self._den = None
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def _raw(cls, num: dict, den=None) -> "Scalar":
        obj = object.__new__(cls)
        obj._num = num
        obj._den = den
        obj._hash = None
        return obj

    @classmethod
    def from_laurent(cls, num: dict, den: dict | None = None) -> "Scalar":
        """Build ``num/den`` from exponent->coefficient dicts and normalize."""
        num = {int(e): GR.coerce(c) for e, c in num.items()}
        num = {e: c for e, c in num.items() if c}
        if den is None:
            return cls._raw(num)
        den = {int(e): GR.coerce(c) for e, c in den.items()}
        den = {e: c for e, c in den.items() if c}
        return cls._normalize(num, den)

    @classmethod
    def monomial(cls, coeff, exponent: int) -> "Scalar":
        c = GR.coerce(coeff)
        return cls._raw({int(exponent): c} if c else {})

    @classmethod
    def _normalize(cls, num: dict, den: dict) -> "Scalar":
        if not den:
            raise ZeroDivisionError("Scalar division by zero")
        if not num:
            return ZERO
        dlow = min(den)
        if len(den) == 1:
            # monomial denominator folds into the Laurent numerator
            (e, c), = den.items()
            inv = c.inverse()
            return cls._raw({k - e: v * inv for k, v in num.items()})
        nlow = min(num)
        a = _dense(num, nlow)
        b = _dense(den, dlow)
        g = _gcd(a, b)
        if len(g) > 1:
            a, r1 = _divmod(a, g)
            b, r2 = _divmod(b, g)
            assert not r1 and not r2
        lead_inv = b[-1].inverse()
        a = [c * lead_inv for c in a]
        b = [c * lead_inv for c in b]
        shift = nlow - dlow
        if len(b) == 1:
            return cls._raw(_sparse(a, shift))
        return cls._raw(_sparse(a, shift), _sparse(b))

    # -- accessors --------------------------------------------------------
    @property
    def num(self) -> dict:
        return dict(self._num)

    @property
    def den(self) -> dict:
        return dict(self._den) if self._den is not None else {0: _G1}

    def is_zero(self) -> bool:
        return not self._num

    def is_one(self) -> bool:
        return self._den is None and len(self._num) == 1 and self._num.get(0) == _G1

    def is_monomial(self) -> bool:
        return self._den is None and len(self._num) == 1

    def is_constant(self) -> bool:
        """True when the value does not depend on ``s``."""
        return self._den is None and (not self._num or set(self._num) == {0})

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError(f"{self} depends on s")
        return self._num.get(0, _G0)

    def __bool__(self):
        return bool(self._num)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        if not other._num:
            return self
        if not self._num:
            return other
        if self._den is None and other._den is None:
            return Scalar._raw(_add_sparse(self._num, other._num))
        ad, bd = self.den, other.den
        num = _add_sparse(_mul_sparse(self._num, bd), _mul_sparse(other._num, ad))
        return Scalar._normalize(num, _mul_sparse(ad, bd))

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({e: -c for e, c in self._num.items()}, self._den)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        a, b = self._num, other._num
        if not a or not b:
            return ZERO
        if self._den is None and other._den is None:
            if len(a) == 1 and len(b) == 1:
                (ea, ca), = a.items()
                (eb, cb), = b.items()
                return Scalar._raw({ea + eb: ca * cb})
            return Scalar._raw(_mul_sparse(a, b))
        return Scalar._normalize(_mul_sparse(a, b), _mul_sparse(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self._num:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._normalize(self.den, dict(self._num))

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        if other.is_monomial():
            (e, c), = other._num.items()
            inv = c.inverse()
            if self._den is None:
                return Scalar._raw({k - e: v * inv for k, v in self._num.items()})
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("Scalar exponents must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "Scalar":
        """Complex conjugation of coefficients; ``s`` is real and fixed."""
        num = {e: c.conjugate() for e, c in self._num.items()}
        if self._den is None:
            return Scalar._raw(num)
        return Scalar._raw(num, {e: c.conjugate() for e, c in self._den.items()})

    def substitute_s(self, power: int) -> "Scalar":
        """Apply ``s -> s**power`` (``power = -1`` inverts the parameter)."""
        if power == 0:
            raise ValueError("power must be nonzero")
        num = {e * power: c for e, c in self._num.items()}
        if self._den is None:
            return Scalar._raw(num)
        den = {e * power: c for e, c in self._den.items()}
        return Scalar._normalize(num, den)

    # -- evaluation -------------------------------------------------------
    def specialize(self, s0):
        """Evaluate at ``s = s0``.

        Exact for rational or Gaussian-rational ``s0`` (returns a
        :class:`GaussianRational`); floating for ``float``/``complex``.
        """
        exact = isinstance(s0, (int, Rational, GaussianRational))
        if exact:
            s0 = GR.coerce(s0)
        elif not isinstance(s0, (float, complex)):
            raise TypeError("s0 must be a rational, Gaussian rational, float or complex")

        def ev(poly):
            tot = _G0 if exact else 0j
            for e, c in poly.items():
                if exact:
                    if e < 0:
                        if not s0:
                            raise ZeroDivisionError(f"pole of {self} at s = 0")
                        term = c * _gpow(s0.inverse(), -e)
                    else:
                        term = c * _gpow(s0, e)
                else:
                    if e < 0 and s0 == 0:
                        raise ZeroDivisionError(f"pole of {self} at s = 0")
                    term = complex(c) * s0 ** e
                tot = tot + term
            return tot

        n = ev(self._num)
        d = ev(self._den) if self._den is not None else (_G1 if exact else 1.0)
        if not d:
            raise ZeroDivisionError(f"pole of {self} at s = {s0}")
        if exact:
            return n / d
        val = n / d
        return val.real if isinstance(val, complex) and val.imag == 0 else val

    def specialize_q(self, q0):
        """Evaluate at ``q = q0`` when only integral powers of ``q`` occur."""
        exps = list(self._num) + list(self._den or ())
        if any(e % 4 for e in exps):
            raise ValueError(f"{self} involves fractional powers of q")
        return self.substitute_s_div4().specialize(q0)

    def substitute_s_div4(self) -> "Scalar":
        num = {e // 4: c for e, c in self._num.items()}
        den = None if self._den is None else {e // 4: c for e, c in self._den.items()}
        return Scalar._raw(num, den)

    # -- comparison / printing -------------------------------------------
    def _key(self):
        n = tuple(sorted((e, c.re, c.im) for e, c in self._num.items()))
        d = None if self._den is None else tuple(sorted((e, c.re, c.im) for e, c in self._den.items()))
        return n, d

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        if self._den != other._den:
            return False
        return self._num == other._num

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash(self._key())
        return h

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    def __str__(self):
        n = _poly_str(self._num)
        if self._den is None:
            return n
        d = _poly_str(self._den)
        if len(self._num) > 1:
            n = f"({n})"
        return f"{n}/({d})"


def _gpow(base: GaussianRational, n: int) -> GaussianRational:
    out = _G1
    while n:
        if n & 1:
            out = out * base
        base = base * base
        n >>= 1
    return out


def _mono_str(e: int) -> str:
    if e == 0:
        return ""
    if e % 4 == 0:
        k = e // 4
        return "q" if k == 1 else f"q^{k}"
    return "s" if e == 1 else f"s^{e}"


def _coeff_str(c: GaussianRational) -> tuple[str, str]:
    """Return (sign, magnitude) for a coefficient; magnitude '' means 1."""
    if not c.im:
        sign = "-" if c.re < 0 else "+"
        mag = abs(c.re)
        return sign, "" if mag == 1 else str(mag)
    if not c.re:
        sign = "-" if c.im < 0 else "+"
        mag = abs(c.im)
        return sign, "i" if mag == 1 else f"{mag}*i"
    sign = "-" if c.im < 0 else "+"
    return "+", f"({c.re} {sign} {'' if abs(c.im) == 1 else str(abs(c.im)) + '*'}i)"


def _poly_str(poly: dict) -> str:
    if not poly:
        return "0"
    parts = []
    for e in sorted(poly, reverse=True):
        sign, mag = _coeff_str(poly[e])
        mono = _mono_str(e)
        if mono and mag:
            body = f"{mag}*{mono}"
        else:
            body = mag or mono or "1"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


ZERO = Scalar._raw({})
ONE = Scalar._raw({0: _G1})
I = Scalar._raw({0: _GI})
S = Scalar._raw({1: _G1})


def as_scalar(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, str):
        return Scalar(value)
    return Scalar(GR.coerce(value))


def spow(k: int) -> Scalar:
    """``s**k``."""
    return Scalar._raw({int(k): _G1})


def qpow(k) -> Scalar:
    """``q**k`` for ``k`` a multiple of 1/4."""
    e = Fraction(k) * 4
    if e.denominator != 1:
        raise ValueError(f"q^{k} is not an integral power of s = q^(1/4)")
    return spow(int(e))


q = qpow(1)


class PMode(enum.Enum):
    """Which of the two values ``p = q`` or ``p = q**-1`` is in force."""

    P_EQ_Q = "q"
    P_EQ_QINV = "qinv"

    @property
    def sign(self) -> int:
        return 1 if self is PMode.P_EQ_Q else -1

    def p(self, k=1) -> Scalar:
        """``p**k`` for ``k`` a multiple of 1/4."""
        return qpow(Fraction(k) * self.sign)

    @property
    def other(self) -> "PMode":
        return PMode.P_EQ_QINV if self is PMode.P_EQ_Q else PMode.P_EQ_Q

    @classmethod
    def parse(cls, text: str) -> "PMode":
        t = text.strip().lower()
        if t in ("q", "p=q", "p_eq_q"):
            return cls.P_EQ_Q
        if t in ("qinv", "q^-1", "1/q", "p=qinv", "p_eq_qinv"):
            return cls.P_EQ_QINV
        raise ValueError(f"unknown p mode {text!r}; use 'q' or 'qinv'")
