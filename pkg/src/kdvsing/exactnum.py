"""Exact arithmetic substrate.

Three carriers live here:

* rationals, backed by :class:`gmpy2.mpq` (always reduced, never rounded);
* :class:`Projective`, the projective line Q u {inf} with an explicit
  indeterminate outcome;
* :class:`LaurentSeries`, truncated formal Laurent series in a single
  indeterminate ``eps`` with rational coefficients.

Both :class:`Projective` and :class:`LaurentSeries` overload the arithmetic
operators, so code such as ``u1 + a / u3 - b / u2`` runs unchanged on either.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from gmpy2 import mpq

from .errors import ExactZeroReciprocal, UndeterminedLeading

Rational = type(mpq())

RationalLike = Union[int, Fraction, str, "Rational"]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")

#: relative precision used when inverting an *exact* non-monomial series
DEFAULT_PRECISION = 16


def qq(x) -> Rational:
    """Coerce ``x`` to an exact rational.

    Accepts ints, :class:`fractions.Fraction`, ``mpq`` and strings of the
    form ``"p"`` or ``"p/q"``. Floats and decimal strings are rejected.
    """
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        m = _RATIONAL_RE.match(x)
        if not m:
            raise ValueError(f"not an exact rational: {x!r}")
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ZeroDivisionError(f"zero denominator in {x!r}")
        return mpq(int(m.group(1)), den)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an exact rational")
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def qstr(x) -> str:
    """Canonical ``"p/q"`` (or ``"p"``) string of a rational."""
    x = qq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def height(x) -> int:
    """Naive height max(|num|, den) of a reduced rational."""
    x = qq(x)
    return max(abs(int(x.numerator)), int(x.denominator))


# ---------------------------------------------------------------------------
# Projective line
# ---------------------------------------------------------------------------

FINITE = "finite"
INF = "infinity"
INDET = "indeterminate"


class Projective:
    """A point of Q u {inf}, or the absorbing Indeterminate outcome.

    Infinity is unsigned: ``-inf == inf``. The forms 0/0, inf/inf, 0*inf,
    inf+inf and inf-inf all produce Indeterminate; so does any operation
    with an Indeterminate operand.
    """

    __slots__ = ("kind", "value")

    def __init__(self, kind: str, value: Rational | None = None):
        self.kind = kind
        self.value = value

    @classmethod
    def finite(cls, x) -> "Projective":
        return cls(FINITE, qq(x))

    @classmethod
    def of(cls, x) -> "Projective":
        if isinstance(x, Projective):
            return x
        return cls.finite(x)

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def is_infinity(self) -> bool:
        return self.kind == INF

    @property
    def is_indeterminate(self) -> bool:
        return self.kind == INDET

    @property
    def is_zero(self) -> bool:
        return self.kind == FINITE and self.value == 0

    def __eq__(self, other):
        try:
            other = Projective.of(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.kind == other.kind and self.value == other.value

    def __hash__(self):
        return hash((self.kind, self.value))

    def __repr__(self):
        if self.kind == FINITE:
            return f"Projective({qstr(self.value)})"
        return "INFINITY" if self.kind == INF else "INDETERMINATE"

    def __str__(self):
        if self.kind == FINITE:
            return qstr(self.value)
        return "∞" if self.kind == INF else "?"

    def __neg__(self):
        if self.kind == FINITE:
            return Projective(FINITE, -self.value)
        return self

    def __add__(self, other):
        return proj_arith("add", self, other)

    def __radd__(self, other):
        return proj_arith("add", other, self)

    def __sub__(self, other):
        return proj_arith("sub", self, other)

    def __rsub__(self, other):
        return proj_arith("sub", other, self)

    def __mul__(self, other):
        return proj_arith("mul", self, other)

    def __rmul__(self, other):
        return proj_arith("mul", other, self)

    def __truediv__(self, other):
        return proj_arith("div", self, other)

    def __rtruediv__(self, other):
        return proj_arith("div", other, self)


INFINITY = Projective(INF)
INDETERMINATE = Projective(INDET)


def proj_arith(op: str, x, y) -> Projective:
    """Apply ``op`` in {"add", "sub", "mul", "div"} on the projective line."""
    x = Projective.of(x)
    y = Projective.of(y)
    if x.kind == INDET or y.kind == INDET:
        return INDETERMINATE
    if op in ("add", "sub"):
        if x.kind == INF and y.kind == INF:
            return INDETERMINATE
        if x.kind == INF or y.kind == INF:
            return INFINITY
        v = x.value + y.value if op == "add" else x.value - y.value
        return Projective(FINITE, v)
    if op == "mul":
        if x.kind == INF or y.kind == INF:
            other = y if x.kind == INF else x
            if other.kind == FINITE and other.value == 0:
                return INDETERMINATE
            return INFINITY
        return Projective(FINITE, x.value * y.value)
    if op == "div":
        if x.kind == INF:
            return INDETERMINATE if y.kind == INF else INFINITY
        if y.kind == INF:
            return Projective(FINITE, mpq(0))
        if y.value == 0:
            return INDETERMINATE if x.value == 0 else INFINITY
        return Projective(FINITE, x.value / y.value)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Prime field, used as a fast homomorphic image of Q
# ---------------------------------------------------------------------------

MODULUS = (1 << 61) - 1


class GF:
    """An element of Z/pZ with p = 2^61 - 1.

    Rationals map in through ``GF.of``; equality mod p is a Schwartz-Zippel
    style witness for equality over Q.
    """

    __slots__ = ("v",)

    def __init__(self, v: int = 0):
        self.v = v % MODULUS

    @classmethod
    def of(cls, x) -> "GF":
        if isinstance(x, GF):
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return cls(x)
        r = qq(x)
        den = int(r.denominator) % MODULUS
        if den == 0:
            raise ZeroDivisionError("denominator divisible by the modulus")
        return cls(int(r.numerator) * pow(den, -1, MODULUS))

    @classmethod
    def _raw(cls, v: int) -> "GF":
        obj = object.__new__(cls)
        obj.v = v
        return obj

    def __eq__(self, other):
        if isinstance(other, GF):
            return self.v == other.v
        try:
            return self.v == GF.of(other).v
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        return hash(("GF", self.v))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"GF({self.v})"

    def __neg__(self):
        return GF._raw((-self.v) % MODULUS)

    def __add__(self, other):
        o = _gf_operand(other)
        if o is None:
            return NotImplemented
        return GF._raw((self.v + o) % MODULUS)

    __radd__ = __add__

    def __sub__(self, other):
        o = _gf_operand(other)
        if o is None:
            return NotImplemented
        return GF._raw((self.v - o) % MODULUS)

    def __rsub__(self, other):
        o = _gf_operand(other)
        if o is None:
            return NotImplemented
        return GF._raw((o - self.v) % MODULUS)

    def __mul__(self, other):
        o = _gf_operand(other)
        if o is None:
            return NotImplemented
        return GF._raw((self.v * o) % MODULUS)

    __rmul__ = __mul__

    def inverse(self) -> "GF":
        if self.v == 0:
            raise ZeroDivisionError("inverse of 0 in GF(p)")
        return GF._raw(pow(self.v, -1, MODULUS))

    def __truediv__(self, other):
        o = _gf_operand(other)
        if o is None:
            return NotImplemented
        if o == 0:
            raise ZeroDivisionError("division by 0 in GF(p)")
        return GF._raw(self.v * pow(o, -1, MODULUS) % MODULUS)

    def __rtruediv__(self, other):
        o = _gf_operand(other)
        if o is None:
            return NotImplemented
        return GF._raw(o * self.inverse().v % MODULUS)

    def __pow__(self, n: int):
        if n < 0:
            return GF._raw(pow(self.inverse().v, -n, MODULUS))
        return GF._raw(pow(self.v, n, MODULUS))


def _gf_operand(x):
    """Residue of a scalar operand, or None for types GF does not handle."""
    if isinstance(x, GF):
        return x.v
    if isinstance(x, (int, Rational, Fraction)) and not isinstance(x, bool):
        return GF.of(x).v
    return None


def _coef(c):
    return c if isinstance(c, GF) else qq(c)


# ---------------------------------------------------------------------------
# Truncated Laurent series
# ---------------------------------------------------------------------------

_ZERO = mpq(0)
_ONE = mpq(1)


def _min_order(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LaurentSeries:
    """A truncated Laurent series ``sum c_k eps^k + O(eps^order)``.

    ``valuation`` is the exponent of the first nonzero coefficient and
    ``coeffs`` lists the coefficients from there up to ``order - 1``.
    ``order`` is ``None`` for series known exactly (Laurent polynomials,
    including lifted constants).

    Two degenerate states exist and are kept apart:

    * :data:`EXACT_ZERO` (``valuation is None`` and ``order is None``);
    * an *undetermined* series ``O(eps^order)`` whose known coefficients all
      cancelled (``valuation is None`` with a finite ``order``).

    Instances are immutable.
    """

    __slots__ = ("valuation", "coeffs", "order")

    def __init__(self, coeffs: Iterable = (), start: int = 0, order: int | None = None):
        val, cs, order = _normalize(start, [_coef(c) for c in coeffs], order)
        self.valuation = val
        self.coeffs = cs
        self.order = order

    @classmethod
    def _raw(cls, valuation, coeffs, order) -> "LaurentSeries":
        obj = object.__new__(cls)
        obj.valuation = valuation
        obj.coeffs = coeffs
        obj.order = order
        return obj

    @classmethod
    def _make(cls, start, coeffs: list, order) -> "LaurentSeries":
        return cls._raw(*_normalize(start, coeffs, order))

    @classmethod
    def constant(cls, c) -> "LaurentSeries":
        c = _coef(c)
        if c == 0:
            return EXACT_ZERO
        return cls._raw(0, (c,), None)

    @classmethod
    def epsilon(cls, order: int, scale=1) -> "LaurentSeries":
        """The seed ``scale * eps + O(eps^order)``."""
        if order <= 1:
            raise ValueError("order must exceed the valuation 1")
        return cls._make(1, [_coef(scale)], order)

    @classmethod
    def monomial(cls, c, exponent: int, order: int | None = None) -> "LaurentSeries":
        return cls._make(exponent, [_coef(c)], order)

    @classmethod
    def undetermined(cls, order: int) -> "LaurentSeries":
        return cls._raw(None, (), order)

    # -- predicates ---------------------------------------------------------

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation is None and self.order is None

    @property
    def is_undetermined(self) -> bool:
        return self.valuation is None and self.order is not None

    @property
    def is_exact(self) -> bool:
        return self.order is None

    @property
    def leading(self) -> Rational:
        if self.valuation is None:
            raise UndeterminedLeading("series has no known nonzero coefficient")
        return self.coeffs[0]

    @property
    def precision(self) -> int | None:
        """Number of known coefficients from the valuation on (None if exact)."""
        if self.order is None:
            return None
        if self.valuation is None:
            return 0
        return self.order - self.valuation

    def coefficient(self, exponent: int) -> Rational:
        """Coefficient of ``eps**exponent``; raises if beyond the truncation."""
        if self.order is not None and exponent >= self.order:
            raise UndeterminedLeading(
                f"coefficient of eps^{exponent} unknown (series is O(eps^{self.order}))"
            )
        if self.valuation is None or exponent < self.valuation:
            return _ZERO
        i = exponent - self.valuation
        return self.coeffs[i] if i < len(self.coeffs) else _ZERO

    def truncate(self, order: int) -> "LaurentSeries":
        return self._make(
            self.valuation if self.valuation is not None else order,
            list(self.coeffs),
            _min_order(self.order, order),
        )

    # -- equality / display -------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            try:
                other = _coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return (self.valuation, self.coeffs, self.order) == (
            other.valuation,
            other.coeffs,
            other.order,
        )

    def __hash__(self):
        return hash((self.valuation, self.coeffs, self.order))

    def __repr__(self):
        return f"LaurentSeries({self})"

    def __str__(self):
        if self.is_exact_zero:
            return "0"
        terms = []
        if self.valuation is not None:
            for i, c in enumerate(self.coeffs):
                if c == 0:
                    continue
                e = self.valuation + i
                mono = "" if e == 0 else ("ε" if e == 1 else f"ε^{e}")
                if mono and c in (1, -1):
                    body = mono
                elif mono:
                    body = f"{qstr(abs(c))}*{mono}"
                else:
                    body = qstr(abs(c))
                terms.append(("-" if c < 0 else "+", body))
        if self.order is not None:
            terms.append(("+", f"O(ε^{self.order})"))
        out = ""
        for k, (sign, body) in enumerate(terms):
            if k == 0:
                out = body if sign == "+" else "-" + body
            else:
                out += f" {sign} {body}"
        return out

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return self._raw(self.valuation, tuple(-c for c in self.coeffs), self.order)

    def __add__(self, other):
        return laurent_arith("add", self, other)

    def __radd__(self, other):
        return laurent_arith("add", other, self)

    def __sub__(self, other):
        return laurent_arith("sub", self, other)

    def __rsub__(self, other):
        return laurent_arith("sub", other, self)

    def __mul__(self, other):
        return laurent_arith("mul", self, other)

    def __rmul__(self, other):
        return laurent_arith("mul", other, self)

    def __truediv__(self, other):
        return laurent_arith("mul", self, laurent_recip(_coerce(other)))

    def __rtruediv__(self, other):
        return laurent_arith("mul", other, laurent_recip(self))


def _normalize(start: int, coeffs: list, order: int | None):
    if order is not None:
        coeffs = coeffs[: max(0, order - start)]
    i = 0
    n = len(coeffs)
    while i < n and coeffs[i] == 0:
        i += 1
    if i == n:
        return None, (), order
    start += i
    coeffs = coeffs[i:]
    if order is None:
        while coeffs[-1] == 0:
            coeffs.pop()
    else:
        missing = order - start - len(coeffs)
        if missing > 0:
            coeffs = coeffs + [coeffs[0] * 0] * missing
    return start, tuple(coeffs), order


EXACT_ZERO = LaurentSeries._raw(None, (), None)


def _coerce(x) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    return LaurentSeries.constant(x)


def laurent_arith(op: str, s, t) -> LaurentSeries:
    """Exact coefficientwise ``op`` in {"add", "sub", "mul"}.

    Truncation propagates as min(ord s, ord t) for add/sub and as
    min(val s + ord t, val t + ord s) for mul.
    """
    s = _coerce(s)
    t = _coerce(t)
    if op == "sub":
        t = -t
        op = "add"
    if op == "add":
        return _add(s, t)
    if op == "mul":
        return _mul(s, t)
    raise ValueError(f"unknown operation {op!r}")


def _all_gf(parts) -> bool:
    return all(isinstance(x.coeffs[0], GF) for x in parts if x.coeffs)


def _add(s: LaurentSeries, t: LaurentSeries) -> LaurentSeries:
    if s.is_exact_zero:
        return t
    if t.is_exact_zero:
        return s
    order = _min_order(s.order, t.order)
    parts = [x for x in (s, t) if x.valuation is not None]
    if not parts:
        return LaurentSeries.undetermined(order)
    start = min(x.valuation for x in parts)
    if order is None:
        end = max(x.valuation + len(x.coeffs) for x in parts)
    else:
        end = order
    if end <= start:
        return LaurentSeries.undetermined(order)
    if _all_gf(parts):
        iacc = [0] * (end - start)
        for x in parts:
            off = x.valuation - start
            for i, c in enumerate(x.coeffs):
                j = off + i
                if j >= len(iacc):
                    break
                iacc[j] += c.v
        return LaurentSeries._make(start, [GF(v) for v in iacc], order)
    acc = [_ZERO] * (end - start)
    for x in parts:
        off = x.valuation - start
        for i, c in enumerate(x.coeffs):
            j = off + i
            if j >= len(acc):
                break
            acc[j] = acc[j] + c
    return LaurentSeries._make(start, acc, order)


def _mul(s: LaurentSeries, t: LaurentSeries) -> LaurentSeries:
    if s.is_exact_zero or t.is_exact_zero:
        return EXACT_ZERO
    if s.valuation is None or t.valuation is None:
        # O(eps^k) times anything known
        if s.valuation is None and t.valuation is None:
            return LaurentSeries.undetermined(s.order + t.order)
        und, det = (s, t) if s.valuation is None else (t, s)
        return LaurentSeries.undetermined(und.order + det.valuation)
    vs, vt = s.valuation, t.valuation
    cand = []
    if t.order is not None:
        cand.append(vs + t.order)
    if s.order is not None:
        cand.append(vt + s.order)
    order = min(cand) if cand else None
    start = vs + vt
    cs, ct = s.coeffs, t.coeffs
    if order is None:
        n = len(cs) + len(ct) - 1
    else:
        n = order - start
    if _all_gf((s, t)):
        a_ = [c.v for c in cs]
        b_ = [c.v for c in ct]
        iacc = [0] * n
        for i in range(min(len(a_), n)):
            ci = a_[i]
            if ci == 0:
                continue
            for j in range(min(len(b_), n - i)):
                iacc[i + j] += ci * b_[j]
        return LaurentSeries._make(start, [GF(v) for v in iacc], order)
    acc = [_ZERO] * n
    for i in range(min(len(cs), n)):
        ci = cs[i]
        if ci == 0:
            continue
        for j in range(min(len(ct), n - i)):
            acc[i + j] += ci * ct[j]
    return LaurentSeries._make(start, acc, order)


def laurent_recip(s, precision: int = DEFAULT_PRECISION) -> LaurentSeries:
    """Multiplicative inverse, keeping the number of known coefficients.

    ``precision`` only matters for exact non-monomial input, which has no
    natural truncation.
    """
    s = _coerce(s)
    if s.is_exact_zero:
        raise ExactZeroReciprocal("reciprocal of an exactly-zero series")
    if s.valuation is None:
        raise UndeterminedLeading(f"cannot invert O(eps^{s.order})")
    v = s.valuation
    cs = s.coeffs
    m = len(cs)
    if s.order is None:
        if len(cs) == 1:
            return LaurentSeries._raw(-v, (1 / cs[0],), None)
        n = precision
    else:
        n = s.order - v
    if isinstance(cs[0], GF):
        ics = [c.v for c in cs]
        iinv0 = pow(ics[0], -1, MODULUS)
        iout = [iinv0]
        for k in range(1, n):
            acc = 0
            for i in range(1, min(k, m - 1) + 1):
                acc += ics[i] * iout[k - i]
            iout.append((-acc * iinv0) % MODULUS)
        return LaurentSeries._make(-v, [GF._raw(x) for x in iout], -v + n)
    inv0 = _ONE / cs[0]
    out = [inv0]
    for k in range(1, n):
        acc = _ZERO
        for i in range(1, min(k, m - 1) + 1):
            acc += cs[i] * out[k - i]
        out.append(-acc * inv0)
    return LaurentSeries._make(-v, out, -v + n)


# ---------------------------------------------------------------------------
# Entry signatures
# ---------------------------------------------------------------------------

ZERO_LIKE = "zero"
INF_LIKE = "inf"
REGULAR = "regular"


@dataclass(frozen=True)
class EntrySignature:
    """Limit behaviour of one coordinate as eps -> 0."""

    kind: str
    order: float = 0

    @property
    def is_regular(self) -> bool:
        return self.kind == REGULAR

    @property
    def glyph(self) -> str:
        if self.kind == REGULAR:
            return "u"
        base = "0" if self.kind == ZERO_LIKE else "∞"
        if self.order == 1:
            return base
        if self.order == math.inf:
            return base + "^inf"
        return f"{base}^{self.order}"

    def __str__(self):
        return self.glyph


def ZeroLike(order) -> EntrySignature:  # noqa: N802 - reads like a constructor
    return EntrySignature(ZERO_LIKE, order)


def InfLike(order) -> EntrySignature:  # noqa: N802
    return EntrySignature(INF_LIKE, order)


Regular = EntrySignature(REGULAR, 0)


def classify_entry(s) -> EntrySignature:
    """Classify a series by its valuation.

    Exact zero counts as ZeroLike of infinite order; an undetermined series
    raises :class:`UndeterminedLeading`.
    """
    if isinstance(s, Projective):
        if s.is_indeterminate:
            raise UndeterminedLeading("indeterminate projective value")
        if s.is_infinity:
            return InfLike(1)
        return ZeroLike(1) if s.value == 0 else Regular
    s = _coerce(s)
    if s.is_exact_zero:
        return ZeroLike(math.inf)
    if s.valuation is None:
        raise UndeterminedLeading(
            f"all known coefficients vanished below eps^{s.order}; raise the truncation order"
        )
    if s.valuation > 0:
        return ZeroLike(s.valuation)
    if s.valuation < 0:
        return InfLike(-s.valuation)
    return Regular


def limit_value(s) -> Projective:
    """Value at eps -> 0 on the projective line."""
    sig = classify_entry(s)
    if sig.kind == ZERO_LIKE:
        return Projective.finite(0)
    if sig.kind == INF_LIKE:
        return INFINITY
    return Projective.finite(s.coeffs[0])
