"""Three routes to the dynamical degree of phi_q.

* the express method: a value-count pattern of 0 and inf along a singularity
  pattern is turned into a characteristic polynomial whose largest real root
  estimates the degree growth;
* height growth: the logarithmic height of exact rational orbits grows like
  lambda^n;
* exact degree sequences: the last coordinate of each iterate, as a rational
  function of one parameter t, is reconstructed by interpolation.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy
from gmpy2 import mpq

from .errors import (
    EmptyPattern,
    InterpolationInconsistent,
    OrbitCollapse,
)
from .exactnum import GF, MODULUS, Rational, qq, qstr
from .mapping import MapParams, phi_forward, random_rational

LAMBDA = sympy.Symbol("lambda")
SINGLE_VARIABLE = "single_variable"
GENERIC_LINE = "generic_line"
MAX_RESAMPLES = 5
MAX_BOUND_DOUBLINGS = 3


# ---------------------------------------------------------------------------
# value-count patterns and the express method
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValueCountPattern:
    """Positions of 0 and inf along the last coordinate of a singularity pattern.

    The prefix offsets are absolute. When ``block_period`` is set, the block
    offsets repeat at ``block_start + k * block_period`` for every k >= 0.
    """

    zero_offsets_prefix: tuple[int, ...] = ()
    inf_offsets_prefix: tuple[int, ...] = ()
    repeating_block_zeros: tuple[int, ...] = ()
    repeating_block_infs: tuple[int, ...] = ()
    block_period: int | None = None
    block_start: int = 0

    def __post_init__(self):
        for name in (
            "zero_offsets_prefix",
            "inf_offsets_prefix",
            "repeating_block_zeros",
            "repeating_block_infs",
        ):
            vals = tuple(int(v) for v in getattr(self, name))
            if any(v < 0 for v in vals):
                raise ValueError(f"{name}: offsets must be non-negative")
            if len(set(vals)) != len(vals):
                raise ValueError(f"{name}: offsets must be distinct")
            object.__setattr__(self, name, tuple(sorted(vals)))
        block = self.repeating_block_zeros + self.repeating_block_infs
        if self.block_period is None:
            if block:
                raise ValueError("block offsets given without a block period")
        else:
            if self.block_period < 1:
                raise ValueError("block_period must be positive")
            if block and max(block) >= self.block_period:
                raise ValueError("block_period must exceed every in-block offset")
        if self.block_start < 0:
            raise ValueError("block_start must be non-negative")

    @property
    def periodic(self) -> bool:
        return self.block_period is not None

    @property
    def is_empty(self) -> bool:
        return not (
            self.zero_offsets_prefix
            or self.inf_offsets_prefix
            or self.repeating_block_zeros
            or self.repeating_block_infs
        )

    @classmethod
    def from_singularity_pattern(cls, pattern) -> "ValueCountPattern":
        """Read the last coordinate of every forward step of a classified pattern.

        Only open and unconfined patterns carry growth information; cyclic and
        anticonfined ones are rejected with EmptyPattern.
        """
        from .singularity import CONFINED_OPEN, UNCONFINED

        cls_ = pattern.classification
        sigs = pattern.forward_signatures

        def offsets(lo, hi, glyph_kind):
            out = []
            for j in range(lo, hi):
                e = sigs[j].entries[-1]
                if e.kind == glyph_kind:
                    out.append(j - lo)
            return out

        if cls_.kind == CONFINED_OPEN:
            end = min(cls_.length + 1, len(sigs))
            return cls(tuple(offsets(0, end, "zero")), tuple(offsets(0, end, "inf")))
        if cls_.kind == UNCONFINED:
            s, per = cls_.onset, cls_.period
            if s + per > len(sigs):
                raise EmptyPattern("signature window shorter than one repeating block")
            return cls(
                tuple(offsets(0, s, "zero")),
                tuple(offsets(0, s, "inf")),
                tuple(offsets(s, s + per, "zero")),
                tuple(offsets(s, s + per, "inf")),
                block_period=per,
                block_start=s,
            )
        raise EmptyPattern(f"{cls_.kind} patterns do not enter the balance")

    def to_dict(self) -> dict:
        return {
            "zero_offsets_prefix": list(self.zero_offsets_prefix),
            "inf_offsets_prefix": list(self.inf_offsets_prefix),
            "repeating_block_zeros": list(self.repeating_block_zeros),
            "repeating_block_infs": list(self.repeating_block_infs),
            "block_period": self.block_period,
            "block_start": self.block_start,
        }


@dataclass(frozen=True)
class CharPolynomial:
    """Exact rational coefficients, highest degree first."""

    coefficients: tuple

    def __post_init__(self):
        cs = tuple(qq(c) for c in self.coefficients)
        if not cs or cs[0] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coefficients", cs)

    @classmethod
    def from_sympy(cls, poly) -> "CharPolynomial":
        poly = sympy.Poly(poly, LAMBDA, domain="QQ")
        return cls(tuple(mpq(int(c.p), int(c.q)) for c in poly.all_coeffs()))

    def as_sympy(self) -> sympy.Poly:
        return sympy.Poly(
            [sympy.Rational(int(c.numerator), int(c.denominator)) for c in self.coefficients],
            LAMBDA,
            domain="QQ",
        )

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = qq(0)
        for c in self.coefficients:
            acc = acc * x + c
        return acc

    def divides(self, other: "CharPolynomial") -> bool:
        """Whether this polynomial divides ``other`` exactly."""
        _, rem = sympy.div(other.as_sympy(), self.as_sympy())
        return rem.is_zero

    def __eq__(self, other):
        if isinstance(other, CharPolynomial):
            return self.coefficients == other.coefficients
        return NotImplemented

    def __hash__(self):
        return hash(self.coefficients)

    def __str__(self):
        return str(self.as_sympy().as_expr()).replace("lambda", "λ").replace("**", "^")

    def to_dict(self) -> dict:
        return {"coefficients": [qstr(c) for c in self.coefficients], "text": str(self)}


def _powers(offsets, shift=0):
    return sum((LAMBDA ** -(o + shift) for o in offsets), sympy.Integer(0))


def express_char_poly(pattern: ValueCountPattern) -> CharPolynomial:
    """Balance of preimage counts of 0 and inf with ``Z_n ~ lambda^n``.

    Each occurrence at offset o contributes lambda^(-o). A repeating block
    contributes its offsets times 1/(1 - lambda^(-P)); the balance is
    multiplied through by that factor before denominators are cleared.
    """
    if pattern.is_empty:
        raise EmptyPattern("pattern has no 0 or inf entries")
    prefix = _powers(pattern.zero_offsets_prefix) - _powers(pattern.inf_offsets_prefix)
    if pattern.periodic:
        per, s = pattern.block_period, pattern.block_start
        block = _powers(pattern.repeating_block_zeros, s) - _powers(
            pattern.repeating_block_infs, s
        )
        balance = prefix * (1 - LAMBDA ** -per) + block
        block_balanced = sympy.simplify(block) == 0
    else:
        per = None
        balance = prefix
        block_balanced = False
    num, _ = sympy.fraction(sympy.together(sympy.expand(balance)))
    num = sympy.expand(num)
    if num == 0:
        raise EmptyPattern("the 0 and inf counts balance identically")
    poly = sympy.Poly(num, LAMBDA, domain="QQ")
    # drop powers of lambda coming from the negative exponents
    while poly.degree() > 0 and poly.eval(0) == 0:
        poly = sympy.Poly(sympy.quo(poly, sympy.Poly(LAMBDA, LAMBDA)), LAMBDA, domain="QQ")
    if block_balanced and per is not None:
        # the lambda^P - 1 factor only came from multiplying the prefix through
        cyc = sympy.Poly(LAMBDA**per - 1, LAMBDA, domain="QQ")
        poly = sympy.quo(poly, sympy.gcd(poly, cyc))
    if poly.degree() < 1:
        raise EmptyPattern("balance reduces to a constant")
    _, prim = poly.primitive()
    if prim.LC() < 0:
        prim = -prim
    return CharPolynomial.from_sympy(prim)


def confined_reduction_pattern(q: int) -> ValueCountPattern:
    """0 at {0, q+1}, inf at {1, q}: the open pattern of the integrable case."""
    return ValueCountPattern((0, q + 1), (1, q))


def unconfined_reduction_pattern(q: int) -> ValueCountPattern:
    """0 at 0 and inf at {1, q}, repeating with period q+1."""
    return ValueCountPattern((), (), (0,), tuple(sorted({1, q})), block_period=q + 1)


# ---------------------------------------------------------------------------
# largest real root
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootEstimate:
    """Largest real root > 1 bracketed by exact rationals ``lo <= root <= hi``.

    ``exact`` is set when there is no root above 1 and the answer is exactly 1.
    """

    lo: Fraction
    hi: Fraction
    exact: bool = False

    @property
    def value(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __float__(self):
        return self.value

    def decimal(self, digits: int = 12) -> str:
        if self.exact:
            return "1"
        return f"{self.value:.{digits}f}"

    def to_dict(self) -> dict:
        return {
            "root": self.decimal(),
            "lo": str(self.lo),
            "hi": str(self.hi),
            "exact": self.exact,
        }


def largest_real_root(poly: CharPolynomial, tol: float = 1e-12) -> RootEstimate:
    """Largest real root greater than 1, or exactly 1 when there is none.

    Real roots are isolated exactly (sympy's rational interval refinement) and
    the largest isolating interval above 1 is refined to width <= ``tol``.
    """
    if poly.degree < 1:
        raise ValueError("polynomial must be nonconstant")
    eps = Fraction(tol).limit_denominator(10**18) if tol > 0 else Fraction(1, 10**12)
    sp = poly.as_sympy()
    sqf = sympy.Poly(sympy.sqf_part(sp), LAMBDA, domain="QQ")
    ivals = sqf.intervals(eps=sympy.Rational(eps.numerator, eps.denominator))
    best = None
    for (lo, hi), _mult in ivals:
        lo_f = Fraction(int(lo.p), int(lo.q))
        hi_f = Fraction(int(hi.p), int(hi.q))
        if hi_f <= 1:
            continue
        if lo_f <= 1:
            # the isolating interval straddles 1; decide with the exact value
            if sqf.eval(1) == 0 and _count_roots(sqf, 1, hi_f, open_lo=True) == 0:
                continue
        if best is None or lo_f > best[0]:
            best = (lo_f, hi_f)
    if best is None:
        return RootEstimate(Fraction(1), Fraction(1), exact=True)
    lo_f, hi_f = best
    if lo_f < 1:
        lo_f = Fraction(1)
    return RootEstimate(lo_f, hi_f)


def _count_roots(poly, lo, hi, open_lo=False) -> int:
    n = poly.count_roots(sympy.Rational(lo.numerator, lo.denominator) if isinstance(lo, Fraction) else lo,
                         sympy.Rational(hi.numerator, hi.denominator))
    if open_lo and poly.eval(lo) == 0:
        n -= 1
    return n


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------


def log10_int(n: int) -> float:
    """log10 of a positive integer too large for float conversion."""
    n = int(n)
    if n <= 0:
        raise ValueError("log10 of non-positive integer")
    bl = n.bit_length()
    if bl <= 1000:
        return math.log10(n)
    shift = bl - 64
    return math.log10(n >> shift) + shift * math.log10(2)


def rational_height(x) -> float:
    """log10 max(|numerator|, denominator) of a reduced rational."""
    x = qq(x)
    return log10_int(max(abs(int(x.numerator)), int(x.denominator), 1))


@dataclass
class HeightSeries:
    heights: list
    params: MapParams
    seed: int
    initial_state: tuple = ()
    flagged_steps: list = field(default_factory=list)


@dataclass
class DiophantineEstimate:
    lambda_hat: float
    slope: float
    poly_exponent: float
    intercept: float
    residual: float
    lambda_linear: float
    fit_start: int
    fit_end: int
    series: HeightSeries
    resamples: int = 0

    def to_dict(self) -> dict:
        return {
            "lambda_hat": self.lambda_hat,
            "lambda_linear": self.lambda_linear,
            "poly_exponent": self.poly_exponent,
            "fit_window": [self.fit_start, self.fit_end],
            "slope": self.slope,
            "residual": self.residual,
            "heights": [round(h, 6) for h in self.series.heights],
            "initial_state": [qstr(x) for x in self.series.initial_state],
            "resamples": self.resamples,
        }


def height_series(
    p: MapParams, n_iters: int, state: Sequence, max_digits: float | None = None
) -> list[float]:
    """Max coordinate height of the iterates x_0, x_1, ...

    Stops after ``n_iters`` steps, or earlier once a height exceeds
    ``max_digits`` decimal digits.
    """
    s = tuple(mpq(qq(x)) for x in state)
    out = [max(rational_height(x) for x in s)]
    for j in range(n_iters):
        try:
            s = phi_forward(s, p)
        except ZeroDivisionError as exc:
            raise OrbitCollapse(f"exact orbit hit a pole at step {j + 1}") from exc
        if any(x == 0 for x in s):
            raise OrbitCollapse(f"exact orbit hit zero at step {j + 1}")
        out.append(max(rational_height(x) for x in s))
        if max_digits is not None and out[-1] > max_digits:
            break
    return out


DEFAULT_MAX_DIGITS = 150_000


def _height_fit(hs, start: int, end: int) -> dict:
    """Least squares ``log10 h_n = n log10(lambda) + beta log10(n) + c``.

    The log n column absorbs polynomial growth, so quadratic height growth
    yields lambda close to 1 instead of the finite-window bias
    (2 / (n ln 10) per step) of a pure straight-line fit. The straight-line
    slope is reported alongside.
    """
    xs = np.arange(start, end + 1, dtype=float)
    ys = np.log10([max(hs[n], 1e-300) for n in range(start, end + 1)])
    design = np.column_stack([xs, np.log10(xs), np.ones_like(xs)])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - ys) ** 2)))
    line = np.polyfit(xs, ys, 1)
    return {
        "lambda_hat": float(10 ** coef[0]),
        "slope": float(coef[0]),
        "poly_exponent": float(coef[1]),
        "intercept": float(coef[2]),
        "residual": resid,
        "lambda_linear": float(10 ** line[0]),
    }


def diophantine_degree(
    p: MapParams,
    n_iters: int = 34,
    seed: int = 0,
    burn_in: int | None = None,
    bound: int = 9,
    max_digits: float | None = DEFAULT_MAX_DIGITS,
) -> DiophantineEstimate:
    """Growth rate of the logarithmic height along an exact rational orbit.

    ``lambda_hat = 10**slope`` where the slope is the coefficient of n in a
    least-squares fit of ``log10 h_n`` over the last half of the orbit (never
    before ``burn_in``, default q+1); see ``_height_fit``. The orbit is cut short once the height passes
    ``max_digits`` digits, which bounds the cost of fast-growing maps.
    """
    if burn_in is None:
        burn_in = p.q + 1
    min_iters = 2 * burn_in + 8
    if n_iters < min_iters:
        raise ValueError(f"n_iters must be at least 2*burn_in + 8 = {min_iters}")
    rng = random.Random(seed)
    last = None
    for attempt in range(MAX_RESAMPLES):
        state = tuple(random_rational(rng, bound) for _ in range(p.q + 1))
        try:
            hs = height_series(p, n_iters, state, max_digits)
        except OrbitCollapse as exc:
            last = exc
            continue
        end = len(hs) - 1
        if end < min_iters:
            raise ValueError(f"max_digits reached after {end} steps; raise it")
        start = max(burn_in, end // 2)
        fit = _height_fit(hs, start, end)
        series = HeightSeries(hs, p, seed, state)
        return DiophantineEstimate(series=series, fit_start=start, fit_end=end, resamples=attempt, **fit)
    raise OrbitCollapse(f"every resampled orbit collapsed ({last})")


# ---------------------------------------------------------------------------
# exact degree sequences by rational reconstruction
# ---------------------------------------------------------------------------


class _ModField:
    """GF(p) on plain ints, reduced after every product."""

    p = MODULUS
    zero = 0
    one = 1

    def lift(self, x) -> int:
        return GF.of(x).v

    def red(self, x: int) -> int:
        return x % self.p

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in GF(p)")
        return pow(x, -1, self.p)

    def random_point(self, rng: random.Random) -> int:
        return rng.randrange(1, self.p)

    def scalar(self, x: int):
        return GF._raw(x)


class _RatField:
    """Exact rationals; ``red`` is the identity."""

    zero = mpq(0)
    one = mpq(1)

    def lift(self, x):
        return qq(x)

    def red(self, x):
        return x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of 0")
        return self.one / x

    def random_point(self, rng: random.Random):
        return qq(rng.randint(-10**6, 10**6)) / rng.randint(1, 997)

    def scalar(self, x):
        return x


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _psub(F, a, b):
    n = max(len(a), len(b))
    return _trim(
        [F.red((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) for i in range(n)]
    )


def _pmul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim([F.red(c) for c in out])


def _pdivmod(F, a, b):
    """Quotient and remainder; polynomials are coefficient lists, lowest first."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = F.inv(b[-1])
    nb = len(b)
    qd = len(a) - nb
    if qd < 0:
        return [], _trim(a)
    quo = [F.zero] * (qd + 1)
    for k in range(qd, -1, -1):
        c = F.red(a[k + nb - 1] * inv)
        quo[k] = c
        if c == 0:
            continue
        for j in range(nb - 1):
            a[k + j] = F.red(a[k + j] - c * b[j])
        a[k + nb - 1] = F.zero
    return _trim(quo), _trim(a[: nb - 1])


def _pgcd(F, a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _pdivmod(F, a, b)
        a, b = b, r
    return a


def _peval(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = F.red(acc * x + c)
    return acc


def _newton_interpolate(F, xs, ys):
    """Coefficients (lowest first) of the interpolating polynomial.

    The nodes must be consecutive: ``xs[i] = xs[0] + i``, so every divided
    difference at level j divides by the same j.
    """
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        inv_j = F.inv(j)
        for i in range(n - 1, j - 1, -1):
            coef[i] = F.red((coef[i] - coef[i - 1]) * inv_j)
    poly: list = []
    for i in range(n - 1, -1, -1):
        # poly <- poly * (t - x_i) + coef_i
        shifted = [F.zero] + poly
        for k, c in enumerate(poly):
            shifted[k] = F.red(shifted[k] - xs[i] * c)
        if shifted:
            shifted[0] = F.red(shifted[0] + coef[i])
        else:
            shifted = [coef[i]]
        poly = _trim(shifted)
    return poly


def rational_reconstruct(F, xs, ys):
    """Reduced ``(num, den)`` with deg num + deg den < len(xs) through the points.

    Extended Euclid on the vanishing polynomial of the nodes and the
    interpolant, stopped at the first remainder of degree below len(xs)/2.
    The denominator is made monic.
    """
    n = len(xs)
    m = [F.one]
    for x in xs:
        m = _pmul(F, m, [F.red(-x), F.one])
    r0, r1 = m, _newton_interpolate(F, xs, ys)
    if not r1:
        return [], [F.one]
    t0, t1 = [], [F.one]
    half = n // 2
    while r1 and len(r1) - 1 >= half:
        quo, rem = _pdivmod(F, r0, r1)
        r0, r1 = r1, rem
        t0, t1 = t1, _psub(F, t0, _pmul(F, quo, t1))
    num, den = r1, t1
    if not den:
        raise InterpolationInconsistent("reconstruction produced a zero denominator")
    if num:
        g = _pgcd(F, num, den)
        if len(g) > 1:
            num, _ = _pdivmod(F, num, g)
            den, _ = _pdivmod(F, den, g)
    lead = F.inv(den[-1])
    return [F.red(c * lead) for c in num], [F.red(c * lead) for c in den]


def _rational_degree(num, den) -> int:
    return max(len(num) - 1 if num else 0, len(den) - 1)


@dataclass(frozen=True)
class _LiftedParams:
    a: object
    b: object
    q: int


class _Evaluator:
    """Last coordinate of phi^j at a point t, for j = 1..n at once."""

    def __init__(self, p: MapParams, mode: str, n: int, rng: random.Random, F):
        self.n = n
        self.F = F
        lift = lambda x: F.scalar(F.lift(x))  # noqa: E731
        self.params = _LiftedParams(lift(p.a), lift(p.b), p.q)
        if mode == SINGLE_VARIABLE:
            self.lines = [(lift(0), lift(random_rational(rng))) for _ in range(p.q)]
            self.lines.append((lift(1), lift(0)))
        elif mode == GENERIC_LINE:
            self.lines = [
                (lift(random_rational(rng)), lift(random_rational(rng)))
                for _ in range(p.q + 1)
            ]
        else:
            raise ValueError(f"mode must be {SINGLE_VARIABLE!r} or {GENERIC_LINE!r}")

    def values(self, t) -> list:
        t = self.F.scalar(t)
        s = tuple(c * t + d for c, d in self.lines)
        out = []
        for _ in range(self.n):
            s = phi_forward(s, self.params)
            last = s[-1]
            out.append(last.v if isinstance(last, GF) else last)
        return out


def degree_sequence(
    p: MapParams,
    mode: str = SINGLE_VARIABLE,
    n: int = 8,
    seed: int = 0,
    field: str = "modular",
    max_points: int = 8192,
) -> list[int]:
    """Degrees in t of the last coordinates x_{q+1}, ..., x_{q+n}.

    ``single_variable`` fixes u_1..u_q at random rationals and sets
    u_{q+1} = t; ``generic_line`` sets every u_i = c_i t + d_i. Each
    coordinate is rebuilt as a reduced rational function of t and
    ``max(deg num, deg den)`` is reported.

    The point budget starts at twice the previous degree plus slack and may
    double ``MAX_BOUND_DOUBLINGS`` times per coordinate before
    InterpolationInconsistent is raised. ``field="modular"`` works in
    GF(2^61 - 1); ``field="rational"`` uses exact rationals throughout.
    """
    if field == "modular":
        F = _ModField()
    elif field == "rational":
        F = _RatField()
    else:
        raise ValueError("field must be 'modular' or 'rational'")
    rng = random.Random(seed)
    ev = _Evaluator(p, mode, n, rng, F)
    pts_rng = random.Random(seed ^ 0x5EED)
    xs_all: list = []
    vals_all: list = []

    def sample(count):
        # consecutive nodes base, base+1, ...; a pole anywhere restarts elsewhere
        while len(xs_all) < count:
            t = F.red(xs_all[-1] + 1) if xs_all else F.random_point(pts_rng)
            try:
                v = ev.values(t)
            except ZeroDivisionError:
                xs_all.clear()
                vals_all.clear()
                continue
            xs_all.append(t)
            vals_all.append(v)

    degrees: list[int] = []
    extra = 4
    prev = 1
    for j in range(n):
        budget = 2 * (2 * prev + 2)
        for _attempt in range(MAX_BOUND_DOUBLINGS + 1):
            if budget > max_points:
                break
            sample(budget + extra)
            xs = xs_all[:budget]
            ys = [v[j] for v in vals_all[:budget]]
            num, den = rational_reconstruct(F, xs, ys)
            deg_sum = (len(num) - 1 if num else 0) + len(den) - 1
            ok = deg_sum < budget - 1 and all(
                _peval(F, num, x) == F.red(vals_all[i][j] * _peval(F, den, x))
                for i, x in enumerate(xs_all[budget : budget + extra], start=budget)
            )
            if ok:
                prev = _rational_degree(num, den)
                degrees.append(prev)
                break
            budget *= 2
        else:
            raise InterpolationInconsistent(
                f"x_{p.q + j + 1}: verification failed up to {budget // 2} points"
            )
        if len(degrees) <= j:
            raise InterpolationInconsistent(
                f"x_{p.q + j + 1}: point budget {max_points} exhausted"
            )
    return degrees


def growth_rate(degrees: Sequence[int], start: int, stop: int) -> float:
    """exp of the least-squares slope of log d_n over ``start <= n < stop``."""
    xs = list(range(start, stop))
    ys = [math.log(degrees[n]) for n in xs]
    slope, _ = np.polyfit(xs, ys, 1)
    return math.exp(slope)


@dataclass
class ExpressResult:
    pattern: ValueCountPattern
    polynomial: CharPolynomial
    root: RootEstimate

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.to_dict(),
            "polynomial": self.polynomial.to_dict(),
            "root": self.root.to_dict(),
        }


def express(pattern: ValueCountPattern, tol: float = 1e-12) -> ExpressResult:
    poly = express_char_poly(pattern)
    return ExpressResult(pattern, poly, largest_real_root(poly, tol))
