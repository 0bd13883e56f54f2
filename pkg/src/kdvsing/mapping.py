"""The generalised lattice rule and its height-1 periodic reductions.

The lattice rule is ``x[m+1,n+1] = x[m,n] + a/x[m+1,n] - b/x[m,n+1]``.
Imposing ``x[m+1,n] = x[m,n+q]`` turns it into the birational map

    phi_q(u_1, ..., u_{q+1}) = (u_2, ..., u_{q+1}, u_1 + a/u_{q+1} - b/u_2)

on (P^1)^{q+1}. States are plain tuples of scalars; every function here is
written once against the arithmetic operators so the same code runs on
rationals, :class:`~kdvsing.exactnum.Projective` points,
:class:`~kdvsing.exactnum.LaurentSeries` and finite-field elements.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateOrbit, IndeterminateStep
from .exactnum import Projective, Rational, qq

NE = "NE"
SW = "SW"


@dataclass(frozen=True)
class MapParams:
    """Coefficients ``a``, ``b`` (nonzero rationals) and the reduction width ``q``."""

    a: Rational
    b: Rational
    q: int = 1

    def __post_init__(self):
        object.__setattr__(self, "a", qq(self.a))
        object.__setattr__(self, "b", qq(self.b))
        if self.a == 0 or self.b == 0:
            raise ValueError("a and b must be nonzero")
        if int(self.q) != self.q or self.q < 1:
            raise ValueError("q must be an integer >= 1")
        object.__setattr__(self, "q", int(self.q))

    @property
    def integrable(self) -> bool:
        return self.a == self.b

    @property
    def dim(self) -> int:
        return self.q + 1


def _check(value):
    if isinstance(value, Projective) and value.is_indeterminate:
        raise IndeterminateStep("indeterminate form; regularise with an epsilon seed")
    return value


def _check_len(s: Sequence, p: MapParams):
    if len(s) != p.q + 1:
        raise ValueError(f"state has length {len(s)}, expected q+1 = {p.q + 1}")


def phi_forward(s: Sequence, p: MapParams) -> tuple:
    """One forward step: ``(u_2, ..., u_{q+1}, u_1 + a/u_{q+1} - b/u_2)``."""
    _check_len(s, p)
    q = p.q
    e = s[0] + p.a / s[q] - p.b / s[1]
    return tuple(s[1:]) + (_check(e),)


def phi_backward(s: Sequence, p: MapParams) -> tuple:
    """Inverse step: ``(u_{q+1} + b/u_1 - a/u_q, u_1, ..., u_q)``."""
    _check_len(s, p)
    q = p.q
    d = s[q] + p.b / s[0] - p.a / s[q - 1]
    return (_check(d),) + tuple(s[:q])


def orbit(s: Sequence, p: MapParams, steps: int, backward: bool = False) -> list[tuple]:
    """``steps + 1`` states starting with ``s`` itself."""
    step = phi_backward if backward else phi_forward
    out = [tuple(s)]
    for _ in range(steps):
        out.append(step(out[-1], p))
    return out


def lattice_step(corner, x_m1n, x_mn1, p: MapParams, direction: str = NE):
    """Solve the 4-point rule for the missing corner of an elementary square.

    For ``NE`` the arguments are ``x[m,n], x[m+1,n], x[m,n+1]`` and the result
    is ``x[m+1,n+1]``; for ``SW`` the first argument is ``x[m+1,n+1]`` and the
    result is ``x[m,n]``.
    """
    if direction == NE:
        return _check(corner + p.a / x_m1n - p.b / x_mn1)
    if direction == SW:
        return _check(corner - p.a / x_m1n + p.b / x_mn1)
    raise ValueError(f"direction must be {NE!r} or {SW!r}")


def phi1_closed_form(u1, u2, n: int, p: MapParams) -> tuple:
    """``phi_1^n(u1, u2)`` from the explicit solution of the q=1 map.

    With ``g = a - b`` and ``k = u1*u2``, the first coordinate after ``n``
    steps is a telescoping product of factors ``(k + j*g)`` and the product
    of the two coordinates is ``k + n*g``.
    """
    if p.q != 1:
        raise ValueError("closed form exists only for q = 1")
    if n < 0:
        raise ValueError("n must be non-negative")
    u1, u2 = qq(u1), qq(u2)
    g = p.a - p.b
    kappa = u1 * u2

    def factor(j):
        f = kappa + j * g
        if f == 0:
            raise DegenerateOrbit(f"u1*u2 + {j}*(a-b) vanishes")
        return f

    ell, odd = divmod(n, 2)
    if odd:
        w = u2
        for k in range(1, ell + 1):
            w = w * factor(2 * k) / factor(2 * k - 1)
    else:
        w = u1
        for k in range(ell):
            w = w * factor(2 * k + 1) / factor(2 * k)
    if w == 0:
        raise DegenerateOrbit("first coordinate vanishes")
    return (w, (kappa + n * g) / w)


def random_rational(rng: random.Random, bound: int = 50) -> Rational:
    """Uniform numerator/denominator in [-bound, bound] minus zero."""
    while True:
        num = rng.randint(-bound, bound)
        den = rng.randint(-bound, bound)
        if num and den:
            return qq(num) / den


def random_state(rng: random.Random, p: MapParams, bound: int = 50) -> tuple:
    return tuple(random_rational(rng, bound) for _ in range(p.q + 1))
