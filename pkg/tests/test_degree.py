import math

import pytest
import sympy

from kdvsing.degree import (
    GENERIC_LINE,
    LAMBDA,
    SINGLE_VARIABLE,
    CharPolynomial,
    ValueCountPattern,
    _ModField,
    _RatField,
    confined_reduction_pattern,
    degree_sequence,
    diophantine_degree,
    express,
    express_char_poly,
    growth_rate,
    height_series,
    largest_real_root,
    log10_int,
    rational_height,
    rational_reconstruct,
    unconfined_reduction_pattern,
)
from kdvsing.errors import EmptyPattern, OrbitCollapse
from kdvsing.exactnum import qq
from kdvsing.mapping import MapParams
from kdvsing.singularity import classify_pattern

lam = LAMBDA


def poly(expr) -> CharPolynomial:
    return CharPolynomial.from_sympy(sympy.expand(expr))


def same_up_to_sign(p: CharPolynomial, q: CharPolynomial) -> bool:
    return p == q or p.coefficients == tuple(-c for c in q.coefficients)


# -- patterns and polynomials -------------------------------------------------


def test_pattern_validation():
    with pytest.raises(ValueError):
        ValueCountPattern((0, 0), ())
    with pytest.raises(ValueError):
        ValueCountPattern((), (), (0,), (3,), block_period=3)
    with pytest.raises(ValueError):
        ValueCountPattern((), (), (0,), (1,))
    with pytest.raises(ValueError):
        ValueCountPattern((-1,), ())


def test_char_polynomial_basics():
    p = CharPolynomial((1, -1, -1))
    assert p.degree == 2
    assert str(p) == "λ^2 - λ - 1"
    assert p(qq(2)) == 1
    assert p.to_dict()["coefficients"] == ["1", "-1", "-1"]
    with pytest.raises(ValueError):
        CharPolynomial((0, 1))


@pytest.mark.parametrize("q", range(2, 11))
def test_confined_polynomial(q):
    got = express_char_poly(confined_reduction_pattern(q))
    assert same_up_to_sign(got, poly((lam**q - 1) * (lam - 1)))


@pytest.mark.parametrize("q", range(2, 11))
def test_unconfined_polynomial(q):
    got = express_char_poly(unconfined_reduction_pattern(q))
    assert got == poly(lam**q - lam ** (q - 1) - 1)


def test_confined_polynomial_text_q2():
    assert str(express_char_poly(confined_reduction_pattern(2))) == "λ^3 - λ^2 - λ + 1"


def test_empty_patterns():
    with pytest.raises(EmptyPattern):
        express_char_poly(ValueCountPattern())
    with pytest.raises(EmptyPattern):
        express_char_poly(ValueCountPattern((0,), (0,)))


@pytest.mark.parametrize("q", [2, 3, 4])
def test_pattern_read_from_classified_orbit(q):
    open_ = classify_pattern(MapParams(1, 1, q), q + 1)
    vcp = ValueCountPattern.from_singularity_pattern(open_)
    assert same_up_to_sign(express_char_poly(vcp), express_char_poly(confined_reduction_pattern(q)))
    unconf = classify_pattern(MapParams(1, "7/5", q), q + 1)
    vcp = ValueCountPattern.from_singularity_pattern(unconf)
    assert express_char_poly(vcp) == express_char_poly(unconfined_reduction_pattern(q))


def test_cyclic_pattern_has_no_balance():
    cyc = classify_pattern(MapParams(1, 1, 2), 2)
    with pytest.raises(EmptyPattern):
        ValueCountPattern.from_singularity_pattern(cyc)


# -- roots --------------------------------------------------------------------


def test_golden_mean():
    r = largest_real_root(poly(lam**2 - lam - 1), tol=1e-12)
    assert abs(r.value - (1 + math.sqrt(5)) / 2) < 1e-9
    assert r.lo <= r.hi and r.hi - r.lo <= 1e-12


def test_plastic_number_and_factorization():
    p5 = express_char_poly(unconfined_reduction_pattern(5))
    plastic = poly(lam**3 - lam - 1)
    other = poly(lam**2 - lam + 1)
    assert plastic.divides(p5) and other.divides(p5)
    assert poly((lam**2 - lam + 1) * (lam**3 - lam - 1)) == p5
    r = largest_real_root(p5)
    real_root = max(float(x) for x in sympy.real_roots(plastic.as_sympy()))
    assert abs(r.value - real_root) < 1e-9
    assert r.decimal(9) == "1.324717957"


def test_cubic_root_oracle():
    r = largest_real_root(poly(lam**3 - lam**2 - 1))
    oracle = sympy.nsolve(lam**3 - lam**2 - 1, lam, 1.5, prec=30)
    assert abs(r.value - float(oracle)) < 1e-11


@pytest.mark.parametrize("q", range(2, 11))
def test_confined_roots_are_one(q):
    p = express_char_poly(confined_reduction_pattern(q))
    r = largest_real_root(p)
    assert r.exact and r.value == 1
    assert all(abs(complex(z)) <= 1 + 1e-12 for z in sympy.Poly(p.as_sympy()).nroots())


def test_unconfined_roots_decrease():
    roots = [largest_real_root(express_char_poly(unconfined_reduction_pattern(q))).value for q in range(2, 11)]
    assert all(r > 1 for r in roots)
    assert all(a > b for a, b in zip(roots, roots[1:]))


def test_largest_root_rejects_constants():
    with pytest.raises(ValueError):
        largest_real_root(CharPolynomial((3,)))


def test_express_result_record():
    res = express(unconfined_reduction_pattern(3))
    d = res.to_dict()
    assert d["root"]["root"] == "1.465571231877"
    assert d["polynomial"]["text"] == "λ^3 - λ^2 - 1"


# -- heights ------------------------------------------------------------------


def test_log10_int_big():
    n = 10**5000 * 3
    assert abs(log10_int(n) - (5000 + math.log10(3))) < 1e-9
    assert abs(rational_height(qq("-1000/7")) - 3) < 1e-12
    with pytest.raises(ValueError):
        log10_int(0)


def test_height_series_collapse():
    p = MapParams(1, 1, 2)
    # u1 + 1/u3 - 1/u2 = 0 puts an exact zero into the orbit
    with pytest.raises(OrbitCollapse):
        height_series(p, 5, (qq(1), qq("1/2"), qq(1)))


@pytest.mark.parametrize("q", range(2, 7))
def test_diophantine_matches_express_root(q):
    est = diophantine_degree(MapParams(1, 2, q), n_iters=34)
    root = express(unconfined_reduction_pattern(q)).root.value
    assert abs(est.lambda_hat - root) / root <= 0.03
    assert est.fit_end <= 34


def test_diophantine_q2_window():
    est = diophantine_degree(MapParams(1, 2, 2), n_iters=28)
    assert 1.58 <= est.lambda_hat <= 1.66


def test_diophantine_integrable_is_quadratic():
    est = diophantine_degree(MapParams(1, 1, 2), n_iters=40)
    assert 1.0 <= est.lambda_hat <= 1.05
    h = est.series.heights
    c = max(h[n] / n**2 for n in range(10, 21))
    assert all(h[n] <= c * n**2 for n in range(20, 41))


def test_quadratic_bound_fails_for_exponential_growth():
    h = diophantine_degree(MapParams(1, 2, 3), n_iters=34).series.heights
    c = max(h[n] / n**2 for n in range(10, 18))
    assert any(h[n] > c * n**2 for n in range(18, 35))


def test_diophantine_argument_checks():
    with pytest.raises(ValueError):
        diophantine_degree(MapParams(1, 2, 3), n_iters=10)


# -- rational reconstruction and degrees -------------------------------------


@pytest.mark.parametrize("F", [_ModField(), _RatField()])
def test_rational_reconstruct_recovers_function(F):
    # (t^2 + 3) / (2t - 5)
    def f(t):
        return F.red((t * t + 3) * F.inv(F.red(2 * t - 5)))

    xs = [F.lift(qq(i)) for i in range(10, 18)]
    num, den = rational_reconstruct(F, xs, [f(x) for x in xs])
    assert len(num) - 1 == 2 and len(den) - 1 == 1
    half = F.inv(F.lift(qq(2)))
    assert den == [F.red(-5 * half), F.one]
    assert num == [F.red(3 * half), F.red(0 * half), half]


def test_single_variable_degrees_are_one():
    for q in (3, 4, 5):
        degs = degree_sequence(MapParams(1, 2, q), SINGLE_VARIABLE, n=q - 1)
        assert degs == [1] * (q - 1)


@pytest.mark.parametrize("q", [3, 4])
def test_generic_line_degrees(q):
    degs = degree_sequence(MapParams(1, 2, q), GENERIC_LINE, n=2)
    assert degs == [3, 5]


def test_rational_and_modular_degrees_agree():
    p = MapParams(1, 2, 3)
    assert degree_sequence(p, n=6, field="rational") == degree_sequence(p, n=6)
    p = MapParams(1, 1, 2)
    assert degree_sequence(p, GENERIC_LINE, n=4, field="rational") == degree_sequence(p, GENERIC_LINE, n=4)


def test_integrable_degrees_grow_quadratically():
    degs = degree_sequence(MapParams(1, 1, 2), n=12)
    assert degs == [1, 2, 4, 5, 7, 10, 12, 15, 19, 22, 26, 31]
    ratios = [b / a for a, b in zip(degs[6:], degs[7:])]
    assert all(r < 1.3 for r in ratios)
    second = [degs[i + 2] - 2 * degs[i + 1] + degs[i] for i in range(len(degs) - 2)]
    assert max(second) - min(second) <= 3


@pytest.mark.parametrize("q, n", [(2, 12), (3, 14)])
def test_degree_growth_matches_express_root(q, n):
    degs = [None] + degree_sequence(MapParams(1, 2, q), n=n)
    rate = growth_rate(degs, 2 * q, 2 * q + 9)
    root = express(unconfined_reduction_pattern(q)).root.value
    assert abs(rate - root) / root <= 0.05


def test_degree_sequence_argument_checks():
    with pytest.raises(ValueError):
        degree_sequence(MapParams(1, 2, 2), mode="diagonal", n=2)
    with pytest.raises(ValueError):
        degree_sequence(MapParams(1, 2, 2), n=2, field="real")


def test_degree_sequence_is_seed_stable():
    p = MapParams(1, 2, 2)
    assert {tuple(degree_sequence(p, n=6, seed=s)) for s in range(3)} == {(1, 2, 4, 6, 10, 17)}
