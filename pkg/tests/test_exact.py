from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from solitonsurf.errors import ParseError
from solitonsurf.exact import (
    BiPoly,
    GaussianRational,
    MatRF,
    RatFun,
    d_xi,
    d_xibar,
    herm_conj,
    mat_is_zero,
    matrix,
    parse_gaussian,
    rf_equal,
    xi,
    xibar,
)
from solitonsurf.sigma import build_P0, seed_from_ints

I = GaussianRational(0, 1)
X, XB = xi(), xibar()
ONE = RatFun(1)


# -- GaussianRational -----------------------------------------------------------

@pytest.mark.parametrize("text,re,im", [
    ("1/2", Fraction(1, 2), 0),
    ("-1/2+3*i", Fraction(-1, 2), 3),
    ("−1/2+3*i", Fraction(-1, 2), 3),
    ("2/3*i", 0, Fraction(2, 3)),
    ("-i", 0, -1),
    ("i", 0, 1),
    ("4/6-1/3*i", Fraction(2, 3), Fraction(-1, 3)),
    ("0", 0, 0),
])
def test_parse_gaussian(text, re, im):
    assert parse_gaussian(text) == GaussianRational(re, im)


@pytest.mark.parametrize("text", ["1//2", "1.5", "", "i3", "1i", "1/0", "2+", "a"])
def test_parse_gaussian_rejects(text):
    with pytest.raises(ParseError):
        parse_gaussian(text)


def test_gaussian_lowest_terms():
    g = GaussianRational(Fraction(4, -6), Fraction(10, 4))
    assert (g.re.numerator, g.re.denominator) == (-2, 3)
    assert (g.im.numerator, g.im.denominator) == (5, 2)


def test_gaussian_str_roundtrip():
    for g in [GaussianRational(Fraction(-1, 2), 3), GaussianRational(0, -1),
              GaussianRational(Fraction(7, 3)), GaussianRational(0, Fraction(2, 5))]:
        assert parse_gaussian(str(g)) == g


gauss = st.builds(GaussianRational,
                  st.fractions(min_value=-5, max_value=5, max_denominator=7),
                  st.fractions(min_value=-5, max_value=5, max_denominator=7))


@given(gauss, gauss)
def test_gaussian_conj_properties(x, y):
    assert x.conj().conj() == x
    assert (x * y).conj() == x.conj() * y.conj()
    assert complex(x * y) == pytest.approx(complex(x) * complex(y))


# -- derivatives --------------------------------------------------------------------

def test_power_rule():
    assert rf_equal(d_xi(X * X * XB), 2 * X * XB)


def test_holomorphic_input_has_zero_dbar():
    assert d_xibar(X ** 3).is_zero()


def test_quotient_rule_example():
    f = ONE / (ONE + X * XB)
    expected = -XB / (ONE + X * XB) ** 2
    assert rf_equal(d_xi(f), expected)
    # finite-difference oracle of the Wirtinger derivative at 0.3+0.2i
    z0, h = 0.3 + 0.2j, 1e-5
    fd = 0.5 * ((f(z0 + h) - f(z0 - h)) / (2 * h) - 1j * (f(z0 + 1j * h) - f(z0 - 1j * h)) / (2 * h))
    assert abs(d_xi(f)(z0) - fd) < 1e-9


def _poly(draw_terms):
    return BiPoly.from_terms(draw_terms)


monos = st.tuples(st.integers(0, 2), st.integers(0, 2))
polys = st.dictionaries(monos, gauss, max_size=4).map(_poly)


@st.composite
def ratfuns(draw):
    num = draw(polys)
    q = draw(polys)
    # 1 + q q* never vanishes on the slice xibar = conj(xi)
    return RatFun(num, BiPoly.const(1) + q * q.star())


@given(ratfuns())
def test_derivatives_commute(f):
    assert rf_equal(f.d_xi().d_xibar(), f.d_xibar().d_xi())


@given(ratfuns(), ratfuns())
def test_leibniz(f, g):
    assert rf_equal((f * g).d_xi(), f.d_xi() * g + f * g.d_xi())
    assert rf_equal((f * g).d_xibar(), f.d_xibar() * g + f * g.d_xibar())


@given(ratfuns(), ratfuns(), ratfuns())
def test_rf_equal_is_equivalence(a, b, c):
    # build equal-but-differently-represented copies to exercise the relation
    b2 = RatFun(a.num * c.den, a.den * c.den)
    assert rf_equal(a, a)
    assert rf_equal(a, b2) and rf_equal(b2, a)
    b3 = RatFun(b2.num * b.den, b2.den * b.den)
    assert rf_equal(b2, b3) and rf_equal(a, b3)
    assert rf_equal(a, b) == rf_equal(b, a)


def test_rf_equal_examples():
    assert rf_equal(X / (X * XB), ONE / XB)
    assert not rf_equal(ONE / (ONE + X * XB), ONE / (ONE + X))
    assert rf_equal((X * XB + 1) ** 2 / (X * XB + 1), X * XB + 1)


def test_denominator_normalized():
    f = RatFun(BiPoly.xi(), BiPoly.xi().scale(GaussianRational(0, 3)) + BiPoly.const(2))
    assert f.den.leading_coeff() == 1


def _wirtinger_fd(f, z, h):
    dx = (f(z + h) - f(z - h)) / (2 * h)
    dy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return 0.5 * (dx - 1j * dy)


def test_d_xi_matches_finite_differences():
    rng = np.random.default_rng(7)

    def rand_poly(deg):
        terms = {}
        for a in range(deg + 1):
            for b in range(deg + 1 - a):
                if rng.random() < 0.6:
                    terms[(a, b)] = GaussianRational(Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))),
                                                     Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))))
        return BiPoly.from_terms(terms)

    pts = 0.8 * (rng.random(5) - 0.5) + 0.8j * (rng.random(5) - 0.5)
    for _ in range(20):
        q = rand_poly(2)
        f = RatFun(rand_poly(3), BiPoly.const(1) + q * q.star())
        df = f.d_xi()
        for z in pts:
            exact = df(z)
            scale = 1 + abs(exact)
            e3 = abs(_wirtinger_fd(f, z, 1e-3) - exact)
            e4 = abs(_wirtinger_fd(f, z, 1e-4) - exact)
            assert e3 < 1e-3 * scale
            # second order: a tenfold smaller step cuts the error ~100x until round-off
            assert e4 < max(e3 / 30, 1e-9 * scale)


# -- matrices ---------------------------------------------------------------------

def test_herm_conj_examples():
    assert herm_conj(matrix([[X, 0], [0, 0]])) == matrix([[XB, 0], [0, 0]])
    P0 = build_P0(seed_from_ints([1], [0, 1]))
    assert herm_conj(P0) == P0
    iI = MatRF.scalar(2, I)
    assert herm_conj(iI) == MatRF.scalar(2, -I)


def test_mat_is_zero_examples():
    M = matrix([[X, XB * X], [ONE / (ONE + X * XB), 3]])
    assert mat_is_zero(M - M)
    P0 = build_P0(seed_from_ints([1], [0, 1]))
    assert mat_is_zero(P0 @ P0 - P0)
    assert not mat_is_zero(MatRF.identity(2))


entries = st.builds(lambda p, q: RatFun(p, BiPoly.const(1) + q * q.star()), polys, polys)
mats = st.lists(entries, min_size=4, max_size=4).map(lambda e: matrix([e[:2], e[2:]]))


@given(mats, mats)
def test_herm_conj_involution_and_product(A, B):
    assert A.herm_conj().herm_conj() == A
    assert (A @ B).herm_conj() == B.herm_conj() @ A.herm_conj()


@given(mats)
def test_matrix_derivative_commutes(A):
    assert A.d_xi().d_xibar() == A.d_xibar().d_xi()


def test_matrix_trace_and_eval():
    M = matrix([[X, 1], [XB, X * XB]])
    assert rf_equal(M.trace(), X + X * XB)
    assert M.trace()(1 + 1j) == pytest.approx((1 + 1j) + 2)
