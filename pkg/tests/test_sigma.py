import numpy as np
import pytest

from conftest import SEEDS, tower_for
from solitonsurf.errors import (
    Annihilated,
    CommonFactorSeed,
    DegenerateProjector,
    NotHolomorphicSeed,
    PrematureAnnihilation,
    ZeroSeed,
)
from solitonsurf.exact import BiPoly, MatRF, RatFun, matrix, rf_equal, xi, xibar
from solitonsurf.numeric import eval_mat
from solitonsurf.sigma import (
    HoloSeed,
    Holomorphy,
    build_P0,
    build_tower,
    completeness_holds,
    holomorphy_class,
    is_projector,
    lagrangian_density,
    orthogonality_holds,
    pi_minus,
    pi_plus,
    seed_from_ints,
    univariate_gcd,
    verify_conservation,
    verify_el,
)

X, XB = xi(), xibar()
ONE = RatFun(1)


def _num_comm_dd(M, z, h=1e-4):
    """Finite-difference oracle for [d dbar M, M] at z (d dbar = Laplacian / 4)."""
    f = lambda p: eval_mat(M, p)
    lap = (f(z + h) + f(z - h) + f(z + 1j * h) + f(z - 1j * h) - 4 * f(z)) / h**2
    A = lap / 4
    return A @ f(z) - f(z) @ A


# -- seeds ----------------------------------------------------------------------

def test_seed_validation_errors():
    with pytest.raises(ZeroSeed):
        seed_from_ints([0], [0]).validate()
    with pytest.raises(CommonFactorSeed):
        seed_from_ints([0, 1], [0, 0, 1]).validate()      # xi divides both
    with pytest.raises(CommonFactorSeed):
        seed_from_ints([-1, 0, 1], [1, 1]).validate()      # (xi+1) is common
    with pytest.raises(NotHolomorphicSeed):
        HoloSeed((BiPoly.const(1), BiPoly.xibar())).validate()
    seed_from_ints([1], [0, 1], [1, 0, 1]).validate()


def test_univariate_gcd():
    # (xi - 1)(xi + 2) and (xi - 1)^2  ->  xi - 1
    g = univariate_gcd([[-2, 1, 1], [1, -2, 1]])
    assert [complex(c) for c in g] == [-1, 1]
    assert len(univariate_gcd([[1], [0, 1]])) == 1


# -- P0 -------------------------------------------------------------------------

def test_build_P0_closed_form():
    P0 = build_P0(seed_from_ints([1], [0, 1]))
    expected = matrix([[ONE, XB], [X, X * XB]]) / (ONE + X * XB)
    assert P0 == expected


def test_build_P0_constant():
    assert build_P0(seed_from_ints([1], [0])) == matrix([[1, 0], [0, 0]])


def test_build_P0_denominator_n3():
    P0 = build_P0(seed_from_ints(*SEEDS["1,xi,xi2"]))
    den = ONE + X * XB + X * X * XB * XB
    assert rf_equal(P0[0, 0], ONE / den)
    assert is_projector(P0)
    # rank one: every 2x2 minor vanishes exactly
    for r0, r1 in [(0, 1), (0, 2), (1, 2)]:
        for c0, c1 in [(0, 1), (0, 2), (1, 2)]:
            minor = P0[r0, c0] * P0[r1, c1] - P0[r0, c1] * P0[r1, c0]
            assert minor.is_zero()
    M = np.array(eval_mat(P0, 0.4 - 0.7j))
    assert np.linalg.matrix_rank(M, tol=1e-12) == 1


# -- ladders --------------------------------------------------------------------

def test_pi_plus_n2_is_complement():
    T = tower_for("1,xi")
    assert pi_plus(T[0]) == MatRF.identity(2) - T[0]


def test_pi_minus_annihilates_holomorphic():
    for name in SEEDS:
        with pytest.raises(Annihilated):
            pi_minus(tower_for(name)[0])


def test_ladders_are_mutual_inverses():
    for name in SEEDS:
        T = tower_for(name)
        for k in range(T.n - 1):
            assert pi_minus(pi_plus(T[k])) == T[k]
            assert pi_plus(pi_minus(T[k + 1])) == T[k + 1]


def test_tower_n2():
    T = tower_for("1,xi")
    assert len(T) == 2 and T[1] == MatRF.identity(2) - T[0]


def test_premature_annihilation():
    with pytest.raises(PrematureAnnihilation):
        build_tower(seed_from_ints([1], [0], [0]))
    with pytest.raises(PrematureAnnihilation):
        build_tower(seed_from_ints([1], [0, 1], [0, 1]))


def test_tower_invariants(seed_name):
    T = tower_for(seed_name)
    assert len(T) == T.n
    assert all(is_projector(P) for P in T)
    assert orthogonality_holds(T)
    assert completeness_holds(T)
    with pytest.raises(Annihilated):
        pi_plus(T[-1])


# -- Euler-Lagrange ----------------------------------------------------------------

def test_el_and_conservation_on_towers(seed_name):
    for P in tower_for(seed_name):
        assert verify_el(P)
        assert verify_conservation(P)


def test_el_constant_projector():
    assert verify_el(matrix([[1, 0], [0, 0]]))


def test_el_diagonal_non_projectors():
    # diagonal matrices commute with their own Laplacian: both verdicts are true
    M = matrix([[X, 0], [0, 0]])
    assert verify_el(M)
    assert np.max(np.abs(_num_comm_dd(M, 1.0))) < 1e-6
    N = matrix([[X * XB, 0], [0, 0]])
    assert verify_conservation(N)
    assert verify_el(N)


def test_el_false_on_non_diagonal():
    M = matrix([[X * XB, X], [0, 0]])
    assert not verify_el(M)
    assert not verify_conservation(M)
    # oracle: the commutator is visibly nonzero at xi = 1+i
    assert np.max(np.abs(_num_comm_dd(M, 1 + 1j))) > 0.1


def test_conservation_agrees_with_el():
    for M in [matrix([[X * XB, X], [0, 0]]), matrix([[X * X, XB], [X, 1]]),
              matrix([[ONE / (ONE + X * XB), 0], [X, XB]])]:
        assert verify_el(M) == verify_conservation(M)


# -- density and holomorphy --------------------------------------------------------

def test_lagrangian_density_n2():
    T = tower_for("1,xi")
    expected = ONE / (ONE + X * XB) ** 2
    assert rf_equal(lagrangian_density(T[0]), expected)
    assert rf_equal(lagrangian_density(T[1]), expected)
    # finite-difference oracle for tr(dP dbarP) with dP from real-axis differences
    rng = np.random.default_rng(3)
    for z in rng.normal(size=3) + 1j * rng.normal(size=3):
        h = 1e-5
        f = lambda p: eval_mat(T[0], p)
        dx = (f(z + h) - f(z - h)) / (2 * h)
        dy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
        d, db = (dx - 1j * dy) / 2, (dx + 1j * dy) / 2
        assert np.trace(d @ db).real == pytest.approx(expected(z).real, abs=1e-8)


def test_lagrangian_density_constant():
    assert lagrangian_density(matrix([[1, 0], [0, 0]])).is_zero()


def test_holomorphy_classes():
    T = tower_for("1,xi,xi2")
    assert holomorphy_class(T[0]) is Holomorphy.HOLOMORPHIC
    assert holomorphy_class(T[1]) is Holomorphy.MIXED
    assert holomorphy_class(T[2]) is Holomorphy.ANTIHOLOMORPHIC
    with pytest.raises(DegenerateProjector):
        holomorphy_class(matrix([[1, 0], [0, 0]]))
