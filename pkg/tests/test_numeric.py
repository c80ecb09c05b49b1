import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import surfaces_for, tower_for
from solitonsurf.errors import (
    NoConvergence,
    NotHermitian,
    PoleAtPoint,
    RankDeficient,
    StencilOutOfGrid,
)
from solitonsurf.exact import MatRF, RatFun, matrix, xi
from solitonsurf.numeric import (
    GridSpec,
    VField,
    action_convergence,
    action_quadrature,
    assemble_V,
    cov_deriv_matrix,
    cov_deriv_vector,
    diagonalization_error,
    eval_mat,
    hermitian_eigen,
    point_residuals,
    random_points,
    residual_first_form,
    residual_record,
    residual_second_form,
    unitarity_drift,
    var_op,
    z_equation_residual,
)
from solitonsurf.sigma import ProjectorTower

CONST_TOWER = ProjectorTower(2, (matrix([[1, 0], [0, 0]]), matrix([[0, 0], [0, 1]])))
GRID = GridSpec(h=1e-3)


# -- evaluation --------------------------------------------------------------------

def test_eval_mat_examples():
    P0 = tower_for("1,xi")[0]
    assert np.allclose(eval_mat(P0, 0), [[1, 0], [0, 0]])
    assert np.allclose(eval_mat(P0, 1), [[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(PoleAtPoint):
        eval_mat(matrix([[RatFun(1) / xi()]]), 0)


def test_eval_mat_finite_and_vectorized():
    from solitonsurf.numeric import MatEvaluator
    P = tower_for("1,xi,xi2")[1]
    pts = random_points(7)
    batch = MatEvaluator(P)(pts)
    assert np.all(np.isfinite(batch))
    for z, M in zip(pts, batch):
        assert np.allclose(M, eval_mat(P, z), atol=1e-14)


# -- Jacobi -----------------------------------------------------------------------

def test_jacobi_diagonal():
    w, U = hermitian_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1, 2, 3])
    assert np.allclose(np.abs(U), np.eye(3)[:, [1, 2, 0]])


herm = st.integers(1, 7).flatmap(lambda n: st.integers(0, 10**6).map(lambda s: (n, s)))


@given(herm)
def test_jacobi_against_eigh(ns):
    n, s = ns
    rng = np.random.default_rng(s)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = A + A.conj().T
    w, U = hermitian_eigen(H)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(w, np.linalg.eigh(H)[0], atol=1e-10)
    assert np.max(np.abs(H @ U - U * w)) < 1e-9
    assert np.max(np.abs(U.conj().T @ U - np.eye(n))) < 1e-10


def test_jacobi_degenerate_cluster():
    rng = np.random.default_rng(5)
    Q, _ = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    H = Q @ np.diag([1, 1, 1, 2, 2]) @ Q.conj().T
    w, U = hermitian_eigen(H)
    assert np.allclose(w, [1, 1, 1, 2, 2], atol=1e-12)
    assert np.max(np.abs(U.conj().T @ U - np.eye(5))) < 1e-12
    assert np.max(np.abs(H @ U - U * w)) < 1e-9


def test_jacobi_errors():
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.array([[0, 1], [0, 0]], dtype=complex))
    rng = np.random.default_rng(0)
    A = rng.normal(size=(6, 6))
    with pytest.raises(NoConvergence):
        hermitian_eigen(A + A.T, max_sweeps=1)


def test_jacobi_surface_spectra():
    X0 = surfaces_for("1,xi")[0]
    assert np.allclose(hermitian_eigen(1j * eval_mat(X0, 0.7))[0], [-0.5, 0.5], atol=1e-12)
    X1 = surfaces_for("1,xi,xi2")[1]
    for z in random_points(3):
        assert np.allclose(hermitian_eigen(1j * eval_mat(X1, z))[0], [-1, 0, 1], atol=1e-10)


# -- V ------------------------------------------------------------------------------

def test_assemble_V_examples():
    T = tower_for("1,xi")
    assert np.allclose(assemble_V(T, 0).V, np.eye(2))
    V = assemble_V(T, 1).V
    s = 1 / np.sqrt(2)
    assert np.allclose(V, [[s, s], [s, -s]])


def test_assemble_V_diagonalizes_random_points():
    T = tower_for("1,xi,xi2")
    vf = VField(T)
    for z in random_points(10, seed=2):
        fr = assemble_V(T, z)
        assert fr.ordering == (0, 1, 2)
        assert unitarity_drift(fr.V) < 1e-10
        assert diagonalization_error(fr.V, vf.projectors(np.array(z))) < 1e-8
        for k in range(3):
            col = fr.V[:, k]
            lead = col[np.argmax(np.abs(col) > 1e-6)]
            assert abs(lead.imag) < 1e-15 and lead.real > 0


def test_assemble_V_rank_deficient():
    bad = ProjectorTower(2, (matrix([[1, 0], [0, 0]]), MatRF.zero(2)))
    with pytest.raises(RankDeficient):
        assemble_V(bad, 0.1)


def test_unitarity_drift_on_grid():
    for name in ("1,xi", "1,xi,xi2"):
        vf = VField(tower_for(name))
        V, _ = vf(GRID.points())
        assert unitarity_drift(V) < 1e-10


# -- covariant derivatives -------------------------------------------------------------

def test_var_op_examples():
    assert np.allclose(var_op(np.diag([1 + 2j, 3])), 0)
    assert np.allclose(var_op(np.array([[0, 1], [1, 0]])), np.eye(2))
    assert np.allclose(var_op(np.array([[0, 1], [0, 0]])), 0)


def test_cov_deriv_constant_is_zero():
    vf = VField(CONST_TOWER)
    for axis in (1, 2):
        assert np.all(cov_deriv_matrix(vf, axis, 0.3 + 0.2j, GRID) == 0)


def test_cov_deriv_columnwise():
    vf = VField(tower_for("1,xi,xi2"))
    grid = GridSpec(h=1e-4)
    z = 0.4 + 0.1j
    for axis, step in ((1, grid.h), (2, 1j * grid.h)):
        D = cov_deriv_matrix(vf, axis, z, grid)
        V, ref = vf(np.array([z]))
        Vp, _ = vf(np.array([z + step]), ref)
        Vm, _ = vf(np.array([z - step]), ref)
        dV = (Vp[0] - Vm[0]) / (2 * grid.h)
        for k in range(3):
            assert np.max(np.abs(D[:, k] - cov_deriv_vector(V[0][:, k], dV[:, k]))) < 1e-9


def test_stencil_out_of_grid():
    vf = VField(tower_for("1,xi"))
    edge = GRID.center + GRID.half_width
    with pytest.raises(StencilOutOfGrid):
        cov_deriv_matrix(vf, 1, edge, GRID)
    with pytest.raises(StencilOutOfGrid):
        residual_first_form(tower_for("1,xi"), GRID, edge)
    with pytest.raises(ValueError):
        cov_deriv_matrix(vf, 3, GRID.center, GRID)


# -- residuals -------------------------------------------------------------------------

def test_first_form_point():
    T = tower_for("1,xi")
    z = 0.4 + 0.1j
    r = [residual_first_form(T, GRID.with_h(h), z) for h in (2e-3, 1e-3, 5e-4)]
    assert r[1] < 1e-4
    assert all(0.15 <= b / a <= 0.45 for a, b in zip(r, r[1:]))


def test_second_form_point():
    T = tower_for("1,xi")
    z = 0.4 + 0.1j
    r = [residual_second_form(T, GRID.with_h(h), z) for h in (2e-3, 1e-3, 5e-4)]
    assert r[1] < 1e-4
    assert all(0.15 <= b / a <= 0.45 for a, b in zip(r, r[1:]))


def test_nu_two_ways():
    vf = VField(tower_for("1,xi,xi2"))
    pts = np.array([0.4 + 0.1j, -0.2 + 0.5j, 0.7 - 0.3j])
    r = point_residuals(vf, pts, 1e-4)
    assert np.max(r.nu_gap) < 1e-6
    assert np.max(r.first_gap) < 1e-8 and np.max(r.second_gap) < 1e-8


def test_constant_tower_residuals_vanish():
    z = GRID.center
    assert residual_first_form(CONST_TOWER, GRID, z) == 0
    assert residual_second_form(CONST_TOWER, GRID, z) == 0


def test_z_equation():
    T = tower_for("1,xi")
    z = 0.4 + 0.1j
    r = [z_equation_residual(T, 0, GRID.with_h(h), z) for h in (2e-3, 1e-3, 5e-4)]
    assert r[1] < 1e-4
    assert all(0.15 <= b / a <= 0.45 for a, b in zip(r, r[1:]))
    V, _ = VField(T)(GRID.points())
    norms = np.einsum("...ik,...ik->...k", V.conj(), V)
    assert np.max(np.abs(norms - 1)) < 1e-12


def test_residual_record_layout():
    rec = residual_record(tower_for("1,xi,xi2"), GRID, 0.4 + 0.1j)
    assert list(rec) == ["point", "h", "residual_first", "residual_second",
                         "residual_z", "unitarity_drift"]
    assert len(rec["residual_z"]) == 3


# -- quadrature ----------------------------------------------------------------------

def test_action_constant_projector():
    q = action_quadrature(matrix([[1, 0], [0, 0]]), 16)
    assert q.action == 0 and q.x_action == 0


def test_action_seed_xi():
    P0 = tower_for("1,xi")[0]
    conv = action_convergence(P0)
    assert conv["density_mismatch"] < 1e-10
    assert conv["min_density"] >= -1e-12
    assert all(r >= 4 for r in conv["cauchy_ratios"])
    assert abs(conv["converged"] - np.pi) < 1e-6
    q = action_quadrature(P0, 64)
    assert q.area == pytest.approx(q.x_action / 2)


def test_action_interior_member():
    # P_1 of (1, xi, xi^2): closed-form density integrates to 4 pi
    conv = action_convergence(tower_for("1,xi,xi2")[1])
    assert conv["density_mismatch"] < 1e-10
    assert abs(conv["converged"] - 4 * np.pi) < 1e-6
