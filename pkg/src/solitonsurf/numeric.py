"""Floating-point side: evaluation of exact towers, a cyclic Jacobi solver for
Hermitian matrices, the diagonalizing unitary V and finite-difference
residuals of its dynamics, and quadrature of the action density.

Real coordinates are ``xi = x1 + i x2``; ``d_mu d_mu`` is the Laplacian in
(x1, x2) and products ``d_mu A d_mu B`` are summed over mu in {1, 2}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NoConvergence, NotHermitian, PoleAtPoint, RankDeficient, StencilOutOfGrid
from .exact import BiPoly, MatRF
from .sigma import ProjectorTower

# Phase reference: the first component of every column of V above this
# modulus is made real positive.  Grid points where an earlier component is
# nonzero but below it sit on a gauge seam and are skipped.
GAUGE_TOL = 1e-6


class _PolyEval:
    """Vectorized evaluation of one BiPoly at arrays of points."""

    __slots__ = ("a", "b", "c", "abs_c")

    def __init__(self, p: BiPoly):
        terms = p.terms
        self.a = np.array([m[0] for m in terms], dtype=int)
        self.b = np.array([m[1] for m in terms], dtype=int)
        self.c = np.array([complex(v) for v in terms.values()], dtype=complex)
        self.abs_c = np.abs(self.c)

    def max_degree(self) -> int:
        return int(max(self.a.max(initial=0), self.b.max(initial=0)))

    def __call__(self, zp: np.ndarray, zbp: np.ndarray) -> np.ndarray:
        if self.c.size == 0:
            return np.zeros(zp.shape[1], dtype=complex)
        return self.c @ (zp[self.a] * zbp[self.b])

    def magnitude(self, ap: np.ndarray) -> np.ndarray:
        if self.c.size == 0:
            return np.zeros(ap.shape[1])
        return self.abs_c @ (ap[self.a] * ap[self.b])


class MatEvaluator:
    """Compiled numeric evaluator of a MatRF."""

    def __init__(self, M: MatRF):
        self.n = M.n
        self.den = _PolyEval(M.den)
        self.nums = [[_PolyEval(p) for p in row] for row in M.nums]
        self.deg = max([self.den.max_degree()]
                       + [e.max_degree() for row in self.nums for e in row])

    def __call__(self, points) -> np.ndarray:
        """Values at an array of complex points, shape ``points.shape + (n, n)``."""
        z = np.asarray(points, dtype=complex)
        shape = z.shape
        z = z.ravel()
        powers = np.arange(self.deg + 1)[:, None]
        zp, zbp = z[None, :] ** powers, np.conj(z)[None, :] ** powers
        den = self.den(zp, zbp)
        scale = self.den.magnitude(np.abs(z)[None, :] ** powers)
        bad = np.abs(den) <= 1e-12 * np.maximum(scale, 1e-300)
        if np.any(bad):
            raise PoleAtPoint(f"denominator vanishes at {z[bad][0]}")
        out = np.empty((z.size, self.n, self.n), dtype=complex)
        for i, row in enumerate(self.nums):
            for j, e in enumerate(row):
                out[:, i, j] = e(zp, zbp) / den
        return out.reshape(shape + (self.n, self.n))


def eval_mat(M: MatRF, point: complex) -> np.ndarray:
    """Entrywise complex value of M at ``xi = point``."""
    return MatEvaluator(M)(np.array([point]))[0]


def _max_abs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


# -- Hermitian eigenproblem ---------------------------------------------------

def _mgs(cols: np.ndarray) -> np.ndarray:
    q = cols.copy()
    for j in range(q.shape[1]):
        for i in range(j):
            q[:, j] -= np.vdot(q[:, i], q[:, j]) * q[:, i]
        q[:, j] /= np.linalg.norm(q[:, j])
    return q


def hermitian_eigen(H, *, max_sweeps: int = 100, cluster_gap: float = 1e-8):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns are
    the eigenvectors.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[0]
    if _max_abs(A - A.conj().T) >= 1e-10:
        raise NotHermitian("matrix is not Hermitian")
    A = (A + A.conj().T) / 2
    U = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(A), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= 1e-18 * scale:
                    continue
                phase = apq / r
                app, aqq = A[p, p].real, A[q, q].real
                theta = (aqq - app) / (2 * r)
                if abs(theta) > 1e150:
                    t = 1 / (2 * theta)
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                J = np.eye(n, dtype=complex)
                J[p, p], J[p, q] = c, s
                J[q, p], J[q, q] = -s * np.conj(phase), c * np.conj(phase)
                A = J.conj().T @ A @ J
                U = U @ J
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    w, U = w[order], U[:, order]
    start = 0
    for i in range(1, n + 1):
        if i == n or w[i] - w[i - 1] >= cluster_gap:
            if i - start > 1:
                U[:, start:i] = _mgs(U[:, start:i])
            start = i
    return w, U


# -- diagonalizing unitary ------------------------------------------------------

@dataclass(frozen=True)
class Vframe:
    point: complex
    V: np.ndarray
    ordering: tuple[int, ...]


def _range_vectors(P: np.ndarray) -> np.ndarray:
    """Unit vector spanning the range of each rank-one projector in ``P[..., :, :]``."""
    norms = np.linalg.norm(P, axis=-2)
    j = np.argmax(norms, axis=-1)
    best = np.take_along_axis(norms, j[..., None], axis=-1)[..., 0]
    if np.any(best < 1e-12):
        raise RankDeficient("projector has numerically zero range")
    v = np.take_along_axis(P, j[..., None, None], axis=-1)[..., 0]
    return v / best[..., None]


def _fix_phase(v: np.ndarray, ref: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Make component ``ref`` (default: first above GAUGE_TOL) real positive."""
    if ref is None:
        ref = np.argmax(np.abs(v) > GAUGE_TOL, axis=-1)
    lead = np.take_along_axis(v, ref[..., None], axis=-1)
    return v * (np.conj(lead) / np.abs(lead)), ref


class VField:
    """Diagonalizing unitary of a tower as a function of the point."""

    def __init__(self, tower: ProjectorTower):
        self.n = tower.n
        self.evaluators = [MatEvaluator(P) for P in tower]

    def projectors(self, points) -> np.ndarray:
        """Shape ``points.shape + (N, n, n)``."""
        return np.stack([e(points) for e in self.evaluators], axis=-3)

    def __call__(self, points, ref=None):
        """Return ``(V, ref)``; column k of V spans the range of P_k."""
        P = self.projectors(points)
        cols = _range_vectors(P)
        cols, ref = _fix_phase(cols, ref)
        return np.swapaxes(cols, -1, -2), ref


def assemble_V(tower: ProjectorTower, point: complex) -> Vframe:
    vf = VField(tower)
    V, _ = vf(np.array([point]))
    return Vframe(complex(point), V[0], tuple(range(tower.n)))


def unitarity_drift(V: np.ndarray) -> float:
    n = V.shape[-1]
    return _max_abs(np.conj(np.swapaxes(V, -1, -2)) @ V - np.eye(n))


def diagonalization_error(V: np.ndarray, P: np.ndarray) -> float:
    """max_k ||V^dagger P_k V - I_k||; ``P`` has shape ``(..., N, n, n)``."""
    n = V.shape[-1]
    Vh = np.conj(np.swapaxes(V, -1, -2))
    worst = 0.0
    for k in range(n):
        Ik = np.zeros((n, n))
        Ik[k, k] = 1
        worst = max(worst, _max_abs(Vh @ P[..., k, :, :] @ V - Ik))
    return worst


# -- grid and stencils ------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    center: complex = 0.3 + 0.2j
    half_width: float = 1.0
    samples_per_axis: int = 41
    h: float = 1e-3

    def __post_init__(self):
        if self.samples_per_axis < 3:
            raise ValueError("samples_per_axis must be at least 3")
        if self.half_width <= 0 or self.h <= 0:
            raise ValueError("half_width and h must be positive")

    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.samples_per_axis)

    def points(self) -> np.ndarray:
        t = self.axis()
        return self.center + t[None, :] + 1j * t[:, None]

    def interior_points(self) -> np.ndarray:
        return self.points()[1:-1, 1:-1]

    def contains_stencil(self, point: complex, h: float | None = None) -> bool:
        h = self.h if h is None else h
        d = complex(point) - self.center
        lim = self.half_width + 1e-12
        return abs(d.real) + h <= lim and abs(d.imag) + h <= lim

    def with_h(self, h: float) -> "GridSpec":
        return GridSpec(self.center, self.half_width, self.samples_per_axis, h)


def _check_stencil(grid: GridSpec, points: np.ndarray):
    for p in np.ravel(points):
        if not grid.contains_stencil(p):
            raise StencilOutOfGrid(f"stencil of {p} with h={grid.h} leaves the grid")


@dataclass
class _Stencil:
    """V and its central-difference derivatives at a set of points."""

    V: np.ndarray
    d: tuple[np.ndarray, np.ndarray]
    lap: np.ndarray
    h: float
    gauge_ok: np.ndarray


def _stencil(vf: VField, points: np.ndarray, h: float) -> _Stencil:
    pts = np.ravel(points)
    # the phase reference chosen at the centre is kept across the stencil
    V0, ref = vf(pts)
    mods = np.abs(V0)
    below_ref = np.arange(vf.n)[None, :, None] < ref[:, None, :]
    gauge_ok = ~np.any(below_ref & (mods > 0), axis=(1, 2))
    shifted = {}
    for name, off in (("xp", h), ("xm", -h), ("yp", 1j * h), ("ym", -1j * h)):
        shifted[name], _ = vf(pts + off, ref)
    d1 = (shifted["xp"] - shifted["xm"]) / (2 * h)
    d2 = (shifted["yp"] - shifted["ym"]) / (2 * h)
    lap = (shifted["xp"] + shifted["xm"] + shifted["yp"] + shifted["ym"] - 4 * V0) / h**2
    return _Stencil(V0, (d1, d2), lap, h, gauge_ok)


def _dag(A):
    return np.conj(np.swapaxes(A, -1, -2))


def _diag(A):
    """Diagonal part of A as a matrix."""
    n = A.shape[-1]
    return A * np.eye(n)


def var_op(A) -> np.ndarray:
    """``diag(A^2) - diag(A)^2``."""
    A = np.asarray(A, dtype=complex)
    dA = _diag(A)
    return _diag(A @ A) - dA @ dA


def cov_deriv_matrix(vf: VField, axis: int, point: complex, grid: GridSpec) -> np.ndarray:
    """``D_mu V = d_mu V - V diag(V^dagger d_mu V)`` at one point, mu = axis."""
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    _check_stencil(grid, np.array([point]))
    st = _stencil(vf, np.array([point]), grid.h)
    V, dV = st.V[0], st.d[axis - 1][0]
    return dV - V @ _diag(_dag(V) @ dV)


def cov_deriv_vector(z: np.ndarray, dz: np.ndarray) -> np.ndarray:
    """``D psi = d psi - (z^dagger d z) psi`` applied to ``psi = z``."""
    conn = np.einsum("...i,...i->...", np.conj(z), dz)
    return dz - conn[..., None] * z


@dataclass
class PointResiduals:
    """Per-point residual norms and consistency gaps, arrays over points."""

    first_expanded: np.ndarray
    first_covariant: np.ndarray
    second_expanded: np.ndarray
    second_covariant: np.ndarray
    lagrange_nu: np.ndarray
    z_covariant: np.ndarray          # shape (points, N)
    z_projected: np.ndarray          # shape (points, N)
    first_gap: np.ndarray
    second_gap: np.ndarray
    nu_gap: np.ndarray
    unitarity: np.ndarray
    gauge_ok: np.ndarray


def _norm_inf(A) -> np.ndarray:
    return np.max(np.abs(A), axis=tuple(range(1, A.ndim)))


def point_residuals(vf: VField, points: np.ndarray, h: float) -> PointResiduals:
    st = _stencil(vf, points, h)
    V = st.V
    Vh = _dag(V)
    lap = st.lap
    n = V.shape[-1]

    first_exp = lap - V @ _diag(Vh @ lap)
    second_exp = lap - V @ _diag(Vh @ lap)
    first_cov = np.zeros_like(V)
    dd_V = np.zeros_like(V)  # sum_mu D_mu D_mu V
    var_sum = np.zeros_like(V)
    nu_closed = np.zeros_like(V)
    diag_B2 = np.zeros_like(V)
    dV_A = np.zeros_like(V)
    for dV in st.d:
        B = Vh @ dV
        A = _diag(B)
        first_exp += -dV @ Vh @ dV + V @ _diag(B @ B) - dV @ A + V @ A @ Vh @ dV
        second_exp += -2 * dV @ A + 2 * V @ A @ A
        # covariant route: D V, then D(D V) by the product rule with
        # d_mu V^dagger = -V^dagger d_mu V V^dagger
        DV = dV - V @ A
        dA_part = _diag(-B @ B)  # diag(d V^dagger d V) rewritten
        dDV_extra = -dV @ A - V @ dA_part  # d_mu(DV) minus the lap term
        DDV = dDV_extra - DV @ A
        dd_V += DDV
        first_cov += DDV - DV @ Vh @ DV
        var_sum += var_op(B)
        diag_B2 += _diag(B @ B)
        dV_A += dV @ A
        nu_closed += -4 * var_op(B)
    # the d_mu d_mu V and -V diag(V^dagger d_mu d_mu V) pieces of D D V
    lap_part = lap - V @ _diag(Vh @ lap)
    dd_V += lap_part
    first_cov += lap_part
    second_cov = dd_V - V @ var_sum

    # multiplier from the diagonal of the E-L equations of the V Lagrangian
    core = -lap + V @ _diag(Vh @ lap) - 2 * V @ diag_B2 + 2 * dV_A
    nu_extract = _diag(2 * Vh @ core)
    lagrange_nu = core - 0.5 * V @ nu_closed

    # column-wise z equations
    z_cov = np.zeros(V.shape[:-2] + (n,))
    z_proj = np.zeros(V.shape[:-2] + (n,))
    for k in range(n):
        z = V[..., :, k]
        lapz = lap[..., :, k]
        res = np.zeros_like(z)
        proj_in = lapz.copy()
        for dV in st.d:
            dz = dV[..., :, k]
            conn = np.einsum("...i,...i->...", np.conj(z), dz)
            Dz = dz - conn[..., None] * z
            # d_mu(z^dagger d_mu z) with d_mu z^dagger taken directly
            dconn_first = np.einsum("...i,...i->...", np.conj(dz), dz)
            res += -dconn_first[..., None] * z - conn[..., None] * dz - conn[..., None] * Dz
            res += np.einsum("...i,...i->...", np.conj(Dz), Dz)[..., None] * z
            proj_in -= 2 * conn[..., None] * dz
        zlap_conn = np.einsum("...i,...i->...", np.conj(z), lapz)
        res += lapz - zlap_conn[..., None] * z
        z_cov[..., k] = np.max(np.abs(res), axis=-1)
        proj = proj_in - np.einsum("...i,...i->...", np.conj(z), proj_in)[..., None] * z
        z_proj[..., k] = np.max(np.abs(proj), axis=-1)

    return PointResiduals(
        first_expanded=_norm_inf(first_exp),
        first_covariant=_norm_inf(first_cov),
        second_expanded=_norm_inf(second_exp),
        second_covariant=_norm_inf(second_cov),
        lagrange_nu=_norm_inf(lagrange_nu),
        z_covariant=z_cov,
        z_projected=z_proj,
        first_gap=_norm_inf(first_exp - first_cov),
        second_gap=_norm_inf(second_exp - second_cov),
        nu_gap=_norm_inf(nu_extract - nu_closed),
        unitarity=np.max(np.abs(Vh @ V - np.eye(n)), axis=(-1, -2)),
        gauge_ok=st.gauge_ok,
    )


def _single(tower, grid: GridSpec, point) -> PointResiduals:
    _check_stencil(grid, np.array([point]))
    return point_residuals(VField(tower), np.array([point]), grid.h)


def residual_first_form(tower: ProjectorTower, grid: GridSpec, point: complex) -> float:
    """Max-norm of ``D D V - (D V) V^dagger D V`` (expanded form) at a point."""
    r = _single(tower, grid, point)
    return float(r.first_expanded[0])


def residual_second_form(tower: ProjectorTower, grid: GridSpec, point: complex) -> float:
    """Max-norm of ``D D V - V var(V^dagger d V)`` (expanded form) at a point."""
    r = _single(tower, grid, point)
    return float(r.second_expanded[0])


def z_equation_residual(tower: ProjectorTower, k: int, grid: GridSpec, point: complex) -> float:
    """Max-norm of ``D D z_k + (D z_k^dagger D z_k) z_k``."""
    r = _single(tower, grid, point)
    return float(r.z_covariant[0, k])


# -- grid residual study ------------------------------------------------------------

RESIDUAL_KEYS = ("first_expanded", "first_covariant", "second_expanded",
                 "second_covariant", "z_covariant")


@dataclass
class StudyLevel:
    h: float
    residuals: dict[str, float]
    first_gap: float
    second_gap: float
    nu_gap: float
    unitarity_drift: float
    points_used: int
    points_skipped: int


@dataclass
class ResidualStudy:
    grid: GridSpec
    levels: list[StudyLevel]
    diagonalization_error: float
    ratios: dict[str, list[float]] = field(default_factory=dict)


def residual_study(tower: ProjectorTower, grid: GridSpec,
                   hs: Sequence[float] = (2e-3, 1e-3, 5e-4)) -> ResidualStudy:
    """Grid-max residuals for each step size and their successive ratios."""
    vf = VField(tower)
    all_pts = grid.points().ravel()
    V, _ = vf(all_pts)
    diag_err = diagonalization_error(V, vf.projectors(all_pts))
    interior = grid.interior_points().ravel()
    levels = []
    for h in hs:
        _check_stencil(grid.with_h(h), interior)
        r = point_residuals(vf, interior, h)
        ok = r.gauge_ok
        res = {key: float(np.max(getattr(r, key)[ok])) for key in RESIDUAL_KEYS}
        levels.append(StudyLevel(
            h=h, residuals=res,
            first_gap=float(np.max(r.first_gap[ok])),
            second_gap=float(np.max(r.second_gap[ok])),
            nu_gap=float(np.max(r.nu_gap[ok])),
            unitarity_drift=float(np.max(r.unitarity)),
            points_used=int(ok.sum()), points_skipped=int((~ok).sum()),
        ))
    ratios = {key: [levels[i + 1].residuals[key] / levels[i].residuals[key]
                    for i in range(len(levels) - 1)] for key in RESIDUAL_KEYS}
    return ResidualStudy(grid, levels, diag_err, ratios)


def residual_record(tower: ProjectorTower, grid: GridSpec, point: complex) -> dict:
    """Residual report for one point, in the JSON layout of the CLI."""
    r = _single(tower, grid, point)
    return {
        "point": [float(np.real(point)), float(np.imag(point))],
        "h": grid.h,
        "residual_first": float(r.first_expanded[0]),
        "residual_second": float(r.second_expanded[0]),
        "residual_z": [float(v) for v in r.z_covariant[0]],
        "unitarity_drift": float(r.unitarity[0]),
    }


# -- spectra --------------------------------------------------------------------------

def surface_spectrum(X: MatRF, point: complex) -> np.ndarray:
    """Eigenvalues of the Hermitian matrix ``-i X`` at a point, ascending."""
    H = -1j * eval_mat(X, point)
    w, _ = hermitian_eigen(H)
    return w


def multiplicities(values: np.ndarray, targets, tol: float = 1e-10) -> dict:
    """Count of numerical eigenvalues within ``tol`` of each exact target."""
    out = {}
    for t in targets:
        out[t] = int(np.sum(np.abs(values - float(t)) < tol))
    return out


def random_points(count: int, *, seed: int = 0, radius: float = 1.5) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0.05, 1.0, count))
    phi = rng.uniform(0, 2 * np.pi, count)
    return r * np.exp(1j * phi)


# -- action quadrature ----------------------------------------------------------------

@dataclass
class ActionQuadrature:
    resolution: int
    action: float            # integral of tr(dP dbarP) over the plane, measure dx1 dx2
    x_action: float          # integral of -tr(dX dbarX), same measure
    area: float              # -(1/2) integral of tr(dX dbarX)
    density_mismatch: float  # max |tr(dX dbarX) + tr(dP dbarP)| over samples
    min_density: float


def action_quadrature(P: MatRF, resolution: int) -> ActionQuadrature:
    """Midpoint rule on the sphere chart ``xi = tan(theta/2) e^{i phi}``."""
    if resolution < 1:
        raise ValueError("resolution must be positive")
    n_th, n_ph = resolution, 2 * resolution
    dth, dph = np.pi / n_th, 2 * np.pi / n_ph
    th = (np.arange(n_th) + 0.5) * dth
    ph = (np.arange(n_ph) + 0.5) * dph
    T, F = np.meshgrid(th, ph, indexing="ij")
    r = np.tan(T / 2)
    pts = r * np.exp(1j * F)
    # dx1 dx2 = r dr dphi, dr = (1/2) sec^2(theta/2) dtheta
    w = r * 0.5 / np.cos(T / 2) ** 2 * dth * dph

    Pv = MatEvaluator(P)(pts)
    dP = MatEvaluator(P.d_xi())(pts)
    dbP = MatEvaluator(P.d_xibar())(pts)
    dens_P = np.real(np.trace(dP @ dbP, axis1=-2, axis2=-1))
    dX = -1j * (dP @ Pv - Pv @ dP)
    dbX = 1j * (dbP @ Pv - Pv @ dbP)
    dens_X = np.trace(dX @ dbX, axis1=-2, axis2=-1)
    mismatch = float(np.max(np.abs(dens_X + dens_P)))
    action = float(np.sum(dens_P * w))
    x_action = float(np.sum(-np.real(dens_X) * w))
    return ActionQuadrature(resolution, action, x_action, 0.5 * x_action,
                            mismatch, float(np.min(dens_P)))


def action_convergence(P: MatRF, resolutions: Sequence[int] = (64, 128, 256)) -> dict:
    """Successive quadratures, Cauchy ratios and a Richardson-extrapolated value."""
    qs = [action_quadrature(P, r) for r in resolutions]
    vals = [q.action for q in qs]
    diffs = [abs(b - a) for a, b in zip(vals, vals[1:])]
    ratios = [diffs[i] / diffs[i + 1] if diffs[i + 1] > 0 else float("inf")
              for i in range(len(diffs) - 1)]
    # midpoint error is O(1/res^2)
    converged = vals[-1] + (vals[-1] - vals[-2]) / 3 if len(vals) > 1 else vals[-1]
    return {
        "resolutions": list(resolutions),
        "values": vals,
        "x_values": [q.x_action for q in qs],
        "differences": diffs,
        "cauchy_ratios": ratios,
        "converged": converged,
        "density_mismatch": max(q.density_mismatch for q in qs),
        "min_density": min(q.min_density for q in qs),
    }
