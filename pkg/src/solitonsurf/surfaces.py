"""Soliton surfaces X_k in su(N) attached to a projector tower."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import IndexOutOfRange, LengthMismatch
from .exact import GaussianRational, MatRF, RatFun, comm
from .sigma import ProjectorTower, pi_minus, pi_plus
from .spectrum import c_of

I_UNIT = GaussianRational(0, 1)


@dataclass(frozen=True)
class SurfaceTower:
    n: int
    surfaces: tuple[MatRF, ...]
    constants: tuple[Fraction, ...]

    def __getitem__(self, k: int) -> MatRF:
        return self.surfaces[k]

    def __len__(self) -> int:
        return len(self.surfaces)

    def __iter__(self):
        return iter(self.surfaces)


def build_surface(tower: ProjectorTower, k: int) -> MatRF:
    """``X_k = -i (P_k + 2 sum_{j<k} P_j - c_k I)``."""
    n = tower.n
    if not 0 <= k < n:
        raise IndexOutOfRange(f"surface index {k} outside 0..{n - 1}")
    acc = tower[k] - MatRF.scalar(n, c_of(k, n))
    for j in range(k):
        acc = acc + tower[j] * 2
    return (acc * -I_UNIT).reduced()


def build_surfaces(tower: ProjectorTower) -> SurfaceTower:
    n = tower.n
    return SurfaceTower(
        n,
        tuple(build_surface(tower, k) for k in range(n)),
        tuple(c_of(k, n) for k in range(n)),
    )


def is_antihermitian(X: MatRF) -> bool:
    return (X.herm_conj() + X).is_zero()


def is_traceless(X: MatRF) -> bool:
    return X.trace().is_zero()


def surfaces_commute(surfaces: Sequence[MatRF]) -> bool:
    return all(comm(a, b).is_zero() for a, b in combinations(surfaces, 2))


def verify_tangent(X: MatRF, P: MatRF) -> bool:
    """``dX = -i [dP, P]`` and ``dbarX = i [dbarP, P]``."""
    dP, dbP = P.d_xi(), P.d_xibar()
    ok = (X.d_xi() - comm(dP, P) * -I_UNIT).is_zero()
    return ok and (X.d_xibar() - comm(dbP, P) * I_UNIT).is_zero()


def verify_dXdX(X: MatRF, P: MatRF) -> bool:
    """``dX dbarX + dP dbarP = 0``."""
    return (X.d_xi() @ X.d_xibar() + P.d_xi() @ P.d_xibar()).is_zero()


def verify_el_surface(X: MatRF) -> bool:
    """``[d dbar X, X] = 0``."""
    return comm(X.d_xi().d_xibar(), X).is_zero()


def minimal_roots(k: int, n: int) -> tuple[Fraction, ...]:
    """Values lambda whose factors (X - i lambda I) form the minimal polynomial of X_k."""
    if not 0 <= k < n:
        raise IndexOutOfRange(f"surface index {k} outside 0..{n - 1}")
    c = c_of(k, n)
    roots = []
    if k < n - 1:
        roots.append(c)
    roots.append(c - 1)
    if k > 0:
        roots.append(c - 2)
    return tuple(roots)


def poly_annihilates(X: MatRF, roots: Sequence[Fraction]) -> bool:
    """True iff ``prod (X - i lambda I)`` over ``roots`` is the zero matrix."""
    n = X.n
    acc = MatRF.identity(n)
    for lam in roots:
        acc = acc @ (X - MatRF.scalar(n, I_UNIT * lam))
    return acc.is_zero()


def minimal_poly_check(X: MatRF, k: int, n: int) -> bool:
    """The designated polynomial annihilates X and none of its proper divisors does."""
    roots = minimal_roots(k, n)
    if not poly_annihilates(X, roots):
        return False
    for size in range(1, len(roots)):
        for sub in combinations(roots, size):
            if poly_annihilates(X, sub):
                return False
    return True


def invert_linear(surfaces: Sequence[MatRF], k: int, n: int) -> MatRF:
    """Recover P_k from X_0..X_k by the alternating linear formula."""
    if k < 0 or k >= n:
        raise IndexOutOfRange(f"index {k} outside 0..{n - 1}")
    if len(surfaces) < k + 1:
        raise LengthMismatch(f"need surfaces X_0..X_{k}, got {len(surfaces)}")
    acc = surfaces[0] * (-1) ** k
    for j in range(1, k + 1):
        acc = acc + (surfaces[j] - surfaces[j - 1]) * (-1) ** (k - j)
    return (acc * I_UNIT + MatRF.scalar(n, Fraction(1, n))).reduced()


def invert_quadratic(X: MatRF, k: int, n: int) -> MatRF:
    """``P_k = X^2 - 2i(c_k - 1) X - c_k (c_k - 2) I``."""
    c = c_of(k, n)
    out = X @ X - X * (I_UNIT * (2 * (c - 1))) - MatRF.scalar(n, c * (c - 2))
    return out.reduced()


def chi_plus(X: MatRF, P: MatRF, n: int) -> MatRF:
    """Map X_k to X_{k+1}: ``X - i(Pi_+(P) + P) + (2i/N) I``."""
    raised = pi_plus(P)
    out = X - (raised + P) * I_UNIT + MatRF.scalar(n, I_UNIT * Fraction(2, n))
    return out.reduced()


def chi_minus(X: MatRF, P: MatRF, n: int) -> MatRF:
    """Map X_k to X_{k-1}: ``X + i(Pi_-(P) + P) - (2i/N) I``."""
    lowered = pi_minus(P)
    out = X + (lowered + P) * I_UNIT - MatRF.scalar(n, I_UNIT * Fraction(2, n))
    return out.reduced()


def spin_sum(surfaces: SurfaceTower | Sequence[MatRF]) -> MatRF:
    """``-(i/2) sum_k X_k``."""
    xs = list(surfaces)
    acc = MatRF.zero(xs[0].n)
    for X in xs:
        acc = acc + X
    return (acc * (I_UNIT * Fraction(-1, 2))).reduced()


def spin_weights(n: int) -> tuple[Fraction, ...]:
    """Spin projections ``-(N-1)/2 + k`` attached to P_k."""
    return tuple(Fraction(-(n - 1), 2) + k for k in range(n))


def verify_spin_sum(surfaces: SurfaceTower | Sequence[MatRF], tower: ProjectorTower) -> bool:
    """``-(i/2) sum X_k`` equals ``sum (-(N-1)/2 + k) P_k``."""
    rhs = MatRF.zero(tower.n)
    for w, P in zip(spin_weights(tower.n), tower):
        rhs = rhs + P * w
    return spin_sum(surfaces) == rhs


def eigen_assignment(k: int, j: int, n: int) -> Fraction:
    """lambda with ``X_k P_j = i lambda P_j``."""
    c = c_of(k, n)
    if j < k:
        return c - 2
    if j == k:
        return c - 1
    return c


def verify_eigen_assignment(surfaces: SurfaceTower, tower: ProjectorTower) -> bool:
    """``X_k P_j = i lambda_{kj} P_j`` exactly for every pair."""
    n = tower.n
    for k, X in enumerate(surfaces):
        for j, P in enumerate(tower):
            lam = eigen_assignment(k, j, n)
            if not (X @ P - P * (I_UNIT * lam)).is_zero():
                return False
    return True


def density_identity(X: MatRF, P: MatRF) -> RatFun:
    """``tr(dX dbarX) + tr(dP dbarP)``; zero on matched pairs."""
    return (X.d_xi() @ X.d_xibar()).trace() + (P.d_xi() @ P.d_xibar()).trace()
