"""Projector towers of the CP^(N-1) sigma model built from holomorphic seeds."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import (
    Annihilated,
    CommonFactorSeed,
    DegenerateProjector,
    NotHolomorphicSeed,
    PrematureAnnihilation,
    ZeroSeed,
)
from .exact import BiPoly, GaussianRational, MatRF, RatFun, comm, poly_xi


@dataclass(frozen=True)
class HoloSeed:
    """Holomorphic representative ``f(xi)`` of the first projector."""

    components: tuple[BiPoly, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) < 2:
            raise ValueError("seed dimension must be at least 2")

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def from_coefficients(cls, rows: Sequence[Sequence]) -> "HoloSeed":
        """Build from per-component coefficient lists in ascending powers of xi."""
        return cls(tuple(poly_xi(r) for r in rows))

    def validate(self) -> "HoloSeed":
        if all(c.is_zero() for c in self.components):
            raise ZeroSeed("all seed components are zero")
        for c in self.components:
            if not c.is_zero() and c.degree_xibar() > 0:
                raise NotHolomorphicSeed(f"seed component {c} depends on xibar")
        g = univariate_gcd([_coeff_list(c) for c in self.components])
        if len(g) > 1:
            raise CommonFactorSeed("seed components share a nonconstant common factor")
        return self


def _coeff_list(p: BiPoly) -> list[GaussianRational]:
    """Ascending coefficient list of a polynomial in xi only."""
    if p.is_zero():
        return []
    terms = p.terms
    return [terms.get((k, 0), GaussianRational()) for k in range(p.degree_xi() + 1)]


def _trim(p: list[GaussianRational]) -> list[GaussianRational]:
    while p and p[-1].is_zero():
        p = p[:-1]
    return p


def _poly_rem(a: list[GaussianRational], b: list[GaussianRational]) -> list[GaussianRational]:
    a = list(a)
    lead_inv = b[-1].inverse()
    while len(a) >= len(b):
        q = a[-1] * lead_inv
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - q * c
        a = _trim(a[:-1])
    return a


def univariate_gcd(polys: Sequence[list[GaussianRational]]) -> list[GaussianRational]:
    """Monic gcd over Q(i) of polynomials given as ascending coefficient lists."""
    g: list[GaussianRational] = []
    for p in polys:
        a, b = g, _trim([GaussianRational.coerce(c) for c in p])
        while b:
            a, b = b, _poly_rem(a, b)
        g = a
    if g:
        inv = g[-1].inverse()
        g = [c * inv for c in g]
    return g


@dataclass(frozen=True)
class ProjectorTower:
    n: int
    projectors: tuple[MatRF, ...]

    def __getitem__(self, k: int) -> MatRF:
        return self.projectors[k]

    def __len__(self) -> int:
        return len(self.projectors)

    def __iter__(self):
        return iter(self.projectors)


def build_P0(seed: HoloSeed) -> MatRF:
    """Rank-one projector ``f f^dagger / (f^dagger f)`` onto the seed direction."""
    seed.validate()
    f = seed.components
    fbar = [c.star() for c in f]
    norm = BiPoly()
    for a, b in zip(f, fbar):
        norm = norm + a * b
    return MatRF([[a * b for b in fbar] for a in f], norm, reduce=True)


def _ladder(A: MatRF, P: MatRF, B: MatRF, what: str) -> MatRF:
    M = A @ P @ B
    t = M.trace()
    if t.is_zero():
        raise Annihilated(f"{what} annihilates the projector")
    # M and its trace share the denominator, so M / tr M = nums / tr(nums)
    return MatRF(M.nums, t.num, reduce=True)


def pi_plus(P: MatRF) -> MatRF:
    """Raising operator ``dP P dbarP / tr(dP P dbarP)``."""
    return _ladder(P.d_xi(), P, P.d_xibar(), "raising operator")


def pi_minus(P: MatRF) -> MatRF:
    """Lowering operator ``dbarP P dP / tr(dbarP P dP)``."""
    return _ladder(P.d_xibar(), P, P.d_xi(), "lowering operator")


def build_tower(seed: HoloSeed) -> ProjectorTower:
    """Apply the raising operator N-1 times to the holomorphic projector."""
    n = seed.n
    projectors = [build_P0(seed)]
    for k in range(1, n):
        try:
            projectors.append(pi_plus(projectors[-1]))
        except Annihilated:
            raise PrematureAnnihilation(
                f"raising operator annihilated P_{k - 1}; tower stops at {k} < N={n} projectors"
            ) from None
    try:
        pi_plus(projectors[-1])
    except Annihilated:
        pass
    else:
        raise PrematureAnnihilation(f"P_{n - 1} is not annihilated by the raising operator")
    return ProjectorTower(n, tuple(projectors))


def is_projector(P: MatRF) -> bool:
    """Hermitian, idempotent, unit trace."""
    return P.herm_conj() == P and (P @ P - P).is_zero() and P.trace() == RatFun(1)


def verify_el(P: MatRF) -> bool:
    """``[d dbar P, P] = 0`` exactly."""
    return comm(P.d_xi().d_xibar(), P).is_zero()


def verify_conservation(P: MatRF) -> bool:
    """``d[dbar P, P] + dbar[d P, P] = 0`` exactly."""
    lhs = comm(P.d_xibar(), P).d_xi() + comm(P.d_xi(), P).d_xibar()
    return lhs.is_zero()


def lagrangian_density(P: MatRF) -> RatFun:
    """``tr(dP dbarP)``."""
    return (P.d_xi() @ P.d_xibar()).trace().reduced()


class Holomorphy(str, Enum):
    HOLOMORPHIC = "holomorphic"
    ANTIHOLOMORPHIC = "antiholomorphic"
    MIXED = "mixed"


def holomorphy_class(P: MatRF) -> Holomorphy:
    lowered = raised = True
    try:
        pi_minus(P)
    except Annihilated:
        lowered = False
    try:
        pi_plus(P)
    except Annihilated:
        raised = False
    if not lowered and not raised:
        raise DegenerateProjector("both ladder operators annihilate the projector")
    if not lowered:
        return Holomorphy.HOLOMORPHIC
    if not raised:
        return Holomorphy.ANTIHOLOMORPHIC
    return Holomorphy.MIXED


def orthogonality_holds(tower: ProjectorTower) -> bool:
    """``P_k P_j = delta_kj P_j`` for all pairs and ``sum P_j = I``."""
    ps = tower.projectors
    for k, Pk in enumerate(ps):
        for j, Pj in enumerate(ps):
            prod = Pk @ Pj
            if not (prod - Pj if j == k else prod).is_zero():
                return False
    return completeness_holds(tower)


def completeness_holds(tower: ProjectorTower) -> bool:
    total = MatRF.zero(tower.n)
    for P in tower:
        total = total + P
    return total == MatRF.identity(tower.n)


def seed_from_ints(*rows: Sequence[int | Fraction]) -> HoloSeed:
    """Shorthand: ``seed_from_ints([1], [0, 1])`` is the seed (1, xi)."""
    return HoloSeed.from_coefficients(rows)
