"""Exact combinatorics of the eigenvalues of the surfaces X_k.

All values are the eigenvalues of ``-i X_k`` as :class:`fractions.Fraction`.
For each k the spectrum is ``S_k = {c_k, c_k - 1, c_k - 2}`` with
``c_k = (1 + 2k)/N``; ``c_0 - 2`` and ``c_{N-1}`` are never realized and are
kept as flagged ghost members.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Literal

from .errors import DimensionTooSmall, IndexOutOfRange, PropositionViolated


class Klass(str, Enum):
    DPLUS = "Dplus"
    DZERO = "Dzero"
    DMINUS = "Dminus"


# offset of each class from c_k
_OFFSET = {Klass.DPLUS: 0, Klass.DZERO: -1, Klass.DMINUS: -2}
_ORDER = {Klass.DMINUS: 0, Klass.DZERO: 1, Klass.DPLUS: 2}


def c_of(k: int, n: int) -> Fraction:
    if n < 1 or not 0 <= k < n:
        raise IndexOutOfRange(f"k={k} outside 0..{n - 1}")
    return Fraction(1 + 2 * k, n)


@dataclass(frozen=True)
class EigenValue:
    value: Fraction
    klass: Klass
    k_origin: int
    ghost: bool = False

    def sort_key(self):
        return (self.value, _ORDER[self.klass], self.k_origin)


@dataclass(frozen=True)
class EigenSet:
    n: int
    members: tuple[EigenValue, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "members", tuple(sorted(self.members, key=EigenValue.sort_key))
        )

    def _values(self, klass: Klass) -> frozenset[Fraction]:
        return frozenset(m.value for m in self.members if m.klass is klass and not m.ghost)

    @property
    def Dplus(self) -> frozenset[Fraction]:
        return self._values(Klass.DPLUS)

    @property
    def Dzero(self) -> frozenset[Fraction]:
        return self._values(Klass.DZERO)

    @property
    def Dminus(self) -> frozenset[Fraction]:
        return self._values(Klass.DMINUS)

    @property
    def D(self) -> frozenset[Fraction]:
        return self.Dplus | self.Dminus

    @property
    def S(self) -> frozenset[Fraction]:
        return self.D | self.Dzero

    @property
    def ghosts(self) -> tuple[EigenValue, ...]:
        return tuple(m for m in self.members if m.ghost)

    @property
    def realized(self) -> tuple[EigenValue, ...]:
        return tuple(m for m in self.members if not m.ghost)

    def degeneracy(self, member: EigenValue) -> int:
        """Multiplicity of ``member.value`` in the spectrum of ``-i X_k``."""
        k, n = member.k_origin, self.n
        if member.klass is Klass.DPLUS:
            return n - 1 - k
        if member.klass is Klass.DZERO:
            return 1
        return k

    def spectrum_of(self, k: int) -> dict[Fraction, int]:
        """Eigenvalues of ``-i X_k`` with multiplicities."""
        return {m.value: self.degeneracy(m) for m in self.members
                if m.k_origin == k and not m.ghost}


def build_S(n: int) -> EigenSet:
    if n < 2:
        raise DimensionTooSmall("N must be at least 2")
    members = []
    for k in range(n):
        c = c_of(k, n)
        members.append(EigenValue(c, Klass.DPLUS, k, ghost=(k == n - 1)))
        members.append(EigenValue(c - 1, Klass.DZERO, k))
        members.append(EigenValue(c - 2, Klass.DMINUS, k, ghost=(k == 0)))
    return EigenSet(n, tuple(members))


def class_bounds(n: int) -> dict[Klass, tuple[Fraction, Fraction]]:
    return {
        Klass.DPLUS: (Fraction(1, n), 2 - Fraction(3, n)),
        Klass.DZERO: (-1 + Fraction(1, n), 1 - Fraction(1, n)),
        Klass.DMINUS: (-2 + Fraction(3, n), -Fraction(1, n)),
    }


def verify_bounds(n: int) -> bool:
    es = build_S(n)
    sets = {Klass.DPLUS: es.Dplus, Klass.DZERO: es.Dzero, Klass.DMINUS: es.Dminus}
    for klass, (lo, hi) in class_bounds(n).items():
        vals = sets[klass]
        if not vals or min(vals) != lo or max(vals) != hi:
            return False
    return True


def verify_symmetry(n: int) -> bool:
    """D0 is symmetric about 0 and negation maps D+ onto D-."""
    es = build_S(n)
    return (
        frozenset(-x for x in es.Dzero) == es.Dzero
        and frozenset(-x for x in es.Dplus) == es.Dminus
        and len(es.Dplus) == len(es.Dminus)
    )


def verify_intersections(n: int) -> Literal["disjoint", "contained"]:
    es = build_S(n)
    if n % 2 == 1 and not (es.Dzero & es.D):
        return "disjoint"
    if n % 2 == 0 and es.Dzero <= es.D:
        return "contained"
    raise PropositionViolated(f"D0 vs D intersection has unexpected shape for N={n}")


def _uniform_step(points: list[Fraction]) -> Fraction:
    steps = {b - a for a, b in zip(points, points[1:])}
    if len(steps) != 1:
        raise PropositionViolated(f"nonuniform spacing {sorted(steps)}")
    return steps.pop()


def spacing_profile(n: int) -> list[tuple[tuple[Fraction, Fraction], Fraction]]:
    """Observed step on each interval of uniform spacing, in ascending order.

    Intervals holding a single point carry no step and are omitted.
    """
    S = sorted(build_S(n).S)
    if n % 2 == 0:
        intervals = [(S[0], S[-1])]
    else:
        top = 2 - Fraction(3, n)
        intervals = [(-top, Fraction(-1)), (Fraction(-1), Fraction(1)), (Fraction(1), top)]
    out = []
    for lo, hi in intervals:
        pts = [x for x in S if lo <= x <= hi]
        if len(pts) >= 2:
            out.append(((lo, hi), _uniform_step(pts)))
    return out


def verify_spacing(n: int) -> bool:
    profile = spacing_profile(n)
    if n % 2 == 0:
        return len(profile) == 1 and profile[0][1] == Fraction(2, n)
    for (lo, hi), step in profile:
        expected = Fraction(1, n) if (lo, hi) == (-1, 1) else Fraction(2, n)
        if step != expected:
            return False
    return any(iv == (-1, 1) for iv, _ in profile)


def cardinality(n: int) -> tuple[int, int]:
    """(distinct eigenvalues, eigenvalues counted once per surface)."""
    es = build_S(n)
    return len(es.S), len(es.realized)


def verify_cardinality(n: int) -> bool:
    distinct, total = cardinality(n)
    es = build_S(n)
    expected = 3 * n - 2 if n % 2 else 2 * n - 2
    return (
        distinct == expected
        and total == 3 * n - 2
        and len(es.Dplus) == len(es.Dminus) == n - 1
        and len(es.Dzero) == n
    )


# Interval housing each class when the ghosts are included.
_CLASS_INTERVAL = {
    Klass.DMINUS: (Fraction(-2), Fraction(0)),
    Klass.DZERO: (Fraction(-1), Fraction(1)),
    Klass.DPLUS: (Fraction(0), Fraction(2)),
}


def place_evenly(lo: Fraction, hi: Fraction, m: int) -> list[Fraction]:
    """m evenly spaced points at maximal spacing, each at least 1/m from the ends."""
    if m < 1:
        raise DimensionTooSmall("need at least one point")
    gap = Fraction(1, m)
    if m == 1:
        return [(lo + hi) / 2]
    step = (hi - lo - 2 * gap) / (m - 1)
    return [lo + gap + j * step for j in range(m)]


def _from_class_points(n: int, points: dict[Klass, list[Fraction]]) -> EigenSet:
    members = []
    for klass, pts in points.items():
        for j, x in enumerate(sorted(pts)):
            ghost = (klass is Klass.DMINUS and j == 0) or (
                klass is Klass.DPLUS and j == len(pts) - 1)
            members.append(EigenValue(x, klass, j, ghost))
    return EigenSet(n, tuple(members))


def induct(n: int, direction: Literal["up", "down"]) -> EigenSet:
    """Reposition the points of S(n) after adding/removing one per interval."""
    if n < 2 or (direction == "down" and n < 3):
        raise DimensionTooSmall(f"cannot induct {direction} from N={n}")
    if direction not in ("up", "down"):
        raise ValueError(f"direction must be 'up' or 'down', not {direction!r}")
    es = build_S(n)
    delta = 1 if direction == "up" else -1
    points = {}
    for klass, (lo, hi) in _CLASS_INTERVAL.items():
        count = sum(1 for m in es.members if m.klass is klass)
        points[klass] = place_evenly(lo, hi, count + delta)
    return _from_class_points(n + delta, points)


# -- figure data --------------------------------------------------------------

@dataclass(frozen=True)
class Marker:
    position: Fraction
    marker: Literal["dot", "cross", "filled_ghost"]
    k_origin: int
    klass: Klass
    ghost: bool


@dataclass(frozen=True)
class Arrow:
    source: Fraction
    target: Fraction
    k_from: int


@dataclass(frozen=True)
class FigureData:
    n: int
    markers: tuple[Marker, ...]
    arrows: tuple[Arrow, ...] = field(default_factory=tuple)

    CSV_COLUMNS = ("position_num", "position_den", "marker", "k_origin", "klass", "ghost")

    def positions(self) -> list[tuple[Fraction, tuple[Marker, ...]]]:
        """Distinct realized positions in ascending order, with the markers drawn there."""
        at: dict[Fraction, list[Marker]] = {}
        for m in self.markers:
            if not m.ghost:
                at.setdefault(m.position, []).append(m)
        return [(v, tuple(at[v])) for v in sorted(at)]

    def to_csv(self) -> str:
        """One row per marker; crosses sharing a dot's position get their own row."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for m in self.markers:
            w.writerow([m.position.numerator, m.position.denominator, m.marker,
                        m.k_origin, m.klass.value, str(m.ghost).lower()])
        return buf.getvalue()

    def to_svg(self) -> str:
        return render_svg(self)


def figure_data(n: int) -> FigureData:
    es = build_S(n)
    markers = []
    for m in es.members:
        kind = "filled_ghost" if m.ghost else "cross" if m.klass is Klass.DZERO else "dot"
        markers.append(Marker(m.value, kind, m.k_origin, m.klass, m.ghost))
    step = Fraction(2, n)
    arrows = []
    for k in range(n - 1):
        c = c_of(k, n)
        for v in (c - 2, c - 1, c):
            arrows.append(Arrow(v, v + step, k))
    return FigureData(n, tuple(markers), tuple(arrows))


def read_figure_csv(text: str) -> list[dict]:
    """Parse the CSV written by :meth:`FigureData.to_csv`."""
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        rows.append({
            "position": Fraction(int(r["position_num"]), int(r["position_den"])),
            "marker": r["marker"],
            "k_origin": int(r["k_origin"]),
            "klass": Klass(r["klass"]),
            "ghost": r["ghost"] == "true",
        })
    return rows


_SVG_W, _SVG_H, _MARGIN = 880, 200, 40
_AXIS_Y = 120


def _sx(x: Fraction) -> str:
    scale = Fraction(_SVG_W - 2 * _MARGIN, 4)
    return f"{float(_MARGIN + (x + 2) * scale):.3f}"


def render_svg(fig: FigureData) -> str:
    """Static rendering: hollow dots for D, crosses for D0, filled ghosts, chi arrows."""
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}" data-n="{fig.n}">',
        f'<title>Eigenvalues of -iX_k for N={fig.n}</title>',
        f'<line class="axis" x1="{_MARGIN}" y1="{_AXIS_Y}" x2="{_SVG_W - _MARGIN}" '
        f'y2="{_AXIS_Y}" stroke="black" stroke-width="1"/>',
    ]
    for t in range(-2, 3):
        x = _sx(Fraction(t))
        out.append(f'<line class="tick" x1="{x}" y1="{_AXIS_Y - 4}" x2="{x}" '
                   f'y2="{_AXIS_Y + 4}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{_AXIS_Y + 22}" font-size="12" '
                   f'text-anchor="middle">{t}</text>')
    out.append('<g class="arrows" fill="none" stroke="gray" stroke-width="0.8">')
    for a in fig.arrows:
        x0, x1 = _sx(a.source), _sx(a.target)
        lift = 18 + 6 * (a.k_from % 3)
        out.append(
            f'<path class="arrow" data-from="{a.source}" data-to="{a.target}" '
            f'data-k="{a.k_from}" d="M {x0} {_AXIS_Y - 10} Q '
            f'{(float(x0) + float(x1)) / 2:.3f} {_AXIS_Y - 10 - lift} {x1} {_AXIS_Y - 10}"/>'
        )
    out.append("</g>")
    for m in fig.markers:
        x = _sx(m.position)
        attrs = f'data-value="{m.position}" data-k="{m.k_origin}" data-klass="{m.klass.value}"'
        if m.marker == "cross":
            y0, y1 = _AXIS_Y - 5, _AXIS_Y + 5
            xf = float(x)
            out.append(
                f'<path class="cross" {attrs} d="M {xf - 5:.3f} {y0} L {xf + 5:.3f} {y1} '
                f'M {xf - 5:.3f} {y1} L {xf + 5:.3f} {y0}" stroke="blue" stroke-width="1.5"/>'
            )
        elif m.marker == "dot":
            out.append(f'<circle class="dot" {attrs} cx="{x}" cy="{_AXIS_Y}" r="6" '
                       f'fill="none" stroke="black" stroke-width="1.2"/>')
        else:
            out.append(f'<circle class="ghost" {attrs} cx="{x}" cy="{_AXIS_Y}" r="6" '
                       f'fill="black" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def format_table(n: int) -> str:
    """One row per distinct eigenvalue followed by the ghost rows."""
    es = build_S(n)
    by_value: dict[Fraction, list[EigenValue]] = {}
    for m in es.realized:
        by_value.setdefault(m.value, []).append(m)
    lines = [f"# S({n}): {len(by_value)} distinct eigenvalues of -iX_k",
             f"{'value':>10}  {'float':>10}  classes"]
    for v in sorted(by_value):
        tags = ", ".join(f"{m.klass.value}(k={m.k_origin}, mult={es.degeneracy(m)})"
                         for m in by_value[v])
        lines.append(f"{str(v):>10}  {float(v):>10.6f}  {tags}")
    for g in es.ghosts:
        lines.append(f"{str(g.value):>10}  {float(g.value):>10.6f}  "
                     f"ghost {g.klass.value}(k={g.k_origin})")
    return "\n".join(lines) + "\n"
