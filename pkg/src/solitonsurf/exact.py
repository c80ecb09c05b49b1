"""Exact arithmetic over Q(i): scalars, polynomials in (xi, xibar), rational
functions and square matrices of rational functions.

``xi`` and ``xibar`` are independent commuting indeterminates.  Complex
conjugation of a function is the combination of conjugating every coefficient
and swapping the two variables, see :meth:`BiPoly.star`.

Polynomials are stored as a pair (real part, imaginary part) of
``flint.fmpq_mpoly`` objects, which provide fast exact multiplication and
gcd over Q.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence, Union

import flint

from .errors import ParseError

_CTX = flint.fmpq_mpoly_ctx.get(("xi", "xib"), "deglex")
_ZERO = _CTX.from_dict({})
_ONE = _CTX.from_dict({(0, 0): 1})

# Reduce rational functions by a polynomial gcd once a numerator or
# denominator exceeds this total degree.
REDUCE_DEGREE_THRESHOLD = 40


def _to_fmpq(q: Fraction) -> flint.fmpq:
    return flint.fmpq(q.numerator, q.denominator)


def _to_fraction(q: flint.fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


@dataclass(frozen=True)
class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        if isinstance(value, str):
            return parse_gaussian(value)
        raise TypeError(f"cannot convert {type(value).__name__} to GaussianRational")

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "i" if self.im == 1 else "-i" if self.im == -1 else f"{self.im}*i"
        if self.re == 0:
            return im
        sign = "" if im.startswith("-") else "+"
        return f"{self.re}{sign}{im}"


_RAT = r"\d+(?:/\d+)?"
_GAUSS_RE = re.compile(
    rf"^(?P<re>[+-]?{_RAT})?"
    rf"(?:(?P<isign>[+-])?(?:(?P<im>{_RAT})\*)?(?P<unit>i))?$"
)


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``"a/b"``, ``"a/b+c/d*i"``, ``"-i"``, ``"3*i"`` and the like.

    The unicode minus sign is accepted.  Floats are rejected.
    """
    s = text.strip().replace("−", "-").replace(" ", "")
    m = _GAUSS_RE.match(s)
    if not s or m is None:
        raise ParseError(f"malformed Gaussian rational {text!r}")
    if m.group("re") is not None and m.group("unit") and m.group("isign") is None:
        raise ParseError(f"malformed Gaussian rational {text!r}")
    try:
        re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
        im_part = Fraction(0)
        if m.group("unit"):
            im_part = Fraction(m.group("im")) if m.group("im") else Fraction(1)
            if m.group("isign") == "-":
                im_part = -im_part
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text!r}") from None
    return GaussianRational(re_part, im_part)


Scalar = Union[int, Fraction, GaussianRational]


def _int_mono(m) -> tuple[int, int]:
    return int(m[0]), int(m[1])


def _mono_key(m: tuple[int, int]) -> tuple[int, int]:
    # graded lexicographic with xi > xibar
    return (m[0] + m[1], m[0])


class BiPoly:
    """Polynomial in xi and xibar with Gaussian-rational coefficients."""

    __slots__ = ("re", "im")

    def __init__(self, re_part=None, im_part=None):
        self.re = _ZERO if re_part is None else re_part
        self.im = _ZERO if im_part is None else im_part

    # -- construction ---------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int], Scalar]) -> "BiPoly":
        re_d, im_d = {}, {}
        for (a, b), c in terms.items():
            if a < 0 or b < 0:
                raise ValueError("exponents must be nonnegative")
            g = GaussianRational.coerce(c)
            if g.re:
                re_d[(a, b)] = re_d.get((a, b), 0) + _to_fmpq(g.re)
            if g.im:
                im_d[(a, b)] = im_d.get((a, b), 0) + _to_fmpq(g.im)
        return cls(_CTX.from_dict(re_d), _CTX.from_dict(im_d))

    @classmethod
    def const(cls, c: Scalar) -> "BiPoly":
        return cls.from_terms({(0, 0): c})

    @classmethod
    def xi(cls) -> "BiPoly":
        return cls.from_terms({(1, 0): 1})

    @classmethod
    def xibar(cls) -> "BiPoly":
        return cls.from_terms({(0, 1): 1})

    @classmethod
    def coerce(cls, value) -> "BiPoly":
        if isinstance(value, BiPoly):
            return value
        return cls.const(value)

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, int], GaussianRational]:
        out: dict[tuple[int, int], GaussianRational] = {}
        for m, c in self.re.terms():
            out[_int_mono(m)] = GaussianRational(_to_fraction(c))
        for m, c in self.im.terms():
            m = _int_mono(m)
            g = out.get(m, GaussianRational())
            out[m] = GaussianRational(g.re, _to_fraction(c))
        return dict(sorted(out.items(), key=lambda kv: _mono_key(kv[0]), reverse=True))

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def is_constant(self) -> bool:
        return self.re.is_constant() and self.im.is_constant()

    def total_degree(self) -> int:
        return int(max(self.re.total_degree(), self.im.total_degree()))

    def degree_xi(self) -> int:
        return int(max(self.re.degrees()[0] if not self.re.is_zero() else -1,
                       self.im.degrees()[0] if not self.im.is_zero() else -1))

    def degree_xibar(self) -> int:
        return int(max(self.re.degrees()[1] if not self.re.is_zero() else -1,
                       self.im.degrees()[1] if not self.im.is_zero() else -1))

    def leading_monomial(self) -> tuple[int, int]:
        cands = [_int_mono(p.monoms()[0]) for p in (self.re, self.im) if not p.is_zero()]
        if not cands:
            raise ValueError("zero polynomial has no leading monomial")
        return max(cands, key=_mono_key)

    def leading_coeff(self) -> GaussianRational:
        lm = self.leading_monomial()
        parts = []
        for p in (self.re, self.im):
            if not p.is_zero() and _int_mono(p.monoms()[0]) == lm:
                parts.append(_to_fraction(p.leading_coefficient()))
            else:
                parts.append(Fraction(0))
        return GaussianRational(*parts)

    def coefficient(self, mono: tuple[int, int]) -> GaussianRational:
        return self.terms.get(tuple(mono), GaussianRational())

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, BiPoly):
            try:
                other = BiPoly.const(other)
            except TypeError:
                return NotImplemented
        return BiPoly(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, BiPoly):
            try:
                other = BiPoly.const(other)
            except TypeError:
                return NotImplemented
        return BiPoly(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            try:
                return self.scale(GaussianRational.coerce(other))
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if b.is_zero() and d.is_zero():
            return BiPoly(a * c)
        if b.is_zero():
            return BiPoly(a * c, a * d)
        if d.is_zero():
            return BiPoly(a * c, b * c)
        return BiPoly(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("BiPoly power must be a nonnegative int")
        result = BiPoly(_ONE)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: GaussianRational) -> "BiPoly":
        s, t = _to_fmpq(c.re), _to_fmpq(c.im)
        if c.im == 0:
            return BiPoly(self.re * s, self.im * s)
        return BiPoly(self.re * s - self.im * t, self.im * s + self.re * t)

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            try:
                other = BiPoly.const(other)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    __hash__ = None

    # -- calculus and conjugation ---------------------------------------
    def d_xi(self) -> "BiPoly":
        return BiPoly(self.re.derivative(0), self.im.derivative(0))

    def d_xibar(self) -> "BiPoly":
        return BiPoly(self.re.derivative(1), self.im.derivative(1))

    def swap(self) -> "BiPoly":
        """Exchange xi and xibar."""
        x, y = _CTX.gens()
        return BiPoly(self.re.compose(y, x), self.im.compose(y, x))

    def conj_coeffs(self) -> "BiPoly":
        return BiPoly(self.re, -self.im)

    def star(self) -> "BiPoly":
        """Complex conjugate of the function: conjugate coefficients, swap variables."""
        x, y = _CTX.gens()
        return BiPoly(self.re.compose(y, x), -self.im.compose(y, x))

    def exact_div(self, g) -> "BiPoly":
        """Divide by a real polynomial ``g`` (an fmpq_mpoly) known to divide."""
        return BiPoly(self.re / g, self.im / g)

    # -- evaluation -----------------------------------------------------
    def __call__(self, xi, xibar=None):
        """Evaluate numerically; ``xibar`` defaults to ``conj(xi)``."""
        if xibar is None:
            xibar = complex(xi).conjugate()
        total = 0j
        for (a, b), c in self.terms.items():
            total += complex(c) * xi**a * xibar**b
        return total

    def __repr__(self):
        return f"BiPoly({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for (a, b), c in self.terms.items():
            mono = "*".join(
                s for s in (
                    "" if a == 0 else "xi" if a == 1 else f"xi^{a}",
                    "" if b == 0 else "xibar" if b == 1 else f"xibar^{b}",
                ) if s
            )
            coeff = str(c)
            if c.re != 0 and c.im != 0:
                coeff = f"({coeff})"
            if not mono:
                parts.append(coeff)
            elif coeff == "1":
                parts.append(mono)
            elif coeff == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _real_gcd(polys: Iterable[BiPoly]):
    """Gcd over Q of all real and imaginary parts.

    Any real common factor divides every input over Q(i); factors that only
    exist over Q(i) are missed, which is harmless because reduction is only
    an optimisation.
    """
    g = _ZERO
    for p in polys:
        for part in (p.re, p.im):
            if part.is_zero():
                continue
            g = part if g.is_zero() else g.gcd(part)
            if g.is_one():
                return g
    return g


class RatFun:
    """Quotient ``num / den`` of two BiPoly.

    The denominator is scaled to have leading coefficient 1 (deglex,
    xi > xibar).  No gcd cancellation happens unless a degree exceeds
    :data:`REDUCE_DEGREE_THRESHOLD`; equality is cross-multiplicative.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, reduce: bool | None = None):
        num = BiPoly.coerce(num)
        den = BiPoly(_ONE) if den is None else BiPoly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("RatFun with zero denominator")
        lc = den.leading_coeff()
        if lc != 1:
            inv = lc.inverse()
            num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den
        if reduce is None:
            reduce = max(num.total_degree(), den.total_degree()) > REDUCE_DEGREE_THRESHOLD
        if reduce:
            self._reduce_inplace()

    def _reduce_inplace(self):
        if self.num.is_zero():
            self.num, self.den = BiPoly(), BiPoly(_ONE)
            return
        g = _real_gcd([self.num, self.den])
        if not g.is_constant():
            num, den = self.num.exact_div(g), self.den.exact_div(g)
            inv = den.leading_coeff().inverse()
            self.num, self.den = num.scale(inv), den.scale(inv)

    def reduced(self) -> "RatFun":
        return RatFun(self.num, self.den, reduce=True)

    @classmethod
    def coerce(cls, value) -> "RatFun":
        if isinstance(value, RatFun):
            return value
        return cls(BiPoly.coerce(value))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def total_degree(self) -> int:
        return max(self.num.total_degree(), self.den.total_degree())

    def __add__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RatFun(self.num + o.num, self.den)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return RatFun.coerce(other) - self

    def __mul__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("RatFun division by zero")
        return RatFun(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RatFun.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFun(1) / self ** (-k)
        return RatFun(self.num**k, self.den**k)

    def __eq__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return rf_equal(self, o)

    __hash__ = None

    def d_xi(self) -> "RatFun":
        n, d = self.num, self.den
        if d.is_constant():
            return RatFun(n.d_xi(), d)
        return RatFun(n.d_xi() * d - n * d.d_xi(), d * d)

    def d_xibar(self) -> "RatFun":
        n, d = self.num, self.den
        if d.is_constant():
            return RatFun(n.d_xibar(), d)
        return RatFun(n.d_xibar() * d - n * d.d_xibar(), d * d)

    def star(self) -> "RatFun":
        return RatFun(self.num.star(), self.den.star())

    def __call__(self, xi, xibar=None):
        return self.num(xi, xibar) / self.den(xi, xibar)

    def __repr__(self):
        return f"RatFun(({self.num}) / ({self.den}))"


def rf_equal(a: RatFun, b: RatFun) -> bool:
    """Cross-multiplicative equality of rational functions."""
    a, b = RatFun.coerce(a), RatFun.coerce(b)
    if a.den == b.den:
        return a.num == b.num
    return (a.num * b.den - b.num * a.den).is_zero()


def _common_denominator(dens: Sequence[BiPoly]) -> BiPoly:
    out = dens[0]
    for d in dens[1:]:
        if d == out or d.is_constant():
            continue
        if out.is_constant():
            out = d
            continue
        g = _real_gcd([out, d])
        out = out * (d if g.is_constant() else d.exact_div(g))
    return out


class MatRF:
    """Square matrix of rational functions sharing one denominator.

    ``M[i, j]`` and :attr:`entries` expose the entries as :class:`RatFun`.
    """

    __slots__ = ("n", "nums", "den")

    def __init__(self, nums: Sequence[Sequence[BiPoly]], den: BiPoly | None = None,
                 *, reduce: bool | None = None):
        self.n = len(nums)
        if any(len(row) != self.n for row in nums):
            raise ValueError("MatRF must be square")
        den = BiPoly(_ONE) if den is None else den
        if den.is_zero():
            raise ZeroDivisionError("MatRF with zero denominator")
        lc = den.leading_coeff()
        if lc != 1:
            inv = lc.inverse()
            nums = [[p.scale(inv) for p in row] for row in nums]
            den = den.scale(inv)
        self.nums = tuple(tuple(row) for row in nums)
        self.den = den
        if reduce is None:
            reduce = self.max_degree() > REDUCE_DEGREE_THRESHOLD
        if reduce:
            self._reduce_inplace()

    def _reduce_inplace(self):
        flat = [p for row in self.nums for p in row]
        if all(p.is_zero() for p in flat):
            self.den = BiPoly(_ONE)
            return
        g = _real_gcd(flat + [self.den])
        if g.is_constant():
            return
        den = self.den.exact_div(g)
        inv = den.leading_coeff().inverse()
        self.den = den.scale(inv)
        self.nums = tuple(tuple(p.exact_div(g).scale(inv) for p in row) for row in self.nums)

    def reduced(self) -> "MatRF":
        return MatRF(self.nums, self.den, reduce=True)

    def max_degree(self) -> int:
        return max([self.den.total_degree()] + [p.total_degree() for row in self.nums for p in row])

    # -- construction ---------------------------------------------------
    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "MatRF":
        ents = [[RatFun.coerce(e) for e in row] for row in rows]
        den = _common_denominator([e.den for row in ents for e in row])
        nums = [[e.num if e.den == den else e.num * _div_exact_complex(den, e.den) for e in row]
                for row in ents]
        return cls(nums, den)

    @classmethod
    def identity(cls, n: int) -> "MatRF":
        return cls.scalar(n, 1)

    @classmethod
    def zero(cls, n: int) -> "MatRF":
        return cls([[BiPoly() for _ in range(n)] for _ in range(n)])

    @classmethod
    def scalar(cls, n: int, c) -> "MatRF":
        r = RatFun.coerce(c)
        return cls([[r.num if i == j else BiPoly() for j in range(n)] for i in range(n)], r.den)

    @property
    def entries(self) -> tuple[tuple[RatFun, ...], ...]:
        return tuple(tuple(RatFun(p, self.den) for p in row) for row in self.nums)

    def __getitem__(self, ij) -> RatFun:
        i, j = ij
        return RatFun(self.nums[i][j], self.den)

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "MatRF"):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, MatRF):
            return NotImplemented
        self._check(other)
        if self.den == other.den:
            return MatRF([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.nums, other.nums)],
                         self.den)
        g = _real_gcd([self.den, other.den])
        if g.is_constant():
            fa, fb = other.den, self.den
            den = self.den * other.den
        else:
            fa, fb = other.den.exact_div(g), self.den.exact_div(g)
            den = self.den * fa
        return MatRF([[a * fa + b * fb for a, b in zip(r1, r2)]
                      for r1, r2 in zip(self.nums, other.nums)], den)

    def __neg__(self):
        return MatRF([[-p for p in row] for row in self.nums], self.den)

    def __sub__(self, other):
        if not isinstance(other, MatRF):
            return NotImplemented
        return self + (-other)

    def __matmul__(self, other):
        if not isinstance(other, MatRF):
            return NotImplemented
        self._check(other)
        n = self.n
        cols = list(zip(*other.nums))
        nums = []
        for row in self.nums:
            out = []
            for col in cols:
                acc = BiPoly()
                for a, b in zip(row, col):
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                out.append(acc)
            nums.append(out)
        assert len(nums) == n
        return MatRF(nums, self.den * other.den)

    def __mul__(self, c):
        if isinstance(c, MatRF):
            return NotImplemented
        try:
            r = RatFun.coerce(c)
        except TypeError:
            return NotImplemented
        return MatRF([[p * r.num for p in row] for row in self.nums], self.den * r.den)

    __rmul__ = __mul__

    def __truediv__(self, c):
        r = RatFun.coerce(c)
        if r.is_zero():
            raise ZeroDivisionError("MatRF division by zero scalar")
        return MatRF([[p * r.den for p in row] for row in self.nums], self.den * r.num)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative matrix power")
        out = MatRF.identity(self.n)
        for _ in range(k):
            out = out @ self
        return out

    def trace(self) -> RatFun:
        acc = BiPoly()
        for i in range(self.n):
            acc = acc + self.nums[i][i]
        return RatFun(acc, self.den)

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.nums for p in row)

    def __eq__(self, other):
        if not isinstance(other, MatRF):
            return NotImplemented
        if other.n != self.n:
            return False
        if self.den == other.den:
            return self.nums == other.nums
        return (self - other).is_zero()

    __hash__ = None

    def d_xi(self) -> "MatRF":
        d = self.den
        if d.is_constant():
            return MatRF([[p.d_xi() for p in row] for row in self.nums], d)
        dd = d.d_xi()
        return MatRF([[p.d_xi() * d - p * dd for p in row] for row in self.nums], d * d)

    def d_xibar(self) -> "MatRF":
        d = self.den
        if d.is_constant():
            return MatRF([[p.d_xibar() for p in row] for row in self.nums], d)
        dd = d.d_xibar()
        return MatRF([[p.d_xibar() * d - p * dd for p in row] for row in self.nums], d * d)

    def herm_conj(self) -> "MatRF":
        n = self.n
        return MatRF([[self.nums[j][i].star() for j in range(n)] for i in range(n)],
                     self.den.star())

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(str(p) for p in row) + "]" for row in self.nums)
        return f"MatRF([{rows}] / ({self.den}))"


def _div_exact_complex(p: BiPoly, d: BiPoly) -> BiPoly:
    """Exact quotient ``p / d`` for a divisor ``d`` that may be complex."""
    if d.is_real():
        return p.exact_div(d.re)
    # (u + iv)(u - iv) = u^2 + v^2 is real
    dc = d.conj_coeffs()
    return (p * dc).exact_div((d * dc).re)


def comm(a: MatRF, b: MatRF) -> MatRF:
    return a @ b - b @ a


def d_xi(f):
    """Exact partial derivative with respect to xi (RatFun, BiPoly or MatRF)."""
    return f.d_xi()


def d_xibar(f):
    """Exact partial derivative with respect to xibar."""
    return f.d_xibar()


def herm_conj(m: MatRF) -> MatRF:
    return m.herm_conj()


def mat_is_zero(m: MatRF) -> bool:
    return m.is_zero()


def xi() -> RatFun:
    return RatFun(BiPoly.xi())


def xibar() -> RatFun:
    return RatFun(BiPoly.xibar())


def poly_xi(coeffs: Sequence[Scalar]) -> BiPoly:
    """Polynomial in xi alone from coefficients in ascending powers."""
    return BiPoly.from_terms({(k, 0): c for k, c in enumerate(coeffs) if GaussianRational.coerce(c)})


def matrix(rows: Sequence[Sequence]) -> MatRF:
    """Convenience constructor from nested entries (RatFun/BiPoly/scalars)."""
    return MatRF.from_entries(rows)


def ratfun_sum(items: Iterable[RatFun]) -> RatFun:
    return reduce(lambda a, b: a + b, items, RatFun(0))
