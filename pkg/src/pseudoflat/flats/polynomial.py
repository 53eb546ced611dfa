"""Exact polynomials over the rationals.

``Poly`` is a sparse multivariate polynomial (exponent tuple -> Fraction);
``UPoly`` is a dense univariate polynomial used for elimination and for
counting real roots with Sturm sequences.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

Monomial = Tuple[int, ...]
Number = Union[int, Fraction]
Interval = Tuple[Fraction, Fraction]

VAR_NAMES = ("x", "y", "z", "w")


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Mapping[Monomial, Number]] = None) -> None:
        self.nvars = nvars
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} does not have {nvars} exponents")
            value = clean.get(mono, Fraction(0)) + Fraction(coeff)
            if value:
                clean[mono] = value
            else:
                clean.pop(mono, None)
        self.terms = clean

    @classmethod
    def constant(cls, nvars: int, value: Number) -> "Poly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Poly":
        mono = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, {mono: 1})

    @classmethod
    def linear(cls, coeffs: Sequence[Number], constant: Number = 0) -> "Poly":
        n = len(coeffs)
        terms: Dict[Monomial, Number] = {(0,) * n: constant}
        for i, c in enumerate(coeffs):
            terms[tuple(1 if k == i else 0 for k in range(n))] = c
        return cls(n, terms)

    # arithmetic

    def _coerce(self, other: Union["Poly", Number]) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"cannot combine polynomials in {self.nvars} and {other.nvars} variables")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other: Union["Poly", Number]) -> "Poly":
        other = self._coerce(other)
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + c
        return Poly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Union["Poly", Number]) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Number) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other: Union["Poly", Number]) -> "Poly":
        other = self._coerce(other)
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                terms[mono] = terms.get(mono, Fraction(0)) + c1 * c2
        return Poly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        result = Poly.constant(self.nvars, 1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, self.key()))

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def key(self) -> Tuple[Tuple[Monomial, Fraction], ...]:
        return tuple(sorted(self.terms.items()))

    def leading_coefficient(self) -> Fraction:
        mono = max(self.terms, key=lambda m: (sum(m), m))
        return self.terms[mono]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.leading_coefficient()
        return Poly(self.nvars, {m: c / lead for m, c in self.terms.items()})

    def top_form(self) -> "Poly":
        d = self.degree
        return Poly(self.nvars, {m: c for m, c in self.terms.items() if sum(m) == d})

    # evaluation

    def evaluate(self, values: Sequence[Number]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            term = c
            for v, e in zip(values, mono):
                if e:
                    term *= Fraction(v) ** e
            total += term
        return total

    def partial(self, assignment: Mapping[int, Number]) -> "Poly":
        """Substitute constants for some variables; the variable count is unchanged."""
        terms: Dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            coeff = c
            rest = list(mono)
            for i, v in assignment.items():
                if mono[i]:
                    coeff *= Fraction(v) ** mono[i]
                    rest[i] = 0
            key = tuple(rest)
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return Poly(self.nvars, terms)

    def compose(self, subs: Sequence["Poly"]) -> "Poly":
        """Replace variable i by ``subs[i]``; the result lives in ``subs[0].nvars`` variables."""
        if len(subs) != self.nvars:
            raise ValueError(f"expected {self.nvars} substitutions, got {len(subs)}")
        target = subs[0].nvars
        powers: Dict[Tuple[int, int], Poly] = {}

        def power(i: int, e: int) -> Poly:
            if (i, e) not in powers:
                powers[(i, e)] = subs[i] ** e
            return powers[(i, e)]

        result = Poly(target)
        for mono, c in self.terms.items():
            term = Poly.constant(target, c)
            for i, e in enumerate(mono):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def to_upoly(self, index: int) -> "UPoly":
        coeffs: Dict[int, Fraction] = {}
        for mono, c in self.terms.items():
            if any(e for i, e in enumerate(mono) if i != index):
                raise ValueError("polynomial depends on more than one variable")
            coeffs[mono[index]] = coeffs.get(mono[index], Fraction(0)) + c
        top = max(coeffs, default=-1)
        return UPoly([coeffs.get(i, Fraction(0)) for i in range(top + 1)])

    def interval(self, box: Sequence[Interval]) -> Interval:
        """Rigorous enclosure of the polynomial's range over a closed box."""
        lo_total = hi_total = Fraction(0)
        for mono, c in self.terms.items():
            lo, hi = c, c
            for (blo, bhi), e in zip(box, mono):
                if e:
                    plo, phi = _power_interval(blo, bhi, e)
                    lo, hi = _mul_interval((lo, hi), (plo, phi))
            lo_total += lo
            hi_total += hi
        return lo_total, hi_total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = VAR_NAMES if self.nvars <= len(VAR_NAMES) else tuple(f"x{i}" for i in range(self.nvars))
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0]))):
            factors = [names[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(mono) if e]
            coeff = "" if factors and c == 1 else ("-" if factors and c == -1 else str(c))
            parts.append(coeff + "*".join(factors) if coeff in ("", "-") else "*".join([coeff] + factors))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _power_interval(lo: Fraction, hi: Fraction, e: int) -> Interval:
    if e % 2 == 0 and lo < 0 < hi:
        return Fraction(0), max(lo**e, hi**e)
    a, b = lo**e, hi**e
    return (a, b) if a <= b else (b, a)


def _mul_interval(u: Interval, v: Interval) -> Interval:
    products = [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]]
    return min(products), max(products)


class UPoly:
    """Dense univariate polynomial, coefficients from the constant term upwards."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number]) -> None:
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs))

    def __add__(self, other: "UPoly") -> "UPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [Fraction(0)] * (n - len(self.coeffs))
        b = other.coeffs + [Fraction(0)] * (n - len(other.coeffs))
        return UPoly(x + y for x, y in zip(a, b))

    def __neg__(self) -> "UPoly":
        return UPoly(-c for c in self.coeffs)

    def __sub__(self, other: "UPoly") -> "UPoly":
        return self + (-other)

    def __mul__(self, other: "UPoly") -> "UPoly":
        if self.is_zero() or other.is_zero():
            return UPoly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UPoly(out)

    def scale(self, factor: Number) -> "UPoly":
        return UPoly(c * factor for c in self.coeffs)

    def divmod(self, other: "UPoly") -> Tuple["UPoly", "UPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        while len(rem) >= len(other.coeffs) and any(rem):
            shift = len(rem) - len(other.coeffs)
            factor = rem[-1] / other.lead
            quot[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= factor * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return UPoly(quot), UPoly(rem)

    def __mod__(self, other: "UPoly") -> "UPoly":
        return self.divmod(other)[1]

    def derivative(self) -> "UPoly":
        return UPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def evaluate(self, x: Number) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "UPoly":
        return self.scale(1 / self.lead) if self.coeffs else self

    def rational_roots(self) -> List[Fraction]:
        """Rational roots by the rational root theorem (distinct, sorted)."""
        from math import lcm

        if self.is_zero():
            raise ValueError("the zero polynomial has every root")
        scale = 1
        for c in self.coeffs:
            scale = lcm(scale, c.denominator)
        ints = [int(c * scale) for c in self.coeffs]
        roots = set()
        if ints[0] == 0:
            roots.add(Fraction(0))
            while ints and ints[0] == 0:
                ints.pop(0)
        if len(ints) <= 1:
            return sorted(roots)
        for p in _divisors(abs(ints[0])):
            for q in _divisors(abs(ints[-1])):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if self.evaluate(cand) == 0:
                        roots.add(cand)
        return sorted(roots)

    def __str__(self) -> str:
        return str(Poly(1, {(i,): c for i, c in enumerate(self.coeffs)}))

    __repr__ = __str__


def _divisors(n: int) -> List[int]:
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def upoly_gcd(a: UPoly, b: UPoly) -> UPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def sturm_root_count(p: UPoly) -> int:
    """Number of distinct real roots of a nonzero polynomial."""
    if p.is_zero():
        raise ValueError("the zero polynomial has infinitely many roots")
    if p.degree < 1:
        return 0
    chain = [p, p.derivative()]
    while not chain[-1].is_zero():
        chain.append(-(chain[-2] % chain[-1]))
    chain.pop()

    def variations(signs: List[int]) -> int:
        nz = [s for s in signs if s]
        return sum(1 for a, b in zip(nz, nz[1:]) if a != b)

    at_pos = [1 if q.lead > 0 else -1 for q in chain]
    at_neg = [(1 if q.lead > 0 else -1) * (-1 if q.degree % 2 else 1) for q in chain]
    return variations(at_neg) - variations(at_pos)


def determinant(matrix: List[List[Fraction]]) -> Fraction:
    m = [list(row) for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] / m[col][col]
            if factor:
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


def sylvester_resultant(f: UPoly, g: UPoly) -> Fraction:
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    m, n = f.degree, g.degree
    if m == 0:
        return f.lead**n
    if n == 0:
        return g.lead**m
    size = m + n
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + fc + [Fraction(0)] * (size - i - len(fc)))
    for i in range(m):
        rows.append([Fraction(0)] * i + gc + [Fraction(0)] * (size - i - len(gc)))
    return determinant(rows)


def interpolate(xs: Sequence[Number], ys: Sequence[Number]) -> UPoly:
    """Newton interpolation through the points (xs[i], ys[i])."""
    xs = [Fraction(x) for x in xs]
    coef = [Fraction(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    result = UPoly([coef[-1]])
    for i in range(n - 2, -1, -1):
        result = result * UPoly([-xs[i], 1]) + UPoly([coef[i]])
    return result


def eliminate_last(f: Poly, g: Poly, degree_bound: int) -> UPoly:
    """Resultant of two bivariate polynomials with respect to the second variable.

    Both inputs must have a constant leading coefficient in that variable, so the
    Sylvester matrix has the same shape at every sample and interpolation is exact.
    """
    xs = list(range(degree_bound + 1))
    ys = []
    for x in xs:
        fx = f.partial({0: x}).to_upoly(1)
        gx = g.partial({0: x}).to_upoly(1)
        ys.append(sylvester_resultant(fx, gx))
    return interpolate(xs, ys)
