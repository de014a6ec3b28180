"""Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction`. On top of them this module
provides :class:`ExactScalar` (finite sums ``q * sqrt(d)`` with square-free
integer radicands ``d``), :class:`Polynomial` in one variable with
``ExactScalar`` coefficients, the associated Laguerre polynomials and the
closed-form integral of ``r**k * p(r) * exp(-a r)`` over the half line.
"""

from __future__ import annotations

import decimal
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

__all__ = [
    "Rational",
    "ExactScalar",
    "Polynomial",
    "as_rational",
    "exact_sqrt",
    "factorial",
    "laguerre",
    "integrate_poly_exp",
    "rational_to_str",
    "rational_from_str",
    "FACTORIAL_CACHE_SIZE",
]

Rational = Fraction
Number = Union[int, Fraction, "ExactScalar"]

FACTORIAL_CACHE_SIZE = 64

_SMALL_PRIMES: tuple[int, ...] = tuple(
    p for p in range(2, 2000) if all(p % q for q in range(2, math.isqrt(p) + 1))
)


@lru_cache(maxsize=FACTORIAL_CACHE_SIZE)
def factorial(n: int) -> int:
    if n < 0:
        raise ValueError(f"factorial of negative number {n}")
    return math.factorial(n)


def as_rational(x: int | Fraction | str) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass int, Fraction or 'num/den'")
    return Fraction(x)


def rational_to_str(q: Fraction) -> str:
    """Serialize as ``"num/den"`` (the denominator is always written)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(text: str) -> Fraction:
    return Fraction(text.strip())


@lru_cache(maxsize=4096)
def _square_split(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s*s*f`` and ``f`` square-free."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    s, f = 1, 1
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            f *= p
    if n > 1:
        r = math.isqrt(n)
        if r * r == n:
            s *= r
        else:
            # cofactor may still hide a square of a prime beyond the table;
            # that only costs canonical form, never correctness
            f *= n
    return s, f


def _split_rational(q: Fraction) -> tuple[Fraction, int]:
    """sqrt(q) == c * sqrt(d) with d square-free; returns (c, d)."""
    if q < 0:
        raise ValueError(f"negative radicand {q}")
    if q == 0:
        return Fraction(0), 1
    num, den = q.numerator, q.denominator
    # sqrt(num/den) = sqrt(num*den)/den
    s, f = _square_split(num * den)
    return Fraction(s, den), f


class ExactScalar:
    """Finite sum of ``coefficient * sqrt(radicand)`` terms.

    Radicands are square-free positive integers, each appears at most once
    and no coefficient is zero, so equality is a comparison of term tuples.
    Instances are immutable and hashable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[Fraction, int | Fraction]] = ()):
        acc: dict[int, Fraction] = {}
        for coeff, radicand in terms:
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            c, d = _split_rational(Fraction(radicand))
            if c == 0:
                continue
            acc[d] = acc.get(d, Fraction(0)) + coeff * c
        self._terms: tuple[tuple[Fraction, int], ...] = tuple(
            (acc[d], d) for d in sorted(acc) if acc[d] != 0
        )

    @classmethod
    def _raw(cls, terms: tuple[tuple[Fraction, int], ...]) -> "ExactScalar":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def from_rational(cls, q: int | Fraction) -> "ExactScalar":
        q = Fraction(q)
        return cls._raw(((q, 1),) if q else ())

    @classmethod
    def sqrt(cls, q: int | Fraction) -> "ExactScalar":
        return cls([(Fraction(1), Fraction(q))])

    @property
    def terms(self) -> tuple[tuple[Fraction, int], ...]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(d == 1 for _, d in self._terms)

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms[0][0] if self._terms else Fraction(0)

    # arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(other: Number) -> "ExactScalar":
        if isinstance(other, ExactScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactScalar.from_rational(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Number) -> "ExactScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict((d, c) for c, d in self._terms)
        for c, d in other._terms:
            acc[d] = acc.get(d, Fraction(0)) + c
        return ExactScalar._raw(tuple((acc[d], d) for d in sorted(acc) if acc[d] != 0))

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar._raw(tuple((-c, d) for c, d in self._terms))

    def __sub__(self, other: Number) -> "ExactScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> "ExactScalar":
        return (-self) + other

    def __mul__(self, other: Number) -> "ExactScalar":
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                return ExactScalar._raw(())
            return ExactScalar._raw(tuple((c * q, d) for c, d in self._terms))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for c1, d1 in self._terms:
            for c2, d2 in other._terms:
                g = math.gcd(d1, d2)
                # sqrt(d1*d2) = g*sqrt(d1/g * d2/g); the latter is square-free
                d = (d1 // g) * (d2 // g)
                acc[d] = acc.get(d, Fraction(0)) + c1 * c2 * g
        return ExactScalar._raw(tuple((acc[d], d) for d in sorted(acc) if acc[d] != 0))

    __rmul__ = __mul__

    def __truediv__(self, other: int | Fraction) -> "ExactScalar":
        if isinstance(other, ExactScalar):
            if len(other._terms) != 1:
                raise ZeroDivisionError("division only by nonzero single-term scalars")
            c, d = other._terms[0]
            # 1/(c sqrt d) = sqrt(d)/(c d)
            return self * ExactScalar._raw(((1 / (c * d), d),))
        q = Fraction(other)
        if q == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / q)

    def square(self) -> "ExactScalar":
        return self * self

    def __pow__(self, k: int) -> "ExactScalar":
        if k < 0:
            raise ValueError("negative powers not supported")
        out = ExactScalar.from_rational(1)
        for _ in range(k):
            out = out * self
        return out

    # comparison -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.from_rational(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def sign(self) -> int:
        if not self._terms:
            return 0
        if len(self._terms) == 1:
            return 1 if self._terms[0][0] > 0 else -1
        # a nonzero algebraic number: enough precision eventually decides
        prec = 40
        while True:
            value = self.to_decimal(prec)
            if abs(value) > decimal.Decimal(10) ** (-(prec - 10)):
                return 1 if value > 0 else -1
            prec *= 2

    def __lt__(self, other: Number) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: Number) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: Number) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: Number) -> bool:
        return (self - other).sign() >= 0

    def __abs__(self) -> "ExactScalar":
        return -self if self.sign() < 0 else self

    def __bool__(self) -> bool:
        return bool(self._terms)

    # conversion -----------------------------------------------------------

    def to_decimal(self, prec: int = 50) -> decimal.Decimal:
        with decimal.localcontext() as ctx:
            ctx.prec = prec
            total = decimal.Decimal(0)
            for c, d in self._terms:
                term = decimal.Decimal(c.numerator) / decimal.Decimal(c.denominator)
                if d != 1:
                    term *= decimal.Decimal(d).sqrt()
                total += term
            return +total

    def __float__(self) -> float:
        if len(self._terms) == 1:
            c, d = self._terms[0]
            return float(c) * math.sqrt(d)
        return float(self.to_decimal(40))

    def to_json(self) -> list[dict[str, str]]:
        return [
            {"coeff": rational_to_str(c), "radicand": rational_to_str(Fraction(d))}
            for c, d in self._terms
        ]

    @classmethod
    def from_json(cls, data: list[dict[str, str]]) -> "ExactScalar":
        return cls(
            (rational_from_str(t["coeff"]), rational_from_str(t["radicand"])) for t in data
        )

    def __repr__(self) -> str:
        return f"ExactScalar({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for c, d in self._terms:
            q = str(c) if c.denominator != 1 else str(c.numerator)
            parts.append(q if d == 1 else f"{q}*sqrt({d})")
        return " + ".join(parts).replace("+ -", "- ")


def exact_sqrt(q: int | Fraction) -> ExactScalar:
    """Exact square root of a nonnegative rational."""
    return ExactScalar.sqrt(q)


_ZERO = ExactScalar.from_rational(0)
_ONE = ExactScalar.from_rational(1)


def _es(x: Number) -> ExactScalar:
    return x if isinstance(x, ExactScalar) else ExactScalar.from_rational(x)


class Polynomial:
    """Univariate polynomial; ``coefficients[k]`` multiplies ``r**k``."""

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Iterable[Number] = ()):
        coeffs = [_es(c) for c in coefficients]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self._coeffs: tuple[ExactScalar, ...] = tuple(coeffs)

    @classmethod
    def monomial(cls, k: int, coeff: Number = 1) -> "Polynomial":
        return cls([0] * k + [coeff])

    @property
    def coefficients(self) -> tuple[ExactScalar, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def __getitem__(self, k: int) -> ExactScalar:
        return self._coeffs[k] if 0 <= k < len(self._coeffs) else _ZERO

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self._coeffs), len(other._coeffs))
        return Polynomial(self[k] + other[k] for k in range(n))

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self._coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial | Number") -> "Polynomial":
        if not isinstance(other, Polynomial):
            s = _es(other)
            return Polynomial(c * s for c in self._coeffs)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [_ZERO] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            for j, b in enumerate(other._coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return Polynomial(c * k for k, c in enumerate(self._coeffs) if k > 0)

    def shift_power(self, k: int) -> "Polynomial":
        """Multiply by ``r**k``."""
        return Polynomial([0] * k + list(self._coeffs)) if self._coeffs else Polynomial()

    def scale_argument(self, s: int | Fraction) -> "Polynomial":
        """Return ``q(r) = p(s*r)``."""
        s = Fraction(s)
        return Polynomial(c * s**k for k, c in enumerate(self._coeffs))

    def lowest_power(self) -> int:
        for k, c in enumerate(self._coeffs):
            if not c.is_zero():
                return k
        return -1

    def __call__(self, r: float):
        """Floating-point evaluation (Horner); convenience only."""
        acc = 0.0 * r
        for c in reversed(self._coeffs):
            acc = acc * r + float(c)
        return acc

    def __repr__(self) -> str:
        if not self._coeffs:
            return "Polynomial(0)"
        parts = [f"({c})*r^{k}" for k, c in enumerate(self._coeffs) if not c.is_zero()]
        return "Polynomial(" + " + ".join(parts) + ")"


@lru_cache(maxsize=None)
def laguerre(lam: int, mu: int) -> Polynomial:
    """Associated Laguerre polynomial ``(d/dr)^mu [e^r (d/dr)^lam (e^-r r^lam)]``.

    Built by literal differentiation: ``d/dr (e^-r q) = e^-r (q' - q)``, so the
    inner derivative is tracked as the polynomial factor ``q`` alone. This
    index convention gives degree ``lam - mu`` and leading coefficient
    ``(-1)^lam lam!/(lam-mu)!``.
    """
    if not (0 <= mu <= lam):
        raise ValueError(f"need 0 <= mu <= lambda, got lambda={lam}, mu={mu}")
    q = Polynomial.monomial(lam)
    for _ in range(lam):
        q = q.derivative() - q
    for _ in range(mu):
        q = q.derivative()
    return q


def integrate_poly_exp(p: Polynomial, a: int | Fraction, k: int = 0) -> ExactScalar:
    """Exact value of the integral of ``r**k * p(r) * exp(-a r)`` over [0, inf)."""
    a = Fraction(a)
    if a <= 0:
        raise ValueError(f"integral diverges for a={a} <= 0")
    if k < 0:
        raise ValueError("k must be nonnegative")
    total = _ZERO
    for j, c in enumerate(p.coefficients):
        if c.is_zero():
            continue
        total = total + c * Fraction(factorial(j + k)) / a ** (j + k + 1)
    return total
