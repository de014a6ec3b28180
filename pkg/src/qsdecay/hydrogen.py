"""Exact hydrogen bound-state data.

Units: lengths in half Bohr radii, energies in units of 4 Ry, so the
electronic operator is ``-Laplacian - 1/|x|`` with eigenvalues
``-1/(4 n^2)`` and the commutator ``[x, H] = 2 i p``.

Spherical harmonics follow the Condon-Shortley phase convention. Matrix
elements of ``x`` and ``y`` between m-basis orbitals are real or purely
imaginary; they are returned as :class:`PhasedScalar`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Literal

from .exactcore import (
    ExactScalar,
    Polynomial,
    exact_sqrt,
    factorial,
    integrate_poly_exp,
    laguerre,
)

__all__ = [
    "Orbital",
    "RadialFunction",
    "PhasedScalar",
    "DipoleTable",
    "AXES",
    "energy",
    "level_orbitals",
    "radial",
    "gordon_radial_integral",
    "gordon_closed_form_squared",
    "angular_element",
    "dipole_element",
    "momentum_element",
    "dipole_table",
]

Axis = Literal["x", "y", "z"]
AXES: tuple[Axis, ...] = ("x", "y", "z")


@dataclass(frozen=True, order=True)
class Orbital:
    """Quantum numbers ``(n, l, m)`` of a hydrogen eigenfunction."""

    n: int
    l: int
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"principal quantum number must be >= 1, got n={self.n}")
        if not 0 <= self.l <= self.n - 1:
            raise ValueError(f"need 0 <= l <= n-1, got n={self.n}, l={self.l}")
        if not -self.l <= self.m <= self.l:
            raise ValueError(f"need -l <= m <= l, got l={self.l}, m={self.m}")

    @classmethod
    def parse(cls, text: str) -> "Orbital":
        """Parse ``"n,l,m"``."""
        try:
            n, l, m = (int(t) for t in text.split(","))
        except ValueError:
            raise ValueError(f"expected 'n,l,m', got {text!r}") from None
        return cls(n, l, m)

    def __str__(self) -> str:
        return f"{self.n},{self.l},{self.m}"


def energy(n: int) -> Fraction:
    """Eigenvalue ``-1/(4 n^2)`` of ``-Laplacian - 1/|x|``."""
    if n < 1:
        raise ValueError(f"principal quantum number must be >= 1, got n={n}")
    return Fraction(-1, 4 * n * n)


def level_orbitals(n: int) -> list[Orbital]:
    """Basis of the level-n eigenspace ordered by l, then m."""
    return [Orbital(n, l, m) for l in range(n) for m in range(-l, l + 1)]


@dataclass(frozen=True)
class RadialFunction:
    """``R(r) = prefactor * polynomial(r) * exp(-rate * r)``."""

    n: int
    l: int
    prefactor: ExactScalar
    polynomial: Polynomial
    rate: Fraction

    def __call__(self, r):
        import numpy as np

        r = np.asarray(r, dtype=float)
        return float(self.prefactor) * self.polynomial(r) * np.exp(-float(self.rate) * r)

    def derivative(self) -> "RadialFunction":
        """``dR/dr`` in the same representation."""
        poly = self.polynomial.derivative() - self.polynomial * self.rate
        return RadialFunction(self.n, self.l, self.prefactor, poly, self.rate)

    def norm_squared(self) -> ExactScalar:
        return overlap_integral(self, self, power=2)


def overlap_integral(a: RadialFunction, b: RadialFunction, power: int) -> ExactScalar:
    """Exact integral of ``r**power * a(r) * b(r)`` over [0, inf)."""
    return (a.prefactor * b.prefactor) * integrate_poly_exp(
        a.polynomial * b.polynomial, a.rate + b.rate, power
    )


@lru_cache(maxsize=None)
def radial(n: int, l: int) -> RadialFunction:
    Orbital(n, l, 0)
    prefactor = (
        -exact_sqrt(Fraction(1, 8))
        * exact_sqrt(factorial(n - l - 1))
        / (factorial(n + l) * exact_sqrt(factorial(n + l)))
        / exact_sqrt(2 * n)
        * (Fraction(2, n) * exact_sqrt(Fraction(2, n)))
    )
    lag = laguerre(n + l, 2 * l + 1).scale_argument(Fraction(1, n))
    poly = lag.shift_power(l) * Fraction(1, n**l)
    return RadialFunction(n, l, prefactor, poly, Fraction(1, 2 * n))


@lru_cache(maxsize=None)
def gordon_radial_integral(n: int, l: int, n2: int, l2: int) -> ExactScalar:
    """``R^{n2,l2}_{n,l}``: integral of ``r^3 R_{n2,l2} R_{n,l}``, by exact integration."""
    return overlap_integral(radial(n2, l2), radial(n, l), power=3)


def gordon_closed_form_squared(n: int) -> Fraction:
    """Square of the closed form for ``|R^{n,0}_{2,1}|``, valid for n != 2."""
    if n == 2 or n < 1:
        raise ValueError("closed form holds for n >= 1, n != 2")
    return (
        4
        * Fraction(2**15 * n**9)
        * Fraction(n - 2) ** (2 * n - 6)
        / (3 * Fraction(n + 2) ** (2 * n + 6))
    )


class PhasedScalar:
    """``value`` times ``1`` or ``i``; the overall sign lives in ``value``."""

    __slots__ = ("value", "imaginary")

    def __init__(self, value: ExactScalar, imaginary: bool = False):
        self.value = value
        self.imaginary = bool(imaginary) and not value.is_zero()

    @classmethod
    def zero(cls) -> "PhasedScalar":
        return cls(ExactScalar(), False)

    def is_zero(self) -> bool:
        return self.value.is_zero()

    @property
    def phase(self) -> complex:
        """Unit phase in {1, -1, 1j, -1j} (1 for zero)."""
        s = -1 if self.value.sign() < 0 else 1
        return complex(0, s) if self.imaginary else complex(s, 0)

    @property
    def magnitude(self) -> ExactScalar:
        return abs(self.value)

    def __mul__(self, other: "PhasedScalar | ExactScalar | int | Fraction") -> "PhasedScalar":
        if isinstance(other, PhasedScalar):
            v = self.value * other.value
            if self.imaginary and other.imaginary:
                v = -v
            return PhasedScalar(v, self.imaginary != other.imaginary)
        return PhasedScalar(self.value * other, self.imaginary)

    __rmul__ = __mul__

    def times_i(self, power: int = 1) -> "PhasedScalar":
        out = self
        for _ in range(power % 4):
            v = -out.value if out.imaginary else out.value
            out = PhasedScalar(v, not out.imaginary)
        return out

    def __add__(self, other: "PhasedScalar") -> "PhasedScalar":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.imaginary != other.imaginary:
            raise ValueError("cannot add real and imaginary PhasedScalar exactly")
        return PhasedScalar(self.value + other.value, self.imaginary)

    def __neg__(self) -> "PhasedScalar":
        return PhasedScalar(-self.value, self.imaginary)

    def conjugate(self) -> "PhasedScalar":
        return -self if self.imaginary else self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = PhasedScalar(ExactScalar.from_rational(other) if not isinstance(other, ExactScalar) else other)
        if not isinstance(other, PhasedScalar):
            return NotImplemented
        return self.value == other.value and self.imaginary == other.imaginary

    def __hash__(self) -> int:
        return hash((self.value, self.imaginary))

    def __complex__(self) -> complex:
        v = float(self.value)
        return complex(0, v) if self.imaginary else complex(v, 0)

    def to_json(self) -> dict:
        return {"terms": self.value.to_json(), "phase": "i" if self.imaginary else "1"}

    def __repr__(self) -> str:
        return f"PhasedScalar({self.value}{' * i' if self.imaginary else ''})"


def _cg_sqrt(num: int, den: int) -> ExactScalar:
    return exact_sqrt(Fraction(num, den)) if num else ExactScalar()


def _ladder(l2: int, m2: int, l: int, m: int, q: int) -> ExactScalar:
    """``<l2,m2| n_q |l,m>`` for the spherical components
    ``n_0 = cos(theta)`` and ``n_{+-1} = sin(theta) e^{+-i phi}`` (real)."""
    if m2 != m + q:
        return ExactScalar()
    if q == 0:
        if l2 == l + 1:
            return _cg_sqrt((l + 1) ** 2 - m * m, (2 * l + 1) * (2 * l + 3))
        if l2 == l - 1:
            return _cg_sqrt(l * l - m * m, (2 * l - 1) * (2 * l + 1))
        return ExactScalar()
    if q == 1:
        if l2 == l + 1:
            return -_cg_sqrt((l + m + 1) * (l + m + 2), (2 * l + 1) * (2 * l + 3))
        if l2 == l - 1:
            return _cg_sqrt((l - m) * (l - m - 1), (2 * l - 1) * (2 * l + 1))
        return ExactScalar()
    if q == -1:
        if l2 == l + 1:
            return _cg_sqrt((l - m + 1) * (l - m + 2), (2 * l + 1) * (2 * l + 3))
        if l2 == l - 1:
            return -_cg_sqrt((l + m) * (l + m - 1), (2 * l - 1) * (2 * l + 1))
        return ExactScalar()
    raise ValueError(q)


def angular_element(l2: int, m2: int, axis: Axis, l: int, m: int) -> PhasedScalar:
    """``<Y_{l2,m2}| x_axis/r |Y_{l,m}>`` exactly.

    ``x = (n_+ + n_-)/2`` and ``y = (n_+ - n_-)/(2i)``.
    """
    if axis == "z":
        return PhasedScalar(_ladder(l2, m2, l, m, 0))
    if axis == "x":
        v = (_ladder(l2, m2, l, m, 1) + _ladder(l2, m2, l, m, -1)) * Fraction(1, 2)
        return PhasedScalar(v)
    if axis == "y":
        # 1/(2i) = -i/2
        v = (_ladder(l2, m2, l, m, 1) - _ladder(l2, m2, l, m, -1)) * Fraction(-1, 2)
        return PhasedScalar(v, imaginary=True)
    raise ValueError(f"axis must be one of x, y, z, got {axis!r}")


def _allowed(target: Orbital, axis: Axis, source: Orbital) -> bool:
    if abs(target.l - source.l) != 1:
        return False
    dm = target.m - source.m
    return dm == 0 if axis == "z" else abs(dm) == 1


@lru_cache(maxsize=None)
def dipole_element(target: Orbital, axis: Axis, source: Orbital) -> PhasedScalar:
    """``<target| x_axis |source>`` = angular factor times radial Gordon integral."""
    if axis not in AXES:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    if not _allowed(target, axis, source):
        return PhasedScalar.zero()
    ang = angular_element(target.l, target.m, axis, source.l, source.m)
    if ang.is_zero():
        return ang
    return ang * gordon_radial_integral(source.n, source.l, target.n, target.l)


@lru_cache(maxsize=None)
def _gradient_radial(target_n: int, target_l: int, source_n: int, source_l: int) -> ExactScalar:
    """Radial part of ``<target| d_q |source>`` for ``l_target = l_source +- 1``:

    ``int r^2 R_t (R_s' - l R_s / r) dr`` (raising) or
    ``int r^2 R_t (R_s' + (l+1) R_s / r) dr`` (lowering).
    """
    t, s = radial(target_n, target_l), radial(source_n, source_l)
    l = source_l
    ds = s.derivative()
    if target_l == l + 1:
        c = -l
    elif target_l == l - 1:
        c = l + 1
    else:
        return ExactScalar()
    # r^2 R_t (R_s' + c R_s / r) = r * R_t * (r R_s' + c R_s)
    combo = RadialFunction(
        source_n, source_l, s.prefactor, ds.polynomial.shift_power(1) + s.polynomial * c, s.rate
    )
    return overlap_integral(t, combo, power=1)


@lru_cache(maxsize=None)
def momentum_element(target: Orbital, axis: Axis, source: Orbital) -> PhasedScalar:
    """``<target| p_axis |source>`` with ``p = -i grad``, by exact differentiation.

    Uses the gradient formula: the gradient of ``R(r) Y_lm`` couples to
    ``Y_{l+1}`` through ``R' - l R/r`` and to ``Y_{l-1}`` through
    ``R' + (l+1) R/r``, with the same angular coefficients as ``x/r``.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    if not _allowed(target, axis, source):
        return PhasedScalar.zero()
    ang = angular_element(target.l, target.m, axis, source.l, source.m)
    grad = ang * _gradient_radial(target.n, target.l, source.n, source.l)
    return grad.times_i(3)  # -i


@dataclass(frozen=True)
class DipoleTable:
    """All ``<n_to,l',m'| x_axis |n_from,l,m>`` between two levels."""

    from_level: int
    to_level: int
    entries: dict[tuple[int, int, str, int, int], PhasedScalar]

    def __getitem__(self, key: tuple[int, int, str, int, int]) -> PhasedScalar:
        return self.entries[key]

    def __iter__(self) -> Iterator[tuple[int, int, str, int, int]]:
        return iter(self.entries)

    def nonzero(self) -> dict[tuple[int, int, str, int, int], PhasedScalar]:
        return {k: v for k, v in self.entries.items() if not v.is_zero()}

    def to_json(self, floats: bool = False) -> str:
        rows = []
        for (l, m, axis, l2, m2), v in self.entries.items():
            row = {
                "from": [self.from_level, l, m],
                "to": [self.to_level, l2, m2],
                "axis": axis,
                "value": v.to_json(),
            }
            if floats:
                c = complex(v)
                row["float"] = f"{(c.imag if v.imaginary else c.real):.15g}"
            rows.append(row)
        return json.dumps(
            {"from_level": self.from_level, "to_level": self.to_level, "elements": rows},
            indent=1,
        )


def dipole_table(from_level: int, to_level: int) -> DipoleTable:
    """Keys are ``(l, m, axis, l', m')`` with source (l, m) and target (l', m')."""
    entries = {}
    for src in level_orbitals(from_level):
        for axis in AXES:
            for tgt in level_orbitals(to_level):
                entries[(src.l, src.m, axis, tgt.l, tgt.m)] = dipole_element(tgt, axis, src)
    return DipoleTable(from_level, to_level, entries)


