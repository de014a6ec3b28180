"""Decay operator Im Z of a hydrogen level, its spectrum and SI lifetimes.

Position form::

    Im Z = 2/3 * sum_{i<n} (E_n - E_i)^3 kappa(E_n - E_i)^2 * sum_axis P_n x P_i x P_n

Momentum form::

    Im Z = 8/3 * sum_{i<n} (E_n - E_i) kappa(E_n - E_i)^2 * sum_axis P_n p P_i p P_n

Both are assembled from exact matrix elements, so with ``kappa == 1`` the
entries are exact rationals.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np

from .exactcore import ExactScalar, rational_to_str
from .hydrogen import AXES, Orbital, dipole_element, energy, level_orbitals, momentum_element

__all__ = [
    "CutoffFunction",
    "ImZMatrix",
    "PhysicalConstants",
    "LinewidthReport",
    "Spectrum",
    "PREFACTOR_TAG",
    "im_z_matrix",
    "im_z_momentum_form",
    "diagonalize",
    "lifetimes",
    "read_constants",
    "diagonal_by_l",
]

PREFACTOR_TAG = "2/3 (position form); 8/3 (momentum form)"


@dataclass(frozen=True)
class CutoffFunction:
    """Ultraviolet cutoff kappa(r): identically one, ``exp(-r**4)``, or tabulated."""

    kind: Literal["one", "quartic", "table"] = "one"
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("one", "quartic", "table"):
            raise ValueError(f"unknown cutoff kind {self.kind!r}")
        if self.kind == "table":
            if len(self.table) < 2:
                raise ValueError("tabulated cutoff needs at least two points")
            r = [p[0] for p in self.table]
            if any(b <= a for a, b in zip(r, r[1:])) or r[0] != 0.0:
                raise ValueError("table abscissae must start at 0 and increase strictly")
            if any(p[1] < 0 for p in self.table):
                raise ValueError("cutoff must be nonnegative")

    @property
    def is_one(self) -> bool:
        return self.kind == "one"

    def __call__(self, r: float) -> float:
        r = float(r)
        if self.kind == "one":
            return 1.0
        if self.kind == "quartic":
            return math.exp(-(r**4))
        xs, ys = zip(*self.table)
        return float(np.interp(r, xs, ys))


ONE = CutoffFunction("one")


@dataclass
class ImZMatrix:
    """Im Z on the level-n eigenspace in the basis of :func:`level_orbitals`.

    ``exact`` holds ExactScalar entries when the cutoff is identically one;
    ``values`` is always the float matrix.
    """

    n: int
    basis: list[Orbital]
    values: np.ndarray
    exact: list[list[ExactScalar]] | None
    form: str
    cutoff: CutoffFunction
    warning: str | None = None

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def diagonal_exact(self) -> list[ExactScalar]:
        if self.exact is None:
            raise ValueError("no exact entries (cutoff is not identically one)")
        return [self.exact[i][i] for i in range(self.dimension)]

    def to_text(self) -> str:
        lines = [f"# Im Z, level n={self.n}, form={self.form}, cutoff={self.cutoff.kind}"]
        if self.warning:
            lines.append(f"# warning: {self.warning}")
        lines.append("# basis: " + " ".join(f"({o})" for o in self.basis))
        for i in range(self.dimension):
            if self.exact is not None:
                row = [_exact_str(self.exact[i][j]) for j in range(self.dimension)]
            else:
                row = [repr(float(v)) for v in self.values[i]]
            lines.append(" ".join(row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data = {
            "n": self.n,
            "form": self.form,
            "cutoff": self.cutoff.kind,
            "warning": self.warning,
            "basis": [[o.n, o.l, o.m] for o in self.basis],
            "values": [[repr(float(v)) for v in row] for row in self.values],
        }
        if self.exact is not None:
            data["exact"] = [[e.to_json() for e in row] for row in self.exact]
        return json.dumps(data, indent=1)


def _exact_str(x: ExactScalar) -> str:
    if x.is_rational():
        return rational_to_str(x.to_rational())
    return str(x).replace(" ", "")


def _assemble(
    n: int,
    kappa: CutoffFunction,
    element: Callable[[Orbital, str, Orbital], object],
    weight: Callable[[Fraction], Fraction],
    form: str,
) -> ImZMatrix:
    if n < 1:
        raise ValueError(f"level must be >= 1, got n={n}")
    basis = level_orbitals(n)
    dim = len(basis)
    if n == 1:
        msg = "n=1 has no lower level; Im Z is the zero matrix"
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        exact = [[ExactScalar()]] if kappa.is_one else None
        return ImZMatrix(n, basis, np.zeros((1, 1)), exact, form, kappa, warning=msg)

    exact = [[ExactScalar() for _ in range(dim)] for _ in range(dim)]
    values = np.zeros((dim, dim))
    for lower in range(1, n):
        gap = energy(n) - energy(lower)
        w = weight(gap)
        kappa2 = 1.0 if kappa.is_one else kappa(float(gap)) ** 2
        mids = level_orbitals(lower)
        block = [[ExactScalar() for _ in range(dim)] for _ in range(dim)]
        for a, oa in enumerate(basis):
            for b, ob in enumerate(basis):
                acc = None
                for oc in mids:
                    for axis in AXES:
                        left = element(oa, axis, oc)
                        if left.is_zero():
                            continue
                        right = element(oc, axis, ob)
                        if right.is_zero():
                            continue
                        prod = left * right
                        acc = prod if acc is None else acc + prod
                if acc is None or acc.is_zero():
                    continue
                if acc.imaginary:
                    raise ArithmeticError(f"imaginary contribution at ({oa}), ({ob})")
                block[a][b] = acc.value * w
        for a in range(dim):
            for b in range(dim):
                if block[a][b]:
                    exact[a][b] = exact[a][b] + block[a][b]
                    values[a, b] += float(block[a][b]) * kappa2
    if not kappa.is_one:
        exact = None
    else:
        values = np.array([[float(x) for x in row] for row in exact])
    return ImZMatrix(n, basis, values, exact, form, kappa)


def im_z_matrix(n: int, kappa: CutoffFunction = ONE) -> ImZMatrix:
    """Im Z in position form on the level-n eigenspace."""
    return _assemble(
        n, kappa, dipole_element, lambda gap: Fraction(2, 3) * gap**3, "position"
    )


def im_z_momentum_form(n: int, kappa: CutoffFunction = ONE) -> ImZMatrix:
    """Im Z in momentum form; equals :func:`im_z_matrix` exactly."""
    return _assemble(
        n, kappa, momentum_element, lambda gap: Fraction(8, 3) * gap, "momentum"
    )


@dataclass
class Spectrum:
    """Eigenvalues of Im Z with multiplicities, plus the dense cross-check."""

    eigenvalues: list[Fraction | float]
    multiplicities: list[int]
    per_state: list[Fraction | float]
    dense: np.ndarray

    def as_pairs(self) -> list[tuple[Fraction | float, int]]:
        return list(zip(self.eigenvalues, self.multiplicities))


def diagonalize(matrix: ImZMatrix, atol: float = 1e-12) -> Spectrum:
    """Read eigenvalues off the diagonal; cross-check with a dense eigensolver.

    Raises ``ArithmeticError`` if the matrix is not exactly diagonal and
    symmetric, which would mean a construction bug.
    """
    dim = matrix.dimension
    if matrix.exact is not None:
        for a in range(dim):
            for b in range(dim):
                if a != b and not matrix.exact[a][b].is_zero():
                    raise ArithmeticError(f"nonzero off-diagonal entry at ({a}, {b})")
        per_state: list = [matrix.exact[a][a].to_rational() for a in range(dim)]
    else:
        vals = matrix.values
        if not np.allclose(vals, vals.T, atol=atol, rtol=0):
            raise ArithmeticError("Im Z is not symmetric")
        off = vals - np.diag(np.diag(vals))
        if np.max(np.abs(off), initial=0.0) > atol:
            raise ArithmeticError("Im Z is not diagonal in the (l, m) basis")
        per_state = [float(v) for v in np.diag(vals)]

    counts = Counter(per_state)
    eigenvalues = sorted(counts)
    dense = np.linalg.eigvalsh(matrix.values)
    expected = np.sort(np.array([float(v) for v in per_state]))
    scale = max(1.0, float(np.max(np.abs(expected), initial=0.0)))
    if np.max(np.abs(dense - expected), initial=0.0) > 1e-10 * scale:
        raise ArithmeticError("dense eigensolver disagrees with the diagonal")
    return Spectrum(eigenvalues, [counts[v] for v in eigenvalues], per_state, dense)


@dataclass(frozen=True)
class PhysicalConstants:
    """Fine-structure constant, electron mass (kg), speed of light (m/s), hbar (J s)."""

    alpha: float = 7.29735e-3
    m_kg: float = 9.10939e-31
    c_mps: float = 2.99792e8
    hbar_Js: float = 1.05457e-34

    def __post_init__(self):
        for name in ("alpha", "m_kg", "c_mps", "hbar_Js"):
            if not getattr(self, name) > 0:
                raise ValueError(f"constant {name} must be positive")

    @property
    def rate_unit(self) -> float:
        """Probability decay rate (1/s) per unit eigenvalue: ``4 alpha^5 m c^2 / hbar``."""
        return 4 * self.alpha**5 * self.m_kg * self.c_mps**2 / self.hbar_Js


CONSTANT_KEYS = ("alpha", "m_kg", "c_mps", "hbar_Js")


def read_constants(path: str | Path) -> PhysicalConstants:
    """Parse a ``key=value`` constants file (keys alpha, m_kg, c_mps, hbar_Js)."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, val = (t.strip() for t in line.split("=", 1))
        if key not in CONSTANT_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown constant {key!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: {key} is not a number: {val!r}") from None
    missing = [k for k in CONSTANT_KEYS if k not in values]
    if missing:
        raise KeyError(f"{path}: missing constant(s): {', '.join(missing)}")
    return PhysicalConstants(**values)


@dataclass
class LinewidthReport:
    matrix: ImZMatrix
    spectrum: Spectrum
    constants: PhysicalConstants
    lifetimes_s: list[float] = field(default_factory=list)
    """Per basis state; ``inf`` where the eigenvalue vanishes (no E1 decay)."""

    def eigenvalue_lifetimes(self) -> list[tuple[Fraction | float, int, float]]:
        return [
            (ev, mult, _lifetime(ev, self.constants))
            for ev, mult in self.spectrum.as_pairs()
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state", "l", "m", "ImZ", "lifetime_s"])
        for orb, val, tau in zip(self.matrix.basis, self.spectrum.per_state, self.lifetimes_s):
            w.writerow([f"{orb.n},{orb.l},{orb.m}", orb.l, orb.m, _value_str(val), _tau_str(tau)])
        return buf.getvalue()

    def to_text(self) -> str:
        c = self.constants
        lines = [
            f"# lifetimes, level n={self.matrix.n}",
            f"# constants: alpha={c.alpha!r} m_kg={c.m_kg!r} c_mps={c.c_mps!r} hbar_Js={c.hbar_Js!r}",
            "# tau = hbar / (4 alpha^5 m c^2 * eigenvalue)",
        ]
        if self.matrix.warning:
            lines.append(f"# warning: {self.matrix.warning}")
        for ev, mult, tau in self.eigenvalue_lifetimes():
            lines.append(f"eigenvalue={_value_str(ev)} multiplicity={mult} lifetime_s={_tau_str(tau)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        c = self.constants
        return json.dumps(
            {
                "n": self.matrix.n,
                "constants": {k: getattr(c, k) for k in CONSTANT_KEYS},
                "eigenvalues": [
                    {"value": _value_str(ev), "multiplicity": mult, "lifetime_s": _tau_str(tau)}
                    for ev, mult, tau in self.eigenvalue_lifetimes()
                ],
            },
            indent=1,
        )


def _value_str(v: Fraction | float) -> str:
    return rational_to_str(v) if isinstance(v, Fraction) else repr(float(v))


def _tau_str(tau: float) -> str:
    return "inf (no E1 decay)" if math.isinf(tau) else f"{tau:.5e}"


def _lifetime(eigenvalue: Fraction | float, constants: PhysicalConstants) -> float:
    if eigenvalue == 0:
        return math.inf
    if eigenvalue < 0:
        raise ArithmeticError(f"negative Im Z eigenvalue {eigenvalue}")
    return 1.0 / (constants.rate_unit * float(eigenvalue))


def lifetimes(
    matrix: ImZMatrix, constants: PhysicalConstants | None = None
) -> LinewidthReport:
    """Lifetimes ``tau = hbar / (4 alpha^5 m c^2 lambda)`` for each state.

    The extra factor two relative to the amplitude decay rate is because
    lifetimes refer to survival probabilities.
    """
    constants = constants or PhysicalConstants()
    spectrum = diagonalize(matrix)
    taus = [_lifetime(v, constants) for v in spectrum.per_state]
    return LinewidthReport(matrix, spectrum, constants, taus)


def diagonal_by_l(matrix: ImZMatrix) -> dict[int, Sequence]:
    """Diagonal entries grouped by l (exact when available)."""
    diag = matrix.diagonal_exact() if matrix.exact is not None else list(np.diag(matrix.values))
    out: dict[int, list] = {}
    for orb, v in zip(matrix.basis, diag):
        out.setdefault(orb.l, []).append(v)
    return out
