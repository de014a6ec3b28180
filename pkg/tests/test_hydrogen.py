import json
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal

from qsdecay.exactcore import ExactScalar, exact_sqrt, integrate_poly_exp
from qsdecay.hydrogen import (
    AXES,
    Orbital,
    angular_element,
    dipole_element,
    dipole_table,
    energy,
    gordon_closed_form_squared,
    gordon_radial_integral,
    level_orbitals,
    momentum_element,
    radial,
)


def all_orbitals(n_max):
    return [o for n in range(1, n_max + 1) for o in level_orbitals(n)]


def reference_radial(n, l, r):
    """Textbook R_{n,l} with Bohr radius 2 (lengths in a0/2), via scipy."""
    rho = r / n
    norm = math.sqrt((1 / n) ** 3 * math.factorial(n - l - 1) / (2 * n * math.factorial(n + l)))
    return norm * np.exp(-rho / 2) * rho**l * special.eval_genlaguerre(n - l - 1, 2 * l + 1, rho)


def sph_harm(l, m, theta, phi):
    if hasattr(special, "sph_harm_y"):
        return special.sph_harm_y(l, m, theta, phi)
    return special.sph_harm(m, l, phi, theta)


# ---------------------------------------------------------------- energies


def radial_grid_eigenvalues(l, count, h=0.02, length=160.0):
    """Lowest eigenvalues of -u'' + (l(l+1)/r^2 - 1/r) u by finite differences."""
    r = np.arange(1, int(length / h)) * h
    diag = 2 / h**2 + l * (l + 1) / r**2 - 1 / r
    off = np.full(len(r) - 1, -1 / h**2)
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))[0]


def test_energy_values():
    assert energy(1) == Fraction(-1, 4)
    assert energy(2) == Fraction(-1, 16)
    assert energy(3) - energy(2) == Fraction(5, 144)


def test_energy_matches_grid_diagonalization():
    ev = radial_grid_eigenvalues(0, 2)
    assert ev[0] == pytest.approx(float(energy(1)), abs=2e-4)
    assert ev[1] == pytest.approx(float(energy(2)), abs=2e-4)
    ev1 = radial_grid_eigenvalues(1, 1)
    assert ev1[0] == pytest.approx(float(energy(2)), abs=2e-4)


def test_energy_rejects_zero():
    with pytest.raises(ValueError):
        energy(0)


@pytest.mark.parametrize("n, l, m", [(0, 0, 0), (2, 2, 0), (3, 1, 2), (2, -1, 0)])
def test_orbital_validation(n, l, m):
    with pytest.raises(ValueError):
        Orbital(n, l, m)


# ---------------------------------------------------------------- radial functions


def test_ground_state_radial_function():
    R = radial(1, 0)
    assert R.prefactor * R.polynomial.coefficients[0] == exact_sqrt(Fraction(1, 2))
    assert R.polynomial.degree == 0
    assert R.rate == Fraction(1, 2)


def test_radial_degree():
    assert radial(3, 0).polynomial.degree == 2


@pytest.mark.parametrize("n", range(1, 9))
def test_normalization_exact(n):
    for l in range(n):
        assert radial(n, l).norm_squared() == 1


def test_orthogonality_exact():
    for l in range(6):
        for n in range(l + 1, 7):
            for n2 in range(n + 1, 7):
                a, b = radial(n, l), radial(n2, l)
                val = (a.prefactor * b.prefactor) * integrate_poly_exp(
                    a.polynomial * b.polynomial, a.rate + b.rate, 2
                )
                assert val.is_zero(), (n, n2, l)


@pytest.mark.parametrize("n, l", [(1, 0), (2, 1), (3, 0), (4, 2), (6, 3)])
def test_radial_matches_textbook_up_to_sign(n, l):
    r = np.linspace(0.01, 60, 200)
    ours = radial(n, l)(r)
    ref = reference_radial(n, l, r)
    sign = np.sign(ours[np.argmax(np.abs(ref))] * ref[np.argmax(np.abs(ref))])
    np.testing.assert_allclose(ours, sign * ref, rtol=1e-10, atol=1e-13)


def test_small_r_behaviour():
    for n, l in [(2, 1), (3, 2), (5, 3)]:
        assert radial(n, l).polynomial.lowest_power() == l


# ---------------------------------------------------------------- Gordon integrals


def test_gordon_examples():
    assert gordon_radial_integral(2, 1, 1, 0).square() == Fraction(2**17, 3**9)
    assert gordon_radial_integral(2, 1, 3, 0).square() == Fraction(2**17 * 3**8, 5**12)
    assert gordon_radial_integral(1, 0, 1, 0) == 3
    assert float(abs(gordon_radial_integral(2, 1, 1, 0))) == pytest.approx(2**8.5 / 3**4.5, rel=1e-15)
    assert float(abs(gordon_radial_integral(2, 1, 3, 0))) == pytest.approx(2**8.5 * 3**4 / 5**6, rel=1e-15)


@pytest.mark.parametrize("n", [1, 3, 4, 5, 6, 7, 8])
def test_gordon_closed_form(n):
    assert gordon_radial_integral(2, 1, n, 0).square() == gordon_closed_form_squared(n)


def test_gordon_against_numerical_quadrature():
    for (n, l), (n2, l2) in [((2, 1), (1, 0)), ((3, 2), (4, 1)), ((5, 0), (3, 1))]:
        num, _ = quad(lambda r: r**3 * reference_radial(n, l, r) * reference_radial(n2, l2, r), 0, np.inf, limit=200)
        assert abs(float(gordon_radial_integral(n, l, n2, l2))) == pytest.approx(abs(num), rel=1e-9)


# ---------------------------------------------------------------- angular factors


def _sphere_grid(npts=24):
    x, w = np.polynomial.legendre.leggauss(npts)
    theta = np.arccos(x)
    phi = np.linspace(0, 2 * np.pi, 2 * npts, endpoint=False)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.outer(w, np.full(len(phi), 2 * np.pi / len(phi)))
    return T, P, W


def numeric_angular(l2, m2, axis, l, m):
    T, P, W = _sphere_grid()
    unit = {"x": np.sin(T) * np.cos(P), "y": np.sin(T) * np.sin(P), "z": np.cos(T)}[axis]
    return np.sum(W * np.conj(sph_harm(l2, m2, T, P)) * unit * sph_harm(l, m, T, P))


def test_angular_factors_match_quadrature():
    for l in range(4):
        for l2 in (l - 1, l + 1):
            if l2 < 0:
                continue
            for m, m2 in product(range(-l, l + 1), range(-l2, l2 + 1)):
                for axis in AXES:
                    got = complex(angular_element(l2, m2, axis, l, m))
                    ref = numeric_angular(l2, m2, axis, l, m)
                    assert got == pytest.approx(ref, abs=1e-12), (l2, m2, axis, l, m)


# ---------------------------------------------------------------- dipole elements


def test_z_element_factorizes_into_angular_and_radial():
    for n2 in range(1, 7):
        got = dipole_element(Orbital(n2, 0, 0), "z", Orbital(2, 1, 0))
        assert got.value == exact_sqrt(Fraction(1, 3)) * gordon_radial_integral(2, 1, n2, 0)
        assert not got.imaginary


def test_forbidden_examples():
    assert dipole_element(Orbital(2, 0, 0), "z", Orbital(1, 0, 0)).is_zero()
    assert dipole_element(Orbital(1, 0, 0), "x", Orbital(2, 1, 0)).is_zero()


def test_selection_rule_completeness():
    orbs = all_orbitals(5)
    for a, b in product(orbs, orbs):
        for axis in AXES:
            v = dipole_element(a, axis, b)
            dl, dm = a.l - b.l, a.m - b.m
            allowed = abs(dl) == 1 and (dm == 0 if axis == "z" else abs(dm) == 1)
            if not allowed:
                assert v.is_zero(), (a, axis, b)
            else:
                # allowed channels vanish only through the radial integral
                radial_zero = gordon_radial_integral(b.n, b.l, a.n, a.l).is_zero()
                assert v.is_zero() == radial_zero, (a, axis, b)


def test_hermiticity():
    orbs = all_orbitals(4)
    for a, b in product(orbs, orbs):
        for axis in AXES:
            assert dipole_element(a, axis, b) == dipole_element(b, axis, a).conjugate()


def test_x_real_y_imaginary():
    v = dipole_element(Orbital(1, 0, 0), "x", Orbital(2, 1, 1))
    w = dipole_element(Orbital(1, 0, 0), "y", Orbital(2, 1, 1))
    assert not v.imaginary and w.imaginary
    assert v.phase in (1, -1) and w.phase in (1j, -1j)


# ---------------------------------------------------------------- momentum


def test_commutator_identity_all_pairs():
    orbs = all_orbitals(5)
    for a, b in product(orbs, orbs):
        # <a|p|b> = (E_b - E_a)/(2i) <a|x|b>
        factor = (energy(b.n) - energy(a.n)) / 2
        for axis in AXES:
            p = momentum_element(a, axis, b)
            x = dipole_element(a, axis, b)
            assert p == (x * factor).times_i(3), (a, axis, b)


def test_momentum_examples():
    u = Orbital(2, 1, 0)
    assert momentum_element(u, "z", u).is_zero()
    got = momentum_element(Orbital(1, 0, 0), "z", u)
    expected = exact_sqrt(Fraction(1, 3)) * gordon_radial_integral(2, 1, 1, 0) * ((energy(2) - energy(1)) / 2)
    assert got.imaginary
    assert got.value == -expected  # -i * (E_2 - E_1)/2 * <x>
    assert momentum_element(Orbital(2, 0, 0), "z", Orbital(1, 0, 0)).is_zero()


def test_momentum_against_numerical_derivative():
    # <1s| d/dz |2p0> by quadrature in (r, theta)
    def psi_2p0(r, t):
        return reference_radial(2, 1, r) * math.sqrt(3 / (4 * math.pi)) * np.cos(t)

    def psi_1s(r):
        return reference_radial(1, 0, r) / math.sqrt(4 * math.pi)

    h = 1e-5
    rs = np.linspace(1e-4, 60, 6001)
    x, w = np.polynomial.legendre.leggauss(32)
    t = np.arccos(x)
    R, T = np.meshgrid(rs, t, indexing="ij")
    dr = (psi_2p0(R + h, T) - psi_2p0(R - h, T)) / (2 * h)
    dt = -reference_radial(2, 1, R) * math.sqrt(3 / (4 * math.pi)) * np.sin(T)
    dz = np.cos(T) * dr - np.sin(T) / R * dt
    integrand = psi_1s(R) * dz * R**2
    val = 2 * np.pi * np.trapezoid(integrand @ w, rs)
    got = momentum_element(Orbital(1, 0, 0), "z", Orbital(2, 1, 0))
    # p = -i d/dz; compare magnitudes (global radial sign convention differs)
    assert abs(float(got.value)) == pytest.approx(abs(val), rel=1e-6)


# ---------------------------------------------------------------- table export


def test_dipole_table_export():
    table = dipole_table(2, 1)
    assert len(table.entries) == 4 * 3 * 1
    # z couples m=0; x and y each couple m=+1 and m=-1
    assert len(table.nonzero()) == 5
    data = json.loads(table.to_json(floats=True))
    assert data["from_level"] == 2 and data["to_level"] == 1
    z_row = next(r for r in data["elements"] if r["axis"] == "z" and r["from"] == [2, 1, 0])
    assert ExactScalar.from_json(z_row["value"]["terms"]) == dipole_element(
        Orbital(1, 0, 0), "z", Orbital(2, 1, 0)
    ).value
    expected = dipole_element(Orbital(1, 0, 0), "z", Orbital(2, 1, 0)).value
    assert z_row["float"] == f"{float(expected):.15g}"
