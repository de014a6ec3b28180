"""
Exact linewidths of hydrogen levels
===================================

Everything in the first half of this walk-through is rational arithmetic.
Floats only show up when lifetimes are converted to seconds.
"""

# %%
# Radial functions come out as prefactor * polynomial * exp(-rate r), with
# every coefficient exact. Lengths are measured in half Bohr radii.
from qsdecay.hydrogen import Orbital, dipole_element, gordon_radial_integral, radial

R = radial(2, 1)
print("R_{2,1} prefactor:", R.prefactor, " rate:", R.rate)
print("norm squared:", R.norm_squared())

# %%
# Gordon integrals are done by direct integration of polynomial * exponential.
for n in (1, 3, 4):
    print(f"|R(2,1 -> {n},0)|^2 =", gordon_radial_integral(2, 1, n, 0).square())

# %%
# Dipole elements keep track of their phase: x elements are real,
# y elements purely imaginary (Condon-Shortley conventions).
print(dipole_element(Orbital(1, 0, 0), "x", Orbital(2, 1, 1)))
print(dipole_element(Orbital(1, 0, 0), "y", Orbital(2, 1, 1)))

# %%
# Im Z on the n = 3 level: diagonal in (l, m), one value per l.
from qsdecay.linewidth import diagonal_by_l, im_z_matrix, im_z_momentum_form, lifetimes

M3 = im_z_matrix(3)
for l, vals in diagonal_by_l(M3).items():
    print(f"l={l}: {vals[0]}  (x{len(vals)})")
print("momentum form identical:", M3.exact == im_z_momentum_form(3).exact)

# %%
# Lifetimes in seconds with the default constants.
print(lifetimes(M3).to_text())

# %%
# At n = 2 the 2s state has nothing to decay into by a dipole transition.
print(lifetimes(im_z_matrix(2)).to_text())
