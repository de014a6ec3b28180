"""
Exponential decay in the two-level toy model
============================================

An excited level coupled to a discretized photon continuum decays at the
rate predicted by the golden-rule matrix Z, and the agreement improves as
the coupling g shrinks.
"""

# %%
import numpy as np

from qsdecay.resonance import (
    ModelConfig,
    build_model,
    corollary_limit_check,
    decay_fit,
    resonance_pole,
    z_matrix_toy,
)

model = build_model(ModelConfig(g=0.05))
Z = z_matrix_toy(model)
print("Z =", Z[0, 0], " (independent of g)")

# %%
# Fit the amplitude decay over a window of the survival curve.
fit = decay_fit(model)
print(f"fitted rate {fit.rate:.6e}, g^2 Im Z = {fit.predicted:.6e}, "
      f"relative error {fit.relative_error:.2%}")

# %%
# The resonance pole on the second sheet approaches E_j - i g^2 Im Z.
for g in (0.1, 0.05, 0.025):
    pole = resonance_pole(model.with_g(g))
    print(f"g={g:<6} -Im z*/g^2 = {-pole.z.imag / g**2:.6f}   (Im Z = {Z[0, 0].imag:.6f})")

# %%
# At fixed rescaled time s = tau/g^2 the survival amplitude tends to exp(-tau Im Z).
for row in corollary_limit_check(model, 1.0, [0.2, 0.1, 0.05, 0.025]):
    print(f"g={row.g:<6} |A|={row.amplitude:.6f}  limit={row.prediction:.6f}  dev={row.deviation:.2e}")

# %%
# Short-time behaviour is quadratic, not exponential.
from qsdecay.resonance import survival_amplitude

s = np.array([0.0, 1.0, 2.0, 4.0])
A = survival_amplitude(model, model.vacuum_state(1), times=s).modulus
print("1 - |A(s)| at small s:", np.round(1 - A, 8))
