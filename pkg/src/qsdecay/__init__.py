"""Exact hydrogen decay rates and a numerical test bench for resonance lifetimes."""

from .exactcore import ExactScalar, Polynomial, exact_sqrt, integrate_poly_exp, laguerre
from .hydrogen import (
    Orbital,
    dipole_element,
    energy,
    gordon_radial_integral,
    momentum_element,
    radial,
)
from .linewidth import (
    CutoffFunction,
    PhysicalConstants,
    diagonalize,
    im_z_matrix,
    im_z_momentum_form,
    lifetimes,
)
from .resonance import (
    ModelConfig,
    build_model,
    corollary_limit_check,
    feshbach_operator,
    resolvent_identity_check,
    resonance_pole,
    survival_amplitude,
    z_matrix_toy,
)

__version__ = "0.1.0"
