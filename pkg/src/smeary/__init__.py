"""Hessian and quartic analysis of Frechet means on spheres.

The submodules are importable on their own; the names below are the ones
most scripts need.
"""
from .constructions import (
    build_directional, build_high_modulation, build_smeary_rot, calibrate_two_bumps,
    check_not_global, minimal_feasible_m,
)
from .densities import AngularModel, Bump, RadialDensity, angular_moments, load_density
from .errors import (
    ClassificationError, ConstructionError, CutLocusError, DomainError, NumericalError,
    QuadratureError, RootError, SamplingError, SmearyError,
)
from .geometry import distance, exp_at, exp_north, log_at, log_north, north_pole
from .kernels import (
    b_m, find_R_m, find_S_m, h_m, minimal_admissible_m, positivity_window,
)
from .montecarlo import experiment_curse, frechet_mean_gd, modulation_samples, theory_row
from .spectra import classify, funk_hecke_average, hessian_product, spectral_report
from .taylor import radial_coeffs, taylor_coeffs, taylor_coeffs_cosine

__version__ = "0.1.0"
