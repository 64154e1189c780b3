"""Build a zero-Hessian, positive-quartic density on a thin annulus beyond the equator.

For narrow annuli the two-bump calibration cannot make the quartic positive
at any dimension (the feasibility ratio stays below one); wide annuli work.
"""
from smeary import kernels as K
from smeary.constructions import (
    asymptotic_feasibility, build_smeary_rot, check_not_global, minimal_feasible_m,
    smeary_feasibility,
)
from smeary.errors import ConstructionError

for eps in (0.2, 0.5, 0.8, 1.0):
    m0 = K.minimal_admissible_m(eps)
    print(f"eps={eps}: admissible from m={m0}, ratio there {smeary_feasibility(m0, eps):.4f}, "
          f"large-m ratio {asymptotic_feasibility(eps):.4f}, feasible from m={minimal_feasible_m(eps)}")

eps = 0.2
m = K.minimal_admissible_m(eps)
try:
    build_smeary_rot(m, eps)
except ConstructionError as exc:
    print(f"\neps={eps}, m={m}: {exc.message}")

rec = build_smeary_rot(12, 0.8)
print(f"\neps=0.8, m=12: Hessian {rec.report.hess_eigs[0]:.2e}, quartic {rec.report.quartic_scalar:.5f}, "
      f"class {rec.report.classification}")
print(f"support {rec.density.support}, mass {rec.mass:.12f}")
gap = check_not_global(rec)
print(f"Phi(0) - Phi(pi/2) = {gap.gap:+.5f} (positive means N is not the global minimizer)")
