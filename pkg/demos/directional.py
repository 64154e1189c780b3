"""Rank-one Hessian from a concentrated angular law and two bumps straddling the equator."""
from smeary.constructions import build_directional

for m in (2, 3, 5):
    rec = build_directional(m, 0.3)
    eigs = rec.report.hess_eigs
    print(f"m={m}: kappa={rec.kappa:g}, p*={rec.p_star:.6f}, eigenvalues {eigs[0]:.6f} and "
          f"{max(abs(e) for e in eigs[1:]):.1e} (x{m - 1}), quartic on the kernel {rec.kernel_quartic:.5f}")
