"""Variance modulation n d^2(mean_n, N) / V_m against the large-sample theory.

Writes modulation.csv and modulation.svg to the current directory.
"""
from smeary.montecarlo import experiment_curse, to_csv, write_svg

res = experiment_curse(dims=(2, 3, 5, 10, 50), ns=(1000,), reps=20, master_seed=12345)
theory = {t.m: t.m_inf for t in res.theory}
for (m, n), z in res.means().items():
    print(f"m={m:3d} n={n}: mean Z_n {z:7.3f}   theory {theory[m]:7.3f}")
with open("modulation.csv", "w") as fh:
    fh.write(to_csv(res))
write_svg(res, "modulation.svg")
