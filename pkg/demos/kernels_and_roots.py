"""Where the Hessian and quartic kernels change sign, and how fast the roots approach pi/2."""
import numpy as np

from smeary import kernels as K

print(" m      R_m        S_m     (R_m-pi/2)pi(m-1)/2  (S_m-pi/2)pi m/8")
for m in (2, 3, 4, 8, 16, 64, 256):
    r = K.find_R_m(m).value
    s = K.find_S_m(m).value if m >= 4 else float("nan")
    print(f"{m:3d}  {r:.8f}  {s:.8f}  {(r - np.pi / 2) * np.pi * (m - 1) / 2:12.5f}"
          f"  {(s - np.pi / 2) * np.pi * m / 8:12.5f}")

print("\nkernel h_m at pi/2 against (1 - m) / (3 m (m + 2)):")
for m in (2, 7, 8, 30):
    print(f"  m={m:2d}  h_m={float(K.h_m(m, np.pi / 2)):+.12f}  closed={K.h_m_endpoint_value(m):+.12f}"
          f"  slope={K.h_m_endpoint_slope(m):+.6f}")

for eps in (0.05, 0.2, 0.5):
    print(f"smallest m with pi/2 < R_m < S_m < pi/2 + {eps}: {K.minimal_admissible_m(eps)}")
