"""Power-series characteristic function against its ODE oracle.

The series solution of the forward-measure transform and a fixed-step
fourth-order integration of the same Riccati system are independent
code paths; this prints their agreement across frequencies plus the
martingale identity f(-i) * bond = spot that pins sign conventions.
"""

import math

import numpy as np

from levypricer import (
    AssetParams,
    Exponential,
    Fixed,
    RateParams,
    bond_price,
    charfn_eval,
    radius_bound,
    riccati_oracle,
)

rate = RateParams(k=2.0, a=0.05, sigma_r=0.05, lam=1.0, x_law=Exponential(1000.0))
asset = AssetParams(sigma=0.05, lambda1=1.0, y_law=Fixed(1.01))
spot, r0, tau = 110.0, 0.03, 1.0
z = math.log(spot)

print(f"series convergence bound in tau: {radius_bound(rate):.4f} (tau = {tau})\n")

print("phi        |f(phi)|      |series - oracle|")
for phi in (0.5, 2.0, 5.0, 20.0, 50.0, 100.0):
    f_series = charfn_eval(rate, asset, phi, tau, z, r0)
    f_oracle = riccati_oracle(rate, asset, phi, tau, z, r0)
    print(f"{phi:6.1f}  {abs(f_series):12.6e}  {abs(f_series - f_oracle):14.3e}")

f_mi = charfn_eval(rate, asset, -1j, tau, z, r0)
b = bond_price(rate, r0, tau)
print(f"\nmartingale identity: f(-i) * b = {f_mi.real * b:.8f} vs spot {spot}")
print(f"relative gap {f_mi.real * b / spot - 1:.3e} (the drift-folded jump "
      "substitution leaves a ~1e-7 residual)")
