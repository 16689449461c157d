"""Zero-coupon bond curve under the jump-extended square-root rate.

Prints the exponential-affine loadings and prices across maturities,
then shows the no-jump case collapsing onto the classical square-root
bond formula.
"""

import numpy as np

from levypricer import Exponential, RateParams, bond_price, cir_bond_price
from levypricer.bond import loading_A, loading_G

rate = RateParams(k=2.0, a=0.05, sigma_r=0.05, lam=1.0, x_law=Exponential(1000.0))
r0 = 0.03

print("maturity      G(s)          A(s)          b(s, r0)")
for s in (0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0):
    print(f"{s:8.2f}  {loading_G(rate, s):12.8f}  {loading_A(rate, s):12.8f}"
          f"  {bond_price(rate, r0, s):12.8f}")

print("\nlong-maturity loading limit -2/(k+m):",
      f"{-2.0 / (rate.k + rate.m):.8f} vs G(50) = {loading_G(rate, 50.0):.8f}")

no_jumps = RateParams(k=2.0, a=0.05, sigma_r=0.05, lam=0.0, x_law=Exponential(1000.0))
print("\nno jumps vs classical square-root bond formula:")
for s in (0.5, 1.0, 3.0):
    ours = bond_price(no_jumps, r0, s)
    ref = cir_bond_price(2.0, 0.05, 0.05, r0, s)
    print(f"  s={s}: {ours:.12f} vs {ref:.12f} (rel diff {abs(ours / ref - 1):.1e})")

print("\njump intensity raises long-run rates, lowering bond prices:")
for lam in (0.0, 1.0, 2.0):
    jumpy = RateParams(k=2.0, a=0.05, sigma_r=0.05, lam=lam, x_law=Exponential(1000.0))
    print(f"  lambda={lam}: b(1, r0) = {bond_price(jumpy, r0, 1.0):.8f}")
