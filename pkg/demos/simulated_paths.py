"""Sample paths of the jump-extended rate and the jump-diffusion asset.

Dumps a few simulated paths in long CSV form (the same format as the
``paths`` CLI subcommand) and marks the steps where jumps landed.
Pipe the output into any plotting tool to reproduce path figures.
"""

import numpy as np

from levypricer import (
    AssetParams,
    Exponential,
    Fixed,
    MarketState,
    RateParams,
    SimSpec,
    simulate_paths,
)

rate = RateParams(k=2.0, a=0.05, sigma_r=0.05, lam=1.0, x_law=Exponential(1000.0))
asset = AssetParams(sigma=0.05, lambda1=1.0, y_law=Fixed(1.01))
state = MarketState(spot=110.0, r=0.03, tau=1.0, strike=100.0)

# Independent paths: antithetic pairs share their jump draws by design.
bundle = simulate_paths(rate, asset, state,
                        SimSpec(n_paths=2, n_steps=252, seed=12, antithetic=False))

print("path,t,r,S")
for p in range(bundle.r.shape[0]):
    for j in range(1, bundle.t.size):
        print(f"{p},{bundle.t[j]:.6f},{bundle.r[p, j]:.8f},{bundle.s[p, j]:.6f}")

for p in range(bundle.r.shape[0]):
    rate_steps = np.nonzero(bundle.rate_jumps[p] > 0)[0]
    asset_steps = np.nonzero(bundle.asset_jumps[p] != 1.0)[0]
    print(f"# path {p}: rate jumps at steps {rate_steps.tolist()}, "
          f"asset jumps at steps {asset_steps.tolist()}")
