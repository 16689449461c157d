"""Risk-neutral simulation of the full jump models, the validation oracle.

Rate step (full-truncation Euler, drift and diffusion at r+ = max(r, 0)):

    r'  = r + k (a - r+) dt - lam C_X dt + sigma_r sqrt(r+ dt) xi
            + (rate jumps arriving in the step)

Asset step (exact log step given the step's starting rate):

    S'  = S exp((r - lambda1 C_Y - sigma^2/2) dt + sigma sqrt(dt) xi1)
            * (product of Y jumps in the step)

Jump counts per step are Poisson; they are realised by drawing each
path's total jump count over [0, tau], a uniform step index per jump
and i.i.d. magnitudes, which has exactly the per-step Poisson law and
keeps the hot loop free of per-step count draws.  The discount integral
uses the trapezoid rule on the same grid.

Randomness is stream-splittable (PCG64 seeded through SeedSequence
spawn keys), split per block and per component (rate / asset 1 /
asset 2): results are bit-for-bit reproducible for a given SimSpec,
independent of worker count, and the asset-1 draws of a basket run
coincide with a single-asset run under the same seed.  Antithetic pairs
negate the Gaussian draws and share the jump draws.  Blocks are
embarrassingly parallel; ``workers`` > 1 fans them out to processes and
reduces in block order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .params import AssetParams, BasketParams, MarketState, PriceResult, RateParams, SimSpec

__all__ = ["PathBundle", "simulate_paths", "mc_option_price", "mc_bond_price", "mc_basket_price"]

_BLOCK = 1 << 16  # entities (paths, or pairs when antithetic) per block


@dataclass(frozen=True)
class PathBundle:
    """Materialised simulation grid for path inspection and CSV dumps."""

    t: np.ndarray  # (n_steps + 1,)
    r: np.ndarray  # (n_paths, n_steps + 1)
    s: np.ndarray | None  # same shape, per asset
    s2: np.ndarray | None
    rate_jumps: np.ndarray  # (n_paths, n_steps), jump sum landing in each step (0 = none)
    asset_jumps: np.ndarray | None  # multiplicative jump factor per step (1 = none)
    asset2_jumps: np.ndarray | None


def _rng(seed: int, block: int, component: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block, component))
    return np.random.Generator(np.random.PCG64(ss))


def _n_steps_total(spec: SimSpec, tau: float) -> int:
    return max(1, math.ceil(spec.n_steps * tau))


def _blocks(spec: SimSpec) -> list[tuple[int, int]]:
    """(block index, entities in block); entities are pairs when antithetic."""
    if spec.antithetic:
        if spec.n_paths % 2:
            raise ValueError("antithetic simulation requires an even n_paths")
        total = spec.n_paths // 2
    else:
        total = spec.n_paths
    out = []
    idx = 0
    while total > 0:
        take = min(total, _BLOCK)
        out.append((idx, take))
        total -= take
        idx += 1
    return out


class _JumpSchedule:
    """Per-block jump draws binned by step, served as (owners, values) slices."""

    def __init__(self, intensity: float, magnitudes, n_entities: int, n_steps: int,
                 tau: float, rng: np.random.Generator):
        counts = rng.poisson(intensity * tau, n_entities)
        total = int(counts.sum())
        steps = rng.integers(0, n_steps, total)
        values = magnitudes(total, rng)
        owners = np.repeat(np.arange(n_entities), counts)
        order = np.argsort(steps, kind="stable")
        self._steps = steps[order]
        self._owners = owners[order]
        self._values = values[order]
        self._bounds = np.searchsorted(self._steps, np.arange(n_steps + 1))
        self._buf = np.zeros(n_entities)

    def step_sums(self, step: int):
        """(owners, values, dense) for this step; dense is a reused buffer."""
        lo, hi = self._bounds[step], self._bounds[step + 1]
        owners = self._owners[lo:hi]
        if owners.size == 0:
            return None
        np.add.at(self._buf, owners, self._values[lo:hi])
        return owners

    def clear(self, owners) -> None:
        self._buf[owners] = 0.0

    @property
    def dense(self) -> np.ndarray:
        return self._buf


def _log_magnitudes(law):
    """Sampler of log jump factors for multiplicative jumps."""
    def draw(total: int, rng: np.random.Generator) -> np.ndarray:
        return np.log(law.sample(total, rng)) if total else np.empty(0)
    return draw


def _simulate_block(
    rate: RateParams,
    assets: tuple[AssetParams, ...],
    rho: float,
    state: MarketState,
    block: int,
    n_entities: int,
    spec: SimSpec,
    keep_paths: bool = False,
):
    """Advance one block of paths; returns terminal state or full grids.

    Per-stream draw order is fixed (jump schedule at block start, then
    one Gaussian vector per step).  Asset 2 consumes only its own stream
    plus the shared xi1 through the correlation, which keeps asset-1
    paths identical between single-asset and basket runs.
    """
    tau = state.tau
    n_steps = _n_steps_total(spec, tau)
    dt = tau / n_steps
    sqrt_dt = math.sqrt(dt)
    rngs = [_rng(spec.seed, block, c) for c in range(3)]
    lead = 2 if spec.antithetic else 1
    spots = state.spots()

    jumps_r = (_JumpSchedule(rate.lam, rate.x_law.sample, n_entities, n_steps, tau, rngs[0])
               if rate.lam > 0 else None)
    jumps_s = [
        (_JumpSchedule(asset.lambda1, _log_magnitudes(asset.y_law), n_entities,
                       n_steps, tau, rngs[1 + i])
         if asset.lambda1 > 0 else None)
        for i, asset in enumerate(assets)
    ]

    r = np.full((lead, n_entities), float(state.r))
    log_s = [np.full((lead, n_entities), math.log(spots[i])) for i in range(len(assets))]
    r_running = np.zeros((lead, n_entities))  # sum of step-start rates
    rho_c = math.sqrt(max(1.0 - rho * rho, 0.0))
    s_drift = [(-asset.lambda1 * asset.c_y - 0.5 * asset.sigma**2) * dt for asset in assets]
    drift_const = (rate.k * rate.a - rate.lam * rate.c_x) * dt

    if keep_paths:
        r_path = np.empty((lead, n_entities, n_steps + 1))
        r_path[..., 0] = r
        s_paths = [np.empty((lead, n_entities, n_steps + 1)) for _ in assets]
        for i, ls in enumerate(log_s):
            s_paths[i][..., 0] = np.exp(ls)
        rj_path = np.zeros((lead, n_entities, n_steps))
        aj_paths = [np.ones((lead, n_entities, n_steps)) for _ in assets]

    def gaussians(rng):
        xi = rng.standard_normal(n_entities)
        return np.stack([xi, -xi]) if spec.antithetic else xi[None, :]

    for step in range(n_steps):
        xi_r = gaussians(rngs[0])
        r_running += r
        r_plus = np.maximum(r, 0.0)
        r_new = r + drift_const - (rate.k * dt) * r_plus \
            + (rate.sigma_r * sqrt_dt) * np.sqrt(r_plus) * xi_r
        if jumps_r is not None:
            owners = jumps_r.step_sums(step)
            if owners is not None:
                r_new += jumps_r.dense
                if keep_paths:
                    rj_path[..., step] = jumps_r.dense
                jumps_r.clear(owners)

        xi1 = None
        for i, asset in enumerate(assets):
            xi = gaussians(rngs[1 + i])
            if i == 1:
                xi = rho * xi1 + rho_c * xi
            else:
                xi1 = xi
            log_s[i] += r * dt + s_drift[i] + (asset.sigma * sqrt_dt) * xi
            sched = jumps_s[i]
            if sched is not None:
                owners = sched.step_sums(step)
                if owners is not None:
                    log_s[i] += sched.dense
                    if keep_paths:
                        aj_paths[i][..., step] = np.exp(sched.dense)
                    sched.clear(owners)
        r = r_new

        if keep_paths:
            r_path[..., step + 1] = r
            for i in range(len(assets)):
                s_paths[i][..., step + 1] = np.exp(log_s[i])

    # Trapezoid of r on the grid from the running sum of step starts.
    integral = (r_running + 0.5 * (r - np.full((lead, n_entities), float(state.r)))) * dt

    if keep_paths:
        flat = lambda arr: arr.reshape(-1, arr.shape[-1])
        return (
            flat(r_path),
            [flat(sp) for sp in s_paths],
            flat(rj_path),
            [flat(aj) for aj in aj_paths],
        )
    return r, [np.exp(ls) for ls in log_s], integral


def _payoff_kind(assets, strike, weights):
    if not assets:
        return None
    if len(assets) == 1:
        return ("call", strike)
    if weights.kind == "geometric":
        return ("geometric", strike, weights.alpha)
    return ("arithmetic", strike, weights.weights)


def _block_values(rate, assets, rho, state, block, n_entities, spec, payoff) -> np.ndarray:
    r, s_list, integral = _simulate_block(rate, assets, rho, state, block, n_entities, spec)
    disc = np.exp(-integral)
    if payoff is None:
        vals = disc
    elif payoff[0] == "call":
        vals = disc * np.maximum(s_list[0] - payoff[1], 0.0)
    elif payoff[0] == "geometric":
        alpha = payoff[2]
        vals = disc * np.maximum(s_list[0] ** alpha * s_list[1] ** (1.0 - alpha) - payoff[1], 0.0)
    else:
        w1, w2 = payoff[2]
        vals = disc * np.maximum(w1 * s_list[0] + w2 * s_list[1] - payoff[1], 0.0)
    return vals.mean(axis=0)  # antithetic pair average


def _run(rate, assets, rho, state, spec, payoff, workers: int = 1) -> PriceResult:
    """Discounted-payoff estimate over all blocks, reduced in block order."""
    if state.tau == 0.0:
        s = state.spots()
        if payoff is None:
            value = 1.0
        elif payoff[0] == "call":
            value = max(s[0] - payoff[1], 0.0)
        elif payoff[0] == "geometric":
            value = max(s[0] ** payoff[2] * s[1] ** (1.0 - payoff[2]) - payoff[1], 0.0)
        else:
            w1, w2 = payoff[2]
            value = max(w1 * s[0] + w2 * s[1] - payoff[1], 0.0)
        return PriceResult(value=value, terms_used=None, quad_error=0.0,
                           converged=True, stderr=0.0)

    blocks = _blocks(spec)
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_block_values, rate, assets, rho, state, b, n, spec, payoff)
                for b, n in blocks
            ]
            chunks = [f.result() for f in futures]  # block order
    else:
        chunks = [_block_values(rate, assets, rho, state, b, n, spec, payoff)
                  for b, n in blocks]

    total = sum(float(c.sum()) for c in chunks)
    total_sq = sum(float((c * c).sum()) for c in chunks)
    count = sum(c.size for c in chunks)
    mean = total / count
    if count > 1:
        var = max(total_sq - count * mean * mean, 0.0) / (count - 1)
        stderr = math.sqrt(var / count)
    else:
        stderr = 0.0
    return PriceResult(value=mean, terms_used=None, quad_error=0.0,
                       converged=True, stderr=stderr)


def mc_option_price(
    rate: RateParams, asset: AssetParams, state: MarketState, spec: SimSpec,
    workers: int = 1,
) -> PriceResult:
    """Discounted single-asset call estimate with its standard error."""
    return _run(rate, (asset,), 0.0, state, spec, ("call", state.strike), workers)


def mc_bond_price(rate: RateParams, r0: float, tau: float, spec: SimSpec,
                  workers: int = 1) -> PriceResult:
    """Estimate of E[exp(-int r)] for the jump-extended square-root rate."""
    state = MarketState(spot=1.0, r=r0, tau=tau, strike=1.0)
    return _run(rate, (), 0.0, state, spec, None, workers)


def mc_basket_price(
    rate: RateParams, basket: BasketParams, state2: MarketState, spec: SimSpec,
    workers: int = 1,
) -> PriceResult:
    """Discounted basket call estimate; the only route for arithmetic baskets."""
    if len(state2.spots()) != 2:
        raise ValueError("basket simulation needs a two-spot MarketState")
    payoff = _payoff_kind((basket.asset1, basket.asset2), state2.strike, basket.weights)
    return _run(rate, (basket.asset1, basket.asset2), basket.rho, state2, spec,
                payoff, workers)


def simulate_paths(
    rate: RateParams,
    assets: AssetParams | BasketParams | None,
    state: MarketState,
    spec: SimSpec,
) -> PathBundle:
    """Materialise full path grids (meant for small path counts).

    ``assets`` may be a single AssetParams, a BasketParams for two
    correlated assets, or None for rate-only paths.
    """
    if isinstance(assets, BasketParams):
        asset_tuple: tuple[AssetParams, ...] = (assets.asset1, assets.asset2)
        rho = assets.rho
    elif isinstance(assets, AssetParams):
        asset_tuple, rho = (assets,), 0.0
    else:
        asset_tuple, rho = (), 0.0

    n_steps = _n_steps_total(spec, state.tau)
    t = np.linspace(0.0, state.tau, n_steps + 1)
    r_parts, s_parts, rj_parts, aj_parts = [], [], [], []
    for block, n_entities in _blocks(spec):
        r_p, s_p, rj_p, aj_p = _simulate_block(rate, asset_tuple, rho, state, block,
                                               n_entities, spec, keep_paths=True)
        r_parts.append(r_p)
        s_parts.append(s_p)
        rj_parts.append(rj_p)
        aj_parts.append(aj_p)

    r_all = np.concatenate(r_parts)[: spec.n_paths]
    rj_all = np.concatenate(rj_parts)[: spec.n_paths]
    s_all = [np.concatenate([p[i] for p in s_parts])[: spec.n_paths]
             for i in range(len(asset_tuple))]
    aj_all = [np.concatenate([p[i] for p in aj_parts])[: spec.n_paths]
              for i in range(len(asset_tuple))]
    return PathBundle(
        t=t,
        r=r_all,
        s=s_all[0] if asset_tuple else None,
        s2=s_all[1] if len(asset_tuple) > 1 else None,
        rate_jumps=rj_all,
        asset_jumps=aj_all[0] if asset_tuple else None,
        asset2_jumps=aj_all[1] if len(asset_tuple) > 1 else None,
    )
