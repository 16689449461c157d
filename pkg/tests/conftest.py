"""Shared fixtures: the benchmark parameter set used across the suite."""

import pytest

from levypricer import (
    AssetParams,
    Exponential,
    Fixed,
    MarketState,
    RateParams,
)

# Benchmark configuration: mean-reverting rate with basis-point-scale
# exponential jumps, low-vol asset with a fixed 1% upward jump.
BENCH_K = 2.0
BENCH_A = 0.05
BENCH_SIGMA_R = 0.05
BENCH_SIGMA = 0.05
BENCH_THETA = 1000.0
BENCH_SPOT = 110.0
BENCH_STRIKE = 100.0
BENCH_R0 = 0.03
BENCH_TAU = 1.0


@pytest.fixture(scope="session")
def bench_rate() -> RateParams:
    return RateParams(k=BENCH_K, a=BENCH_A, sigma_r=BENCH_SIGMA_R, lam=1.0,
                      x_law=Exponential(BENCH_THETA))


@pytest.fixture(scope="session")
def bench_asset() -> AssetParams:
    return AssetParams(sigma=BENCH_SIGMA, lambda1=1.0, y_law=Fixed(1.01))


@pytest.fixture(scope="session")
def bench_state() -> MarketState:
    return MarketState(spot=BENCH_SPOT, r=BENCH_R0, tau=BENCH_TAU, strike=BENCH_STRIKE)


@pytest.fixture(scope="session")
def flat_rate() -> RateParams:
    """Deterministic flat short rate at r0: a = r0, no diffusion, no jumps."""
    return RateParams(k=BENCH_K, a=BENCH_R0, sigma_r=0.0, lam=0.0, x_law=Fixed(0.0))


@pytest.fixture(scope="session")
def no_jump_asset() -> AssetParams:
    return AssetParams(sigma=BENCH_SIGMA, lambda1=0.0, y_law=Fixed(1.0))
