"""European call value of the continuous auxiliary model by Fourier inversion.

W(S, r, tau) = f(-i) P1 - K P2 with the two exercise probabilities

    P2 = 1/2 + (1/pi) int_0^inf Re[ e^{-i phi ln K} f(phi)      / (i phi)        ] dphi,
    P1 = 1/2 + (1/pi) int_0^inf Re[ e^{-i phi ln K} f(phi - i)  / (i phi f(-i)) ] dphi,

and f(-i) = S / b the forward price.  The integrals run over successive
Gauss-Legendre panels; the integrand has a finite phi -> 0 limit and
open panel nodes never touch phi = 0.  The integrand oscillates with
period 2 pi / |ln(S/K)|, so the panel width shrinks when the moneyness
is extreme, keeping the radians per panel within what the node count
resolves to machine precision.

The engine is vectorised over market states: the (B, D) loadings depend
only on (rate params, sigma, tau), so one transform prices every
jump-shifted (spot, r) node the series pricer asks for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import norm

from . import charfn
from .bond import gauss_legendre
from .errors import TailNotDecayed
from .params import AssetParams, MarketState, PriceResult, QuadratureSpec, RateParams

__all__ = ["p_terms", "w_price", "w_values", "black_scholes_reference", "call_transform"]

_ODE_STEPS_ENGINE = 4000  # sigma_r = 0 fallback inside the pricing engine
_RADIANS_PER_NODE = 0.6  # n-node Gauss-Legendre holds ~1e-14 up to ~0.75 rad/node


@dataclass
class _Grid:
    """Panelised phi grid with the state-independent loadings on it."""

    width: float
    n_panels: int
    phis: np.ndarray  # (n_panels, nodes)
    weights: np.ndarray
    b2: np.ndarray
    d2: np.ndarray
    b1: np.ndarray  # at phi - i
    d1: np.ndarray


class _CallTransform:
    """Loadings and grids for one (rate, sigma, tau, spec) combination."""

    def __init__(self, rate: RateParams, sigma: float, tau: float,
                 spec: QuadratureSpec, max_terms: int | None = None):
        self.rate = rate
        self.sigma = sigma
        self.tau = tau
        self.spec = spec
        self.max_terms = max_terms
        self.series_mode = rate.sigma_r > 0.0
        if self.series_mode:
            charfn._check_tau(rate, tau)  # RadiusExceeded / DegenerateVolatility guard
        bm, dm = self._bd(np.array([-1j]))
        self.b_minus_i = complex(bm[0])
        self.d_minus_i = complex(dm[0])
        self._grids: dict[float, _Grid] = {}

    def _bd(self, phis: np.ndarray):
        if self.series_mode:
            return charfn.bd_series_many(self.rate, self.sigma, phis, self.tau,
                                         max_terms=self.max_terms)
        return charfn.bd_ode_many(self.rate, self.sigma, phis, self.tau,
                                  n_steps=_ODE_STEPS_ENGINE)

    def _grid(self, width: float) -> _Grid:
        key = round(width, 12)
        if key not in self._grids:
            n_panels = int(math.ceil(self.spec.phi_max_cap / width))
            x, w = gauss_legendre(self.spec.nodes_per_panel)
            offsets = width * np.arange(n_panels)[:, None]
            phis = offsets + 0.5 * width * (x + 1.0)[None, :]
            flat = phis.ravel().astype(complex)
            b2, d2 = self._bd(flat)
            b1, d1 = self._bd(flat - 1j)
            shape = phis.shape
            self._grids[key] = _Grid(
                width=width,
                n_panels=n_panels,
                phis=phis,
                weights=np.broadcast_to(0.5 * width * w, shape).copy(),
                b2=b2.reshape(shape),
                d2=d2.reshape(shape),
                b1=b1.reshape(shape),
                d1=d1.reshape(shape),
            )
        return self._grids[key]

    def forward(self, spots: np.ndarray, rs: np.ndarray) -> np.ndarray:
        """f(-i) = E[S^c(T)] per state, the forward price S/b."""
        return np.exp(self.b_minus_i + self.d_minus_i * rs + np.log(spots)).real

    def probabilities(self, spots, rs, strike):
        """(P1, P2, tail, panels_used) vectorised over states."""
        spots = np.atleast_1d(np.asarray(spots, dtype=float))
        rs = np.atleast_1d(np.asarray(rs, dtype=float))
        z = np.log(spots)
        log_k = math.log(strike)
        # Oscillation frequency of the integrand in phi; the 0.1 margin
        # covers the drift-induced phase of f itself.
        freq = float(np.max(np.abs(z - log_k))) + 0.1
        width = min(self.spec.panel_width,
                    2.0 * _RADIANS_PER_NODE * self.spec.nodes_per_panel / freq)
        grid = self._grid(width)
        panel_tol = self.spec.tail_tol * grid.width / self.spec.panel_width

        p1 = np.full(spots.shape, 0.5)
        p2 = np.full(spots.shape, 0.5)
        tail = math.inf
        calm_panels = 0
        for panel in range(grid.n_panels):
            phis = grid.phis[panel]
            phase = np.exp(-1j * phis * log_k) / (1j * phis)
            q2 = grid.weights[panel] * np.exp(grid.b2[panel]) * phase
            q1 = grid.weights[panel] * np.exp(grid.b1[panel] - self.b_minus_i) * phase
            # States enter only through exp(D r + i phi z).
            e2 = np.exp(np.outer(rs, grid.d2[panel]) + np.outer(z, 1j * phis))
            e1 = np.exp(np.outer(rs, grid.d1[panel] - self.d_minus_i) + np.outer(z, 1j * phis))
            c2 = (e2 @ q2).real / math.pi
            c1 = (e1 @ q1).real / math.pi
            p2 += c2
            p1 += c1
            tail = max(float(np.max(np.abs(c1))), float(np.max(np.abs(c2))))
            calm_panels = calm_panels + 1 if tail < panel_tol else 0
            if calm_panels >= 2:
                return p1, p2, tail, panel + 1
        raise TailNotDecayed(
            f"panel contribution {tail:.3e} still above {panel_tol:.1e} "
            f"at phi = {self.spec.phi_max_cap}"
        )


@lru_cache(maxsize=64)
def call_transform(rate: RateParams, sigma: float, tau: float,
                   spec: QuadratureSpec = QuadratureSpec(),
                   max_terms: int | None = None) -> _CallTransform:
    """Cached transform; parameters are frozen dataclasses, hence hashable."""
    return _CallTransform(rate, sigma, tau, spec, max_terms)


def w_values(
    rate: RateParams,
    sigma: float,
    tau: float,
    strike: float,
    spots: np.ndarray,
    rs: np.ndarray,
    spec: QuadratureSpec = QuadratureSpec(),
    max_terms: int | None = None,
) -> tuple[np.ndarray, float]:
    """Call values W for a batch of (spot, r) states sharing (tau, strike).

    Returns (values, quadrature error proxy = last panel contribution).
    Values are floored at zero: far out of the money the inversion can
    come back a few ulps negative.
    """
    if tau == 0.0:
        w = np.maximum(np.atleast_1d(np.asarray(spots, dtype=float)) - strike, 0.0)
        return w, 0.0
    tr = call_transform(rate, sigma, tau, spec, max_terms)
    p1, p2, tail, _ = tr.probabilities(spots, rs, strike)
    fwd = tr.forward(np.atleast_1d(np.asarray(spots, dtype=float)),
                     np.atleast_1d(np.asarray(rs, dtype=float)))
    return np.maximum(fwd * p1 - strike * p2, 0.0), tail


def p_terms(
    rate: RateParams,
    asset: AssetParams,
    state: MarketState,
    spec: QuadratureSpec = QuadratureSpec(),
) -> tuple[float, float]:
    """Exercise probabilities (P1, P2) under the two pricing measures.

    Both lie in [0, 1] up to quadrature noise; the f(-i) forward factor
    is applied by w_price, not here.
    """
    (spot,) = state.spots()
    tr = call_transform(rate, asset.sigma, state.tau, spec)
    p1, p2, _, _ = tr.probabilities(np.array([spot]), np.array([state.r]), state.strike)
    return float(p1[0]), float(p2[0])


def w_price(
    rate: RateParams,
    asset: AssetParams,
    state: MarketState,
    spec: QuadratureSpec = QuadratureSpec(),
) -> PriceResult:
    """Forward-measure call value W = f(-i) P1 - K P2 of the auxiliary model."""
    (spot,) = state.spots()
    w, tail = w_values(rate, asset.sigma, state.tau, state.strike,
                       np.array([spot]), np.array([state.r]), spec)
    return PriceResult(value=float(w[0]), terms_used=None, quad_error=tail,
                       converged=tail < spec.tail_tol)


def black_scholes_reference(
    spot: float, strike: float, sigma: float, rate: float, tau: float,
    forward: bool = False,
) -> float:
    """Black-Scholes call; ``forward`` returns the undiscounted value.

    The forward variant is E[max(S(T) - K, 0)] under a lognormal with
    drift ``rate``, i.e. the discounted price times e^{rate tau}.
    """
    if spot <= 0 or strike <= 0:
        raise ValueError("black_scholes_reference requires spot > 0 and strike > 0")
    vol = sigma * math.sqrt(tau)
    if vol <= 0:
        disc = max(spot - strike * math.exp(-rate * tau), 0.0)
    else:
        d1 = (math.log(spot / strike) + (rate + 0.5 * sigma**2) * tau) / vol
        d2 = d1 - vol
        disc = spot * norm.cdf(d1) - strike * math.exp(-rate * tau) * norm.cdf(d2)
    return disc * math.exp(rate * tau) if forward else disc
