"""Defaultable zero-coupon straight bond: survival probability and price.

The bond knocks into the rebate R*Z when the firm value hits the barrier
B*Z; conditional on survival it pays face 1 at maturity.  In numeraire
coordinates x = V/Z the no-default probability has the down-and-out form
W = N(d1) - (x/B) N(d2) and the price is C = [R + (1-R) W] * Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import analytics, model
from .errors import BelowBarrier, DegenerateVariance, DomainError, InvalidTenor

_MIN_VARIANCE = 1e-16


@dataclass(frozen=True)
class BondSpec:
    """Zero-coupon bond terms: maturity in years, unit face value."""

    maturity_T: float
    face: float = 1.0

    def __post_init__(self) -> None:
        if not self.maturity_T > 0.0:
            raise ValueError(f"maturity_T must be positive, got {self.maturity_T}")
        if self.face != 1.0:
            raise ValueError("face value is fixed at 1")


@dataclass(frozen=True)
class BondPriceResult:
    """Price plus diagnostic intermediates of the straight-bond formula."""

    price: float
    z: float
    x: float
    w: float
    total_variance: float


def d_fn(ratio: float, t: float, T1: float, T: float,
         params: model.ModelParams) -> float:
    """(ln ratio - I/2) / sqrt(I) with I = cum_variance(t, T1, T)."""
    if not ratio > 0.0:
        raise DomainError(f"ratio must be positive, got {ratio}")
    variance = model.cum_variance(t, T1, T, params)
    if variance <= _MIN_VARIANCE:
        raise DegenerateVariance("variance over [t, T1] is numerically zero")
    return (math.log(ratio) - 0.5 * variance) / math.sqrt(variance)


def survival_curve(x: float, t: float, T1: float, T: float,
                   params: model.ModelParams) -> float:
    """Down-and-out survival functional with variance int_t^T1 sigma_x2(u; T) du.

    survival_w is the T1 = T case; the option formulas also need the
    [T1, T] remaining-variance and [t, T1] first-horizon variants.
    """
    b = params.barrier_b
    if x < b:
        raise DomainError(f"x={x} is below the barrier {b}")
    if x == b:
        return 0.0
    d1 = d_fn(x / b, t, T1, T, params)
    d2 = d_fn(b / x, t, T1, T, params)
    w = analytics.norm_cdf(d1) - (x / b) * analytics.norm_cdf(d2)
    return min(1.0, max(0.0, w))


def survival_w(x: float, t: float, spec: BondSpec,
               params: model.ModelParams) -> float:
    """No-default probability of the straight bond, strictly increasing in x."""
    if t >= spec.maturity_T:
        raise InvalidTenor(f"t={t} must precede maturity {spec.maturity_T}")
    return survival_curve(x, t, spec.maturity_T, spec.maturity_T, params)


def bond_price(state: model.MarketState, spec: BondSpec,
               params: model.ModelParams) -> BondPriceResult:
    """Straight-bond price C = [R + (1-R) W(V/Z, t)] * Z(r, t)."""
    T = spec.maturity_T
    if state.t > T:
        raise InvalidTenor(f"t={state.t} is after maturity {T}")
    if state.t == T:
        return BondPriceResult(price=1.0, z=1.0, x=state.v, w=1.0,
                               total_variance=0.0)
    z = model.zcb_price(state.r, state.t, T, params)
    x = state.v / z
    if x <= params.barrier_b:
        raise BelowBarrier(
            f"V/Z={x} at or below barrier {params.barrier_b}; position is "
            "defaulted and worth R*Z")
    w = survival_w(x, state.t, spec, params)
    total_variance = model.cum_variance(state.t, T, T, params)
    recovery = params.recovery_r
    price = (recovery + (1.0 - recovery) * w) * z
    return BondPriceResult(price=price, z=z, x=x, w=w,
                           total_variance=total_variance)
