"""Pricing of credit-risky zero-coupon, puttable and callable bonds under a
two-factor structural model (Vasicek short rate + lognormal firm value)."""

from .model import ModelParams, MarketState
from .bond import BondSpec, BondPriceResult, bond_price, survival_w, d_fn
from .options import (
    OptionSpec,
    OptionPriceResult,
    find_boundary_l,
    put_price,
    call_price,
    put_call_parity_gap,
    puttable_bond_price,
    callable_bond_price,
)
from .oracles import GridConfig, GridSolution, McEstimate, cn_solve, mc_forward, mc_spot

__all__ = [
    "ModelParams",
    "MarketState",
    "BondSpec",
    "BondPriceResult",
    "bond_price",
    "survival_w",
    "d_fn",
    "OptionSpec",
    "OptionPriceResult",
    "find_boundary_l",
    "put_price",
    "call_price",
    "put_call_parity_gap",
    "puttable_bond_price",
    "callable_bond_price",
    "GridConfig",
    "GridSolution",
    "McEstimate",
    "cn_solve",
    "mc_forward",
    "mc_spot",
]

__version__ = "0.1.0"
