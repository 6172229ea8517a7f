"""Price a credit-risky zero-coupon bond and inspect its credit spread.

The firm defaults the first time its value V falls to B * Z(r, t), where Z
is the risk-free discount bond; the holder then receives the recovery
fraction R of Z.  The closed form prices the bond as

    C = [R + (1 - R) * W(V/Z, t)] * Z(r, t)

with W the no-default probability in discount-bond units.
"""

import math

import numpy as np

from credbond import BondSpec, MarketState, ModelParams, bond_price

params = ModelParams(theta=1.0, mu=0.05, s_r=0.01, s_V=0.2, rho=-0.3,
                     barrier_b=0.6, recovery_r=0.4)
bond = BondSpec(maturity_T=2.0)
state = MarketState(r=0.05, v=1.0, t=0.0)

res = bond_price(state, bond, params)
print(f"risk-free bond Z       : {res.z:.6f}")
print(f"credit-risky bond C    : {res.price:.6f}")
print(f"survival probability W : {res.w:.6f}")

# the continuously compounded credit spread over the risk-free curve
tau = bond.maturity_T - state.t
spread = -math.log(res.price / res.z) / tau
print(f"credit spread          : {1e4 * spread:.1f} bp")

# leverage is the main driver: walk the firm value toward the barrier
print("\n  V      price    spread(bp)")
for v in np.linspace(1.4, 0.60, 9):
    st = MarketState(r=state.r, v=float(v), t=state.t)
    if v / res.z <= params.barrier_b:
        print(f"{v:5.2f}   defaulted (worth R*Z = {params.recovery_r * res.z:.4f})")
        continue
    r = bond_price(st, bond, params)
    s = -math.log(r.price / r.z) / tau
    print(f"{v:5.2f}   {r.price:.6f}   {1e4 * s:8.1f}")
