"""Puttable and callable bonds as straight bond plus/minus an embedded option.

The holder's put floors the bond at E * Z(r, T1) at the option date; the
issuer's call caps it there.  Both collapse to the straight bond once the
option date has passed.
"""

import numpy as np

from credbond import (
    BondSpec,
    MarketState,
    ModelParams,
    OptionSpec,
    bond_price,
    callable_bond_price,
    puttable_bond_price,
)

params = ModelParams(theta=1.0, mu=0.05, s_r=0.01, s_V=0.2, rho=-0.3,
                     barrier_b=0.6, recovery_r=0.4)
bond = BondSpec(maturity_T=2.0)
option = OptionSpec(expiry_T1=1.0, exercise_e=0.9)
state = MarketState(r=0.05, v=1.0, t=0.0)

straight = bond_price(state, bond, params).price
puttable = puttable_bond_price(state, option, bond, params)
callable_ = callable_bond_price(state, option, bond, params)
print(f"straight bond : {straight:.6f}")
print(f"puttable bond : {puttable:.6f}  (put protection worth "
      f"{puttable - straight:.6f})")
print(f"callable bond : {callable_:.6f}  (call concession worth "
      f"{straight - callable_:.6f})")

# the ordering callable <= straight <= puttable holds everywhere
print("\n  V      callable   straight   puttable")
for v in np.linspace(0.65, 1.40, 8):
    st = MarketState(r=state.r, v=float(v), t=state.t)
    s = bond_price(st, bond, params).price
    p = puttable_bond_price(st, option, bond, params)
    c = callable_bond_price(st, option, bond, params)
    assert c <= s <= p
    print(f"{v:5.2f}   {c:.6f}   {s:.6f}   {p:.6f}")
