"""European put and call options on the credit-risky bond.

Both options expire at T1 with strike E * Z(r, T1) and knock out worthless
if the issuer defaults first.  Exercise is decided by the firm-value ratio
x = V/Z against the constant boundary L solving R + (1-R) W(L) = E, and the
prices follow from bivariate-normal closed forms.  Put-call parity ties the
two prices to the survival functionals, which we verify at the end.
"""

import numpy as np

from credbond import (
    BondSpec,
    MarketState,
    ModelParams,
    OptionSpec,
    call_price,
    find_boundary_l,
    put_call_parity_gap,
    put_price,
)

params = ModelParams(theta=1.0, mu=0.05, s_r=0.01, s_V=0.2, rho=-0.3,
                     barrier_b=0.6, recovery_r=0.4)
bond = BondSpec(maturity_T=2.0)
option = OptionSpec(expiry_T1=1.0, exercise_e=0.9)
state = MarketState(r=0.05, v=1.0, t=0.0)

L = find_boundary_l(option, bond, params)
print(f"early-redemption boundary L = {L:.6f} (barrier B = {params.barrier_b})")

put = put_price(state, option, bond, params)
call = call_price(state, option, bond, params)
print(f"put  price : {put.price:.6f}")
print(f"call price : {call.price:.6f}")

# moneyness profile: the put concentrates between the barrier and L,
# the call takes over above L
print("\n  V       put        call")
for v in np.linspace(0.60, 1.40, 9):
    st = MarketState(r=state.r, v=float(v), t=state.t)
    if v / put.z <= params.barrier_b:
        print(f"{v:5.2f}   knocked out (default)")
        continue
    p = put_price(st, option, bond, params).price
    c = call_price(st, option, bond, params).price
    print(f"{v:5.2f}   {p:.6f}   {c:.6f}")

gap = put_call_parity_gap(state, option, bond, params)
print(f"\nput-call parity gap: {gap:.2e} (zero up to roundoff)")
