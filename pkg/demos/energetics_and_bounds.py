"""
What the control costs and what the switch saves
=================================================

The cost of a control field is its time-averaged norm. For a linear ramp the
exact counterdiabatic field already meets the lower bound set by the
adiabatic gauge potential. The impulse-gated field saves a share of that
cost. The share vanishes for very fast ramps and grows towards one for slow
ramps.
"""

from impulse_cd import lz, tfim
from impulse_cd.protocol import ControlMode, LzModel, TfimMomentumModel, cost_lower_bound, cost_numeric, energetics

for model in (LzModel(lz.LzParams.create(5.0)), TfimMomentumModel(tfim.TfimParams.create(8, 10.0))):
    c = cost_numeric(model)
    print(f"{model.name:14s} C = {c:.10f}, lower bound = {cost_lower_bound(model):.10f}")

print("\nLandau-Zener saving versus ramp time")
print("tau_q      deltaE/C (numeric)   deltaE/C (step switch)")
for tau in (0.1, 1.0, 5.0, 25.0, 100.0, 136.0, 400.0):
    model = LzModel(lz.LzParams.create(tau))
    report = energetics(model, ControlMode.impulse(), lower_bound=False)
    print(f"{tau:7.1f}    {report.ratio:.5f}              {report.analytic['ratio_step']:.5f}")

# Once the window half-width saturates at 1/(2 delta) the saved fraction is
# about 1 - (|g0| / tau_q) / arctan(|g0| / delta), which approaches one only
# slowly.
