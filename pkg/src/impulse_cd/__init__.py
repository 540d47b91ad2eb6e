"""Counterdiabatic driving switched on only inside the Kibble-Zurek impulse window."""

from .kzm import (
    ImpulseWindow,
    RampSchedule,
    ScalingExponents,
    SwitchingFunction,
    correlation_length,
    defect_density,
    fit_freeze_out_exponent,
    impulse_window_generic,
    kzm_predicted_window,
    ramp_rate,
    ramp_value,
    switching_value,
)
from .lz import LzParams
from .protocol import (
    ControlMode,
    CostReport,
    LzModel,
    SimulationTrace,
    TfimMomentumModel,
    TfimSpinModel,
    assemble_hamiltonian,
    cost_lower_bound,
    cost_numeric,
    run_protocol,
    savings_numeric,
)
from .tfim import TfimParams

__version__ = "0.1.0"
