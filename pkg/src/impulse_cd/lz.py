"""
Closed forms for the Landau-Zener two-level system ``H0 = delta*sx + g(t)*sz``.

The avoided crossing sits at ``g = 0`` so the symmetric ramp runs from ``g0``
to ``-g0``. Times are in units of ``1/delta`` when ``delta = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy import ndarray

from .kzm import ImpulseWindow, RampSchedule
from .numerics import SIGMA_X, SIGMA_Y, SIGMA_Z

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class LzParams:
    delta: float
    schedule: RampSchedule

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.schedule.g_c != 0:
            raise ValueError("Landau-Zener ramps cross at g_c = 0")

    @classmethod
    def create(cls, tau_q: float, g0: float = -10.0, delta: float = 1.0) -> "LzParams":
        return cls(delta, RampSchedule(g0=g0, g_c=0.0, tau_q=tau_q))

    @property
    def tau_q(self) -> float:
        return self.schedule.tau_q

    @property
    def g0(self) -> float:
        return self.schedule.g0

    @property
    def rate(self) -> float:
        return self.schedule.rate


def lz_hamiltonian(p: LzParams, t: float) -> ndarray:
    g = p.schedule.value(t)
    return p.delta * SIGMA_X + g * SIGMA_Z


def mixing_angle(p: LzParams, t):
    """theta with tan(theta) = -(g + sqrt(delta^2 + g^2)) / delta."""
    g = p.schedule.value(t)
    return np.arctan(-(g + np.hypot(p.delta, g)) / p.delta)


def lz_eigenstates(p: LzParams, t: float) -> Tuple[ndarray, ndarray]:
    """(ground, excited) as length-2 complex vectors."""
    th = mixing_angle(p, t)
    c, s = math.cos(th), math.sin(th)
    return np.array([c, s], dtype=complex), np.array([s, -c], dtype=complex)


def lz_ground_states(p: LzParams, times: ndarray) -> ndarray:
    th = mixing_angle(p, np.asarray(times, dtype=float))
    return np.stack([np.cos(th), np.sin(th)], axis=-1).astype(complex)


def lz_gap(p: LzParams, t: float) -> float:
    g = p.schedule.value(t)
    return 2.0 * math.hypot(g, p.delta)


def gap_of_field(p: LzParams, g: float) -> float:
    return 2.0 * math.hypot(g, p.delta)


def cd_amplitude(p: LzParams, t):
    """Coefficient of sigma_y in the counterdiabatic field (the angular rate of theta)."""
    g = p.schedule.value(t)
    return -p.rate * p.delta / (2.0 * (p.delta ** 2 + g * g))


def lz_cd_field(p: LzParams, t: float) -> ndarray:
    return cd_amplitude(p, t) * SIGMA_Y


def cd_norm(p: LzParams, t):
    """Frobenius norm of the counterdiabatic field, sqrt(2)|theta'|."""
    return SQRT2 * np.abs(cd_amplitude(p, t))


def lz_freeze_out_half_width(p: LzParams) -> float:
    """
    Root of ``1/gap(g(t)) = tau_q/2 - t`` for the linear ramp continued past
    ``t = 0``.

    This is the Kibble-Zurek half-width without reference to where the ramp
    starts, behaving as ``sqrt(tau_q/|g0|)/2`` for fast ramps and saturating at
    ``1/(2 delta)`` for slow ones. It may exceed ``tau_q/2``.
    """
    tq, d, g0 = p.tau_q, p.delta, p.g0
    if g0 >= 0:
        raise ValueError("the closed-form half-width assumes g0 < 0")
    # 0.5*sqrt((sqrt(a^2 + b^2) - a) / (2 g0^2)) rewritten without the cancellation
    a = (tq * d) ** 2
    b = 2.0 * abs(g0) * tq
    return tq / math.sqrt(2.0 * (a + math.hypot(a, b)))


def lz_impulse_half_width(p: LzParams) -> float:
    """Freeze-out half-width clamped to the ramp, so the window fits in ``[0, tau_q]``."""
    return min(lz_freeze_out_half_width(p), 0.5 * p.tau_q)


def lz_impulse_window(p: LzParams) -> ImpulseWindow:
    return ImpulseWindow.centred(p.tau_q, lz_impulse_half_width(p))


def lz_transition_probability(p: LzParams) -> float:
    """Asymptotic excitation probability exp(-pi delta^2 / |g'|)."""
    rate = abs(p.rate)
    if rate == 0:
        raise ValueError("ramp rate must be non-zero")
    return math.exp(-math.pi * p.delta ** 2 / rate)


def lz_cost_analytic(p: LzParams) -> float:
    return -SQRT2 / p.tau_q * math.atan(p.g0 / p.delta)


def lz_savings_analytic(p: LzParams, w: ImpulseWindow) -> Tuple[float, float]:
    """
    Savings for a control switched exactly on over ``w``.

    Returns
    -------
    (dE, dE / C)
    """
    g_minus = p.schedule.value(w.t_minus)
    a0 = math.atan(p.g0 / p.delta)
    d_e = SQRT2 / p.tau_q * (math.atan(g_minus / p.delta) - a0)
    return d_e, 1.0 - math.atan(g_minus / p.delta) / a0
