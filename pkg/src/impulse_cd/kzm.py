"""
Linear ramps, adiabatic-impulse crossover times and Kibble-Zurek scaling.

All ramps are symmetric: the field crosses its critical value exactly at the
midpoint ``tau_q / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .numerics import NumericsError, bisect_root

DEFAULT_STEEPNESS_LZ = 400.0
DEFAULT_STEEPNESS_TFIM = 100.0


@dataclass(frozen=True)
class RampSchedule:
    """Linear drive ``g(t) = g0 + 2 (g_c - g0) t / tau_q``."""

    g0: float
    g_c: float
    tau_q: float

    def __post_init__(self):
        if not self.tau_q > 0:
            raise ValueError(f"tau_q must be positive, got {self.tau_q}")
        if self.g_c == self.g0:
            raise ValueError("g0 must differ from g_c")

    @property
    def g_d(self) -> float:
        return 2.0 * (self.g_c - self.g0)

    @property
    def g_final(self) -> float:
        return 2.0 * self.g_c - self.g0

    def value(self, t):
        if np.ndim(t) == 0:
            if t == 0.5 * self.tau_q:
                return float(self.g_c)
            return self.g0 + self.g_d * t / self.tau_q
        t = np.asarray(t, dtype=float)
        return np.where(t == 0.5 * self.tau_q, self.g_c, self.g0 + self.g_d * t / self.tau_q)

    @property
    def rate(self) -> float:
        return self.g_d / self.tau_q


def ramp_value(s: RampSchedule, t):
    return s.value(t)


def ramp_rate(s: RampSchedule) -> float:
    return s.rate


@dataclass(frozen=True)
class ImpulseWindow:
    t_minus: float
    t_plus: float

    @property
    def half_width(self) -> float:
        return 0.5 * (self.t_plus - self.t_minus)

    @property
    def width(self) -> float:
        return self.t_plus - self.t_minus

    @classmethod
    def centred(cls, tau_q: float, half_width: float) -> "ImpulseWindow":
        half_width = min(max(half_width, 0.0), 0.5 * tau_q)
        return cls(0.5 * tau_q - half_width, 0.5 * tau_q + half_width)

    def as_dict(self) -> dict:
        return {"t_minus": self.t_minus, "t_plus": self.t_plus}


@dataclass(frozen=True)
class ScalingExponents:
    nu: float
    z: float
    tau0: float
    xi0: float = 1.0
    d: int = 1

    def __post_init__(self):
        if min(self.nu, self.z, self.tau0, self.xi0) <= 0:
            raise ValueError("nu, z, tau0 and xi0 must be positive")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("d must be a positive integer")

    @property
    def freeze_out_exponent(self) -> float:
        zn = self.z * self.nu
        return zn / (1.0 + zn)


def impulse_window_generic(s: RampSchedule, gap: Callable[[float], float]) -> ImpulseWindow:
    """
    Solve ``1 / gap(g(t)) = tau_q / 2 - t`` for the crossover time on the
    first half of the ramp by bisection.

    If the relaxation time exceeds the distance to the midpoint over the whole
    first half the full ramp is impulsive and ``(0, tau_q)`` is returned; if it
    is shorter everywhere the window collapses to the midpoint.
    """
    half = 0.5 * s.tau_q

    def residual(t: float) -> float:
        gamma = gap(s.value(t))
        if not math.isfinite(gamma):
            raise NumericsError(f"non-finite gap at t={t!r}")
        return 1.0 / gamma - (half - t)

    r0 = residual(0.0)
    # just below the midpoint the distance term vanishes, so r > 0 unless the gap is huge
    t_hi = half * (1.0 - 1e-15)
    r_hi = residual(t_hi)
    if r0 >= 0.0:
        return ImpulseWindow(0.0, s.tau_q)
    if r_hi <= 0.0:
        return ImpulseWindow(half, half)
    t_minus = bisect_root(residual, 0.0, t_hi, tol=1e-14 * half)
    return ImpulseWindow(t_minus, s.tau_q - t_minus)


def kzm_predicted_window(s: RampSchedule, e: ScalingExponents) -> ImpulseWindow:
    zn = e.z * e.nu
    half_width = e.tau0 ** (1.0 / (1.0 + zn)) * (s.tau_q / (2.0 * abs(s.g0 - s.g_c))) ** (zn / (1.0 + zn))
    return ImpulseWindow.centred(s.tau_q, half_width)


def correlation_length(s: RampSchedule, e: ScalingExponents) -> float:
    zn = e.z * e.nu
    return e.xi0 * (2.0 * e.tau0 * abs(s.g0 - s.g_c) / s.tau_q) ** (-e.nu / (1.0 + zn))


def defect_density(s: RampSchedule, e: ScalingExponents) -> float:
    return correlation_length(s, e) ** (-e.d)


def _logistic(x, m: float):
    # exp overflow for very negative arguments is the desired 0 limit
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-m * np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class SwitchingFunction:
    """Product of two logistic ramps gating the control over ``window``."""

    m: float
    window: ImpulseWindow

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("steepness m must be positive")

    def __call__(self, t):
        val = _logistic(np.asarray(t, dtype=float) - self.window.t_minus, self.m) * \
            _logistic(self.window.t_plus - np.asarray(t, dtype=float), self.m)
        return float(val) if np.ndim(val) == 0 else val


def switching_value(sw: SwitchingFunction, t):
    return sw(t)


def fit_freeze_out_exponent(samples: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of log(half-width) against log(tau_q)."""
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    arr = np.asarray(samples, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("tau_q and half-width samples must be positive")
    slope, _ = np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)
    return float(slope)
