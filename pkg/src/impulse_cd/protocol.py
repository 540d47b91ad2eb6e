"""
Controlled evolutions ``H0 + c(t) H_CD`` and their figures of merit.

``c(t)`` is 0 (uncontrolled), 1 (full control) or a logistic switching
function over an impulse window. Each model adapter knows its Hamiltonian
pieces, instantaneous ground states and the norm convention for the
control field; :func:`run_protocol` does the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from numpy import ndarray

from . import lz, tfim
from .kzm import (
    DEFAULT_STEEPNESS_LZ,
    DEFAULT_STEEPNESS_TFIM,
    ImpulseWindow,
    RampSchedule,
    SwitchingFunction,
)
from .numerics import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    NumericsError,
    integrate,
    propagate,
    vectorized,
)

DEFAULT_SAMPLES = 1000
COST_REL_TOL = 1e-10
DEGENERACY_TOL = 1e-12

NONE, FULL, IMPULSE, WINDOW = "none", "full", "impulse", "window"


@dataclass(frozen=True)
class ControlMode:
    """
    How the counterdiabatic field is gated.

    ``kind`` is one of ``"none"``, ``"full"``, ``"impulse"`` or ``"window"``
    (fixed half-width ``eta`` about the midpoint). ``m`` overrides the model's
    default switching steepness and ``window`` overrides the impulse window.
    """

    kind: str
    eta: Optional[float] = None
    m: Optional[float] = None
    window: Optional[ImpulseWindow] = None

    def __post_init__(self):
        if self.kind not in (NONE, FULL, IMPULSE, WINDOW):
            raise ValueError(f"unknown control mode {self.kind!r}")
        if self.kind == WINDOW and (self.eta is None or self.eta < 0):
            raise ValueError("window mode needs eta >= 0")
        if self.m is not None and not self.m > 0:
            raise ValueError("steepness m must be positive")

    @classmethod
    def uncontrolled(cls) -> "ControlMode":
        return cls(NONE)

    @classmethod
    def full(cls) -> "ControlMode":
        return cls(FULL)

    @classmethod
    def impulse(cls, m: Optional[float] = None, window: Optional[ImpulseWindow] = None) -> "ControlMode":
        return cls(IMPULSE, m=m, window=window)

    @classmethod
    def fixed_window(cls, eta: float, m: Optional[float] = None) -> "ControlMode":
        return cls(WINDOW, eta=eta, m=m)

    @property
    def kappa(self) -> int:
        return {NONE: 0, FULL: 1, IMPULSE: 2, WINDOW: 2}[self.kind]


@dataclass
class SimulationTrace:
    times: ndarray
    fidelity: ndarray
    switching: ndarray
    norm_drift: ndarray
    window: Optional[ImpulseWindow] = None
    states: Optional[ndarray] = field(default=None, repr=False)

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelity[-1])

    @property
    def infidelity(self) -> float:
        return 1.0 - self.final_fidelity

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(self.norm_drift))


@dataclass
class CostReport:
    cost: float
    delta_e: float
    ratio: float
    lower_bound: Optional[float] = None
    analytic: Dict[str, float] = field(default_factory=dict)


# --- models -----------------------------------------------------------------

class LzModel:
    """Landau-Zener two-level system."""

    name = "lz"

    def __init__(self, params: lz.LzParams):
        self.params = params
        self.schedule = params.schedule
        self.energy_scale = params.delta
        self.default_steepness = DEFAULT_STEEPNESS_LZ / params.delta

    def impulse_window(self) -> ImpulseWindow:
        return lz.lz_impulse_window(self.params)

    def initial_state(self) -> ndarray:
        return lz.lz_eigenstates(self.params, 0.0)[0]

    def hamiltonian(self, t: float) -> ndarray:
        return lz.lz_hamiltonian(self.params, t)

    def cd_field(self, t: float) -> ndarray:
        return lz.lz_cd_field(self.params, t)

    def generator(self, coeff: Callable[[float], float]):
        p = self.params
        sx = p.delta * SIGMA_X

        @vectorized
        def gen(t):
            g = np.asarray(p.schedule.value(t))[..., None, None]
            c = np.asarray(coeff(t) * lz.cd_amplitude(p, t))[..., None, None]
            return sx + g * SIGMA_Z + c * SIGMA_Y
        return gen

    def fidelity(self, times: ndarray, states: ndarray) -> ndarray:
        ground = lz.lz_ground_states(self.params, times)
        return np.abs(np.sum(ground.conj() * states, axis=-1)) ** 2

    def norm_drift(self, states: ndarray) -> ndarray:
        return np.abs(np.sum(np.abs(states) ** 2, axis=-1) - 1.0)

    def cd_norm(self, t: float) -> float:
        return float(lz.cd_norm(self.params, t))

    def bound_blocks(self, g: float) -> List[Tuple[ndarray, ndarray]]:
        return [(self.params.delta * SIGMA_X + g * SIGMA_Z, SIGMA_Z)]

    def analytic(self, window: Optional[ImpulseWindow]) -> Dict[str, float]:
        p = self.params
        out = {
            "C": lz.lz_cost_analytic(p),
            "transition_probability": lz.lz_transition_probability(p),
            "uncontrolled_final_fidelity": 1.0 - lz.lz_transition_probability(p),
            "mu": lz.lz_impulse_half_width(p),
        }
        if window is not None:
            out["deltaE_step"], out["ratio_step"] = lz.lz_savings_analytic(p, window)
        return out


class TfimMomentumModel:
    """Ising ring as ``N/2`` independent momentum-space two-level systems."""

    name = "tfim-momentum"

    def __init__(self, params: tfim.TfimParams):
        self.params = params
        self.schedule = params.schedule
        self.energy_scale = params.omega
        self.default_steepness = DEFAULT_STEEPNESS_TFIM / params.omega
        self.k = tfim.momentum_values(params)
        kb = self.k * params.b
        self._hx = (2.0 * params.omega * np.sin(kb))[:, None, None] * SIGMA_X
        self._cos = np.cos(kb)[:, None, None]

    def impulse_window(self) -> ImpulseWindow:
        return tfim.tfim_impulse_window(self.params)

    def initial_state(self) -> ndarray:
        return tfim.subspace_ground_states(self.params, 0.0)

    def hamiltonian(self, t: float) -> ndarray:
        return tfim.subspace_hamiltonians(self.params, t)

    def cd_field(self, t: float) -> ndarray:
        return tfim.cd_rates(self.params, t)[:, None, None] * SIGMA_Y

    def generator(self, coeff: Callable[[float], float]):
        p = self.params
        hx, cos, two_omega = self._hx, self._cos, 2.0 * p.omega
        sin = np.sin(self.k * p.b)[:, None, None]

        @vectorized
        def gen(t):
            g = np.asarray(p.schedule.value(t))[..., None, None, None]
            c = np.asarray(coeff(t))[..., None, None, None]
            rates = c * p.rate * sin / (2.0 * (g * g - 2.0 * g * cos + 1.0))
            return hx - (two_omega * (g - cos)) * SIGMA_Z + rates * SIGMA_Y
        return gen

    def fidelity(self, times: ndarray, states: ndarray) -> ndarray:
        ground = tfim.subspace_ground_states(self.params, times)
        overlaps = np.sum(ground.conj() * states, axis=-1)
        return np.abs(np.prod(overlaps, axis=-1)) ** 2

    def norm_drift(self, states: ndarray) -> ndarray:
        norms = np.prod(np.sum(np.abs(states) ** 2, axis=-1), axis=-1)
        return np.abs(norms - 1.0)

    def cd_norm(self, t: float) -> float:
        return float(tfim.cd_norm_sum(self.params, t))

    def bound_blocks(self, g: float) -> List[Tuple[ndarray, ndarray]]:
        hx, hz = tfim._fields(self.params, self.k, g)
        dh = -2.0 * self.params.omega * SIGMA_Z
        return [(x * SIGMA_X - z * SIGMA_Z, dh) for x, z in zip(hx, hz)]

    def analytic(self, window: Optional[ImpulseWindow]) -> Dict[str, float]:
        p = self.params
        out = {"C": tfim.tfim_cost_analytic(p), "lowest_mode_estimate": tfim.lowest_mode_lz_estimate(p)}
        if window is not None:
            out["deltaE_step"], out["ratio_step"] = tfim.tfim_savings_analytic(p, window)
            out["deltaE_thermo"], out["ratio_thermo"] = tfim.tfim_savings_thermo(p, window)
        return out


class TfimSpinModel:
    """
    Dense spin-basis Ising ring with a range-truncated control field.

    The control cost uses the Frobenius norm of the dense truncated field on
    the full ``2^N`` space. No gauge-potential lower bound is offered: on the
    full space the bare coupling term is massively degenerate near ``g = 0``
    and unrelated symmetry sectors cross along the ramp.
    """

    name = "tfim-spin"

    def __init__(self, params: tfim.TfimParams, truncation: int):
        tfim._check_spin_size(params.n)
        if not 1 <= truncation <= params.n // 2:
            raise ValueError(f"truncation M must lie in [1, N/2], got {truncation}")
        self.params = params
        self.truncation = truncation
        self.schedule = params.schedule
        self.energy_scale = params.omega
        self.default_steepness = DEFAULT_STEEPNESS_TFIM / params.omega
        self._field, self._bond = tfim.spin_hamiltonian_parts(params)
        self._ranges = [tfim.cd_range_operator(params.n, m) for m in range(1, truncation + 1)]
        self._gram = np.array([[np.vdot(a, b).real for b in self._ranges] for a in self._ranges])

    def impulse_window(self) -> ImpulseWindow:
        return tfim.tfim_impulse_window(self.params)

    def ground_state(self, t: float) -> ndarray:
        return tfim.even_parity_ground_state(self.hamiltonian(t), self.params.n)[1]

    def initial_state(self) -> ndarray:
        return self.ground_state(0.0)

    def hamiltonian(self, t: float) -> ndarray:
        return self.params.schedule.value(t) * self._field + self._bond

    def _cd_coefficients(self, t) -> ndarray:
        """Range coefficients along the last axis, shape ``(..., M)``."""
        g = self.params.schedule.value(t)
        return -self.params.rate * tfim.range_weights(self.params, self.truncation, g)

    def cd_field(self, t: float) -> ndarray:
        return sum(c * op for c, op in zip(self._cd_coefficients(t), self._ranges))

    def generator(self, coeff: Callable[[float], float]):
        # per-step assembly as one real-weighted combination of stacked operators;
        # batching 2^N x 2^N matrices over time costs more than it saves
        dim = 1 << self.params.n
        pieces = np.stack([self._field, self._bond, *self._ranges])
        basis = pieces.view(float).reshape(len(pieces), -1)
        weights = np.zeros(len(pieces))
        weights[1] = 1.0

        def gen(t):
            weights[0] = self.params.schedule.value(t)
            weights[2:] = coeff(t) * self._cd_coefficients(t)
            return (weights @ basis).view(complex).reshape(dim, dim)
        return gen

    def fidelity(self, times: ndarray, states: ndarray) -> ndarray:
        return np.array([abs(np.vdot(self.ground_state(t), s)) ** 2 for t, s in zip(times, states)])

    def norm_drift(self, states: ndarray) -> ndarray:
        return np.abs(np.sum(np.abs(states) ** 2, axis=-1) - 1.0)

    def parity(self, states: ndarray) -> ndarray:
        par = tfim.parity_operator(self.params.n)
        return np.einsum("ti,ij,tj->t", states.conj(), par, states).real

    def cd_norm(self, t: float) -> float:
        c = self._cd_coefficients(t)
        return float(math.sqrt(max(c @ self._gram @ c, 0.0)))

    def analytic(self, window: Optional[ImpulseWindow]) -> Dict[str, float]:
        return {}


# --- protocol ---------------------------------------------------------------

def default_steps(model) -> int:
    return max(20000, math.ceil(4000.0 * model.schedule.tau_q * model.energy_scale))


def mode_window(model, mode: ControlMode) -> Optional[ImpulseWindow]:
    if mode.kind == IMPULSE:
        return mode.window if mode.window is not None else model.impulse_window()
    if mode.kind == WINDOW:
        tau = model.schedule.tau_q
        if mode.eta > 0.5 * tau:
            raise ValueError(f"eta must lie in [0, tau_q/2], got {mode.eta}")
        return ImpulseWindow.centred(tau, mode.eta)
    return None


def control_coefficient(model, mode: ControlMode) -> Callable[[float], float]:
    """The time-dependent prefactor of the control field for ``mode``."""
    if mode.kind in (NONE, FULL):
        level = 0.0 if mode.kind == NONE else 1.0
        return lambda t: np.full(np.shape(t), level) if np.ndim(t) else level
    sw = SwitchingFunction(mode.m if mode.m is not None else model.default_steepness, mode_window(model, mode))
    return sw


def assemble_hamiltonian(model, mode: ControlMode, t: float) -> ndarray:
    c = control_coefficient(model, mode)(t)
    h = model.hamiltonian(t)
    return h if c == 0 else h + c * model.cd_field(t)


def cost_numeric(model, rel_tol: float = COST_REL_TOL) -> float:
    tau = model.schedule.tau_q
    return integrate(model.cd_norm, 0.0, tau, rel_tol=rel_tol, breakpoints=(0.5 * tau,)) / tau


def savings_numeric(model, switching: Callable[[float], float], rel_tol: float = COST_REL_TOL,
                    window: Optional[ImpulseWindow] = None) -> float:
    tau = model.schedule.tau_q
    marks = [0.5 * tau]
    if window is not None:
        marks += [window.t_minus, window.t_plus]

    def integrand(t):
        return (1.0 - switching(t)) * model.cd_norm(t)
    return integrate(integrand, 0.0, tau, rel_tol=rel_tol, breakpoints=marks) / tau


def _block_weight(h: ndarray, dh: ndarray) -> Tuple[float, int]:
    """
    Frobenius norm of the adiabatic gauge potential of one block, and the
    number of degenerate level clusters met.

    Inside a degenerate cluster the eigenbasis is arbitrary, so ``dh`` is
    first diagonalised there; pairs within a cluster then carry no weight.
    """
    w, v = np.linalg.eigh(h)
    scale = max(1.0, float(np.max(np.abs(w))))
    clusters = np.split(np.arange(len(w)), np.nonzero(np.diff(w) >= DEGENERACY_TOL * scale)[0] + 1)
    flagged = 0
    for idx in clusters:
        if len(idx) > 1:
            flagged += 1
            sub = v[:, idx]
            _, rot = np.linalg.eigh(sub.conj().T @ dh @ sub)
            v[:, idx] = sub @ rot
    num = v.conj().T @ dh @ v
    gaps = w[None, :] - w[:, None]
    cluster_id = np.repeat(np.arange(len(clusters)), [len(c) for c in clusters])
    keep = cluster_id[:, None] != cluster_id[None, :]
    return float(np.sqrt(np.sum(np.abs(num[keep] / gaps[keep]) ** 2))), flagged


def gauge_weight(model, g: float) -> float:
    """W[g]; summed over independent blocks to match the per-mode norm convention."""
    return sum(_block_weight(h, dh)[0] for h, dh in model.bound_blocks(g))


def degenerate_clusters(model, g: float) -> int:
    """Number of degenerate level clusters met when evaluating W at ``g``."""
    return sum(_block_weight(h, dh)[1] for h, dh in model.bound_blocks(g))


def cost_lower_bound(model, rel_tol: float = COST_REL_TOL) -> float:
    s: RampSchedule = model.schedule
    lo, hi = sorted((s.g0, s.g_final))
    bound = integrate(lambda g: gauge_weight(model, g), lo, hi, rel_tol=rel_tol, breakpoints=(s.g_c,))
    return bound / s.tau_q


def run_protocol(
    model,
    mode: ControlMode,
    steps: Optional[int] = None,
    samples: int = DEFAULT_SAMPLES,
    costs: bool = True,
    lower_bound: bool = True,
) -> Tuple[SimulationTrace, Optional[CostReport]]:
    """
    Evolve from the instantaneous ground state at ``t = 0`` to ``tau_q``.

    Returns the sampled fidelity trace and, if ``costs``, the energetics of the
    control field (full-control cost and the savings of this mode's gating).
    """
    tau = model.schedule.tau_q
    coeff = control_coefficient(model, mode)
    window = mode_window(model, mode)
    steps = default_steps(model) if steps is None else steps
    out = propagate(model.generator(coeff), model.initial_state(), 0.0, tau, steps, samples=samples)
    times = np.array([t for t, _ in out])
    states = np.array([psi for _, psi in out])
    trace = SimulationTrace(
        times=times,
        fidelity=model.fidelity(times, states),
        switching=np.broadcast_to(coeff(times), times.shape).astype(float),
        norm_drift=model.norm_drift(states),
        window=window,
        states=states,
    )
    if not costs:
        return trace, None
    report = energetics(model, mode, lower_bound=lower_bound)
    return trace, report


def energetics(model, mode: ControlMode, lower_bound: bool = True) -> CostReport:
    coeff = control_coefficient(model, mode)
    window = mode_window(model, mode)
    c = cost_numeric(model)
    if mode.kind == FULL:
        d_e = 0.0
    elif mode.kind == NONE:
        d_e = c
    else:
        d_e = savings_numeric(model, coeff, window=window)
    return CostReport(
        cost=c,
        delta_e=d_e,
        ratio=d_e / c if c > 0 else 0.0,
        lower_bound=cost_lower_bound(model) if lower_bound and hasattr(model, "bound_blocks") else None,
        analytic=model.analytic(window if window is not None else model.impulse_window()),
    )
