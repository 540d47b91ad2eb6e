"""
Transverse-field Ising ring ``H0 = -omega * sum_i [g sx_i + sz_i sz_{i+1}]``.

Two representations are provided:

* the momentum picture, where the even-parity sector decouples into ``N/2``
  two-level systems labelled by ``k_n = pi (2n - 1) / N`` (exact, cheap);
* the dense spin basis (``N <= 10``), which also carries the range-truncated
  counterdiabatic field built from Pauli strings.

Site ``i`` is the ``i``-th tensor factor (most significant bit first) and
``|0>`` is the +1 eigenstate of ``sz``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy import ndarray

from .kzm import ImpulseWindow, RampSchedule
from .numerics import SIGMA_X, SIGMA_Y, SIGMA_Z, ContractViolation, integrate

SQRT2 = math.sqrt(2.0)
MAX_SPIN_SITES = 10


@dataclass(frozen=True)
class TfimParams:
    n: int
    omega: float
    schedule: RampSchedule
    b: float = 1.0

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError(f"N must be a positive even integer, got {self.n}")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.schedule.g_c != 1:
            raise ValueError("the Ising critical point is g_c = 1")

    @classmethod
    def create(cls, n: int, tau_q: float, g0: float = 0.0, omega: float = 1.0) -> "TfimParams":
        return cls(n, omega, RampSchedule(g0=g0, g_c=1.0, tau_q=tau_q))

    @property
    def tau_q(self) -> float:
        return self.schedule.tau_q

    @property
    def g0(self) -> float:
        return self.schedule.g0

    @property
    def rate(self) -> float:
        return self.schedule.rate


@dataclass(frozen=True)
class MomentumMode:
    index: int
    k: float


KLike = Union[MomentumMode, float]


def _k(k: KLike) -> float:
    return k.k if isinstance(k, MomentumMode) else float(k)


def momentum_modes(p: TfimParams) -> List[MomentumMode]:
    if p.n % 2:
        raise ValueError("N must be even")
    return [MomentumMode(i, math.pi * (2 * i - 1) / (p.n * p.b)) for i in range(1, p.n // 2 + 1)]


def momentum_values(p: TfimParams) -> ndarray:
    return np.array([m.k for m in momentum_modes(p)])


# --- momentum picture -------------------------------------------------------

def _fields(p: TfimParams, k, g):
    kb = np.asarray(k) * p.b
    hz = 2.0 * p.omega * (g - np.cos(kb))
    hx = 2.0 * p.omega * np.sin(kb)
    return hx, hz


def subspace_hamiltonian(p: TfimParams, k: KLike, t: float) -> ndarray:
    hx, hz = _fields(p, _k(k), p.schedule.value(t))
    return hx * SIGMA_X - hz * SIGMA_Z


def subspace_hamiltonians(p: TfimParams, t: float) -> ndarray:
    """All ``N/2`` subspace Hamiltonians stacked along axis 0."""
    hx, hz = _fields(p, momentum_values(p), p.schedule.value(t))
    return hx[:, None, None] * SIGMA_X - hz[:, None, None] * SIGMA_Z


def subspace_gap(p: TfimParams, k: KLike, t: float) -> float:
    g = p.schedule.value(t)
    kb = _k(k) * p.b
    return 4.0 * p.omega * math.sqrt(g * g - 2.0 * g * math.cos(kb) + 1.0)


def approximate_lowest_gap(p: TfimParams, t: float) -> float:
    return 4.0 * p.omega * abs(p.schedule.value(t) - 1.0)


def tfim_impulse_window(p: TfimParams) -> ImpulseWindow:
    """Crossover times from the linearised lowest gap, clamped to the ramp."""
    if p.g0 >= 1:
        raise ValueError("the crossover formula assumes g0 < 1")
    return ImpulseWindow.centred(p.tau_q, math.sqrt(p.tau_q / (8.0 * p.omega * (1.0 - p.g0))))


def cd_rates(p: TfimParams, t, k=None):
    """Coefficient of sigma_y in each subspace counterdiabatic field."""
    if k is None:
        k = momentum_values(p)
    g = p.schedule.value(t)
    kb = np.asarray(k) * p.b
    return p.rate * np.sin(kb) / (2.0 * (g * g - 2.0 * g * np.cos(kb) + 1.0))


def subspace_cd_field(p: TfimParams, k: KLike, t: float) -> ndarray:
    return float(cd_rates(p, t, _k(k))) * SIGMA_Y


def subspace_ground_states(p: TfimParams, t, k=None) -> ndarray:
    """
    Ground state of each subspace, ``cos(th)|0> + sin(th)|1>`` with
    ``tan(th) = (hz - sqrt(hx^2 + hz^2)) / hx``.

    Output shape is ``(..., n_modes, 2)`` for ``t`` of shape ``(...)``.
    """
    if k is None:
        k = momentum_values(p)
    g = np.asarray(p.schedule.value(t), dtype=float)[..., None]
    hx, hz = _fields(p, k, g)
    th = np.arctan((hz - np.hypot(hx, hz)) / hx)
    return np.stack([np.cos(th), np.sin(th)], axis=-1).astype(complex)


def cd_norm_sum(p: TfimParams, t) -> ndarray:
    """Sum over modes of the per-mode Frobenius norm sqrt(2)|theta_k'|."""
    t = np.asarray(t, dtype=float)
    rates = cd_rates(p, t[..., None])
    return SQRT2 * np.sum(np.abs(rates), axis=-1)


def lowest_mode_lz_estimate(p: TfimParams) -> float:
    rate = abs(p.rate)
    if rate == 0:
        raise ValueError("ramp rate must be non-zero")
    return 1.0 - math.exp(-(2.0 * math.pi * p.omega / rate) * math.sin(math.pi / p.n) ** 2)


def momentum_evolve(p: TfimParams, mode, **kwargs):
    """Momentum-picture protocol run; see :func:`impulse_cd.protocol.run_protocol`."""
    from .protocol import TfimMomentumModel, run_protocol

    trace, _ = run_protocol(TfimMomentumModel(p), mode, **kwargs)
    return trace


# --- spin basis -------------------------------------------------------------

@dataclass(frozen=True)
class PauliString:
    """``coefficient * P_0 (x) P_1 (x) ...`` with ``labels`` over {I, X, Y, Z}."""

    coefficient: float
    labels: str

    def __post_init__(self):
        if set(self.labels) - set("IXYZ"):
            raise ValueError(f"bad Pauli labels {self.labels!r}")
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")

    @classmethod
    def from_sites(cls, n: int, ops: dict, coefficient: float = 1.0) -> "PauliString":
        """Build from ``{site: label}``; sites wrap modulo ``n``."""
        labels = ["I"] * n
        for site, op in ops.items():
            j = site % n
            if labels[j] != "I":
                raise ValueError(f"site {j} assigned twice")
            labels[j] = op
        return cls(coefficient, "".join(labels))

    def to_matrix(self) -> ndarray:
        return self.coefficient * _pauli_matrix(self.labels)


@lru_cache(maxsize=256)
def _pauli_matrix(labels: str) -> ndarray:
    n = len(labels)
    dim = 1 << n
    states = np.arange(dim)
    flip = 0
    amp = np.ones(dim, dtype=complex)
    for site, op in enumerate(labels):
        bit = n - 1 - site
        b = (states >> bit) & 1
        if op in "XY":
            flip |= 1 << bit
        if op == "Z":
            amp *= 1 - 2 * b
        elif op == "Y":
            amp *= 1j * (1 - 2 * b)
    out = np.zeros((dim, dim), dtype=complex)
    out[states ^ flip, states] = amp
    out.setflags(write=False)
    return out


def pauli_sum(strings: Sequence[PauliString]) -> ndarray:
    dim = 1 << len(strings[0].labels)
    out = np.zeros((dim, dim), dtype=complex)
    for s in strings:
        out += s.to_matrix()
    return out


def _check_spin_size(n: int):
    if n > MAX_SPIN_SITES:
        raise ValueError(f"dense spin basis limited to N <= {MAX_SPIN_SITES}, got {n}")


def field_strings(n: int, omega: float = 1.0) -> List[PauliString]:
    return [PauliString.from_sites(n, {i: "X"}, -omega) for i in range(n)]


def bond_strings(n: int, omega: float = 1.0) -> List[PauliString]:
    if n == 2:
        # both periodic bonds act on the same pair
        return [PauliString(-omega, "ZZ"), PauliString(-omega, "ZZ")]
    return [PauliString.from_sites(n, {i: "Z", i + 1: "Z"}, -omega) for i in range(n)]


@lru_cache(maxsize=32)
def _spin_parts(n: int) -> Tuple[ndarray, ndarray]:
    return pauli_sum(field_strings(n)), pauli_sum(bond_strings(n))


def spin_hamiltonian_parts(p: TfimParams) -> Tuple[ndarray, ndarray]:
    """(field part, bond part) so that ``H0 = g * field + bond``."""
    _check_spin_size(p.n)
    field, bond = _spin_parts(p.n)
    return p.omega * field, p.omega * bond


def spin_hamiltonian(p: TfimParams, t: float) -> ndarray:
    field, bond = spin_hamiltonian_parts(p)
    return p.schedule.value(t) * field + bond


@lru_cache(maxsize=16)
def parity_operator(n: int) -> ndarray:
    return _pauli_matrix("X" * n)


@lru_cache(maxsize=16)
def even_parity_basis(n: int) -> ndarray:
    """Isometry onto the +1 eigenspace of prod_i sx_i, shape (2^n, 2^(n-1))."""
    dim = 1 << n
    full = dim - 1
    reps = [s for s in range(dim) if s < (s ^ full)]
    v = np.zeros((dim, len(reps)), dtype=complex)
    for col, s in enumerate(reps):
        v[s, col] = v[s ^ full, col] = 1.0 / SQRT2
    v.setflags(write=False)
    return v


def even_parity_ground_state(h: ndarray, n: int, degeneracy_tol: float = 1e-10) -> Tuple[float, ndarray]:
    """Lowest eigenpair of ``h`` restricted to the even-parity sector."""
    v = even_parity_basis(n)
    w, u = np.linalg.eigh(v.conj().T @ h @ v)
    if w[1] - w[0] < degeneracy_tol * max(1.0, abs(w[0])):
        raise ContractViolation("even-parity ground level is degenerate")
    psi = v @ u[:, 0]
    k = np.argmax(np.abs(psi))
    psi *= abs(psi[k]) / psi[k]
    return float(w[0]), psi


def u_coefficient(m: int, g: float, n: int) -> float:
    """Range-``m`` weight (g^2m + g^N) / (8 g^(m+1) (1 + g^N)); its g -> 0 limit at g = 0."""
    if not 1 <= m <= n // 2:
        raise ValueError(f"range m must lie in [1, N/2], got {m}")
    if g < 0:
        raise ValueError("u_m is defined here for g >= 0")
    if g == 0:
        return 0.125 if m == 1 else 0.0
    return (g ** (2 * m) + g ** n) / (8.0 * g ** (m + 1) * (1.0 + g ** n))


def cd_range_strings(n: int, m: int) -> List[PauliString]:
    """
    Pauli strings of the range-``m`` counterdiabatic operator.

    The textbook form ``X_n Z..Z Y_{n+m} + Y_n Z..Z X_{n+m}`` belongs to the
    frame ``-sum[sx sx + g sz]``. Mapping it onto ``-sum[g sx + sz sz]``
    (pi about x, then back about y) sends it to
    ``-(Z_n X..X Y_{n+m} + Y_n X..X Z_{n+m})``, which commutes with the
    parity ``prod_i sx_i``.
    """
    if not 1 <= m <= n // 2:
        raise ValueError(f"range m must lie in [1, N/2], got {m}")
    sign = -1.0
    out = []
    for site in range(n):
        string = {site + j: "X" for j in range(1, m)}
        out.append(PauliString.from_sites(n, {site: "Z", **string, site + m: "Y"}, sign))
        out.append(PauliString.from_sites(n, {site: "Y", **string, site + m: "Z"}, sign))
    return out


@lru_cache(maxsize=64)
def cd_range_operator(n: int, m: int) -> ndarray:
    _check_spin_size(n)
    out = pauli_sum(cd_range_strings(n, m))
    out.setflags(write=False)
    return out


def _u_array(m: int, g: ndarray, n: int) -> ndarray:
    safe = np.where(g == 0, 1.0, g)
    val = (safe ** (2 * m) + safe ** n) / (8.0 * safe ** (m + 1) * (1.0 + safe ** n))
    return np.where(g == 0, 0.125 if m == 1 else 0.0, val)


def range_weights(p: TfimParams, truncation: int, g) -> ndarray:
    """
    Coefficients of the range operators ``m = 1..truncation`` (without the
    ``-g'`` prefactor), stacked on the last axis. The ``m = N/2`` range is
    half-weighted because each of its site pairs appears twice in the ring sum.
    """
    if not 1 <= truncation <= p.n // 2:
        raise ValueError(f"truncation M must lie in [1, N/2], got {truncation}")
    if np.ndim(g) == 0:
        return np.array([(0.5 if 2 * m == p.n else 1.0) * u_coefficient(m, float(g), p.n)
                         for m in range(1, truncation + 1)])
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise ValueError("u_m is defined here for g >= 0")
    cols = [(0.5 if 2 * m == p.n else 1.0) * _u_array(m, g, p.n) for m in range(1, truncation + 1)]
    return np.stack(cols, axis=-1)


def truncated_cd_field(p: TfimParams, truncation: int, t: float) -> ndarray:
    """Counterdiabatic field keeping interaction ranges up to ``truncation``."""
    _check_spin_size(p.n)
    g = p.schedule.value(t)
    out = np.zeros((1 << p.n, 1 << p.n), dtype=complex)
    for m, w in enumerate(range_weights(p, truncation, g), start=1):
        out += w * cd_range_operator(p.n, m)
    return -p.rate * out


def spin_evolve(p: TfimParams, mode, truncation: int, **kwargs):
    """Dense spin-basis protocol run; see :func:`impulse_cd.protocol.run_protocol`."""
    from .protocol import TfimSpinModel, run_protocol

    trace, _ = run_protocol(TfimSpinModel(p, truncation), mode, **kwargs)
    return trace


# --- energetics -------------------------------------------------------------

def _phi_integrand(g: float):
    # arctan2 with a non-negative second argument is arctan(y/x) with the right endpoint limits
    return lambda x: math.atan2(g - math.cos(x), math.sin(x))


def phi_integral(g: float, rel_tol: float = 1e-10) -> float:
    """Integral over x in [0, pi] of arctan((g - cos x) / sin x)."""
    if g < 0:
        raise ValueError("phi_integral expects g >= 0")
    return integrate(_phi_integrand(g), 0.0, math.pi, rel_tol=rel_tol)


def _angle_sum(p: TfimParams, g: float) -> float:
    k = momentum_values(p) * p.b
    return float(np.sum(np.arctan2(g - np.cos(k), np.sin(k))))


def tfim_cost_analytic(p: TfimParams) -> float:
    """Full-control cost with the per-mode norm sum, as a finite momentum sum."""
    s = p.schedule
    return abs(_angle_sum(p, s.g_final) - _angle_sum(p, s.g0)) / (SQRT2 * p.tau_q)


def tfim_savings_analytic(p: TfimParams, w: ImpulseWindow) -> Tuple[float, float]:
    """Finite-N savings for a step-function switch over ``w``; returns (dE, dE / C)."""
    s = p.schedule
    a = [_angle_sum(p, s.value(t)) for t in (0.0, w.t_minus, w.t_plus, s.tau_q)]
    d_e = abs((a[3] - a[2]) + (a[1] - a[0])) / (SQRT2 * p.tau_q)
    return d_e, d_e / tfim_cost_analytic(p)


def tfim_savings_thermo(p: TfimParams, w: ImpulseWindow) -> Tuple[float, float]:
    """Large-N savings with the mode sum replaced by N/(2 pi) times an integral over k."""
    s = p.schedule
    phi = [phi_integral(s.value(t)) for t in (0.0, w.t_minus, w.t_plus, s.tau_q)]
    d_e = p.n / (2.0 * SQRT2 * math.pi * p.tau_q) * (phi[3] - phi[2] + phi[1] - phi[0])
    ratio = 1.0 - (phi[2] - phi[1]) / (phi[3] - phi[0])
    return d_e, ratio
