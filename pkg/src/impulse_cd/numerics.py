"""
Dense numerical kernels shared by the models.

Units are ħ = 1 throughout. Operators are plain complex ``ndarray`` objects;
a leading batch axis is allowed wherever noted so that independent two-level
systems (momentum modes) can be stepped together.
"""

from __future__ import annotations

import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy import ndarray
from scipy import optimize

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

HERMITICITY_TOL = 1e-12


class NumericsError(RuntimeError):
    """Base class for numerical failures (mapped to exit code 3 by the CLI)."""


class PropagationError(NumericsError):
    def __init__(self, t: float, message: str = "non-finite generator value"):
        super().__init__(f"{message} at t={t!r}")
        self.t = t


class QuadratureError(NumericsError):
    pass


class RootNotBracketedError(NumericsError):
    pass


class ContractViolation(ValueError):
    pass


def is_hermitian(a: ndarray, tol: float = HERMITICITY_TOL) -> bool:
    a = np.asarray(a)
    scale = np.max(np.abs(a)) if a.size else 0.0
    return bool(np.max(np.abs(a - np.swapaxes(a.conj(), -1, -2)), initial=0.0) <= tol * max(scale, 1e-300))


def frobenius_norm(a: ndarray) -> float:
    """sqrt(sum |a_ij|^2), equal to sqrt(Tr(a^dagger a))."""
    a = np.asarray(a)
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def fix_phase(vectors: ndarray) -> ndarray:
    """Make the largest-magnitude component of each column real and positive."""
    v = np.array(vectors, dtype=complex, copy=True)
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    return v * (np.abs(pivots) / pivots)[np.newaxis, :]


def hermitian_eigensystem(a: ndarray, tol: float = HERMITICITY_TOL) -> Tuple[ndarray, ndarray]:
    """
    Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
    Hermitian matrix.

    Raises
    ------
    ContractViolation
        If ``a`` is not square or not Hermitian within ``tol`` (relative).
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractViolation("matrix has non-finite entries")
    if not is_hermitian(a, tol):
        raise ContractViolation("matrix is not Hermitian")
    w, v = np.linalg.eigh(a)
    return w, fix_phase(v)


def vectorized(fn):
    """Mark a generator as accepting an array of times (leading axis)."""
    fn.vectorized = True
    return fn


def _chunk_length(sample: ndarray, cap: int = 1 << 20) -> int:
    return int(max(1, min(4096, cap // max(sample.size, 1))))


def propagate(
    generator: Callable[[float], ndarray],
    psi0: ndarray,
    t_start: float,
    t_end: float,
    steps: int,
    samples: Optional[int] = None,
) -> List[Tuple[float, ndarray]]:
    """
    Integrate ``i dpsi/dt = H(t) psi`` with fixed-step classical RK4.

    ``generator(t)`` returns ``H(t)`` with shape ``(..., d, d)`` and ``psi0``
    has shape ``(..., d)``; a leading batch axis evolves independent systems
    side by side. Generators flagged with :func:`vectorized` are evaluated on
    blocks of step times at once. States are never renormalised.

    Parameters
    ----------
    samples:
        Number of output intervals. States are recorded at ``samples + 1``
        step indices spread evenly over ``[0, steps]`` (endpoints included).
        ``None`` records every step.

    Returns
    -------
    list of (t, psi)

    Raises
    ------
    PropagationError
        If the generator returns a non-finite entry or the state overflows.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    psi = np.array(psi0, dtype=complex, copy=True)
    h = (t_end - t_start) / steps
    if samples is None or samples >= steps:
        record = set(range(steps + 1))
    else:
        record = set(np.round(np.linspace(0, steps, samples + 1)).astype(int).tolist())
    batched = psi.ndim > 1

    def apply(ham: ndarray, state: ndarray) -> ndarray:
        # overflow is detected after each block, so numpy's warnings add nothing
        with np.errstate(over="ignore", invalid="ignore"):
            if batched:
                return -1j * (ham @ state[..., None])[..., 0]
            return -1j * (ham @ state)

    def check(ham: ndarray, times) -> None:
        if not np.all(np.isfinite(ham)):
            bad = np.atleast_1d(times)
            flat = ~np.isfinite(ham.reshape(len(bad), -1)).all(axis=1) if np.ndim(times) else [True]
            raise PropagationError(float(bad[np.argmax(flat)]))

    is_vec = getattr(generator, "vectorized", False)
    chunk = _chunk_length(np.asarray(generator(t_start))) if is_vec else 1
    out = [(t_start, psi.copy())]
    n = 0
    while n < steps:
        count = min(chunk, steps - n)
        grid = t_start + h * np.arange(n, n + count + 1)
        if is_vec:
            full = generator(grid)
            mid = generator(grid[:-1] + 0.5 * h)
            check(full, grid)
            check(mid, grid[:-1] + 0.5 * h)
        for j in range(count):
            if is_vec:
                h0, hm, h1 = full[j], mid[j], full[j + 1]
            else:
                t = float(grid[j])
                if j == 0 and n == 0:
                    h_prev = generator(t)
                    check(h_prev, t)
                h0 = h_prev
                hm = generator(t + 0.5 * h)
                check(hm, t + 0.5 * h)
                h1 = generator(float(grid[j + 1]))
                check(h1, float(grid[j + 1]))
                h_prev = h1
            k1 = apply(h0, psi)
            k2 = apply(hm, psi + (0.5 * h) * k1)
            k3 = apply(hm, psi + (0.5 * h) * k2)
            k4 = apply(h1, psi + h * k3)
            psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if n + j + 1 in record:
                out.append((float(grid[j + 1]), psi.copy()))
        n += count
        if not np.all(np.isfinite(psi)):
            raise PropagationError(float(grid[-1]), "state became non-finite")
    return out


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    max_depth: int = 50,
    breakpoints: Sequence[float] = (),
) -> float:
    """
    Adaptive Simpson quadrature with interval bisection.

    The absolute tolerance is ``rel_tol`` times an estimate of the integral of
    ``|f|`` so integrands with zero net area (odd about the midpoint) still
    terminate. Optional ``breakpoints`` inside ``(a, b)`` seed the initial
    partition, which helps with sharp features such as logistic switching.

    Raises
    ------
    QuadratureError
        If some subinterval still fails the local test at ``max_depth``.
    """
    if a > b:
        raise ValueError("integrate requires a <= b")
    if a == b:
        return 0.0
    nodes = sorted({a, b, *[x for x in breakpoints if a < x < b]})
    # coarse partition: 8 panels per seeded piece
    edges: List[float] = []
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        edges.extend(np.linspace(lo, hi, 9)[:-1].tolist())
    edges.append(b)

    stack = []
    coarse_abs = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
        coarse_abs += (hi - lo) / 6.0 * (abs(flo) + 4.0 * abs(fmid) + abs(fhi))
        stack.append((lo, hi, flo, fmid, fhi, whole, 0))
    if not math.isfinite(coarse_abs):
        raise QuadratureError("integrand is not finite on the interval")
    scale = coarse_abs if coarse_abs > 0 else 1.0
    tol_density = rel_tol * scale / (b - a)

    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        err = left + right - whole
        if not math.isfinite(err):
            raise QuadratureError(f"integrand is not finite near x={mid!r}")
        if abs(err) <= 15.0 * tol_density * (hi - lo):
            total += left + right + err / 15.0
        elif depth >= max_depth:
            raise QuadratureError(f"tolerance not met at depth {max_depth} near x={mid!r}")
        else:
            stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
    return total


def bisect_root(f: Callable[[float], float], lo: float, hi: float, tol: Optional[float] = None) -> float:
    """
    Root of ``f`` in ``[lo, hi]`` by bisection.

    ``tol`` defaults to ``1e-12 * (hi - lo)``.
    """
    flo, fhi = f(lo), f(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise NumericsError("non-finite function value at bracket end")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise RootNotBracketedError(f"no sign change on [{lo!r}, {hi!r}]")
    if tol is None:
        tol = 1e-12 * abs(hi - lo)
    return float(optimize.bisect(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=400))
