import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impulse_cd import tfim
from impulse_cd.numerics import ContractViolation, hermitian_eigensystem, is_hermitian
from impulse_cd.protocol import ControlMode, TfimMomentumModel, TfimSpinModel, run_protocol


def test_params_validation():
    with pytest.raises(ValueError):
        tfim.TfimParams.create(5, 1.0)
    with pytest.raises(ValueError):
        tfim.TfimParams.create(0, 1.0)


def test_momentum_values_example():
    p = tfim.TfimParams.create(4, 1.0)
    np.testing.assert_allclose(tfim.momentum_values(p), [math.pi / 4, 3 * math.pi / 4])
    assert len(tfim.momentum_modes(tfim.TfimParams.create(16, 1.0))) == 8


def test_subspace_gap_examples():
    p = tfim.TfimParams.create(16, 10.0)
    k1 = tfim.momentum_values(p)[0]
    assert tfim.subspace_gap(p, k1, 5.0) == pytest.approx(8 * math.sin(math.pi / 32), rel=1e-12)
    assert tfim.subspace_gap(p, k1, 5.0) == pytest.approx(0.784137, abs=1e-6)
    assert tfim.subspace_gap(p, math.pi, 0.0) == pytest.approx(4.0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([4, 8, 16, 32]), st.floats(0.1, 50), st.floats(0, 1))
def test_subspace_ground_state_is_lowest_eigenvector(n, tau, frac):
    p = tfim.TfimParams.create(n, tau)
    t = frac * tau
    states = tfim.subspace_ground_states(p, t)
    for mode, psi in zip(tfim.momentum_modes(p), states):
        h = tfim.subspace_hamiltonian(p, mode, t)
        w, v = hermitian_eigensystem(h)
        assert abs(abs(np.vdot(psi, v[:, 0])) - 1) < 1e-10
        assert w[1] - w[0] == pytest.approx(tfim.subspace_gap(p, mode, t), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([4, 8, 16]), st.floats(1, 20), st.floats(0.01, 0.99))
def test_subspace_cd_field_generates_ground_state_motion(n, tau, frac):
    p = tfim.TfimParams.create(n, tau)
    t, h = frac * tau, 1e-5
    ground = tfim.subspace_ground_states(p, t)
    d_ground = (tfim.subspace_ground_states(p, t + h) - tfim.subspace_ground_states(p, t - h)) / (2 * h)
    for j, mode in enumerate(tfim.momentum_modes(p)):
        lhs = 1j * d_ground[j]
        rhs = tfim.subspace_cd_field(p, mode, t) @ ground[j]
        np.testing.assert_allclose(lhs, rhs, atol=1e-6)


def test_impulse_window_example():
    w = tfim.tfim_impulse_window(tfim.TfimParams.create(16, 10.0))
    assert w.t_minus == pytest.approx(3.8820, abs=1e-4)
    assert w.t_plus == pytest.approx(6.1180, abs=1e-4)
    with pytest.raises(ValueError):
        tfim.tfim_impulse_window(tfim.TfimParams.create(4, 1.0, g0=1.5))


def test_lowest_mode_estimate_example():
    p = tfim.TfimParams.create(16, 10.0)
    assert tfim.lowest_mode_lz_estimate(p) == pytest.approx(0.69751, abs=1e-5)


def test_pauli_string_matrices():
    assert tfim.PauliString.from_sites(3, {2: "Z", 3: "X"}).labels == "XIZ"
    with pytest.raises(ValueError):
        tfim.PauliString.from_sites(2, {0: "X", 2: "Z"})
    with pytest.raises(ValueError):
        tfim.PauliString(1.0, "XQ")
    zi = tfim.PauliString(1.0, "ZI").to_matrix()
    np.testing.assert_allclose(np.diag(zi), [1, 1, -1, -1])
    xy = tfim.PauliString(2.0, "XY").to_matrix()
    x = np.array([[0, 1], [1, 0]])
    y = np.array([[0, -1j], [1j, 0]])
    np.testing.assert_allclose(xy, 2 * np.kron(x, y))


@settings(max_examples=40, deadline=None)
@given(st.text(alphabet="IXYZ", min_size=1, max_size=5), st.text(alphabet="IXYZ", min_size=1, max_size=5))
def test_pauli_strings_square_to_identity_and_are_orthogonal(a, b):
    ma = tfim.PauliString(1.0, a).to_matrix()
    dim = ma.shape[0]
    np.testing.assert_allclose(ma @ ma, np.eye(dim), atol=1e-14)
    if len(a) == len(b):
        overlap = np.trace(ma.conj().T @ tfim.PauliString(1.0, b).to_matrix()) / dim
        assert overlap == pytest.approx(1.0 if a == b else 0.0, abs=1e-14)


def test_spin_ground_energy_example():
    p = tfim.TfimParams.create(6, 1.0, g0=0.5)
    e0, psi = tfim.even_parity_ground_state(tfim.spin_hamiltonian(p, 0.0), 6)
    assert e0 == pytest.approx(-6.384694563603675, abs=1e-10)
    par = tfim.parity_operator(6)
    assert np.vdot(psi, par @ psi).real == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
@pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
def test_spin_even_ground_energy_matches_momentum(n, t):
    # g runs 0.3 -> 1.0 -> 1.7 over these times
    p = tfim.TfimParams.create(n, 2.0, g0=0.3)
    e0, _ = tfim.even_parity_ground_state(tfim.spin_hamiltonian(p, t), n)
    gammas = [tfim.subspace_gap(p, m, t) for m in tfim.momentum_modes(p)]
    assert e0 == pytest.approx(-sum(gammas) / 2, abs=1e-10)


def test_even_sector_degeneracy_is_reported():
    h = np.zeros((4, 4), complex)
    with pytest.raises(ContractViolation):
        tfim.even_parity_ground_state(h, 2)


def test_u_coefficient_examples():
    assert tfim.u_coefficient(1, 0.5, 6) == pytest.approx(0.13076923076923078, rel=1e-12)
    assert tfim.u_coefficient(1, 0.0, 6) == 0.125
    assert tfim.u_coefficient(2, 0.0, 6) == 0.0
    assert tfim.u_coefficient(1, 1.0, 6) == pytest.approx(1 / 8)
    with pytest.raises(ValueError):
        tfim.u_coefficient(4, 0.5, 6)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([4, 6, 8, 10]), st.floats(1e-3, 0.999))
def test_u_coefficient_continuous_at_zero_and_decaying_in_range(n, g):
    us = [tfim.u_coefficient(m, g, n) for m in range(1, n // 2 + 1)]
    assert all(u > 0 for u in us)
    # below the critical point longer ranges carry geometrically smaller weights
    assert all(a >= b - 1e-15 for a, b in zip(us, us[1:]))
    assert tfim.u_coefficient(1, 1e-9, n) == pytest.approx(0.125, rel=1e-6)


@pytest.mark.parametrize("n,m,count", [(6, 1, 12), (6, 3, 12), (8, 2, 16)])
def test_range_string_counts(n, m, count):
    strings = tfim.cd_range_strings(n, m)
    assert len(strings) == count
    assert all(s.coefficient == -1.0 for s in strings)


def test_range_string_shape():
    labels = {s.labels for s in tfim.cd_range_strings(6, 2)}
    assert "ZXYIII" in labels and "YXZIII" in labels


@pytest.mark.parametrize("n", [4, 6, 8])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_range_operators_hermitian_and_parity_symmetric(n, m):
    if m > n // 2:
        pytest.skip("range exceeds N/2")
    op = tfim.cd_range_operator(n, m)
    assert is_hermitian(op)
    par = tfim.parity_operator(n)
    np.testing.assert_allclose(op @ par, par @ op, atol=1e-13)


def _exact_cd_on_ground(p, t):
    """Spectral counterdiabatic field applied to the even ground state."""
    h = tfim.spin_hamiltonian(p, t)
    field, _ = tfim.spin_hamiltonian_parts(p)
    v = tfim.even_parity_basis(p.n)
    w, u = np.linalg.eigh(v.conj().T @ h @ v)
    vecs = v @ u
    d_h = p.rate * field
    amps = vecs.conj().T @ d_h @ vecs[:, 0]
    coeff = np.zeros_like(amps)
    coeff[1:] = amps[1:] / (w[0] - w[1:])
    return 1j * vecs @ coeff, vecs[:, 0]


@pytest.mark.parametrize("n", [4, 6, 8])
@pytest.mark.parametrize("frac", [0.1, 0.3, 0.45])
def test_full_truncation_equals_exact_cd_on_ground_state(n, frac):
    p = tfim.TfimParams.create(n, 3.0, g0=0.05)
    t = frac * 3.0
    exact, psi = _exact_cd_on_ground(p, t)
    # the spectral field is defined up to terms diagonal in the eigenbasis
    approx = tfim.truncated_cd_field(p, n // 2, t) @ psi
    approx -= np.vdot(psi, approx) * psi
    np.testing.assert_allclose(approx, exact, atol=1e-12)


def test_truncated_field_shrinks_error_with_range():
    p = tfim.TfimParams.create(8, 3.0, g0=0.05)
    t = 1.4
    exact, psi = _exact_cd_on_ground(p, t)
    errs = []
    for m in range(1, 5):
        approx = tfim.truncated_cd_field(p, m, t) @ psi
        approx -= np.vdot(psi, approx) * psi
        errs.append(np.linalg.norm(approx - exact))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-12


def test_range_weights_half_weight_on_longest_range():
    p = tfim.TfimParams.create(6, 3.0)
    w = tfim.range_weights(p, 3, 0.5)
    assert w[2] == pytest.approx(0.5 * tfim.u_coefficient(3, 0.5, 6))
    np.testing.assert_allclose(tfim.range_weights(p, 3, np.array([0.5]))[0], w)
    with pytest.raises(ValueError):
        tfim.range_weights(p, 0, 0.5)


def test_spin_dimension_guard():
    with pytest.raises(ValueError):
        tfim.spin_hamiltonian(tfim.TfimParams.create(12, 1.0), 0.0)


def test_phi_examples():
    assert tfim.phi_integral(1.0) == pytest.approx(math.pi ** 2 / 4, rel=1e-9)
    assert abs(tfim.phi_integral(0.0)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 3), st.floats(0, 3))
def test_phi_monotone(g1, g2):
    lo, hi = sorted((g1, g2))
    assert tfim.phi_integral(lo) <= tfim.phi_integral(hi) + 1e-10


def test_angle_sum_tends_to_phi():
    p = tfim.TfimParams.create(400, 1.0)
    n = p.n
    # midpoint sum over k in (0, pi) approximates N/(2 pi) times the integral
    assert tfim._angle_sum(p, 0.7) == pytest.approx(n / (2 * math.pi) * tfim.phi_integral(0.7), rel=1e-4)


def test_cost_extensive_in_n():
    costs = [tfim.tfim_cost_analytic(tfim.TfimParams.create(n, 10.0)) for n in (64, 128, 256)]
    assert costs[1] / costs[0] == pytest.approx(2.0, rel=1e-3)
    assert costs[2] / costs[1] == pytest.approx(2.0, rel=1e-3)


def test_savings_thermo_matches_large_n():
    p = tfim.TfimParams.create(400, 10.0)
    w = tfim.tfim_impulse_window(p)
    finite = tfim.tfim_savings_analytic(p, w)
    thermo = tfim.tfim_savings_thermo(p, w)
    assert finite[1] == pytest.approx(thermo[1], abs=5e-3)


@pytest.mark.parametrize("n", [4, 6])
@pytest.mark.parametrize("kind", ["none", "full"])
def test_spin_and_momentum_representations_agree(n, kind):
    p = tfim.TfimParams.create(n, 2.0, g0=0.01)
    mode = ControlMode.uncontrolled() if kind == "none" else ControlMode.full()
    spin, _ = run_protocol(TfimSpinModel(p, n // 2), mode, samples=10, costs=False)
    mom, _ = run_protocol(TfimMomentumModel(p), mode, samples=10, costs=False)
    np.testing.assert_allclose(spin.fidelity, mom.fidelity, atol=1e-10)


def test_spin_parity_conserved_during_impulse_run():
    p = tfim.TfimParams.create(6, 4.0, g0=0.01)
    model = TfimSpinModel(p, 1)
    trace, _ = run_protocol(model, ControlMode.impulse(), samples=20, costs=False)
    np.testing.assert_allclose(model.parity(trace.states), 1.0, atol=1e-10)
