"""
Acceptance suite: thirteen end-to-end checks at fixed tolerances.

Each check prints one ``PASS``/``FAIL`` line. Under pytest the lines are
also collected and repeated in the terminal summary. Running this file
directly prints the lines without pytest.
"""

import math
import sys

import numpy as np
import pytest

from impulse_cd import lz, tfim
from impulse_cd.kzm import fit_freeze_out_exponent
from impulse_cd.protocol import (
    ControlMode,
    LzModel,
    TfimMomentumModel,
    TfimSpinModel,
    control_coefficient,
    cost_lower_bound,
    cost_numeric,
    energetics,
    run_protocol,
    savings_numeric,
)

RESULTS = {}


def _final(model, mode):
    trace, _ = run_protocol(model, mode, samples=2, costs=False)
    return trace.final_fidelity


def _lz(tau, **kw):
    return LzModel(lz.LzParams.create(tau, **kw))


def lz_exact_control():
    fids = {tau: _final(_lz(tau), ControlMode.full()) for tau in (1.0, 5.0, 10.0, 25.0)}
    worst = max(abs(1 - f) for f in fids.values())
    return worst <= 1e-6, f"max |1 - F| = {worst:.2e} over tau in {sorted(fids)}"


def lz_transition_formula():
    errs = {}
    for tau in (1.0, 2.0, 5.0, 10.0, 25.0):
        m = _lz(tau)
        errs[tau] = abs((1 - _final(m, ControlMode.uncontrolled())) - lz.lz_transition_probability(m.params))
    worst = max(errs.values())
    return worst <= 0.01, "max |1 - F - P_LZ| = " + f"{worst:.4f}"


def lz_impulse_headline():
    found = []
    for tau in (3.0, 4.0, 5.0, 6.0, 7.0, 8.0):
        m = _lz(tau)
        trace, report = run_protocol(m, ControlMode.impulse(m=400.0), samples=2, lower_bound=False)
        if trace.infidelity <= 1e-4 and 0.3 <= report.ratio <= 0.5:
            found.append((tau, trace.infidelity, report.ratio))
    detail = ", ".join(f"tau={t:g}: 1-F={i:.2e}, dE/C={r:.3f}" for t, i, r in found) or "no qualifying tau"
    return bool(found), detail


def lz_analytic_cost():
    m = _lz(5.0)
    c_num = cost_numeric(m)
    c_ana = lz.lz_cost_analytic(m.params)
    rel_c = abs(c_num - c_ana) / c_ana
    mode = ControlMode.impulse(m=400.0)
    d_num = savings_numeric(m, control_coefficient(m, mode), window=m.impulse_window())
    d_ana, _ = lz.lz_savings_analytic(m.params, m.impulse_window())
    rel_d = abs(d_num - d_ana) / d_num
    return rel_c <= 1e-6 and rel_d <= 0.02, f"C rel err {rel_c:.1e}; dE step vs numeric rel diff {rel_d:.1e}"


def eta_knee():
    tau = 5.0
    m = _lz(tau)
    mu = lz.lz_impulse_half_width(m.params)
    f_mu = _final(m, ControlMode.fixed_window(mu))
    f_half = _final(m, ControlMode.fixed_window(tau / 2))
    f_quarter = _final(m, ControlMode.fixed_window(mu / 4))
    ok = f_mu >= f_half - 0.01 and f_quarter <= f_mu - 0.05
    return ok, f"F(mu)={f_mu:.6f}, F(tau/2)={f_half:.6f}, F(mu/4)={f_quarter:.5f}"


def kzm_exponent():
    samples = [(t, lz.lz_freeze_out_half_width(lz.LzParams.create(float(t))))
               for t in np.geomspace(0.05, 0.5, 12)]
    slope = fit_freeze_out_exponent(samples)
    return abs(slope - 0.5) <= 0.05, f"slope {slope:.4f}"


def tfim_cross_representation():
    worst_full, worst_none = 0.0, 0.0
    for n in (4, 6):
        p = tfim.TfimParams.create(n, 2.0, g0=0.01)
        spin = TfimSpinModel(p, n // 2)
        mom = TfimMomentumModel(p)
        worst_full = max(worst_full, abs(1 - _final(spin, ControlMode.full())), abs(1 - _final(mom, ControlMode.full())))
        worst_none = max(worst_none, abs(_final(spin, ControlMode.uncontrolled()) - _final(mom, ControlMode.uncontrolled())))
    ok = worst_full <= 1e-6 and worst_none <= 1e-4
    return ok, f"full-control max |1 - F| = {worst_full:.1e}; uncontrolled spin vs momentum {worst_none:.1e}"


def tfim_lowest_mode():
    diffs = {}
    for tau in (5.0, 10.0, 25.0, 50.0):
        p = tfim.TfimParams.create(16, tau)
        diffs[tau] = abs(_final(TfimMomentumModel(p), ControlMode.uncontrolled()) - tfim.lowest_mode_lz_estimate(p))
    worst = max(diffs.values())
    return worst <= 0.05, "max |F - estimate| = " + f"{worst:.4f}"


def tfim_impulse_advantage():
    parts, ok = [], True
    for tau in (10.0, 25.0):
        m = TfimMomentumModel(tfim.TfimParams.create(16, tau))
        bare, gated = _final(m, ControlMode.uncontrolled()), _final(m, ControlMode.impulse())
        ok &= gated > bare
        parts.append(f"tau={tau:g}: {gated:.5f} vs {bare:.5f}")
    return ok, "; ".join(parts)


def tfim_energetics():
    ns = list(range(8, 20, 2))
    d_es, worst_c = [], 0.0
    for n in ns:
        m = TfimMomentumModel(tfim.TfimParams.create(n, 10.0))
        report = energetics(m, ControlMode.impulse(), lower_bound=False)
        worst_c = max(worst_c, abs(report.cost - report.analytic["C"]) / report.analytic["C"])
        d_es.append(report.delta_e)
        if n == 18:
            ratio_gap = abs(report.ratio - report.analytic["ratio_thermo"])
    slope, icept = np.polyfit(ns, d_es, 1)
    lin_dev = max(abs(d - (slope * n + icept)) / d for n, d in zip(ns, d_es))
    ok = worst_c <= 1e-6 and ratio_gap <= 0.02 and lin_dev <= 0.05
    return ok, f"C rel err {worst_c:.1e}; N=18 ratio vs large-N {ratio_gap:.4f}; affine deviation {lin_dev:.2%}"


def truncation_hierarchy():
    p_short = tfim.TfimParams.create(6, 0.5, g0=0.01)
    full = [_final(TfimSpinModel(p_short, 1), ControlMode.uncontrolled())]
    full += [_final(TfimSpinModel(p_short, m), ControlMode.full()) for m in (1, 2, 3)]
    monotone = all(a < b for a, b in zip(full, full[1:])) and abs(1 - full[-1]) <= 1e-6
    crossings = []
    for tau in (2.0, 3.0, 4.0, 5.0):
        p = tfim.TfimParams.create(6, tau, g0=0.01)
        fids = [_final(TfimSpinModel(p, m), ControlMode.impulse()) for m in (1, 2, 3)]
        if any(fids[i] > fids[j] for i in range(3) for j in range(i + 1, 3)):
            crossings.append(tau)
    ok = monotone and bool(crossings)
    fulls = ", ".join(f"{f:.4f}" for f in full)
    return ok, f"full control at tau=0.5 (none, M=1..3): {fulls}; impulse crossings at tau in {crossings}"


def limit_properties():
    fast = energetics(_lz(0.1), ControlMode.impulse(), lower_bound=False)
    slow = energetics(_lz(100.0), ControlMode.impulse(), lower_bound=False)
    ok = fast.delta_e <= 0.01 * fast.cost and slow.ratio >= 0.95
    return ok, f"tau=0.1: dE/C={fast.ratio:.5f} (need <= 0.01); tau=100: dE/C={slow.ratio:.5f} (need >= 0.95)"


def lower_bound_attainment():
    errs = []
    for m in (_lz(5.0), TfimMomentumModel(tfim.TfimParams.create(8, 10.0))):
        c = cost_numeric(m)
        errs.append(abs(cost_lower_bound(m) - c) / c)
    return max(errs) <= 1e-6, f"LZ rel diff {errs[0]:.1e}; Ising N=8 rel diff {errs[1]:.1e}"


CRITERIA = [
    (1, "LZ exact control", lz_exact_control),
    (2, "LZ uncontrolled transition formula", lz_transition_formula),
    (3, "LZ impulse fidelity and saving", lz_impulse_headline),
    (4, "LZ analytic cost and step saving", lz_analytic_cost),
    (5, "eta knee", eta_knee),
    (6, "freeze-out exponent", kzm_exponent),
    (7, "Ising spin vs momentum", tfim_cross_representation),
    (8, "Ising lowest-mode estimate", tfim_lowest_mode),
    (9, "Ising impulse advantage", tfim_impulse_advantage),
    (10, "Ising energetics", tfim_energetics),
    (11, "truncation hierarchy and crossings", truncation_hierarchy),
    (12, "LZ saving limits", limit_properties),
    (13, "lower bound attainment", lower_bound_attainment),
]


def evaluate(number, title, check):
    ok, detail = check()
    line = f"[{number:2d}] {'PASS' if ok else 'FAIL'} {title}: {detail}"
    RESULTS[number] = line
    print(line)
    return ok, line


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_acceptance(number, title, check):
    ok, line = evaluate(number, title, check)
    assert ok, line


if __name__ == "__main__":
    outcomes = [evaluate(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(outcomes) else 1)
