"""Acceptance suite: one test per criterion, each logged as PASS/FAIL in the summary.

Run on its own with ``pytest tests/test_acceptance.py -v``.
"""
import json
import math

import numpy as np
import pytest

from chsh_reservoir import pseudomode
from chsh_reservoir.analysis import SweepGrid, bell_trace, sweep, trace_intervals
from chsh_reservoir.analytic import PSI_10, state_at
from chsh_reservoir.bell import (TSIRELSON, brute_force_chsh, chsh_max, chsh_max_horodecki,
                                 chsh_max_xstate, chsh_values)
from chsh_reservoir.cli import main
from chsh_reservoir.params import regime
from chsh_reservoir.states import random_density_matrix, random_x_state, trace_distance

pytestmark = pytest.mark.slow

S = 10.0
ORACLE_R1 = (0.1, 0.3, 0.5, 1 / math.sqrt(2), 0.9)


def record(log, key, ok, detail):
    log[key] = (bool(ok), detail)
    assert ok, f"{key}: {detail}"


def lindblad_batch(r1_values, taus, gamma_ratio=0.0, N=1, symmetrize=True):
    pairs = [regime(S, r1, gamma_ratio) for r1 in r1_values]
    gen = pseudomode.build_generator_batch([p for p, _ in pairs], pairs[0][1], N)
    rho0 = np.broadcast_to(pseudomode.product_state(PSI_10, N), (len(r1_values), gen.dim, gen.dim))
    return pseudomode.evolve(rho0, gen, taus, symmetrize=symmetrize)


@pytest.fixture(scope="module")
def oracle_taus():
    return np.linspace(0.0, 20.0, 200)


@pytest.fixture(scope="module")
def oracle_states(oracle_taus):
    return lindblad_batch(ORACLE_R1, oracle_taus, symmetrize=False)


@pytest.fixture(scope="module")
def default_sweep():
    return sweep("analytic", SweepGrid(), S)


def test_1_oracle_equivalence(acceptance_log, oracle_taus, oracle_states):
    worst = 0.0
    for k, r1 in enumerate(ORACLE_R1):
        params, _ = regime(S, r1)
        exact = state_at(oracle_taus, PSI_10, params)
        reduced = pseudomode.reduce_qubits(oracle_states[:, k])
        worst = max(worst, max(trace_distance(a, b) for a, b in zip(reduced, exact)))
    record(acceptance_log, "1 oracle equivalence", worst <= 1e-6,
           f"max trace distance {worst:.2e} (tol 1e-6)")


def test_2_bell_oracles(acceptance_log):
    rng = np.random.default_rng(2)
    gap = max(abs(chsh_max_xstate(r).B - chsh_max_horodecki(r).B)
              for r in (random_x_state(rng) for _ in range(10_000)))
    states = [random_density_matrix(rng) for _ in range(10)]
    for _ in range(10):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        states.append(np.outer(psi, psi.conj()))
    excess = max(brute_force_chsh(r, 10**6, rng) - chsh_max_horodecki(r).B for r in states)
    ok = gap <= 1e-10 and excess <= 1e-3
    record(acceptance_log, "2 bell oracles", ok,
           f"X-state gap {gap:.2e} (tol 1e-10), brute-force excess {excess:.2e} (tol 1e-3)")


def test_3_boundary_claim(acceptance_log, default_sweep):
    r1 = np.asarray(default_sweep.r1_values)
    B = default_sweep.B
    at_04 = float(B[np.isclose(r1, 0.4)].max())
    high = r1 >= 0.65
    peak_high = B[high].max(axis=1)
    offenders = r1[high][peak_high > 2.0]
    ok = at_04 > 2.0 and offenders.size == 0
    detail = f"max B at r1=0.4 is {at_04:.4f}; r1 >= 0.65 with B > 2: "
    detail += ", ".join(f"{x:.2f}" for x in offenders) if offenders.size else "none"
    if offenders.size:
        detail += f" (peak {peak_high.max():.4f})"
    record(acceptance_log, "3 boundary claim", ok, detail)


def test_4_symmetric_null(acceptance_log):
    r1 = 1 / math.sqrt(2)
    coarse = bell_trace("analytic", S, r1, SweepGrid().taus).B.max()
    fine = bell_trace("analytic", S, r1, np.linspace(0, 20, 20001)).B.max()
    damped = bell_trace("lindblad", S, r1, SweepGrid().taus).B.max()
    peak = max(coarse, fine, damped)
    record(acceptance_log, "4 symmetric null", peak <= 2 + 1e-9,
           f"max B - 2 = {peak - 2:.2e} (tol 1e-9)")


def test_5_sudden_violation_and_revivals(acceptance_log):
    taus = SweepGrid().taus
    trace = bell_trace("analytic", S, 0.4, taus)
    iv = trace_intervals(trace)
    last_end = iv[-1][1] if len(iv) else math.nan
    after = trace.B[taus > last_end]
    checks = {
        "count >= 4": len(iv) >= 4,
        "first start > 0": len(iv) > 0 and iv[0][0] > 0,
        "B(0) == 2": trace.B[0] == 2.0,
        "last end < 20": last_end < 20,
        "B <= 2 after": bool(np.all(after <= 2.0)),
    }
    failed = [k for k, v in checks.items() if not v]
    record(acceptance_log, "5 sudden violation and revivals", not failed,
           f"{len(iv)} intervals, first starts at {iv[0][0]:.4g}, last ends at {last_end:.4g}"
           + (f"; failed: {', '.join(failed)}" if failed else ""))


def test_6_emission_damping(acceptance_log):
    taus = SweepGrid().taus
    free = bell_trace("lindblad", S, 0.4, taus)
    damped = bell_trace("lindblad", S, 0.4, taus, gamma_ratio=1 / 50)
    n_free, n_damped = len(trace_intervals(free)), len(trace_intervals(damped))
    ok = n_free - n_damped >= 3 and damped.B.max() < free.B.max()
    record(acceptance_log, "6 emission damping", ok,
           f"intervals {n_free} -> {n_damped}, max B {free.B.max():.4f} -> {damped.B.max():.4f}")


def test_7_threshold(acceptance_log, tmp_path):
    out = tmp_path / "threshold.json"
    assert main(["threshold", "--S", "10", "--format", "json", "--out", str(out)]) == 0
    g = json.loads(out.read_text())["gamma_star_over_gamma0"]
    record(acceptance_log, "7 threshold", 0.08 <= g <= 0.15,
           f"gamma*/gamma0 = {g:.4f} (band [0.08, 0.15], 1/9 = {1 / 9:.4f})")


def _invariants(states):
    """Worst-case trace, Hermiticity, eigenvalue and excitation-step diagnostics."""
    flat = states.reshape(-1, *states.shape[-2:])
    trace_err = np.max(np.abs(np.trace(flat, axis1=-2, axis2=-1) - 1))
    herm = np.max(np.abs(flat - flat.conj().swapaxes(-1, -2)))
    min_eig = np.min(np.linalg.eigvalsh(flat))
    n = pseudomode.excitation_number(states)
    rise = np.max(np.diff(n, axis=0))
    return trace_err, herm, min_eig, rise


def test_8_physics_invariants(acceptance_log, oracle_states):
    taus = SweepGrid().taus
    r1s = (0.1, 0.4, 0.7, 0.9)
    runs = [oracle_states]
    for ratio in (1 / 50, 0.2):
        runs.append(lindblad_batch(r1s, taus, ratio, symmetrize=False))
    cutoff = 0.0
    for ratio in (0.0, 1 / 50):
        one = pseudomode.reduce_qubits(lindblad_batch(r1s, taus, ratio, N=1))
        two_full = lindblad_batch(r1s, taus, ratio, N=2, symmetrize=False)
        runs.append(two_full)
        two = pseudomode.reduce_qubits(two_full)
        cutoff = max(cutoff, max(trace_distance(a, b) for a, b in
                                 zip(one.reshape(-1, 4, 4), two.reshape(-1, 4, 4))))
    trace_err, herm, min_eig, rise = (max(v) if i != 2 else min(v) for i, v in
                                      enumerate(zip(*(_invariants(s) for s in runs))))
    ok = trace_err <= 1e-9 and herm <= 1e-10 and min_eig >= -1e-8 and rise <= 1e-9 and cutoff <= 1e-10
    record(acceptance_log, "8 physics invariants", ok,
           f"trace {trace_err:.1e}, herm {herm:.1e}, min eig {min_eig:.1e}, "
           f"excitation rise {rise:.1e}, cutoff N=1 vs 2 {cutoff:.1e}")


def test_9_tsirelson(acceptance_log, default_sweep):
    rng = np.random.default_rng(9)
    sweep_peak = default_sweep.B.max()
    damped_peak = sweep("lindblad", SweepGrid(), S, 1 / 50).B.max()
    states = np.stack([random_density_matrix(rng) for _ in range(5000)]
                      + [random_x_state(rng) for _ in range(5000)])
    random_peak = max(float(chsh_values(states).max()), max(chsh_max(r).B for r in states[:200]))
    peak = max(sweep_peak, damped_peak, random_peak)
    record(acceptance_log, "9 tsirelson", peak <= TSIRELSON + 1e-9,
           f"max B {peak:.6f} (bound {TSIRELSON:.6f})")


def test_10_determinism(acceptance_log, tmp_path):
    paths = [tmp_path / f"run{i}.csv" for i in range(2)]
    codes = [main(["sweep", "--out", str(p)]) for p in paths]
    same = paths[0].read_bytes() == paths[1].read_bytes()
    record(acceptance_log, "10 determinism", codes == [0, 0] and same,
           f"exit codes {codes}, identical bytes: {same}")
