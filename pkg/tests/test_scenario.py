import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bankdyn.errors import LabelMismatchError, ZeroVarianceError
from bankdyn.integrator import IntegratorConfig, Trajectory
from bankdyn.model import ModelParams, RateSet, SinusoidalRate
from bankdyn.regulation import RegulationParams
from bankdyn.scenario import (
    DEFAULT_RATIOS,
    build_set,
    compare_sets,
    diagnose_behavior,
    run_set,
)

P = ModelParams()
R = RateSet()
REG = RegulationParams()
SHORT = IntegratorConfig(t_end=0.05, dt=1e-3)


def synthetic(D_of, L_of, n=201):
    t = np.linspace(0, 1, n)
    return Trajectory(t, np.array([D_of(x) for x in t]), np.array([L_of(x) for x in t]))


def const_traj(t, D, L):
    t = np.asarray(t, float)
    return Trajectory(t, np.full_like(t, D), np.full_like(t, L))


def test_default_ratio_grid():
    assert DEFAULT_RATIOS == (0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0)


def test_build_set_examples():
    s3 = build_set("set3", 10)
    assert s3.labels == tuple("ABCDEFGHIJ")
    assert s3.initial_states()[-1][2].D == 10 and s3.initial_states()[-1][2].L == 20
    (lab, q, st0), = build_set("x", 6, [0.3]).initial_states()
    assert (lab, st0.D, st0.L) == ("A", 6, pytest.approx(1.8, abs=1e-15))
    (lab, q, st0), = build_set("y", 1, [1]).initial_states()
    assert (lab, st0.D, st0.L, st0.L / st0.D) == ("A", 1, 1, 1)


def test_build_set_rejects_bad_input():
    for D0, ratios in ((0, [1]), (-1, [1]), (1, []), (1, [0.5, 0.5]), (1, [0.4, 0.2]), (1, [-0.1])):
        with pytest.raises(ValueError):
            build_set("bad", D0, ratios)


def test_long_label_runs():
    labels = build_set("many", 1, [0.01 * (i + 1) for i in range(28)]).labels
    assert labels[25:] == ("Z", "AA", "AB")
    assert len(set(labels)) == 28


def test_regions_of_sets():
    set1 = run_set(P, R, REG, build_set("set1", 0.7), SHORT)
    set3 = run_set(P, R, REG, build_set("set3", 10), SHORT)
    assert [r.region for r in set3] == [3] * 10
    assert {1, 2} <= {r.region for r in set1}


def test_frozen_rates_give_zero_variance():
    flat = RateSet(SinusoidalRate(0.04), SinusoidalRate(0.11), SinusoidalRate(0.06))
    results = run_set(P, flat, REG, build_set("flat", 6, [0.2, 1.0, 2.0]), SHORT)
    for res in results:
        assert res.termination == "completed"
        assert np.all(res.trajectory.D == res.initial.D) and np.all(res.trajectory.L == res.initial.L)
        assert np.ptp(res.reserves.ldr) == 0.0
        assert res.diagnosis.zero_variance and res.diagnosis.verdict == "invalid"
        assert math.isnan(res.diagnosis.loan_corr)


def test_singular_runs_keep_partial_results():
    results = run_set(P, R, REG, build_set("set1", 0.7, [0.2]), IntegratorConfig(t_end=1.0, dt=1e-4))
    res, = results
    assert res.termination == "singular"
    assert res.errors and "deposit" in res.errors[0]
    assert res.reserves is not None and len(res.reserves.t) == len(res.trajectory)


def test_diagnosis_synthetic_cases():
    d = diagnose_behavior(synthetic(lambda t: 1 + R.deposit.value(t), lambda t: 2 - R.loan.value(t)), R)
    assert d.loan_corr == -1.0 and d.deposit_corr == 1.0
    assert d.loan_ok and d.deposit_ok and d.verdict == "valid"
    d = diagnose_behavior(synthetic(lambda t: 1 + R.deposit.value(t), R.loan.value), R)
    assert d.loan_corr == 1.0 and not d.loan_ok and d.verdict == "invalid"


def test_diagnosis_errors():
    with pytest.raises(ZeroVarianceError):
        diagnose_behavior(const_traj(np.linspace(0, 1, 10), 2.0, 3.0), R)
    with pytest.raises(ValueError):
        diagnose_behavior(const_traj([0.0, 0.5], 2.0, 3.0), R)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 2.0), st.floats(0.1, 2.0))
def test_diagnosis_correlations_bounded(a, s_d, s_l):
    tr = synthetic(lambda t: 3 + s_d * math.sin(5 * t) + a * t, lambda t: 2 + s_l * math.cos(3 * t))
    d = diagnose_behavior(tr, R)
    assert -1 <= d.loan_corr <= 1 and -1 <= d.deposit_corr <= 1
    assert (d.verdict == "valid") == (d.loan_ok and d.deposit_ok)


def test_initial_ratio_fidelity_and_same_ratio_setup():
    set2 = run_set(P, R, REG, build_set("set2", 6), SHORT)
    set3 = run_set(P, R, REG, build_set("set3", 10), SHORT)
    for res in set2 + set3:
        assert abs(res.reserves.ldr[0] - res.ratio) <= 1e-12
    for row in compare_sets(set2, set3):
        assert row.ldr0_a == row.ldr0_b
        assert row.initial_a[1] / row.initial_a[0] == pytest.approx(row.ldr0_a, abs=1e-12)
        assert row.initial_b[1] / row.initial_b[0] == pytest.approx(row.ldr0_b, abs=1e-12)
        assert row.initial_a != row.initial_b


def test_compare_with_itself():
    set3 = run_set(P, R, REG, build_set("set3", 10, [1.6, 2.0]), SHORT)
    assert all(row.gwm_difference == 0 for row in compare_sets(set3, set3))


def test_compare_constant_gwm():
    # lambda 0.58 with D=1 and gamma_l=0.1 gives gwm 0.02; scale D to reach 0.1 and 0.3
    from bankdyn.regulation import reserve_series
    from bankdyn.scenario import ScenarioResult
    from bankdyn.model import BankState

    def result(D):
        tr = const_traj([0.0, 0.5, 1.0], D, 0.58 * D)
        return ScenarioResult("s", "A", 0.58, BankState(0, D, 0.58 * D), 1, tr, reserve_series(P, REG, tr), None)

    row, = compare_sets([result(5.0)], [result(15.0)])
    assert row.integrated_gwm_a == pytest.approx(0.1, abs=1e-15)
    assert row.gwm_difference == pytest.approx(0.2, abs=1e-15)


def test_compare_label_mismatch():
    a = run_set(P, R, REG, build_set("a", 10, [1.0, 2.0]), SHORT)
    b = run_set(P, R, REG, build_set("b", 10, [1.0]), SHORT)
    with pytest.raises(LabelMismatchError):
        compare_sets(a, b)


def test_workers_do_not_change_results():
    s = build_set("set2", 6, [0.2, 1.0, 2.0])
    cfg = IntegratorConfig(t_end=0.2, dt=1e-3)
    serial = run_set(P, R, REG, s, cfg, workers=1)
    pooled = run_set(P, R, REG, s, cfg, workers=2)
    for a, b in zip(serial, pooled):
        assert a.label == b.label
        assert np.array_equal(a.trajectory.D, b.trajectory.D)
        assert np.array_equal(a.trajectory.L, b.trajectory.L)
        assert a.reserves.integrated_gwm == b.reserves.integrated_gwm
