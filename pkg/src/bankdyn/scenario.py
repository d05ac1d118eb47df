"""Initial-value sets, sweeps, demand-slope diagnosis and cross-set comparison."""

from __future__ import annotations

import math
import string
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BankDynError, LabelMismatchError, ZeroVarianceError
from .integrator import IntegratorConfig, Trajectory, integrate
from .model import BankState, ModelParams, RateSet, classify_region, singularity_loci
from .regulation import RegulationParams, ReserveReport, reserve_series

DEFAULT_RATIOS = tuple(round(0.2 * i, 10) for i in range(1, 11))
DEFAULT_THETA = 0.5

VALID = "valid"
INVALID = "invalid"


def _labels(n: int) -> list[str]:
    letters = string.ascii_uppercase
    out = []
    for i in range(n):
        label, j = "", i
        while True:
            label = letters[j % 26] + label
            j = j // 26 - 1
            if j < 0:
                break
        out.append(label)
    return out


@dataclass(frozen=True)
class ScenarioSet:
    name: str
    D0: float
    ratios: tuple[float, ...]
    labels: tuple[str, ...]

    def initial_states(self, t0: float = 0.0) -> list[tuple[str, float, BankState]]:
        return [(lab, q, BankState(t0, self.D0, q * self.D0)) for lab, q in zip(self.labels, self.ratios)]


@dataclass(frozen=True)
class BehaviorDiagnosis:
    loan_corr: float
    deposit_corr: float
    loan_ok: bool
    deposit_ok: bool
    verdict: str
    zero_variance: bool = False
    note: str = ""


@dataclass
class ScenarioResult:
    set_name: str
    label: str
    ratio: float
    initial: BankState
    region: Optional[int]
    trajectory: Optional[Trajectory]
    reserves: Optional[ReserveReport]
    diagnosis: Optional[BehaviorDiagnosis]
    errors: list[str] = field(default_factory=list)

    @property
    def termination(self) -> str:
        return self.trajectory.termination if self.trajectory is not None else "error"


def build_set(name: str, D0: float, ratios: Sequence[float] = DEFAULT_RATIOS) -> ScenarioSet:
    ratios = tuple(float(q) for q in ratios)
    if not (math.isfinite(D0) and D0 > 0):
        raise ValueError(f"D0 must be positive, got {D0}")
    if not ratios:
        raise ValueError("ratios must be non-empty")
    if any(not q > 0 for q in ratios):
        raise ValueError("ratios must be positive")
    if any(b <= a for a, b in zip(ratios, ratios[1:])):
        raise ValueError("ratios must be strictly increasing")
    return ScenarioSet(name, float(D0), ratios, tuple(_labels(len(ratios))))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(np.dot(xc, yc) / math.sqrt(float(np.dot(xc, xc)) * float(np.dot(yc, yc))))
    return max(-1.0, min(1.0, r))


def diagnose_behavior(trajectory: Trajectory, rates: RateSet, theta: float = DEFAULT_THETA) -> BehaviorDiagnosis:
    """Check the demand slopes along a trajectory.

    Loans should fall when the loan rate rises and deposits should rise with
    the deposit rate. Both are judged by the Pearson correlation of per-step
    increments against ``theta``.
    """
    t = np.asarray(trajectory.t, dtype=float)
    if t.size < 3:
        raise ValueError(f"diagnosis needs at least 3 samples, got {t.size}")
    dL = np.diff(np.asarray(trajectory.L, dtype=float))
    dD = np.diff(np.asarray(trajectory.D, dtype=float))
    d_rl = np.diff(np.array([rates.loan.value(x) for x in t]))
    d_rd = np.diff(np.array([rates.deposit.value(x) for x in t]))
    for name, series in (("L", dL), ("D", dD), ("r_L", d_rl), ("r_D", d_rd)):
        if np.ptp(series) == 0.0:
            raise ZeroVarianceError(f"increments of {name} are constant")
    loan_corr = _pearson(dL, d_rl)
    deposit_corr = _pearson(dD, d_rd)
    loan_ok = loan_corr < -theta
    deposit_ok = deposit_corr > theta
    verdict = VALID if loan_ok and deposit_ok else INVALID
    return BehaviorDiagnosis(loan_corr, deposit_corr, loan_ok, deposit_ok, verdict)


def _undefined_diagnosis(reason: str, zero_variance: bool) -> BehaviorDiagnosis:
    nan = float("nan")
    return BehaviorDiagnosis(nan, nan, False, False, INVALID, zero_variance=zero_variance, note=reason)


def run_scenario(params: ModelParams, rates: RateSet, reg: RegulationParams, set_name: str,
                 label: str, ratio: float, state0: BankState, config: IntegratorConfig,
                 theta: float = DEFAULT_THETA) -> ScenarioResult:
    result = ScenarioResult(set_name, label, ratio, state0, None, None, None, None)
    try:
        result.region = classify_region(singularity_loci(params, rates), state0.D, state0.L, state0.t,
                                        config.singular_eps)
        result.trajectory = integrate(params, rates, state0, config)
    except BankDynError as exc:
        result.errors.append(str(exc))
        return result
    traj = result.trajectory
    if traj.events:
        ev = traj.events[0]
        result.errors.append(f"{ev.which} singularity at t={ev.t_star:.6g}")
    elif traj.termination != "completed":
        result.errors.append(f"terminated: {traj.termination}")
    result.reserves = reserve_series(params, reg, traj)
    try:
        result.diagnosis = diagnose_behavior(traj, rates, theta)
    except ZeroVarianceError as exc:
        result.diagnosis = _undefined_diagnosis(str(exc), zero_variance=True)
    except ValueError as exc:
        result.diagnosis = _undefined_diagnosis(str(exc), zero_variance=False)
    return result


def _run_one(args):
    return run_scenario(*args)


def run_set(params: ModelParams, rates: RateSet, reg: RegulationParams, scenario_set: ScenarioSet,
            config: IntegratorConfig = IntegratorConfig(), theta: float = DEFAULT_THETA,
            workers: int = 1) -> list[ScenarioResult]:
    """Run every scenario of the set; results keep the set's label order.

    Per-scenario failures are recorded on the result. With ``workers > 1``
    scenarios run in separate processes; each is a pure function of its
    inputs, so the output does not depend on scheduling.
    """
    jobs = [(params, rates, reg, scenario_set.name, lab, q, s0, config, theta)
            for lab, q, s0 in scenario_set.initial_states()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(job) for job in jobs]


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    ldr0_a: float
    ldr0_b: float
    initial_a: tuple[float, float]
    initial_b: tuple[float, float]
    integrated_gwm_a: float
    integrated_gwm_b: float
    ldr_min_a: float
    ldr_max_a: float
    ldr_min_b: float
    ldr_max_b: float

    @property
    def gwm_difference(self) -> float:
        return self.integrated_gwm_b - self.integrated_gwm_a


def _summary(res: ScenarioResult) -> tuple[float, float, float]:
    if res.reserves is None:
        nan = float("nan")
        return nan, nan, nan
    lam = res.reserves.ldr
    return res.reserves.integrated_gwm, float(lam.min()), float(lam.max())


def compare_sets(results_a: Sequence[ScenarioResult], results_b: Sequence[ScenarioResult]) -> list[ComparisonRow]:
    by_a = {r.label: r for r in results_a}
    by_b = {r.label: r for r in results_b}
    if set(by_a) != set(by_b):
        raise LabelMismatchError(f"label sets differ: {sorted(set(by_a) ^ set(by_b))}")
    rows = []
    for res_a in results_a:
        res_b = by_b[res_a.label]
        ga, lo_a, hi_a = _summary(res_a)
        gb, lo_b, hi_b = _summary(res_b)
        rows.append(ComparisonRow(
            label=res_a.label,
            # configured ratios; L0/D0 can differ from them in the last bit
            ldr0_a=res_a.ratio,
            ldr0_b=res_b.ratio,
            initial_a=(res_a.initial.D, res_a.initial.L),
            initial_b=(res_b.initial.D, res_b.initial.L),
            integrated_gwm_a=ga,
            integrated_gwm_b=gb,
            ldr_min_a=lo_a,
            ldr_max_a=hi_a,
            ldr_min_b=lo_b,
            ldr_max_b=hi_b,
        ))
    return rows
