"""Fixed-step RK4 integration with singularity-crossing detection.

Signs of both marginal profits are checked at every step boundary. A sign
change (or a stage evaluation landing on a locus) brackets an event, which is
then localized by bisecting the length of a single RK4 sub-step taken from
the left end of the bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidStateError, NoSignChangeError, OutOfSpanError, SingularFieldError
from .model import (
    DEFAULT_SINGULAR_EPS,
    DEPOSIT,
    TWO_PI,
    LOAN,
    BankState,
    ModelParams,
    RateSet,
    alpha_deposit,
    alpha_loan,
    classify_region,
    singularity_loci,
    vector_field,
)

TERMINATE = "terminate-on-event"
ANNOTATE = "annotate-and-continue"
EVENT_POLICIES = (TERMINATE, ANNOTATE)

COMPLETED = "completed"
SINGULAR = "singular"
NONPOSITIVE = "nonpositive-state"
OVERFLOW = "state-overflow"

EVENT_TOL = 1e-9
MAX_BISECTIONS = 100

Vec = tuple[float, float]
FieldFn = Callable[[float, Vec], Vec]
AlphaFn = Callable[[float, Vec], float]


@dataclass(frozen=True)
class IntegratorConfig:
    t_end: float = 2.0
    dt: float = 1e-4
    singular_eps: float = DEFAULT_SINGULAR_EPS
    event_policy: str = TERMINATE
    max_state: float = 1e6

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValueError("invalid integrator config: " + "; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        if not 0 < self.dt < self.t_end:
            out.append("need 0 < dt < t_end")
        if self.singular_eps <= 0:
            out.append("singular_eps must be > 0")
        if self.max_state <= 0:
            out.append("max_state must be > 0")
        if self.event_policy not in EVENT_POLICIES:
            out.append(f"event_policy must be one of {EVENT_POLICIES}")
        return out


@dataclass(frozen=True)
class SingularEvent:
    which: str
    t_star: float
    D: float
    L: float
    residual: float

    @property
    def state(self) -> Vec:
        return (self.D, self.L)


@dataclass
class Trajectory:
    t: np.ndarray
    D: np.ndarray
    L: np.ndarray
    events: list[SingularEvent] = field(default_factory=list)
    termination: str = COMPLETED

    def __len__(self):
        return len(self.t)

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.t.tolist(), self.D.tolist(), self.L.tolist()))

    @property
    def initial(self) -> BankState:
        return BankState(float(self.t[0]), float(self.D[0]), float(self.L[0]))

    @property
    def final(self) -> BankState:
        return BankState(float(self.t[-1]), float(self.D[-1]), float(self.L[-1]))


class BankSystem:
    """Binds params and rates into plain ``f(t, y)`` callables."""

    def __init__(self, params: ModelParams, rates: RateSet, singular_eps: float = DEFAULT_SINGULAR_EPS):
        self.params = params
        self.rates = rates
        self.singular_eps = singular_eps

    def field(self, t: float, y: Vec) -> Vec:
        return vector_field(self.params, self.rates, BankState(t, y[0], y[1]), self.singular_eps)

    def alpha(self, which: str) -> AlphaFn:
        fn = alpha_deposit if which == DEPOSIT else alpha_loan
        return lambda t, y: fn(self.params, self.rates, y[0], y[1], t)

    def signs(self, t: float, y: Vec) -> tuple[bool, bool]:
        p, r = self.params, self.rates
        return alpha_deposit(p, r, y[0], y[1], t) > 0, alpha_loan(p, r, y[0], y[1], t) > 0

    def guarded_field(self, signs: tuple[bool, bool], eps: float) -> FieldFn:
        """Field that also raises when either marginal profit leaves its side.

        Used inside one step so that stages jumping across a locus (and
        possibly back) count as a crossing instead of passing silently.
        """
        p, r = self.params, self.rates
        pos_d, pos_l = signs
        k = p.k
        free, extra = p.free_fraction, p.r_b * p.delta + p.r_r2 * p.kappa2
        rd, rl, ri = r.deposit, r.loan, r.interbank
        sin, cos = math.sin, math.cos

        def f(t: float, y: Vec) -> Vec:
            # rates evaluated once; same arithmetic as alpha_deposit / alpha_loan
            D, L = y
            wd, wl, wi = TWO_PI * rd.freq * t, TWO_PI * rl.freq * t, TWO_PI * ri.freq * t
            sd, cd, sl, cl = sin(wd), cos(wd), sin(wl), cos(wl)
            r_d = rd.mean + rd.sin_amp * sd + rd.cos_amp * cd
            r_l = rl.mean + rl.sin_amp * sl + rl.cos_amp * cl
            r_i = ri.mean + ri.sin_amp * sin(wi) + ri.cos_amp * cos(wi)
            marginal_cost = k * (D + L)
            a_d = r_i * free + extra - r_d - marginal_cost
            if not abs(a_d) > eps or (a_d > 0) != pos_d:
                raise SingularFieldError(DEPOSIT, t, D, L, a_d)
            a_l = r_l + r_i * p.gamma - r_i - marginal_cost
            if not abs(a_l) > eps or (a_l > 0) != pos_l:
                raise SingularFieldError(LOAN, t, D, L, a_l)
            slope_d = TWO_PI * rd.freq * (rd.sin_amp * cd - rd.cos_amp * sd)
            slope_l = TWO_PI * rl.freq * (rl.sin_amp * cl - rl.cos_amp * sl)
            return (p.b - D / a_d) * slope_d, (p.g - L / a_l) * slope_l

        return f


def rk4_step(fun: FieldFn, t: float, y: Vec, h: float) -> Vec:
    k1 = fun(t, y)
    k2 = fun(t + 0.5 * h, (y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]))
    k3 = fun(t + 0.5 * h, (y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]))
    k4 = fun(t + h, (y[0] + h * k3[0], y[1] + h * k3[1]))
    return (
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    )


def step_rk4(params: ModelParams, rates: RateSet, state: BankState, dt: float,
             singular_eps: float = DEFAULT_SINGULAR_EPS) -> BankState:
    system = BankSystem(params, rates, singular_eps)
    D, L = rk4_step(system.field, state.t, (state.D, state.L), dt)
    return BankState(state.t + dt, D, L)


def locate_crossing(
    fun: FieldFn,
    alpha: AlphaFn,
    t_a: float,
    y_a: Vec,
    h_max: float,
    tol: float = EVENT_TOL,
    max_iter: int = MAX_BISECTIONS,
) -> tuple[float, Vec, float]:
    """Bisect in time over ``(t_a, t_a + h_max]`` for a zero of alpha.

    ``alpha(t_a, y_a)`` fixes the "not yet crossed" sign. Each trial point is
    reached by one RK4 sub-step from the latest uncrossed point, so the
    sub-steps shrink with the bracket. A sub-step whose stages hit a
    singularity counts as crossed. Returns ``(h, y, |alpha|)`` with ``h``
    measured from ``t_a``; ``|alpha|`` may exceed ``tol`` only if the
    iteration budget or float resolution runs out first.
    """
    a = alpha(t_a, y_a)
    if abs(a) <= tol:
        return 0.0, y_a, abs(a)
    side = math.copysign(1.0, a)
    lo, hi = 0.0, h_max
    y_lo, res_lo = y_a, abs(a)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        try:
            y = rk4_step(fun, t_a + lo, y_lo, mid - lo)
            a = alpha(t_a + mid, y)
        except SingularFieldError:
            hi = mid
            continue
        if not math.isfinite(a) or math.copysign(1.0, a) != side:
            if abs(a) <= tol:
                return mid, y, abs(a)
            hi = mid
            continue
        lo, y_lo, res_lo = mid, y, abs(a)
        if res_lo <= tol:
            break
    return lo, y_lo, res_lo


def refine_event(
    params: ModelParams,
    rates: RateSet,
    bracket: tuple[BankState, BankState],
    which: str,
    singular_eps: float = DEFAULT_SINGULAR_EPS,
) -> SingularEvent:
    """Localize the ``which`` locus crossing inside ``bracket``.

    The right endpoint only supplies the step length and the sign check; the
    sub-steps are always re-integrated from the left endpoint.
    """
    a, b = bracket
    system = BankSystem(params, rates, singular_eps)
    alpha = system.alpha(which)
    alpha_a = alpha(a.t, (a.D, a.L))
    alpha_b = alpha(b.t, (b.D, b.L))
    if abs(alpha_a) <= EVENT_TOL:
        return SingularEvent(which, a.t, a.D, a.L, abs(alpha_a))
    if abs(alpha_b) <= EVENT_TOL:
        return SingularEvent(which, b.t, b.D, b.L, abs(alpha_b))
    if (alpha_a > 0) == (alpha_b > 0):
        raise NoSignChangeError(f"{which} marginal profit keeps its sign over [{a.t}, {b.t}]")
    return _localize(system, which, a.t, (a.D, a.L), b.t - a.t)


def _localize(system: BankSystem, which: str, t_a: float, y_a: Vec, h_max: float) -> SingularEvent:
    # eps=0 lets sub-steps approach the locus closer than the event tolerance
    fun = system.guarded_field(system.signs(t_a, y_a), 0.0)
    h, y, res = locate_crossing(fun, system.alpha(which), t_a, y_a, h_max)
    return SingularEvent(which, t_a + h, y[0], y[1], res)


def integrate(params: ModelParams, rates: RateSet, state0: BankState,
              config: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    if not (state0.D > 0 and state0.L > 0):
        raise InvalidStateError(f"initial volumes must be positive, got D={state0.D}, L={state0.L}")
    try:
        classify_region(singularity_loci(params, rates), state0.D, state0.L, state0.t, config.singular_eps)
    except Exception as exc:
        raise InvalidStateError(str(exc)) from exc
    if state0.t >= config.t_end:
        raise InvalidStateError(f"start time {state0.t} is not before t_end {config.t_end}")

    system = BankSystem(params, rates, config.singular_eps)
    alphas = {w: system.alpha(w) for w in (DEPOSIT, LOAN)}
    t0, dt, cap = state0.t, config.dt, config.max_state
    n_steps = math.ceil((config.t_end - t0) / dt - 1e-9)

    ts, Ds, Ls = [t0], [state0.D], [state0.L]
    events: list[SingularEvent] = []
    termination = COMPLETED
    y = (state0.D, state0.L)
    t = t0
    signs = system.signs(t, y)

    for i in range(1, n_steps + 1):
        t_next = min(t0 + i * dt, config.t_end)
        h = t_next - t
        try:
            y_next = rk4_step(system.guarded_field(signs, config.singular_eps), t, y, h)
            crossed = []
            for w, pos in zip((DEPOSIT, LOAN), signs):
                a = alphas[w](t_next, y_next)
                if not abs(a) > config.singular_eps or (a > 0) != pos:
                    crossed.append(w)
            step_failed = False
        except SingularFieldError as exc:
            y_next = None
            crossed = [exc.which]
            step_failed = True

        if crossed:
            found = sorted((_localize(system, w, t, y, h) for w in crossed), key=lambda e: e.t_star)
            event = found[0]
            events.append(event)
            if step_failed or config.event_policy == TERMINATE:
                if event.t_star > t:
                    ts.append(event.t_star)
                    Ds.append(event.D)
                    Ls.append(event.L)
                termination = SINGULAR
                break
            signs = system.signs(t_next, y_next)

        D, L = y_next
        if not (math.isfinite(D) and math.isfinite(L)) or abs(D) > cap or abs(L) > cap:
            termination = OVERFLOW
            break
        if D <= 0 or L <= 0:
            termination = NONPOSITIVE
            break
        ts.append(t_next)
        Ds.append(D)
        Ls.append(L)
        t, y = t_next, y_next

    return Trajectory(np.array(ts), np.array(Ds), np.array(Ls), events, termination)


def resample(trajectory: Trajectory, grid: Sequence[float]) -> list[tuple[float, float, float]]:
    """Linear interpolation of the trajectory onto ``grid``."""
    g = np.asarray(grid, dtype=float)
    t = trajectory.t
    if g.size and (g.min() < t[0] or g.max() > t[-1]):
        raise OutOfSpanError(f"grid [{g.min()}, {g.max()}] outside trajectory span [{t[0]}, {t[-1]}]")
    D = np.interp(g, t, trajectory.D)
    L = np.interp(g, t, trajectory.L)
    return list(zip(g.tolist(), D.tolist(), L.tolist()))
