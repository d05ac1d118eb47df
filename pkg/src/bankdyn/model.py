"""Bank balance-sheet model: rates, cost, profit, vector field and singularity loci.

The state of the bank is the pair of volumes (D, L). Interest rates are
periodic drivers and the volumes respond to them through the marginal
profit of each volume. Where a marginal profit vanishes the vector field is
undefined; those sets are the singularity loci.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import MismatchedFrequencyError, OnLocusError, SingularFieldError

TWO_PI = 2.0 * math.pi

DEFAULT_SINGULAR_EPS = 1e-9

DEPOSIT = "deposit"
LOAN = "loan"


@dataclass(frozen=True)
class ModelParams:
    """Structural constants of the bank.

    kappa1, kappa2 and delta are fractions of deposits held as primary
    reserve, secondary reserve and Treasury bills; gamma is equity as a
    fraction of loans. b and g are the volume responses dD/dr_D and dL/dr_L.
    """

    kappa1: float = 0.08
    kappa2: float = 0.025
    delta: float = 0.04
    gamma: float = 0.08
    r_b: float = 0.065
    r_r2: float = 0.05
    k: float = 0.01
    b: float = 1.0
    g: float = -1.0

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValueError("invalid model parameters: " + "; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        for name in ("kappa1", "kappa2", "delta"):
            if getattr(self, name) < 0:
                out.append(f"{name} must be >= 0")
        if self.kappa1 + self.kappa2 + self.delta >= 1:
            out.append("kappa1 + kappa2 + delta must be < 1")
        if not 0 < self.b <= 1:
            out.append("b must satisfy 0 < b <= 1")
        if not -1 <= self.g < 0:
            out.append("g must satisfy -1 <= g < 0")
        if self.k <= 0:
            out.append("k must be > 0")
        if self.gamma < 0:
            out.append("gamma must be >= 0")
        return out

    @property
    def free_fraction(self) -> float:
        """Share of deposits left for the interbank market."""
        return 1.0 - self.kappa1 - self.kappa2 - self.delta


@dataclass(frozen=True)
class SinusoidalRate:
    mean: float
    sin_amp: float = 0.0
    cos_amp: float = 0.0
    freq: float = 1.0

    def value(self, t: float) -> float:
        w = TWO_PI * self.freq * t
        return self.mean + self.sin_amp * math.sin(w) + self.cos_amp * math.cos(w)

    def derivative(self, t: float) -> float:
        w = TWO_PI * self.freq * t
        return TWO_PI * self.freq * (self.sin_amp * math.cos(w) - self.cos_amp * math.sin(w))


@dataclass(frozen=True)
class RateSet:
    deposit: SinusoidalRate = SinusoidalRate(0.04, sin_amp=0.02)
    loan: SinusoidalRate = SinusoidalRate(0.11, cos_amp=0.03)
    interbank: SinusoidalRate = SinusoidalRate(0.06, sin_amp=0.01)

    def at(self, t: float) -> tuple[float, float, float]:
        """(r_D, r_L, r) at time t."""
        return self.deposit.value(t), self.loan.value(t), self.interbank.value(t)


@dataclass(frozen=True)
class BankState:
    t: float
    D: float
    L: float


@dataclass(frozen=True)
class BalanceSheet:
    D: float
    L: float
    M: float
    R1: float
    R2: float
    B: float
    K: float

    @property
    def assets(self) -> float:
        return self.L + self.M + self.R1 + self.R2 + self.B

    @property
    def liabilities(self) -> float:
        return self.D + self.K


@dataclass(frozen=True)
class LocusCoefficients:
    """Locus ``k*(D+L) = c0 + cs*sin(2*pi*freq*t) + cc*cos(2*pi*freq*t)``."""

    c0: float
    cs: float
    cc: float
    freq: float
    k: float

    def rhs(self, t: float) -> float:
        w = TWO_PI * self.freq * t
        return self.c0 + self.cs * math.sin(w) + self.cc * math.cos(w)

    def boundary_volume(self, t: float) -> float:
        """Total volume D+L lying on the locus at time t."""
        return self.rhs(t) / self.k


def rate_value(rate: SinusoidalRate, t: float) -> float:
    return rate.value(t)


def rate_derivative(rate: SinusoidalRate, t: float) -> float:
    return rate.derivative(t)


def cost(params: ModelParams, D: float, L: float) -> float:
    """Servicing cost k*D*L + k*L**2/2 + k*D**2/2."""
    k = params.k
    # grouped so that swapping D and L is bit-exact
    return k * (D * L) + 0.5 * k * (D * D + L * L)


def cost_marginal(params: ModelParams, D: float, L: float) -> float:
    # same in the D and L directions
    return params.k * (D + L)


def interbank_position(params: ModelParams, D: float, L: float) -> float:
    return params.free_fraction * D + L * (params.gamma - 1.0)


def balance_sheet(params: ModelParams, state: BankState) -> BalanceSheet:
    D, L = state.D, state.L
    return BalanceSheet(
        D=D,
        L=L,
        M=interbank_position(params, D, L),
        R1=params.kappa1 * D,
        R2=params.kappa2 * D,
        B=params.delta * D,
        K=params.gamma * L,
    )


def profit_structural(params: ModelParams, rates: RateSet, sheet: BalanceSheet, t: float) -> float:
    """Profit from the itemised balance sheet. R1 and K earn nothing."""
    r_d, r_l, r = rates.at(t)
    return (
        r_l * sheet.L
        + r * sheet.M
        + params.r_b * sheet.B
        + params.r_r2 * sheet.R2
        - r_d * sheet.D
        - cost(params, sheet.D, sheet.L)
    )


def _deposit_margin(params: ModelParams, r_d: float, r: float) -> float:
    return r * params.free_fraction + (params.r_b * params.delta + params.r_r2 * params.kappa2) - r_d


def _loan_margin(params: ModelParams, r_l: float, r: float) -> float:
    return r_l + r * params.gamma - r


def profit_reduced(params: ModelParams, rates: RateSet, D: float, L: float, t: float) -> float:
    """Profit after eliminating M, R1, R2, B and K through the balance-sheet rules."""
    r_d, r_l, r = rates.at(t)
    return (
        _deposit_margin(params, r_d, r) * D
        + _loan_margin(params, r_l, r) * L
        - cost(params, D, L)
    )


def alpha_deposit(params: ModelParams, rates: RateSet, D: float, L: float, t: float) -> float:
    """Marginal profit of deposits, d(profit)/dD."""
    r_d, _, r = rates.at(t)
    return _deposit_margin(params, r_d, r) - cost_marginal(params, D, L)


def alpha_loan(params: ModelParams, rates: RateSet, D: float, L: float, t: float) -> float:
    """Marginal profit of loans, d(profit)/dL."""
    _, r_l, r = rates.at(t)
    return _loan_margin(params, r_l, r) - cost_marginal(params, D, L)


def vector_field(
    params: ModelParams,
    rates: RateSet,
    state: BankState,
    singular_eps: float = DEFAULT_SINGULAR_EPS,
) -> tuple[float, float]:
    """(dD/dt, dL/dt) at ``state``.

    Raises SingularFieldError naming the denominator when either marginal
    profit is within ``singular_eps`` of zero.
    """
    t, D, L = state.t, state.D, state.L
    a_d = alpha_deposit(params, rates, D, L, t)
    a_l = alpha_loan(params, rates, D, L, t)
    if abs(a_d) <= singular_eps:
        raise SingularFieldError(DEPOSIT, t, D, L, a_d)
    if abs(a_l) <= singular_eps:
        raise SingularFieldError(LOAN, t, D, L, a_l)
    dD = (params.b - D / a_d) * rates.deposit.derivative(t)
    dL = (params.g - L / a_l) * rates.loan.derivative(t)
    return dD, dL


def _check_shared_freq(rates: RateSet) -> float:
    freqs = {rates.deposit.freq, rates.loan.freq, rates.interbank.freq}
    if len(freqs) != 1:
        raise MismatchedFrequencyError(
            f"rates must share one frequency, got {sorted(freqs)}"
        )
    return freqs.pop()


def singularity_loci(params: ModelParams, rates: RateSet) -> tuple[LocusCoefficients, LocusCoefficients]:
    """Coefficients of the deposit and loan singularity loci.

    Each marginal profit is affine in the three rates, and the rates are
    sinusoids of one frequency, so the zero set collapses to one sinusoid in t.
    """
    freq = _check_shared_freq(rates)
    rd, rl, r = rates.deposit, rates.loan, rates.interbank
    f = params.free_fraction
    extra = params.r_b * params.delta + params.r_r2 * params.kappa2
    deposit = LocusCoefficients(
        c0=r.mean * f + extra - rd.mean,
        cs=r.sin_amp * f - rd.sin_amp,
        cc=r.cos_amp * f - rd.cos_amp,
        freq=freq,
        k=params.k,
    )
    shift = params.gamma - 1.0
    loan = LocusCoefficients(
        c0=rl.mean + r.mean * shift,
        cs=rl.sin_amp + r.sin_amp * shift,
        cc=rl.cos_amp + r.cos_amp * shift,
        freq=freq,
        k=params.k,
    )
    return deposit, loan


def classify_region(
    loci: tuple[LocusCoefficients, LocusCoefficients],
    D: float,
    L: float,
    t: float,
    singular_eps: float = DEFAULT_SINGULAR_EPS,
) -> int:
    """Region 1 lies below both loci, 2 between them, 3 above both."""
    deposit, loan = loci
    s = deposit.k * (D + L)
    lo, hi = sorted((deposit.rhs(t), loan.rhs(t)))
    for which, locus in ((DEPOSIT, deposit), (LOAN, loan)):
        if abs(s - locus.rhs(t)) <= singular_eps:
            raise OnLocusError(f"state (D={D}, L={L}) lies on the {which} locus at t={t}")
    if s < lo:
        return 1
    if s < hi:
        return 2
    return 3


def equilibrium_residual(params: ModelParams, rates: RateSet, state: BankState) -> tuple[float, float]:
    """(b*alpha_D - D, g*alpha_L - L); a zero component stops that volume."""
    t, D, L = state.t, state.D, state.L
    return (
        params.b * alpha_deposit(params, rates, D, L, t) - D,
        params.g * alpha_loan(params, rates, D, L, t) - L,
    )
