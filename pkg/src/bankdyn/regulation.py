"""Reserve requirements: primary, secondary and the LDR-linked component."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveDepositError
from .model import ModelParams


@dataclass(frozen=True)
class RegulationParams:
    lambda_l: float = 0.78
    lambda_u: float = 1.0
    gamma_l: float = 0.1
    gamma_u: float = 0.2
    # capital adequacy below its minimum; the upper penalty is waived otherwise
    car_below_min: bool = True

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValueError("invalid regulation parameters: " + "; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        if not 0 < self.lambda_l < self.lambda_u:
            out.append("need 0 < lambda_l < lambda_u")
        if self.gamma_l < 0 or self.gamma_u < 0:
            out.append("gamma_l and gamma_u must be >= 0")
        return out


@dataclass
class ReserveReport:
    t: np.ndarray
    ldr: np.ndarray
    gwm_ldr: np.ndarray
    primary: np.ndarray
    secondary: np.ndarray
    total: np.ndarray
    integrated_gwm: float

    @property
    def rows(self) -> list[tuple[float, ...]]:
        cols = (self.t, self.ldr, self.gwm_ldr, self.primary, self.secondary, self.total)
        return list(zip(*(c.tolist() for c in cols)))


def ldr(D: float, L: float) -> float:
    """Loan-to-deposit ratio."""
    if not D > 0:
        raise NonPositiveDepositError(f"LDR needs D > 0, got {D}")
    return L / D


def gwm_ldr(reg: RegulationParams, lam: float, D: float) -> float:
    """LDR-linked reserve. Zero on the closed band [lambda_l, lambda_u]."""
    if lam < reg.lambda_l:
        return reg.gamma_l * (reg.lambda_l - lam) * D
    if lam <= reg.lambda_u:
        return 0.0
    if reg.car_below_min:
        return reg.gamma_u * (lam - reg.lambda_u) * D
    return 0.0


def reserves(params: ModelParams, reg: RegulationParams, D: float, L: float) -> tuple[float, float, float, float]:
    """(primary, secondary, gwm_ldr, total) for one balance sheet."""
    lam = ldr(D, L)
    primary = params.kappa1 * D
    secondary = params.kappa2 * D
    ldr_part = gwm_ldr(reg, lam, D)
    return primary, secondary, ldr_part, primary + secondary + ldr_part


def _gwm_vec(reg: RegulationParams, lam: np.ndarray, D: np.ndarray) -> np.ndarray:
    below = np.where(lam < reg.lambda_l, reg.gamma_l * (reg.lambda_l - lam) * D, 0.0)
    upper = reg.gamma_u if reg.car_below_min else 0.0
    above = np.where(lam > reg.lambda_u, upper * (lam - reg.lambda_u) * D, 0.0)
    return below + above


def reserve_series(params: ModelParams, reg: RegulationParams, trajectory) -> ReserveReport:
    """Reserves at every sample of ``trajectory`` plus the trapezoidal time integral of the LDR part."""
    t = np.asarray(trajectory.t, dtype=float)
    D = np.asarray(trajectory.D, dtype=float)
    L = np.asarray(trajectory.L, dtype=float)
    if t.size == 0:
        raise ValueError("empty trajectory")
    if np.any(~(D > 0)):
        bad = int(np.argmin(D > 0))
        raise NonPositiveDepositError(f"D must stay positive, got D={D[bad]} at t={t[bad]}")
    lam = L / D
    gwm = _gwm_vec(reg, lam, D)
    primary = params.kappa1 * D
    secondary = params.kappa2 * D
    total = gwm + primary + secondary
    area = float(np.trapezoid(gwm, t)) if t.size > 1 else 0.0
    return ReserveReport(t, lam, gwm, primary, secondary, total, area)
