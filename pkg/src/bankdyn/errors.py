"""Exception types shared across the package."""


class BankDynError(Exception):
    pass


class ConfigError(BankDynError):
    """Configuration could not be parsed or failed validation."""


class SingularFieldError(BankDynError):
    def __init__(self, which, t, D, L, alpha):
        self.which = which
        self.t = t
        self.D = D
        self.L = L
        self.alpha = alpha
        super().__init__(f"{which} denominator singular at t={t!r} (D={D!r}, L={L!r}, alpha={alpha!r})")


class MismatchedFrequencyError(BankDynError):
    pass


class OnLocusError(BankDynError):
    pass


class InvalidStateError(BankDynError):
    pass


class NoSignChangeError(BankDynError):
    pass


class OutOfSpanError(BankDynError):
    pass


class NonPositiveDepositError(BankDynError):
    pass


class ZeroVarianceError(BankDynError):
    pass


class LabelMismatchError(BankDynError):
    pass
