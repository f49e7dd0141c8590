"""Exception types raised by the library."""


class PhysicalityError(ValueError):
    """A covariance matrix or spectrum violates the uncertainty bound."""


class PhotonBudgetError(ValueError):
    """The entanglement parameter consumes more photons than the budget allows."""


class CutoffError(RuntimeError):
    """Fock truncation lost more norm than the configured tolerance."""


class OracleRegimeError(ValueError):
    """Parameters fall outside the range where the Fock oracle is trusted."""
