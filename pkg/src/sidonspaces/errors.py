class SidonError(Exception):
    """Base class for errors raised by this package."""


class InputError(SidonError, ValueError):
    """Malformed or inconsistent input (bad polynomial, mixed ambients, ...)."""


class ReducibleError(InputError):
    """A user-supplied defining polynomial is not irreducible."""


class BudgetExceeded(SidonError, RuntimeError):
    """A brute-force routine would exceed its configured work cap."""

    def __init__(self, what: str, cost: int, cap: int):
        super().__init__(f"{what}: cost {cost} exceeds cap {cap}")
        self.what = what
        self.cost = cost
        self.cap = cap


class PreconditionError(InputError):
    """A construction's hypotheses are not met.

    ``witness`` optionally carries the object certifying the failure.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
