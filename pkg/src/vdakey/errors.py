"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An argument breaks a documented precondition."""


class DegenerateInputError(ContractViolation):
    """Input has zero spread where a nonzero one is required."""


class EmptyKeyError(RuntimeError):
    """The reliability selection kept no bits."""


class InfeasibleError(RuntimeError):
    """No parameter choice satisfies the security and decoding targets."""
