"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A parameter violates its domain (negative variance, bad geometry, ...)."""


class SingularChannelError(RuntimeError):
    """A channel matrix is rank-deficient beyond the pseudo-inverse tolerance."""
