"""Exception types shared across the package."""


class CapExceeded(RuntimeError):
    """An exact enumeration would exceed its configured size cap.

    Callers catching this should fall back to Monte Carlo or shrink the
    instance; it is never raised after partial work.
    """


class InstanceFormatError(ValueError):
    """An instance file (or in-memory construction) violates an invariant."""
