"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Input rejected because an exact-integer range or memory budget would be exceeded."""


class NonConvergence(RuntimeError):
    """A numerical integration did not reach the requested tolerance within its budget."""
