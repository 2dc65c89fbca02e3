"""Exception types raised by the simulation modules."""


class InvalidParameters(ValueError):
    """Parameters violate a normalizability or positivity requirement."""


class DegenerateState(ValueError):
    """A propagated variance came out non-positive (unphysical input)."""


class SingularConfiguration(ValueError):
    """Kernel formulas are singular at the requested masses, coupling or time."""


class NonConvergence(RuntimeError):
    """A numerical procedure did not reach its accuracy target."""
