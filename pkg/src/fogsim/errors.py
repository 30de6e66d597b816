"""Exception types shared across the simulator."""


class FogsimError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(FogsimError, ValueError):
    """A constructor or operation received an out-of-range or malformed value."""


class UnknownNodeError(FogsimError, LookupError):
    """A node id was not found in the topology."""


class FeasibilityError(FogsimError):
    """A placement exceeds the capacity of at least one compute node."""


class ConfigurationError(FogsimError):
    """Simulation inputs are individually valid but mutually inconsistent."""


class ConsistencyError(FogsimError):
    """An internal invariant was violated (graph bookkeeping, conservation, ...)."""


class ScenarioError(FogsimError):
    """Base class for scenario-file problems."""


class ScenarioSyntaxError(ScenarioError):
    """The scenario document is not well-formed JSON."""


class ScenarioSemanticError(ScenarioError):
    """The scenario document is well-formed but contains invalid content."""
